#pragma once

#include <string_view>

namespace pdecg {

enum class BoundaryKind { Dirichlet, Neumann };

/// 1D edges.
enum class Edge1D { X0, X1 };

/// 2D edges; Top is y=1, Bottom y=0, Left x=0, Right x=1.
enum class Edge2D { Top, Bottom, Left, Right };

std::string_view to_string(BoundaryKind k);
std::string_view to_string(Edge1D e);
std::string_view to_string(Edge2D e);

}  // namespace pdecg
