#include "pdecg/boundary.hpp"

namespace pdecg {

std::string_view to_string(BoundaryKind k) {
  return k == BoundaryKind::Dirichlet ? "dirichlet" : "neumann";
}

std::string_view to_string(Edge1D e) { return e == Edge1D::X0 ? "x0" : "x1"; }

std::string_view to_string(Edge2D e) {
  switch (e) {
    case Edge2D::Top: return "top";
    case Edge2D::Bottom: return "bottom";
    case Edge2D::Left: return "left";
    case Edge2D::Right: return "right";
  }
  return "?";
}

}  // namespace pdecg
