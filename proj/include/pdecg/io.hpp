#pragma once

#include <filesystem>
#include <span>
#include <string>

namespace pdecg {

/// Shortest decimal text that parses back to exactly `x`.
std::string format_double(double x);

/// Parses a full string as a double; throws InputError on trailing junk.
double parse_double(const std::string& text);

/// Comma-joined values formatted with format_double.
std::string join_csv(std::span<const double> values);

std::string read_text_file(const std::filesystem::path& path);

/// Creates parent directories, then writes `contents`.
void write_text_file(const std::filesystem::path& path, const std::string& contents);

}  // namespace pdecg
