#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace lift {

/// Shortest representation that parses back to the same double.
std::string format_double(double value);

/// Strict full-string parse; throws a data error of `kind` on failure.
double parse_double(std::string_view text, const char* kind = "SchemaViolation");
long long parse_int(std::string_view text, const char* kind = "SchemaViolation");

std::vector<std::string_view> split(std::string_view text, char sep);
std::string_view trim(std::string_view text);

std::string read_file(const std::filesystem::path& path);
/// Writes through a temporary sibling and renames; creates parent dirs.
void write_file(const std::filesystem::path& path, std::string_view bytes);

}  // namespace lift
