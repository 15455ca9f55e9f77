#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace mstool {

std::vector<std::string> split(std::string_view s, char sep);
std::string join(const std::vector<std::string>& parts, std::string_view sep);
std::string trim(std::string_view s);
std::string to_lower(std::string_view s);
void strip_cr(std::string& line);

// Locale-independent; accepts a leading '+', "nan" and "inf". Returns false
// unless the whole (trimmed) field is consumed.
bool parse_double(std::string_view field, double& out);
bool parse_int(std::string_view field, long long& out);

// Shortest text that parses back to the same double.
std::string format_roundtrip(double v);

// Fixed notation rounded to 4 significant digits ("0.1235", "12.35", "6.000").
std::string format_sig4(double v);

std::string read_text_file(const std::filesystem::path& path);
void write_text_file(const std::filesystem::path& path, std::string_view content);

}  // namespace mstool
