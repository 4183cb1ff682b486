#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace bfcnn {

// Shortest decimal that round-trips. Always '.' as decimal separator.
std::string fmt(double v);

// Parses a full string as a double; throws std::invalid_argument otherwise.
double parse_double(std::string_view s);

// Quotes the field when it holds a comma or quote (species names such as N+_1,2 do).
std::string csv_field(std::string_view s);

std::string trim(std::string_view s);
std::vector<std::string> split(std::string_view s, char sep);

// Writes via a temporary file and rename so readers never see a partial file.
void write_file_atomic(const std::filesystem::path& path, const std::string& content);

}  // namespace bfcnn
