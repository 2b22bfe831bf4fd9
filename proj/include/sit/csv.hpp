#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace sit::csv {

/// Splits one CSV record. Supports double-quoted fields with "" escapes; strips a trailing '\r'.
std::vector<std::string> split_line(std::string_view line);

/// Reads every line of a text file. A UTF-8 byte-order mark on the first line is dropped.
std::vector<std::string> read_lines(const std::filesystem::path& path);

/// Parses a finite decimal number; returns false on anything else.
bool parse_double(std::string_view text, double& out);

/// Shortest round-trip representation of a double.
std::string format_double(double value);

/// Writes `contents` to `path` through a sibling temporary file and a rename.
void write_file_atomic(const std::filesystem::path& path, std::string_view contents);

}  // namespace sit::csv
