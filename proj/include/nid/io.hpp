// Apache License, Version 2.0, refer to LICENSE.txt

#pragma once

#include <filesystem>
#include <string>
#include <vector>

namespace nid::io {

// Whole file as a string; throws nid::Error naming the path when unreadable.
std::string read_file(const std::filesystem::path& path);

std::vector<std::string> read_lines(const std::filesystem::path& path);

// Writes to a sibling temp file and renames it into place, so readers never
// observe a partially written output.
void write_file_atomic(const std::filesystem::path& path, const std::string& contents);

// Shortest decimal representation that round-trips to the same double.
std::string format_double(double v);

// Splits one CSV line on commas. Fields produced by this library never
// contain quotes or commas, so no quoting rules are applied.
std::vector<std::string> split_csv(const std::string& line);

}  // namespace nid::io
