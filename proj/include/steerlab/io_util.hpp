#pragma once

#include <filesystem>
#include <string>

namespace steer::io {

std::string read_file(const std::filesystem::path& path);

/// Write to a sibling temporary file, then rename over `path`.
void write_file_atomic(const std::filesystem::path& path, const std::string& bytes);

}  // namespace steer::io
