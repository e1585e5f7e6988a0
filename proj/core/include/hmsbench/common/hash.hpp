#pragma once

#include <string>
#include <string_view>

namespace hmsbench {

/// Lowercase hex SHA-256 of `data`.
std::string sha256_hex(std::string_view data);

/// Reads a whole file as bytes; throws std::runtime_error when unreadable.
std::string read_file(const std::string& path);

} // namespace hmsbench
