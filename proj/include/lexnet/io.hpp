#pragma once

#include <filesystem>
#include <string>
#include <string_view>

namespace lexnet::io {

/// Lower-case hex SHA-256 of a byte string.
std::string sha256_hex(std::string_view data);
std::string sha256_file(const std::filesystem::path& path);

/// gzip stream with a zeroed timestamp, so equal input gives equal bytes.
std::string gzip(std::string_view data);
std::string gunzip(std::string_view data);

}  // namespace lexnet::io
