#pragma once

#include <filesystem>
#include <string>
#include <string_view>

namespace bassim {

/// Lower-case hex SHA-256 of a byte string.
std::string sha256_hex(std::string_view data);

/// Lower-case hex SHA-256 of a file's contents; throws std::runtime_error on I/O failure.
std::string sha256_file(const std::filesystem::path& path);

}  // namespace bassim
