#pragma once

#include <cstdint>
#include <filesystem>
#include <string>

namespace horizonlab {

std::string sha256_hex(const void* data, std::size_t len);
std::string sha256_hex(const std::string& s);
std::string sha256_file_hex(const std::filesystem::path& path);

} // namespace horizonlab
