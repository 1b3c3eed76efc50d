#pragma once

#include <cstdint>
#include <string>
#include <string_view>

namespace crnstab {

std::uint64_t fnv1a64(std::string_view text);
std::string to_hex(std::uint64_t value);

/// Shortest representation of a double that round-trips (%.17g trimmed).
std::string fmt_double(double value);

/// Writes content to path, creating parent directories.
void write_text_file(const std::string& path, const std::string& content);

}  // namespace crnstab
