#pragma once

#include <cstddef>
#include <string>

namespace cfsi {

/// SHA-256 digest (FIPS 180-4) as lowercase hex; used for artifact manifests.
std::string sha256_hex(const void* data, std::size_t len);
std::string sha256_hex(const std::string& s);

/// Digest of a file's bytes; throws std::runtime_error when unreadable.
std::string sha256_file_hex(const std::string& path);

}  // namespace cfsi
