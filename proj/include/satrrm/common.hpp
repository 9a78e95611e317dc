#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace satrrm {

// Thrown for malformed run configs, files, or incompatible artifacts
// (as opposed to std::domain_error / std::invalid_argument for bad call arguments).
struct ConfigError : std::runtime_error {
  explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

// FNV-1a, used to fingerprint binary artifacts (feature files, weight blocks).
inline std::uint64_t fnv1a64(const void* data, std::size_t n,
                             std::uint64_t h = 0xcbf29ce484222325ull) {
  const auto* p = static_cast<const unsigned char*>(data);
  for (std::size_t i = 0; i < n; ++i) {
    h ^= p[i];
    h *= 0x100000001b3ull;
  }
  return h;
}

}  // namespace satrrm
