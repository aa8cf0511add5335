#pragma once

#include <cstdint>
#include <cstdio>
#include <string>
#include <string_view>

namespace fleetmc {

// FNV-1a over the canonical state encoding. 64 bits is ample at desk
// scale; the explorer still resolves genuine collisions by comparing the
// full encodings (see explore.hpp).
inline std::uint64_t fnv1a64(std::string_view bytes) {
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

inline std::string digest_hex(std::uint64_t h, std::uint32_t bucket = 0) {
  char buf[32];
  if (bucket == 0)
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  else
    std::snprintf(buf, sizeof buf, "%016llx+%u",
                  static_cast<unsigned long long>(h), bucket);
  return buf;
}

}  // namespace fleetmc
