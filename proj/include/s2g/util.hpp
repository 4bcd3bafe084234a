//
// Project S2G - Copyright 2026 S2G Developers.
// SPDX-License-Identifier: Apache-2.0
//

#ifndef S2G_UTIL_HPP_
#define S2G_UTIL_HPP_

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace s2g {

// FNV-1a, 64-bit. Used for content hashes in run manifests and as a stable
// string-to-seed map; not cryptographic.
constexpr std::uint64_t kFnvOffset = 0xcbf29ce484222325ULL;
constexpr std::uint64_t kFnvPrime = 0x100000001b3ULL;

constexpr std::uint64_t hash64(std::string_view s,
                               std::uint64_t h = kFnvOffset) {
  for (unsigned char c : s) {
    h ^= c;
    h *= kFnvPrime;
  }
  return h;
}

constexpr std::uint64_t hash64_mix(std::uint64_t h, std::uint64_t v) {
  for (int i = 0; i < 8; ++i) {
    h ^= (v >> (8 * i)) & 0xff;
    h *= kFnvPrime;
  }
  return h;
}

std::string read_text_file(const std::string &path);
void write_text_file(const std::string &path, std::string_view content);

std::vector<std::string> split_ws(std::string_view line);
std::string lowercase(std::string_view s);
std::string trim(std::string_view s);

// Fixed-format float printing used by reports and CSV exports so that
// repeated runs emit byte-identical files.
std::string format_g17(double v);

}  // namespace s2g

#endif  // S2G_UTIL_HPP_
