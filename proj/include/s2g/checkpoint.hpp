//
// Project S2G - Copyright 2026 S2G Developers.
// SPDX-License-Identifier: Apache-2.0
//

#ifndef S2G_CHECKPOINT_HPP_
#define S2G_CHECKPOINT_HPP_

#include <cstdint>
#include <map>
#include <string>

#include "s2g/tensor.hpp"

namespace s2g {

// Named parameter collection. std::map keeps iteration order stable, which
// makes checkpoint payload layout and optimizer walk order deterministic.
using NamedTensors = std::map<std::string, Tensor>;

// Binary container layout:
//   bytes 0..3   magic "S2G1"
//   bytes 4..7   format version (u32, little-endian)
//   bytes 8..15  manifest length in bytes (u64, little-endian)
//   manifest     UTF-8 JSON: {"tensors": {name: {"shape": [...],
//                "offset": bytes into payload}}, "meta": {...}}
//   payload      all tensor data, little-endian 64-bit floats
struct Checkpoint {
  NamedTensors tensors;
  std::string meta_json;  // serialized JSON object, "{}" when absent
};

inline constexpr char kCheckpointMagic[4] = {'S', '2', 'G', '1'};
inline constexpr std::uint32_t kCheckpointVersion = 1;

void save_checkpoint(const std::string &path, const Checkpoint &ckpt);
Checkpoint load_checkpoint(const std::string &path);

}  // namespace s2g

#endif  // S2G_CHECKPOINT_HPP_
