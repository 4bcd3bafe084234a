//
// Project S2G - Copyright 2026 S2G Developers.
// SPDX-License-Identifier: Apache-2.0
//

#include "s2g/checkpoint.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <vector>

#include "json.hpp"
#include "s2g/error.hpp"

namespace s2g {

namespace {

void put_u32(std::string &out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}

void put_u64(std::string &out, std::uint64_t v) {
  for (int i = 0; i < 8; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}

std::uint32_t get_u32(const unsigned char *p) {
  std::uint32_t v = 0;
  for (int i = 3; i >= 0; --i) v = (v << 8) | p[i];
  return v;
}

std::uint64_t get_u64(const unsigned char *p) {
  std::uint64_t v = 0;
  for (int i = 7; i >= 0; --i) v = (v << 8) | p[i];
  return v;
}

void put_f64(std::string &out, double d) {
  put_u64(out, std::bit_cast<std::uint64_t>(d));
}

double get_f64(const unsigned char *p) {
  return std::bit_cast<double>(get_u64(p));
}

}  // namespace

void save_checkpoint(const std::string &path, const Checkpoint &ckpt) {
  nlohmann::json manifest;
  manifest["tensors"] = nlohmann::json::object();
  std::uint64_t offset = 0;
  for (const auto &[name, tensor] : ckpt.tensors) {
    manifest["tensors"][name] = {{"shape", tensor.shape()},
                                 {"offset", offset}};
    offset += 8 * tensor.size();
  }
  if (ckpt.meta_json.empty()) {
    manifest["meta"] = nlohmann::json::object();
  } else {
    manifest["meta"] = nlohmann::json::parse(ckpt.meta_json);
  }
  const std::string manifest_text = manifest.dump();

  std::string blob;
  blob.reserve(16 + manifest_text.size() + offset);
  blob.append(kCheckpointMagic, 4);
  put_u32(blob, kCheckpointVersion);
  put_u64(blob, manifest_text.size());
  blob.append(manifest_text);
  for (const auto &[name, tensor] : ckpt.tensors) {
    (void)name;
    for (std::size_t i = 0; i < tensor.size(); ++i) put_f64(blob, tensor.at(i));
  }

  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("checkpoint: cannot open for writing: " + path);
  out.write(blob.data(), static_cast<std::streamsize>(blob.size()));
  if (!out) throw Error("checkpoint: write failed: " + path);
}

Checkpoint load_checkpoint(const std::string &path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("checkpoint: cannot open: " + path);
  std::vector<unsigned char> blob((std::istreambuf_iterator<char>(in)),
                                  std::istreambuf_iterator<char>());
  if (blob.size() < 16 || std::memcmp(blob.data(), kCheckpointMagic, 4) != 0) {
    throw Error("checkpoint: bad magic in " + path);
  }
  const std::uint32_t version = get_u32(blob.data() + 4);
  if (version != kCheckpointVersion) {
    throw Error("checkpoint: unsupported version " + std::to_string(version));
  }
  const std::uint64_t manifest_len = get_u64(blob.data() + 8);
  if (16 + manifest_len > blob.size()) {
    throw Error("checkpoint: truncated manifest in " + path);
  }
  const std::string manifest_text(
      reinterpret_cast<const char *>(blob.data() + 16), manifest_len);
  nlohmann::json manifest = nlohmann::json::parse(manifest_text);

  const unsigned char *payload = blob.data() + 16 + manifest_len;
  const std::uint64_t payload_len = blob.size() - 16 - manifest_len;

  Checkpoint ckpt;
  for (const auto &[name, entry] : manifest.at("tensors").items()) {
    std::vector<std::size_t> shape =
        entry.at("shape").get<std::vector<std::size_t>>();
    const std::uint64_t offset = entry.at("offset").get<std::uint64_t>();
    Tensor t(shape);
    if (offset + 8 * t.size() > payload_len) {
      throw Error("checkpoint: tensor " + name + " exceeds payload");
    }
    for (std::size_t i = 0; i < t.size(); ++i) {
      t.at(i) = get_f64(payload + offset + 8 * i);
    }
    ckpt.tensors.emplace(name, std::move(t));
  }
  ckpt.meta_json = manifest.value("meta", nlohmann::json::object()).dump();
  return ckpt;
}

}  // namespace s2g
