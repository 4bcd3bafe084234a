//
// Project S2G - Copyright 2026 S2G Developers.
// SPDX-License-Identifier: Apache-2.0
//

#include "s2g/nn.hpp"

#include <cmath>

#include "s2g/error.hpp"

namespace s2g {

Var Binder::operator()(const std::string &name) {
  const auto hit = bound_.find(name);
  if (hit != bound_.end()) return hit->second;
  if (store_ == nullptr) {
    throw Error("missing parameter \"" + name + "\"");
  }
  const auto it = store_->find(name);
  if (it == store_->end()) {
    throw Error("missing parameter \"" + name + "\"");
  }
  const Var v = tape_.leaf(it->second, trainable_);
  bound_[name] = v;
  return v;
}

NamedTensors collect_grads(Tape &tape, const Binder &bind) {
  NamedTensors grads;
  for (const auto &[name, var] : bind.bound()) grads[name] = tape.grad(var);
  return grads;
}

namespace {

Tensor fan_in_normal(Rng &rng, std::size_t in, std::size_t out) {
  const double stddev = 1.0 / std::sqrt(static_cast<double>(in));
  return Tensor::randn(rng, {in, out}, stddev);
}

}  // namespace

void init_linear(NamedTensors &store, Rng &rng, const std::string &prefix,
                 std::size_t in, std::size_t out, bool zero) {
  store[prefix + ".w"] =
      zero ? Tensor::zeros({in, out}) : fan_in_normal(rng, in, out);
  store[prefix + ".b"] = Tensor::zeros({out});
}

LinearVars bind_linear(Binder &bind, const std::string &prefix) {
  return {bind(prefix + ".w"), bind(prefix + ".b")};
}

void init_mlp(NamedTensors &store, Rng &rng, const std::string &prefix,
              std::size_t in, std::size_t hidden, std::size_t out,
              bool zero_final) {
  store[prefix + ".w1"] = fan_in_normal(rng, in, hidden);
  store[prefix + ".b1"] = Tensor::zeros({hidden});
  store[prefix + ".w2"] =
      zero_final ? Tensor::zeros({hidden, out}) : fan_in_normal(rng, hidden, out);
  store[prefix + ".b2"] = Tensor::zeros({out});
}

MlpVars bind_mlp(Binder &bind, const std::string &prefix) {
  return {bind(prefix + ".w1"), bind(prefix + ".b1"), bind(prefix + ".w2"),
          bind(prefix + ".b2")};
}

Var mlp_forward(Tape &tape, const MlpVars &m, Var x) {
  return tape.linear(tape.silu(tape.linear(x, m.w1, m.b1)), m.w2, m.b2);
}

void init_attention(NamedTensors &store, Rng &rng, const std::string &prefix,
                    std::size_t d_q, std::size_t d_ctx) {
  store[prefix + ".wq"] = fan_in_normal(rng, d_q, d_q);
  store[prefix + ".bq"] = Tensor::zeros({d_q});
  store[prefix + ".wk"] = fan_in_normal(rng, d_ctx, d_q);
  store[prefix + ".bk"] = Tensor::zeros({d_q});
  store[prefix + ".wv"] = fan_in_normal(rng, d_ctx, d_q);
  store[prefix + ".bv"] = Tensor::zeros({d_q});
  store[prefix + ".wo"] = fan_in_normal(rng, d_q, d_q);
  store[prefix + ".bo"] = Tensor::zeros({d_q});
}

AttentionWeights bind_attention(Binder &bind, const std::string &prefix) {
  AttentionWeights w;
  w.wq = bind(prefix + ".wq");
  w.bq = bind(prefix + ".bq");
  w.wk = bind(prefix + ".wk");
  w.bk = bind(prefix + ".bk");
  w.wv = bind(prefix + ".wv");
  w.bv = bind(prefix + ".bv");
  w.wo = bind(prefix + ".wo");
  w.bo = bind(prefix + ".bo");
  return w;
}

void init_layer_norm(NamedTensors &store, const std::string &prefix,
                     std::size_t dim) {
  store[prefix + ".gain"] = Tensor::full({dim}, 1.0);
  store[prefix + ".bias"] = Tensor::zeros({dim});
}

NormVars bind_layer_norm(Binder &bind, const std::string &prefix) {
  return {bind(prefix + ".gain"), bind(prefix + ".bias")};
}

}  // namespace s2g
