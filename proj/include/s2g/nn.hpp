//
// Project S2G - Copyright 2026 S2G Developers.
// SPDX-License-Identifier: Apache-2.0
//

#ifndef S2G_NN_HPP_
#define S2G_NN_HPP_

#include <cstddef>
#include <map>
#include <string>

#include "s2g/checkpoint.hpp"
#include "s2g/tensor.hpp"

namespace s2g {

// Parameter plumbing shared by the model stacks. Parameters live in a
// NamedTensors store between steps; a forward pass binds them onto a tape
// as leaves through a Binder, which remembers every binding so an
// optimizer can walk (name, Var) pairs after backward(). Names are
// hierarchical, dot-separated, so one store holds several submodules
// without collisions.
class Binder {
 public:
  Binder(Tape &tape, const NamedTensors &store, bool trainable)
      : tape_(tape), store_(&store), trainable_(trainable) {}

  // Operates on an externally supplied name-to-Var mapping instead of a
  // store; used by gradient checks that control leaf creation themselves.
  Binder(Tape &tape, std::map<std::string, Var> prebound)
      : tape_(tape), store_(nullptr), bound_(std::move(prebound)) {}

  // Binds the named tensor as a tape leaf; repeated requests for the same
  // name return the same Var. Throws Error for names absent in the store.
  Var operator()(const std::string &name);

  Tape &tape() { return tape_; }
  const std::map<std::string, Var> &bound() const { return bound_; }

 private:
  Tape &tape_;
  const NamedTensors *store_;
  bool trainable_ = false;
  std::map<std::string, Var> bound_;
};

// Gradients of every parameter the binder touched, keyed by name. Only
// meaningful after backward() on a loss downstream of those bindings.
NamedTensors collect_grads(Tape &tape, const Binder &bind);

struct LinearVars {
  Var w, b;
};

void init_linear(NamedTensors &store, Rng &rng, const std::string &prefix,
                 std::size_t in, std::size_t out, bool zero = false);
LinearVars bind_linear(Binder &bind, const std::string &prefix);

// Two-layer perceptron, SiLU after the first layer, no output activation.
struct MlpVars {
  Var w1, b1, w2, b2;
};

void init_mlp(NamedTensors &store, Rng &rng, const std::string &prefix,
              std::size_t in, std::size_t hidden, std::size_t out,
              bool zero_final = false);
MlpVars bind_mlp(Binder &bind, const std::string &prefix);
Var mlp_forward(Tape &tape, const MlpVars &m, Var x);

void init_attention(NamedTensors &store, Rng &rng, const std::string &prefix,
                    std::size_t d_q, std::size_t d_ctx);
AttentionWeights bind_attention(Binder &bind, const std::string &prefix);

struct NormVars {
  Var gain, bias;
};

void init_layer_norm(NamedTensors &store, const std::string &prefix,
                     std::size_t dim);
NormVars bind_layer_norm(Binder &bind, const std::string &prefix);

}  // namespace s2g

#endif  // S2G_NN_HPP_
