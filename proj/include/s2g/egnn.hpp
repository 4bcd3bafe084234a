//
// Project S2G - Copyright 2026 S2G Developers.
// SPDX-License-Identifier: Apache-2.0
//

#ifndef S2G_EGNN_HPP_
#define S2G_EGNN_HPP_

#include <cstddef>
#include <string>
#include <utility>
#include <vector>

#include "s2g/nn.hpp"
#include "s2g/tensor.hpp"

namespace s2g {

// Equivariant graph convolution over a fully connected point cloud. Each
// layer carries four two-layer perceptrons:
//   message   m_ij = f(h_i, h_j, d_ij^2, a_ij)
//   gate      soft edge weight, sigmoid(f(m_ij)), reweights messages
//   update    h_i' = f(h_i, sum_j gate_ij * m_ij)
//   position  per-edge scalar driving x_i' = x_i + sum_j (x_i - x_j)
//             / (d_ij + 1) * f(h_i, h_j, d_ij^2, a_ij)
// Invariant features h only ever see squared distances, so they are
// unchanged under rotations, translations, and reflections, while the
// coordinate stream transforms with the input frame. The position MLP's
// final layer starts at zero so a freshly initialized stack perturbs
// coordinates minimally.
struct EgnnConfig {
  std::size_t feature_dim = 16;
  std::size_t hidden_dim = 64;
  std::size_t edge_attr_dim = 0;
  std::size_t layers = 4;
};

// Width and depth used by the full-scale geometry decoder and denoiser.
inline EgnnConfig egnn_full_scale(std::size_t edge_attr_dim = 0) {
  return {16, 256, edge_attr_dim, 9};
}

struct NodeVars {
  Var h, x;
};

struct EgclVars {
  MlpVars message, gate, update, position;
};

// All ordered pairs (i, j), i != j, in lexicographic order. Fixing the
// order fixes the floating-point summation order, which keeps forward
// passes reproducible.
std::vector<std::pair<std::size_t, std::size_t>> ordered_pairs(std::size_t n);

void init_egcl(NamedTensors &store, Rng &rng, const std::string &prefix,
               const EgnnConfig &cfg);
EgclVars bind_egcl(Binder &bind, const std::string &prefix);

// Layer parameters live under "<prefix>.layer<k>".
void init_egnn(NamedTensors &store, Rng &rng, const std::string &prefix,
               const EgnnConfig &cfg);
std::vector<EgclVars> bind_egnn(Binder &bind, const std::string &prefix,
                                std::size_t layers);

// One layer. edge_attr is an N(N-1) x d_e matrix in ordered_pairs() row
// order, or an invalid Var when the stack runs without edge attributes.
// Throws NumericError naming the layer if the forward produces non-finite
// values.
NodeVars egcl_forward(Tape &tape, const NodeVars &state, Var edge_attr,
                      const EgclVars &params, std::size_t layer_index = 0);

// Sequential stack; zero layers is the identity. Squared distances are
// recomputed per layer from the current coordinates, edge attributes stay
// fixed across the stack.
NodeVars egnn_forward(Tape &tape, NodeVars state, Var edge_attr,
                      const std::vector<EgclVars> &layers);

// Subtracts the per-column mean: the returned rows sum to zero. Idempotent.
Tensor zero_com_project(const Tensor &x);

}  // namespace s2g

#endif  // S2G_EGNN_HPP_
