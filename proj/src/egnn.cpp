//
// Project S2G - Copyright 2026 S2G Developers.
// SPDX-License-Identifier: Apache-2.0
//

#include "s2g/egnn.hpp"

#include <string>
#include <vector>

#include "s2g/error.hpp"

namespace s2g {

std::vector<std::pair<std::size_t, std::size_t>> ordered_pairs(std::size_t n) {
  std::vector<std::pair<std::size_t, std::size_t>> pairs;
  pairs.reserve(n > 0 ? n * (n - 1) : 0);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      if (i != j) pairs.emplace_back(i, j);
  return pairs;
}

void init_egcl(NamedTensors &store, Rng &rng, const std::string &prefix,
               const EgnnConfig &cfg) {
  const std::size_t edge_in = 2 * cfg.feature_dim + 1 + cfg.edge_attr_dim;
  init_mlp(store, rng, prefix + ".message", edge_in, cfg.hidden_dim,
           cfg.hidden_dim);
  init_mlp(store, rng, prefix + ".gate", cfg.hidden_dim, cfg.hidden_dim, 1);
  init_mlp(store, rng, prefix + ".update", cfg.feature_dim + cfg.hidden_dim,
           cfg.hidden_dim, cfg.feature_dim);
  init_mlp(store, rng, prefix + ".position", edge_in, cfg.hidden_dim, 1,
           /*zero_final=*/true);
}

EgclVars bind_egcl(Binder &bind, const std::string &prefix) {
  EgclVars vars;
  vars.message = bind_mlp(bind, prefix + ".message");
  vars.gate = bind_mlp(bind, prefix + ".gate");
  vars.update = bind_mlp(bind, prefix + ".update");
  vars.position = bind_mlp(bind, prefix + ".position");
  return vars;
}

void init_egnn(NamedTensors &store, Rng &rng, const std::string &prefix,
               const EgnnConfig &cfg) {
  for (std::size_t l = 0; l < cfg.layers; ++l)
    init_egcl(store, rng, prefix + ".layer" + std::to_string(l), cfg);
}

std::vector<EgclVars> bind_egnn(Binder &bind, const std::string &prefix,
                                std::size_t layers) {
  std::vector<EgclVars> vars;
  vars.reserve(layers);
  for (std::size_t l = 0; l < layers; ++l)
    vars.push_back(bind_egcl(bind, prefix + ".layer" + std::to_string(l)));
  return vars;
}

NodeVars egcl_forward(Tape &tape, const NodeVars &state, Var edge_attr,
                      const EgclVars &params, std::size_t layer_index) {
  const Tensor &hv = tape.value(state.h);
  const Tensor &xv = tape.value(state.x);
  const std::size_t n = hv.rows();
  if (xv.rows() != n || xv.cols() != 3) {
    throw DimensionError("egcl: coordinates " + xv.shape_str() +
                         " do not match " + std::to_string(n) + " nodes");
  }
  const std::size_t msg_dim = tape.value(params.message.w2).cols();

  NodeVars out;
  if (n < 2) {
    Var agg = tape.leaf(Tensor::zeros({n, msg_dim}));
    out.h = mlp_forward(tape, params.update,
                        tape.concat_cols({state.h, agg}));
    out.x = state.x;
  } else {
    const auto pairs = ordered_pairs(n);
    std::vector<std::size_t> src, dst, seg;
    src.reserve(pairs.size());
    dst.reserve(pairs.size());
    seg.reserve(pairs.size());
    for (const auto &[i, j] : pairs) {
      src.push_back(i);
      dst.push_back(j);
      seg.push_back(i);
    }
    if (edge_attr.valid() && tape.value(edge_attr).rows() != pairs.size()) {
      throw DimensionError(
          "egcl: edge attributes " + tape.value(edge_attr).shape_str() +
          " do not cover " + std::to_string(pairs.size()) + " ordered pairs");
    }

    Var hi = tape.gather_rows(state.h, src);
    Var hj = tape.gather_rows(state.h, dst);
    Var diff = tape.sub(tape.gather_rows(state.x, src),
                        tape.gather_rows(state.x, dst));
    Var d2 = tape.row_sum(tape.square(diff));
    // The tiny shift keeps the square root differentiable if two points
    // ever coincide; it is far below coordinate noise otherwise.
    Var dist = tape.sqrt_shift(d2, 1e-12);

    std::vector<Var> edge_in = {hi, hj, d2};
    if (edge_attr.valid()) edge_in.push_back(edge_attr);
    Var edge_cat = tape.concat_cols(edge_in);

    Var msg = mlp_forward(tape, params.message, edge_cat);
    Var gate = tape.sigmoid(mlp_forward(tape, params.gate, msg));
    Var agg = tape.segment_sum(tape.scale_rows(msg, gate), seg, n);
    out.h = mlp_forward(tape, params.update,
                        tape.concat_cols({state.h, agg}));

    Var weight = mlp_forward(tape, params.position, edge_cat);
    Var coef = tape.mul(weight, tape.reciprocal(tape.add_scalar(dist, 1.0)));
    out.x = tape.add(state.x,
                     tape.segment_sum(tape.scale_rows(diff, coef), seg, n));
  }

  if (!tape.value(out.h).all_finite() || !tape.value(out.x).all_finite()) {
    throw NumericError("egcl layer " + std::to_string(layer_index) +
                       ": non-finite forward values");
  }
  return out;
}

NodeVars egnn_forward(Tape &tape, NodeVars state, Var edge_attr,
                      const std::vector<EgclVars> &layers) {
  for (std::size_t l = 0; l < layers.size(); ++l)
    state = egcl_forward(tape, state, edge_attr, layers[l], l);
  return state;
}

Tensor zero_com_project(const Tensor &x) {
  if (x.rank() != 2) {
    throw DimensionError("zero_com_project: expected rank 2, got " +
                         x.shape_str());
  }
  Tensor out = x;
  const std::size_t n = x.rows(), d = x.cols();
  if (n == 0) return out;
  for (std::size_t j = 0; j < d; ++j) {
    double mean = 0.0;
    for (std::size_t i = 0; i < n; ++i) mean += x.at(i, j);
    mean /= static_cast<double>(n);
    for (std::size_t i = 0; i < n; ++i) out.at(i, j) -= mean;
  }
  return out;
}

}  // namespace s2g
