//
// Project S2G - Copyright 2026 S2G Developers.
// SPDX-License-Identifier: Apache-2.0
//

#ifndef S2G_TENSOR_HPP_
#define S2G_TENSOR_HPP_

#include <cstddef>
#include <deque>
#include <functional>
#include <string>
#include <vector>

#include "s2g/error.hpp"
#include "s2g/rng.hpp"

namespace s2g {

// Dense row-major tensor of 64-bit floats. Rank is free but nearly all
// operations work on matrices (rank 2) and vectors (rank 1); a tensor of
// total size 1 counts as a scalar regardless of rank.
class Tensor {
 public:
  Tensor() = default;
  explicit Tensor(std::vector<std::size_t> shape);
  Tensor(std::vector<std::size_t> shape, std::vector<double> data);

  static Tensor scalar(double v);
  static Tensor zeros(std::vector<std::size_t> shape);
  static Tensor full(std::vector<std::size_t> shape, double v);
  static Tensor randn(Rng &rng, std::vector<std::size_t> shape,
                      double stddev = 1.0);

  const std::vector<std::size_t> &shape() const { return shape_; }
  std::size_t rank() const { return shape_.size(); }
  std::size_t size() const { return data_.size(); }
  bool empty() const { return data_.empty(); }

  // Matrix accessors; a rank-1 tensor behaves as a single row.
  std::size_t rows() const;
  std::size_t cols() const;

  double &at(std::size_t i) { return data_[i]; }
  double at(std::size_t i) const { return data_[i]; }
  double &at(std::size_t i, std::size_t j) { return data_[i * cols() + j]; }
  double at(std::size_t i, std::size_t j) const {
    return data_[i * cols() + j];
  }

  double *data() { return data_.data(); }
  const double *data() const { return data_.data(); }
  std::vector<double> &vec() { return data_; }
  const std::vector<double> &vec() const { return data_; }

  bool same_shape(const Tensor &other) const { return shape_ == other.shape_; }
  bool all_finite() const;
  std::string shape_str() const;

 private:
  std::vector<std::size_t> shape_;
  std::vector<double> data_;
};

// Handle to a node in a Tape. Cheap to copy; only meaningful together with
// the tape that produced it.
struct Var {
  int id = -1;
  bool valid() const { return id >= 0; }
};

// Reverse-mode automatic differentiation over a dynamically recorded trace.
// Every operation appends a node holding its forward value and a closure
// that pulls the node's cotangent back to its parents. backward() walks the
// trace once in reverse creation order, so each node is visited exactly
// once and the trace is acyclic by construction.
class Tape {
 public:
  Var leaf(Tensor value, bool requires_grad = false);

  // Stable for the lifetime of the tape: nodes live in a deque, so recording
  // further operations never relocates earlier values.
  const Tensor &value(Var v) const;
  // Gradient of the last backward()'s loss w.r.t. v; zero tensor when v was
  // not on the path from the loss.
  Tensor grad(Var v) const;
  void backward(Var loss);

  std::size_t node_count() const { return nodes_.size(); }

  Var add(Var a, Var b);
  Var sub(Var a, Var b);
  Var mul(Var a, Var b);
  Var scale(Var a, double c);
  Var add_scalar(Var a, double c);
  Var matmul(Var a, Var b);
  Var transpose(Var a);
  Var linear(Var x, Var w, Var b);
  Var silu(Var a);
  Var sigmoid(Var a);
  Var softplus(Var a);
  Var square(Var a);
  Var reciprocal(Var a);
  Var sqrt_shift(Var a, double shift);
  Var softmax_rows(Var a);
  Var layer_norm_rows(Var x, Var gain, Var bias);
  Var sum(Var a);
  Var row_sum(Var a);
  Var scale_rows(Var x, Var s);
  Var concat_cols(const std::vector<Var> &xs);
  Var concat_rows(const std::vector<Var> &xs);
  Var slice_cols(Var a, std::size_t lo, std::size_t hi);
  Var slice_rows(Var a, std::size_t lo, std::size_t hi);
  Var gather_rows(Var a, std::vector<std::size_t> idx);
  Var segment_sum(Var a, std::vector<std::size_t> seg, std::size_t out_rows);
  // Subtracts the per-column mean over rows: output columns sum to zero.
  Var zero_com_rows(Var a);

 private:
  struct Node {
    Tensor value;
    std::vector<int> parents;
    std::function<void(Tape &)> backprop;
    bool needs_grad = false;
  };

  Var record(Tensor value, std::vector<int> parents,
             std::function<void(Tape &)> backprop);
  bool any_needs_grad(const std::vector<int> &parents) const;
  Tensor &grad_buf(int id);
  bool grad_present(int id) const;

  std::deque<Node> nodes_;
  std::vector<Tensor> grads_;
};

// Projection weights for one multi-head attention block. wq/wo act on the
// query stream (width d_q), wk/wv map the context stream into it.
struct AttentionWeights {
  Var wq, bq;
  Var wk, bk;
  Var wv, bv;
  Var wo, bo;
};

struct AttentionOutput {
  Var out;
  // One q-by-c row-stochastic matrix per head, kept for visualization.
  std::vector<Var> head_weights;
};

AttentionOutput multi_head_attention(Tape &tape, Var query, Var context,
                                     const AttentionWeights &w,
                                     std::size_t heads);

// Compares reverse-mode gradients against central finite differences
// (default step 1e-5). The error metric per coordinate is
// |ad - fd| / max(1, |ad|, |fd|); the report keeps the worst one.
struct GradCheckReport {
  double max_rel_err = 0.0;
  std::size_t coords_checked = 0;
  bool pass(double tol) const { return max_rel_err <= tol; }
};

GradCheckReport grad_check(
    const std::function<Var(Tape &, const std::vector<Var> &)> &f,
    std::vector<Tensor> point, double step = 1e-5);

}  // namespace s2g

#endif  // S2G_TENSOR_HPP_
