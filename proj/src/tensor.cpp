//
// Project S2G - Copyright 2026 S2G Developers.
// SPDX-License-Identifier: Apache-2.0
//

#include "s2g/tensor.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>
#include <utility>

namespace s2g {

namespace {

std::size_t shape_product(const std::vector<std::size_t> &shape) {
  std::size_t n = 1;
  for (std::size_t d : shape) n *= d;
  return n;
}

double stable_sigmoid(double x) {
  if (x >= 0.0) {
    return 1.0 / (1.0 + std::exp(-x));
  }
  const double e = std::exp(x);
  return e / (1.0 + e);
}

double stable_softplus(double x) {
  return std::max(x, 0.0) + std::log1p(std::exp(-std::abs(x)));
}

// C += A (m×k) times B (k×n), all row-major.
void matmul_acc(const double *a, const double *b, double *c, std::size_t m,
                std::size_t k, std::size_t n) {
  for (std::size_t i = 0; i < m; ++i) {
    const double *ai = a + i * k;
    double *ci = c + i * n;
    for (std::size_t kk = 0; kk < k; ++kk) {
      const double av = ai[kk];
      if (av == 0.0) continue;
      const double *bk = b + kk * n;
      for (std::size_t j = 0; j < n; ++j) ci[j] += av * bk[j];
    }
  }
}

// C += A (m×k) times Bᵀ where B is (n×k) row-major.
void matmul_bt_acc(const double *a, const double *b, double *c, std::size_t m,
                   std::size_t k, std::size_t n) {
  for (std::size_t i = 0; i < m; ++i) {
    const double *ai = a + i * k;
    double *ci = c + i * n;
    for (std::size_t j = 0; j < n; ++j) {
      const double *bj = b + j * k;
      double acc = 0.0;
      for (std::size_t kk = 0; kk < k; ++kk) acc += ai[kk] * bj[kk];
      ci[j] += acc;
    }
  }
}

// C += Aᵀ (k×m becomes m×k view) times B: A is (k×m), B is (k×n), C is (m×n).
void matmul_at_acc(const double *a, const double *b, double *c, std::size_t k,
                   std::size_t m, std::size_t n) {
  for (std::size_t kk = 0; kk < k; ++kk) {
    const double *ak = a + kk * m;
    const double *bk = b + kk * n;
    for (std::size_t i = 0; i < m; ++i) {
      const double av = ak[i];
      if (av == 0.0) continue;
      double *ci = c + i * n;
      for (std::size_t j = 0; j < n; ++j) ci[j] += av * bk[j];
    }
  }
}

}  // namespace

Tensor::Tensor(std::vector<std::size_t> shape)
    : shape_(std::move(shape)), data_(shape_product(shape_), 0.0) {}

Tensor::Tensor(std::vector<std::size_t> shape, std::vector<double> data)
    : shape_(std::move(shape)), data_(std::move(data)) {
  if (data_.size() != shape_product(shape_)) {
    throw DimensionError("tensor: data length " + std::to_string(data_.size()) +
                         " does not match shape " + shape_str());
  }
}

Tensor Tensor::scalar(double v) { return Tensor({1}, {v}); }

Tensor Tensor::zeros(std::vector<std::size_t> shape) {
  return Tensor(std::move(shape));
}

Tensor Tensor::full(std::vector<std::size_t> shape, double v) {
  Tensor t(std::move(shape));
  std::fill(t.data_.begin(), t.data_.end(), v);
  return t;
}

Tensor Tensor::randn(Rng &rng, std::vector<std::size_t> shape, double stddev) {
  Tensor t(std::move(shape));
  for (double &v : t.data_) v = stddev * rng.normal();
  return t;
}

std::size_t Tensor::rows() const {
  if (rank() == 2) return shape_[0];
  if (rank() == 1) return 1;
  throw DimensionError("tensor: rows() on rank-" + std::to_string(rank()) +
                       " tensor");
}

std::size_t Tensor::cols() const {
  if (rank() == 2) return shape_[1];
  if (rank() == 1) return shape_[0];
  throw DimensionError("tensor: cols() on rank-" + std::to_string(rank()) +
                       " tensor");
}

bool Tensor::all_finite() const {
  return std::all_of(data_.begin(), data_.end(),
                     [](double v) { return std::isfinite(v); });
}

std::string Tensor::shape_str() const {
  std::ostringstream os;
  os << "[";
  for (std::size_t i = 0; i < shape_.size(); ++i) {
    if (i) os << "x";
    os << shape_[i];
  }
  os << "]";
  return os.str();
}

Var Tape::leaf(Tensor value, bool requires_grad) {
  Node node;
  node.value = std::move(value);
  node.needs_grad = requires_grad;
  nodes_.push_back(std::move(node));
  return Var{static_cast<int>(nodes_.size()) - 1};
}

const Tensor &Tape::value(Var v) const { return nodes_.at(v.id).value; }

Tensor Tape::grad(Var v) const {
  const Node &node = nodes_.at(v.id);
  if (static_cast<std::size_t>(v.id) < grads_.size() &&
      !grads_[v.id].empty()) {
    return grads_[v.id];
  }
  return Tensor::zeros(node.value.shape());
}

bool Tape::grad_present(int id) const {
  return static_cast<std::size_t>(id) < grads_.size() && !grads_[id].empty();
}

Tensor &Tape::grad_buf(int id) {
  if (grads_.size() < nodes_.size()) grads_.resize(nodes_.size());
  if (grads_[id].empty()) grads_[id] = Tensor::zeros(nodes_[id].value.shape());
  return grads_[id];
}

bool Tape::any_needs_grad(const std::vector<int> &parents) const {
  return std::any_of(parents.begin(), parents.end(),
                     [this](int p) { return nodes_[p].needs_grad; });
}

Var Tape::record(Tensor value, std::vector<int> parents,
                 std::function<void(Tape &)> backprop) {
  Node node;
  node.value = std::move(value);
  node.needs_grad = any_needs_grad(parents);
  node.parents = std::move(parents);
  if (node.needs_grad) node.backprop = std::move(backprop);
  nodes_.push_back(std::move(node));
  return Var{static_cast<int>(nodes_.size()) - 1};
}

void Tape::backward(Var loss) {
  if (value(loss).size() != 1) {
    throw DimensionError("backward: loss must be scalar, got shape " +
                         value(loss).shape_str());
  }
  grads_.clear();
  grads_.resize(nodes_.size());
  grad_buf(loss.id).at(0) = 1.0;
  for (int id = loss.id; id >= 0; --id) {
    Node &node = nodes_[id];
    if (!node.needs_grad || !node.backprop || !grad_present(id)) continue;
    node.backprop(*this);
  }
}

Var Tape::add(Var a, Var b) {
  const Tensor &va = value(a);
  const Tensor &vb = value(b);
  if (!va.same_shape(vb)) {
    throw DimensionError("add: shape mismatch " + va.shape_str() + " vs " +
                         vb.shape_str());
  }
  Tensor out = va;
  for (std::size_t i = 0; i < out.size(); ++i) out.at(i) += vb.at(i);
  const int self = static_cast<int>(nodes_.size());
  return record(std::move(out), {a.id, b.id}, [self, a, b](Tape &t) {
    const Tensor &g = t.grads_[self];
    for (Var p : {a, b}) {
      if (!t.nodes_[p.id].needs_grad) continue;
      Tensor &gp = t.grad_buf(p.id);
      for (std::size_t i = 0; i < g.size(); ++i) gp.at(i) += g.at(i);
    }
  });
}

Var Tape::sub(Var a, Var b) {
  const Tensor &va = value(a);
  const Tensor &vb = value(b);
  if (!va.same_shape(vb)) {
    throw DimensionError("sub: shape mismatch " + va.shape_str() + " vs " +
                         vb.shape_str());
  }
  Tensor out = va;
  for (std::size_t i = 0; i < out.size(); ++i) out.at(i) -= vb.at(i);
  const int self = static_cast<int>(nodes_.size());
  return record(std::move(out), {a.id, b.id}, [self, a, b](Tape &t) {
    const Tensor &g = t.grads_[self];
    if (t.nodes_[a.id].needs_grad) {
      Tensor &ga = t.grad_buf(a.id);
      for (std::size_t i = 0; i < g.size(); ++i) ga.at(i) += g.at(i);
    }
    if (t.nodes_[b.id].needs_grad) {
      Tensor &gb = t.grad_buf(b.id);
      for (std::size_t i = 0; i < g.size(); ++i) gb.at(i) -= g.at(i);
    }
  });
}

Var Tape::mul(Var a, Var b) {
  const Tensor &va = value(a);
  const Tensor &vb = value(b);
  if (!va.same_shape(vb)) {
    throw DimensionError("mul: shape mismatch " + va.shape_str() + " vs " +
                         vb.shape_str());
  }
  Tensor out = va;
  for (std::size_t i = 0; i < out.size(); ++i) out.at(i) *= vb.at(i);
  const int self = static_cast<int>(nodes_.size());
  return record(std::move(out), {a.id, b.id}, [self, a, b](Tape &t) {
    const Tensor &g = t.grads_[self];
    const Tensor &va = t.nodes_[a.id].value;
    const Tensor &vb = t.nodes_[b.id].value;
    if (t.nodes_[a.id].needs_grad) {
      Tensor &ga = t.grad_buf(a.id);
      for (std::size_t i = 0; i < g.size(); ++i) ga.at(i) += g.at(i) * vb.at(i);
    }
    if (t.nodes_[b.id].needs_grad) {
      Tensor &gb = t.grad_buf(b.id);
      for (std::size_t i = 0; i < g.size(); ++i) gb.at(i) += g.at(i) * va.at(i);
    }
  });
}

Var Tape::scale(Var a, double c) {
  Tensor out = value(a);
  for (double &v : out.vec()) v *= c;
  const int self = static_cast<int>(nodes_.size());
  return record(std::move(out), {a.id}, [self, a, c](Tape &t) {
    const Tensor &g = t.grads_[self];
    Tensor &ga = t.grad_buf(a.id);
    for (std::size_t i = 0; i < g.size(); ++i) ga.at(i) += c * g.at(i);
  });
}

Var Tape::add_scalar(Var a, double c) {
  Tensor out = value(a);
  for (double &v : out.vec()) v += c;
  const int self = static_cast<int>(nodes_.size());
  return record(std::move(out), {a.id}, [self, a](Tape &t) {
    const Tensor &g = t.grads_[self];
    Tensor &ga = t.grad_buf(a.id);
    for (std::size_t i = 0; i < g.size(); ++i) ga.at(i) += g.at(i);
  });
}

Var Tape::matmul(Var a, Var b) {
  const Tensor &va = value(a);
  const Tensor &vb = value(b);
  if (va.rank() != 2 || vb.rank() != 2 || va.cols() != vb.rows()) {
    throw DimensionError("matmul: incompatible shapes " + va.shape_str() +
                         " and " + vb.shape_str());
  }
  const std::size_t m = va.rows(), k = va.cols(), n = vb.cols();
  Tensor out({m, n});
  matmul_acc(va.data(), vb.data(), out.data(), m, k, n);
  const int self = static_cast<int>(nodes_.size());
  return record(std::move(out), {a.id, b.id}, [self, a, b, m, k, n](Tape &t) {
    const Tensor &g = t.grads_[self];
    const Tensor &va = t.nodes_[a.id].value;
    const Tensor &vb = t.nodes_[b.id].value;
    if (t.nodes_[a.id].needs_grad) {
      matmul_bt_acc(g.data(), vb.data(), t.grad_buf(a.id).data(), m, n, k);
    }
    if (t.nodes_[b.id].needs_grad) {
      matmul_at_acc(va.data(), g.data(), t.grad_buf(b.id).data(), m, k, n);
    }
  });
}

Var Tape::transpose(Var a) {
  const Tensor &va = value(a);
  if (va.rank() != 2) {
    throw DimensionError("transpose: expected rank 2, got " + va.shape_str());
  }
  const std::size_t m = va.rows(), n = va.cols();
  Tensor out({n, m});
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = 0; j < n; ++j) out.at(j, i) = va.at(i, j);
  const int self = static_cast<int>(nodes_.size());
  return record(std::move(out), {a.id}, [self, a, m, n](Tape &t) {
    const Tensor &g = t.grads_[self];
    Tensor &ga = t.grad_buf(a.id);
    for (std::size_t i = 0; i < m; ++i)
      for (std::size_t j = 0; j < n; ++j) ga.at(i, j) += g.at(j, i);
  });
}

Var Tape::linear(Var x, Var w, Var b) {
  const Tensor &vx = value(x);
  const Tensor &vw = value(w);
  const Tensor &vb = value(b);
  if (vx.rank() != 2 || vw.rank() != 2 || vx.cols() != vw.rows()) {
    throw DimensionError("linear: incompatible shapes " + vx.shape_str() +
                         " and " + vw.shape_str());
  }
  if (vb.size() != vw.cols()) {
    throw DimensionError("linear: bias size " + vb.shape_str() +
                         " does not match weight " + vw.shape_str());
  }
  const std::size_t n = vx.rows(), a = vx.cols(), out_dim = vw.cols();
  Tensor out({n, out_dim});
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < out_dim; ++j) out.at(i, j) = vb.at(j);
  matmul_acc(vx.data(), vw.data(), out.data(), n, a, out_dim);
  const int self = static_cast<int>(nodes_.size());
  return record(std::move(out), {x.id, w.id, b.id},
                [self, x, w, b, n, a, out_dim](Tape &t) {
                  const Tensor &g = t.grads_[self];
                  const Tensor &vx = t.nodes_[x.id].value;
                  const Tensor &vw = t.nodes_[w.id].value;
                  if (t.nodes_[x.id].needs_grad) {
                    matmul_bt_acc(g.data(), vw.data(), t.grad_buf(x.id).data(),
                                  n, out_dim, a);
                  }
                  if (t.nodes_[w.id].needs_grad) {
                    matmul_at_acc(vx.data(), g.data(), t.grad_buf(w.id).data(),
                                  n, a, out_dim);
                  }
                  if (t.nodes_[b.id].needs_grad) {
                    Tensor &gb = t.grad_buf(b.id);
                    for (std::size_t i = 0; i < n; ++i)
                      for (std::size_t j = 0; j < out_dim; ++j)
                        gb.at(j) += g.at(i, j);
                  }
                });
}

Var Tape::silu(Var a) {
  Tensor out = value(a);
  for (double &v : out.vec()) v *= stable_sigmoid(v);
  const int self = static_cast<int>(nodes_.size());
  return record(std::move(out), {a.id}, [self, a](Tape &t) {
    const Tensor &g = t.grads_[self];
    const Tensor &va = t.nodes_[a.id].value;
    Tensor &ga = t.grad_buf(a.id);
    for (std::size_t i = 0; i < g.size(); ++i) {
      const double s = stable_sigmoid(va.at(i));
      ga.at(i) += g.at(i) * (s + va.at(i) * s * (1.0 - s));
    }
  });
}

Var Tape::sigmoid(Var a) {
  Tensor out = value(a);
  for (double &v : out.vec()) v = stable_sigmoid(v);
  const int self = static_cast<int>(nodes_.size());
  return record(std::move(out), {a.id}, [self, a](Tape &t) {
    const Tensor &g = t.grads_[self];
    const Tensor &y = t.nodes_[self].value;
    Tensor &ga = t.grad_buf(a.id);
    for (std::size_t i = 0; i < g.size(); ++i)
      ga.at(i) += g.at(i) * y.at(i) * (1.0 - y.at(i));
  });
}

Var Tape::softplus(Var a) {
  Tensor out = value(a);
  for (double &v : out.vec()) v = stable_softplus(v);
  const int self = static_cast<int>(nodes_.size());
  return record(std::move(out), {a.id}, [self, a](Tape &t) {
    const Tensor &g = t.grads_[self];
    const Tensor &va = t.nodes_[a.id].value;
    Tensor &ga = t.grad_buf(a.id);
    for (std::size_t i = 0; i < g.size(); ++i)
      ga.at(i) += g.at(i) * stable_sigmoid(va.at(i));
  });
}

Var Tape::reciprocal(Var a) {
  Tensor out = value(a);
  for (double &v : out.vec()) v = 1.0 / v;
  const int self = static_cast<int>(nodes_.size());
  return record(std::move(out), {a.id}, [self, a](Tape &t) {
    const Tensor &g = t.grads_[self];
    const Tensor &y = t.nodes_[self].value;
    Tensor &ga = t.grad_buf(a.id);
    for (std::size_t i = 0; i < g.size(); ++i)
      ga.at(i) -= y.at(i) * y.at(i) * g.at(i);
  });
}

Var Tape::square(Var a) {
  Tensor out = value(a);
  for (double &v : out.vec()) v *= v;
  const int self = static_cast<int>(nodes_.size());
  return record(std::move(out), {a.id}, [self, a](Tape &t) {
    const Tensor &g = t.grads_[self];
    const Tensor &va = t.nodes_[a.id].value;
    Tensor &ga = t.grad_buf(a.id);
    for (std::size_t i = 0; i < g.size(); ++i)
      ga.at(i) += 2.0 * va.at(i) * g.at(i);
  });
}

Var Tape::sqrt_shift(Var a, double shift) {
  Tensor out = value(a);
  for (double &v : out.vec()) v = std::sqrt(v + shift);
  const int self = static_cast<int>(nodes_.size());
  return record(std::move(out), {a.id}, [self, a](Tape &t) {
    const Tensor &g = t.grads_[self];
    const Tensor &y = t.nodes_[self].value;
    Tensor &ga = t.grad_buf(a.id);
    for (std::size_t i = 0; i < g.size(); ++i)
      ga.at(i) += g.at(i) * 0.5 / y.at(i);
  });
}

Var Tape::softmax_rows(Var a) {
  const Tensor &va = value(a);
  if (va.rank() != 2) {
    throw DimensionError("softmax_rows: expected rank 2, got " +
                         va.shape_str());
  }
  const std::size_t n = va.rows(), d = va.cols();
  Tensor out({n, d});
  for (std::size_t i = 0; i < n; ++i) {
    double mx = va.at(i, 0);
    for (std::size_t j = 1; j < d; ++j) mx = std::max(mx, va.at(i, j));
    double z = 0.0;
    for (std::size_t j = 0; j < d; ++j) {
      const double e = std::exp(va.at(i, j) - mx);
      out.at(i, j) = e;
      z += e;
    }
    for (std::size_t j = 0; j < d; ++j) out.at(i, j) /= z;
  }
  const int self = static_cast<int>(nodes_.size());
  return record(std::move(out), {a.id}, [self, a, n, d](Tape &t) {
    const Tensor &g = t.grads_[self];
    const Tensor &y = t.nodes_[self].value;
    Tensor &ga = t.grad_buf(a.id);
    for (std::size_t i = 0; i < n; ++i) {
      double dot = 0.0;
      for (std::size_t j = 0; j < d; ++j) dot += g.at(i, j) * y.at(i, j);
      for (std::size_t j = 0; j < d; ++j)
        ga.at(i, j) += y.at(i, j) * (g.at(i, j) - dot);
    }
  });
}

Var Tape::layer_norm_rows(Var x, Var gain, Var bias) {
  const Tensor &vx = value(x);
  const Tensor &vg = value(gain);
  const Tensor &vb = value(bias);
  if (vx.rank() != 2 || vg.size() != vx.cols() || vb.size() != vx.cols()) {
    throw DimensionError("layer_norm_rows: shapes " + vx.shape_str() + ", " +
                         vg.shape_str() + ", " + vb.shape_str());
  }
  constexpr double kEps = 1e-5;
  const std::size_t n = vx.rows(), d = vx.cols();
  Tensor out({n, d});
  // Normalized rows and inverse stddevs are recomputed in backward from the
  // stored inputs; stash only sigma to keep nodes small.
  std::vector<double> inv_sigma(n);
  for (std::size_t i = 0; i < n; ++i) {
    double mean = 0.0;
    for (std::size_t j = 0; j < d; ++j) mean += vx.at(i, j);
    mean /= static_cast<double>(d);
    double var = 0.0;
    for (std::size_t j = 0; j < d; ++j) {
      const double c = vx.at(i, j) - mean;
      var += c * c;
    }
    var /= static_cast<double>(d);
    const double is = 1.0 / std::sqrt(var + kEps);
    inv_sigma[i] = is;
    for (std::size_t j = 0; j < d; ++j)
      out.at(i, j) = vg.at(j) * (vx.at(i, j) - mean) * is + vb.at(j);
  }
  const int self = static_cast<int>(nodes_.size());
  return record(
      std::move(out), {x.id, gain.id, bias.id},
      [self, x, gain, bias, n, d, inv_sigma](Tape &t) {
        const Tensor &g = t.grads_[self];
        const Tensor &vx = t.nodes_[x.id].value;
        const Tensor &vg = t.nodes_[gain.id].value;
        const bool need_x = t.nodes_[x.id].needs_grad;
        const bool need_g = t.nodes_[gain.id].needs_grad;
        const bool need_b = t.nodes_[bias.id].needs_grad;
        for (std::size_t i = 0; i < n; ++i) {
          double mean = 0.0;
          for (std::size_t j = 0; j < d; ++j) mean += vx.at(i, j);
          mean /= static_cast<double>(d);
          const double is = inv_sigma[i];
          double q_mean = 0.0, qx_mean = 0.0;
          std::vector<double> xhat(d), q(d);
          for (std::size_t j = 0; j < d; ++j) {
            xhat[j] = (vx.at(i, j) - mean) * is;
            q[j] = g.at(i, j) * vg.at(j);
            q_mean += q[j];
            qx_mean += q[j] * xhat[j];
          }
          q_mean /= static_cast<double>(d);
          qx_mean /= static_cast<double>(d);
          if (need_x) {
            Tensor &gx = t.grad_buf(x.id);
            for (std::size_t j = 0; j < d; ++j)
              gx.at(i, j) += is * (q[j] - q_mean - xhat[j] * qx_mean);
          }
          if (need_g) {
            Tensor &gg = t.grad_buf(gain.id);
            for (std::size_t j = 0; j < d; ++j)
              gg.at(j) += g.at(i, j) * xhat[j];
          }
          if (need_b) {
            Tensor &gb = t.grad_buf(bias.id);
            for (std::size_t j = 0; j < d; ++j) gb.at(j) += g.at(i, j);
          }
        }
      });
}

Var Tape::sum(Var a) {
  const Tensor &va = value(a);
  double s = 0.0;
  for (std::size_t i = 0; i < va.size(); ++i) s += va.at(i);
  const int self = static_cast<int>(nodes_.size());
  return record(Tensor::scalar(s), {a.id}, [self, a](Tape &t) {
    const double g = t.grads_[self].at(0);
    Tensor &ga = t.grad_buf(a.id);
    for (std::size_t i = 0; i < ga.size(); ++i) ga.at(i) += g;
  });
}

Var Tape::row_sum(Var a) {
  const Tensor &va = value(a);
  if (va.rank() != 2) {
    throw DimensionError("row_sum: expected rank 2, got " + va.shape_str());
  }
  const std::size_t n = va.rows(), d = va.cols();
  Tensor out({n, 1});
  for (std::size_t i = 0; i < n; ++i) {
    double s = 0.0;
    for (std::size_t j = 0; j < d; ++j) s += va.at(i, j);
    out.at(i, 0) = s;
  }
  const int self = static_cast<int>(nodes_.size());
  return record(std::move(out), {a.id}, [self, a, n, d](Tape &t) {
    const Tensor &g = t.grads_[self];
    Tensor &ga = t.grad_buf(a.id);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < d; ++j) ga.at(i, j) += g.at(i, 0);
  });
}

Var Tape::scale_rows(Var x, Var s) {
  const Tensor &vx = value(x);
  const Tensor &vs = value(s);
  if (vx.rank() != 2 || vs.rank() != 2 || vs.cols() != 1 ||
      vs.rows() != vx.rows()) {
    throw DimensionError("scale_rows: shapes " + vx.shape_str() + " and " +
                         vs.shape_str());
  }
  const std::size_t n = vx.rows(), d = vx.cols();
  Tensor out({n, d});
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < d; ++j) out.at(i, j) = vx.at(i, j) * vs.at(i, 0);
  const int self = static_cast<int>(nodes_.size());
  return record(std::move(out), {x.id, s.id}, [self, x, s, n, d](Tape &t) {
    const Tensor &g = t.grads_[self];
    const Tensor &vx = t.nodes_[x.id].value;
    const Tensor &vs = t.nodes_[s.id].value;
    if (t.nodes_[x.id].needs_grad) {
      Tensor &gx = t.grad_buf(x.id);
      for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < d; ++j)
          gx.at(i, j) += g.at(i, j) * vs.at(i, 0);
    }
    if (t.nodes_[s.id].needs_grad) {
      Tensor &gs = t.grad_buf(s.id);
      for (std::size_t i = 0; i < n; ++i) {
        double acc = 0.0;
        for (std::size_t j = 0; j < d; ++j) acc += g.at(i, j) * vx.at(i, j);
        gs.at(i, 0) += acc;
      }
    }
  });
}

Var Tape::concat_cols(const std::vector<Var> &xs) {
  if (xs.empty()) throw DimensionError("concat_cols: empty input list");
  const std::size_t n = value(xs[0]).rows();
  std::size_t total = 0;
  std::vector<int> parents;
  std::vector<std::size_t> widths;
  for (Var v : xs) {
    const Tensor &t = value(v);
    if (t.rank() != 2 || t.rows() != n) {
      throw DimensionError("concat_cols: row mismatch at " + t.shape_str());
    }
    widths.push_back(t.cols());
    total += t.cols();
    parents.push_back(v.id);
  }
  Tensor out({n, total});
  std::size_t off = 0;
  for (std::size_t k = 0; k < xs.size(); ++k) {
    const Tensor &t = value(xs[k]);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < widths[k]; ++j)
        out.at(i, off + j) = t.at(i, j);
    off += widths[k];
  }
  const int self = static_cast<int>(nodes_.size());
  std::vector<Var> vars = xs;
  return record(std::move(out), std::move(parents),
                [self, vars, widths, n](Tape &t) {
                  const Tensor &g = t.grads_[self];
                  std::size_t off = 0;
                  for (std::size_t k = 0; k < vars.size(); ++k) {
                    if (t.nodes_[vars[k].id].needs_grad) {
                      Tensor &gp = t.grad_buf(vars[k].id);
                      for (std::size_t i = 0; i < n; ++i)
                        for (std::size_t j = 0; j < widths[k]; ++j)
                          gp.at(i, j) += g.at(i, off + j);
                    }
                    off += widths[k];
                  }
                });
}

Var Tape::concat_rows(const std::vector<Var> &xs) {
  if (xs.empty()) throw DimensionError("concat_rows: empty input list");
  const std::size_t d = value(xs[0]).cols();
  std::size_t total = 0;
  std::vector<int> parents;
  std::vector<std::size_t> heights;
  for (Var v : xs) {
    const Tensor &t = value(v);
    if (t.rank() != 2 || t.cols() != d) {
      throw DimensionError("concat_rows: column mismatch at " + t.shape_str());
    }
    heights.push_back(t.rows());
    total += t.rows();
    parents.push_back(v.id);
  }
  Tensor out({total, d});
  std::size_t off = 0;
  for (std::size_t k = 0; k < xs.size(); ++k) {
    const Tensor &t = value(xs[k]);
    for (std::size_t i = 0; i < heights[k]; ++i)
      for (std::size_t j = 0; j < d; ++j) out.at(off + i, j) = t.at(i, j);
    off += heights[k];
  }
  const int self = static_cast<int>(nodes_.size());
  std::vector<Var> vars = xs;
  return record(std::move(out), std::move(parents),
                [self, vars, heights, d](Tape &t) {
                  const Tensor &g = t.grads_[self];
                  std::size_t off = 0;
                  for (std::size_t k = 0; k < vars.size(); ++k) {
                    if (t.nodes_[vars[k].id].needs_grad) {
                      Tensor &gp = t.grad_buf(vars[k].id);
                      for (std::size_t i = 0; i < heights[k]; ++i)
                        for (std::size_t j = 0; j < d; ++j)
                          gp.at(i, j) += g.at(off + i, j);
                    }
                    off += heights[k];
                  }
                });
}

Var Tape::slice_cols(Var a, std::size_t lo, std::size_t hi) {
  const Tensor &va = value(a);
  if (va.rank() != 2 || lo >= hi || hi > va.cols()) {
    throw DimensionError("slice_cols: bad range on " + va.shape_str());
  }
  const std::size_t n = va.rows(), w = hi - lo;
  Tensor out({n, w});
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < w; ++j) out.at(i, j) = va.at(i, lo + j);
  const int self = static_cast<int>(nodes_.size());
  return record(std::move(out), {a.id}, [self, a, lo, n, w](Tape &t) {
    const Tensor &g = t.grads_[self];
    Tensor &ga = t.grad_buf(a.id);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < w; ++j) ga.at(i, lo + j) += g.at(i, j);
  });
}

Var Tape::slice_rows(Var a, std::size_t lo, std::size_t hi) {
  const Tensor &va = value(a);
  if (va.rank() != 2 || lo >= hi || hi > va.rows()) {
    throw DimensionError("slice_rows: bad range on " + va.shape_str());
  }
  const std::size_t d = va.cols(), h = hi - lo;
  Tensor out({h, d});
  for (std::size_t i = 0; i < h; ++i)
    for (std::size_t j = 0; j < d; ++j) out.at(i, j) = va.at(lo + i, j);
  const int self = static_cast<int>(nodes_.size());
  return record(std::move(out), {a.id}, [self, a, lo, h, d](Tape &t) {
    const Tensor &g = t.grads_[self];
    Tensor &ga = t.grad_buf(a.id);
    for (std::size_t i = 0; i < h; ++i)
      for (std::size_t j = 0; j < d; ++j) ga.at(lo + i, j) += g.at(i, j);
  });
}

Var Tape::gather_rows(Var a, std::vector<std::size_t> idx) {
  const Tensor &va = value(a);
  if (va.rank() != 2) {
    throw DimensionError("gather_rows: expected rank 2, got " +
                         va.shape_str());
  }
  for (std::size_t i : idx) {
    if (i >= va.rows()) {
      throw DimensionError("gather_rows: index " + std::to_string(i) +
                           " out of range for " + va.shape_str());
    }
  }
  const std::size_t d = va.cols();
  Tensor out({idx.size(), d});
  for (std::size_t i = 0; i < idx.size(); ++i)
    for (std::size_t j = 0; j < d; ++j) out.at(i, j) = va.at(idx[i], j);
  const int self = static_cast<int>(nodes_.size());
  return record(std::move(out), {a.id},
                [self, a, idx = std::move(idx), d](Tape &t) {
                  const Tensor &g = t.grads_[self];
                  Tensor &ga = t.grad_buf(a.id);
                  for (std::size_t i = 0; i < idx.size(); ++i)
                    for (std::size_t j = 0; j < d; ++j)
                      ga.at(idx[i], j) += g.at(i, j);
                });
}

Var Tape::segment_sum(Var a, std::vector<std::size_t> seg,
                      std::size_t out_rows) {
  const Tensor &va = value(a);
  if (va.rank() != 2 || seg.size() != va.rows()) {
    throw DimensionError("segment_sum: segment list size " +
                         std::to_string(seg.size()) + " vs " + va.shape_str());
  }
  for (std::size_t s : seg) {
    if (s >= out_rows) {
      throw DimensionError("segment_sum: segment " + std::to_string(s) +
                           " out of range");
    }
  }
  const std::size_t d = va.cols();
  Tensor out({out_rows, d});
  for (std::size_t i = 0; i < seg.size(); ++i)
    for (std::size_t j = 0; j < d; ++j) out.at(seg[i], j) += va.at(i, j);
  const int self = static_cast<int>(nodes_.size());
  return record(std::move(out), {a.id},
                [self, a, seg = std::move(seg), d](Tape &t) {
                  const Tensor &g = t.grads_[self];
                  Tensor &ga = t.grad_buf(a.id);
                  for (std::size_t i = 0; i < seg.size(); ++i)
                    for (std::size_t j = 0; j < d; ++j)
                      ga.at(i, j) += g.at(seg[i], j);
                });
}

Var Tape::zero_com_rows(Var a) {
  const Tensor &va = value(a);
  if (va.rank() != 2) {
    throw DimensionError("zero_com_rows: expected rank 2, got " +
                         va.shape_str());
  }
  const std::size_t n = va.rows(), d = va.cols();
  Tensor out = va;
  for (std::size_t j = 0; j < d; ++j) {
    double mean = 0.0;
    for (std::size_t i = 0; i < n; ++i) mean += va.at(i, j);
    mean /= static_cast<double>(n);
    for (std::size_t i = 0; i < n; ++i) out.at(i, j) -= mean;
  }
  const int self = static_cast<int>(nodes_.size());
  return record(std::move(out), {a.id}, [self, a, n, d](Tape &t) {
    // The centering projector is symmetric, so the pullback is the same
    // projection applied to the incoming gradient.
    const Tensor &g = t.grads_[self];
    Tensor &ga = t.grad_buf(a.id);
    for (std::size_t j = 0; j < d; ++j) {
      double mean = 0.0;
      for (std::size_t i = 0; i < n; ++i) mean += g.at(i, j);
      mean /= static_cast<double>(n);
      for (std::size_t i = 0; i < n; ++i) ga.at(i, j) += g.at(i, j) - mean;
    }
  });
}

AttentionOutput multi_head_attention(Tape &tape, Var query, Var context,
                                     const AttentionWeights &w,
                                     std::size_t heads) {
  const std::size_t d_q = tape.value(query).cols();
  if (heads == 0 || d_q % heads != 0) {
    throw DimensionError("multi_head_attention: query width " +
                         std::to_string(d_q) + " not divisible by " +
                         std::to_string(heads) + " heads");
  }
  const std::size_t d_head = d_q / heads;
  Var q = tape.linear(query, w.wq, w.bq);
  Var k = tape.linear(context, w.wk, w.bk);
  Var v = tape.linear(context, w.wv, w.bv);
  const double inv_sqrt_d = 1.0 / std::sqrt(static_cast<double>(d_head));
  AttentionOutput result;
  std::vector<Var> head_outs;
  for (std::size_t h = 0; h < heads; ++h) {
    const std::size_t lo = h * d_head, hi = (h + 1) * d_head;
    Var qh = tape.slice_cols(q, lo, hi);
    Var kh = tape.slice_cols(k, lo, hi);
    Var vh = tape.slice_cols(v, lo, hi);
    Var scores = tape.scale(tape.matmul(qh, tape.transpose(kh)), inv_sqrt_d);
    Var attn = tape.softmax_rows(scores);
    result.head_weights.push_back(attn);
    head_outs.push_back(tape.matmul(attn, vh));
  }
  Var merged = heads == 1 ? head_outs[0] : tape.concat_cols(head_outs);
  result.out = tape.linear(merged, w.wo, w.bo);
  return result;
}

GradCheckReport grad_check(
    const std::function<Var(Tape &, const std::vector<Var> &)> &f,
    std::vector<Tensor> point, double step) {
  Tape tape;
  std::vector<Var> vars;
  vars.reserve(point.size());
  for (const Tensor &t : point) vars.push_back(tape.leaf(t, true));
  Var loss = f(tape, vars);
  if (tape.value(loss).size() != 1) {
    throw DimensionError("grad_check: function is not scalar-valued");
  }
  if (!tape.value(loss).all_finite()) {
    throw Error("grad_check: non-finite value at evaluation point");
  }
  tape.backward(loss);
  std::vector<Tensor> analytic;
  analytic.reserve(vars.size());
  for (Var v : vars) analytic.push_back(tape.grad(v));

  auto eval = [&f](const std::vector<Tensor> &p) {
    Tape t;
    std::vector<Var> vs;
    vs.reserve(p.size());
    for (const Tensor &x : p) vs.push_back(t.leaf(x, false));
    const Tensor &out = t.value(f(t, vs));
    if (!out.all_finite()) {
      throw Error("grad_check: non-finite value during finite differencing");
    }
    return out.at(0);
  };

  GradCheckReport report;
  for (std::size_t k = 0; k < point.size(); ++k) {
    for (std::size_t i = 0; i < point[k].size(); ++i) {
      const double orig = point[k].at(i);
      point[k].at(i) = orig + step;
      const double up = eval(point);
      point[k].at(i) = orig - step;
      const double down = eval(point);
      point[k].at(i) = orig;
      const double fd = (up - down) / (2.0 * step);
      const double ad = analytic[k].at(i);
      const double denom = std::max({1.0, std::abs(fd), std::abs(ad)});
      report.max_rel_err =
          std::max(report.max_rel_err, std::abs(fd - ad) / denom);
      ++report.coords_checked;
    }
  }
  return report;
}

}  // namespace s2g
