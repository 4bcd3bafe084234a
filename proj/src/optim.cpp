//
// Project S2G - Copyright 2026 S2G Developers.
// SPDX-License-Identifier: Apache-2.0
//

#include "s2g/optim.hpp"

#include <cmath>

#include "s2g/error.hpp"

namespace s2g {

double lr_rate(std::size_t step, std::size_t warmup, double base) {
  if (step == 0 || warmup == 0) {
    throw DimensionError("lr_rate: step and warmup must be positive");
  }
  const double s = static_cast<double>(step);
  const double w = static_cast<double>(warmup);
  return base * std::pow(512.0, -0.5) *
         std::min(1.0 / std::sqrt(s), s * std::pow(w, -1.5));
}

void AdamW::step(NamedTensors &params, const NamedTensors &grads, double lr) {
  ++t_;
  const double bias1 = 1.0 - std::pow(cfg_.beta1, static_cast<double>(t_));
  const double bias2 = 1.0 - std::pow(cfg_.beta2, static_cast<double>(t_));
  for (auto &[name, p] : params) {
    const auto g_it = grads.find(name);
    if (g_it == grads.end()) continue;
    const Tensor &g = g_it->second;
    if (!g.same_shape(p)) {
      throw DimensionError("adamw: gradient shape " + g.shape_str() +
                           " mismatches parameter \"" + name + "\" " +
                           p.shape_str());
    }
    Tensor &m = first_.try_emplace(name, Tensor::zeros(p.shape())).first->second;
    Tensor &v = second_.try_emplace(name, Tensor::zeros(p.shape())).first->second;
    for (std::size_t i = 0; i < p.size(); ++i) {
      m.at(i) = cfg_.beta1 * m.at(i) + (1.0 - cfg_.beta1) * g.at(i);
      v.at(i) = cfg_.beta2 * v.at(i) + (1.0 - cfg_.beta2) * g.at(i) * g.at(i);
      const double m_hat = m.at(i) / bias1;
      const double v_hat = v.at(i) / bias2;
      p.at(i) -= lr * (m_hat / (std::sqrt(v_hat) + cfg_.eps) +
                       cfg_.weight_decay * p.at(i));
    }
  }
}

}  // namespace s2g
