//
// Project S2G - Copyright 2026 S2G Developers.
// SPDX-License-Identifier: Apache-2.0
//

#ifndef S2G_OPTIM_HPP_
#define S2G_OPTIM_HPP_

#include <cstddef>

#include "s2g/checkpoint.hpp"

namespace s2g {

// Inverse-square-root schedule with linear warmup:
//   base * 512^(-0.5) * min(step^(-0.5), step * warmup^(-1.5))
// The two branches cross exactly at step == warmup, where the rate peaks.
double lr_rate(std::size_t step, std::size_t warmup, double base);

struct AdamWConfig {
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
  double weight_decay = 0.0;
};

// Decoupled weight decay Adam. Moment buffers are keyed by parameter name,
// so one optimizer instance follows a store across steps; walking the
// std::map keeps the update order, and therefore the arithmetic, fixed.
class AdamW {
 public:
  explicit AdamW(AdamWConfig cfg = {}) : cfg_(cfg) {}

  void step(NamedTensors &params, const NamedTensors &grads, double lr);
  std::size_t steps_taken() const { return t_; }

 private:
  AdamWConfig cfg_;
  NamedTensors first_, second_;
  std::size_t t_ = 0;
};

}  // namespace s2g

#endif  // S2G_OPTIM_HPP_
