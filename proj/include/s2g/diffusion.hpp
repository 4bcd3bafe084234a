//
// Project S2G - Copyright 2026 S2G Developers.
// SPDX-License-Identifier: Apache-2.0
//

#ifndef S2G_DIFFUSION_HPP_
#define S2G_DIFFUSION_HPP_

#include <cstddef>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "s2g/chem.hpp"
#include "s2g/egnn.hpp"
#include "s2g/latent.hpp"
#include "s2g/nn.hpp"
#include "s2g/tensor.hpp"

namespace s2g {

// Diffusion over the coordinate latent only. Atom embeddings and spectral
// features ride along as fixed conditions; every latent along the chain is
// kept in the zero-centre-of-mass subspace.

// Arrays are indexed by step t in [0, T]: alpha[0] = 1 (clean data) and
// alpha[t] is the cumulative product of (1 - beta[i]) for i <= t.
struct NoiseSchedule {
  std::vector<double> alpha;
  std::vector<double> beta;  // beta[0] = 0, unused by the recursions
  std::vector<double> rho;   // rho[t] = sqrt(beta[t]); reverse noise scale

  std::size_t steps() const { return alpha.empty() ? 0 : alpha.size() - 1; }
};

// Polynomial schedule alpha_t = (1 - (t/T)^2)^2 with per-step ratios
// clipped into [1e-5, 0.999] and alpha rebuilt from the clipped ratios, so
// alpha is strictly decreasing and alpha_T is within a factor of the clip
// floor of zero. Throws Error for T < 1.
NoiseSchedule make_schedule(std::size_t steps);

// Closed-form marginal z_t = sqrt(alpha_t) z0 + sqrt(1 - alpha_t) eps.
// eps must already be zero-CoM projected; t ranges over [0, T].
Tensor forward_sample(const Tensor &z0, std::size_t t,
                      const NoiseSchedule &sched, const Tensor &eps);

// One reverse-recursion step:
//   z_{t-1} = (z_t - beta_t / sqrt(1 - alpha_t) * eps_hat) / sqrt(1 - beta_t)
//             + rho_t * noise
// noise may be empty to take the deterministic branch (final step).
Tensor reverse_step(const Tensor &z_t, std::size_t t, const Tensor &eps_hat,
                    const NoiseSchedule &sched, const Tensor &noise);

// Denoising network: spectrally augmented atom embeddings plus a sinusoidal
// step embedding drive an equivariant stack whose coordinate displacement is
// the noise prediction. Edge features are rebuilt from the current latent
// coordinates on every call.
struct DenoiserConfig {
  std::size_t d_h = 16;
  std::size_t d_e = 16;
  std::size_t d_spectral = 64;
  std::size_t inject_layers = 4;
  std::size_t inject_heads = 4;
  std::size_t edge_hidden = 64;
  std::size_t t_embed = 32;
  EgnnConfig backbone{64, 64, 16, 4};

  std::size_t node_width() const { return 2 * d_h + t_embed; }
};

// Production depth: 9 equivariant layers at 256 hidden.
DenoiserConfig denoiser_full_scale(std::size_t d_spectral = 512);

// Sinusoidal position code for the step index; dim must be even. Row vector
// 1 x dim with entries in [-1, 1].
Tensor time_embedding(std::size_t t, std::size_t dim);

// Parameters live under "<prefix>.node_inject<k>.*", "<prefix>.edge_inject<k>.*",
// "<prefix>.edge_mlp.*", and "<prefix>.backbone.layer<k>.*".
void init_denoiser(NamedTensors &store, Rng &rng, const std::string &prefix,
                   const DenoiserConfig &cfg);

struct DenoiserResult {
  Var eps_hat;            // N x 3, zero-CoM
  InjectionResult nodes;  // spectral attention per layer and head
  InjectionResult edges;
};

// z_x_t: N x 3 noisy latent (zero-CoM); z_h: N x d_h raw atom embeddings.
DenoiserResult denoiser_forward(Binder &bind, const std::string &prefix,
                                const DenoiserConfig &cfg, Var z_x_t,
                                std::size_t t, Var z_h, Var S);

// Single-draw estimate of the denoising objective for one molecule:
// |eps - denoiser(sqrt(alpha_t) z0 + sqrt(1-alpha_t) eps, t)|^2 summed over
// entries. eps must be zero-CoM projected; t in [1, T].
Var ldm_loss(Tape &tape, Var z0, std::size_t t, Var eps,
             const NoiseSchedule &sched,
             const std::function<Var(Tape &, Var, std::size_t)> &denoiser);

// Runs the reverse chain from a fresh Gaussian start. noise(rows) must
// return a rows x 3 standard normal draw; projection to zero CoM happens
// inside. When trajectory is non-null it receives every intermediate,
// starting with z_T and ending with z_0.
Tensor denoise_latent(const NamedTensors &store, const std::string &prefix,
                      const DenoiserConfig &cfg, const NoiseSchedule &sched,
                      const Tensor &z_h, const Tensor &S,
                      const std::function<Tensor(std::size_t)> &noise,
                      std::vector<Tensor> *trajectory = nullptr);

// Full conditional draw: tokenize the atom list through the autoencoder
// vocabulary, denoise a Gaussian latent under the spectral condition, and
// decode coordinates. The same seed always yields the same geometry.
Geometry sample_geometry(const NamedTensors &store,
                         const std::string &ae_prefix,
                         const std::string &den_prefix,
                         const LatentConfig &ae_cfg,
                         const DenoiserConfig &den_cfg,
                         const NoiseSchedule &sched,
                         const std::vector<Element> &elements, const Tensor &S,
                         std::uint64_t seed);

}  // namespace s2g

#endif  // S2G_DIFFUSION_HPP_
