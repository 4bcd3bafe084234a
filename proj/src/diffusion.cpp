//
// Project S2G - Copyright 2026 S2G Developers.
// SPDX-License-Identifier: Apache-2.0
//

#include "s2g/diffusion.hpp"

#include <cmath>
#include <string>
#include <utility>
#include <vector>

#include "s2g/error.hpp"

namespace s2g {

NoiseSchedule make_schedule(std::size_t steps) {
  if (steps < 1) throw Error("noise schedule needs at least one step");
  const double T = static_cast<double>(steps);
  std::vector<double> target(steps + 1);
  for (std::size_t t = 0; t <= steps; ++t) {
    const double frac = static_cast<double>(t) / T;
    const double a = 1.0 - frac * frac;
    target[t] = a * a;
  }

  NoiseSchedule sched;
  sched.alpha.assign(steps + 1, 1.0);
  sched.beta.assign(steps + 1, 0.0);
  sched.rho.assign(steps + 1, 0.0);
  for (std::size_t t = 1; t <= steps; ++t) {
    double beta = 1.0 - target[t] / target[t - 1];
    beta = std::min(std::max(beta, 1e-5), 0.999);
    sched.beta[t] = beta;
    sched.rho[t] = std::sqrt(beta);
    sched.alpha[t] = sched.alpha[t - 1] * (1.0 - beta);
  }
  return sched;
}

namespace {

void require_step(std::size_t t, std::size_t lo, const NoiseSchedule &sched) {
  if (t < lo || t > sched.steps())
    throw Error("diffusion step " + std::to_string(t) +
                " outside [" + std::to_string(lo) + ", " +
                std::to_string(sched.steps()) + "]");
}

}  // namespace

Tensor forward_sample(const Tensor &z0, std::size_t t,
                      const NoiseSchedule &sched, const Tensor &eps) {
  require_step(t, 0, sched);
  if (!z0.same_shape(eps))
    throw DimensionError("latent and noise shapes differ");
  const double a = std::sqrt(sched.alpha[t]);
  const double b = std::sqrt(1.0 - sched.alpha[t]);
  Tensor out = z0;
  for (std::size_t i = 0; i < out.size(); ++i)
    out.at(i) = a * z0.at(i) + b * eps.at(i);
  return out;
}

Tensor reverse_step(const Tensor &z_t, std::size_t t, const Tensor &eps_hat,
                    const NoiseSchedule &sched, const Tensor &noise) {
  require_step(t, 1, sched);
  if (!z_t.same_shape(eps_hat))
    throw DimensionError("latent and noise prediction shapes differ");
  const double shrink = 1.0 / std::sqrt(1.0 - sched.beta[t]);
  const double lift = sched.beta[t] / std::sqrt(1.0 - sched.alpha[t]);
  Tensor out = z_t;
  for (std::size_t i = 0; i < out.size(); ++i)
    out.at(i) = shrink * (z_t.at(i) - lift * eps_hat.at(i));
  if (!noise.empty()) {
    if (!noise.same_shape(z_t))
      throw DimensionError("reverse noise shape differs from the latent");
    for (std::size_t i = 0; i < out.size(); ++i)
      out.at(i) += sched.rho[t] * noise.at(i);
  }
  return out;
}

DenoiserConfig denoiser_full_scale(std::size_t d_spectral) {
  DenoiserConfig cfg;
  cfg.d_spectral = d_spectral;
  cfg.backbone = EgnnConfig{cfg.node_width(), 256, cfg.d_e, 9};
  return cfg;
}

Tensor time_embedding(std::size_t t, std::size_t dim) {
  if (dim == 0 || dim % 2 != 0)
    throw DimensionError("step embedding width must be even and positive");
  Tensor row({1, dim});
  const double half = static_cast<double>(dim) / 2.0;
  for (std::size_t k = 0; 2 * k < dim; ++k) {
    const double angle =
        static_cast<double>(t) *
        std::pow(10000.0, -static_cast<double>(k) / half);
    row.at(0, 2 * k) = std::sin(angle);
    row.at(0, 2 * k + 1) = std::cos(angle);
  }
  return row;
}

namespace {

// The injection and edge-feature helpers are shared with the autoencoder;
// they only read the widths and stack sizes from the config.
LatentConfig injection_view(const DenoiserConfig &cfg) {
  LatentConfig view;
  view.d_h = cfg.d_h;
  view.d_e = cfg.d_e;
  view.d_spectral = cfg.d_spectral;
  view.inject_layers = cfg.inject_layers;
  view.inject_heads = cfg.inject_heads;
  view.edge_hidden = cfg.edge_hidden;
  return view;
}

}  // namespace

void init_denoiser(NamedTensors &store, Rng &rng, const std::string &prefix,
                   const DenoiserConfig &cfg) {
  if (cfg.backbone.feature_dim != cfg.node_width())
    throw DimensionError(
        "backbone feature width must equal twice the embedding width plus "
        "the step embedding width");
  if (cfg.backbone.edge_attr_dim != cfg.d_e)
    throw DimensionError(
        "backbone edge attribute width must match the edge feature width");
  const LatentConfig view = injection_view(cfg);
  for (std::size_t k = 0; k < cfg.inject_layers; ++k) {
    init_attention(store, rng, prefix + ".node_inject" + std::to_string(k),
                   cfg.d_h, cfg.d_spectral);
    init_attention(store, rng, prefix + ".edge_inject" + std::to_string(k),
                   cfg.d_e, cfg.d_spectral);
  }
  init_mlp(store, rng, prefix + ".edge_mlp", 1 + cfg.d_h, view.edge_hidden,
           cfg.d_e);
  init_egnn(store, rng, prefix + ".backbone", cfg.backbone);
}

DenoiserResult denoiser_forward(Binder &bind, const std::string &prefix,
                                const DenoiserConfig &cfg, Var z_x_t,
                                std::size_t t, Var z_h, Var S) {
  Tape &tape = bind.tape();
  const std::size_t n = tape.value(z_x_t).rows();
  if (tape.value(z_h).rows() != n)
    throw DimensionError("latent and embedding row counts differ");
  const LatentConfig view = injection_view(cfg);

  DenoiserResult result;
  result.nodes = inject_spectral_nodes(bind, prefix, view, z_h, S);

  Tensor ticks({n, cfg.t_embed});
  const Tensor code = time_embedding(t, cfg.t_embed);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < cfg.t_embed; ++j)
      ticks.at(i, j) = code.at(0, j);
  const Var h_in =
      tape.concat_cols({result.nodes.out, tape.leaf(std::move(ticks))});

  const Var z_e = build_edge_features(bind, prefix, view, z_x_t, z_h);
  result.edges = inject_spectral_edges(bind, prefix, view, z_e, S);

  const std::vector<EgclVars> layers =
      bind_egnn(bind, prefix + ".backbone", cfg.backbone.layers);
  const NodeVars out = egnn_forward(tape, NodeVars{h_in, z_x_t},
                                    result.edges.out, layers);
  result.eps_hat = tape.zero_com_rows(tape.sub(out.x, z_x_t));
  return result;
}

Var ldm_loss(Tape &tape, Var z0, std::size_t t, Var eps,
             const NoiseSchedule &sched,
             const std::function<Var(Tape &, Var, std::size_t)> &denoiser) {
  require_step(t, 1, sched);
  if (!tape.value(z0).same_shape(tape.value(eps)))
    throw DimensionError("latent and noise shapes differ");
  const double a = std::sqrt(sched.alpha[t]);
  const double b = std::sqrt(1.0 - sched.alpha[t]);
  const Var z_t = tape.add(tape.scale(z0, a), tape.scale(eps, b));
  const Var eps_hat = denoiser(tape, z_t, t);
  return tape.sum(tape.square(tape.sub(eps, eps_hat)));
}

Tensor denoise_latent(const NamedTensors &store, const std::string &prefix,
                      const DenoiserConfig &cfg, const NoiseSchedule &sched,
                      const Tensor &z_h, const Tensor &S,
                      const std::function<Tensor(std::size_t)> &noise,
                      std::vector<Tensor> *trajectory) {
  const std::size_t n = z_h.rows();
  Tensor z = zero_com_project(noise(n));
  if (trajectory) trajectory->push_back(z);
  for (std::size_t t = sched.steps(); t >= 1; --t) {
    Tape tape;
    Binder bind(tape, store, false);
    const DenoiserResult pred = denoiser_forward(
        bind, prefix, cfg, tape.leaf(z), t, tape.leaf(z_h), tape.leaf(S));
    Tensor step_noise;
    if (t > 1) step_noise = zero_com_project(noise(n));
    z = zero_com_project(
        reverse_step(z, t, tape.value(pred.eps_hat), sched, step_noise));
    if (trajectory) trajectory->push_back(z);
  }
  return z;
}

Geometry sample_geometry(const NamedTensors &store,
                         const std::string &ae_prefix,
                         const std::string &den_prefix,
                         const LatentConfig &ae_cfg,
                         const DenoiserConfig &den_cfg,
                         const NoiseSchedule &sched,
                         const std::vector<Element> &elements, const Tensor &S,
                         std::uint64_t seed) {
  Rng rng(seed);
  const auto gaussian = [&rng](std::size_t rows) {
    return Tensor::randn(rng, {rows, 3});
  };

  Tensor z_h_value;
  {
    Tape tape;
    Binder bind(tape, store, false);
    const Var z_h = tokenize_atoms(bind, ae_prefix + ".vocab", ae_cfg.vocab,
                                   elements);
    z_h_value = tape.value(z_h);
  }

  const Tensor z_final = denoise_latent(store, den_prefix, den_cfg, sched,
                                        z_h_value, S, gaussian);

  Tape tape;
  Binder bind(tape, store, false);
  const Var z_h = tape.leaf(z_h_value);
  const Var h_aug =
      inject_spectral_nodes(bind, ae_prefix, ae_cfg, z_h, tape.leaf(S)).out;
  const Var decoded =
      decode_geometry(bind, ae_prefix, ae_cfg, tape.leaf(z_final), h_aug);

  Geometry geom;
  geom.elements = elements;
  const Tensor &x = tape.value(decoded);
  geom.coords.reserve(elements.size());
  for (std::size_t i = 0; i < elements.size(); ++i)
    geom.coords.push_back({x.at(i, 0), x.at(i, 1), x.at(i, 2)});
  return geom;
}

}  // namespace s2g
