//
// Project S2G - Copyright 2026 S2G Developers.
// SPDX-License-Identifier: Apache-2.0
//

#include "s2g/latent.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "s2g/error.hpp"

namespace s2g {

std::size_t AtomVocabulary::index_of(Element e) const {
  const auto it = std::find(tokens.begin(), tokens.end(), e);
  if (it == tokens.end())
    throw Error(std::string("element ") + element_symbol(e) +
                " is not in the atom vocabulary");
  return static_cast<std::size_t>(it - tokens.begin());
}

AtomVocabulary vocabulary_from(const std::vector<std::vector<Element>> &mols) {
  std::vector<Element> seen;
  for (const auto &mol : mols)
    for (const Element e : mol)
      if (std::find(seen.begin(), seen.end(), e) == seen.end())
        seen.push_back(e);
  std::sort(seen.begin(), seen.end(), [](Element a, Element b) {
    return static_cast<int>(a) < static_cast<int>(b);
  });
  return AtomVocabulary{std::move(seen)};
}

LatentConfig latent_full_scale(AtomVocabulary vocab, std::size_t d_spectral) {
  LatentConfig cfg;
  cfg.vocab = std::move(vocab);
  cfg.d_spectral = d_spectral;
  cfg.encoder = EgnnConfig{2 * cfg.d_h, 256, 0, 1};
  cfg.decoder = EgnnConfig{2 * cfg.d_h, 256, 0, 9};
  return cfg;
}

void init_latent_autoencoder(NamedTensors &store, Rng &rng,
                             const std::string &prefix,
                             const LatentConfig &cfg) {
  if (cfg.vocab.size() == 0) throw Error("atom vocabulary is empty");
  if (cfg.encoder.feature_dim != 2 * cfg.d_h ||
      cfg.decoder.feature_dim != 2 * cfg.d_h)
    throw DimensionError(
        "encoder and decoder feature width must equal twice the atom "
        "embedding width");
  store[prefix + ".vocab"] =
      Tensor::randn(rng, {cfg.vocab.size(), cfg.d_h}, 0.5);
  for (std::size_t k = 0; k < cfg.inject_layers; ++k) {
    init_attention(store, rng, prefix + ".node_inject" + std::to_string(k),
                   cfg.d_h, cfg.d_spectral);
    init_attention(store, rng, prefix + ".edge_inject" + std::to_string(k),
                   cfg.d_e, cfg.d_spectral);
  }
  init_mlp(store, rng, prefix + ".edge_mlp", 1 + cfg.d_h, cfg.edge_hidden,
           cfg.d_e);
  init_egnn(store, rng, prefix + ".encoder", cfg.encoder);
  init_egnn(store, rng, prefix + ".decoder", cfg.decoder);
}

Var tokenize_atoms(Binder &bind, const std::string &embed_name,
                   const AtomVocabulary &vocab,
                   const std::vector<Element> &elements) {
  std::vector<std::size_t> rows;
  rows.reserve(elements.size());
  for (const Element e : elements) rows.push_back(vocab.index_of(e));
  return bind.tape().gather_rows(bind(embed_name), std::move(rows));
}

namespace {

InjectionResult cross_attend(Binder &bind, const std::string &prefix,
                             std::size_t layers, std::size_t heads, Var stream,
                             Var context) {
  Tape &tape = bind.tape();
  InjectionResult result;
  for (std::size_t k = 0; k < layers; ++k) {
    const AttentionWeights w =
        bind_attention(bind, prefix + std::to_string(k));
    AttentionOutput attended =
        multi_head_attention(tape, stream, context, w, heads);
    stream = tape.add(stream, attended.out);
    result.attention.push_back(std::move(attended.head_weights));
  }
  result.out = stream;
  return result;
}

}  // namespace

InjectionResult inject_spectral_nodes(Binder &bind, const std::string &prefix,
                                      const LatentConfig &cfg, Var z_h,
                                      Var S) {
  InjectionResult attended =
      cross_attend(bind, prefix + ".node_inject", cfg.inject_layers,
                   cfg.inject_heads, z_h, S);
  attended.out = bind.tape().concat_cols({z_h, attended.out});
  return attended;
}

InjectionResult inject_spectral_edges(Binder &bind, const std::string &prefix,
                                      const LatentConfig &cfg, Var z_e,
                                      Var S) {
  return cross_attend(bind, prefix + ".edge_inject", cfg.inject_layers,
                      cfg.inject_heads, z_e, S);
}

Var build_edge_features(Binder &bind, const std::string &prefix,
                        const LatentConfig &cfg, Var z_x, Var z_h) {
  Tape &tape = bind.tape();
  const std::size_t n = tape.value(z_x).rows();
  if (tape.value(z_h).rows() != n)
    throw DimensionError("coordinate and embedding row counts differ");
  if (tape.value(z_h).cols() != cfg.d_h)
    throw DimensionError("edge features expect raw embeddings of width " +
                         std::to_string(cfg.d_h));
  const auto pairs = ordered_pairs(n);
  std::vector<std::size_t> src, dst;
  src.reserve(pairs.size());
  dst.reserve(pairs.size());
  for (const auto &[i, j] : pairs) {
    src.push_back(i);
    dst.push_back(j);
  }
  const Var xi = tape.gather_rows(z_x, src);
  const Var xj = tape.gather_rows(z_x, dst);
  const Var d2 = tape.row_sum(tape.square(tape.sub(xi, xj)));
  const Var hsum =
      tape.add(tape.gather_rows(z_h, src), tape.gather_rows(z_h, dst));
  const MlpVars mlp = bind_mlp(bind, prefix + ".edge_mlp");
  return mlp_forward(tape, mlp, tape.concat_cols({d2, hsum}));
}

Var encode_geometry(Binder &bind, const std::string &prefix,
                    const LatentConfig &cfg, Var x, Var z_h_aug) {
  Tape &tape = bind.tape();
  const std::vector<EgclVars> layers =
      bind_egnn(bind, prefix + ".encoder", cfg.encoder.layers);
  const NodeVars out = egnn_forward(tape, NodeVars{z_h_aug, x}, Var{}, layers);
  return tape.zero_com_rows(out.x);
}

Var sample_latent(Tape &tape, Var mean, double sigma0, Var eps) {
  return tape.zero_com_rows(tape.add(mean, tape.scale(eps, sigma0)));
}

Var decode_geometry(Binder &bind, const std::string &prefix,
                    const LatentConfig &cfg, Var z_x, Var z_h_aug) {
  Tape &tape = bind.tape();
  const std::vector<EgclVars> layers =
      bind_egnn(bind, prefix + ".decoder", cfg.decoder.layers);
  const NodeVars out =
      egnn_forward(tape, NodeVars{z_h_aug, z_x}, Var{}, layers);
  return tape.zero_com_rows(out.x);
}

Var ae_loss(Tape &tape, Var x, Var x_tilde, Var mean, double sigma0,
            double kl_weight) {
  if (!tape.value(x).same_shape(tape.value(x_tilde)) ||
      !tape.value(x).same_shape(tape.value(mean)))
    throw DimensionError("reconstruction loss needs matching shapes");
  if (sigma0 <= 0.0) throw Error("encoder noise scale must be positive");
  const Var recon = tape.sum(tape.square(tape.sub(x, x_tilde)));
  // KL(N(mu, s^2 I) || N(0, I)) = sum_i mu_i^2 / 2 + D (s^2 - 1 - 2 ln s) / 2
  const double d = static_cast<double>(tape.value(mean).size());
  const double spread =
      0.5 * d * (sigma0 * sigma0 - 1.0 - 2.0 * std::log(sigma0));
  const Var kl =
      tape.add_scalar(tape.scale(tape.sum(tape.square(mean)), 0.5), spread);
  return tape.add(recon, tape.scale(kl, kl_weight));
}

AutoencoderOutput autoencoder_forward(Binder &bind, const std::string &prefix,
                                      const LatentConfig &cfg,
                                      const Geometry &geom, Var S, Var eps) {
  Tape &tape = bind.tape();
  Tensor coords({geom.size(), 3});
  for (std::size_t i = 0; i < geom.size(); ++i)
    for (std::size_t a = 0; a < 3; ++a) coords.at(i, a) = geom.coords[i][a];

  AutoencoderOutput out;
  out.z_h = tokenize_atoms(bind, prefix + ".vocab", cfg.vocab, geom.elements);
  out.node_injection = inject_spectral_nodes(bind, prefix, cfg, out.z_h, S);
  out.z_h_aug = out.node_injection.out;
  const Var x = tape.leaf(zero_com_project(coords));
  out.mean = encode_geometry(bind, prefix, cfg, x, out.z_h_aug);
  out.z_x =
      eps.valid() ? sample_latent(tape, out.mean, cfg.sigma0, eps) : out.mean;
  out.recon = decode_geometry(bind, prefix, cfg, out.z_x, out.z_h_aug);
  return out;
}

}  // namespace s2g
