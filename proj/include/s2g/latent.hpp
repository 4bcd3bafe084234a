//
// Project S2G - Copyright 2026 S2G Developers.
// SPDX-License-Identifier: Apache-2.0
//

#ifndef S2G_LATENT_HPP_
#define S2G_LATENT_HPP_

#include <cstddef>
#include <string>
#include <vector>

#include "s2g/chem.hpp"
#include "s2g/egnn.hpp"
#include "s2g/nn.hpp"
#include "s2g/tensor.hpp"

namespace s2g {

// Geometry autoencoder. Atom types become learned token embeddings, spectral
// features are folded into node and edge streams by cross-attention, and an
// equivariant stack maps coordinates to a 3-wide latent and back. Every
// invariant stream sees only squared distances and type embeddings, so the
// h path is unchanged under rigid motions while coordinates transform with
// the input frame.

// Maps each element to an embedding row. Token order is fixed at
// construction, so checkpoints stay valid as long as the vocabulary that
// produced them is stored alongside.
struct AtomVocabulary {
  std::vector<Element> tokens;

  std::size_t size() const { return tokens.size(); }
  // Throws Error when the element is not in the vocabulary.
  std::size_t index_of(Element e) const;
};

// Distinct elements over all molecules, ordered by atomic number.
AtomVocabulary vocabulary_from(const std::vector<std::vector<Element>> &mols);

struct LatentConfig {
  AtomVocabulary vocab;
  std::size_t d_h = 16;          // atom embedding width
  std::size_t d_e = 16;          // edge feature width
  std::size_t d_spectral = 64;   // width of the spectral feature rows
  std::size_t inject_layers = 4; // stacked cross-attention layers per stream
  std::size_t inject_heads = 4;
  std::size_t edge_hidden = 64;  // hidden width of the edge feature MLP
  EgnnConfig encoder{32, 64, 0, 1};
  EgnnConfig decoder{32, 64, 0, 4};
  double sigma0 = 0.01;          // encoder output noise scale
  double kl_weight = 1e-4;
};

// Production dimensions: 9-layer decoder at 256 hidden, 1-layer encoder.
LatentConfig latent_full_scale(AtomVocabulary vocab,
                               std::size_t d_spectral = 512);

// Parameters live under "<prefix>.vocab", "<prefix>.node_inject<k>.*",
// "<prefix>.edge_inject<k>.*", "<prefix>.edge_mlp.*", "<prefix>.encoder.*",
// and "<prefix>.decoder.*".
void init_latent_autoencoder(NamedTensors &store, Rng &rng,
                             const std::string &prefix,
                             const LatentConfig &cfg);

// Embedding lookup: row i of the result is the vocabulary row of element i.
Var tokenize_atoms(Binder &bind, const std::string &embed_name,
                   const AtomVocabulary &vocab,
                   const std::vector<Element> &elements);

// Cross-attention output plus the per-layer, per-head attention matrices
// (query rows by spectral rows, each row summing to one) kept for export.
struct InjectionResult {
  Var out;
  std::vector<std::vector<Var>> attention;
};

// Residual cross-attention stack reading from S; the attended stream is
// concatenated with the raw embeddings, so the result is N x 2*d_h.
InjectionResult inject_spectral_nodes(Binder &bind, const std::string &prefix,
                                      const LatentConfig &cfg, Var z_h, Var S);

// Residual cross-attention stack over edge rows; width stays d_e.
InjectionResult inject_spectral_edges(Binder &bind, const std::string &prefix,
                                      const LatentConfig &cfg, Var z_e, Var S);

// Per ordered pair (i, j): MLP(concat(|z_x_i - z_x_j|^2, z_h_i + z_h_j)).
// Rows follow ordered_pairs(); both inputs are symmetric in i, j so the
// (i, j) and (j, i) rows are identical.
Var build_edge_features(Binder &bind, const std::string &prefix,
                        const LatentConfig &cfg, Var z_x, Var z_h);

// Mean of the encoder distribution: one equivariant layer over centered
// coordinates, projected back to zero centre of mass.
Var encode_geometry(Binder &bind, const std::string &prefix,
                    const LatentConfig &cfg, Var x, Var z_h_aug);

// Training draw z = mean + sigma0 * eps, re-projected to zero centre of
// mass. eps must be an N x 3 leaf; gradients flow through the mean only.
Var sample_latent(Tape &tape, Var mean, double sigma0, Var eps);

// Equivariant reconstruction from the latent coordinates; output zero-CoM.
Var decode_geometry(Binder &bind, const std::string &prefix,
                    const LatentConfig &cfg, Var z_x, Var z_h_aug);

// Squared reconstruction error summed over atoms plus kl_weight times the
// KL divergence of N(mean, sigma0^2 I) from the standard normal.
Var ae_loss(Tape &tape, Var x, Var x_tilde, Var mean, double sigma0,
            double kl_weight);

struct AutoencoderOutput {
  Var z_h;      // N x d_h token embeddings
  Var z_h_aug;  // N x 2*d_h spectrally augmented node features
  Var mean;     // N x 3 encoder mean, zero-CoM
  Var z_x;      // latent draw (training) or the mean (inference)
  Var recon;    // N x 3 decoded coordinates, zero-CoM
  InjectionResult node_injection;
};

// Full forward pass. Coordinates are centered internally; pass eps as an
// N x 3 noise leaf for a training draw or an invalid Var to run on the mean.
AutoencoderOutput autoencoder_forward(Binder &bind, const std::string &prefix,
                                      const LatentConfig &cfg,
                                      const Geometry &geom, Var S, Var eps);

}  // namespace s2g

#endif  // S2G_LATENT_HPP_
