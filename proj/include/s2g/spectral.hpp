//
// Project S2G - Copyright 2026 S2G Developers.
// SPDX-License-Identifier: Apache-2.0
//

#ifndef S2G_SPECTRAL_HPP_
#define S2G_SPECTRAL_HPP_

#include <cstddef>
#include <string>
#include <vector>

#include "s2g/chem.hpp"
#include "s2g/nn.hpp"
#include "s2g/spectrum.hpp"
#include "s2g/tensor.hpp"

namespace s2g {

// Transformer classifier over an IR spectrum plus the chemical formula.
// The spectrum is cut into fixed-width patches, each linearly projected;
// the formula is split into element and digit tokens and embedded by
// lookup. Learned positional encodings are added per region, an encoder
// stack produces the spectral feature S, and functional-group queries read
// S through a cross-attention decoder to yield one logit per group.

// Token vocabulary: digits 0-9 at ids 0-9, then the supported elements in
// their enum order. Fixed so that checkpoints stay portable.
std::size_t formula_vocab_size();
std::size_t formula_token_id(const std::string &token);

struct FormulaTokens {
  std::vector<std::string> tokens;
  std::vector<std::size_t> ids;

  std::size_t size() const { return ids.size(); }
};

// Hill convention: carbon first, then hydrogen, then the rest
// alphabetically; without carbon everything is alphabetical. Counts of 1
// are omitted.
std::string hill_formula(const std::vector<Element> &elements);

// Splits "C3H8O" into C,3,H,8,O. Multi-digit counts become one token per
// digit. Throws ParseError on symbols outside the vocabulary.
FormulaTokens tokenize_formula(const std::string &formula);

struct SpectralConfig {
  std::size_t patch_count = 50;
  std::size_t patch_width = 64;
  std::size_t d_model = 64;
  std::size_t heads = 4;
  std::size_t encoder_layers = 2;
  std::size_t decoder_layers = 2;
  std::size_t ff_hidden = 256;
  std::size_t group_count = 20;
  std::size_t max_formula_len = 24;

  std::size_t sequence_len(std::size_t formula_len) const {
    return patch_count + formula_len;
  }
};

// Hyperparameters used for the full QM9S-scale classifier.
inline SpectralConfig spectral_full_scale() {
  SpectralConfig cfg;
  cfg.d_model = 512;
  cfg.heads = 8;
  cfg.encoder_layers = 4;
  cfg.decoder_layers = 4;
  cfg.ff_hidden = 2048;
  return cfg;
}

void init_spectral_classifier(NamedTensors &store, Rng &rng,
                              const std::string &prefix,
                              const SpectralConfig &cfg);

// Patch projection + token lookup + positional encodings. Returns a
// (p + c) x d_model sequence. The spectrum must hold exactly
// patch_count * patch_width intensities.
Var embed_spectrum(Binder &bind, const std::string &prefix,
                   const SpectralConfig &cfg, const Spectrum &spec,
                   const FormulaTokens &formula);

// Pre-norm self-attention encoder stack with a final layer norm.
Var encode_spectrum(Binder &bind, const std::string &prefix,
                    const SpectralConfig &cfg, Var tokens);

struct FgDecodeResult {
  Var logits;  // group_count x 1
  // Per decoder layer, per head: a row-stochastic group_count x (p + c)
  // cross-attention matrix, kept for export and analysis.
  std::vector<std::vector<Var>> cross_attention;
};

FgDecodeResult decode_fg(Binder &bind, const std::string &prefix,
                         const SpectralConfig &cfg, Var spectral_feature);

// Mean binary cross-entropy against 0/1 labels, computed from logits in
// log space: mean_k(softplus(f_k) - y_k * f_k).
Var bce_loss(Tape &tape, Var logits, const std::vector<int> &labels);

struct ClassifierOutput {
  Var spectral_feature;
  FgDecodeResult fg;
};

ClassifierOutput classifier_forward(Binder &bind, const std::string &prefix,
                                    const SpectralConfig &cfg,
                                    const Spectrum &spec,
                                    const FormulaTokens &formula);

}  // namespace s2g

#endif  // S2G_SPECTRAL_HPP_
