//
// Project S2G - Copyright 2026 S2G Developers.
// SPDX-License-Identifier: Apache-2.0
//

#include "s2g/spectral.hpp"

#include <algorithm>
#include <map>
#include <string>

#include "s2g/error.hpp"

namespace s2g {

std::size_t formula_vocab_size() {
  return 10 + static_cast<std::size_t>(kNumElements);
}

std::size_t formula_token_id(const std::string &token) {
  if (token.size() == 1 && token[0] >= '0' && token[0] <= '9') {
    return static_cast<std::size_t>(token[0] - '0');
  }
  return 10 + static_cast<std::size_t>(
                  static_cast<int>(element_from_symbol(token)));
}

std::string hill_formula(const std::vector<Element> &elements) {
  std::map<std::string, int> counts;
  for (const Element e : elements) ++counts[element_symbol(e)];
  std::vector<std::string> order;
  if (counts.count("C")) {
    order.push_back("C");
    if (counts.count("H")) order.push_back("H");
    for (const auto &[sym, n] : counts)
      if (sym != "C" && sym != "H") order.push_back(sym);
  } else {
    for (const auto &[sym, n] : counts) order.push_back(sym);
  }
  std::string out;
  for (const std::string &sym : order) {
    out += sym;
    if (counts[sym] > 1) out += std::to_string(counts[sym]);
  }
  return out;
}

FormulaTokens tokenize_formula(const std::string &formula) {
  FormulaTokens result;
  std::size_t i = 0;
  while (i < formula.size()) {
    const char c = formula[i];
    std::string token;
    if (c >= '0' && c <= '9') {
      token = std::string(1, c);
      ++i;
    } else if (c >= 'A' && c <= 'Z') {
      token = std::string(1, c);
      if (i + 1 < formula.size() && formula[i + 1] >= 'a' &&
          formula[i + 1] <= 'z') {
        token += formula[i + 1];
        i += 2;
      } else {
        ++i;
      }
    } else {
      throw ParseError("formula \"" + formula + "\": unexpected character '" +
                       std::string(1, c) + "' at byte " + std::to_string(i));
    }
    try {
      result.ids.push_back(formula_token_id(token));
    } catch (const Error &) {
      throw ParseError("formula \"" + formula + "\": unknown token \"" +
                       token + "\" at byte " + std::to_string(i - token.size()));
    }
    result.tokens.push_back(token);
  }
  return result;
}

void init_spectral_classifier(NamedTensors &store, Rng &rng,
                              const std::string &prefix,
                              const SpectralConfig &cfg) {
  init_linear(store, rng, prefix + ".patch", cfg.patch_width, cfg.d_model);
  store[prefix + ".token_embed"] =
      Tensor::randn(rng, {formula_vocab_size(), cfg.d_model}, 0.5);
  store[prefix + ".pos_patch"] =
      Tensor::randn(rng, {cfg.patch_count, cfg.d_model}, 0.5);
  store[prefix + ".pos_formula"] =
      Tensor::randn(rng, {cfg.max_formula_len, cfg.d_model}, 0.5);
  for (std::size_t l = 0; l < cfg.encoder_layers; ++l) {
    const std::string lp = prefix + ".enc" + std::to_string(l);
    init_layer_norm(store, lp + ".ln1", cfg.d_model);
    init_attention(store, rng, lp + ".attn", cfg.d_model, cfg.d_model);
    init_layer_norm(store, lp + ".ln2", cfg.d_model);
    init_mlp(store, rng, lp + ".ff", cfg.d_model, cfg.ff_hidden, cfg.d_model);
  }
  init_layer_norm(store, prefix + ".enc_final", cfg.d_model);
  store[prefix + ".queries"] =
      Tensor::randn(rng, {cfg.group_count, cfg.d_model}, 0.5);
  for (std::size_t l = 0; l < cfg.decoder_layers; ++l) {
    const std::string lp = prefix + ".dec" + std::to_string(l);
    init_layer_norm(store, lp + ".ln_self", cfg.d_model);
    init_attention(store, rng, lp + ".self_attn", cfg.d_model, cfg.d_model);
    init_layer_norm(store, lp + ".ln_cross", cfg.d_model);
    init_attention(store, rng, lp + ".cross_attn", cfg.d_model, cfg.d_model);
    init_layer_norm(store, lp + ".ln_ff", cfg.d_model);
    init_mlp(store, rng, lp + ".ff", cfg.d_model, cfg.ff_hidden, cfg.d_model);
  }
  init_layer_norm(store, prefix + ".dec_final", cfg.d_model);
  init_linear(store, rng, prefix + ".head", cfg.d_model, 1);
}

Var embed_spectrum(Binder &bind, const std::string &prefix,
                   const SpectralConfig &cfg, const Spectrum &spec,
                   const FormulaTokens &formula) {
  Tape &tape = bind.tape();
  const std::size_t expected = cfg.patch_count * cfg.patch_width;
  if (spec.intensities.size() != expected) {
    throw DimensionError("embed_spectrum: spectrum has " +
                         std::to_string(spec.intensities.size()) +
                         " points, the patch grid needs " +
                         std::to_string(expected));
  }
  if (formula.size() == 0 || formula.size() > cfg.max_formula_len) {
    throw DimensionError("embed_spectrum: formula length " +
                         std::to_string(formula.size()) +
                         " outside [1, " +
                         std::to_string(cfg.max_formula_len) + "]");
  }

  Tensor patches({cfg.patch_count, cfg.patch_width});
  std::copy(spec.intensities.begin(), spec.intensities.end(),
            patches.vec().begin());
  const LinearVars patch = bind_linear(bind, prefix + ".patch");
  Var patch_rows = tape.linear(tape.leaf(patches), patch.w, patch.b);
  patch_rows = tape.add(patch_rows, bind(prefix + ".pos_patch"));

  Var formula_rows =
      tape.gather_rows(bind(prefix + ".token_embed"), formula.ids);
  formula_rows = tape.add(
      formula_rows,
      tape.slice_rows(bind(prefix + ".pos_formula"), 0, formula.size()));

  return tape.concat_rows({patch_rows, formula_rows});
}

namespace {

Var transformer_ff(Binder &bind, const std::string &prefix, Var x) {
  Tape &tape = bind.tape();
  const NormVars ln = bind_layer_norm(bind, prefix + ".ln_ff");
  const MlpVars ff = bind_mlp(bind, prefix + ".ff");
  return tape.add(x, mlp_forward(tape, ff,
                                 tape.layer_norm_rows(x, ln.gain, ln.bias)));
}

}  // namespace

Var encode_spectrum(Binder &bind, const std::string &prefix,
                    const SpectralConfig &cfg, Var tokens) {
  Tape &tape = bind.tape();
  Var x = tokens;
  for (std::size_t l = 0; l < cfg.encoder_layers; ++l) {
    const std::string lp = prefix + ".enc" + std::to_string(l);
    const NormVars ln1 = bind_layer_norm(bind, lp + ".ln1");
    Var normed = tape.layer_norm_rows(x, ln1.gain, ln1.bias);
    const AttentionWeights attn = bind_attention(bind, lp + ".attn");
    x = tape.add(x,
                 multi_head_attention(tape, normed, normed, attn, cfg.heads)
                     .out);
    const NormVars ln2 = bind_layer_norm(bind, lp + ".ln2");
    const MlpVars ff = bind_mlp(bind, lp + ".ff");
    x = tape.add(x, mlp_forward(tape, ff,
                                tape.layer_norm_rows(x, ln2.gain, ln2.bias)));
  }
  const NormVars fin = bind_layer_norm(bind, prefix + ".enc_final");
  return tape.layer_norm_rows(x, fin.gain, fin.bias);
}

FgDecodeResult decode_fg(Binder &bind, const std::string &prefix,
                         const SpectralConfig &cfg, Var spectral_feature) {
  Tape &tape = bind.tape();
  FgDecodeResult result;
  Var q = bind(prefix + ".queries");
  for (std::size_t l = 0; l < cfg.decoder_layers; ++l) {
    const std::string lp = prefix + ".dec" + std::to_string(l);
    const NormVars ln_self = bind_layer_norm(bind, lp + ".ln_self");
    Var normed = tape.layer_norm_rows(q, ln_self.gain, ln_self.bias);
    const AttentionWeights self_attn = bind_attention(bind, lp + ".self_attn");
    q = tape.add(
        q, multi_head_attention(tape, normed, normed, self_attn, cfg.heads)
               .out);

    const NormVars ln_cross = bind_layer_norm(bind, lp + ".ln_cross");
    normed = tape.layer_norm_rows(q, ln_cross.gain, ln_cross.bias);
    const AttentionWeights cross_attn =
        bind_attention(bind, lp + ".cross_attn");
    const AttentionOutput cross = multi_head_attention(
        tape, normed, spectral_feature, cross_attn, cfg.heads);
    result.cross_attention.push_back(cross.head_weights);
    q = tape.add(q, cross.out);

    q = transformer_ff(bind, lp, q);
  }
  const NormVars fin = bind_layer_norm(bind, prefix + ".dec_final");
  q = tape.layer_norm_rows(q, fin.gain, fin.bias);
  const LinearVars head = bind_linear(bind, prefix + ".head");
  result.logits = tape.linear(q, head.w, head.b);
  return result;
}

Var bce_loss(Tape &tape, Var logits, const std::vector<int> &labels) {
  const Tensor &f = tape.value(logits);
  if (f.size() != labels.size()) {
    throw DimensionError("bce_loss: " + std::to_string(labels.size()) +
                         " labels for logits " + f.shape_str());
  }
  Tensor y(f.shape());
  for (std::size_t i = 0; i < labels.size(); ++i)
    y.at(i) = labels[i] ? 1.0 : 0.0;
  const Var yv = tape.leaf(y);
  const Var per_label = tape.sub(tape.softplus(logits), tape.mul(yv, logits));
  return tape.scale(tape.sum(per_label),
                    1.0 / static_cast<double>(labels.size()));
}

ClassifierOutput classifier_forward(Binder &bind, const std::string &prefix,
                                    const SpectralConfig &cfg,
                                    const Spectrum &spec,
                                    const FormulaTokens &formula) {
  ClassifierOutput out;
  const Var tokens = embed_spectrum(bind, prefix, cfg, spec, formula);
  out.spectral_feature = encode_spectrum(bind, prefix, cfg, tokens);
  out.fg = decode_fg(bind, prefix, cfg, out.spectral_feature);
  return out;
}

}  // namespace s2g
