//
// Project S2G - Copyright 2026 S2G Developers.
// SPDX-License-Identifier: Apache-2.0
//

#include "s2g/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"

#include "s2g/error.hpp"
#include "s2g/fingerprint.hpp"
#include "s2g/nn.hpp"
#include "s2g/optim.hpp"
#include "s2g/pattern.hpp"
#include "s2g/util.hpp"

namespace s2g {

namespace fs = std::filesystem;

namespace {

std::string hex64(std::uint64_t v) {
  char buf[24];
  std::snprintf(buf, sizeof(buf), "%016llx",
                static_cast<unsigned long long>(v));
  return buf;
}

std::string read_binary_file(const std::string &path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open \"" + path + "\"");
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void write_file(const std::string &path, const std::string &content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write \"" + path + "\"");
  out << content;
}

std::string records_jsonl(const DatasetStore &store) {
  std::string out;
  for (const auto &r : store.records) {
    nlohmann::json j;
    j["id"] = r.id;
    j["formula"] = r.formula;
    j["key"] = r.key;
    j["labels"] = r.labels;
    j["spectrum"] = nlohmann::json::parse(format_spectrum_record(r.spectrum));
    j["xyz"] = "xyz/" + r.id + ".xyz";
    out += j.dump();
    out += "\n";
  }
  return out;
}

}  // namespace

const DatasetRecord *DatasetStore::find(const std::string &id) const {
  const auto it = std::lower_bound(
      records.begin(), records.end(), id,
      [](const DatasetRecord &r, const std::string &s) { return r.id < s; });
  if (it == records.end() || it->id != id) return nullptr;
  return &*it;
}

std::string DropLog::to_text() const {
  std::string out = "kept " + std::to_string(kept) + "\n";
  out += "dropped " + std::to_string(drops.size()) + "\n";
  for (const auto &d : drops) out += d.source + "\t" + d.reason + "\n";
  return out;
}

DatasetStore ingest_dataset(const std::string &xyz_dir,
                            const std::string &spectra_file,
                            const WavenumberGrid &grid, DropLog *log) {
  const auto drop = [log](const std::string &source,
                          const std::string &reason) {
    if (log) log->drops.push_back({source, reason});
  };

  std::map<std::string, SpectrumRecord> spectra;
  if (!spectra_file.empty()) {
    std::istringstream in(read_binary_file(spectra_file));
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
      ++lineno;
      if (trim(line).empty()) continue;
      const std::string source =
          spectra_file + ":" + std::to_string(lineno);
      try {
        SpectrumRecord rec = parse_spectrum_record(line);
        if (rec.id.empty()) {
          drop(source, "spectrum record without an id");
          continue;
        }
        if (!spectra.emplace(rec.id, std::move(rec)).second) {
          drop(source, "duplicate spectrum record id");
        }
      } catch (const Error &e) {
        drop(source, std::string("unreadable spectrum record: ") + e.what());
      }
    }
  }

  std::vector<fs::path> files;
  if (!xyz_dir.empty() && fs::exists(xyz_dir)) {
    for (const auto &entry : fs::directory_iterator(xyz_dir)) {
      if (entry.path().extension() == ".xyz") files.push_back(entry.path());
    }
  }
  std::sort(files.begin(), files.end());

  DatasetStore store;
  std::set<std::string> used_spectra;
  for (const auto &path : files) {
    const std::string id = path.stem().string();
    const std::string source = path.filename().string();
    const auto sp = spectra.find(id);
    if (sp == spectra.end()) {
      drop(source, "no spectrum record for this geometry");
      continue;
    }
    DatasetRecord rec;
    rec.id = id;
    try {
      rec.geom = parse_xyz(read_binary_file(path.string()));
      const Spectrum materialized = record_to_spectrum(sp->second, grid);
      const double peak = *std::max_element(materialized.intensities.begin(),
                                            materialized.intensities.end());
      if (!(peak > 0.0)) throw Error("spectrum has no intensity");
      const PerceptionResult perceived = perceive_bonds(rec.geom);
      if (!perceived.resolved) {
        throw Error("bond perception unresolved: " + perceived.note);
      }
      if (!check_validity(perceived.graph)) {
        throw Error("perceived graph fails the validity screen");
      }
      rec.formula = hill_formula(rec.geom.elements);
      rec.labels = label_functional_groups(perceived.graph,
                                           builtin_functional_groups());
      rec.key = canonical_key(perceived.graph);
    } catch (const Error &e) {
      drop(source, e.what());
      continue;
    }
    used_spectra.insert(id);
    rec.spectrum = sp->second;
    store.records.push_back(std::move(rec));
  }
  for (const auto &[id, rec] : spectra) {
    if (!used_spectra.count(id)) {
      drop("spectrum \"" + id + "\"", "no geometry file for this record");
    }
  }

  std::sort(store.records.begin(), store.records.end(),
            [](const DatasetRecord &a, const DatasetRecord &b) {
              return a.id < b.id;
            });
  if (log) log->kept = store.records.size();
  return store;
}

void save_store(const DatasetStore &store, const std::string &dir) {
  fs::create_directories(fs::path(dir) / "xyz");
  write_file((fs::path(dir) / "records.jsonl").string(),
             records_jsonl(store));
  for (const auto &r : store.records) {
    write_file((fs::path(dir) / "xyz" / (r.id + ".xyz")).string(),
               format_xyz(r.geom));
  }
}

DatasetStore load_store(const std::string &dir) {
  const std::string index_path = (fs::path(dir) / "records.jsonl").string();
  std::istringstream in(read_binary_file(index_path));
  DatasetStore store;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (trim(line).empty()) continue;
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(line);
    } catch (const nlohmann::json::exception &e) {
      throw ParseError(index_path + ":" + std::to_string(lineno) + ": " +
                       e.what());
    }
    DatasetRecord rec;
    rec.id = j.at("id").get<std::string>();
    rec.formula = j.at("formula").get<std::string>();
    rec.key = j.at("key").get<std::string>();
    rec.labels = j.at("labels").get<std::vector<int>>();
    rec.spectrum = parse_spectrum_record(j.at("spectrum").dump());
    const std::string xyz_rel = j.at("xyz").get<std::string>();
    rec.geom = parse_xyz(read_binary_file((fs::path(dir) / xyz_rel).string()));
    store.records.push_back(std::move(rec));
  }
  std::sort(store.records.begin(), store.records.end(),
            [](const DatasetRecord &a, const DatasetRecord &b) {
              return a.id < b.id;
            });
  return store;
}

std::uint64_t store_hash(const DatasetStore &store) {
  std::uint64_t h = hash64(records_jsonl(store));
  for (const auto &r : store.records) h = hash64(format_xyz(r.geom), h);
  return h;
}

WavenumberGrid RunConfig::grid() const {
  return WavenumberGrid{grid_start, grid_count, grid_spacing};
}

SpectralConfig RunConfig::spectral() const {
  SpectralConfig cfg;
  cfg.patch_count = patch_count;
  cfg.patch_width = patch_width;
  cfg.d_model = d_model;
  cfg.heads = heads;
  cfg.encoder_layers = encoder_layers;
  cfg.decoder_layers = decoder_layers;
  cfg.ff_hidden = ff_hidden;
  cfg.group_count = builtin_functional_groups().size();
  cfg.max_formula_len = max_formula_len;
  return cfg;
}

LatentConfig RunConfig::latent(AtomVocabulary vocab) const {
  LatentConfig cfg;
  cfg.vocab = std::move(vocab);
  cfg.d_h = d_h;
  cfg.d_e = d_e;
  cfg.d_spectral = d_model;
  cfg.inject_layers = inject_layers;
  cfg.inject_heads = inject_heads;
  cfg.edge_hidden = edge_hidden;
  cfg.encoder = EgnnConfig{2 * d_h, ae_hidden, 0, ae_encoder_layers};
  cfg.decoder = EgnnConfig{2 * d_h, ae_hidden, 0, ae_decoder_layers};
  cfg.sigma0 = sigma0;
  cfg.kl_weight = kl_weight;
  return cfg;
}

DenoiserConfig RunConfig::denoiser() const {
  DenoiserConfig cfg;
  cfg.d_h = d_h;
  cfg.d_e = d_e;
  cfg.d_spectral = d_model;
  cfg.inject_layers = inject_layers;
  cfg.inject_heads = inject_heads;
  cfg.edge_hidden = edge_hidden;
  cfg.t_embed = t_embed;
  cfg.backbone = EgnnConfig{2 * d_h + t_embed, den_hidden, d_e, den_layers};
  return cfg;
}

namespace {

struct ConfigField {
  enum class Kind { Count, Real } kind;
  std::size_t RunConfig::*count = nullptr;
  double RunConfig::*real = nullptr;
};

const std::map<std::string, ConfigField> &config_fields() {
  using K = ConfigField::Kind;
  static const std::map<std::string, ConfigField> fields = {
      {"steps", {K::Count, &RunConfig::steps, nullptr}},
      {"batch", {K::Count, &RunConfig::batch, nullptr}},
      {"warmup", {K::Count, &RunConfig::warmup, nullptr}},
      {"base_lr", {K::Real, nullptr, &RunConfig::base_lr}},
      {"weight_decay", {K::Real, nullptr, &RunConfig::weight_decay}},
      {"grid_start", {K::Real, nullptr, &RunConfig::grid_start}},
      {"grid_count", {K::Count, &RunConfig::grid_count, nullptr}},
      {"grid_spacing", {K::Real, nullptr, &RunConfig::grid_spacing}},
      {"patch_count", {K::Count, &RunConfig::patch_count, nullptr}},
      {"patch_width", {K::Count, &RunConfig::patch_width, nullptr}},
      {"d_model", {K::Count, &RunConfig::d_model, nullptr}},
      {"heads", {K::Count, &RunConfig::heads, nullptr}},
      {"encoder_layers", {K::Count, &RunConfig::encoder_layers, nullptr}},
      {"decoder_layers", {K::Count, &RunConfig::decoder_layers, nullptr}},
      {"ff_hidden", {K::Count, &RunConfig::ff_hidden, nullptr}},
      {"max_formula_len", {K::Count, &RunConfig::max_formula_len, nullptr}},
      {"d_h", {K::Count, &RunConfig::d_h, nullptr}},
      {"d_e", {K::Count, &RunConfig::d_e, nullptr}},
      {"inject_layers", {K::Count, &RunConfig::inject_layers, nullptr}},
      {"inject_heads", {K::Count, &RunConfig::inject_heads, nullptr}},
      {"edge_hidden", {K::Count, &RunConfig::edge_hidden, nullptr}},
      {"ae_hidden", {K::Count, &RunConfig::ae_hidden, nullptr}},
      {"ae_encoder_layers",
       {K::Count, &RunConfig::ae_encoder_layers, nullptr}},
      {"ae_decoder_layers",
       {K::Count, &RunConfig::ae_decoder_layers, nullptr}},
      {"sigma0", {K::Real, nullptr, &RunConfig::sigma0}},
      {"kl_weight", {K::Real, nullptr, &RunConfig::kl_weight}},
      {"den_hidden", {K::Count, &RunConfig::den_hidden, nullptr}},
      {"den_layers", {K::Count, &RunConfig::den_layers, nullptr}},
      {"t_embed", {K::Count, &RunConfig::t_embed, nullptr}},
      {"diffusion_steps", {K::Count, &RunConfig::diffusion_steps, nullptr}},
      {"samples_per_spectrum",
       {K::Count, &RunConfig::samples_per_spectrum, nullptr}},
  };
  return fields;
}

std::uint64_t parse_u64(const std::string &key, const std::string &value) {
  std::size_t pos = 0;
  unsigned long long v = 0;
  try {
    v = std::stoull(value, &pos);
  } catch (const std::exception &) {
    throw ParseError("config key \"" + key + "\": \"" + value +
                     "\" is not a count");
  }
  if (pos != value.size()) {
    throw ParseError("config key \"" + key + "\": \"" + value +
                     "\" is not a count");
  }
  return v;
}

double parse_real(const std::string &key, const std::string &value) {
  std::size_t pos = 0;
  double v = 0.0;
  try {
    v = std::stod(value, &pos);
  } catch (const std::exception &) {
    throw ParseError("config key \"" + key + "\": \"" + value +
                     "\" is not a number");
  }
  if (pos != value.size()) {
    throw ParseError("config key \"" + key + "\": \"" + value +
                     "\" is not a number");
  }
  return v;
}

void validate_config(const RunConfig &cfg) {
  if (cfg.patch_count * cfg.patch_width != cfg.grid_count) {
    throw ParseError("patch layout " + std::to_string(cfg.patch_count) +
                     " x " + std::to_string(cfg.patch_width) +
                     " does not tile the " + std::to_string(cfg.grid_count) +
                     "-point grid");
  }
  if (cfg.heads == 0 || cfg.d_model % cfg.heads != 0) {
    throw ParseError("heads must divide d_model");
  }
  if (cfg.inject_heads == 0 || cfg.d_h % cfg.inject_heads != 0 ||
      cfg.d_e % cfg.inject_heads != 0) {
    throw ParseError("inject_heads must divide d_h and d_e");
  }
  if (cfg.t_embed == 0 || cfg.t_embed % 2 != 0) {
    throw ParseError("t_embed must be a positive even width");
  }
  if (!(cfg.sigma0 > 0.0)) throw ParseError("sigma0 must be positive");
  if (!(cfg.grid_spacing > 0.0)) {
    throw ParseError("grid_spacing must be positive");
  }
  if (cfg.steps == 0 || cfg.batch == 0 || cfg.warmup == 0 ||
      cfg.diffusion_steps == 0 || cfg.samples_per_spectrum == 0 ||
      cfg.grid_count == 0 || cfg.max_formula_len == 0) {
    throw ParseError("counts in the run config must be positive");
  }
}

}  // namespace

std::string RunConfig::serialize() const {
  std::vector<std::pair<std::string, std::string>> rows;
  rows.emplace_back("seed", std::to_string(seed));
  for (const auto &[key, field] : config_fields()) {
    if (field.kind == ConfigField::Kind::Count) {
      rows.emplace_back(key, std::to_string(this->*(field.count)));
    } else {
      rows.emplace_back(key, format_g17(this->*(field.real)));
    }
  }
  std::sort(rows.begin(), rows.end());
  std::string out;
  for (const auto &[k, v] : rows) out += k + " = " + v + "\n";
  return out;
}

RunConfig parse_run_config(const std::string &text) {
  RunConfig cfg;
  std::set<std::string> seen;
  std::istringstream in(text);
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto comment = line.find('#');
    if (comment != std::string::npos) line = line.substr(0, comment);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw ParseError("config line " + std::to_string(lineno) +
                       ": expected \"key = value\"");
    }
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty() || value.empty()) {
      throw ParseError("config line " + std::to_string(lineno) +
                       ": expected \"key = value\"");
    }
    if (!seen.insert(key).second) {
      throw ParseError("config key repeated: " + key);
    }
    if (key == "seed") {
      cfg.seed = parse_u64(key, value);
      continue;
    }
    const auto it = config_fields().find(key);
    if (it == config_fields().end()) {
      throw ParseError("unknown config key: " + key);
    }
    if (it->second.kind == ConfigField::Kind::Count) {
      cfg.*(it->second.count) =
          static_cast<std::size_t>(parse_u64(key, value));
    } else {
      cfg.*(it->second.real) = parse_real(key, value);
    }
  }
  validate_config(cfg);
  return cfg;
}

RunConfig load_run_config(const std::string &path) {
  if (path.empty()) return RunConfig{};
  return parse_run_config(read_binary_file(path));
}

std::uint64_t file_hash(const std::string &path) {
  return hash64(read_binary_file(path));
}

std::string run_manifest(
    const std::string &stage, const RunConfig &cfg,
    const std::vector<std::pair<std::string, std::string>> &entries) {
  std::string out = "stage = " + stage + "\n";
  out += cfg.serialize();
  for (const auto &[k, v] : entries) out += k + " = " + v + "\n";
  return out;
}

std::string TrainResult::loss_csv() const {
  std::string out = "step,lr,loss\n";
  for (std::size_t i = 0; i < losses.size(); ++i) {
    out += std::to_string(i + 1) + "," + format_g17(rates[i]) + "," +
           format_g17(losses[i]) + "\n";
  }
  return out;
}

namespace {

struct PreparedSample {
  const DatasetRecord *rec = nullptr;
  Spectrum spec;  // unit peak, on the run grid
  FormulaTokens formula;
  Tensor coords;  // zero-CoM target positions
};

// Broadening and tokenization are deterministic per record, so they run
// once up front. Spectra are scaled to unit peak: patch projections then
// see O(1) activations, where area normalization would shrink every input
// by the grid size.
std::vector<PreparedSample> prepare_samples(const DatasetStore &store,
                                            const RunConfig &cfg) {
  if (store.records.empty()) {
    throw Error("the dataset store holds no records");
  }
  const WavenumberGrid grid = cfg.grid();
  std::vector<PreparedSample> out;
  out.reserve(store.records.size());
  for (const auto &rec : store.records) {
    PreparedSample s;
    s.rec = &rec;
    Spectrum spec = record_to_spectrum(rec.spectrum, grid);
    const double peak = *std::max_element(spec.intensities.begin(),
                                          spec.intensities.end());
    if (!(peak > 0.0)) {
      throw Error("record \"" + rec.id + "\" has an all-zero spectrum");
    }
    for (double &v : spec.intensities) v /= peak;
    s.spec = std::move(spec);
    s.formula = tokenize_formula(rec.formula);
    if (s.formula.size() > cfg.max_formula_len) {
      throw DimensionError("record \"" + rec.id + "\": formula " +
                           rec.formula + " exceeds max_formula_len " +
                           std::to_string(cfg.max_formula_len));
    }
    const std::size_t n = rec.geom.size();
    Tensor x({n, 3});
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t d = 0; d < 3; ++d) x.at(i, d) = rec.geom.coords[i][d];
    }
    s.coords = zero_com_project(x);
    out.push_back(std::move(s));
  }
  return out;
}

bool tensors_have_prefix(const NamedTensors &tensors,
                         const std::string &prefix) {
  const auto it = tensors.lower_bound(prefix);
  return it != tensors.end() &&
         it->first.compare(0, prefix.size(), prefix) == 0;
}

std::string vocab_symbols(const AtomVocabulary &vocab) {
  std::string out;
  for (const Element e : vocab.tokens) {
    if (!out.empty()) out += " ";
    out += element_symbol(e);
  }
  return out;
}

std::string checkpoint_meta(const std::string &stage, const RunConfig &cfg,
                            const AtomVocabulary *vocab) {
  nlohmann::json j;
  j["stage"] = stage;
  j["seed"] = cfg.seed;
  j["config"] = cfg.serialize();
  if (vocab != nullptr) j["vocab"] = vocab_symbols(*vocab);
  return j.dump();
}

nlohmann::json parse_meta(const Checkpoint &ckpt) {
  try {
    return nlohmann::json::parse(ckpt.meta_json);
  } catch (const nlohmann::json::exception &e) {
    throw ParseError(std::string("unreadable checkpoint metadata: ") +
                     e.what());
  }
}

AdamW make_optimizer(const RunConfig &cfg) {
  AdamWConfig c;
  c.weight_decay = cfg.weight_decay;
  return AdamW(c);
}

}  // namespace

AtomVocabulary checkpoint_vocabulary(const Checkpoint &ckpt) {
  const nlohmann::json meta = parse_meta(ckpt);
  if (!meta.contains("vocab")) {
    throw Error("checkpoint records no atom vocabulary; train the "
                "autoencoder stage first");
  }
  AtomVocabulary vocab;
  for (const std::string &sym :
       split_ws(meta.at("vocab").get<std::string>())) {
    vocab.tokens.push_back(element_from_symbol(sym));
  }
  if (vocab.tokens.empty()) {
    throw Error("checkpoint vocabulary is empty");
  }
  return vocab;
}

RunConfig checkpoint_config(const Checkpoint &ckpt) {
  const nlohmann::json meta = parse_meta(ckpt);
  if (!meta.contains("config")) {
    throw Error("checkpoint records no run config");
  }
  return parse_run_config(meta.at("config").get<std::string>());
}

TrainResult train_classifier(const DatasetStore &store,
                             const RunConfig &cfg) {
  const auto samples = prepare_samples(store, cfg);
  const SpectralConfig scfg = cfg.spectral();
  NamedTensors params;
  Rng rng(cfg.seed);
  init_spectral_classifier(params, rng, "classifier", scfg);
  AdamW opt = make_optimizer(cfg);

  TrainResult result;
  for (std::size_t step = 1; step <= cfg.steps; ++step) {
    Tape tape;
    Binder bind(tape, params, true);
    Var total{};
    for (std::size_t b = 0; b < cfg.batch; ++b) {
      const PreparedSample &s =
          samples[((step - 1) * cfg.batch + b) % samples.size()];
      const ClassifierOutput out =
          classifier_forward(bind, "classifier", scfg, s.spec, s.formula);
      const Var loss = bce_loss(tape, out.fg.logits, s.rec->labels);
      total = total.valid() ? tape.add(total, loss) : loss;
    }
    tape.backward(total);
    const double lr = lr_rate(step, cfg.warmup, cfg.base_lr);
    opt.step(params, collect_grads(tape, bind), lr);
    result.rates.push_back(lr);
    result.losses.push_back(tape.value(total).at(0) /
                            static_cast<double>(cfg.batch));
  }
  result.checkpoint.tensors = std::move(params);
  result.checkpoint.meta_json = checkpoint_meta("classifier", cfg, nullptr);
  return result;
}

TrainResult train_autoencoder(const DatasetStore &store, const RunConfig &cfg,
                              const Checkpoint &classifier) {
  if (!tensors_have_prefix(classifier.tensors, "classifier.")) {
    throw Error("autoencoder training starts from a classifier checkpoint, "
                "but none of its parameters are present");
  }
  const auto samples = prepare_samples(store, cfg);
  std::vector<std::vector<Element>> element_lists;
  for (const auto &rec : store.records) {
    element_lists.push_back(rec.geom.elements);
  }
  const AtomVocabulary vocab = vocabulary_from(element_lists);
  const LatentConfig lcfg = cfg.latent(vocab);
  const SpectralConfig scfg = cfg.spectral();

  NamedTensors params = classifier.tensors;
  Rng rng(cfg.seed);
  init_latent_autoencoder(params, rng, "ae", lcfg);
  AdamW opt = make_optimizer(cfg);

  TrainResult result;
  for (std::size_t step = 1; step <= cfg.steps; ++step) {
    Tape tape;
    Binder bind(tape, params, true);
    Var total{};
    for (std::size_t b = 0; b < cfg.batch; ++b) {
      const PreparedSample &s =
          samples[((step - 1) * cfg.batch + b) % samples.size()];
      const ClassifierOutput cls =
          classifier_forward(bind, "classifier", scfg, s.spec, s.formula);
      const Var label_loss = bce_loss(tape, cls.fg.logits, s.rec->labels);
      const Var eps =
          tape.leaf(Tensor::randn(rng, {s.rec->geom.size(), 3}));
      const AutoencoderOutput out = autoencoder_forward(
          bind, "ae", lcfg, s.rec->geom, cls.spectral_feature, eps);
      const Var x = tape.leaf(s.coords);
      const Var recon_loss =
          ae_loss(tape, x, out.recon, out.mean, cfg.sigma0, cfg.kl_weight);
      const Var loss = tape.add(recon_loss, label_loss);
      total = total.valid() ? tape.add(total, loss) : loss;
    }
    tape.backward(total);
    const double lr = lr_rate(step, cfg.warmup, cfg.base_lr);
    opt.step(params, collect_grads(tape, bind), lr);
    result.rates.push_back(lr);
    result.losses.push_back(tape.value(total).at(0) /
                            static_cast<double>(cfg.batch));
  }
  result.checkpoint.tensors = std::move(params);
  result.checkpoint.meta_json = checkpoint_meta("ae", cfg, &vocab);
  return result;
}

TrainResult train_ldm(const DatasetStore &store, const RunConfig &cfg,
                      const Checkpoint &autoencoder) {
  if (!tensors_have_prefix(autoencoder.tensors, "ae.") ||
      !tensors_have_prefix(autoencoder.tensors, "classifier.")) {
    throw Error("denoiser training starts from an autoencoder checkpoint "
                "holding classifier and autoencoder parameters");
  }
  const auto samples = prepare_samples(store, cfg);
  const AtomVocabulary vocab = checkpoint_vocabulary(autoencoder);
  const LatentConfig lcfg = cfg.latent(vocab);
  const SpectralConfig scfg = cfg.spectral();
  const DenoiserConfig dcfg = cfg.denoiser();
  const NoiseSchedule sched = make_schedule(cfg.diffusion_steps);

  NamedTensors params = autoencoder.tensors;
  if (params.at("ae.vocab").rows() != vocab.size()) {
    throw DimensionError("checkpoint vocabulary disagrees with the "
                         "embedding table");
  }
  Rng rng(cfg.seed);
  init_denoiser(params, rng, "denoiser", dcfg);
  AdamW opt = make_optimizer(cfg);

  // The classifier is frozen in this stage, so its spectral features are
  // constants per record and are computed once.
  std::vector<Tensor> features;
  features.reserve(samples.size());
  for (const PreparedSample &s : samples) {
    Tape tape;
    Binder frozen(tape, params, false);
    const ClassifierOutput cls =
        classifier_forward(frozen, "classifier", scfg, s.spec, s.formula);
    features.push_back(tape.value(cls.spectral_feature));
  }

  TrainResult result;
  for (std::size_t step = 1; step <= cfg.steps; ++step) {
    Tape tape;
    Binder bind(tape, params, true);
    Var total{};
    for (std::size_t b = 0; b < cfg.batch; ++b) {
      const std::size_t idx = ((step - 1) * cfg.batch + b) % samples.size();
      const PreparedSample &s = samples[idx];
      const std::size_t n = s.rec->geom.size();
      const Var S = tape.leaf(features[idx]);
      const Var eps_ae = tape.leaf(Tensor::randn(rng, {n, 3}));
      const AutoencoderOutput out =
          autoencoder_forward(bind, "ae", lcfg, s.rec->geom, S, eps_ae);
      const Var x = tape.leaf(s.coords);
      const Var recon_loss =
          ae_loss(tape, x, out.recon, out.mean, cfg.sigma0, cfg.kl_weight);
      const std::size_t t =
          1 + static_cast<std::size_t>(rng.uniform() *
                                       static_cast<double>(sched.steps()));
      const Var eps =
          tape.leaf(zero_com_project(Tensor::randn(rng, {n, 3})));
      const auto denoiser = [&](Tape &, Var z, std::size_t tt) {
        return denoiser_forward(bind, "denoiser", dcfg, z, tt, out.z_h, S)
            .eps_hat;
      };
      const Var den_loss = ldm_loss(tape, out.mean, t, eps, sched, denoiser);
      const Var loss = tape.add(recon_loss, den_loss);
      total = total.valid() ? tape.add(total, loss) : loss;
    }
    tape.backward(total);
    const double lr = lr_rate(step, cfg.warmup, cfg.base_lr);
    opt.step(params, collect_grads(tape, bind), lr);
    result.rates.push_back(lr);
    result.losses.push_back(tape.value(total).at(0) /
                            static_cast<double>(cfg.batch));
  }
  result.checkpoint.tensors = std::move(params);
  result.checkpoint.meta_json = checkpoint_meta("ldm", cfg, &vocab);
  return result;
}

SampleSet run_sampling(const DatasetStore &store, const Checkpoint &ckpt,
                       std::size_t samples_per_spectrum, std::uint64_t seed,
                       DropLog *log) {
  if (!tensors_have_prefix(ckpt.tensors, "denoiser.")) {
    throw Error("sampling needs a checkpoint from the denoiser stage");
  }
  const RunConfig cfg = checkpoint_config(ckpt);
  const AtomVocabulary vocab = checkpoint_vocabulary(ckpt);
  const auto samples = prepare_samples(store, cfg);
  const SpectralConfig scfg = cfg.spectral();
  const LatentConfig lcfg = cfg.latent(vocab);
  const DenoiserConfig dcfg = cfg.denoiser();
  const NoiseSchedule sched = make_schedule(cfg.diffusion_steps);

  SampleSet set;
  for (const PreparedSample &s : samples) {
    Tensor S;
    {
      Tape tape;
      Binder frozen(tape, ckpt.tensors, false);
      const ClassifierOutput cls =
          classifier_forward(frozen, "classifier", scfg, s.spec, s.formula);
      S = tape.value(cls.spectral_feature);
    }
    const std::uint64_t record_seed = hash64_mix(hash64(s.rec->id), seed);
    for (std::size_t draw = 0; draw < samples_per_spectrum; ++draw) {
      const std::uint64_t draw_seed = hash64_mix(record_seed, draw);
      SampleEntry entry;
      entry.record_id = s.rec->id;
      entry.index = draw;
      entry.seed = draw_seed;
      try {
        entry.geom =
            sample_geometry(ckpt.tensors, "ae", "denoiser", lcfg, dcfg,
                            sched, s.rec->geom.elements, S, draw_seed);
      } catch (const NumericError &e) {
        if (log) {
          log->drops.push_back(
              {s.rec->id + "_" + std::to_string(draw),
               std::string("reverse chain left the finite range: ") +
                   e.what()});
        }
        continue;
      }
      entry.geom.comment =
          s.rec->id + " draw " + std::to_string(draw);
      set.entries.push_back(std::move(entry));
    }
  }
  if (log) log->kept = set.entries.size();
  return set;
}

void save_samples(const SampleSet &samples, const std::string &dir,
                  const std::string &manifest) {
  fs::create_directories(dir);
  for (const auto &entry : samples.entries) {
    const std::string name =
        entry.record_id + "_" + std::to_string(entry.index) + ".xyz";
    write_file((fs::path(dir) / name).string(), format_xyz(entry.geom));
  }
  write_file((fs::path(dir) / "samples_manifest.txt").string(), manifest);
}

SampleSet load_samples(const std::string &dir) {
  std::vector<fs::path> files;
  if (!fs::exists(dir)) throw Error("no sample directory \"" + dir + "\"");
  for (const auto &entry : fs::directory_iterator(dir)) {
    if (entry.path().extension() == ".xyz") files.push_back(entry.path());
  }
  std::sort(files.begin(), files.end());
  SampleSet set;
  for (const auto &path : files) {
    const std::string stem = path.stem().string();
    const auto sep = stem.rfind('_');
    if (sep == std::string::npos || sep + 1 == stem.size()) {
      throw ParseError("sample file \"" + path.filename().string() +
                       "\" is not named <record>_<index>.xyz");
    }
    const std::string digits = stem.substr(sep + 1);
    if (digits.find_first_not_of("0123456789") != std::string::npos) {
      throw ParseError("sample file \"" + path.filename().string() +
                       "\" is not named <record>_<index>.xyz");
    }
    SampleEntry entry;
    entry.record_id = stem.substr(0, sep);
    entry.index = static_cast<std::size_t>(std::stoull(digits));
    entry.geom = parse_xyz(read_binary_file(path.string()));
    set.entries.push_back(std::move(entry));
  }
  std::sort(set.entries.begin(), set.entries.end(),
            [](const SampleEntry &a, const SampleEntry &b) {
              return std::tie(a.record_id, a.index) <
                     std::tie(b.record_id, b.index);
            });
  return set;
}

EvaluationReport evaluate_samples(const SampleSet &samples,
                                  const DatasetStore &store,
                                  const WavenumberGrid &grid) {
  if (samples.entries.empty()) {
    throw Error("evaluation needs a non-empty sample set");
  }
  // Canonical processing order makes every aggregate invariant under
  // permutations of the input.
  std::vector<const SampleEntry *> order;
  order.reserve(samples.entries.size());
  for (const auto &e : samples.entries) order.push_back(&e);
  std::sort(order.begin(), order.end(),
            [](const SampleEntry *a, const SampleEntry *b) {
              return std::tie(a->record_id, a->index) <
                     std::tie(b->record_id, b->index);
            });

  std::map<std::string, const DatasetRecord *> oracle;
  for (const auto &rec : store.records) oracle.emplace(rec.key, &rec);
  std::map<std::string, Spectrum> oracle_spectra;
  const auto oracle_spectrum = [&](const std::string &key) -> const Spectrum * {
    const auto rec = oracle.find(key);
    if (rec == oracle.end()) return nullptr;
    const auto hit = oracle_spectra.find(key);
    if (hit != oracle_spectra.end()) return &hit->second;
    return &oracle_spectra
                .emplace(key, record_to_spectrum(rec->second->spectrum, grid))
                .first->second;
  };

  EvaluationReport report;
  std::size_t cursor = 0;
  std::size_t total_samples = 0, total_valid = 0, total_stable = 0,
              total_connected = 0;
  while (cursor < order.size()) {
    const std::string &id = order[cursor]->record_id;
    const DatasetRecord *rec = store.find(id);
    if (rec == nullptr) {
      throw Error("sample set references unknown record \"" + id + "\"");
    }
    const MolecularGraph reference = perceive_bonds(rec->geom).graph;
    const Spectrum test_spec = record_to_spectrum(rec->spectrum, grid);

    EvaluationRow row;
    row.id = id;
    std::vector<double> sims, sis_vals, sis_star_vals;
    while (cursor < order.size() && order[cursor]->record_id == id) {
      const SampleEntry &entry = *order[cursor];
      ++cursor;
      ++row.samples;
      const MolecularGraph graph = perceive_bonds(entry.geom).graph;
      const bool valid = check_validity(graph);
      const bool stable = check_stability(graph);
      const bool connected = check_connectivity(graph);
      row.valid += valid ? 1 : 0;
      row.stable += stable ? 1 : 0;
      row.connected += connected ? 1 : 0;
      sims.push_back(graph_similarity(graph, reference));
      if (same_molecule(graph, reference)) row.exact_match = true;
      if (stable) {
        const Spectrum *osp = oracle_spectrum(canonical_key(graph));
        if (osp == nullptr) {
          ++row.sis_unavailable;
        } else {
          ++row.sis_evaluated;
          sis_vals.push_back(sis(*osp, test_spec));
          sis_star_vals.push_back(sis_star(*osp, test_spec));
        }
      }
    }
    const auto mean_of = [](const std::vector<double> &v) {
      double acc = 0.0;
      for (const double x : v) acc += x;
      return v.empty() ? 0.0 : acc / static_cast<double>(v.size());
    };
    const auto max_of = [](const std::vector<double> &v) {
      double best = 0.0;
      for (const double x : v) best = std::max(best, x);
      return best;
    };
    row.sim_g_mean = mean_of(sims);
    row.sim_g_max = max_of(sims);
    row.sis_mean = mean_of(sis_vals);
    row.sis_max = max_of(sis_vals);
    row.sis_star_mean = mean_of(sis_star_vals);
    row.sis_star_max = max_of(sis_star_vals);
    total_samples += row.samples;
    total_valid += row.valid;
    total_stable += row.stable;
    total_connected += row.connected;
    report.rows.push_back(std::move(row));
  }

  const double spectra = static_cast<double>(report.rows.size());
  report.validity =
      static_cast<double>(total_valid) / static_cast<double>(total_samples);
  report.stability =
      static_cast<double>(total_stable) / static_cast<double>(total_samples);
  report.connectivity = static_cast<double>(total_connected) /
                        static_cast<double>(total_samples);
  double acc_sim = 0.0, acc_sim_max = 0.0, acc_exact = 0.0;
  double acc_sis = 0.0, acc_sis_max = 0.0, acc_star = 0.0, acc_star_max = 0.0;
  for (const auto &row : report.rows) {
    acc_sim += row.sim_g_mean;
    acc_sim_max += row.sim_g_max;
    acc_exact += row.exact_match ? 1.0 : 0.0;
    if (row.sis_evaluated > 0) {
      ++report.spectra_with_sis;
      acc_sis += row.sis_mean;
      acc_sis_max += row.sis_max;
      acc_star += row.sis_star_mean;
      acc_star_max += row.sis_star_max;
    }
  }
  report.sim_g_mean = acc_sim / spectra;
  report.sim_g_max = acc_sim_max / spectra;
  report.mol_acc = acc_exact / spectra;
  if (report.spectra_with_sis > 0) {
    const double k = static_cast<double>(report.spectra_with_sis);
    report.sis_mean = acc_sis / k;
    report.sis_max = acc_sis_max / k;
    report.sis_star_mean = acc_star / k;
    report.sis_star_max = acc_star_max / k;
  }
  return report;
}

std::string EvaluationReport::to_csv() const {
  std::string out =
      "id,samples,validity,stability,connectivity,sim_g,max_sim_g,mol_acc,"
      "sis,max_sis,sis_star,max_sis_star,sis_unavailable\n";
  const auto rate = [](std::size_t part, std::size_t whole) {
    return format_g17(static_cast<double>(part) /
                      static_cast<double>(whole));
  };
  for (const auto &row : rows) {
    out += row.id + "," + std::to_string(row.samples) + ",";
    out += rate(row.valid, row.samples) + ",";
    out += rate(row.stable, row.samples) + ",";
    out += rate(row.connected, row.samples) + ",";
    out += format_g17(row.sim_g_mean) + "," + format_g17(row.sim_g_max) + ",";
    out += std::string(row.exact_match ? "1" : "0") + ",";
    if (row.sis_evaluated == 0) {
      out += "SIS unavailable,SIS unavailable,SIS unavailable,"
             "SIS unavailable,";
    } else {
      out += format_g17(row.sis_mean) + "," + format_g17(row.sis_max) + ",";
      out += format_g17(row.sis_star_mean) + "," +
             format_g17(row.sis_star_max) + ",";
    }
    out += std::to_string(row.sis_unavailable) + "\n";
  }
  std::size_t total_samples = 0, total_unavailable = 0;
  for (const auto &row : rows) {
    total_samples += row.samples;
    total_unavailable += row.sis_unavailable;
  }
  out += "ALL," + std::to_string(total_samples) + ",";
  out += format_g17(validity) + "," + format_g17(stability) + "," +
         format_g17(connectivity) + ",";
  out += format_g17(sim_g_mean) + "," + format_g17(sim_g_max) + ",";
  out += format_g17(mol_acc) + ",";
  if (spectra_with_sis == 0) {
    out += "SIS unavailable,SIS unavailable,SIS unavailable,"
           "SIS unavailable,";
  } else {
    out += format_g17(sis_mean) + "," + format_g17(sis_max) + ",";
    out += format_g17(sis_star_mean) + "," + format_g17(sis_star_max) + ",";
  }
  out += std::to_string(total_unavailable) + "\n";
  return out;
}

AttentionExport export_attention(const DatasetRecord &record,
                                 const Checkpoint &ckpt) {
  if (!tensors_have_prefix(ckpt.tensors, "denoiser.")) {
    throw Error("attention export needs a checkpoint from the denoiser "
                "stage");
  }
  const RunConfig cfg = checkpoint_config(ckpt);
  const AtomVocabulary vocab = checkpoint_vocabulary(ckpt);
  const SpectralConfig scfg = cfg.spectral();
  const LatentConfig lcfg = cfg.latent(vocab);
  const DenoiserConfig dcfg = cfg.denoiser();

  DatasetStore one;
  one.records.push_back(record);
  const auto prepared = prepare_samples(one, cfg);
  const PreparedSample &s = prepared.front();

  Tape tape;
  Binder bind(tape, ckpt.tensors, false);
  const ClassifierOutput cls =
      classifier_forward(bind, "classifier", scfg, s.spec, s.formula);
  const AutoencoderOutput enc = autoencoder_forward(
      bind, "ae", lcfg, record.geom, cls.spectral_feature, Var{});
  const DenoiserResult den = denoiser_forward(
      bind, "denoiser", dcfg, enc.mean, 1, enc.z_h, cls.spectral_feature);

  const auto head_average = [&tape](const std::vector<std::vector<Var>> &a) {
    std::vector<Tensor> layers;
    for (const auto &heads : a) {
      Tensor avg = tape.value(heads.front());
      for (std::size_t h = 1; h < heads.size(); ++h) {
        const Tensor &m = tape.value(heads[h]);
        for (std::size_t i = 0; i < avg.size(); ++i) avg.at(i) += m.at(i);
      }
      const double inv = 1.0 / static_cast<double>(heads.size());
      for (std::size_t i = 0; i < avg.size(); ++i) avg.at(i) *= inv;
      layers.push_back(std::move(avg));
    }
    return layers;
  };

  AttentionExport ex;
  ex.record_id = record.id;
  ex.atom_attention = head_average(den.nodes.attention);
  ex.edge_attention = head_average(den.edges.attention);
  ex.spectrum = s.spec;

  const WavenumberGrid grid = cfg.grid();
  for (std::size_t p = 0; p < cfg.patch_count; ++p) {
    const double first = grid.wavenumber(p * cfg.patch_width);
    ex.patch_wavenumbers.push_back(
        first + grid.spacing * static_cast<double>(cfg.patch_width - 1) / 2.0);
  }

  const std::size_t atoms = record.geom.size();
  for (const Tensor &layer : ex.atom_attention) {
    Tensor share({cfg.patch_count, atoms});
    for (std::size_t p = 0; p < cfg.patch_count; ++p) {
      double sum = 0.0;
      for (std::size_t i = 0; i < atoms; ++i) sum += layer.at(i, p);
      for (std::size_t i = 0; i < atoms; ++i) {
        share.at(p, i) = layer.at(i, p) / sum;
      }
    }
    ex.atom_share.push_back(std::move(share));
  }
  for (const Tensor &layer : ex.edge_attention) {
    std::vector<double> peak(cfg.patch_count, 0.0);
    for (std::size_t p = 0; p < cfg.patch_count; ++p) {
      for (std::size_t e = 0; e < layer.rows(); ++e) {
        peak[p] = std::max(peak[p], layer.at(e, p));
      }
    }
    ex.edge_peak.push_back(std::move(peak));
  }
  return ex;
}

std::string AttentionExport::atoms_csv() const {
  const std::size_t atoms =
      atom_share.empty() ? 0 : atom_share.front().cols();
  std::string out = "layer,patch,wavenumber";
  for (std::size_t i = 0; i < atoms; ++i) {
    out += ",atom" + std::to_string(i);
  }
  out += "\n";
  for (std::size_t l = 0; l < atom_share.size(); ++l) {
    for (std::size_t p = 0; p < patch_wavenumbers.size(); ++p) {
      out += std::to_string(l) + "," + std::to_string(p) + "," +
             format_g17(patch_wavenumbers[p]);
      for (std::size_t i = 0; i < atoms; ++i) {
        out += "," + format_g17(atom_share[l].at(p, i));
      }
      out += "\n";
    }
  }
  return out;
}

std::string AttentionExport::edges_csv() const {
  std::string out = "layer,patch,wavenumber,edge_peak\n";
  for (std::size_t l = 0; l < edge_peak.size(); ++l) {
    for (std::size_t p = 0; p < patch_wavenumbers.size(); ++p) {
      out += std::to_string(l) + "," + std::to_string(p) + "," +
             format_g17(patch_wavenumbers[p]) + "," +
             format_g17(edge_peak[l][p]) + "\n";
    }
  }
  return out;
}

namespace {

std::string svg_num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.2f", v);
  return buf;
}

}  // namespace

std::string AttentionExport::overlay_svg() const {
  constexpr double kWidth = 960.0, kHeight = 360.0;
  constexpr double kLeft = 60.0, kRight = 940.0;
  constexpr double kTop = 24.0, kBottom = 320.0;
  const double wn_min = spectrum.grid.wavenumber(0);
  const double wn_max = spectrum.grid.wavenumber(spectrum.grid.count - 1);
  const auto x_of = [&](double wn) {
    return kLeft + (wn - wn_min) / (wn_max - wn_min) * (kRight - kLeft);
  };
  const auto y_of = [&](double v) { return kBottom - v * (kBottom - kTop); };
  static const char *kPalette[] = {"#d62728", "#1f77b4", "#2ca02c",
                                   "#9467bd", "#ff7f0e", "#8c564b"};
  constexpr std::size_t kPaletteSize = 6;

  std::string svg =
      "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"960\" "
      "height=\"360\" viewBox=\"0 0 960 360\">\n";
  svg += "<rect width=\"960\" height=\"360\" fill=\"white\"/>\n";
  svg += "<text x=\"" + svg_num(kLeft) + "\" y=\"16\" font-family=\"sans-serif\" "
         "font-size=\"13\" fill=\"#333\">" +
         record_id + ": spectrum with edge cross-attention peaks</text>\n";

  // Spectrum curve (unit peak), decimated to every fourth grid point.
  svg += "<polyline fill=\"none\" stroke=\"#888\" stroke-width=\"1\" "
         "points=\"";
  for (std::size_t i = 0; i < spectrum.grid.count; i += 4) {
    svg += svg_num(x_of(spectrum.grid.wavenumber(i))) + "," +
           svg_num(y_of(spectrum.intensities[i])) + " ";
  }
  svg += "\"/>\n";

  double peak_max = 0.0;
  for (const auto &layer : edge_peak) {
    for (const double v : layer) peak_max = std::max(peak_max, v);
  }
  if (peak_max <= 0.0) peak_max = 1.0;
  for (std::size_t l = 0; l < edge_peak.size(); ++l) {
    const char *color = kPalette[l % kPaletteSize];
    svg += "<polyline fill=\"none\" stroke=\"";
    svg += color;
    svg += "\" stroke-width=\"1.5\" points=\"";
    for (std::size_t p = 0; p < patch_wavenumbers.size(); ++p) {
      svg += svg_num(x_of(patch_wavenumbers[p])) + "," +
             svg_num(y_of(edge_peak[l][p] / peak_max)) + " ";
    }
    svg += "\"/>\n";
    svg += "<text x=\"" + svg_num(kRight - 90.0) + "\" y=\"" +
           svg_num(kTop + 14.0 * static_cast<double>(l + 1)) +
           "\" font-family=\"sans-serif\" font-size=\"12\" fill=\"";
    svg += color;
    svg += "\">layer " + std::to_string(l) + "</text>\n";
  }

  svg += "<line x1=\"" + svg_num(kLeft) + "\" y1=\"" + svg_num(kBottom) +
         "\" x2=\"" + svg_num(kRight) + "\" y2=\"" + svg_num(kBottom) +
         "\" stroke=\"#333\" stroke-width=\"1\"/>\n";
  for (double wn = std::ceil(wn_min / 600.0) * 600.0; wn <= wn_max;
       wn += 600.0) {
    svg += "<line x1=\"" + svg_num(x_of(wn)) + "\" y1=\"" + svg_num(kBottom) +
           "\" x2=\"" + svg_num(x_of(wn)) + "\" y2=\"" +
           svg_num(kBottom + 5.0) + "\" stroke=\"#333\" stroke-width=\"1\"/>\n";
    svg += "<text x=\"" + svg_num(x_of(wn)) + "\" y=\"" +
           svg_num(kBottom + 20.0) +
           "\" font-family=\"sans-serif\" font-size=\"11\" fill=\"#333\" "
           "text-anchor=\"middle\">" +
           svg_num(wn) + "</text>\n";
  }
  svg += "<text x=\"" + svg_num((kLeft + kRight) / 2.0) + "\" y=\"" +
         svg_num(kHeight - 6.0) +
         "\" font-family=\"sans-serif\" font-size=\"12\" fill=\"#333\" "
         "text-anchor=\"middle\">wavenumber (cm-1)</text>\n";
  svg += "</svg>\n";
  return svg;
}

}  // namespace s2g
