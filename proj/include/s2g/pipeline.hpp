//
// Project S2G - Copyright 2026 S2G Developers.
// SPDX-License-Identifier: Apache-2.0
//

#ifndef S2G_PIPELINE_HPP_
#define S2G_PIPELINE_HPP_

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "s2g/checkpoint.hpp"
#include "s2g/chem.hpp"
#include "s2g/diffusion.hpp"
#include "s2g/latent.hpp"
#include "s2g/spectral.hpp"
#include "s2g/spectrum.hpp"

namespace s2g {

// End-to-end orchestration: dataset ingestion, the three training stages,
// sampling campaigns, evaluation reports, and attention-map export. All
// entry points are deterministic functions of their inputs plus a seed, so
// any run can be reproduced bit-for-bit from its manifest.

// One ingested molecule: geometry, its vibrational description (mode list
// or pre-gridded intensities), and the graph-derived annotations.
struct DatasetRecord {
  std::string id;
  Geometry geom;
  SpectrumRecord spectrum;
  std::string formula;
  std::vector<int> labels;  // multi-hot over the builtin functional groups
  std::string key;          // canonical graph key
};

// Records are kept sorted by id, which fixes iteration order everywhere
// downstream (training batches, sampling campaigns, report rows).
struct DatasetStore {
  std::vector<DatasetRecord> records;

  std::size_t size() const { return records.size(); }
  const DatasetRecord *find(const std::string &id) const;
};

struct DropLog {
  struct Drop {
    std::string source;  // file or record id
    std::string reason;
  };
  std::vector<Drop> drops;
  std::size_t kept = 0;

  std::string to_text() const;
};

// Reads every .xyz file under xyz_dir and pairs it by basename with the
// JSON-lines records in spectra_file. Each pair is parsed, bond-perceived,
// labelled, and screened; records failing any step are dropped with a
// logged reason, never fatally. The survivors all pass check_validity.
DatasetStore ingest_dataset(const std::string &xyz_dir,
                            const std::string &spectra_file,
                            const WavenumberGrid &grid, DropLog *log);

// Store directory layout: records.jsonl (annotations + spectra) plus
// xyz/<id>.xyz geometry files.
void save_store(const DatasetStore &store, const std::string &dir);
DatasetStore load_store(const std::string &dir);

// Content hash over the full serialized store; ingesting identical inputs
// twice yields identical hashes.
std::uint64_t store_hash(const DatasetStore &store);

// Resolved run settings. Every field has a default; a config file only
// overrides the keys it names. The serialized form feeds run manifests, so
// two runs with equal serializations and seeds are bit-for-bit identical.
struct RunConfig {
  std::uint64_t seed = 1;

  // optimization
  std::size_t steps = 300;
  std::size_t batch = 4;
  std::size_t warmup = 3000;
  double base_lr = 1.0;
  double weight_decay = 0.0;

  // spectrum grid; patch_count * patch_width must equal grid_count
  double grid_start = 400.0;
  std::size_t grid_count = 3200;
  double grid_spacing = 1.125;

  // spectral classifier
  std::size_t patch_count = 50;
  std::size_t patch_width = 64;
  std::size_t d_model = 64;
  std::size_t heads = 4;
  std::size_t encoder_layers = 2;
  std::size_t decoder_layers = 2;
  std::size_t ff_hidden = 256;
  std::size_t max_formula_len = 24;

  // geometry autoencoder
  std::size_t d_h = 16;
  std::size_t d_e = 16;
  std::size_t inject_layers = 4;
  std::size_t inject_heads = 4;
  std::size_t edge_hidden = 64;
  std::size_t ae_hidden = 64;
  std::size_t ae_encoder_layers = 1;
  std::size_t ae_decoder_layers = 4;
  double sigma0 = 0.01;
  double kl_weight = 1e-4;

  // denoiser + schedule
  std::size_t den_hidden = 64;
  std::size_t den_layers = 4;
  std::size_t t_embed = 32;
  std::size_t diffusion_steps = 1000;

  // sampling
  std::size_t samples_per_spectrum = 50;

  WavenumberGrid grid() const;
  SpectralConfig spectral() const;
  LatentConfig latent(AtomVocabulary vocab) const;
  DenoiserConfig denoiser() const;

  // Sorted "key = value" lines covering every field.
  std::string serialize() const;
};

// Applies "key = value" lines over the defaults. '#' starts a comment.
// Unknown or repeated keys and inconsistent dimensions throw ParseError.
RunConfig parse_run_config(const std::string &text);
RunConfig load_run_config(const std::string &path);  // "" yields defaults

// FNV-1a over the raw bytes of a file; the hash recorded in manifests.
std::uint64_t file_hash(const std::string &path);

// Sorted key=value block naming the stage, the resolved config, the seed,
// and the content hashes of every input and output artifact.
std::string run_manifest(
    const std::string &stage, const RunConfig &cfg,
    const std::vector<std::pair<std::string, std::string>> &entries);

struct TrainResult {
  Checkpoint checkpoint;
  std::vector<double> losses;  // per optimizer step, mean loss per molecule
  std::vector<double> rates;   // learning rate applied at each step

  std::string loss_csv() const;  // "step,lr,loss" rows
};

// Stage 1: classifier alone under the label loss. Parameters live under
// "classifier.".
TrainResult train_classifier(const DatasetStore &store, const RunConfig &cfg);

// Stage 2: autoencoder joint with the classifier (reconstruction + label
// loss). Starts from a classifier checkpoint; adds parameters under "ae.".
TrainResult train_autoencoder(const DatasetStore &store, const RunConfig &cfg,
                              const Checkpoint &classifier);

// Stage 3: denoiser plus learnable autoencoder under reconstruction +
// denoising loss; the classifier is frozen. Starts from an autoencoder
// checkpoint; adds parameters under "denoiser.".
TrainResult train_ldm(const DatasetStore &store, const RunConfig &cfg,
                      const Checkpoint &autoencoder);

// Vocabulary recorded in a checkpoint's metadata (space-separated element
// symbols); set by train_autoencoder, required by sampling and export.
AtomVocabulary checkpoint_vocabulary(const Checkpoint &ckpt);
RunConfig checkpoint_config(const Checkpoint &ckpt);

struct SampleEntry {
  std::string record_id;
  std::size_t index = 0;
  std::uint64_t seed = 0;
  Geometry geom;
};

struct SampleSet {
  std::vector<SampleEntry> entries;  // sorted by (record_id, index)
};

// k conditional draws per store record. Draw seeds mix the campaign seed
// with the record id and draw index, so each (spectrum, draw) is
// reproducible in isolation. Draws whose reverse chain leaves the finite
// range are skipped, with the gap recorded in the drop log.
SampleSet run_sampling(const DatasetStore &store, const Checkpoint &ckpt,
                       std::size_t samples_per_spectrum, std::uint64_t seed,
                       DropLog *log = nullptr);

// Writes <id>_<index>.xyz per entry plus samples_manifest.txt.
void save_samples(const SampleSet &samples, const std::string &dir,
                  const std::string &manifest);
SampleSet load_samples(const std::string &dir);

struct EvaluationRow {
  std::string id;
  std::size_t samples = 0;
  std::size_t valid = 0;
  std::size_t stable = 0;
  std::size_t connected = 0;
  double sim_g_mean = 0.0;
  double sim_g_max = 0.0;
  bool exact_match = false;  // some sample is the reference molecule
  std::size_t sis_evaluated = 0;    // stable samples with an oracle spectrum
  std::size_t sis_unavailable = 0;  // stable samples missing from the table
  double sis_mean = 0.0;
  double sis_max = 0.0;
  double sis_star_mean = 0.0;
  double sis_star_max = 0.0;
};

struct EvaluationReport {
  std::vector<EvaluationRow> rows;  // one per evaluated spectrum, sorted
  // Aggregates over spectra (rates over all samples).
  double validity = 0.0;
  double stability = 0.0;
  double connectivity = 0.0;
  double sim_g_mean = 0.0;
  double sim_g_max = 0.0;
  double mol_acc = 0.0;
  double sis_mean = 0.0;
  double sis_max = 0.0;
  double sis_star_mean = 0.0;
  double sis_star_max = 0.0;
  std::size_t spectra_with_sis = 0;  // rows that had any oracle spectrum

  std::string to_csv() const;
};

// Scores a sample set against its store: graph similarity and exact-match
// accuracy over all samples, spectral similarity over stable samples only,
// with oracle spectra looked up by canonical key among the store records.
// Stable samples whose key has no table entry are counted as unavailable.
// Aggregates are invariant under permutations of the sample set.
EvaluationReport evaluate_samples(const SampleSet &samples,
                                  const DatasetStore &store,
                                  const WavenumberGrid &grid);

struct AttentionExport {
  std::string record_id;
  // Head-averaged cross-attention per denoiser injection layer; rows are
  // queries (atoms or ordered atom pairs), columns the conditioning rows
  // (spectrum patches first, then formula tokens). Rows each sum to one.
  std::vector<Tensor> atom_attention;
  std::vector<Tensor> edge_attention;
  // Per layer and spectrum patch: attention maximized over edge queries.
  std::vector<std::vector<double>> edge_peak;
  // Per layer, patch, and atom: attention re-normalized across the
  // molecule's atoms at each patch position.
  std::vector<Tensor> atom_share;
  std::vector<double> patch_wavenumbers;  // patch centers on the grid
  Spectrum spectrum;                      // conditioning spectrum, unit max

  std::string atoms_csv() const;  // layers x patches rows
  std::string edges_csv() const;  // layers x patches rows
  // Spectrum curve with the per-layer edge-peak attention overlaid.
  std::string overlay_svg() const;
};

// Runs the conditioned denoiser once at the final (least noisy) step on
// the record's encoded geometry and collects both injection attentions.
AttentionExport export_attention(const DatasetRecord &record,
                                 const Checkpoint &ckpt);

}  // namespace s2g

#endif  // S2G_PIPELINE_HPP_
