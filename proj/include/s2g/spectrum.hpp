//
// Project S2G - Copyright 2026 S2G Developers.
// SPDX-License-Identifier: Apache-2.0
//

#ifndef S2G_SPECTRUM_HPP_
#define S2G_SPECTRUM_HPP_

#include <cstddef>
#include <string>
#include <vector>

namespace s2g {

// Uniform wavenumber axis. The standard configuration samples [400, 4000)
// with 3200 points at 1.125 cm^-1 spacing, which divides evenly into
// 64-point patches and puts the fingerprint/functional-group boundary at a
// clean grid position.
struct WavenumberGrid {
  double start = 400.0;
  std::size_t count = 3200;
  double spacing = 1.125;

  static WavenumberGrid standard() { return WavenumberGrid{}; }
  double wavenumber(std::size_t i) const { return start + spacing * static_cast<double>(i); }
  bool operator==(const WavenumberGrid &) const = default;
};

struct Spectrum {
  WavenumberGrid grid;
  std::vector<double> intensities;
};

struct Mode {
  double wavenumber;  // cm^-1, > 0
  double intensity;   // >= 0, arbitrary absorbance units
};

using ModeList = std::vector<Mode>;

constexpr double kDefaultHalfWidth = 15.0;
constexpr double kDefaultFrequencyScale = 0.965;
// Functional-group region lower bound for the windowed similarity score.
constexpr double kFgRegionStart = 1350.0;
constexpr std::size_t kPatchSize = 64;
// Intensity floor applied after normalization, before logarithms.
constexpr double kSidFloor = 1e-10;

// Lorentzian line shape summed over all modes, evaluated per grid point:
//   I(x) = sum_n (F/2pi) * y_n / ((x - scale*x_n)^2 + F^2/4)
// Mode frequencies are scaled by `scale` before placement.
Spectrum broaden(const ModeList &modes, const WavenumberGrid &grid,
                 double half_width = kDefaultHalfWidth,
                 double scale = kDefaultFrequencyScale);

// Rescales so intensities sum to exactly 1; throws on all-zero input.
Spectrum normalize(const Spectrum &spec);

// Symmetric information divergence between normalized spectra.
double sid(const Spectrum &a, const Spectrum &b);
// 1 / (1 + SID); 1 for identical spectra.
double sis(const Spectrum &a, const Spectrum &b);
// sis restricted to wavenumbers >= 1350, re-normalized inside the window.
double sis_star(const Spectrum &a, const Spectrum &b);

// Contiguous non-overlapping slices in ascending wavenumber order.
std::vector<std::vector<double>> patchify(const Spectrum &spec,
                                          std::size_t patch_size = kPatchSize);

// One-record-per-line JSON interchange. A record carries either a mode list
// ("modes": [[wavenumber, intensity], ...]) or raw gridded intensities
// ("intensities": [...]).
struct SpectrumRecord {
  std::string id;
  ModeList modes;
  std::vector<double> raw;
  bool has_modes() const { return !modes.empty() || raw.empty(); }
};

SpectrumRecord parse_spectrum_record(const std::string &json_line);
std::string format_spectrum_record(const SpectrumRecord &record);

// Materializes a record on a grid: broadens the mode list or adopts raw
// intensities after length/negativity validation.
Spectrum record_to_spectrum(const SpectrumRecord &record,
                            const WavenumberGrid &grid);

}  // namespace s2g

#endif  // S2G_SPECTRUM_HPP_
