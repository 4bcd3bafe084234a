//
// Project S2G - Copyright 2026 S2G Developers.
// SPDX-License-Identifier: Apache-2.0
//

#include "s2g/spectrum.hpp"

#include <algorithm>
#include <cmath>

#include "json.hpp"
#include "s2g/error.hpp"

namespace s2g {

namespace {

constexpr double kPi = 3.14159265358979323846;

void require_same_grid(const Spectrum &a, const Spectrum &b) {
  if (!(a.grid == b.grid)) {
    throw DimensionError("spectra are defined on different grids");
  }
}

void require_valid(const Spectrum &s, const char *who) {
  if (s.intensities.size() != s.grid.count) {
    throw DimensionError(std::string(who) + ": intensity count " +
                         std::to_string(s.intensities.size()) +
                         " does not match grid count " +
                         std::to_string(s.grid.count));
  }
  for (double v : s.intensities) {
    if (!(v >= 0.0) || !std::isfinite(v)) {
      throw Error(std::string(who) + ": intensities must be finite and >= 0");
    }
  }
}

}  // namespace

Spectrum broaden(const ModeList &modes, const WavenumberGrid &grid,
                 double half_width, double scale) {
  if (!(half_width > 0.0)) {
    throw Error("broaden: half width must be positive");
  }
  for (const Mode &m : modes) {
    if (!(m.wavenumber > 0.0)) {
      throw Error("broaden: mode wavenumbers must be positive");
    }
    if (!(m.intensity >= 0.0)) {
      throw Error("broaden: mode intensities must be non-negative");
    }
  }
  Spectrum out{grid, std::vector<double>(grid.count, 0.0)};
  const double fw = half_width;
  const double prefactor = fw / (2.0 * kPi);
  const double quarter_f2 = 0.25 * fw * fw;
  for (const Mode &m : modes) {
    const double center = scale * m.wavenumber;
    for (std::size_t i = 0; i < grid.count; ++i) {
      const double dx = grid.wavenumber(i) - center;
      out.intensities[i] += prefactor * m.intensity / (dx * dx + quarter_f2);
    }
  }
  return out;
}

Spectrum normalize(const Spectrum &spec) {
  require_valid(spec, "normalize");
  double total = 0.0;
  for (double v : spec.intensities) total += v;
  if (total <= 0.0) {
    throw Error("normalize: spectrum has no positive intensity");
  }
  Spectrum out = spec;
  for (double &v : out.intensities) v /= total;
  return out;
}

double sid(const Spectrum &a, const Spectrum &b) {
  require_same_grid(a, b);
  const Spectrum na = normalize(a);
  const Spectrum nb = normalize(b);
  double acc = 0.0;
  for (std::size_t i = 0; i < na.intensities.size(); ++i) {
    const double p = std::max(na.intensities[i], kSidFloor);
    const double q = std::max(nb.intensities[i], kSidFloor);
    acc += p * std::log(p / q) + q * std::log(q / p);
  }
  return acc;
}

double sis(const Spectrum &a, const Spectrum &b) {
  return 1.0 / (1.0 + sid(a, b));
}

double sis_star(const Spectrum &a, const Spectrum &b) {
  require_same_grid(a, b);
  std::size_t lo = 0;
  while (lo < a.grid.count && a.grid.wavenumber(lo) < kFgRegionStart) ++lo;
  if (lo == a.grid.count) {
    throw Error("sis_star: grid has no points in the window");
  }
  WavenumberGrid window{a.grid.wavenumber(lo), a.grid.count - lo,
                        a.grid.spacing};
  Spectrum wa{window, {a.intensities.begin() + static_cast<std::ptrdiff_t>(lo),
                       a.intensities.end()}};
  Spectrum wb{window, {b.intensities.begin() + static_cast<std::ptrdiff_t>(lo),
                       b.intensities.end()}};
  return sis(wa, wb);
}

std::vector<std::vector<double>> patchify(const Spectrum &spec,
                                          std::size_t patch_size) {
  require_valid(spec, "patchify");
  if (patch_size == 0 || spec.grid.count % patch_size != 0) {
    throw DimensionError("patchify: grid count " +
                         std::to_string(spec.grid.count) +
                         " not divisible by patch size " +
                         std::to_string(patch_size));
  }
  std::vector<std::vector<double>> patches;
  patches.reserve(spec.grid.count / patch_size);
  for (std::size_t o = 0; o < spec.grid.count; o += patch_size) {
    patches.emplace_back(spec.intensities.begin() + static_cast<std::ptrdiff_t>(o),
                         spec.intensities.begin() +
                             static_cast<std::ptrdiff_t>(o + patch_size));
  }
  return patches;
}

SpectrumRecord parse_spectrum_record(const std::string &json_line) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(json_line);
  } catch (const nlohmann::json::parse_error &e) {
    throw ParseError(std::string("spectrum record: ") + e.what());
  }
  SpectrumRecord rec;
  if (!j.contains("id") || !j["id"].is_string()) {
    throw ParseError("spectrum record: missing string field 'id'");
  }
  rec.id = j["id"].get<std::string>();
  const bool has_modes = j.contains("modes");
  const bool has_raw = j.contains("intensities");
  if (has_modes == has_raw) {
    throw ParseError("spectrum record '" + rec.id +
                     "': exactly one of 'modes' or 'intensities' required");
  }
  if (has_modes) {
    for (const auto &pair : j["modes"]) {
      if (!pair.is_array() || pair.size() != 2) {
        throw ParseError("spectrum record '" + rec.id +
                         "': each mode must be [wavenumber, intensity]");
      }
      rec.modes.push_back({pair[0].get<double>(), pair[1].get<double>()});
    }
  } else {
    rec.raw = j["intensities"].get<std::vector<double>>();
  }
  return rec;
}

std::string format_spectrum_record(const SpectrumRecord &record) {
  nlohmann::json j;
  j["id"] = record.id;
  if (!record.modes.empty() || record.raw.empty()) {
    auto arr = nlohmann::json::array();
    for (const Mode &m : record.modes) {
      arr.push_back({m.wavenumber, m.intensity});
    }
    j["modes"] = arr;
  } else {
    j["intensities"] = record.raw;
  }
  return j.dump();
}

Spectrum record_to_spectrum(const SpectrumRecord &record,
                            const WavenumberGrid &grid) {
  if (!record.raw.empty()) {
    if (record.raw.size() != grid.count) {
      throw DimensionError("spectrum record '" + record.id + "': " +
                           std::to_string(record.raw.size()) +
                           " intensities for a grid of " +
                           std::to_string(grid.count));
    }
    Spectrum s{grid, record.raw};
    require_valid(s, "record_to_spectrum");
    return s;
  }
  return broaden(record.modes, grid);
}

}  // namespace s2g
