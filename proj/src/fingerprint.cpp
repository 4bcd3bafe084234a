//
// Project S2G - Copyright 2026 S2G Developers.
// SPDX-License-Identifier: Apache-2.0
//

#include "s2g/fingerprint.hpp"

#include <algorithm>
#include <array>
#include <cstdint>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "s2g/error.hpp"
#include "s2g/util.hpp"

namespace s2g {

namespace {

// Heavy-atom view of a molecular graph. Bond labels are the order for
// plain bonds and 4 for aromatic ones, so Kekulé placement inside an
// aromatic ring cannot leak into hashes or canonical keys.
struct HeavyGraph {
  std::vector<int> z;
  std::vector<int> h_count;
  std::vector<int> heavy_degree;
  std::vector<int> total_order;
  std::vector<int> aromatic;
  std::vector<std::vector<std::pair<std::size_t, int>>> adj;
  std::vector<std::array<std::size_t, 3>> bonds;  // {i, j, label}, i < j
};

int bond_label(const Bond &b) { return b.aromatic ? 4 : b.order; }

std::string label_text(int label) {
  return label == 4 ? "a" : std::to_string(label);
}

HeavyGraph collapse_hydrogens(const MolecularGraph &g) {
  HeavyGraph h;
  std::vector<long> heavy_index(g.atoms.size(), -1);
  for (std::size_t i = 0; i < g.atoms.size(); ++i) {
    if (g.atoms[i] == Element::H) continue;
    heavy_index[i] = static_cast<long>(h.z.size());
    h.z.push_back(atomic_number(g.atoms[i]));
    h.h_count.push_back(0);
    h.heavy_degree.push_back(0);
    h.total_order.push_back(g.total_order(i));
    h.aromatic.push_back(0);
  }
  h.adj.resize(h.z.size());
  for (const auto &b : g.bonds) {
    const long hi = heavy_index[b.i];
    const long hj = heavy_index[b.j];
    if (hi < 0 && hj < 0) continue;
    if (hi < 0 || hj < 0) {
      const long heavy = hi < 0 ? hj : hi;
      ++h.h_count[static_cast<std::size_t>(heavy)];
      continue;
    }
    const auto a = static_cast<std::size_t>(std::min(hi, hj));
    const auto b2 = static_cast<std::size_t>(std::max(hi, hj));
    const int label = bond_label(b);
    h.adj[a].emplace_back(b2, label);
    h.adj[b2].emplace_back(a, label);
    h.bonds.push_back({a, b2, static_cast<std::size_t>(label)});
    if (label == 4) {
      h.aromatic[a] = 1;
      h.aromatic[b2] = 1;
    }
  }
  for (std::size_t i = 0; i < h.adj.size(); ++i) {
    h.heavy_degree[i] = static_cast<int>(h.adj[i].size());
  }
  std::sort(h.bonds.begin(), h.bonds.end());
  return h;
}

std::vector<std::uint64_t> seed_hashes(const HeavyGraph &h) {
  std::vector<std::uint64_t> inv(h.z.size());
  for (std::size_t i = 0; i < h.z.size(); ++i) {
    const std::string s = std::to_string(h.z[i]) + "," +
                          std::to_string(h.heavy_degree[i]) + "," +
                          std::to_string(h.total_order[i]) + "," +
                          std::to_string(h.h_count[i]) + "," +
                          std::to_string(h.aromatic[i]);
    inv[i] = hash64(s);
  }
  return inv;
}

std::vector<std::uint64_t> next_hashes(const HeavyGraph &h,
                                       const std::vector<std::uint64_t> &inv) {
  std::vector<std::uint64_t> next(inv.size());
  for (std::size_t i = 0; i < inv.size(); ++i) {
    std::vector<std::string> parts;
    parts.reserve(h.adj[i].size());
    for (const auto &[j, label] : h.adj[i]) {
      parts.push_back(label_text(label) + ":" + std::to_string(inv[j]));
    }
    std::sort(parts.begin(), parts.end());
    std::string s = std::to_string(inv[i]) + "|";
    for (std::size_t k = 0; k < parts.size(); ++k) {
      if (k > 0) s += ";";
      s += parts[k];
    }
    next[i] = hash64(s);
  }
  return next;
}

}  // namespace

Fingerprint morgan_fingerprint(const MolecularGraph &graph) {
  const HeavyGraph h = collapse_hydrogens(graph);
  Fingerprint fp;
  std::vector<std::uint64_t> inv = seed_hashes(h);
  for (int radius = 0; radius <= Fingerprint::kRadius; ++radius) {
    if (radius > 0) inv = next_hashes(h, inv);
    for (const std::uint64_t v : inv) {
      fp.bits.insert(static_cast<int>(v % Fingerprint::kBits));
    }
  }
  return fp;
}

double tanimoto(const Fingerprint &a, const Fingerprint &b) {
  if (a.bits.empty() && b.bits.empty()) return 1.0;
  std::size_t common = 0;
  for (const int bit : a.bits) common += b.bits.count(bit);
  const std::size_t all = a.bits.size() + b.bits.size() - common;
  return static_cast<double>(common) / static_cast<double>(all);
}

double graph_similarity(const MolecularGraph &a, const MolecularGraph &b) {
  return tanimoto(morgan_fingerprint(a), morgan_fingerprint(b));
}

namespace {

using Colors = std::vector<long>;

// One refinement sweep: recolour every atom by (colour, sorted multiset of
// (bond label, neighbour colour)), with ranks assigned by signature value
// so the outcome cannot depend on input atom order.
Colors refine_once(const HeavyGraph &h, const Colors &colors) {
  using Signature = std::vector<long>;
  std::vector<Signature> sig(h.z.size());
  for (std::size_t i = 0; i < h.z.size(); ++i) {
    Signature s{colors[i]};
    std::vector<std::pair<long, long>> nb;
    nb.reserve(h.adj[i].size());
    for (const auto &[j, label] : h.adj[i]) nb.emplace_back(label, colors[j]);
    std::sort(nb.begin(), nb.end());
    for (const auto &[label, c] : nb) {
      s.push_back(label);
      s.push_back(c);
    }
    sig[i] = std::move(s);
  }
  std::vector<Signature> sorted = sig;
  std::sort(sorted.begin(), sorted.end());
  sorted.erase(std::unique(sorted.begin(), sorted.end()), sorted.end());
  Colors next(h.z.size());
  for (std::size_t i = 0; i < h.z.size(); ++i) {
    next[i] = static_cast<long>(
        std::lower_bound(sorted.begin(), sorted.end(), sig[i]) - sorted.begin());
  }
  return next;
}

std::size_t count_distinct(const Colors &c) {
  Colors copy = c;
  std::sort(copy.begin(), copy.end());
  copy.erase(std::unique(copy.begin(), copy.end()), copy.end());
  return copy.size();
}

Colors refine(const HeavyGraph &h, Colors colors) {
  std::size_t classes = count_distinct(colors);
  while (true) {
    Colors next = refine_once(h, colors);
    const std::size_t next_classes = count_distinct(next);
    colors = std::move(next);
    if (next_classes == classes) return colors;
    classes = next_classes;
  }
}

Colors initial_colors(const HeavyGraph &h) {
  Colors colors(h.z.size(), 0);
  using Tuple = std::array<int, 5>;
  std::vector<Tuple> tuples(h.z.size());
  for (std::size_t i = 0; i < h.z.size(); ++i) {
    tuples[i] = {h.z[i], h.heavy_degree[i], h.total_order[i], h.h_count[i],
                 h.aromatic[i]};
  }
  std::vector<Tuple> sorted = tuples;
  std::sort(sorted.begin(), sorted.end());
  sorted.erase(std::unique(sorted.begin(), sorted.end()), sorted.end());
  for (std::size_t i = 0; i < h.z.size(); ++i) {
    colors[i] = static_cast<long>(
        std::lower_bound(sorted.begin(), sorted.end(), tuples[i]) - sorted.begin());
  }
  return colors;
}

std::string element_token(int z, bool aromatic) {
  for (int e = 0; e < kNumElements; ++e) {
    if (atomic_number(static_cast<Element>(e)) == z) {
      std::string sym = element_symbol(static_cast<Element>(e));
      return aromatic ? lowercase(sym) : sym;
    }
  }
  return "?" + std::to_string(z);
}

std::string key_for_order(const HeavyGraph &h, const Colors &colors) {
  std::vector<std::size_t> order(h.z.size());
  for (std::size_t i = 0; i < h.z.size(); ++i) {
    order[static_cast<std::size_t>(colors[i])] = i;
  }
  std::vector<std::size_t> rank(h.z.size());
  for (std::size_t pos = 0; pos < order.size(); ++pos) rank[order[pos]] = pos;

  std::string key;
  for (std::size_t pos = 0; pos < order.size(); ++pos) {
    const std::size_t i = order[pos];
    if (pos > 0) key += ",";
    key += element_token(h.z[i], h.aromatic[i] != 0) + "H" +
           std::to_string(h.h_count[i]);
  }
  key += "|";
  std::vector<std::array<std::size_t, 3>> bonds;
  bonds.reserve(h.bonds.size());
  for (const auto &b : h.bonds) {
    const std::size_t ri = std::min(rank[b[0]], rank[b[1]]);
    const std::size_t rj = std::max(rank[b[0]], rank[b[1]]);
    bonds.push_back({ri, rj, b[2]});
  }
  std::sort(bonds.begin(), bonds.end());
  for (std::size_t k = 0; k < bonds.size(); ++k) {
    if (k > 0) key += ",";
    key += std::to_string(bonds[k][0]) + "-" + std::to_string(bonds[k][1]) +
           ":" + label_text(static_cast<int>(bonds[k][2]));
  }
  return key;
}

void canon_search(const HeavyGraph &h, Colors colors, std::string &best) {
  colors = refine(h, colors);
  const std::size_t n = h.z.size();
  if (count_distinct(colors) == n) {
    const std::string key = key_for_order(h, colors);
    if (best.empty() || key < best) best = key;
    return;
  }
  long target = -1;
  for (std::size_t i = 0; i < n; ++i) {
    long same = 0;
    for (std::size_t j = 0; j < n; ++j) {
      if (colors[j] == colors[i]) ++same;
    }
    if (same > 1 && (target < 0 || colors[i] < target)) target = colors[i];
  }
  long fresh = 0;
  for (const long c : colors) fresh = std::max(fresh, c + 1);
  for (std::size_t i = 0; i < n; ++i) {
    if (colors[i] != target) continue;
    Colors branch = colors;
    branch[i] = fresh;
    canon_search(h, std::move(branch), best);
  }
}

// Backtracking isomorphism search over heavy graphs with matching
// invariant tuples.
struct IsoSearch {
  const HeavyGraph &a;
  const HeavyGraph &b;
  std::vector<long> map_ab;
  std::vector<bool> used_b;

  IsoSearch(const HeavyGraph &ga, const HeavyGraph &gb)
      : a(ga), b(gb), map_ab(ga.z.size(), -1), used_b(gb.z.size(), false) {}

  bool compatible(std::size_t i, std::size_t cand) const {
    if (a.z[i] != b.z[cand] || a.h_count[i] != b.h_count[cand] ||
        a.heavy_degree[i] != b.heavy_degree[cand] ||
        a.total_order[i] != b.total_order[cand] ||
        a.aromatic[i] != b.aromatic[cand]) {
      return false;
    }
    for (const auto &[j, label] : a.adj[i]) {
      if (map_ab[j] < 0) continue;
      bool found = false;
      for (const auto &[k, blabel] : b.adj[cand]) {
        if (static_cast<long>(k) == map_ab[j] && blabel == label) {
          found = true;
          break;
        }
      }
      if (!found) return false;
    }
    return true;
  }

  bool extend(std::size_t i) {
    if (i == a.z.size()) return true;
    for (std::size_t cand = 0; cand < b.z.size(); ++cand) {
      if (used_b[cand] || !compatible(i, cand)) continue;
      map_ab[i] = static_cast<long>(cand);
      used_b[cand] = true;
      if (extend(i + 1)) return true;
      used_b[cand] = false;
      map_ab[i] = -1;
    }
    return false;
  }
};

}  // namespace

std::string canonical_key(const MolecularGraph &graph) {
  const HeavyGraph h = collapse_hydrogens(graph);
  if (h.z.empty()) return "|";
  std::string best;
  canon_search(h, initial_colors(h), best);
  return best;
}

bool graphs_isomorphic(const MolecularGraph &a, const MolecularGraph &b) {
  const HeavyGraph ga = collapse_hydrogens(a);
  const HeavyGraph gb = collapse_hydrogens(b);
  if (ga.z.size() != gb.z.size() || ga.bonds.size() != gb.bonds.size()) {
    return false;
  }
  IsoSearch search(ga, gb);
  return search.extend(0);
}

bool same_molecule(const MolecularGraph &a, const MolecularGraph &b) {
  if (canonical_key(a) != canonical_key(b)) return false;
  return graphs_isomorphic(a, b);
}

double molecular_accuracy(const std::vector<std::vector<MolecularGraph>> &samples,
                          const std::vector<MolecularGraph> &references) {
  if (samples.size() != references.size()) {
    throw DimensionError("molecular_accuracy: " + std::to_string(samples.size()) +
                         " sample lists vs " + std::to_string(references.size()) +
                         " references");
  }
  if (references.empty()) return 1.0;
  std::size_t hits = 0;
  for (std::size_t t = 0; t < references.size(); ++t) {
    const std::string ref_key = canonical_key(references[t]);
    for (const MolecularGraph &s : samples[t]) {
      if (canonical_key(s) == ref_key && graphs_isomorphic(s, references[t])) {
        ++hits;
        break;
      }
    }
  }
  return static_cast<double>(hits) / static_cast<double>(references.size());
}

}  // namespace s2g
