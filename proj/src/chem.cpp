//
// Project S2G - Copyright 2026 S2G Developers.
// SPDX-License-Identifier: Apache-2.0
//

#include "s2g/chem.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <optional>
#include <set>
#include <sstream>

#include "s2g/error.hpp"
#include "s2g/util.hpp"

namespace s2g {

namespace {

constexpr const char *kSymbols[kNumElements] = {
    "H", "B", "C", "N", "O", "F", "Si", "P", "S", "Cl", "As", "Se", "Br"};

constexpr int kAtomicNumbers[kNumElements] = {1,  5,  6,  7,  8,  9, 14,
                                              15, 16, 17, 33, 34, 35};

// Covalent radii in pm. Multiple-bond radii are absent (-1) for elements
// that do not form such bonds in neutral organic molecules.
constexpr double kSingleRadius[kNumElements] = {
    31, 84, 76, 71, 66, 57, 111, 107, 105, 102, 119, 120, 120};
constexpr double kDoubleRadius[kNumElements] = {
    -1, 78, 67, 60, 57, -1, 107, 102, 94, -1, 114, 107, -1};
constexpr double kTripleRadius[kNumElements] = {
    -1, 73, 60, 54, 53, -1, 102, 94, 95, -1, 106, 107, -1};

int elem_index(Element e) { return static_cast<int>(e); }

}  // namespace

Element element_from_symbol(const std::string &symbol) {
  for (int i = 0; i < kNumElements; ++i) {
    if (symbol == kSymbols[i]) return static_cast<Element>(i);
  }
  throw ParseError("unknown element symbol '" + symbol + "'");
}

const char *element_symbol(Element e) { return kSymbols[elem_index(e)]; }

int atomic_number(Element e) { return kAtomicNumbers[elem_index(e)]; }

bool is_halogen(Element e) {
  return e == Element::F || e == Element::Cl || e == Element::Br;
}

double distance_pm(const Geometry &geom, std::size_t i, std::size_t j) {
  const auto &a = geom.coords[i];
  const auto &b = geom.coords[j];
  const double dx = a[0] - b[0], dy = a[1] - b[1], dz = a[2] - b[2];
  return 100.0 * std::sqrt(dx * dx + dy * dy + dz * dz);
}

Bond *MolecularGraph::find_bond(std::size_t i, std::size_t j) {
  if (i > j) std::swap(i, j);
  for (Bond &b : bonds) {
    if (b.i == i && b.j == j) return &b;
  }
  return nullptr;
}

const Bond *MolecularGraph::find_bond(std::size_t i, std::size_t j) const {
  return const_cast<MolecularGraph *>(this)->find_bond(i, j);
}

void MolecularGraph::add_bond(std::size_t i, std::size_t j, int order) {
  if (i == j) throw Error("graph: self bond on atom " + std::to_string(i));
  if (i > j) std::swap(i, j);
  if (find_bond(i, j)) {
    throw Error("graph: duplicate bond " + std::to_string(i) + "-" +
                std::to_string(j));
  }
  bonds.push_back(Bond{i, j, order, false});
}

std::vector<std::vector<std::size_t>> MolecularGraph::adjacency() const {
  std::vector<std::vector<std::size_t>> adj(atoms.size());
  for (const Bond &b : bonds) {
    adj[b.i].push_back(b.j);
    adj[b.j].push_back(b.i);
  }
  for (auto &row : adj) std::sort(row.begin(), row.end());
  return adj;
}

int MolecularGraph::total_order(std::size_t atom) const {
  int total = 0;
  for (const Bond &b : bonds) {
    if (b.i == atom || b.j == atom) total += b.order;
  }
  return total;
}

std::size_t MolecularGraph::degree(std::size_t atom) const {
  std::size_t d = 0;
  for (const Bond &b : bonds) {
    if (b.i == atom || b.j == atom) ++d;
  }
  return d;
}

const ValenceTable &ValenceTable::builtin() {
  static const ValenceTable table = [] {
    ValenceTable t;
    auto set = [&t](Element e, std::vector<int> v) {
      t.allowed_[elem_index(e)] = std::move(v);
    };
    set(Element::H, {1});
    set(Element::B, {3});
    set(Element::C, {4});
    set(Element::N, {3});
    set(Element::O, {2});
    set(Element::F, {1});
    set(Element::Si, {4});
    set(Element::P, {3, 5});
    set(Element::S, {2, 4, 6});
    set(Element::Cl, {1});
    set(Element::As, {3, 5});
    set(Element::Se, {2, 4, 6});
    set(Element::Br, {1});
    return t;
  }();
  return table;
}

ValenceTable ValenceTable::load(const std::string &path) {
  ValenceTable t;
  std::istringstream in(read_text_file(path));
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const std::string stripped = trim(line);
    if (stripped.empty() || stripped[0] == '#') continue;
    const auto fields = split_ws(stripped);
    if (fields.size() != 2) {
      throw ParseError(path + ":" + std::to_string(lineno) +
                       ": expected 'element valences'");
    }
    const Element e = element_from_symbol(fields[0]);
    std::vector<int> vals;
    std::istringstream vs(fields[1]);
    std::string tok;
    while (std::getline(vs, tok, ',')) vals.push_back(std::stoi(tok));
    if (vals.empty()) {
      throw ParseError(path + ":" + std::to_string(lineno) +
                       ": empty valence list");
    }
    std::sort(vals.begin(), vals.end());
    t.allowed_[elem_index(e)] = std::move(vals);
  }
  for (int i = 0; i < kNumElements; ++i) {
    if (t.allowed_[i].empty()) {
      throw ParseError(path + ": no valences for element " +
                       std::string(kSymbols[i]));
    }
  }
  return t;
}

const std::vector<int> &ValenceTable::allowed(Element e) const {
  return allowed_[elem_index(e)];
}

int ValenceTable::max_allowed(Element e) const {
  return allowed_[elem_index(e)].back();
}

bool ValenceTable::is_allowed(Element e, int total) const {
  const auto &v = allowed_[elem_index(e)];
  return std::find(v.begin(), v.end(), total) != v.end();
}

int ValenceTable::next_allowed(Element e, int total) const {
  for (int v : allowed_[elem_index(e)]) {
    if (v >= total) return v;
  }
  return -1;
}

const BondLengthTable &BondLengthTable::builtin() {
  static const BondLengthTable table = [] {
    BondLengthTable t;
    for (int a = 0; a < kNumElements; ++a) {
      for (int b = a; b < kNumElements; ++b) {
        t.entries[{a, b, 1}] = kSingleRadius[a] + kSingleRadius[b];
        if (kDoubleRadius[a] > 0 && kDoubleRadius[b] > 0) {
          t.entries[{a, b, 2}] = kDoubleRadius[a] + kDoubleRadius[b];
        }
        if (kTripleRadius[a] > 0 && kTripleRadius[b] > 0) {
          t.entries[{a, b, 3}] = kTripleRadius[a] + kTripleRadius[b];
        }
      }
    }
    return t;
  }();
  return table;
}

BondLengthTable BondLengthTable::load(const std::string &path) {
  BondLengthTable t;
  std::istringstream in(read_text_file(path));
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const std::string stripped = trim(line);
    if (stripped.empty() || stripped[0] == '#') continue;
    const auto fields = split_ws(stripped);
    if (fields.size() != 4) {
      throw ParseError(path + ":" + std::to_string(lineno) +
                       ": expected 'elem elem order length_pm'");
    }
    const int a = elem_index(element_from_symbol(fields[0]));
    const int b = elem_index(element_from_symbol(fields[1]));
    const int order = std::stoi(fields[2]);
    const double length = std::stod(fields[3]);
    if (order < 1 || order > 3 || !(length > 0.0)) {
      throw ParseError(path + ":" + std::to_string(lineno) +
                       ": bad order or length");
    }
    t.entries[{std::min(a, b), std::max(a, b), order}] = length;
  }
  return t;
}

double BondLengthTable::length(Element a, Element b, int order) const {
  const int ia = elem_index(a), ib = elem_index(b);
  const auto it = entries.find({std::min(ia, ib), std::max(ia, ib), order});
  if (it == entries.end()) {
    throw Error(std::string("bond length table: no entry for ") +
                kSymbols[ia] + "-" + kSymbols[ib] + " order " +
                std::to_string(order));
  }
  return it->second;
}

bool BondLengthTable::has(Element a, Element b, int order) const {
  const int ia = elem_index(a), ib = elem_index(b);
  return entries.count({std::min(ia, ib), std::max(ia, ib), order}) > 0;
}

double BondLengthTable::aromatic_length(Element a, Element b) const {
  if (has(a, b, 2)) return 0.5 * (length(a, b, 1) + length(a, b, 2));
  return length(a, b, 1);
}

Geometry parse_xyz(const std::string &text) {
  std::istringstream in(text);
  std::string line;
  int lineno = 0;

  auto next_line = [&](bool required) -> std::optional<std::string> {
    while (std::getline(in, line)) {
      ++lineno;
      return line;
    }
    if (required) {
      throw ParseError("xyz: unexpected end of input at line " +
                       std::to_string(lineno + 1));
    }
    return std::nullopt;
  };

  const std::string count_line = trim(*next_line(true));
  char *end = nullptr;
  const long declared = std::strtol(count_line.c_str(), &end, 10);
  if (end == count_line.c_str() || *end != '\0' || declared < 1) {
    throw ParseError("xyz: line 1: expected positive atom count, got '" +
                     count_line + "'");
  }

  Geometry geom;
  geom.comment = trim(*next_line(true));

  for (long n = 0; n < declared; ++n) {
    const auto maybe = next_line(false);
    if (!maybe) {
      throw ParseError("xyz: declared " + std::to_string(declared) +
                       " atoms but input ends after " + std::to_string(n));
    }
    const auto fields = split_ws(*maybe);
    if (fields.size() != 4) {
      throw ParseError("xyz: line " + std::to_string(lineno) +
                       ": expected 'symbol x y z'");
    }
    Element e;
    try {
      e = element_from_symbol(fields[0]);
    } catch (const ParseError &err) {
      throw ParseError("xyz: line " + std::to_string(lineno) + ": " +
                       err.what());
    }
    std::array<double, 3> xyz{};
    for (int k = 0; k < 3; ++k) {
      const std::string &f = fields[k + 1];
      char *num_end = nullptr;
      xyz[k] = std::strtod(f.c_str(), &num_end);
      if (num_end == f.c_str() || *num_end != '\0' ||
          !std::isfinite(xyz[k])) {
        throw ParseError("xyz: line " + std::to_string(lineno) +
                         ": malformed coordinate '" + f + "'");
      }
    }
    geom.elements.push_back(e);
    geom.coords.push_back(xyz);
  }
  while (auto rest = next_line(false)) {
    if (!trim(*rest).empty()) {
      throw ParseError("xyz: line " + std::to_string(lineno) +
                       ": trailing content after declared atoms");
    }
  }
  return geom;
}

std::string format_xyz(const Geometry &geom) {
  std::ostringstream os;
  os << geom.size() << "\n" << geom.comment << "\n";
  for (std::size_t i = 0; i < geom.size(); ++i) {
    os << element_symbol(geom.elements[i]) << " "
       << format_g17(geom.coords[i][0]) << " " << format_g17(geom.coords[i][1])
       << " " << format_g17(geom.coords[i][2]) << "\n";
  }
  return os.str();
}

MolecularGraph initial_adjacency(const Geometry &geom, double delta_pm,
                                 const BondLengthTable &lengths) {
  if (delta_pm < 0.0) throw Error("initial_adjacency: negative tolerance");
  MolecularGraph g;
  g.atoms = geom.elements;
  for (std::size_t i = 0; i < geom.size(); ++i) {
    for (std::size_t j = i + 1; j < geom.size(); ++j) {
      const double ref =
          lengths.length(geom.elements[i], geom.elements[j], 1);
      if (distance_pm(geom, i, j) < ref + delta_pm) g.add_bond(i, j, 1);
    }
  }
  return g;
}

namespace {

// ---------------------------------------------------------------------------
// Bond perception internals
// ---------------------------------------------------------------------------

struct PerceptionState {
  const Geometry &geom;
  const BondLengthTable &lengths;
  const ValenceTable &valences;
  MolecularGraph g;

  Element elem(std::size_t i) const { return g.atoms[i]; }
  int total(std::size_t i) const { return g.total_order(i); }
  // An atom is saturated once its total sits at an allowed valence or it
  // cannot legally accept more bonds.
  bool saturated(std::size_t i) const {
    const int t = total(i);
    return valences.is_allowed(elem(i), t) ||
           t >= valences.max_allowed(elem(i));
  }
  bool can_accept(std::size_t i) const {
    return total(i) < valences.max_allowed(elem(i));
  }
  // Distance from the next allowed valence; 0 when already allowed.
  int deficit(std::size_t i) const {
    const int t = total(i);
    if (valences.is_allowed(elem(i), t)) return 0;
    const int next = valences.next_allowed(elem(i), t);
    return next < 0 ? 0 : next - t;
  }
  double bond_length_pm(const Bond &b) const {
    return distance_pm(geom, b.i, b.j);
  }
};

std::vector<std::vector<std::size_t>> find_rings(const MolecularGraph &g);

void saturate_terminal_atoms(PerceptionState &s) {
  const auto is_cno = [](Element e) {
    return e == Element::C || e == Element::N || e == Element::O;
  };
  // Terminal updates work inward from the molecular periphery; ring members
  // are left to the aromatic and multiple-bond passes.
  std::vector<bool> in_ring(s.g.atoms.size(), false);
  for (const auto &ring : find_rings(s.g)) {
    for (std::size_t v : ring) in_ring[v] = true;
  }
  bool changed = true;
  while (changed) {
    changed = false;
    for (std::size_t i = 0; i < s.g.atoms.size(); ++i) {
      if (s.saturated(i) || in_ring[i]) continue;
      const Element e = s.elem(i);
      std::size_t partner = 0;
      bool terminal = false;
      if (is_cno(e)) {
        std::size_t unsat_count = 0;
        for (const Bond &b : s.g.bonds) {
          if (b.i != i && b.j != i) continue;
          const std::size_t other = b.i == i ? b.j : b.i;
          if (!s.saturated(other)) {
            ++unsat_count;
            partner = other;
          }
        }
        terminal = unsat_count == 1;
      } else if (e == Element::S && s.g.degree(i) == 1) {
        const Bond &only = *std::find_if(
            s.g.bonds.begin(), s.g.bonds.end(),
            [i](const Bond &b) { return b.i == i || b.j == i; });
        partner = only.i == i ? only.j : only.i;
        terminal = true;
      }
      if (!terminal) continue;
      Bond *bond = s.g.find_bond(i, partner);
      const int target = s.valences.next_allowed(e, s.total(i));
      if (target < 0) continue;
      while (s.total(i) < target && bond->order < 3 && s.can_accept(partner)) {
        ++bond->order;
        changed = true;
      }
    }
  }
}

// All chordless simple cycles of length 3..8, each reported once with its
// smallest vertex first. Deterministic order: by size, then lexicographic.
std::vector<std::vector<std::size_t>> find_rings(const MolecularGraph &g) {
  const auto adj = g.adjacency();
  const std::size_t n = g.atoms.size();
  std::vector<std::vector<std::size_t>> rings;
  std::vector<std::size_t> path;
  std::vector<bool> in_path(n, false);

  const auto chordless = [&](const std::vector<std::size_t> &cycle) {
    for (std::size_t a = 0; a < cycle.size(); ++a) {
      for (std::size_t b = a + 2; b < cycle.size(); ++b) {
        if (a == 0 && b == cycle.size() - 1) continue;
        if (g.find_bond(cycle[a], cycle[b])) return false;
      }
    }
    return true;
  };

  std::function<void(std::size_t, std::size_t)> extend =
      [&](std::size_t start, std::size_t v) {
        for (std::size_t w : adj[v]) {
          if (w == start && path.size() >= 3) {
            if (path[1] < path.back() && chordless(path)) rings.push_back(path);
            continue;
          }
          if (w <= start || in_path[w] || path.size() >= 8) continue;
          path.push_back(w);
          in_path[w] = true;
          extend(start, w);
          in_path[w] = false;
          path.pop_back();
        }
      };

  for (std::size_t start = 0; start < n; ++start) {
    path = {start};
    in_path.assign(n, false);
    in_path[start] = true;
    extend(start, start);
  }
  std::sort(rings.begin(), rings.end(),
            [](const auto &a, const auto &b) {
              if (a.size() != b.size()) return a.size() < b.size();
              return a < b;
            });
  return rings;
}

// Pi-electron contribution of a ring atom, or -1 when the atom disqualifies
// the ring: 1 per three-coordinate carbon, 1 per two-coordinate nitrogen,
// 2 per three-coordinate nitrogen (the N-H/N-R lone pair joins the system),
// 2 per two-coordinate oxygen/sulfur.
int pi_contribution(const MolecularGraph &g, std::size_t atom) {
  const std::size_t deg = g.degree(atom);
  switch (g.atoms[atom]) {
    case Element::C:
      return deg == 3 ? 1 : -1;
    case Element::N:
      if (deg == 2) return 1;
      if (deg == 3) return 2;
      return -1;
    case Element::O:
    case Element::S:
      return deg == 2 ? 2 : -1;
    default:
      return -1;
  }
}

// Exact cover of the pi-1 atoms by disjoint candidate edges.
bool kekule_match(const std::vector<std::size_t> &targets,
                  const std::vector<std::pair<std::size_t, std::size_t>> &edges,
                  std::set<std::size_t> &covered,
                  std::vector<std::pair<std::size_t, std::size_t>> &chosen) {
  std::size_t next = 0;
  while (next < targets.size() && covered.count(targets[next])) ++next;
  if (next == targets.size()) return true;
  const std::size_t atom = targets[next];
  for (const auto &e : edges) {
    if (e.first != atom && e.second != atom) continue;
    if (covered.count(e.first) || covered.count(e.second)) continue;
    covered.insert(e.first);
    covered.insert(e.second);
    chosen.push_back(e);
    if (kekule_match(targets, edges, covered, chosen)) return true;
    chosen.pop_back();
    covered.erase(e.first);
    covered.erase(e.second);
  }
  return false;
}

void assign_aromatic_rings(PerceptionState &s) {
  const auto rings = find_rings(s.g);
  std::set<std::size_t> aromatic_atoms;
  std::set<std::pair<std::size_t, std::size_t>> aromatic_edges;

  for (const auto &ring : rings) {
    int pi = 0;
    bool ok = true;
    for (std::size_t atom : ring) {
      const int c = pi_contribution(s.g, atom);
      if (c < 0) {
        ok = false;
        break;
      }
      pi += c;
    }
    if (!ok || pi % 4 != 2) continue;
    // Only rings still in the single-bond state are assigned here; rings
    // already touched by terminal saturation keep their explicit orders.
    for (std::size_t k = 0; k < ring.size() && ok; ++k) {
      const Bond *b = s.g.find_bond(ring[k], ring[(k + 1) % ring.size()]);
      if (!b || b->order != 1) ok = false;
    }
    if (!ok) continue;
    for (std::size_t k = 0; k < ring.size(); ++k) {
      const std::size_t a = ring[k], b = ring[(k + 1) % ring.size()];
      aromatic_atoms.insert(a);
      aromatic_atoms.insert(b);
      aromatic_edges.insert({std::min(a, b), std::max(a, b)});
    }
  }
  if (aromatic_atoms.empty()) return;

  std::vector<std::size_t> pi1_atoms;
  for (std::size_t atom : aromatic_atoms) {
    if (pi_contribution(s.g, atom) == 1) pi1_atoms.push_back(atom);
  }
  std::vector<std::pair<std::size_t, std::size_t>> candidate_edges;
  for (const auto &e : aromatic_edges) {
    if (pi_contribution(s.g, e.first) == 1 &&
        pi_contribution(s.g, e.second) == 1) {
      candidate_edges.push_back(e);
    }
  }
  std::set<std::size_t> covered;
  std::vector<std::pair<std::size_t, std::size_t>> chosen;
  if (!kekule_match(pi1_atoms, candidate_edges, covered, chosen)) return;

  for (const auto &e : aromatic_edges) {
    s.g.find_bond(e.first, e.second)->aromatic = true;
  }
  for (const auto &e : chosen) {
    s.g.find_bond(e.first, e.second)->order = 2;
  }
}

void assign_cn_multiple_bonds(PerceptionState &s) {
  const auto hypervalent_capable = [](Element e) {
    return e == Element::S || e == Element::P || e == Element::Se ||
           e == Element::As;
  };
  for (int guard = 0; guard < 64; ++guard) {
    // Carbons and nitrogens still short of their valence, most unsaturated
    // first; ties resolved by atom index.
    std::vector<std::size_t> pending;
    for (std::size_t i = 0; i < s.g.atoms.size(); ++i) {
      if ((s.elem(i) == Element::C || s.elem(i) == Element::N) &&
          s.deficit(i) > 0) {
        pending.push_back(i);
      }
    }
    std::sort(pending.begin(), pending.end(),
              [&s](std::size_t a, std::size_t b) {
                const int da = s.deficit(a), db = s.deficit(b);
                if (da != db) return da > db;
                return a < b;
              });
    bool acted = false;
    for (std::size_t i : pending) {
      Bond *best = nullptr;
      int best_deficit = -1;
      double best_len = 0.0;
      bool best_is_expansion = false;
      for (Bond &b : s.g.bonds) {
        if (b.i != i && b.j != i) continue;
        if (b.aromatic || b.order >= 3) continue;
        const std::size_t other = b.i == i ? b.j : b.i;
        const int d = s.deficit(other);
        const double len = s.bond_length_pm(b);
        if (d > 0) {
          // Unsaturated partner: rank by partner unsaturation, then by
          // shorter bond, then by lower partner index.
          const bool better =
              !best || best_is_expansion || d > best_deficit ||
              (d == best_deficit && len < best_len - 1e-9);
          if (better) {
            best = &b;
            best_deficit = d;
            best_len = len;
            best_is_expansion = false;
          }
        } else if (hypervalent_capable(s.elem(other)) && s.can_accept(other)) {
          // Fallback: a saturated S/P/Se/As partner whose valence may
          // legally expand to its next allowed state.
          const bool better = !best || (best_is_expansion && len < best_len - 1e-9);
          if (better && (!best || best_is_expansion)) {
            best = &b;
            best_len = len;
            best_is_expansion = true;
          }
        }
      }
      if (best) {
        ++best->order;
        acted = true;
        break;
      }
    }
    if (!acted) return;
  }
}

void refine_bond_orders(PerceptionState &s) {
  for (int guard = 0; guard < 64; ++guard) {
    bool acted = false;
    for (std::size_t i = 0; i < s.g.atoms.size(); ++i) {
      if (s.deficit(i) == 0) continue;
      Bond *best = nullptr;
      bool best_partner_deficient = false;
      double best_len = 0.0;
      for (Bond &b : s.g.bonds) {
        if (b.i != i && b.j != i) continue;
        if (b.aromatic || b.order >= 3) continue;
        const std::size_t other = b.i == i ? b.j : b.i;
        if (!s.can_accept(other)) continue;
        const bool partner_deficient = s.deficit(other) > 0;
        const double len = s.bond_length_pm(b);
        const bool better =
            !best || (partner_deficient && !best_partner_deficient) ||
            (partner_deficient == best_partner_deficient &&
             len < best_len - 1e-9);
        if (better) {
          best = &b;
          best_partner_deficient = partner_deficient;
          best_len = len;
        }
      }
      if (best) {
        ++best->order;
        acted = true;
        break;
      }
    }
    if (!acted) return;
  }
}

std::size_t count_violations(const PerceptionState &s) {
  std::size_t n = 0;
  for (std::size_t i = 0; i < s.g.atoms.size(); ++i) {
    if (!s.valences.is_allowed(s.elem(i), s.total(i))) ++n;
  }
  return n;
}

double reference_length(const PerceptionState &s, const Bond &b) {
  const Element ea = s.elem(b.i), eb = s.elem(b.j);
  if (b.aromatic) return s.lengths.aromatic_length(ea, eb);
  if (s.lengths.has(ea, eb, b.order)) return s.lengths.length(ea, eb, b.order);
  return s.lengths.length(ea, eb, 1);
}

}  // namespace

PerceptionResult perceive_bonds(const Geometry &geom, double delta_pm,
                                const BondLengthTable &lengths,
                                const ValenceTable &valences) {
  if (geom.size() == 0) throw Error("perceive_bonds: empty geometry");
  std::set<std::pair<std::size_t, std::size_t>> removed;
  std::optional<MolecularGraph> best;
  std::size_t best_violations = static_cast<std::size_t>(-1);
  int attempt = 0;

  while (attempt < kMaxPerceptionAttempts) {
    ++attempt;
    PerceptionState s{geom, lengths, valences,
                      initial_adjacency(geom, delta_pm, lengths)};
    std::erase_if(s.g.bonds, [&removed](const Bond &b) {
      return removed.count({b.i, b.j}) > 0;
    });

    saturate_terminal_atoms(s);
    assign_aromatic_rings(s);
    assign_cn_multiple_bonds(s);
    refine_bond_orders(s);

    const std::size_t violations = count_violations(s);
    if (violations == 0) {
      return PerceptionResult{std::move(s.g), true, attempt, ""};
    }
    if (violations < best_violations) {
      best_violations = violations;
      best = s.g;
    }

    // Drop the bond straying furthest beyond its reference length and try
    // again; give up when nothing deviates more than the cutoff.
    const Bond *worst = nullptr;
    double worst_dev = kMaxBondDeviationPm;
    for (const Bond &b : s.g.bonds) {
      const double dev =
          std::abs(s.bond_length_pm(b) - reference_length(s, b));
      if (dev > worst_dev) {
        worst_dev = dev;
        worst = &b;
      }
    }
    if (!worst) break;
    removed.insert({worst->i, worst->j});
  }

  PerceptionResult result;
  result.graph = best ? std::move(*best) : MolecularGraph{geom.elements, {}};
  result.resolved = false;
  result.attempts = attempt;
  result.note = "unresolved after " + std::to_string(attempt) +
                " attempts; " + std::to_string(best_violations) +
                " valence violations remain";
  return result;
}

bool check_connectivity(const MolecularGraph &graph) {
  const std::size_t n = graph.atoms.size();
  if (n == 0) return false;
  const auto adj = graph.adjacency();
  std::vector<bool> seen(n, false);
  std::vector<std::size_t> queue = {0};
  seen[0] = true;
  std::size_t visited = 1;
  while (!queue.empty()) {
    const std::size_t v = queue.back();
    queue.pop_back();
    for (std::size_t w : adj[v]) {
      if (!seen[w]) {
        seen[w] = true;
        ++visited;
        queue.push_back(w);
      }
    }
  }
  return visited == n;
}

bool check_validity(const MolecularGraph &graph, const ValenceTable &valences) {
  for (std::size_t i = 0; i < graph.atoms.size(); ++i) {
    if (graph.total_order(i) > valences.max_allowed(graph.atoms[i])) {
      return false;
    }
  }
  return check_connectivity(graph);
}

bool check_stability(const MolecularGraph &graph,
                     const ValenceTable &valences) {
  for (std::size_t i = 0; i < graph.atoms.size(); ++i) {
    if (!valences.is_allowed(graph.atoms[i], graph.total_order(i))) {
      return false;
    }
  }
  return true;
}

std::string ScreenReport::to_csv() const {
  std::ostringstream os;
  os << "id,consistent,reason\n";
  for (const ScreenRow &row : rows) {
    os << row.id << "," << (row.consistent ? "true" : "false") << ","
       << row.reason << "\n";
  }
  return os.str();
}

ScreenReport screen_dataset(
    const std::vector<ScreenInput> &records,
    const std::function<std::string(const MolecularGraph &)> &graph_key,
    double delta_pm) {
  ScreenReport report;
  for (const ScreenInput &rec : records) {
    ScreenRow row;
    row.id = rec.id;
    try {
      const PerceptionResult perceived = perceive_bonds(rec.geom, delta_pm);
      if (!perceived.resolved) {
        row.consistent = false;
        row.reason = "perception unresolved";
      } else if (graph_key(perceived.graph) == rec.reference_key) {
        row.consistent = true;
      } else {
        row.consistent = false;
        row.reason = "graph key mismatch";
      }
    } catch (const Error &e) {
      row.consistent = false;
      row.reason = std::string("perception error: ") + e.what();
    }
    if (row.consistent) {
      ++report.consistent_count;
    } else {
      ++report.flagged_count;
    }
    report.rows.push_back(std::move(row));
  }
  return report;
}

}  // namespace s2g
