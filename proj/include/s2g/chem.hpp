//
// Project S2G - Copyright 2026 S2G Developers.
// SPDX-License-Identifier: Apache-2.0
//

#ifndef S2G_CHEM_HPP_
#define S2G_CHEM_HPP_

#include <array>
#include <cstddef>
#include <functional>
#include <map>
#include <string>
#include <vector>

namespace s2g {

// Supported neutral-molecule element set.
enum class Element : int {
  H = 0,
  B,
  C,
  N,
  O,
  F,
  Si,
  P,
  S,
  Cl,
  As,
  Se,
  Br,
};

constexpr int kNumElements = 13;

Element element_from_symbol(const std::string &symbol);
const char *element_symbol(Element e);
int atomic_number(Element e);
bool is_halogen(Element e);

// Atom positions in Ångström plus element labels. Charges are fixed at
// zero; radicals and ions are out of scope.
struct Geometry {
  std::vector<Element> elements;
  std::vector<std::array<double, 3>> coords;
  std::string comment;

  std::size_t size() const { return elements.size(); }
};

// Interatomic distance in picometres (coordinates are Å; 1 Å = 100 pm).
double distance_pm(const Geometry &geom, std::size_t i, std::size_t j);

struct Bond {
  std::size_t i;  // always < j
  std::size_t j;
  int order = 1;  // Kekulé order 1..3, kept integral for aromatic bonds too
  bool aromatic = false;
};

struct MolecularGraph {
  std::vector<Element> atoms;
  std::vector<Bond> bonds;

  Bond *find_bond(std::size_t i, std::size_t j);
  const Bond *find_bond(std::size_t i, std::size_t j) const;
  void add_bond(std::size_t i, std::size_t j, int order = 1);
  std::vector<std::vector<std::size_t>> adjacency() const;
  int total_order(std::size_t atom) const;
  std::size_t degree(std::size_t atom) const;
};

// Allowed total valences per element (e.g. S may sit at 2, 4 or 6).
class ValenceTable {
 public:
  static const ValenceTable &builtin();
  static ValenceTable load(const std::string &path);

  const std::vector<int> &allowed(Element e) const;
  int max_allowed(Element e) const;
  bool is_allowed(Element e, int total) const;
  // Smallest allowed valence >= total, or -1 when total overshoots all.
  int next_allowed(Element e, int total) const;

  bool operator==(const ValenceTable &) const = default;

 private:
  std::array<std::vector<int>, kNumElements> allowed_;
};

// Reference bond lengths in picometres, keyed by element pair and order.
// Single-bond entries exist for every supported pair; multiple-bond entries
// only where both elements have multiple-bond radii.
class BondLengthTable {
 public:
  static const BondLengthTable &builtin();
  static BondLengthTable load(const std::string &path);

  double length(Element a, Element b, int order) const;  // throws if absent
  bool has(Element a, Element b, int order) const;
  // Reference for a flagged aromatic bond: midpoint of orders 1 and 2.
  double aromatic_length(Element a, Element b) const;

  bool operator==(const BondLengthTable &) const = default;

  std::map<std::array<int, 3>, double> entries;  // {min(e), max(e), order}
};

constexpr double kDefaultDeltaPm = 40.0;  // distance tolerance, small rigid sets
constexpr double kTightDeltaPm = 30.0;    // tolerance for flexible-rich sets
constexpr double kMaxBondDeviationPm = 15.0;
constexpr int kMaxPerceptionAttempts = 10;

Geometry parse_xyz(const std::string &text);
std::string format_xyz(const Geometry &geom);

// Step 1 of perception: single bond between i and j iff
// distance_pm(i,j) < L(e_i, e_j, 1) + delta_pm.
MolecularGraph initial_adjacency(
    const Geometry &geom, double delta_pm,
    const BondLengthTable &lengths = BondLengthTable::builtin());

struct PerceptionResult {
  MolecularGraph graph;
  bool resolved = true;  // false when the restart budget ran out
  int attempts = 1;
  std::string note;
};

// Full valence-guided bond perception: initial adjacency, terminal-atom
// saturation, aromatic-ring detection (4n+2), carbon/nitrogen multiple-bond
// assignment (most unsaturated first, shorter bonds preferred), iterative
// refinement, and worst-deviation bond removal with restart on failure.
PerceptionResult perceive_bonds(
    const Geometry &geom, double delta_pm = kDefaultDeltaPm,
    const BondLengthTable &lengths = BondLengthTable::builtin(),
    const ValenceTable &valences = ValenceTable::builtin());

// True iff no atom exceeds its maximum allowed valence and the graph is
// connected.
bool check_validity(const MolecularGraph &graph,
                    const ValenceTable &valences = ValenceTable::builtin());
// True iff every atom's total bond order is exactly an allowed valence.
bool check_stability(const MolecularGraph &graph,
                     const ValenceTable &valences = ValenceTable::builtin());
bool check_connectivity(const MolecularGraph &graph);

struct ScreenInput {
  std::string id;
  Geometry geom;
  std::string reference_key;
};

struct ScreenRow {
  std::string id;
  bool consistent = false;
  std::string reason;
};

struct ScreenReport {
  std::vector<ScreenRow> rows;
  std::size_t consistent_count = 0;
  std::size_t flagged_count = 0;
  std::string to_csv() const;
};

// Re-perceives every geometry and compares canonical keys against the
// stored reference. The key function is injected so this module stays
// independent of the fingerprint/canonicalization code.
ScreenReport screen_dataset(
    const std::vector<ScreenInput> &records,
    const std::function<std::string(const MolecularGraph &)> &graph_key,
    double delta_pm = kDefaultDeltaPm);

}  // namespace s2g

#endif  // S2G_CHEM_HPP_
