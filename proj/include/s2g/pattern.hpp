//
// Project S2G - Copyright 2026 S2G Developers.
// SPDX-License-Identifier: Apache-2.0
//

#ifndef S2G_PATTERN_HPP_
#define S2G_PATTERN_HPP_

#include <cstddef>
#include <memory>
#include <string>
#include <vector>

#include "s2g/chem.hpp"

namespace s2g {

// Structural query language over molecular graphs. The dialect is the
// SMARTS subset needed for functional-group assignment: element and
// atomic-number primitives, aromatic/aliphatic case, connection and
// hydrogen counts, boolean operators (! > & > , > ;), one level of
// recursive environments $(...), the bond primitives - = # : ~ plus the
// single-or-aromatic default, branches, and ring-closure digits 1-9.

struct Pattern;

struct AtomTest {
  enum class Op { And, Or, Not, Prim };
  enum class Prim {
    Element,        // symbol, case selects aromatic/aliphatic
    AtomicNumber,   // #n, aromaticity unconstrained
    AnyAtom,        // *
    Connections,    // Xn, explicit neighbours of any element
    HydrogenCount,  // Hn, neighbouring hydrogens
    Recursive,      // $(pattern) anchored at this atom
  };

  Op op = Op::Prim;
  std::vector<AtomTest> kids;

  Prim prim = Prim::AnyAtom;
  Element element = Element::C;
  bool require_aromatic = false;
  bool require_aliphatic = false;
  int number = 0;
  std::shared_ptr<const Pattern> env;
};

enum class BondTest {
  Default,   // single or aromatic
  Single,    // order 1, not aromatic
  Double,    // order 2, not aromatic
  Triple,    // order 3, not aromatic
  Aromatic,  // aromatic flag set
  Any,       // ~
};

struct PatternBond {
  std::size_t a = 0;
  std::size_t b = 0;
  BondTest test = BondTest::Default;
};

struct Pattern {
  std::vector<AtomTest> atoms;
  std::vector<PatternBond> bonds;
  std::string text;  // source string the pattern was parsed from
};

// Parses the dialect above. Throws ParseError with the byte offset and
// the offending construct for anything outside it (charges, chirality,
// wildcards D/R/r, '%' closures, nested recursion, ...).
Pattern parse_pattern(const std::string &text);

// Canonical text for a pattern: every atom bracketed, hydrogen counts
// explicit, branches and ring closures regenerated by depth-first
// traversal from atom 0. Normalizing the result is a fixed point.
std::string normalize_pattern(const Pattern &pattern);

// Per-atom match context derived from a perceived graph.
struct MatchContext {
  const MolecularGraph *graph = nullptr;
  std::vector<std::vector<std::size_t>> adjacency;
  std::vector<int> hydrogen_count;
  std::vector<bool> aromatic_atom;  // has at least one aromatic bond

  explicit MatchContext(const MolecularGraph &g);
};

bool eval_atom_test(const AtomTest &test, const MatchContext &ctx, std::size_t atom);
bool eval_bond_test(BondTest test, const Bond &bond);

// All embeddings of the pattern into the graph. An embedding maps
// pattern atom k to match[k]; embeddings that use the same set of graph
// atoms count once, so automorphic re-labellings of one hit collapse.
// Results are sorted by their atom set.
std::vector<std::vector<std::size_t>> match_pattern(const Pattern &pattern,
                                                    const MolecularGraph &graph);
std::vector<std::vector<std::size_t>> match_pattern(const Pattern &pattern,
                                                    const MatchContext &ctx);

bool matches_anywhere(const Pattern &pattern, const MatchContext &ctx);

struct FunctionalGroup {
  std::string name;
  Pattern pattern;
};

struct FunctionalGroupSet {
  std::vector<FunctionalGroup> groups;

  std::size_t size() const { return groups.size(); }
  int index_of(const std::string &name) const;  // -1 when absent
};

// The 20 groups assigned by the pipeline, in label order.
const FunctionalGroupSet &builtin_functional_groups();

// Loads "name<TAB>smarts" rows; '#' comments and blank lines skipped.
FunctionalGroupSet load_functional_groups(const std::string &path);

// Multi-hot labels: y[k] = 1 iff group k has at least one embedding.
std::vector<int> label_functional_groups(const MolecularGraph &graph,
                                         const FunctionalGroupSet &groups);

// Names of the groups present, in label order.
std::vector<std::string> present_group_names(const MolecularGraph &graph,
                                             const FunctionalGroupSet &groups);

}  // namespace s2g

#endif  // S2G_PATTERN_HPP_
