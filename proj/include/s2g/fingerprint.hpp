//
// Project S2G - Copyright 2026 S2G Developers.
// SPDX-License-Identifier: Apache-2.0
//

#ifndef S2G_FINGERPRINT_HPP_
#define S2G_FINGERPRINT_HPP_

#include <set>
#include <string>
#include <vector>

#include "s2g/chem.hpp"

namespace s2g {

// Circular (Morgan) fingerprints over heavy atoms, radius 2, folded into
// 2048 bits. Hydrogens are collapsed into per-atom counts first; each
// atom's environment hash is rebuilt per radius from its neighbours'
// previous hashes. Environment hashes run decimal-string tuples through
// the project FNV-1a hash, so an independent implementation in another
// language can reproduce the bit stream exactly.
struct Fingerprint {
  static constexpr int kBits = 2048;
  static constexpr int kRadius = 2;

  std::set<int> bits;
};

Fingerprint morgan_fingerprint(const MolecularGraph &graph);

// |a ∩ b| / |a ∪ b|; two empty sets count as identical (1).
double tanimoto(const Fingerprint &a, const Fingerprint &b);

// sim_g: Tanimoto similarity of the two graphs' fingerprints.
double graph_similarity(const MolecularGraph &a, const MolecularGraph &b);

// Canonical identity string for the labelled graph: heavy atoms reordered
// by iterative neighbourhood refinement with systematic individualization
// of ambiguous colour classes, then serialized as element/H-count tokens
// plus a sorted bond list. Equal strings <=> isomorphic graphs (elements,
// bond orders, aromatic flags, hydrogen counts); coordinates never enter,
// so mirror-image geometries of one molecule share a key.
std::string canonical_key(const MolecularGraph &graph);

// Exact labelled-graph isomorphism by backtracking; the independent check
// behind canonical-key equality.
bool graphs_isomorphic(const MolecularGraph &a, const MolecularGraph &b);

// Canonical keys equal AND an explicit isomorphism exists.
bool same_molecule(const MolecularGraph &a, const MolecularGraph &b);

// Fraction of test cases where at least one sampled graph is the
// reference molecule. Outer lengths must agree.
double molecular_accuracy(const std::vector<std::vector<MolecularGraph>> &samples,
                          const std::vector<MolecularGraph> &references);

}  // namespace s2g

#endif  // S2G_FINGERPRINT_HPP_
