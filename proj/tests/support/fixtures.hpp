//
// Project S2G - Copyright 2026 S2G Developers.
// SPDX-License-Identifier: Apache-2.0
//

#ifndef S2G_TESTS_SUPPORT_FIXTURES_HPP_
#define S2G_TESTS_SUPPORT_FIXTURES_HPP_

#include <string>
#include <vector>

#include "s2g/chem.hpp"
#include "s2g/spectrum.hpp"

namespace s2g::testing {

// A reference molecule with hand-checked geometry, the bond graph that
// perception is expected to recover, its functional-group labels, and a
// stylized vibrational mode list used to synthesize spectra.
//
// Expected bonds use order 0 on aromatic pairs: the Kekulé order placement
// within an aromatic ring is not part of the contract, only the aromatic
// flag and per-atom valence sums are.
struct Fixture {
  std::string id;
  Geometry geom;
  std::vector<Bond> bonds;
  std::vector<std::string> groups;
  ModeList modes;
};

const std::vector<Fixture> &fixture_corpus();
const Fixture &fixture(const std::string &id);

}  // namespace s2g::testing

#endif  // S2G_TESTS_SUPPORT_FIXTURES_HPP_
