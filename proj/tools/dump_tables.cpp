//
// Project S2G - Copyright 2026 S2G Developers.
// SPDX-License-Identifier: Apache-2.0
//
// Regenerates the reference data files under data/ from the built-in
// defaults. Run from the repository root after editing the
// built-ins; the files are the documented, human-reviewable form.
//

#include <cstdio>
#include <fstream>
#include <iostream>

#include "s2g/chem.hpp"
#include "s2g/pattern.hpp"

namespace {

const char *kHeader =
    "# Generated by tools/dump_tables; do not edit by hand.\n";

int dump(const std::string &out_dir) {
  const s2g::ValenceTable valences = s2g::ValenceTable::builtin();
  const s2g::BondLengthTable lengths = s2g::BondLengthTable::builtin();

  {
    std::ofstream out(out_dir + "/tables/valences.tsv");
    if (!out) {
      std::cerr << "cannot open " << out_dir << "/tables/valences.tsv\n";
      return 1;
    }
    out << kHeader << "# element\tallowed valences (comma separated)\n";
    for (int i = 0; i < s2g::kNumElements; ++i) {
      const s2g::Element e = static_cast<s2g::Element>(i);
      out << s2g::element_symbol(e) << '\t';
      const auto &vals = valences.allowed(e);
      for (std::size_t k = 0; k < vals.size(); ++k) {
        if (k > 0) out << ',';
        out << vals[k];
      }
      out << '\n';
    }
  }

  {
    std::ofstream out(out_dir + "/tables/bond_lengths.tsv");
    if (!out) {
      std::cerr << "cannot open " << out_dir << "/tables/bond_lengths.tsv\n";
      return 1;
    }
    out << kHeader << "# element\telement\torder\treference length (pm)\n";
    char buf[32];
    for (const auto &[key, length] : lengths.entries) {
      std::snprintf(buf, sizeof(buf), "%.1f", length);
      out << s2g::element_symbol(static_cast<s2g::Element>(key[0])) << '\t'
          << s2g::element_symbol(static_cast<s2g::Element>(key[1])) << '\t'
          << key[2] << '\t' << buf << '\n';
    }
  }

  {
    std::ofstream out(out_dir + "/functional_groups.tsv");
    if (!out) {
      std::cerr << "cannot open " << out_dir << "/functional_groups.tsv\n";
      return 1;
    }
    out << kHeader << "# group name\tpattern\n";
    for (const auto &group : s2g::builtin_functional_groups().groups) {
      out << group.name << '\t' << group.pattern.text << '\n';
    }
  }
  return 0;
}

}  // namespace

int main(int argc, char **argv) {
  const std::string out_dir = argc > 1 ? argv[1] : "data";
  return dump(out_dir);
}
