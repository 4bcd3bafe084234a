//
// Project S2G - Copyright 2026 S2G Developers.
// SPDX-License-Identifier: Apache-2.0
//

#include "support/fixtures.hpp"

#include <array>
#include <cmath>
#include <numbers>

#include "s2g/error.hpp"
#include "support/geom_builder.hpp"

namespace s2g::testing {

namespace {

constexpr Element H = Element::H;
constexpr Element B = Element::B;
constexpr Element C = Element::C;
constexpr Element N = Element::N;
constexpr Element O = Element::O;
constexpr Element F = Element::F;

Bond sb(std::size_t i, std::size_t j, int order = 1) {
  return Bond{i, j, order, false};
}

Bond ar(std::size_t i, std::size_t j) { return Bond{i, j, 0, true}; }

// Appends three staggered hydrogens bonded to atom `a`, with the angle
// measured against atom `b` and dihedrals against atom `c`.
void methyl(std::vector<ZEntry> &zs, int a, int b, int c, double phi0 = 60.0,
            double r = 1.09, double theta = 110.0) {
  zs.push_back({H, a, b, c, r, theta, phi0});
  zs.push_back({H, a, b, c, r, theta, phi0 + 120.0});
  zs.push_back({H, a, b, c, r, theta, phi0 + 240.0});
}

void bond_methyl(std::vector<Bond> &bonds, std::size_t c_idx,
                 std::size_t h_start) {
  bonds.push_back(sb(c_idx, h_start));
  bonds.push_back(sb(c_idx, h_start + 1));
  bonds.push_back(sb(c_idx, h_start + 2));
}

Fixture water() {
  Fixture f;
  f.id = "water";
  f.geom = build_zmatrix({{O}, {H, 0, -1, -1, 0.958}, {H, 0, 1, -1, 0.958, 104.5}},
                         f.id);
  f.bonds = {sb(0, 1), sb(0, 2)};
  f.modes = {{3756, 0.9}, {3657, 0.6}, {1595, 0.4}};
  return f;
}

Fixture methane() {
  Fixture f;
  f.id = "methane";
  f.geom.comment = f.id;
  f.geom.elements = {C, H, H, H, H};
  const double t = 1.09 / std::sqrt(3.0);
  f.geom.coords = {{0, 0, 0}, {t, t, t}, {t, -t, -t}, {-t, t, -t}, {-t, -t, t}};
  f.bonds = {sb(0, 1), sb(0, 2), sb(0, 3), sb(0, 4)};
  f.modes = {{3019, 0.5}, {2917, 0.6}, {1306, 0.35}};
  return f;
}

Fixture ethane() {
  Fixture f;
  f.id = "ethane";
  std::vector<ZEntry> zs = {{C}, {C, 0, -1, -1, 1.536}};
  methyl(zs, 0, 1, -1, 60.0, 1.091, 111.2);
  methyl(zs, 1, 0, 2, 60.0, 1.091, 111.2);
  f.geom = build_zmatrix(zs, f.id);
  f.bonds = {sb(0, 1)};
  bond_methyl(f.bonds, 0, 2);
  bond_methyl(f.bonds, 1, 5);
  f.groups = {"alkane"};
  f.modes = {{2954, 0.8}, {2896, 0.55}, {1468, 0.35}, {995, 0.2}, {822, 0.1}};
  return f;
}

Fixture propane() {
  Fixture f;
  f.id = "propane";
  std::vector<ZEntry> zs = {
      {C}, {C, 0, -1, -1, 1.532}, {C, 1, 0, -1, 1.532, 112.0}};
  methyl(zs, 0, 1, 2, 60.0, 1.091, 109.6);
  methyl(zs, 2, 1, 0, 60.0, 1.091, 109.6);
  zs.push_back({H, 1, 0, 2, 1.096, 109.3, 120.0});
  zs.push_back({H, 1, 0, 2, 1.096, 109.3, 240.0});
  f.geom = build_zmatrix(zs, f.id);
  f.bonds = {sb(0, 1), sb(1, 2)};
  bond_methyl(f.bonds, 0, 3);
  bond_methyl(f.bonds, 2, 6);
  f.bonds.push_back(sb(1, 9));
  f.bonds.push_back(sb(1, 10));
  f.groups = {"alkane"};
  f.modes = {{2962, 0.8}, {2887, 0.5}, {1464, 0.4},
             {1157, 0.18}, {869, 0.12}, {748, 0.08}};
  return f;
}

Fixture isobutane() {
  Fixture f;
  f.id = "isobutane";
  std::vector<ZEntry> zs = {{C},
                            {C, 0, -1, -1, 1.535},
                            {C, 0, 1, -1, 1.535, 110.8},
                            {C, 0, 1, 2, 1.535, 110.8, 120.0},
                            {H, 0, 1, 2, 1.098, 108.1, 240.0}};
  methyl(zs, 1, 0, 2);
  methyl(zs, 2, 0, 1);
  methyl(zs, 3, 0, 1);
  f.geom = build_zmatrix(zs, f.id);
  f.bonds = {sb(0, 1), sb(0, 2), sb(0, 3), sb(0, 4)};
  bond_methyl(f.bonds, 1, 5);
  bond_methyl(f.bonds, 2, 8);
  bond_methyl(f.bonds, 3, 11);
  f.groups = {"alkane"};
  f.modes = {{2958, 0.85}, {2894, 0.5}, {1477, 0.4}, {1177, 0.2}, {797, 0.1}};
  return f;
}

Fixture cyclopropane() {
  Fixture f;
  f.id = "cyclopropane";
  f.geom.comment = f.id;
  const double radius = 1.51 / std::sqrt(3.0);
  const double beta = 57.5 * std::numbers::pi / 180.0;
  for (int k = 0; k < 3; ++k) {
    const double ang = (90.0 + 120.0 * k) * std::numbers::pi / 180.0;
    f.geom.elements.push_back(C);
    f.geom.coords.push_back({radius * std::cos(ang), radius * std::sin(ang), 0});
  }
  for (int k = 0; k < 3; ++k) {
    const double ang = (90.0 + 120.0 * k) * std::numbers::pi / 180.0;
    for (double zsign : {1.0, -1.0}) {
      f.geom.elements.push_back(H);
      f.geom.coords.push_back(
          {f.geom.coords[k][0] + 1.09 * std::cos(beta) * std::cos(ang),
           f.geom.coords[k][1] + 1.09 * std::cos(beta) * std::sin(ang),
           zsign * 1.09 * std::sin(beta)});
    }
  }
  f.bonds = {sb(0, 1), sb(0, 2), sb(1, 2), sb(0, 3), sb(0, 4),
             sb(1, 5), sb(1, 6), sb(2, 7), sb(2, 8)};
  f.groups = {"alkane", "cyclopropane"};
  f.modes = {{3103, 0.3}, {3038, 0.6}, {1438, 0.3}, {1188, 0.25}, {866, 0.45}};
  return f;
}

Fixture ethene() {
  Fixture f;
  f.id = "ethene";
  f.geom = build_zmatrix({{C},
                          {C, 0, -1, -1, 1.331},
                          {H, 0, 1, -1, 1.086, 121.3},
                          {H, 0, 1, 2, 1.086, 121.3, 180.0},
                          {H, 1, 0, 2, 1.086, 121.3, 0.0},
                          {H, 1, 0, 2, 1.086, 121.3, 180.0}},
                         f.id);
  f.bonds = {sb(0, 1, 2), sb(0, 2), sb(0, 3), sb(1, 4), sb(1, 5)};
  f.groups = {"alkene"};
  f.modes = {{3106, 0.3}, {3026, 0.4}, {1623, 0.45}, {1444, 0.3}, {949, 0.6}};
  return f;
}

Fixture propene() {
  Fixture f;
  f.id = "propene";
  std::vector<ZEntry> zs = {{C},
                            {C, 0, -1, -1, 1.501},
                            {C, 1, 0, -1, 1.331, 124.3},
                            {H, 1, 2, 0, 1.090, 119.0, 180.0},
                            {H, 2, 1, 0, 1.086, 121.0, 0.0},
                            {H, 2, 1, 0, 1.086, 121.0, 180.0}};
  methyl(zs, 0, 1, 2, 0.0);
  f.geom = build_zmatrix(zs, f.id);
  f.bonds = {sb(0, 1), sb(1, 2, 2), sb(1, 3), sb(2, 4), sb(2, 5)};
  bond_methyl(f.bonds, 0, 6);
  f.groups = {"alkane", "alkene"};
  f.modes = {{3090, 0.3}, {2953, 0.6}, {1652, 0.5}, {1458, 0.35}, {912, 0.55}};
  return f;
}

Fixture ethyne() {
  Fixture f;
  f.id = "ethyne";
  f.geom.comment = f.id;
  f.geom.elements = {C, C, H, H};
  f.geom.coords = {{0, 0, 0}, {1.203, 0, 0}, {-1.060, 0, 0}, {2.263, 0, 0}};
  f.bonds = {sb(0, 1, 3), sb(0, 2), sb(1, 3)};
  f.groups = {"alkyne"};
  f.modes = {{3374, 0.5}, {3289, 0.6}, {1974, 0.25}, {729, 0.7}};
  return f;
}

Fixture propyne() {
  Fixture f;
  f.id = "propyne";
  f.geom.comment = f.id;
  f.geom.elements = {C, C, C, H};
  f.geom.coords = {{0, 0, 0}, {1.459, 0, 0}, {2.662, 0, 0}, {3.722, 0, 0}};
  add_axial_hydrogens(f.geom, 0, 1, 3, 1.09, 110.0);
  f.bonds = {sb(0, 1), sb(1, 2, 3), sb(2, 3), sb(0, 4), sb(0, 5), sb(0, 6)};
  f.groups = {"alkane", "alkyne"};
  f.modes = {{3334, 0.55}, {2941, 0.5}, {2142, 0.3}, {1382, 0.3}, {633, 0.5}};
  return f;
}

Fixture cyclobutadiene() {
  Fixture f;
  f.id = "cyclobutadiene";
  f.geom.comment = f.id;
  f.geom.elements = {C, C, C, C, H, H, H, H};
  const std::array<std::array<double, 2>, 4> ring = {
      {{0.0, 0.0}, {1.339, 0.0}, {1.339, 1.566}, {0.0, 1.566}}};
  const std::array<double, 2> center = {0.6695, 0.783};
  for (const auto &p : ring) f.geom.coords.push_back({p[0], p[1], 0.0});
  for (const auto &p : ring) {
    const double dx = p[0] - center[0];
    const double dy = p[1] - center[1];
    const double n = std::hypot(dx, dy);
    f.geom.coords.push_back(
        {p[0] + 1.08 * dx / n, p[1] + 1.08 * dy / n, 0.0});
  }
  f.bonds = {sb(0, 1, 2), sb(1, 2), sb(2, 3, 2), sb(0, 3),
             sb(0, 4), sb(1, 5), sb(2, 6), sb(3, 7)};
  f.groups = {"alkene"};
  f.modes = {{3040, 0.3}, {1526, 0.4}, {1236, 0.3}, {573, 0.5}};
  return f;
}

Fixture butadiene() {
  Fixture f;
  f.id = "butadiene";
  f.geom = build_zmatrix({{C},
                          {C, 0, -1, -1, 1.338},
                          {C, 1, 0, -1, 1.454, 123.5},
                          {C, 2, 1, 0, 1.338, 123.5, 180.0},
                          {H, 0, 1, 2, 1.090, 121.0, 0.0},
                          {H, 0, 1, 2, 1.090, 121.0, 180.0},
                          {H, 1, 2, 3, 1.090, 119.5, 180.0},
                          {H, 2, 1, 0, 1.090, 119.5, 180.0},
                          {H, 3, 2, 1, 1.090, 121.0, 0.0},
                          {H, 3, 2, 1, 1.090, 121.0, 180.0}},
                         f.id);
  f.bonds = {sb(0, 1, 2), sb(1, 2), sb(2, 3, 2), sb(0, 4), sb(0, 5),
             sb(1, 6), sb(2, 7), sb(3, 8), sb(3, 9)};
  f.groups = {"alkene"};
  f.modes = {{3087, 0.3}, {3003, 0.4}, {1643, 0.5}, {1599, 0.3}, {908, 0.6}};
  return f;
}

Fixture hydrogen_cyanide() {
  Fixture f;
  f.id = "hydrogen_cyanide";
  f.geom.comment = f.id;
  f.geom.elements = {C, N, H};
  f.geom.coords = {{0, 0, 0}, {1.156, 0, 0}, {-1.064, 0, 0}};
  f.bonds = {sb(0, 1, 3), sb(0, 2)};
  f.groups = {"nitrile"};
  f.modes = {{3311, 0.6}, {2097, 0.35}, {712, 0.6}};
  return f;
}

Fixture acetonitrile() {
  Fixture f;
  f.id = "acetonitrile";
  std::vector<ZEntry> zs = {
      {C}, {C, 0, -1, -1, 1.458}, {N, 1, 0, -1, 1.157, 179.5}};
  methyl(zs, 0, 1, 2, 0.0, 1.091, 109.8);
  f.geom = build_zmatrix(zs, f.id);
  f.bonds = {sb(0, 1), sb(1, 2, 3)};
  bond_methyl(f.bonds, 0, 3);
  f.groups = {"alkane", "nitrile"};
  f.modes = {{2999, 0.4}, {2942, 0.5}, {2254, 0.45}, {1376, 0.3}, {918, 0.2}};
  return f;
}

Fixture propionitrile() {
  Fixture f;
  f.id = "propionitrile";
  std::vector<ZEntry> zs = {{C},
                            {C, 0, -1, -1, 1.532},
                            {C, 1, 0, -1, 1.459, 111.8},
                            {N, 2, 1, 0, 1.157, 179.0, 0.0}};
  methyl(zs, 0, 1, 2);
  zs.push_back({H, 1, 0, 2, 1.093, 109.5, 120.0});
  zs.push_back({H, 1, 0, 2, 1.093, 109.5, 240.0});
  f.geom = build_zmatrix(zs, f.id);
  f.bonds = {sb(0, 1), sb(1, 2), sb(2, 3, 3)};
  bond_methyl(f.bonds, 0, 4);
  f.bonds.push_back(sb(1, 7));
  f.bonds.push_back(sb(1, 8));
  f.groups = {"alkane", "nitrile"};
  f.modes = {{2995, 0.5}, {2946, 0.45}, {2249, 0.4},
             {1431, 0.3}, {1077, 0.15}, {545, 0.2}};
  return f;
}

Fixture methylamine() {
  Fixture f;
  f.id = "methylamine";
  std::vector<ZEntry> zs = {{C},
                            {N, 0, -1, -1, 1.471},
                            {H, 1, 0, -1, 1.010, 110.3},
                            {H, 1, 0, 2, 1.010, 110.3, 112.0}};
  methyl(zs, 0, 1, 2, 55.0);
  f.geom = build_zmatrix(zs, f.id);
  f.bonds = {sb(0, 1), sb(1, 2), sb(1, 3)};
  bond_methyl(f.bonds, 0, 4);
  f.groups = {"alkane", "amine"};
  f.modes = {{3411, 0.4}, {3360, 0.35}, {2961, 0.6},
             {2820, 0.5}, {1623, 0.4}, {1044, 0.5}, {780, 0.3}};
  return f;
}

Fixture dimethylamine() {
  Fixture f;
  f.id = "dimethylamine";
  std::vector<ZEntry> zs = {{N},
                            {C, 0, -1, -1, 1.462},
                            {C, 0, 1, -1, 1.462, 112.2},
                            {H, 0, 1, 2, 1.010, 108.9, 125.0}};
  methyl(zs, 1, 0, 2);
  methyl(zs, 2, 0, 1);
  f.geom = build_zmatrix(zs, f.id);
  f.bonds = {sb(0, 1), sb(0, 2), sb(0, 3)};
  bond_methyl(f.bonds, 1, 4);
  bond_methyl(f.bonds, 2, 7);
  f.groups = {"alkane", "amine"};
  f.modes = {{3374, 0.3}, {2959, 0.6}, {2794, 0.5},
             {1466, 0.4}, {1152, 0.3}, {735, 0.25}};
  return f;
}

Fixture trimethylamine() {
  Fixture f;
  f.id = "trimethylamine";
  std::vector<ZEntry> zs = {{N},
                            {C, 0, -1, -1, 1.451},
                            {C, 0, 1, -1, 1.451, 110.9},
                            {C, 0, 1, 2, 1.451, 110.9, 118.0}};
  methyl(zs, 1, 0, 2);
  methyl(zs, 2, 0, 1);
  methyl(zs, 3, 0, 1);
  f.geom = build_zmatrix(zs, f.id);
  f.bonds = {sb(0, 1), sb(0, 2), sb(0, 3)};
  bond_methyl(f.bonds, 1, 4);
  bond_methyl(f.bonds, 2, 7);
  bond_methyl(f.bonds, 3, 10);
  f.groups = {"alkane", "amine"};
  f.modes = {{2953, 0.65}, {2776, 0.5}, {1459, 0.4}, {1043, 0.3}, {826, 0.3}};
  return f;
}

Fixture methanimine() {
  Fixture f;
  f.id = "methanimine";
  f.geom = build_zmatrix({{C},
                          {N, 0, -1, -1, 1.273},
                          {H, 1, 0, -1, 1.021, 110.4},
                          {H, 0, 1, 2, 1.090, 119.0, 0.0},
                          {H, 0, 1, 2, 1.090, 125.0, 180.0}},
                         f.id);
  f.bonds = {sb(0, 1, 2), sb(1, 2), sb(0, 3), sb(0, 4)};
  f.groups = {"imine"};
  f.modes = {{3263, 0.35}, {3024, 0.3}, {1638, 0.5}, {1452, 0.3}, {1058, 0.25}};
  return f;
}

Fixture methanol() {
  Fixture f;
  f.id = "methanol";
  f.geom = build_zmatrix({{C},
                          {O, 0, -1, -1, 1.427},
                          {H, 1, 0, -1, 0.956, 108.9},
                          {H, 0, 1, 2, 1.091, 109.0, 180.0},
                          {H, 0, 1, 2, 1.094, 110.7, 61.5},
                          {H, 0, 1, 2, 1.094, 110.7, 298.5}},
                         f.id);
  f.bonds = {sb(0, 1), sb(1, 2), sb(0, 3), sb(0, 4), sb(0, 5)};
  f.groups = {"alkane", "alcohol"};
  f.modes = {{3681, 0.6}, {2977, 0.5}, {2844, 0.5}, {1455, 0.35}, {1033, 0.7}};
  return f;
}

Fixture ethanol() {
  Fixture f;
  f.id = "ethanol";
  std::vector<ZEntry> zs = {{C},
                            {C, 0, -1, -1, 1.512},
                            {O, 1, 0, -1, 1.431, 107.8},
                            {H, 2, 1, 0, 0.956, 108.5, 180.0},
                            {H, 1, 0, 2, 1.098, 110.0, 120.0},
                            {H, 1, 0, 2, 1.098, 110.0, 240.0}};
  methyl(zs, 0, 1, 2);
  f.geom = build_zmatrix(zs, f.id);
  f.bonds = {sb(0, 1), sb(1, 2), sb(2, 3), sb(1, 4), sb(1, 5)};
  bond_methyl(f.bonds, 0, 6);
  f.groups = {"alkane", "alcohol"};
  f.modes = {{3660, 0.55}, {2972, 0.6}, {2887, 0.5}, {1450, 0.3},
             {1241, 0.2},  {1052, 0.65}, {880, 0.3}};
  return f;
}

Fixture isopropanol() {
  Fixture f;
  f.id = "isopropanol";
  std::vector<ZEntry> zs = {{C},
                            {O, 0, -1, -1, 1.432},
                            {C, 0, 1, -1, 1.523, 109.4},
                            {C, 0, 1, 2, 1.523, 110.1, 121.0},
                            {H, 1, 0, 2, 0.956, 108.5, 180.0},
                            {H, 0, 1, 2, 1.100, 108.9, 242.0}};
  methyl(zs, 2, 0, 1);
  methyl(zs, 3, 0, 1);
  f.geom = build_zmatrix(zs, f.id);
  f.bonds = {sb(0, 1), sb(0, 2), sb(0, 3), sb(1, 4), sb(0, 5)};
  bond_methyl(f.bonds, 2, 6);
  bond_methyl(f.bonds, 3, 9);
  f.groups = {"alkane", "alcohol"};
  f.modes = {{3655, 0.5}, {2970, 0.65}, {2884, 0.45}, {1468, 0.35},
             {1252, 0.25}, {952, 0.4},  {817, 0.35}};
  return f;
}

Fixture dimethyl_ether() {
  Fixture f;
  f.id = "dimethyl_ether";
  std::vector<ZEntry> zs = {
      {O}, {C, 0, -1, -1, 1.410}, {C, 0, 1, -1, 1.410, 111.7}};
  methyl(zs, 1, 0, 2, 60.0, 1.09, 110.2);
  methyl(zs, 2, 0, 1, 60.0, 1.09, 110.2);
  f.geom = build_zmatrix(zs, f.id);
  f.bonds = {sb(0, 1), sb(0, 2)};
  bond_methyl(f.bonds, 1, 3);
  bond_methyl(f.bonds, 2, 6);
  f.groups = {"alkane", "ether"};
  f.modes = {{2996, 0.5}, {2817, 0.45}, {1464, 0.35}, {1102, 0.7}, {928, 0.3}};
  return f;
}

Fixture methoxyethane() {
  Fixture f;
  f.id = "methoxyethane";
  std::vector<ZEntry> zs = {{O},
                            {C, 0, -1, -1, 1.410},
                            {C, 0, 1, -1, 1.418, 111.9},
                            {C, 2, 0, 1, 1.515, 109.4, 180.0}};
  methyl(zs, 1, 0, 2);
  zs.push_back({H, 2, 0, 3, 1.095, 109.8, 120.0});
  zs.push_back({H, 2, 0, 3, 1.095, 109.8, 240.0});
  methyl(zs, 3, 2, 0);
  f.geom = build_zmatrix(zs, f.id);
  f.bonds = {sb(0, 1), sb(0, 2), sb(2, 3)};
  bond_methyl(f.bonds, 1, 4);
  f.bonds.push_back(sb(2, 7));
  f.bonds.push_back(sb(2, 8));
  bond_methyl(f.bonds, 3, 9);
  f.groups = {"alkane", "ether"};
  f.modes = {{2977, 0.55}, {2862, 0.5}, {2805, 0.4},
             {1457, 0.35}, {1122, 0.65}, {843, 0.2}};
  return f;
}

Fixture oxirane() {
  Fixture f;
  f.id = "oxirane";
  f.geom.comment = f.id;
  f.geom.elements = {C, C, O, H, H, H, H};
  const double hx = 0.632, hy = 0.483, hz = 0.746;
  f.geom.coords = {{-0.735, 0, 0},
                   {0.735, 0, 0},
                   {0, 1.238, 0},
                   {-0.735 - hx, -hy, hz},
                   {-0.735 - hx, -hy, -hz},
                   {0.735 + hx, -hy, hz},
                   {0.735 + hx, -hy, -hz}};
  f.bonds = {sb(0, 1), sb(0, 2), sb(1, 2), sb(0, 3), sb(0, 4), sb(1, 5),
             sb(1, 6)};
  f.groups = {"alkane", "ether", "epoxide"};
  f.modes = {{3065, 0.4}, {3006, 0.35}, {1490, 0.3}, {1270, 0.5}, {877, 0.6}};
  return f;
}

Fixture formaldehyde() {
  Fixture f;
  f.id = "formaldehyde";
  f.geom = build_zmatrix({{C},
                          {O, 0, -1, -1, 1.205},
                          {H, 0, 1, -1, 1.111, 121.9},
                          {H, 0, 1, 2, 1.111, 121.9, 180.0}},
                         f.id);
  f.bonds = {sb(0, 1, 2), sb(0, 2), sb(0, 3)};
  f.modes = {{2843, 0.5}, {2782, 0.45}, {1746, 0.8}, {1500, 0.3}, {1167, 0.25}};
  return f;
}

Fixture acetaldehyde() {
  Fixture f;
  f.id = "acetaldehyde";
  std::vector<ZEntry> zs = {{C},
                            {C, 0, -1, -1, 1.501},
                            {O, 1, 0, -1, 1.210, 124.1},
                            {H, 1, 2, 0, 1.106, 120.5, 180.0}};
  methyl(zs, 0, 1, 2, 0.0);
  f.geom = build_zmatrix(zs, f.id);
  f.bonds = {sb(0, 1), sb(1, 2, 2), sb(1, 3)};
  bond_methyl(f.bonds, 0, 4);
  f.groups = {"alkane", "aldehyde"};
  f.modes = {{2967, 0.45}, {2842, 0.4}, {2717, 0.35},
             {1743, 0.75}, {1441, 0.3}, {1113, 0.25}};
  return f;
}

Fixture acetone() {
  Fixture f;
  f.id = "acetone";
  std::vector<ZEntry> zs = {{C},
                            {O, 0, -1, -1, 1.213},
                            {C, 0, 1, -1, 1.517, 121.7},
                            {C, 0, 1, 2, 1.517, 121.7, 180.0}};
  methyl(zs, 2, 0, 1, 0.0);
  methyl(zs, 3, 0, 1, 0.0);
  f.geom = build_zmatrix(zs, f.id);
  f.bonds = {sb(0, 1, 2), sb(0, 2), sb(0, 3)};
  bond_methyl(f.bonds, 2, 4);
  bond_methyl(f.bonds, 3, 7);
  f.groups = {"alkane", "ketone"};
  f.modes = {{3005, 0.35}, {2937, 0.4}, {1731, 0.85},
             {1435, 0.4},  {1222, 0.45}, {787, 0.2}};
  return f;
}

Fixture formic_acid() {
  Fixture f;
  f.id = "formic_acid";
  f.geom = build_zmatrix({{C},
                          {O, 0, -1, -1, 1.202},
                          {O, 0, 1, -1, 1.343, 124.9},
                          {H, 2, 0, 1, 0.972, 106.3, 0.0},
                          {H, 0, 1, 2, 1.097, 124.1, 180.0}},
                         f.id);
  f.bonds = {sb(0, 1, 2), sb(0, 2), sb(2, 3), sb(0, 4)};
  f.groups = {"aldehyde"};
  f.modes = {{3570, 0.5}, {2943, 0.3}, {1770, 0.8},
             {1387, 0.3}, {1229, 0.45}, {625, 0.3}};
  return f;
}

Fixture methyl_formate() {
  Fixture f;
  f.id = "methyl_formate";
  std::vector<ZEntry> zs = {{C},
                            {O, 0, -1, -1, 1.200},
                            {O, 0, 1, -1, 1.334, 125.9},
                            {C, 2, 0, 1, 1.437, 114.8, 0.0},
                            {H, 0, 1, 2, 1.101, 123.8, 180.0}};
  methyl(zs, 3, 2, 0, 60.0, 1.09, 110.5);
  f.geom = build_zmatrix(zs, f.id);
  f.bonds = {sb(0, 1, 2), sb(0, 2), sb(2, 3), sb(0, 4)};
  bond_methyl(f.bonds, 3, 5);
  f.groups = {"alkane", "ester"};
  f.modes = {{2969, 0.4}, {1754, 0.85}, {1454, 0.3}, {1207, 0.6}, {925, 0.25}};
  return f;
}

Fixture methyl_acetate() {
  Fixture f;
  f.id = "methyl_acetate";
  std::vector<ZEntry> zs = {{C},
                            {C, 0, -1, -1, 1.502},
                            {O, 1, 0, -1, 1.206, 125.9},
                            {O, 1, 2, 0, 1.344, 123.0, 180.0},
                            {C, 3, 1, 2, 1.437, 116.4, 0.0}};
  methyl(zs, 0, 1, 2, 0.0);
  methyl(zs, 4, 3, 1, 60.0, 1.09, 110.5);
  f.geom = build_zmatrix(zs, f.id);
  f.bonds = {sb(0, 1), sb(1, 2, 2), sb(1, 3), sb(3, 4)};
  bond_methyl(f.bonds, 0, 5);
  bond_methyl(f.bonds, 4, 8);
  f.groups = {"alkane", "ester"};
  f.modes = {{2966, 0.4}, {1752, 0.8}, {1445, 0.35},
             {1246, 0.6}, {1052, 0.3}, {844, 0.2}};
  return f;
}

Fixture formamide() {
  Fixture f;
  f.id = "formamide";
  f.geom = build_zmatrix({{C},
                          {O, 0, -1, -1, 1.219},
                          {N, 0, 1, -1, 1.366, 124.7},
                          {H, 0, 1, 2, 1.105, 112.7, 180.0},
                          {H, 2, 0, 1, 1.002, 118.5, 0.0},
                          {H, 2, 0, 1, 1.002, 119.9, 180.0}},
                         f.id);
  f.bonds = {sb(0, 1, 2), sb(0, 2), sb(0, 3), sb(2, 4), sb(2, 5)};
  f.groups = {"amide"};
  f.modes = {{3545, 0.4}, {3451, 0.35}, {2852, 0.3},
             {1740, 0.7}, {1577, 0.45}, {1255, 0.3}};
  return f;
}

Fixture acetamide() {
  Fixture f;
  f.id = "acetamide";
  std::vector<ZEntry> zs = {{C},
                            {C, 0, -1, -1, 1.519},
                            {O, 1, 0, -1, 1.220, 121.9},
                            {N, 1, 2, 0, 1.380, 122.7, 180.0}};
  methyl(zs, 0, 1, 2, 0.0);
  zs.push_back({H, 3, 1, 2, 1.005, 118.9, 0.0});
  zs.push_back({H, 3, 1, 2, 1.005, 120.3, 180.0});
  f.geom = build_zmatrix(zs, f.id);
  f.bonds = {sb(0, 1), sb(1, 2, 2), sb(1, 3)};
  bond_methyl(f.bonds, 0, 4);
  f.bonds.push_back(sb(3, 7));
  f.bonds.push_back(sb(3, 8));
  f.groups = {"alkane", "amide"};
  f.modes = {{3557, 0.4}, {3441, 0.35}, {2944, 0.3}, {1728, 0.7},
             {1588, 0.45}, {1372, 0.3}, {1040, 0.2}};
  return f;
}

Fixture fluoromethane() {
  Fixture f;
  f.id = "fluoromethane";
  std::vector<ZEntry> zs = {{C}, {F, 0, -1, -1, 1.383}};
  methyl(zs, 0, 1, -1, 0.0, 1.09, 108.8);
  f.geom = build_zmatrix(zs, f.id);
  f.bonds = {sb(0, 1)};
  bond_methyl(f.bonds, 0, 2);
  f.groups = {"alkane", "haloalkane"};
  f.modes = {{2998, 0.45}, {2930, 0.4}, {1464, 0.35}, {1049, 0.75}};
  return f;
}

Fixture chloromethane() {
  Fixture f;
  f.id = "chloromethane";
  std::vector<ZEntry> zs = {{C}, {Element::Cl, 0, -1, -1, 1.785}};
  methyl(zs, 0, 1, -1, 0.0, 1.09, 108.6);
  f.geom = build_zmatrix(zs, f.id);
  f.bonds = {sb(0, 1)};
  bond_methyl(f.bonds, 0, 2);
  f.groups = {"alkane"};
  f.modes = {{3042, 0.35}, {2937, 0.4}, {1355, 0.3}, {732, 0.65}};
  return f;
}

Fixture bromomethane() {
  Fixture f;
  f.id = "bromomethane";
  std::vector<ZEntry> zs = {{C}, {Element::Br, 0, -1, -1, 1.934}};
  methyl(zs, 0, 1, -1, 0.0, 1.09, 107.9);
  f.geom = build_zmatrix(zs, f.id);
  f.bonds = {sb(0, 1)};
  bond_methyl(f.bonds, 0, 2);
  f.groups = {"alkane"};
  f.modes = {{3056, 0.3}, {2935, 0.4}, {1306, 0.3}, {611, 0.6}};
  return f;
}

Fixture acetyl_fluoride() {
  Fixture f;
  f.id = "acetyl_fluoride";
  std::vector<ZEntry> zs = {{C},
                            {C, 0, -1, -1, 1.503},
                            {O, 1, 0, -1, 1.185, 128.5},
                            {F, 1, 2, 0, 1.348, 121.0, 180.0}};
  methyl(zs, 0, 1, 2, 0.0, 1.09, 109.8);
  f.geom = build_zmatrix(zs, f.id);
  f.bonds = {sb(0, 1), sb(1, 2, 2), sb(1, 3)};
  bond_methyl(f.bonds, 0, 4);
  f.groups = {"alkane"};
  f.modes = {{3035, 0.3}, {1869, 0.8}, {1430, 0.3}, {1186, 0.5}, {828, 0.3}};
  return f;
}

std::vector<Bond> ring_bonds(std::size_t n) {
  std::vector<Bond> bonds;
  for (std::size_t k = 0; k + 1 < n; ++k) bonds.push_back(ar(k, k + 1));
  bonds.push_back(ar(0, n - 1));
  return bonds;
}

Fixture benzene() {
  Fixture f;
  f.id = "benzene";
  f.geom = make_planar_ring({C, C, C, C, C, C}, 1.39,
                            {true, true, true, true, true, true}, f.id);
  f.bonds = ring_bonds(6);
  for (std::size_t k = 0; k < 6; ++k) f.bonds.push_back(sb(k, 6 + k));
  f.groups = {"arene"};
  f.modes = {{3063, 0.35}, {1604, 0.4}, {1482, 0.45}, {1038, 0.3}, {674, 0.7}};
  return f;
}

Fixture toluene() {
  Fixture f;
  f.id = "toluene";
  f.geom = make_planar_ring({C, C, C, C, C, C}, 1.39,
                            {false, true, true, true, true, true}, f.id);
  const std::size_t me = attach_methyl(f.geom, 0, {1.0, 0.0, 0.0});
  f.bonds = ring_bonds(6);
  for (std::size_t k = 1; k < 6; ++k) f.bonds.push_back(sb(k, 5 + k));
  f.bonds.push_back(sb(0, me));
  bond_methyl(f.bonds, me, me + 1);
  f.groups = {"alkane", "arene"};
  f.modes = {{3029, 0.4}, {2921, 0.45}, {1605, 0.4},
             {1496, 0.5}, {1081, 0.25}, {729, 0.7}};
  return f;
}

Fixture pyridine() {
  Fixture f;
  f.id = "pyridine";
  f.geom = make_planar_ring({N, C, C, C, C, C}, 1.38,
                            {false, true, true, true, true, true}, f.id);
  f.bonds = ring_bonds(6);
  for (std::size_t k = 1; k < 6; ++k) f.bonds.push_back(sb(k, 5 + k));
  f.groups = {"arene"};
  f.modes = {{3070, 0.35}, {1583, 0.5}, {1442, 0.45}, {1069, 0.3}, {701, 0.65}};
  return f;
}

Fixture pyrrole() {
  Fixture f;
  f.id = "pyrrole";
  f.geom = make_planar_ring({N, C, C, C, C}, 1.375,
                            {true, true, true, true, true}, f.id);
  f.bonds = ring_bonds(5);
  for (std::size_t k = 0; k < 5; ++k) f.bonds.push_back(sb(k, 5 + k));
  f.groups = {"arene"};
  f.modes = {{3527, 0.4}, {3125, 0.3}, {1530, 0.4},
             {1468, 0.35}, {1049, 0.3}, {722, 0.6}};
  return f;
}

Fixture furan() {
  Fixture f;
  f.id = "furan";
  f.geom = make_planar_ring({O, C, C, C, C}, 1.37,
                            {false, true, true, true, true}, f.id);
  f.bonds = ring_bonds(5);
  for (std::size_t k = 1; k < 5; ++k) f.bonds.push_back(sb(k, 4 + k));
  f.groups = {"arene"};
  f.modes = {{3156, 0.3}, {1590, 0.35}, {1483, 0.4}, {1058, 0.45}, {744, 0.6}};
  return f;
}

Fixture thiophene() {
  Fixture f;
  f.id = "thiophene";
  f.geom.comment = f.id;
  f.geom.elements = {Element::S, C, C, C, C};
  f.geom.coords = {{0, 1.188, 0},
                   {1.235, 0, 0},
                   {0.7115, -1.266, 0},
                   {-0.7115, -1.266, 0},
                   {-1.235, 0, 0}};
  const std::array<double, 2> centroid = {0.0, -0.2688};
  for (std::size_t k = 1; k < 5; ++k) {
    const double dx = f.geom.coords[k][0] - centroid[0];
    const double dy = f.geom.coords[k][1] - centroid[1];
    const double n = std::hypot(dx, dy);
    f.geom.elements.push_back(H);
    f.geom.coords.push_back({f.geom.coords[k][0] + 1.08 * dx / n,
                             f.geom.coords[k][1] + 1.08 * dy / n, 0.0});
  }
  f.bonds = ring_bonds(5);
  for (std::size_t k = 1; k < 5; ++k) f.bonds.push_back(sb(k, 4 + k));
  f.groups = {"arene"};
  f.modes = {{3110, 0.3}, {1520, 0.35}, {1409, 0.4}, {1036, 0.3}, {712, 0.6}};
  return f;
}

Fixture imidazole() {
  Fixture f;
  f.id = "imidazole";
  f.geom = make_planar_ring({N, C, N, C, C}, 1.36,
                            {true, true, false, true, true}, f.id);
  f.bonds = ring_bonds(5);
  f.bonds.push_back(sb(0, 5));
  f.bonds.push_back(sb(1, 6));
  f.bonds.push_back(sb(3, 7));
  f.bonds.push_back(sb(4, 8));
  f.groups = {"arene", "imidazole"};
  f.modes = {{3518, 0.4}, {3135, 0.3}, {1530, 0.4},
             {1448, 0.35}, {1067, 0.3}, {662, 0.5}};
  return f;
}

Fixture pyrazole() {
  Fixture f;
  f.id = "pyrazole";
  f.geom = make_planar_ring({N, N, C, C, C}, 1.36,
                            {true, false, true, true, true}, f.id);
  f.bonds = ring_bonds(5);
  f.bonds.push_back(sb(0, 5));
  f.bonds.push_back(sb(2, 6));
  f.bonds.push_back(sb(3, 7));
  f.bonds.push_back(sb(4, 8));
  f.groups = {"arene", "pyrazole"};
  f.modes = {{3524, 0.4}, {3140, 0.3}, {1531, 0.4},
             {1394, 0.3}, {1121, 0.25}, {833, 0.4}};
  return f;
}

Fixture oxazole() {
  Fixture f;
  f.id = "oxazole";
  f.geom = make_planar_ring({O, C, N, C, C}, 1.36,
                            {false, true, false, true, true}, f.id);
  f.bonds = ring_bonds(5);
  f.bonds.push_back(sb(1, 5));
  f.bonds.push_back(sb(3, 6));
  f.bonds.push_back(sb(4, 7));
  f.groups = {"arene", "oxazole"};
  f.modes = {{3140, 0.3}, {1537, 0.4}, {1482, 0.35}, {1086, 0.4}, {899, 0.3}};
  return f;
}

Fixture isoxazole() {
  Fixture f;
  f.id = "isoxazole";
  f.geom = make_planar_ring({O, N, C, C, C}, 1.36,
                            {false, false, true, true, true}, f.id);
  f.bonds = ring_bonds(5);
  f.bonds.push_back(sb(2, 5));
  f.bonds.push_back(sb(3, 6));
  f.bonds.push_back(sb(4, 7));
  f.groups = {"arene", "isoxazole"};
  f.modes = {{3130, 0.3}, {1560, 0.4}, {1432, 0.35}, {1021, 0.4}, {763, 0.45}};
  return f;
}

Fixture hydrogen_sulfide() {
  Fixture f;
  f.id = "hydrogen_sulfide";
  f.geom = build_zmatrix(
      {{Element::S}, {H, 0, -1, -1, 1.336}, {H, 0, 1, -1, 1.336, 92.1}}, f.id);
  f.bonds = {sb(0, 1), sb(0, 2)};
  f.modes = {{2628, 0.4}, {2615, 0.35}, {1183, 0.3}};
  return f;
}

Fixture methanethiol() {
  Fixture f;
  f.id = "methanethiol";
  std::vector<ZEntry> zs = {{C},
                            {Element::S, 0, -1, -1, 1.814},
                            {H, 1, 0, -1, 1.336, 96.5}};
  methyl(zs, 0, 1, 2, 180.0, 1.09, 109.8);
  f.geom = build_zmatrix(zs, f.id);
  f.bonds = {sb(0, 1), sb(1, 2)};
  bond_methyl(f.bonds, 0, 3);
  f.groups = {"alkane"};
  f.modes = {{2948, 0.5}, {2869, 0.4}, {2597, 0.35}, {1319, 0.3}, {708, 0.45}};
  return f;
}

Fixture dimethyl_sulfoxide() {
  Fixture f;
  f.id = "dimethyl_sulfoxide";
  std::vector<ZEntry> zs = {{Element::S},
                            {O, 0, -1, -1, 1.498},
                            {C, 0, 1, -1, 1.799, 106.7},
                            {C, 0, 1, 2, 1.799, 106.7, 113.0}};
  methyl(zs, 2, 0, 1);
  methyl(zs, 3, 0, 1);
  f.geom = build_zmatrix(zs, f.id);
  f.bonds = {sb(0, 1, 2), sb(0, 2), sb(0, 3)};
  bond_methyl(f.bonds, 2, 4);
  bond_methyl(f.bonds, 3, 7);
  f.groups = {"alkane"};
  f.modes = {{2996, 0.4}, {2912, 0.35}, {1437, 0.3},
             {1050, 0.75}, {953, 0.3}, {689, 0.4}};
  return f;
}

Fixture dimethyl_sulfone() {
  Fixture f;
  f.id = "dimethyl_sulfone";
  std::vector<ZEntry> zs = {{Element::S},
                            {O, 0, -1, -1, 1.435},
                            {O, 0, 1, -1, 1.435, 119.7},
                            {C, 0, 1, 2, 1.777, 108.3, 117.0},
                            {C, 0, 1, 2, 1.777, 108.3, 243.0}};
  methyl(zs, 3, 0, 1);
  methyl(zs, 4, 0, 1);
  f.geom = build_zmatrix(zs, f.id);
  f.bonds = {sb(0, 1, 2), sb(0, 2, 2), sb(0, 3), sb(0, 4)};
  bond_methyl(f.bonds, 3, 5);
  bond_methyl(f.bonds, 4, 8);
  f.groups = {"alkane"};
  f.modes = {{2987, 0.4}, {2925, 0.35}, {1334, 0.7},
             {1157, 0.65}, {964, 0.3}, {704, 0.35}};
  return f;
}

Fixture phosphine() {
  Fixture f;
  f.id = "phosphine";
  f.geom = build_zmatrix({{Element::P},
                          {H, 0, -1, -1, 1.421},
                          {H, 0, 1, -1, 1.421, 93.5},
                          {H, 0, 1, 2, 1.421, 93.5, 94.6}},
                         f.id);
  f.bonds = {sb(0, 1), sb(0, 2), sb(0, 3)};
  f.modes = {{2327, 0.4}, {2321, 0.35}, {1121, 0.3}, {992, 0.35}};
  return f;
}

Fixture trimethylphosphine_oxide() {
  Fixture f;
  f.id = "trimethylphosphine_oxide";
  std::vector<ZEntry> zs = {{Element::P},
                            {O, 0, -1, -1, 1.489},
                            {C, 0, 1, -1, 1.813, 114.4},
                            {C, 0, 1, 2, 1.813, 114.4, 120.0},
                            {C, 0, 1, 2, 1.813, 114.4, 240.0}};
  methyl(zs, 2, 0, 1);
  methyl(zs, 3, 0, 1);
  methyl(zs, 4, 0, 1);
  f.geom = build_zmatrix(zs, f.id);
  f.bonds = {sb(0, 1, 2), sb(0, 2), sb(0, 3), sb(0, 4)};
  bond_methyl(f.bonds, 2, 5);
  bond_methyl(f.bonds, 3, 8);
  bond_methyl(f.bonds, 4, 11);
  f.groups = {"alkane"};
  f.modes = {{2973, 0.4}, {2906, 0.35}, {1436, 0.3},
             {1157, 0.7}, {945, 0.4}, {756, 0.3}};
  return f;
}

Fixture silane() {
  Fixture f;
  f.id = "silane";
  f.geom.comment = f.id;
  f.geom.elements = {Element::Si, H, H, H, H};
  const double t = 1.480 / std::sqrt(3.0);
  f.geom.coords = {{0, 0, 0}, {t, t, t}, {t, -t, -t}, {-t, t, -t}, {-t, -t, t}};
  f.bonds = {sb(0, 1), sb(0, 2), sb(0, 3), sb(0, 4)};
  f.modes = {{2191, 0.5}, {2187, 0.4}, {914, 0.45}, {879, 0.3}};
  return f;
}

Fixture arsine() {
  Fixture f;
  f.id = "arsine";
  f.geom = build_zmatrix({{Element::As},
                          {H, 0, -1, -1, 1.511},
                          {H, 0, 1, -1, 1.511, 92.1},
                          {H, 0, 1, 2, 1.511, 92.1, 93.2}},
                         f.id);
  f.bonds = {sb(0, 1), sb(0, 2), sb(0, 3)};
  f.modes = {{2122, 0.4}, {2116, 0.35}, {1005, 0.3}, {906, 0.3}};
  return f;
}

Fixture hydrogen_selenide() {
  Fixture f;
  f.id = "hydrogen_selenide";
  f.geom = build_zmatrix(
      {{Element::Se}, {H, 0, -1, -1, 1.460}, {H, 0, 1, -1, 1.460, 90.9}},
      f.id);
  f.bonds = {sb(0, 1), sb(0, 2)};
  f.modes = {{2358, 0.4}, {2345, 0.3}, {1034, 0.25}};
  return f;
}

Fixture trimethylborane() {
  Fixture f;
  f.id = "trimethylborane";
  std::vector<ZEntry> zs = {{B},
                            {C, 0, -1, -1, 1.578},
                            {C, 0, 1, -1, 1.578, 120.0},
                            {C, 0, 1, 2, 1.578, 120.0, 180.0}};
  methyl(zs, 1, 0, 2, 90.0);
  methyl(zs, 2, 0, 1, 90.0);
  methyl(zs, 3, 0, 1, 90.0);
  f.geom = build_zmatrix(zs, f.id);
  f.bonds = {sb(0, 1), sb(0, 2), sb(0, 3)};
  bond_methyl(f.bonds, 1, 4);
  bond_methyl(f.bonds, 2, 7);
  bond_methyl(f.bonds, 3, 10);
  f.groups = {"alkane"};
  f.modes = {{2975, 0.4}, {2910, 0.3}, {1440, 0.3}, {1165, 0.5}, {675, 0.3}};
  return f;
}

Fixture carbon_dioxide() {
  Fixture f;
  f.id = "carbon_dioxide";
  f.geom.comment = f.id;
  f.geom.elements = {C, O, O};
  f.geom.coords = {{0, 0, 0}, {-1.162, 0, 0}, {1.162, 0, 0}};
  f.bonds = {sb(0, 1, 2), sb(0, 2, 2)};
  f.modes = {{2349, 0.7}, {1333, 0.3}, {667, 0.5}};
  return f;
}

std::vector<Fixture> build_corpus() {
  return {water(),
          methane(),
          ethane(),
          propane(),
          isobutane(),
          cyclopropane(),
          ethene(),
          propene(),
          ethyne(),
          propyne(),
          cyclobutadiene(),
          butadiene(),
          hydrogen_cyanide(),
          acetonitrile(),
          propionitrile(),
          methylamine(),
          dimethylamine(),
          trimethylamine(),
          methanimine(),
          methanol(),
          ethanol(),
          isopropanol(),
          dimethyl_ether(),
          methoxyethane(),
          oxirane(),
          formaldehyde(),
          acetaldehyde(),
          acetone(),
          formic_acid(),
          methyl_formate(),
          methyl_acetate(),
          formamide(),
          acetamide(),
          fluoromethane(),
          chloromethane(),
          bromomethane(),
          acetyl_fluoride(),
          benzene(),
          toluene(),
          pyridine(),
          pyrrole(),
          furan(),
          thiophene(),
          imidazole(),
          pyrazole(),
          oxazole(),
          isoxazole(),
          hydrogen_sulfide(),
          methanethiol(),
          dimethyl_sulfoxide(),
          dimethyl_sulfone(),
          phosphine(),
          trimethylphosphine_oxide(),
          silane(),
          arsine(),
          hydrogen_selenide(),
          trimethylborane(),
          carbon_dioxide()};
}

}  // namespace

const std::vector<Fixture> &fixture_corpus() {
  static const std::vector<Fixture> corpus = build_corpus();
  return corpus;
}

const Fixture &fixture(const std::string &id) {
  for (const Fixture &f : fixture_corpus()) {
    if (f.id == id) return f;
  }
  throw Error("unknown fixture: " + id);
}

}  // namespace s2g::testing
