#!/usr/bin/env python3
# Project S2G - Copyright 2026 S2G Developers.
# SPDX-License-Identifier: Apache-2.0
#
# Independent reference for the circular fingerprints in
# src/fingerprint.cpp, kept deliberately separate from the C++ code so the
# two can cross-check each other bit for bit.
#
# Usage:
#   python3 tools/fp_reference.py data/fixtures/graphs.tsv > data/fixtures/fingerprints.txt

import sys

BITS = 2048
RADIUS = 2

ATOMIC_NUMBER = {
    "H": 1, "B": 5, "C": 6, "N": 7, "O": 8, "F": 9, "Si": 14, "P": 15,
    "S": 16, "Cl": 17, "As": 33, "Se": 34, "Br": 35,
}

FNV_OFFSET = 0xCBF29CE484222325
FNV_PRIME = 0x100000001B3
MASK = (1 << 64) - 1


def fnv1a(text):
    h = FNV_OFFSET
    for byte in text.encode("ascii"):
        h = ((h ^ byte) * FNV_PRIME) & MASK
    return h


def parse_graph(line):
    mol_id, elements_field, bonds_field = line.rstrip("\n").split("\t")
    elements = elements_field.split(",")
    bonds = []
    if bonds_field:
        for token in bonds_field.split(";"):
            i, j, order, aromatic = token.split("-")
            bonds.append((int(i), int(j), int(order), int(aromatic)))
    return mol_id, elements, bonds


def fingerprint(elements, bonds):
    heavy = [i for i, e in enumerate(elements) if e != "H"]
    index = {atom: k for k, atom in enumerate(heavy)}
    n = len(heavy)
    h_count = [0] * n
    total_order = [0] * n
    aromatic = [0] * n
    adj = [[] for _ in range(n)]
    for i, j, order, arom in bonds:
        for a, b in ((i, j), (j, i)):
            if a in index:
                total_order[index[a]] += order
                if elements[b] == "H":
                    h_count[index[a]] += 1
        if i in index and j in index:
            label = "a" if arom else str(order)
            adj[index[i]].append((index[j], label))
            adj[index[j]].append((index[i], label))
            if arom:
                aromatic[index[i]] = 1
                aromatic[index[j]] = 1

    inv = [
        fnv1a(
            "%d,%d,%d,%d,%d"
            % (
                ATOMIC_NUMBER[elements[atom]],
                len(adj[k]),
                total_order[k],
                h_count[k],
                aromatic[k],
            )
        )
        for k, atom in enumerate(heavy)
    ]
    bits = set(v % BITS for v in inv)
    for _ in range(RADIUS):
        parts = [sorted("%s:%d" % (label, inv[j]) for j, label in adj[k]) for k in range(n)]
        inv = [fnv1a("%d|%s" % (inv[k], ";".join(parts[k]))) for k in range(n)]
        bits.update(v % BITS for v in inv)
    return sorted(bits)


def main():
    if len(sys.argv) != 2:
        sys.stderr.write("usage: fp_reference.py graphs.tsv\n")
        return 1
    with open(sys.argv[1]) as fh:
        for line in fh:
            if not line.strip() or line.startswith("#"):
                continue
            mol_id, elements, bonds = parse_graph(line)
            bits = fingerprint(elements, bonds)
            sys.stdout.write("%s: %s\n" % (mol_id, " ".join(str(b) for b in bits)))
    return 0


if __name__ == "__main__":
    sys.exit(main())
