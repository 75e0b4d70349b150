"""Topological polar surface area (Ertl fragment contributions).

Each N/O (and, via the published extension, S/P) atom contributes a fixed
area in Å² determined by its bonding pattern: aromaticity, charge, hydrogen
count, bond-order profile, and three-membered-ring membership. Atoms whose
pattern has no published contribution add 0.
"""

from __future__ import annotations

from forge.molgraph.types import MolGraph


def _profile(mol: MolGraph, i: int) -> tuple[int, int, int, int]:
    """(singles, doubles, triples, aromatics) bond counts of atom i."""
    s = d = t = ar = 0
    for _, bond in mol.neighbors(i):
        if bond.aromatic:
            ar += 1
        elif bond.order == 1:
            s += 1
        elif bond.order == 2:
            d += 1
        elif bond.order == 3:
            t += 1
    return s, d, t, ar


def _nitrogen(mol: MolGraph, i: int) -> float:
    atom = mol.atoms[i]
    h = mol.hydrogens(i)
    s, d, t, ar = _profile(mol, i)
    if atom.aromatic:
        if atom.charge == 0:
            if h == 1 and ar == 2:
                return 15.79
            if ar == 3 and d == 0 and s == 0:
                return 4.41
            if ar == 2 and s == 1:
                return 4.93
            if ar == 2 and d == 1:
                return 8.39
            if ar == 2:
                return 12.89
        elif atom.charge > 0:
            if h == 1 and ar == 2:
                return 14.14
            if ar == 3:
                return 4.10
            if ar == 2 and s == 1:
                return 3.88
        return 0.0
    if atom.charge == 0:
        if h == 0:
            if t == 1 and s == 0 and d == 0:
                return 23.79
            if d == 1 and t == 1:
                return 13.60
            if s == 1 and d == 2:
                return 11.68
            if s == 1 and d == 1:
                return 12.36
            if s == 3:
                return 3.01 if mol.atom_in_three_ring(i) else 3.24
        elif h == 1:
            if d == 1:
                return 23.85
            if s == 2:
                return 21.94 if mol.atom_in_three_ring(i) else 12.03
        elif h == 2:
            if s == 1:
                return 26.02
    elif atom.charge > 0:
        if h == 0:
            if s == 4:
                return 0.00
            if s == 2 and d == 1:
                return 3.01
            if s == 1 and t == 1:
                return 4.36
        elif h == 1:
            if s == 3:
                return 4.44
            if s == 1 and d == 1:
                return 13.97
        elif h == 2:
            if s == 2:
                return 16.61
            if d == 1:
                return 25.59
        elif h == 3 and s == 1:
            return 27.64
    return 0.0


def _oxygen(mol: MolGraph, i: int) -> float:
    atom = mol.atoms[i]
    h = mol.hydrogens(i)
    s, d, _t, ar = _profile(mol, i)
    if atom.aromatic:
        return 13.14 if ar == 2 else 0.0
    if atom.charge == 0:
        if h == 1 and s == 1:
            return 20.23
        if h == 2:
            return 0.0
        if d == 1 and s == 0:
            return 17.07
        if s == 2:
            return 12.53 if mol.atom_in_three_ring(i) else 9.23
    elif atom.charge < 0:
        if s == 1 and d == 0:
            return 23.06
    return 0.0


def _sulfur(mol: MolGraph, i: int) -> float:
    atom = mol.atoms[i]
    h = mol.hydrogens(i)
    s, d, _t, ar = _profile(mol, i)
    if atom.aromatic:
        if ar == 2 and d == 1:
            return 21.70
        return 28.24 if ar == 2 else 0.0
    if atom.charge != 0:
        return 0.0
    if h == 1 and s == 1:
        return 38.80
    if h == 0:
        if s == 2 and d == 0:
            return 25.30
        if d == 1 and s == 0:
            return 32.09
        if s == 2 and d == 1:
            return 19.21
        if s == 2 and d == 2:
            return 8.38
    return 0.0


def _phosphorus(mol: MolGraph, i: int) -> float:
    atom = mol.atoms[i]
    h = mol.hydrogens(i)
    s, d, _t, _ar = _profile(mol, i)
    if atom.aromatic or atom.charge != 0:
        return 0.0
    if h == 0:
        if s == 3 and d == 0:
            return 13.59
        if s == 1 and d == 1:
            return 34.14
        if s == 3 and d == 1:
            return 9.81
    elif h == 1 and s == 2 and d == 1:
        return 23.47
    return 0.0


_BY_ELEMENT = {"N": _nitrogen, "O": _oxygen, "S": _sulfur, "P": _phosphorus}


def tpsa(mol: MolGraph) -> float:
    """Topological polar surface area in Å²."""
    total = 0.0
    for i, atom in enumerate(mol.atoms):
        fn = _BY_ELEMENT.get(atom.element)
        if fn is not None:
            total += fn(mol, i)
    return round(total, 2)
