"""Count- and composition-based molecular properties."""

from __future__ import annotations

from forge.molgraph.types import MolGraph

# Standard atomic weights (IUPAC 2021, conventional values), g/mol.
ATOMIC_WEIGHTS = {
    "H": 1.008,
    "B": 10.81,
    "C": 12.011,
    "N": 14.007,
    "O": 15.999,
    "F": 18.998,
    "P": 30.974,
    "S": 32.06,
    "Cl": 35.45,
    "Br": 79.904,
    "I": 126.904,
}


def mol_weight(mol: MolGraph) -> float:
    """Molecular weight in g/mol, implicit hydrogens included."""
    total = 0.0
    for i, atom in enumerate(mol.atoms):
        total += ATOMIC_WEIGHTS[atom.element]
        total += mol.hydrogens(i) * ATOMIC_WEIGHTS["H"]
    return total


def heavy_atoms(mol: MolGraph) -> float:
    """Number of non-hydrogen atoms."""
    return float(len(mol))


def ring_count(mol: MolGraph) -> float:
    """Cyclomatic number: bonds - atoms + components."""
    return float(len(mol.bonds) - len(mol) + len(mol.components))


def aromatic_rings(mol: MolGraph) -> float:
    """Cyclomatic number of the subgraph of aromatic bonds."""
    aro_bonds = [b for b in mol.bonds if b.aromatic]
    if not aro_bonds:
        return 0.0
    atoms = {b.a for b in aro_bonds} | {b.b for b in aro_bonds}
    # Count connected components of the aromatic subgraph.
    adj: dict[int, list[int]] = {a: [] for a in atoms}
    for b in aro_bonds:
        adj[b.a].append(b.b)
        adj[b.b].append(b.a)
    seen: set[int] = set()
    comps = 0
    for a in atoms:
        if a in seen:
            continue
        comps += 1
        stack = [a]
        seen.add(a)
        while stack:
            u = stack.pop()
            for v in adj[u]:
                if v not in seen:
                    seen.add(v)
                    stack.append(v)
    return float(len(aro_bonds) - len(atoms) + comps)


def _is_amide_cn(mol: MolGraph, a: int, b: int) -> bool:
    """True if bond a-b is the C-N single bond of an amide."""
    for c, n in ((a, b), (b, a)):
        if mol.atoms[c].element != "C" or mol.atoms[n].element != "N":
            continue
        for j, bond in mol.neighbors(c):
            if j != n and bond.order == 2 and mol.atoms[j].element == "O":
                return True
    return False


def rot_bonds(mol: MolGraph) -> float:
    """Rotatable bonds: single, acyclic, both ends heavy-degree >= 2,
    excluding amide C-N bonds."""
    count = 0
    for idx, bond in enumerate(mol.bonds):
        if bond.aromatic or bond.order != 1:
            continue
        if mol.ring_bond_flags[idx]:
            continue
        if mol.degree(bond.a) < 2 or mol.degree(bond.b) < 2:
            continue
        if _is_amide_cn(mol, bond.a, bond.b):
            continue
        count += 1
    return float(count)


def hba(mol: MolGraph) -> float:
    """Lipinski hydrogen-bond acceptors: count of N and O atoms."""
    return float(sum(1 for a in mol.atoms if a.element in ("N", "O")))


def hbd(mol: MolGraph) -> float:
    """Lipinski hydrogen-bond donors: N or O atoms bearing >= 1 H."""
    return float(
        sum(
            1
            for i, a in enumerate(mol.atoms)
            if a.element in ("N", "O") and mol.hydrogens(i) >= 1
        )
    )


def fsp3(mol: MolGraph) -> float:
    """Fraction of carbons that are sp3 (all-single-bond, non-aromatic)."""
    carbons = 0
    sp3 = 0
    for i, atom in enumerate(mol.atoms):
        if atom.element != "C":
            continue
        carbons += 1
        if atom.aromatic:
            continue
        if all(b.order == 1 and not b.aromatic for _, b in mol.neighbors(i)):
            sp3 += 1
    if carbons == 0:
        return 0.0
    return sp3 / carbons
