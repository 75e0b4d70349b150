"""BRICS bond cutting: the published 16-environment retrosynthetic rules.

Each atom is tested against the environment predicates below (L1..L16, with
L7 split into the two alkene ends 7a/7b); a bond is cut when its endpoints
match a compatible environment pair from the published link table. Only the
cut rules are used; the retrosynthetic labels are discarded and dummies are
renumbered 1..K per molecule. All cuts are acyclic single bonds except the
L7-L7 alkene rule, which cuts the double bond itself.
"""

from __future__ import annotations

from forge.fragment.types import Decomposition, apply_cuts
from forge.molgraph.types import MolGraph

# Compatible environment pairs (unordered), from the published rule table.
PAIR_TABLE: frozenset[tuple[str, str]] = frozenset(
    tuple(sorted(p))
    for p in [
        ("1", "3"), ("1", "5"), ("1", "10"),
        ("3", "4"), ("3", "13"), ("3", "14"), ("3", "15"), ("3", "16"),
        ("4", "5"), ("4", "11"),
        ("5", "12"), ("5", "13"), ("5", "14"), ("5", "15"), ("5", "16"),
        ("6", "13"), ("6", "14"), ("6", "15"), ("6", "16"),
        ("7", "7"),
        ("8", "9"), ("8", "10"), ("8", "13"), ("8", "14"), ("8", "15"),
        ("8", "16"),
        ("9", "13"), ("9", "14"), ("9", "15"), ("9", "16"),
        ("10", "13"), ("10", "14"), ("10", "15"), ("10", "16"),
        ("11", "13"), ("11", "14"), ("11", "15"), ("11", "16"),
        ("12", "13"), ("12", "14"), ("12", "15"), ("12", "16"),
        ("13", "14"), ("13", "15"), ("13", "16"),
        ("14", "14"), ("14", "15"), ("14", "16"),
        ("15", "16"),
        ("16", "16"),
    ]
)


def _has_double_to(mol: MolGraph, i: int, element: str) -> bool:
    return any(
        b.order == 2 and not b.aromatic and mol.atoms[j].element == element
        for j, b in mol.neighbors(i)
    )


def _saturated(mol: MolGraph, i: int) -> bool:
    return all(b.order == 1 and not b.aromatic for _, b in mol.neighbors(i))


def _ring_neighbor_elements(mol: MolGraph, i: int) -> list[str]:
    out = []
    for j, _ in mol.neighbors(i):
        if mol.edge_in_ring(i, j):
            out.append(mol.atoms[j].element)
    return out


def atom_environments(mol: MolGraph, i: int) -> set[str]:
    """BRICS environment labels matched by atom i."""
    atom = mol.atoms[i]
    el = atom.element
    deg = mol.degree(i)
    envs: set[str] = set()
    if atom.aromatic:
        if el == "C":
            ring_nbrs = [
                mol.atoms[j] for j, b in mol.neighbors(i) if b.aromatic
            ]
            if any(a.element != "C" for a in ring_nbrs):
                envs.add("14")
            elif len(ring_nbrs) >= 2:
                envs.add("16")
        elif el == "N":
            envs.add("9")
        return envs
    if el == "C":
        in_ring = mol.atom_in_ring(i)
        if deg == 3 and _has_double_to(mol, i, "O"):
            envs.add("1")
        if in_ring:
            ring_els = _ring_neighbor_elements(mol, i)
            if any(e in ("N", "O", "S") for e in ring_els):
                envs.add("13")
            elif len(ring_els) >= 2 and all(e == "C" for e in ring_els):
                envs.add("15")
        else:
            if deg >= 2 and _saturated(mol, i):
                # The published L4 and L8 share one atom pattern (acyclic
                # saturated carbon); they differ only in permitted partners.
                envs.add("4")
                envs.add("8")
            if 2 <= deg <= 3 and _has_double_to(mol, i, "C"):
                has_single_c = any(
                    b.order == 1
                    and not b.aromatic
                    and mol.atoms[j].element == "C"
                    for j, b in mol.neighbors(i)
                )
                envs.add("6")
                if has_single_c:
                    envs.add("7")
    elif el == "N":
        if (
            deg >= 2
            and _saturated(mol, i)
            and all(mol.atoms[j].element in ("C", "S") for j, _ in mol.neighbors(i))
        ):
            lactam = mol.atom_in_ring(i) and any(
                mol.edge_in_ring(i, j)
                and mol.atoms[j].element == "C"
                and _has_double_to(mol, j, "O")
                for j, _ in mol.neighbors(i)
            )
            if lactam:
                envs.add("10")
            else:
                envs.add("5")
    elif el == "O":
        if deg == 2 and not mol.atom_in_ring(i):
            envs.add("3")
    elif el == "S":
        if deg == 2 and _saturated(mol, i):
            envs.add("11")
        elif deg == 4 and sum(
            1 for j, b in mol.neighbors(i)
            if b.order == 2 and mol.atoms[j].element == "O"
        ) == 2:
            envs.add("12")
    return envs


def brics_cut_bonds(mol: MolGraph) -> list[tuple[int, int]]:
    """Bonds the BRICS rules sever, as (atom, atom) pairs."""
    envs = [atom_environments(mol, i) for i in range(len(mol))]
    cuts = []
    for idx, bond in enumerate(mol.bonds):
        if bond.aromatic or mol.ring_bond_flags[idx]:
            continue
        a, b = bond.a, bond.b
        if bond.order == 2:
            if "7" in envs[a] and "7" in envs[b]:
                cuts.append((a, b))
            continue
        if bond.order != 1:
            continue
        matched = False
        for ea in envs[a] - {"7"}:
            for eb in envs[b] - {"7"}:
                if tuple(sorted((ea, eb))) in PAIR_TABLE:
                    matched = True
                    break
            if matched:
                break
        if matched:
            cuts.append((a, b))
    return cuts


def brics(mol: MolGraph) -> Decomposition:
    """Decompose a molecule at BRICS-compatible bonds.

    Args:
        mol: Host molecule without dummy atoms.

    Returns:
        Decomposition with method "brics"; single uncut fragment when no
        bond matches the rule table.
    """
    return apply_cuts(mol, brics_cut_bonds(mol), "brics")
