"""Murcko scaffold decomposition: ring framework versus side chains."""

from __future__ import annotations

from forge.fragment.types import Decomposition, apply_cuts
from forge.molgraph.types import MolGraph


def murcko_scaffold_atoms(mol: MolGraph) -> set[int]:
    """Atoms of the Murcko framework: rings, linkers between rings, and
    atoms multiply bonded to the framework."""
    degree = {i: mol.degree(i) for i in range(len(mol))}
    alive = set(range(len(mol)))
    # Iteratively strip terminal atoms; what survives is rings plus linkers.
    changed = True
    while changed:
        changed = False
        for i in sorted(alive):
            if degree[i] <= 1:
                alive.discard(i)
                changed = True
                for j, _ in mol.neighbors(i):
                    if j in alive:
                        degree[j] -= 1
    # Exocyclic multiply-bonded atoms hang onto the framework.
    extra = set()
    for bond in mol.bonds:
        if bond.aromatic or bond.order == 1:
            continue
        if (bond.a in alive) != (bond.b in alive):
            extra.add(bond.b if bond.a in alive else bond.a)
    return alive | extra


def murcko(mol: MolGraph) -> Decomposition:
    """Split a molecule into its scaffold and side-chain fragments.

    Cuts every single bond between the Murcko framework and a side chain.
    Molecules without rings come back as one uncut fragment.

    Args:
        mol: Host molecule without dummy atoms.

    Returns:
        Decomposition with method "murcko".
    """
    scaffold = murcko_scaffold_atoms(mol)
    cuts = []
    if scaffold:
        for bond in mol.bonds:
            if (bond.a in scaffold) != (bond.b in scaffold):
                cuts.append((bond.a, bond.b))
    return apply_cuts(mol, cuts, "murcko")
