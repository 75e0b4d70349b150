"""Canonical atom ranking and canonical SMILES.

Atoms are ranked by iterative neighborhood refinement starting from local
invariants (element, aromaticity, charge, hydrogen count, degree, dummy
label, isotope). Ties that survive refinement are broken by tentatively
individualizing each tied atom in the lowest ambiguous cell, re-refining,
and keeping the branch whose fully resolved ranking writes the smallest
SMILES string. The winning string is therefore independent of input atom
order.
"""

from __future__ import annotations

from forge.molgraph.types import MolGraph, StructureError
from forge.molgraph.writer import write_connected

_MAX_BRANCH_LEAVES = 100_000


def _dense(keys: list) -> list[int]:
    order = {k: r for r, k in enumerate(sorted(set(keys)))}
    return [order[k] for k in keys]


def initial_ranks(mol: MolGraph) -> list[int]:
    """Dense ranks from per-atom local invariants."""
    keys = []
    for i, atom in enumerate(mol.atoms):
        keys.append(
            (
                1 if atom.is_dummy else 0,
                atom.element,
                1 if atom.aromatic else 0,
                atom.charge,
                mol.hydrogens(i),
                mol.degree(i),
                atom.attachment_label if atom.attachment_label is not None else -1,
                atom.isotope if atom.isotope is not None else 0,
            )
        )
    return _dense(keys)


def _bond_code(bond) -> int:
    return 4 if bond.aromatic else bond.order


def _adjacency(mol: MolGraph) -> list[tuple[tuple[int, int], ...]]:
    adj = mol.__dict__.get("_canon_adj")
    if adj is None:
        adj = [
            tuple((_bond_code(b), j) for j, b in mol.neighbors(i))
            for i in range(len(mol))
        ]
        mol.__dict__["_canon_adj"] = adj
    return adj


def _refine(mol: MolGraph, ranks: list[int]) -> list[int]:
    n = len(mol)
    adj = _adjacency(mol)
    while True:
        if n and max(ranks) == n - 1:
            # Dense ranks forming a permutation are discrete: fixed point.
            return ranks
        # Neighbor (bond code, rank) pairs collapse to ints; ranks are dense
        # below n, so c*n + r sorts exactly like the pair would.
        keys = [
            (ranks[i], *sorted(c * n + ranks[j] for c, j in adj[i]))
            for i in range(n)
        ]
        new = _dense(keys)
        if new == ranks:
            return ranks
        ranks = new


def _first_tied_cell(ranks: list[int]) -> list[int] | None:
    counts: dict[int, list[int]] = {}
    for i, r in enumerate(ranks):
        counts.setdefault(r, []).append(i)
    for r in sorted(counts):
        if len(counts[r]) > 1:
            return counts[r]
    return None


class _Budget:
    __slots__ = ("leaves",)

    def __init__(self) -> None:
        self.leaves = 0


def _resolve(
    mol: MolGraph, ranks: list[int], budget: _Budget
) -> tuple[str, list[int]]:
    cell = _first_tied_cell(ranks)
    if cell is None:
        budget.leaves += 1
        if budget.leaves > _MAX_BRANCH_LEAVES:
            raise StructureError("canonicalization branch limit exceeded")
        return write_connected(mol, ranks), ranks
    best: tuple[str, list[int]] | None = None
    for m in cell:
        forked = [2 * r for r in ranks]
        forked[m] -= 1
        candidate = _resolve(mol, _refine(mol, _dense(forked)), budget)
        if best is None or candidate[0] < best[0]:
            best = candidate
    assert best is not None
    return best


def _canonical_connected(mol: MolGraph) -> tuple[str, list[int]]:
    ranks = _refine(mol, initial_ranks(mol))
    return _resolve(mol, ranks, _Budget())


def canonical_ranks(mol: MolGraph) -> tuple[int, ...]:
    """Total canonical ordering of atoms; lower rank writes out first.

    For multi-component graphs, components are ordered by their canonical
    string and ranks are offset per component.

    Args:
        mol: Graph to rank.

    Returns:
        Tuple of dense ranks, one per atom, forming a permutation of
        ``range(len(mol))``.
    """
    comps = mol.components
    if len(comps) == 1:
        return tuple(_canonical_connected(mol)[1])
    pieces = []
    for comp in comps:
        sub, remap = mol.subgraph(comp)
        smiles, ranks = _canonical_connected(sub)
        pieces.append((smiles, min(comp), remap, ranks))
    pieces.sort(key=lambda p: (p[0], p[1]))
    out = [0] * len(mol)
    offset = 0
    for _smiles, _tie, remap, ranks in pieces:
        for old, new in remap.items():
            out[old] = offset + ranks[new]
        offset += len(ranks)
    return tuple(out)


def canonical_smiles(mol: MolGraph) -> str:
    """Canonical SMILES string; invariant under input atom permutation.

    Components of a disconnected graph are canonicalized independently,
    sorted, and joined with ``.``.

    Args:
        mol: Graph to write.

    Returns:
        The canonical SMILES string (stereo annotations are dropped).
    """
    cached = mol.__dict__.get("_canonical_smiles")
    if cached is not None:
        return cached
    comps = mol.components
    if len(comps) == 1:
        result = _canonical_connected(mol)[0]
    else:
        parts = []
        for comp in comps:
            sub, _ = mol.subgraph(comp)
            parts.append(_canonical_connected(sub)[0])
        result = ".".join(sorted(parts))
    mol.__dict__["_canonical_smiles"] = result
    return result
