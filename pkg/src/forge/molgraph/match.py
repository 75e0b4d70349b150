"""Subgraph monomorphism search between molecular graphs.

A match maps every pattern atom to a distinct host atom such that every
pattern bond is present in the host with the same order and aromaticity.
Host bonds between matched atoms that have no pattern counterpart are
allowed (monomorphism, not induced isomorphism); callers needing induced
equality check it on the returned mappings.
"""

from __future__ import annotations

from forge.molgraph.types import MolGraph


def _search_order(pattern: MolGraph) -> list[int]:
    """Pattern atom order: BFS per component from the highest-degree atom."""
    n = len(pattern)
    seen: set[int] = set()
    order: list[int] = []
    remaining = sorted(range(n), key=lambda i: (-pattern.degree(i), i))
    for start in remaining:
        if start in seen:
            continue
        queue = [start]
        seen.add(start)
        while queue:
            u = queue.pop(0)
            order.append(u)
            for v, _ in sorted(pattern.neighbors(u)):
                if v not in seen:
                    seen.add(v)
                    queue.append(v)
    return order


def subgraph_match(
    pattern: MolGraph, host: MolGraph, limit: int | None = None
) -> list[tuple[int, ...]]:
    """Find all monomorphisms of ``pattern`` into ``host``.

    Dummy pattern atoms match any host atom; all other atoms must agree on
    element, aromaticity, and charge (and hydrogen count when the pattern
    pins one). Bonds must agree on order and aromaticity.

    Args:
        pattern: Graph to embed.
        host: Graph searched for embeddings.
        limit: Stop after this many mappings (all are found when None).

    Returns:
        Sorted list of mappings; entry ``k`` of a mapping is the host atom
        matched to pattern atom ``k``.
    """
    np_ = len(pattern)
    nh = len(host)
    if np_ == 0:
        return [()]
    if np_ > nh:
        return []

    # Flat per-atom views; attribute chasing inside the search loop is the
    # dominant cost on large hosts.
    hatoms = host.atoms
    hdummy = [a.is_dummy for a in hatoms]
    hkey = [(a.element, a.aromatic, a.charge) for a in hatoms]
    hhyd = [host.hydrogens(i) for i in range(nh)]
    hadj: list[tuple[tuple[int, bool, int], ...]] = [
        tuple((k, b.aromatic, b.order) for k, b in host.neighbors(i))
        for i in range(nh)
    ]
    hdeg = [len(adj) for adj in hadj]
    hbond: dict[tuple[int, int], tuple[bool, int]] = {}
    for i, adj in enumerate(hadj):
        for k, aromatic, bond_order in adj:
            hbond[(i, k)] = (aromatic, bond_order)

    order = _search_order(pattern)
    position = {p: k for k, p in enumerate(order)}
    # Per search depth: pattern atom facts and back-edges to placed atoms.
    pwild: list[bool] = []
    pkey: list[tuple[str, bool, int]] = []
    pexp: list[int | None] = []
    pdeg: list[int] = []
    back: list[list[tuple[int, tuple[bool, int]]]] = []
    for p in order:
        atom = pattern.atoms[p]
        pwild.append(atom.is_dummy)
        pkey.append((atom.element, atom.aromatic, atom.charge))
        pexp.append(atom.explicit_h)
        pdeg.append(pattern.degree(p))
        back.append(
            [
                (q, (bond.aromatic, bond.order))
                for q, bond in pattern.neighbors(p)
                if position[q] < position[p]
            ]
        )

    results: list[tuple[int, ...]] = []
    mapping: dict[int, int] = {}
    used: set[int] = set()

    def extend(depth: int) -> bool:
        if depth == np_:
            results.append(tuple(mapping[i] for i in range(np_)))
            return limit is not None and len(results) >= limit
        p = order[depth]
        links = back[depth]
        if links:
            anchor, anchor_key = links[0]
            anchor_host = mapping[anchor]
            candidates = [
                h
                for h, aromatic, bond_order in hadj[anchor_host]
                if (aromatic, bond_order) == anchor_key
            ]
        else:
            candidates = range(nh)
        wild = pwild[depth]
        want_key = pkey[depth]
        want_h = pexp[depth]
        want_deg = pdeg[depth]
        for h in candidates:
            if h in used:
                continue
            if not wild:
                if (
                    hdummy[h]
                    or hkey[h] != want_key
                    or want_deg > hdeg[h]
                    or (want_h is not None and hhyd[h] != want_h)
                ):
                    continue
            ok = True
            for q, bond_key in links[1:]:
                if hbond.get((mapping[q], h)) != bond_key:
                    ok = False
                    break
            if not ok:
                continue
            mapping[p] = h
            used.add(h)
            if extend(depth + 1):
                return True
            del mapping[p]
            used.discard(h)
        return False

    extend(0)
    return sorted(results)
