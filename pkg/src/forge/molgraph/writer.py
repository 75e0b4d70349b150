"""SMILES write-out for a molecular graph under a given atom ranking.

The writer performs a DFS from the minimal-rank atom, visiting neighbors in
rank order; ring-closure digits are allocated in write order and reused once
closed. Stereo annotations are not emitted (they are parsed and retained on
the graph but ignored here).
"""

from __future__ import annotations

import sys
from collections import defaultdict

from forge.molgraph.types import (
    AROMATIC_ELEMENTS,
    ORGANIC_SUBSET,
    Bond,
    MolGraph,
    _allowed_valences,
)

_LOWERCASE_OK = frozenset(e.upper() for e in AROMATIC_ELEMENTS)


def _bond_token(mol: MolGraph, bond: Bond) -> str:
    if bond.aromatic:
        return ""
    if bond.order == 2:
        return "="
    if bond.order == 3:
        return "#"
    # Single bond: explicit only between two aromatic atoms, where the
    # default would read back as aromatic.
    if mol.atoms[bond.a].aromatic and mol.atoms[bond.b].aromatic:
        return "-"
    return ""


def _plain_h(mol: MolGraph, i: int) -> int | None:
    """Hydrogens an unbracketed atom with these bonds would receive, or None."""
    atom = mol.atoms[i]
    allowed = _allowed_valences(atom.element, 0)
    if allowed is None:
        return None
    plain = 0
    n_aromatic = 0
    for _, bond in mol.neighbors(i):
        if bond.aromatic:
            n_aromatic += 1
        else:
            plain += bond.order
    if atom.aromatic:
        if plain + n_aromatic > max(allowed):
            return None
        return max(0, allowed[0] - 1 - plain - n_aromatic)
    total = plain + n_aromatic
    for v in allowed:
        if v >= total:
            return v - total
    return None


def _atom_token(mol: MolGraph, i: int) -> str:
    atom = mol.atoms[i]
    if atom.is_dummy:
        label = atom.attachment_label
        return f"[{label}*]" if label is not None else "[*]"
    symbol = atom.element.lower() if atom.aromatic else atom.element
    plain_allowed = (
        atom.charge == 0
        and atom.isotope is None
        and atom.element in ORGANIC_SUBSET
        and (not atom.aromatic or atom.element in _LOWERCASE_OK)
        and _plain_h(mol, i) == mol.hydrogens(i)
    )
    if plain_allowed:
        return symbol
    iso = str(atom.isotope) if atom.isotope is not None else ""
    h = mol.hydrogens(i)
    hpart = "" if h == 0 else ("H" if h == 1 else f"H{h}")
    c = atom.charge
    if c == 0:
        cpart = ""
    elif c == 1:
        cpart = "+"
    elif c == -1:
        cpart = "-"
    else:
        cpart = f"+{c}" if c > 0 else str(c)
    return f"[{iso}{symbol}{hpart}{cpart}]"


def _digit_token(digit: int) -> str:
    return str(digit) if digit < 10 else f"%{digit:02d}"


def write_connected(mol: MolGraph, ranks: list[int] | tuple[int, ...]) -> str:
    """Write a connected graph as SMILES under the given total atom ranking."""
    n = len(mol)
    if n == 0:
        return ""
    root = min(range(n), key=lambda i: ranks[i])

    def ordered(i: int) -> list[tuple[int, Bond]]:
        return sorted(mol.neighbors(i), key=lambda p: ranks[p[0]])

    # Pass 1: classify edges into tree children and ring closures.
    visited = {root}
    children: dict[int, list[tuple[int, Bond]]] = defaultdict(list)
    ring_at: dict[int, list[tuple[int, Bond]]] = defaultdict(list)
    ring_seen: set[tuple[int, int]] = set()
    # Iterative DFS preserving neighbor order via explicit frames.
    frames: list[tuple[int, int | None, list[tuple[int, Bond]], int]] = [
        (root, None, ordered(root), 0)
    ]
    preorder: dict[int, int] = {root: 0}
    while frames:
        u, parent, nbrs, ptr = frames.pop()
        advanced = False
        while ptr < len(nbrs):
            v, bond = nbrs[ptr]
            ptr += 1
            if parent is not None and v == parent and (u, v) not in ring_seen:
                # Skip the tree edge back to the parent exactly once.
                ring_seen.add((u, v))
                ring_seen.add((v, u))
                continue
            if v in visited:
                if (u, v) not in ring_seen:
                    ring_seen.add((u, v))
                    ring_seen.add((v, u))
                    ring_at[u].append((v, bond))
                    ring_at[v].append((u, bond))
                continue
            visited.add(v)
            preorder[v] = len(preorder)
            children[u].append((v, bond))
            frames.append((u, parent, nbrs, ptr))
            frames.append((v, u, ordered(v), 0))
            advanced = True
            break
        if advanced:
            continue

    # Pass 2: assign ring-closure digits in write (pre)order.
    edge_digit: dict[tuple[int, int], int] = {}
    open_digits: set[int] = set()
    write_order = sorted(preorder, key=preorder.get)
    for u in write_order:
        for v, _bond in sorted(ring_at[u], key=lambda p: preorder[p[0]]):
            e = (min(u, v), max(u, v))
            if e not in edge_digit:
                d = 1
                while d in open_digits:
                    d += 1
                edge_digit[e] = d
                open_digits.add(d)
            else:
                open_digits.discard(edge_digit[e])

    # Pass 3: render recursively.
    def render(u: int) -> str:
        parts = [_atom_token(mol, u)]
        for v, bond in sorted(ring_at[u], key=lambda p: preorder[p[0]]):
            e = (min(u, v), max(u, v))
            parts.append(_bond_token(mol, bond) + _digit_token(edge_digit[e]))
        kids = children[u]
        for v, bond in kids[:-1]:
            parts.append(f"({_bond_token(mol, bond)}{render(v)})")
        if kids:
            v, bond = kids[-1]
            parts.append(f"{_bond_token(mol, bond)}{render(v)}")
        return "".join(parts)

    if n + 10 > sys.getrecursionlimit() - 100:
        sys.setrecursionlimit(n + 1000)
    return render(root)
