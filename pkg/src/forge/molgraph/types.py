"""Attributed molecular graph types.

A :class:`MolGraph` is an immutable simple graph of :class:`Atom` nodes and
:class:`Bond` edges. Hydrogens are implicit: each atom either carries an
explicit hydrogen count (bracket atoms) or derives one from a standard
valence model at construction time. Stereo annotations are retained on atoms
and bonds but ignored by canonicalization and matching.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from functools import cached_property

from forge.errors import ForgeError

ORGANIC_SUBSET = frozenset({"B", "C", "N", "O", "P", "S", "F", "Cl", "Br", "I"})
AROMATIC_ELEMENTS = frozenset({"b", "c", "n", "o", "p", "s"})

# Allowed total valences used to fill implicit hydrogens and to bound-check
# explicit ones. Elements not listed are accepted unchecked with 0 implicit H.
DEFAULT_VALENCES: dict[str, tuple[int, ...]] = {
    "H": (1,),
    "B": (3,),
    "C": (4,),
    "N": (3, 5),
    "O": (2,),
    "P": (3, 5),
    "S": (2, 4, 6),
    "F": (1,),
    "Cl": (1,),
    "Br": (1,),
    "I": (1,),
}


class ValenceError(ForgeError):
    """An atom's bonds (plus explicit hydrogens) exceed every allowed valence."""


class StructureError(ForgeError):
    """The atom/bond lists do not form a valid simple molecular graph."""


@dataclass(frozen=True, slots=True)
class Atom:
    """One heavy (or dummy) atom.

    ``explicit_h=None`` means "derive from the valence model"; an integer
    pins the hydrogen count exactly, as a bracket-atom ``Hn`` token does.
    Dummy atoms have ``element == "*"`` and an optional attachment label.
    """

    element: str
    aromatic: bool = False
    charge: int = 0
    isotope: int | None = None
    explicit_h: int | None = None
    attachment_label: int | None = None
    stereo: str | None = None

    @property
    def is_dummy(self) -> bool:
        return self.element == "*"


@dataclass(frozen=True, slots=True)
class Bond:
    """An edge between atom indices ``a`` and ``b``.

    ``order`` is 1, 2 or 3; aromatic bonds carry ``order=1`` plus the
    ``aromatic`` flag, and the pair (order, aromatic) is the match key.
    """

    a: int
    b: int
    order: int = 1
    aromatic: bool = False
    stereo: str | None = None

    def other(self, idx: int) -> int:
        if idx == self.a:
            return self.b
        if idx == self.b:
            return self.a
        raise ValueError(f"atom {idx} not on bond {self.a}-{self.b}")

    @property
    def key(self) -> tuple[bool, int]:
        """Order-comparison key: aromatic bonds compare distinct from single."""
        return (self.aromatic, self.order)


def _allowed_valences(element: str, charge: int) -> tuple[int, ...] | None:
    base = DEFAULT_VALENCES.get(element)
    if base is None:
        return None
    if charge == 0:
        return base
    if charge < 0:
        if element == "B":
            return (4,)
        return tuple(max(0, v + charge) for v in base)
    if element in ("N", "O", "P", "S"):
        return tuple(v + charge for v in base)
    return tuple(max(0, v - charge) for v in base)


class MolGraph:
    """Immutable attributed molecular graph.

    Invariants enforced at construction: simple graph (no self loops or
    parallel bonds), every aromatic bond joins two aromatic atoms, and no
    non-dummy atom exceeds its maximum allowed valence. Implicit hydrogen
    counts are computed once and cached.
    """

    __slots__ = ("atoms", "bonds", "_neighbors", "_h", "__dict__")

    def __init__(self, atoms: list[Atom] | tuple[Atom, ...], bonds: list[Bond] | tuple[Bond, ...]):
        self.atoms: tuple[Atom, ...] = tuple(atoms)
        self.bonds: tuple[Bond, ...] = tuple(bonds)
        n = len(self.atoms)
        nbrs: list[list[tuple[int, Bond]]] = [[] for _ in range(n)]
        seen: set[tuple[int, int]] = set()
        for bond in self.bonds:
            if bond.a == bond.b:
                raise StructureError(f"self-loop on atom {bond.a}")
            if not (0 <= bond.a < n and 0 <= bond.b < n):
                raise StructureError(f"bond {bond.a}-{bond.b} out of range")
            edge = (min(bond.a, bond.b), max(bond.a, bond.b))
            if edge in seen:
                raise StructureError(f"parallel bond {edge[0]}-{edge[1]}")
            seen.add(edge)
            if bond.aromatic and not (
                self.atoms[bond.a].aromatic and self.atoms[bond.b].aromatic
            ):
                raise StructureError(
                    f"aromatic bond {bond.a}-{bond.b} joins non-aromatic atoms"
                )
            nbrs[bond.a].append((bond.b, bond))
            nbrs[bond.b].append((bond.a, bond))
        self._neighbors: tuple[tuple[tuple[int, Bond], ...], ...] = tuple(
            tuple(lst) for lst in nbrs
        )
        self._h: tuple[int, ...] = tuple(
            self._derive_h(i) for i in range(n)
        )

    def _derive_h(self, i: int) -> int:
        atom = self.atoms[i]
        plain = 0
        n_aromatic = 0
        for _, bond in self._neighbors[i]:
            if bond.aromatic:
                n_aromatic += 1
            else:
                plain += bond.order
        if atom.is_dummy:
            return 0
        allowed = _allowed_valences(atom.element, atom.charge)
        if atom.explicit_h is not None:
            if allowed is not None and plain + n_aromatic + atom.explicit_h > max(allowed):
                raise ValenceError(
                    f"atom {i} ({atom.element}) valence "
                    f"{plain + n_aromatic + atom.explicit_h} exceeds maximum {max(allowed)}"
                )
            return atom.explicit_h
        if allowed is None:
            return 0
        if atom.aromatic:
            # One valence unit is reserved for the aromatic pi system.
            if plain + n_aromatic > max(allowed):
                raise ValenceError(
                    f"aromatic atom {i} ({atom.element}) valence "
                    f"{plain + n_aromatic} exceeds maximum {max(allowed)}"
                )
            return max(0, allowed[0] - 1 - plain - n_aromatic)
        total = plain + n_aromatic
        for v in allowed:
            if v >= total:
                return v - total
        raise ValenceError(
            f"atom {i} ({atom.element}) valence {total} exceeds maximum {max(allowed)}"
        )

    # -- basic accessors ---------------------------------------------------

    def __len__(self) -> int:
        return len(self.atoms)

    def neighbors(self, i: int) -> tuple[tuple[int, Bond], ...]:
        """(neighbor index, bond) pairs of atom ``i``."""
        return self._neighbors[i]

    def degree(self, i: int) -> int:
        return len(self._neighbors[i])

    def hydrogens(self, i: int) -> int:
        """Hydrogen count of atom ``i`` (explicit or valence-derived)."""
        return self._h[i]

    def bond_between(self, i: int, j: int) -> Bond | None:
        for k, bond in self._neighbors[i]:
            if k == j:
                return bond
        return None

    @cached_property
    def has_dummy(self) -> bool:
        return any(a.is_dummy for a in self.atoms)

    # -- ring perception ---------------------------------------------------

    @cached_property
    def ring_bond_flags(self) -> tuple[bool, ...]:
        """Per-bond flag: True when the bond lies on a cycle (is not a bridge).

        Computed with an iterative Tarjan bridge search.
        """
        n = len(self.atoms)
        index = {id(b): k for k, b in enumerate(self.bonds)}
        flags = [False] * len(self.bonds)
        disc = [-1] * n
        low = [0] * n
        timer = 0
        for root in range(n):
            if disc[root] != -1:
                continue
            stack: list[tuple[int, int, int]] = [(root, -1, 0)]
            while stack:
                node, parent_bond, ptr = stack.pop()
                if ptr == 0:
                    disc[node] = low[node] = timer
                    timer += 1
                nbrs = self._neighbors[node]
                advanced = False
                while ptr < len(nbrs):
                    nxt, bond = nbrs[ptr]
                    ptr += 1
                    bidx = index[id(bond)]
                    if bidx == parent_bond:
                        continue
                    if disc[nxt] == -1:
                        stack.append((node, parent_bond, ptr))
                        stack.append((nxt, bidx, 0))
                        advanced = True
                        break
                    low[node] = min(low[node], disc[nxt])
                    flags[bidx] = True  # back edge: on a cycle
                if advanced or ptr < len(nbrs):
                    continue
                if parent_bond != -1:
                    # Propagate low-link to the parent frame.
                    parent = self.bonds[parent_bond].other(node)
                    low[parent] = min(low[parent], low[node])
                    if low[node] > disc[parent]:
                        pass  # bridge: flag stays False
                    else:
                        flags[parent_bond] = True
        return tuple(flags)

    def bond_in_ring(self, bond: Bond) -> bool:
        return self.ring_bond_flags[self.bonds.index(bond)]

    @cached_property
    def _bond_ring_lookup(self) -> dict[tuple[int, int], bool]:
        out: dict[tuple[int, int], bool] = {}
        for bond, flag in zip(self.bonds, self.ring_bond_flags):
            edge = (min(bond.a, bond.b), max(bond.a, bond.b))
            out[edge] = flag
        return out

    def edge_in_ring(self, i: int, j: int) -> bool:
        return self._bond_ring_lookup[(min(i, j), max(i, j))]

    @cached_property
    def ring_atom_flags(self) -> tuple[bool, ...]:
        flags = [False] * len(self.atoms)
        for bond, on_ring in zip(self.bonds, self.ring_bond_flags):
            if on_ring:
                flags[bond.a] = True
                flags[bond.b] = True
        return tuple(flags)

    def atom_in_ring(self, i: int) -> bool:
        return self.ring_atom_flags[i]

    def atom_in_three_ring(self, i: int) -> bool:
        nbr = [j for j, _ in self._neighbors[i]]
        for x in range(len(nbr)):
            for y in range(x + 1, len(nbr)):
                if self.bond_between(nbr[x], nbr[y]) is not None:
                    return True
        return False

    # -- components --------------------------------------------------------

    @cached_property
    def components(self) -> tuple[tuple[int, ...], ...]:
        """Connected components as sorted atom-index tuples, in first-atom order."""
        n = len(self.atoms)
        seen = [False] * n
        comps: list[tuple[int, ...]] = []
        for start in range(n):
            if seen[start]:
                continue
            queue = [start]
            seen[start] = True
            comp = []
            while queue:
                node = queue.pop()
                comp.append(node)
                for nxt, _ in self._neighbors[node]:
                    if not seen[nxt]:
                        seen[nxt] = True
                        queue.append(nxt)
            comps.append(tuple(sorted(comp)))
        return tuple(comps)

    def subgraph(self, atom_indices: list[int] | tuple[int, ...]) -> tuple["MolGraph", dict[int, int]]:
        """Node-induced subgraph and the old-index to new-index mapping."""
        remap = {old: new for new, old in enumerate(atom_indices)}
        atoms = [self.atoms[i] for i in atom_indices]
        bonds = [
            replace(b, a=remap[b.a], b=remap[b.b])
            for b in self.bonds
            if b.a in remap and b.b in remap
        ]
        return MolGraph(atoms, bonds), remap

    def relabeled(self, order: list[int] | tuple[int, ...]) -> "MolGraph":
        """Graph with atoms permuted so that new atom ``k`` is old ``order[k]``."""
        if sorted(order) != list(range(len(self.atoms))):
            raise ValueError("order must be a permutation of atom indices")
        remap = {old: new for new, old in enumerate(order)}
        atoms = [self.atoms[i] for i in order]
        bonds = [replace(b, a=remap[b.a], b=remap[b.b]) for b in self.bonds]
        return MolGraph(atoms, bonds)

    def __repr__(self) -> str:  # pragma: no cover - debugging aid
        return f"MolGraph(atoms={len(self.atoms)}, bonds={len(self.bonds)})"
