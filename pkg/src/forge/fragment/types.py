"""Fragment and decomposition types plus the shared bond-cutting machinery."""

from __future__ import annotations

from dataclasses import dataclass, replace

from forge.errors import ForgeError
from forge.molgraph.canon import canonical_ranks, canonical_smiles
from forge.molgraph.types import Atom, Bond, MolGraph

METHODS = ("murcko", "brics", "efg")


class BadCut(ForgeError):
    """A requested cut bond does not exist or is aromatic."""


@dataclass(frozen=True, slots=True)
class Fragment:
    """One attachment-labeled piece of a decomposed molecule.

    Attributes:
        graph: Fragment graph; severed bonds appear as labeled dummy atoms.
        host_atom_indices: Host atoms covered by this fragment (sorted).
        attachment_pairs: (dummy label, host atom on the remainder side)
            for every severed bond.
    """

    graph: MolGraph
    host_atom_indices: tuple[int, ...]
    attachment_pairs: tuple[tuple[int, int], ...]

    @property
    def heavy_atoms(self) -> int:
        """Non-dummy atom count."""
        return sum(1 for a in self.graph.atoms if not a.is_dummy)

    def smiles(self) -> str:
        return canonical_smiles(self.graph)

    def unlabeled_smiles(self) -> str:
        """Canonical string with dummy labels stripped.

        Dummy numbering is assigned per host, so the same chemical fragment
        cut out of two molecules can carry different labels; this key makes
        such occurrences poolable.
        """
        return canonical_smiles(strip_labels(self.graph))


def strip_labels(graph: MolGraph) -> MolGraph:
    """Return a copy of ``graph`` with all dummy attachment labels cleared."""
    atoms = [
        replace(a, attachment_label=None) if a.is_dummy else a for a in graph.atoms
    ]
    return MolGraph(atoms=atoms, bonds=list(graph.bonds))


@dataclass(frozen=True, slots=True)
class Decomposition:
    """A partition of one molecule into fragments."""

    method: str
    fragments: tuple[Fragment, ...]


def apply_cuts(
    mol: MolGraph, cut_bonds: list[tuple[int, int]], method: str
) -> Decomposition:
    """Sever the given bonds and collect the resulting fragments.

    Dummy labels 1..K are assigned to cut bonds in canonical-rank order of
    their endpoints, so the same molecule parsed from any atom order yields
    identically labeled fragments.

    Args:
        mol: Host molecule (no dummies).
        cut_bonds: Bonds to sever, as (atom, atom) pairs.
        method: Decomposition method name recorded on the result.

    Returns:
        The decomposition; with no cut bonds it holds the whole molecule
        as a single dummy-free fragment.

    Raises:
        BadCut: If a pair is not an existing non-aromatic bond.
    """
    n = len(mol)
    ranks = canonical_ranks(mol) if cut_bonds else ()
    normalized: list[tuple[int, int, Bond]] = []
    seen: set[tuple[int, int]] = set()
    for a, b in cut_bonds:
        bond = mol.bond_between(a, b)
        if bond is None:
            raise BadCut(f"no bond between atoms {a} and {b}")
        if bond.aromatic:
            raise BadCut(f"refusing to cut aromatic bond {a}-{b}")
        key = (min(a, b), max(a, b))
        if key in seen:
            continue
        seen.add(key)
        normalized.append((a, b, bond))
    normalized.sort(
        key=lambda t: (min(ranks[t[0]], ranks[t[1]]), max(ranks[t[0]], ranks[t[1]]))
    )
    labels = {
        (min(a, b), max(a, b)): k + 1 for k, (a, b, _) in enumerate(normalized)
    }
    cut_set = set(labels)

    # Connected components of the graph minus the cut bonds.
    adj: dict[int, list[int]] = {i: [] for i in range(n)}
    for bond in mol.bonds:
        if (min(bond.a, bond.b), max(bond.a, bond.b)) in cut_set:
            continue
        adj[bond.a].append(bond.b)
        adj[bond.b].append(bond.a)
    comp_of = [-1] * n
    comps: list[list[int]] = []
    for start in range(n):
        if comp_of[start] != -1:
            continue
        comp = [start]
        comp_of[start] = len(comps)
        stack = [start]
        while stack:
            u = stack.pop()
            for v in adj[u]:
                if comp_of[v] == -1:
                    comp_of[v] = len(comps)
                    comp.append(v)
                    stack.append(v)
        comps.append(sorted(comp))

    fragments = []
    for comp in comps:
        sub, remap = mol.subgraph(comp)
        atoms = list(sub.atoms)
        bonds = list(sub.bonds)
        pairs = []
        for (a, b, bond) in normalized:
            for inside, outside in ((a, b), (b, a)):
                if comp_of[inside] == comp_of[comp[0]] and inside in remap:
                    label = labels[(min(a, b), max(a, b))]
                    dummy = len(atoms)
                    atoms.append(Atom(element="*", attachment_label=label))
                    bonds.append(
                        Bond(a=remap[inside], b=dummy, order=bond.order)
                    )
                    pairs.append((label, outside))
        fragments.append(
            Fragment(
                graph=MolGraph(atoms, bonds),
                host_atom_indices=tuple(comp),
                attachment_pairs=tuple(sorted(pairs)),
            )
        )
    fragments.sort(key=lambda f: f.host_atom_indices)
    return Decomposition(method=method, fragments=tuple(fragments))


def reassemble(decomp: Decomposition) -> MolGraph:
    """Rejoin fragments at matching dummy labels.

    Args:
        decomp: Any decomposition whose dummy labels pair up exactly.

    Returns:
        A graph isomorphic to the original host (atom order may differ).

    Raises:
        BadCut: If a dummy label does not occur exactly twice.
    """
    atoms: list[Atom] = []
    bonds: list[Bond] = []
    anchors: dict[int, list[tuple[int, int]]] = {}
    for frag in decomp.fragments:
        offset = len(atoms)
        g = frag.graph
        keep: dict[int, int] = {}
        for i, atom in enumerate(g.atoms):
            if atom.is_dummy:
                continue
            keep[i] = offset + len(keep)
        for i, atom in enumerate(g.atoms):
            if atom.is_dummy:
                continue
            atoms.append(atom)
        for bond in g.bonds:
            da, db = g.atoms[bond.a], g.atoms[bond.b]
            if da.is_dummy or db.is_dummy:
                dummy, real = (bond.a, bond.b) if da.is_dummy else (bond.b, bond.a)
                label = g.atoms[dummy].attachment_label
                if label is None:
                    raise BadCut("unlabeled dummy cannot be reassembled")
                anchors.setdefault(label, []).append((keep[real], bond.order))
            else:
                bonds.append(
                    Bond(
                        a=keep[bond.a],
                        b=keep[bond.b],
                        order=bond.order,
                        aromatic=bond.aromatic,
                        stereo=bond.stereo,
                    )
                )
    for label, ends in sorted(anchors.items()):
        if len(ends) != 2:
            raise BadCut(f"dummy label {label} occurs {len(ends)} times, need 2")
        (a, order_a), (b, order_b) = ends
        if order_a != order_b:
            raise BadCut(f"dummy label {label} joins bonds of different order")
        bonds.append(Bond(a=a, b=b, order=order_a))
    return MolGraph(atoms, bonds)
