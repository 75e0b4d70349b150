"""Fragment removal: delete a fragment's atoms and cap the severed bonds."""

from __future__ import annotations

from dataclasses import replace

from forge.errors import ForgeError
from forge.fragment.types import Fragment
from forge.molgraph.canon import canonical_smiles
from forge.molgraph.types import Atom, Bond, MolGraph

REMOVALS = ("replace_with_h", "delete_with_cap")


class EmptyRemainder(ForgeError):
    """Removing the fragment would delete the whole molecule."""


class UnknownRemoval(ForgeError):
    """Removal mode outside REMOVALS."""


def removal_result(
    mol: MolGraph, frag: Fragment, removal: str
) -> tuple[MolGraph, dict[int, int]]:
    """Remove a fragment, cap severed bonds, keep all components.

    replace_with_h lets each severed valence fill with hydrogen (explicit
    hydrogen counts are bumped where they were pinned); delete_with_cap
    attaches a methyl carbon at the severed bond's order instead.

    Args:
        mol: Host molecule.
        frag: Fragment of this molecule to delete.
        removal: One of REMOVALS.

    Returns:
        (remainder graph, host-atom -> remainder-atom index map). The
        remainder may be disconnected; callers needing a single molecule
        apply :func:`largest_component`.

    Raises:
        EmptyRemainder: If the fragment covers every atom.
        UnknownRemoval: For an unrecognized removal mode.
    """
    if removal not in REMOVALS:
        raise UnknownRemoval(f"unknown removal mode {removal!r}")
    dropped = set(frag.host_atom_indices)
    kept = [i for i in range(len(mol)) if i not in dropped]
    if not kept:
        raise EmptyRemainder("fragment covers the whole molecule")
    remap = {old: new for new, old in enumerate(kept)}
    atoms = [mol.atoms[i] for i in kept]
    bonds = [
        Bond(
            a=remap[b.a],
            b=remap[b.b],
            order=b.order,
            aromatic=b.aromatic,
            stereo=b.stereo,
        )
        for b in mol.bonds
        if b.a in remap and b.b in remap
    ]
    # Severed bonds: host bonds with exactly one end inside the fragment.
    severed = [
        (remap[b.a] if b.a in remap else remap[b.b], b.order)
        for b in mol.bonds
        if (b.a in dropped) != (b.b in dropped)
    ]
    if removal == "replace_with_h":
        for anchor, order in severed:
            atom = atoms[anchor]
            if atom.explicit_h is not None:
                atoms[anchor] = replace(atom, explicit_h=atom.explicit_h + order)
    else:
        for anchor, order in severed:
            cap = len(atoms)
            atoms.append(Atom(element="C"))
            bonds.append(Bond(a=anchor, b=cap, order=order))
    return MolGraph(atoms, bonds), remap


def largest_component(mol: MolGraph) -> MolGraph:
    """Largest connected component by heavy atoms; ties break on the
    smaller canonical string."""
    comps = mol.components
    if len(comps) == 1:
        return mol
    best: tuple[int, str, MolGraph] | None = None
    for comp in comps:
        sub, _ = mol.subgraph(comp)
        key = (-len(comp), canonical_smiles(sub))
        if best is None or key < (best[0], best[1]):
            best = (key[0], key[1], sub)
    assert best is not None
    return best[2]


def remove_fragment(mol: MolGraph, frag: Fragment, removal: str) -> MolGraph:
    """Delete a fragment and return the capped remainder molecule.

    Args:
        mol: Host molecule.
        frag: Fragment of this molecule to delete.
        removal: One of REMOVALS.

    Returns:
        The largest remaining component, capped per the removal mode.

    Raises:
        EmptyRemainder: If the fragment covers every atom.
    """
    remainder, _ = removal_result(mol, frag, removal)
    return largest_component(remainder)
