"""Fragment attribution: property change from deleting each fragment."""

from __future__ import annotations

import random
from dataclasses import dataclass

from forge.fragment.brics import brics
from forge.fragment.efg import efg
from forge.fragment.murcko import murcko
from forge.fragment.removal import remove_fragment
from forge.fragment.types import METHODS, Decomposition, Fragment
from forge.molgraph.types import MolGraph
from forge.props import PropertyOracle, evaluate

_DISPATCH = {"murcko": murcko, "brics": brics, "efg": efg}


def decompose(mol: MolGraph, method: str) -> Decomposition:
    """Decompose with one named method ("murcko", "brics", or "efg")."""
    return _DISPATCH[method](mol)


def auto_decompose(mol: MolGraph, rng: random.Random) -> Decomposition:
    """Try the methods in random order; first with >= 3 fragments wins.

    Args:
        mol: Host molecule.
        rng: Seeded generator deciding the method order.

    Returns:
        The first decomposition with at least three fragments, otherwise
        the one with the most fragments (earlier try wins ties).
    """
    order = list(METHODS)
    rng.shuffle(order)
    best: Decomposition | None = None
    for method in order:
        decomp = decompose(mol, method)
        if len(decomp.fragments) >= 3:
            return decomp
        if best is None or len(decomp.fragments) > len(best.fragments):
            best = decomp
    assert best is not None
    return best


@dataclass(frozen=True, slots=True)
class AttributionRecord:
    """Property attribution of one fragment.

    Attributes:
        fragment: The deleted fragment.
        property: Property oracle name.
        removal: Removal mode used.
        raw_delta: f(mol) - f(mol with fragment removed).
        per_atom_score: raw_delta divided by the fragment's heavy atoms.
    """

    fragment: Fragment
    property: str
    removal: str
    raw_delta: float
    per_atom_score: float


def attribute(
    mol: MolGraph,
    decomp: Decomposition,
    oracle: PropertyOracle,
    removal: str = "replace_with_h",
) -> list[AttributionRecord]:
    """Score every fragment by explicit deletion and re-evaluation.

    Args:
        mol: Host molecule (no dummies).
        decomp: A decomposition of this molecule.
        oracle: Property to evaluate.
        removal: Capping procedure for severed bonds.

    Returns:
        One record per fragment, in decomposition order.

    Raises:
        EmptyRemainder: If a fragment covers the whole molecule.
        DummyAtomPresent: Propagated from the oracle on bad inputs.
    """
    f_mol = evaluate(oracle, mol)
    records = []
    for frag in decomp.fragments:
        remainder = remove_fragment(mol, frag, removal)
        delta = f_mol - evaluate(oracle, remainder)
        records.append(
            AttributionRecord(
                fragment=frag,
                property=oracle.name,
                removal=removal,
                raw_delta=delta,
                per_atom_score=delta / frag.heavy_atoms,
            )
        )
    return records
