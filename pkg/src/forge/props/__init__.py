"""Rule-based scalar property oracles over molecular graphs."""

from __future__ import annotations

from dataclasses import dataclass

from forge.errors import ForgeError
from forge.molgraph.types import MolGraph
from forge.props.basic import (
    aromatic_rings,
    fsp3,
    hba,
    hbd,
    heavy_atoms,
    mol_weight,
    ring_count,
    rot_bonds,
)
from forge.props.crippen import atom_contributions, clogp
from forge.props.tpsa import tpsa


class DummyAtomPresent(ForgeError):
    """Property evaluation requested on a graph with attachment dummies."""


class DegenerateRange(ForgeError):
    """Normalization requested over an empty value range."""


class UnknownProperty(ForgeError):
    """Property name outside the closed oracle set."""


_FUNCTIONS = {
    "mol_weight": mol_weight,
    "heavy_atoms": heavy_atoms,
    "ring_count": ring_count,
    "aromatic_rings": aromatic_rings,
    "rot_bonds": rot_bonds,
    "hba": hba,
    "hbd": hbd,
    "fsp3": fsp3,
    "tpsa": tpsa,
    "clogp": clogp,
}

PROPERTY_NAMES: tuple[str, ...] = tuple(_FUNCTIONS)

DIRECTIONS = ("higher_better", "lower_better")


@dataclass(frozen=True, slots=True)
class PropertyOracle:
    """A named scalar property with an optimization direction.

    Attributes:
        name: One of :data:`PROPERTY_NAMES`.
        direction: "higher_better" or "lower_better"; used only when
            normalizing raw values into scores.
    """

    name: str
    direction: str = "higher_better"

    def __post_init__(self) -> None:
        if self.name not in _FUNCTIONS:
            raise UnknownProperty(f"unknown property {self.name!r}")
        if self.direction not in DIRECTIONS:
            raise UnknownProperty(f"unknown direction {self.direction!r}")


def evaluate(oracle: PropertyOracle, mol: MolGraph) -> float:
    """Evaluate a property oracle on a molecule.

    Args:
        oracle: Which property to compute.
        mol: Molecule; must contain no attachment dummies.

    Returns:
        The raw property value (g/mol for mol_weight, Å² for tpsa,
        dimensionless otherwise).

    Raises:
        DummyAtomPresent: If the graph contains a dummy atom.
    """
    if mol.has_dummy:
        raise DummyAtomPresent("cannot evaluate properties on a fragment")
    return float(_FUNCTIONS[oracle.name](mol))


def normalize_score(
    value: float, prop_min: float, prop_max: float, direction: str = "higher_better"
) -> float:
    """Min-max normalize a property value into [0, 1], higher = better.

    Args:
        value: Raw property value.
        prop_min: Lower end of the observed range.
        prop_max: Upper end of the observed range.
        direction: "lower_better" flips the scale so that 1 is still best.

    Returns:
        Clamped affine image of ``value`` in [0, 1].

    Raises:
        DegenerateRange: If ``prop_min >= prop_max``.
    """
    if prop_min >= prop_max:
        raise DegenerateRange(f"degenerate range [{prop_min}, {prop_max}]")
    x = (value - prop_min) / (prop_max - prop_min)
    x = min(1.0, max(0.0, x))
    if direction == "lower_better":
        x = 1.0 - x
    return x


__all__ = [
    "DIRECTIONS",
    "DegenerateRange",
    "DummyAtomPresent",
    "PROPERTY_NAMES",
    "PropertyOracle",
    "UnknownProperty",
    "atom_contributions",
    "evaluate",
    "normalize_score",
]
