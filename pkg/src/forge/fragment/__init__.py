"""Fragment decomposition, removal, and attribution."""

from forge.fragment.attribution import (
    AttributionRecord,
    attribute,
    auto_decompose,
    decompose,
)
from forge.fragment.brics import atom_environments, brics, brics_cut_bonds
from forge.fragment.efg import FUNCTIONAL_GROUPS, efg, efg_groups
from forge.fragment.murcko import murcko, murcko_scaffold_atoms
from forge.fragment.removal import (
    REMOVALS,
    EmptyRemainder,
    UnknownRemoval,
    largest_component,
    remove_fragment,
    removal_result,
)
from forge.fragment.types import (
    METHODS,
    BadCut,
    Decomposition,
    Fragment,
    apply_cuts,
    reassemble,
    strip_labels,
)

__all__ = [
    "AttributionRecord",
    "BadCut",
    "Decomposition",
    "EmptyRemainder",
    "FUNCTIONAL_GROUPS",
    "Fragment",
    "METHODS",
    "REMOVALS",
    "UnknownRemoval",
    "apply_cuts",
    "atom_environments",
    "attribute",
    "auto_decompose",
    "brics",
    "brics_cut_bonds",
    "decompose",
    "efg",
    "efg_groups",
    "largest_component",
    "murcko",
    "murcko_scaffold_atoms",
    "reassemble",
    "remove_fragment",
    "removal_result",
    "strip_labels",
]
