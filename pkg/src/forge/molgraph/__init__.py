"""Molecular graphs: SMILES parsing, canonicalization, fingerprints, matching."""

from forge.molgraph.canon import canonical_ranks, canonical_smiles
from forge.molgraph.fingerprint import (
    Fingerprint,
    LengthMismatch,
    atom_identifiers,
    morgan_fingerprint,
    tanimoto,
)
from forge.molgraph.match import subgraph_match
from forge.molgraph.parser import (
    SmilesSyntaxError,
    UnbalancedParen,
    UnbalancedRing,
    UnknownToken,
    normalize,
    parse_smiles,
)
from forge.molgraph.types import (
    AROMATIC_ELEMENTS,
    DEFAULT_VALENCES,
    ORGANIC_SUBSET,
    Atom,
    Bond,
    MolGraph,
    StructureError,
    ValenceError,
)

__all__ = [
    "AROMATIC_ELEMENTS",
    "Atom",
    "Bond",
    "DEFAULT_VALENCES",
    "Fingerprint",
    "LengthMismatch",
    "MolGraph",
    "ORGANIC_SUBSET",
    "SmilesSyntaxError",
    "StructureError",
    "UnbalancedParen",
    "UnbalancedRing",
    "UnknownToken",
    "ValenceError",
    "atom_identifiers",
    "canonical_ranks",
    "canonical_smiles",
    "morgan_fingerprint",
    "normalize",
    "parse_smiles",
    "subgraph_match",
    "tanimoto",
]
