"""Functional-group decomposition from a committed pattern list.

Patterns are ordinary SMILES with dummy atoms as boundary wildcards; they
are matched most-specific-first and each match claims its non-dummy atoms
for one functional-group fragment (matches touching already-claimed atoms
are skipped). Every bond between a claimed group and the rest of the
molecule — and between two different groups — is severed; unclaimed atoms
fall into carbon-skeleton fragments. Bare ``[*]P`` deliberately claims only
the phosphorus so that its oxygens come out as hydroxyl/ether groups.
"""

from __future__ import annotations

from forge.fragment.types import Decomposition, apply_cuts
from forge.molgraph.match import subgraph_match
from forge.molgraph.parser import parse_smiles
from forge.molgraph.types import MolGraph

# (name, pattern) in priority order; first match claims its atoms.
FUNCTIONAL_GROUPS: tuple[tuple[str, str], ...] = (
    ("carbamate", "[*]OC(=O)N"),
    ("urea", "NC(N)=O"),
    ("sulfonamide", "[*]S(=O)(=O)N"),
    ("sulfonic_acid", "[*]S(=O)(=O)O"),
    ("sulfone", "[*]S(=O)(=O)[*]"),
    ("sulfoxide", "[*]S(=O)[*]"),
    ("nitro", "[*][N+](=O)[O-]"),
    ("nitro_neutral", "[*]N(=O)=O"),
    ("carboxylic_acid", "[*]C(=O)[OH]"),
    ("ester", "[*]C(=O)O[*]"),
    ("acyl_chloride", "[*]C(=O)Cl"),
    ("amide", "[*]C(=O)N"),
    ("aldehyde", "[*][CH]=O"),
    ("ketone", "[*]C(=O)[*]"),
    ("guanidine", "NC(=N)N"),
    ("amidine", "[*]C(=N)N"),
    ("nitrile", "[*]C#N"),
    ("azo", "[*]N=N[*]"),
    ("imine", "[*]C=N"),
    ("hydrazine", "[*]NN"),
    ("hydroxylamine", "[*]N[OH]"),
    ("disulfide", "[*]SS[*]"),
    ("thiol", "[*][SH]"),
    ("thioether", "[*]S[*]"),
    ("ether", "[*]O[*]"),
    ("hydroxyl", "[*][OH]"),
    ("amine", "[*]N"),
    ("phosphorus", "[*]P"),
    ("boron", "[*]B"),
    ("alkyne", "C#C"),
    ("alkene", "C=C"),
    ("fluoro", "[*]F"),
    ("chloro", "[*]Cl"),
    ("bromo", "[*]Br"),
    ("iodo", "[*]I"),
)

_PARSED: list[tuple[str, MolGraph, tuple[int, ...]]] | None = None


def _patterns() -> list[tuple[str, MolGraph, tuple[int, ...]]]:
    global _PARSED
    if _PARSED is None:
        parsed = []
        for name, smiles in FUNCTIONAL_GROUPS:
            g = parse_smiles(smiles)
            keep = tuple(i for i, a in enumerate(g.atoms) if not a.is_dummy)
            parsed.append((name, g, keep))
        _PARSED = parsed
    return _PARSED


def efg_groups(mol: MolGraph) -> list[tuple[str, frozenset[int]]]:
    """Functional groups found in priority order; atom sets are disjoint."""
    claimed: set[int] = set()
    groups: list[tuple[str, frozenset[int]]] = []
    for name, pattern, keep in _patterns():
        for mapping in subgraph_match(pattern, mol):
            atoms = frozenset(mapping[k] for k in keep)
            if atoms & claimed:
                continue
            claimed |= atoms
            groups.append((name, atoms))
    return groups


def efg(mol: MolGraph) -> Decomposition:
    """Cut a molecule into functional groups plus skeleton fragments.

    Args:
        mol: Host molecule without dummy atoms.

    Returns:
        Decomposition with method "efg"; a molecule without any matching
        group comes back as one uncut fragment.
    """
    group_of: dict[int, int] = {}
    for gid, (_name, atoms) in enumerate(efg_groups(mol)):
        for a in atoms:
            group_of[a] = gid
    cuts = []
    for bond in mol.bonds:
        ga = group_of.get(bond.a, -1)
        gb = group_of.get(bond.b, -1)
        unclaimed = ga == -1 and gb == -1
        if ga != gb and not unclaimed:
            cuts.append((bond.a, bond.b))
    return apply_cuts(mol, cuts, "efg")
