"""Frozen instruction wordings and answer formatting for corpus emission.

The ranking wording is fixed; every emitter builds its prompt from these
constants so that corpora are reproducible byte-for-byte. Property names
are shown to the model through the display names below, never the
internal identifiers.
"""

from __future__ import annotations

from forge.tokenizer import END_MARKER, START_MARKER

PROPERTY_DISPLAY = {
    "mol_weight": "molecular weight",
    "heavy_atoms": "number of heavy atoms",
    "ring_count": "number of rings",
    "aromatic_rings": "number of aromatic rings",
    "rot_bonds": "number of rotatable bonds",
    "hba": "number of hydrogen bond acceptors",
    "hbd": "number of hydrogen bond donors",
    "fsp3": "fraction of sp3 carbons",
    "tpsa": "topological polar surface area",
    "clogp": "logP",
    "activity": "activity",
}

SCORE_CLAUSE = (
    " Rank all fragments and include their normalized contribution scores"
    " (0 = lowest, 1 = highest observed contribution)."
)
RANK_INSTRUCTION = "Which fragment contributes the most to '{prop}'?"
RANK_PLAIN_CLAUSE = " Rank all fragments."
VULN_INSTRUCTION = "Which fragment contributes the least to '{prop}'?"
VULN_PLAIN_CLAUSE = " Return the single weakest fragment."
VULN_SCORE_CLAUSE = (
    " Return the single weakest fragment and include its normalized"
    " contribution score (0 = lowest, 1 = highest observed contribution)."
)
NODESC_PROP = "the property shown in the demonstrations"

DECOMP_INSTRUCTION = (
    "Decompose the molecule into attachment-labeled fragments."
    " Return the fragment list."
)

STAGE2_DIRECT_INSTRUCTION = (
    "Modify the molecule to improve '{prop}'."
    " Reply with a Modification/Result block."
)
STAGE2_ICL_INSTRUCTION = (
    "Modify the molecule to improve the property shown in the demonstrations."
    " Reply with a Modification/Result block."
)
MULTITURN_INSTRUCTION = (
    "Apply a sequence of modifications to improve '{prop}'."
    " Reply with one Modification/Result block per step."
)


def wrap(smiles: str) -> str:
    return f"{START_MARKER}{smiles}{END_MARKER}"


def molecule_line(smiles: str) -> str:
    return f"Molecule SMILES: {wrap(smiles)}"


def fragment_list_line(fragments: tuple[str, ...] | list[str]) -> str:
    return f"List of fragments to be ranked: {wrap('.'.join(fragments))}"


def format_score(value: float) -> str:
    return str(round(value, 2))


def ranked_answer(
    fragments: list[str], scores: list[float] | None
) -> str:
    """Spans joined by `` > ``, best first, with optional score suffixes."""
    if scores is None:
        return " > ".join(wrap(f) for f in fragments)
    return " > ".join(
        f"{wrap(f)} (score: {format_score(s)})"
        for f, s in zip(fragments, scores)
    )


def rank_instruction(prop: str, scored: bool) -> str:
    head = RANK_INSTRUCTION.format(prop=prop)
    return head + (SCORE_CLAUSE if scored else RANK_PLAIN_CLAUSE)


def vulnerability_instruction(prop: str, scored: bool) -> str:
    head = VULN_INSTRUCTION.format(prop=prop)
    return head + (VULN_SCORE_CLAUSE if scored else VULN_PLAIN_CLAUSE)
