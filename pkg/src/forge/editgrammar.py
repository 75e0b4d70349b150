"""The modification/result output grammar: render, parse, verify.

A block names an edit (two marker-wrapped fragment strings joined by
``>>``) and the molecule that results, optionally suffixed with a score:

    Modification: <start_smiles>[1*]O<end_smiles> >> <start_smiles>[1*]N<end_smiles>
    Result: <start_smiles>CCN<end_smiles> (value: 0.74)

Parsing is whitespace-tolerant; rendering is byte-exact single-space form,
so ``parse_block(render_block(b)) == b``.
"""

from __future__ import annotations

import re
from dataclasses import dataclass

from forge.errors import ForgeError
from forge.molgraph.canon import canonical_smiles
from forge.molgraph.parser import normalize, parse_smiles
from forge.molgraph.types import MolGraph
from forge.smeplus import EditPair, NoMatch, apply_edit
from forge.tokenizer import END_MARKER, START_MARKER

VALUE_KEYS = ("value", "activity")

_SPAN = re.compile(re.escape(START_MARKER) + r"(.*?)" + re.escape(END_MARKER))
_SUFFIX = re.compile(r"^\(\s*(\w+)\s*:\s*([^)]*?)\s*\)$")


class GrammarError(ForgeError):
    """The text does not follow the modification/result template."""


class InvalidSmiles(ForgeError):
    """A marker-wrapped span does not parse as a molecule or fragment."""


class MalformedValue(ForgeError):
    """The score suffix is present but unreadable."""


@dataclass(frozen=True, slots=True)
class ModificationBlock:
    """One rendered edit: fragments, resulting molecule, optional score.

    Attributes:
        frag_src: Fragment string removed (dummies mark attachments).
        frag_tgt: Fragment string installed.
        result_smiles: Molecule claimed to result from the edit.
        value: Optional score shown in the suffix.
        value_key: Suffix label, "value" or "activity".
    """

    frag_src: str
    frag_tgt: str
    result_smiles: str
    value: float | None = None
    value_key: str = "value"

    def __post_init__(self) -> None:
        if self.value_key not in VALUE_KEYS:
            raise MalformedValue(f"unknown value key {self.value_key!r}")


@dataclass(frozen=True, slots=True)
class MultiTurnAnswer:
    """An ordered chain of blocks; each result feeds the next edit."""

    blocks: tuple[ModificationBlock, ...]

    def __post_init__(self) -> None:
        if not 1 <= len(self.blocks) <= 6:
            raise GrammarError(f"need 1..6 blocks, got {len(self.blocks)}")


def _format_value(value: float) -> str:
    return str(round(value, 2))


def render_block(block: ModificationBlock) -> str:
    """Write a block in the canonical byte-exact form."""
    wrap = lambda s: f"{START_MARKER}{s}{END_MARKER}"  # noqa: E731
    lines = (
        f"Modification: {wrap(block.frag_src)} >> {wrap(block.frag_tgt)}",
        f"Result: {wrap(block.result_smiles)}"
        + (
            f" ({block.value_key}: {_format_value(block.value)})"
            if block.value is not None
            else ""
        ),
    )
    return "\n".join(lines)


def render_answer(answer: MultiTurnAnswer) -> str:
    """Concatenate the blocks of a multi-turn answer."""
    return "\n".join(render_block(b) for b in answer.blocks)


def _check_smiles(text: str) -> str:
    try:
        normalize(parse_smiles(text))
    except ForgeError as exc:
        raise InvalidSmiles(f"{text!r}: {exc}") from exc
    return text


def _take_span(payload: str, where: str) -> tuple[str, str]:
    """Split one marker-wrapped span off the front of ``payload``."""
    match = _SPAN.match(payload.strip())
    if match is None:
        raise GrammarError(f"{where}: expected {START_MARKER}...{END_MARKER}")
    rest = payload.strip()[match.end() :]
    return match.group(1), rest


def parse_block(text: str) -> ModificationBlock:
    """Read one modification/result block, tolerating extra whitespace.

    Args:
        text: Text holding exactly one Modification line and one Result
            line (blank lines around them are ignored).

    Returns:
        The parsed block; SMILES spans are validated but kept verbatim.

    Raises:
        GrammarError: Missing lines, missing ``>>``, or unwrapped spans.
        InvalidSmiles: A span does not parse.
        MalformedValue: A malformed or unknown score suffix.
    """
    modification = result = None
    for line in text.splitlines():
        line = line.strip()
        if line.startswith("Modification:"):
            if modification is not None:
                raise GrammarError("multiple Modification lines")
            modification = line[len("Modification:") :]
        elif line.startswith("Result:"):
            if result is not None:
                raise GrammarError("multiple Result lines")
            result = line[len("Result:") :]
        elif line:
            raise GrammarError(f"unexpected line {line!r}")
    if modification is None or result is None:
        raise GrammarError("need one Modification line and one Result line")

    if ">>" not in modification:
        raise GrammarError("Modification line must join fragments with '>>'")
    left, right = modification.split(">>", 1)
    frag_src, rest = _take_span(left, "frag_src")
    if rest.strip():
        raise GrammarError(f"unexpected text after frag_src: {rest.strip()!r}")
    frag_tgt, rest = _take_span(right, "frag_tgt")
    if rest.strip():
        raise GrammarError(f"unexpected text after frag_tgt: {rest.strip()!r}")

    result_smiles, suffix = _take_span(result, "result")
    value, value_key = None, "value"
    suffix = suffix.strip()
    if suffix:
        match = _SUFFIX.match(suffix)
        if match is None:
            raise MalformedValue(f"bad score suffix {suffix!r}")
        value_key = match.group(1)
        if value_key not in VALUE_KEYS:
            raise MalformedValue(f"unknown value key {value_key!r}")
        try:
            value = float(match.group(2))
        except ValueError as exc:
            raise MalformedValue(f"bad score {match.group(2)!r}") from exc

    return ModificationBlock(
        frag_src=_check_smiles(frag_src),
        frag_tgt=_check_smiles(frag_tgt),
        result_smiles=_check_smiles(result_smiles),
        value=value,
        value_key=value_key,
    )


def parse_answer(text: str) -> MultiTurnAnswer:
    """Split concatenated blocks on their Modification lines and parse each."""
    chunks: list[list[str]] = []
    for line in text.splitlines():
        if line.strip().startswith("Modification:"):
            chunks.append([])
        if not chunks:
            if line.strip():
                raise GrammarError(f"text before first block: {line.strip()!r}")
            continue
        chunks[-1].append(line)
    if not chunks:
        raise GrammarError("no Modification line found")
    return MultiTurnAnswer(blocks=tuple(parse_block("\n".join(c)) for c in chunks))


def block_from_pair(pair: EditPair, with_value: bool = True) -> ModificationBlock:
    """Build a block from a mined pair; the score is rounded to render form."""
    value_key = "activity" if pair.property == "activity" else "value"
    return ModificationBlock(
        frag_src=pair.frag_src,
        frag_tgt=pair.frag_tgt,
        result_smiles=pair.tgt_smiles,
        value=round(pair.score_tgt, 2) if with_value else None,
        value_key=value_key,
    )


def verify_block(src: MolGraph, block: ModificationBlock) -> str:
    """Check a block against the molecule it claims to edit.

    Args:
        src: Source molecule the edit is applied to.
        block: Parsed block.

    Returns:
        "ok" when applying the edit reproduces the claimed result,
        "inapplicable" when frag_src has no clean occurrence in ``src``,
        "mismatch" otherwise (wrong result, invalid rejoin, bad labels).
    """
    try:
        produced = apply_edit(src, block.frag_src, block.frag_tgt)
    except NoMatch:
        return "inapplicable"
    except ForgeError:
        return "mismatch"
    produced_smiles = canonical_smiles(produced)
    if block.result_smiles == produced_smiles:
        # Canonicalization is idempotent, so an exact string match needs
        # no reparse of the claimed result.
        return "ok"
    try:
        claimed = canonical_smiles(normalize(parse_smiles(block.result_smiles)))
    except ForgeError:
        return "mismatch"
    return "ok" if produced_smiles == claimed else "mismatch"


def verify_answer(src: MolGraph, answer: MultiTurnAnswer) -> list[str]:
    """Verify each block in sequence, feeding each claimed result forward.

    Args:
        src: Molecule the first block edits.
        answer: Chain of blocks.

    Returns:
        One verdict per block; later blocks are checked against the
        previous block's claimed result even after a mismatch.
    """
    verdicts = []
    current = src
    for block in answer.blocks:
        verdicts.append(verify_block(current, block))
        try:
            current = normalize(parse_smiles(block.result_smiles))
        except ForgeError:
            break
    return verdicts
