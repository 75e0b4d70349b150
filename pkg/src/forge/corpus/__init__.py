"""Training-corpus emission: ranking, decomposition, ICL, and edit samples.

Stage 1 teaches fragment discrimination (rank fragments, spot the weakest,
do both from demonstrations alone); stage 2 teaches edit generation (emit a
modification block); the multi-turn variant chains verified trajectories.
Every emitter is a deterministic function of its inputs and the supplied
generator, so a fixed seed reproduces the stream byte for byte.
"""

from __future__ import annotations

import random
from collections import defaultdict
from collections.abc import Iterator
from dataclasses import dataclass
from pathlib import Path
from typing import Any

from forge.corpus.templates import (
    DECOMP_INSTRUCTION,
    MULTITURN_INSTRUCTION,
    NODESC_PROP,
    PROPERTY_DISPLAY,
    STAGE2_DIRECT_INSTRUCTION,
    STAGE2_ICL_INSTRUCTION,
    fragment_list_line,
    molecule_line,
    rank_instruction,
    ranked_answer,
    vulnerability_instruction,
    wrap,
)
from forge.editgrammar import MultiTurnAnswer, block_from_pair, render_answer, render_block
from forge.errors import ForgeError
from forge.fragment.attribution import attribute, auto_decompose
from forge.hashing import hash_ints, hash_str
from forge.mmpa import MmpPair
from forge.molgraph.canon import canonical_smiles
from forge.molgraph.types import MolGraph
from forge.props import PropertyOracle
from forge.smeplus import EditPair, Trajectory

STAGE1_FAMILIES = ("rdkit_attr", "oracle_rank", "decomp", "icl_rank", "external")
STAGE2_FAMILIES = ("smeplus", "mmp")

_STAGE1_DEFAULT = {
    "rdkit_attr": 0.25,
    "oracle_rank": 0.15,
    "decomp": 0.10,
    "icl_rank": 0.35,
    "external": 0.15,
}
_STAGE2_DEFAULT = {"smeplus": 0.40, "mmp": 0.60}

VULNERABILITY_P = 0.25
SCORE_P = 0.35
MMP_ICL_SHARE = 5 / 6
ICL_VARIANTS = (("icl_desc", 0.5), ("icl_nodesc", 0.3), ("direct", 0.2))
DEMOS_K = 5


class EmptySource(ForgeError):
    """A family has positive ratio but its sample source is empty."""


@dataclass(frozen=True, slots=True)
class CorpusSample:
    """One instruction/input/output training example."""

    instruction: str
    input: str
    output: str
    meta: tuple[tuple[str, str], ...]

    def to_json(self) -> dict[str, Any]:
        return {
            "instruction": self.instruction,
            "input": self.input,
            "output": self.output,
            "meta": dict(self.meta),
        }


def _meta(stage: str, family: str, prop: str, variant: str) -> tuple[tuple[str, str], ...]:
    return (
        ("stage", stage),
        ("family", family),
        ("property", prop),
        ("variant", variant),
    )


@dataclass(frozen=True, slots=True)
class MixtureSpec:
    """Family-to-ratio mixture; ratios must sum to 1."""

    ratios: tuple[tuple[str, float], ...]

    def __post_init__(self) -> None:
        total = sum(r for _, r in self.ratios)
        if abs(total - 1.0) > 1e-9:
            raise ForgeError(f"mixture ratios sum to {total}, expected 1")
        if any(r < 0 for _, r in self.ratios):
            raise ForgeError("mixture ratios must be non-negative")

    @classmethod
    def stage1_default(cls) -> MixtureSpec:
        return cls(ratios=tuple(_STAGE1_DEFAULT.items()))

    @classmethod
    def stage2_default(cls) -> MixtureSpec:
        return cls(ratios=tuple(_STAGE2_DEFAULT.items()))

    @classmethod
    def from_file(cls, path: str | Path) -> MixtureSpec:
        """Read `family = ratio` lines; '#' comments and blanks ignored."""
        ratios = []
        for line_num, line in enumerate(Path(path).read_text().splitlines(), 1):
            line = line.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ForgeError(f"line {line_num}: expected 'family = ratio'")
            name, _, value = line.partition("=")
            try:
                ratios.append((name.strip(), float(value)))
            except ValueError as exc:
                raise ForgeError(f"line {line_num}: bad ratio {value.strip()!r}") from exc
        return cls(ratios=tuple(ratios))

    def draw(self, rng: random.Random) -> str:
        roll = rng.random()
        acc = 0.0
        for family, ratio in self.ratios:
            acc += ratio
            if roll < acc:
                return family
        return self.ratios[-1][0]


@dataclass(frozen=True, slots=True)
class AttrRecord:
    """Attribution of one (molecule, property, removal) triple.

    Attributes:
        smiles: Canonical molecule.
        property: Property name.
        removal: Removal mode the deltas were computed with.
        method: Decomposition method used.
        fragments: Fragment strings in decomposition order.
        scores: Per-atom attribution scores aligned with ``fragments``.
    """

    smiles: str
    property: str
    removal: str
    method: str
    fragments: tuple[str, ...]
    scores: tuple[float, ...]

    def to_json(self) -> dict[str, Any]:
        return {
            "smiles": self.smiles,
            "property": self.property,
            "removal": self.removal,
            "method": self.method,
            "fragments": list(self.fragments),
            "scores": list(self.scores),
        }

    @classmethod
    def from_json(cls, data: dict[str, Any]) -> AttrRecord:
        return cls(
            smiles=data["smiles"],
            property=data["property"],
            removal=data["removal"],
            method=data["method"],
            fragments=tuple(data["fragments"]),
            scores=tuple(float(s) for s in data["scores"]),
        )


def collect_attr_records(
    corpus: list[MolGraph],
    properties: tuple[str, ...],
    seed: int = 0,
    removals: tuple[str, ...] = ("replace_with_h", "delete_with_cap"),
) -> list[AttrRecord]:
    """Attribute every molecule under every (property, removal) pair.

    The decomposition method is drawn once per molecule from a stream
    seeded by its canonical string, so all of a molecule's records share
    one fragmentation.
    """
    records = []
    for mol in corpus:
        canon = canonical_smiles(mol)
        rng = random.Random(hash_ints([seed, hash_str(canon)]))
        decomp = auto_decompose(mol, rng)
        if len(decomp.fragments) < 2:
            continue
        for prop in properties:
            oracle = PropertyOracle(prop, "higher_better")
            for removal in removals:
                recs = attribute(mol, decomp, oracle, removal)
                records.append(
                    AttrRecord(
                        smiles=canon,
                        property=prop,
                        removal=removal,
                        method=decomp.method,
                        fragments=tuple(r.fragment.smiles() for r in recs),
                        scores=tuple(r.per_atom_score for r in recs),
                    )
                )
    return records


def _normalized(scores: tuple[float, ...]) -> list[float]:
    lo, hi = min(scores), max(scores)
    if lo == hi:
        return [1.0] * len(scores)
    return [(s - lo) / (hi - lo) for s in scores]


def _ranked(record: AttrRecord) -> list[tuple[str, float]]:
    """(fragment, normalized score) best first; ties break on the string."""
    norm = _normalized(record.scores)
    order = sorted(
        range(len(norm)), key=lambda i: (-norm[i], record.fragments[i])
    )
    return [(record.fragments[i], norm[i]) for i in order]


def _rank_output(record: AttrRecord, scored: bool) -> str:
    ranked = _ranked(record)
    frags = [f for f, _ in ranked]
    return ranked_answer(frags, [s for _, s in ranked] if scored else None)


def _vuln_output(record: AttrRecord, scored: bool) -> str:
    frag, score = _ranked(record)[-1]
    return ranked_answer([frag], [score] if scored else None)


def _query_text(record: AttrRecord) -> str:
    return f"{molecule_line(record.smiles)}\n{fragment_list_line(record.fragments)}"


def _attr_sample(
    family: str, record: AttrRecord, vuln: bool, scored: bool
) -> CorpusSample:
    prop = PROPERTY_DISPLAY[record.property]
    if vuln:
        instruction = vulnerability_instruction(prop, scored)
        output = _vuln_output(record, scored)
    else:
        instruction = rank_instruction(prop, scored)
        output = _rank_output(record, scored)
    variant = ("vulnerability" if vuln else "ranking") + ("_scored" if scored else "")
    return CorpusSample(
        instruction=instruction,
        input=_query_text(record),
        output=output,
        meta=_meta("stage1", family, record.property, variant),
    )


def _demo_text(record: AttrRecord, vuln: bool, scored: bool) -> str:
    answer = _vuln_output(record, scored) if vuln else _rank_output(record, scored)
    return f"{_query_text(record)}\nAnswer: {answer}"


def _mmp_rank_frags(pair: MmpPair) -> tuple[list[str], list[float]]:
    """Candidate fragments of a pair ranked by normalized activity."""
    ranked = sorted(
        [(pair.frag_tgt, pair.score_tgt), (pair.frag_src, pair.score_src)],
        key=lambda t: (-t[1], t[0]),
    )
    return [f for f, _ in ranked], [s for _, s in ranked]


def _mmp_query_text(pair: MmpPair) -> str:
    frags = sorted((pair.frag_src, pair.frag_tgt))
    return f"{molecule_line(pair.src_smiles)}\n{fragment_list_line(frags)}"


def _mmp_answer(pair: MmpPair, vuln: bool, scored: bool) -> str:
    frags, scores = _mmp_rank_frags(pair)
    if vuln:
        frags, scores = frags[-1:], scores[-1:]
    return ranked_answer(frags, scores if scored else None)


def _icl_sample(
    rng: random.Random,
    attr_records: list[AttrRecord],
    attr_cells: dict[tuple[str, str], list[AttrRecord]],
    mmp_pairs: list[MmpPair],
    mmp_targets: dict[str, list[MmpPair]],
) -> CorpusSample:
    use_mmp = bool(mmp_pairs) and rng.random() < MMP_ICL_SHARE
    roll = rng.random()
    acc = 0.0
    variant = ICL_VARIANTS[-1][0]
    for name, share in ICL_VARIANTS:
        acc += share
        if roll < acc:
            variant = name
            break
    vuln = rng.random() < VULNERABILITY_P
    scored = rng.random() < SCORE_P

    if use_mmp:
        pair = rng.choice(mmp_pairs)
        prop_shown = f"activity against {pair.target_id}"
        query = _mmp_query_text(pair)
        output = _mmp_answer(pair, vuln, scored)
        peers = mmp_targets[pair.target_id]
        demo_pool = [p for p in peers if p is not pair] or peers
        demos = [
            f"{_mmp_query_text(d)}\nAnswer: {_mmp_answer(d, vuln, scored)}"
            for d in (rng.choice(demo_pool) for _ in range(DEMOS_K))
        ]
        prop_name = "activity"
    else:
        record = rng.choice(attr_records)
        prop_shown = PROPERTY_DISPLAY[record.property]
        query = _query_text(record)
        output = (
            _vuln_output(record, scored) if vuln else _rank_output(record, scored)
        )
        peers = attr_cells[(record.property, record.removal)]
        demo_pool = [r for r in peers if r is not record] or peers
        demos = [
            _demo_text(d, vuln, scored)
            for d in (rng.choice(demo_pool) for _ in range(DEMOS_K))
        ]
        prop_name = record.property

    shown = prop_shown if variant != "icl_nodesc" else NODESC_PROP
    instruction = (
        vulnerability_instruction(shown, scored)
        if vuln
        else rank_instruction(shown, scored)
    )
    text = query if variant == "direct" else "\n\n".join([*demos, query])
    kind = ("vulnerability" if vuln else "ranking") + ("_scored" if scored else "")
    return CorpusSample(
        instruction=instruction,
        input=text,
        output=output,
        meta=_meta(
            "stage1",
            "icl_rank",
            prop_name,
            f"{variant}|{'mmp' if use_mmp else 'rdkit'}|{kind}",
        ),
    )


def emit_stage1(
    attr_records: list[AttrRecord],
    mmp_pairs: list[MmpPair],
    spec: MixtureSpec,
    total: int,
    rng: random.Random,
    external_records: list[dict[str, Any]] | None = None,
) -> Iterator[CorpusSample]:
    """Emit the stage-1 mixture.

    Args:
        attr_records: Attribution source (rdkit_attr, oracle_rank, decomp,
            and the demonstration pool for icl_rank).
        mmp_pairs: Activity pairs for the MMP share of icl_rank.
        spec: Family mixture; families are drawn per sample.
        total: Number of samples.
        rng: Seeded generator; the stream is a pure function of it.
        external_records: Pass-through instruction records (dicts holding
            instruction/input/output) for the external family.

    Yields:
        Samples in emission order.

    Raises:
        EmptySource: A family has positive ratio but no source data.
    """
    external_records = external_records or []
    ratios = dict(spec.ratios)
    needs_attr = ("rdkit_attr", "oracle_rank", "decomp", "icl_rank")
    if any(ratios.get(f, 0) > 0 for f in needs_attr) and not attr_records:
        raise EmptySource("attribution records required but empty")
    if ratios.get("external", 0) > 0 and not external_records:
        raise EmptySource("external records required but empty")

    attr_cells: defaultdict[tuple[str, str], list[AttrRecord]] = defaultdict(list)
    for record in attr_records:
        attr_cells[(record.property, record.removal)].append(record)
    mmp_targets: defaultdict[str, list[MmpPair]] = defaultdict(list)
    for pair in mmp_pairs:
        mmp_targets[pair.target_id].append(pair)

    for _ in range(total):
        family = spec.draw(rng)
        if family == "rdkit_attr":
            record = rng.choice(attr_records)
            vuln = rng.random() < VULNERABILITY_P
            scored = rng.random() < SCORE_P
            yield _attr_sample("rdkit_attr", record, vuln, scored)
        elif family == "oracle_rank":
            record = rng.choice(attr_records)
            scored = rng.random() < SCORE_P
            yield _attr_sample("oracle_rank", record, False, scored)
        elif family == "decomp":
            record = rng.choice(attr_records)
            yield CorpusSample(
                instruction=DECOMP_INSTRUCTION,
                input=molecule_line(record.smiles),
                output=wrap(".".join(record.fragments)),
                meta=_meta("stage1", "decomp", record.property, record.method),
            )
        elif family == "icl_rank":
            yield _icl_sample(rng, attr_records, attr_cells, mmp_pairs, mmp_targets)
        else:
            record = rng.choice(external_records)
            yield CorpusSample(
                instruction=str(record.get("instruction", "")),
                input=str(record.get("input", "")),
                output=str(record.get("output", "")),
                meta=_meta("stage1", "external", "", "passthrough"),
            )


def _stage2_display(pair: EditPair) -> str:
    if isinstance(pair, MmpPair):
        return f"activity against {pair.target_id}"
    return PROPERTY_DISPLAY[pair.property]


def emit_stage2(
    smeplus_pairs: list[EditPair],
    mmp_pairs: list[MmpPair],
    spec: MixtureSpec,
    total: int,
    rng: random.Random,
    score_suffix_p: float = 0.8,
    direct_p: float = 0.1,
) -> Iterator[CorpusSample]:
    """Emit the stage-2 single-step edit mixture.

    Each sample renders one mined pair as a modification block; the value
    suffix appears with probability ``score_suffix_p`` and the prompt is
    direct with probability ``direct_p`` (otherwise it embeds K=5
    demonstrations from the same property or target). Samples duplicating
    an earlier (instruction, input) are redrawn.

    Raises:
        EmptySource: A family has positive ratio but no pairs.
    """
    ratios = dict(spec.ratios)
    if ratios.get("smeplus", 0) > 0 and not smeplus_pairs:
        raise EmptySource("smeplus pairs required but empty")
    if ratios.get("mmp", 0) > 0 and not mmp_pairs:
        raise EmptySource("mmp pairs required but empty")

    by_prop: defaultdict[str, list[EditPair]] = defaultdict(list)
    for pair in smeplus_pairs:
        by_prop[pair.property].append(pair)
    by_target: defaultdict[str, list[MmpPair]] = defaultdict(list)
    for pair in mmp_pairs:
        by_target[pair.target_id].append(pair)

    seen: set[tuple[str, str]] = set()
    for _ in range(total):
        # The variant flags are drawn once per slot; duplicate-input redraws
        # replace only the pair and demonstrations, so the emitted suffix and
        # direct rates stay at their configured probabilities.
        family = spec.draw(rng)
        suffix = rng.random() < score_suffix_p
        direct = rng.random() < direct_p
        pool: list[EditPair] = smeplus_pairs if family == "smeplus" else mmp_pairs
        for attempt in range(1000):
            pair = rng.choice(pool)
            if direct:
                instruction = STAGE2_DIRECT_INSTRUCTION.format(
                    prop=_stage2_display(pair)
                )
                text = molecule_line(pair.src_smiles)
            else:
                instruction = STAGE2_ICL_INSTRUCTION
                peers = (
                    by_target[pair.target_id]
                    if isinstance(pair, MmpPair)
                    else by_prop[pair.property]
                )
                demo_pool = [p for p in peers if p is not pair] or peers
                demos = [
                    f"{molecule_line(d.src_smiles)}\n"
                    f"{render_block(block_from_pair(d, with_value=suffix))}"
                    for d in (rng.choice(demo_pool) for _ in range(DEMOS_K))
                ]
                text = "\n\n".join([*demos, molecule_line(pair.src_smiles)])
            if (instruction, text) not in seen:
                break
        else:
            raise EmptySource(
                "could not draw an unseen (instruction, input); "
                "sources too small for the requested total"
            )
        seen.add((instruction, text))
        output = render_block(block_from_pair(pair, with_value=suffix))
        variant = ("direct" if direct else "icl") + ("+value" if suffix else "")
        yield CorpusSample(
            instruction=instruction,
            input=text,
            output=output,
            meta=_meta("stage2", family, pair.property, variant),
        )


def emit_multiturn(
    trajectories: list[Trajectory],
    per_property_target: int,
    rng: random.Random,
) -> Iterator[CorpusSample]:
    """Emit each property's trajectories upsampled to a common count.

    Every property contributes exactly ``per_property_target`` samples:
    whole copies of its trajectory list plus a random remainder drawn
    without replacement.
    """
    groups: defaultdict[str, list[Trajectory]] = defaultdict(list)
    for traj in trajectories:
        groups[traj.steps[0].property].append(traj)
    for prop in sorted(groups):
        trajs = groups[prop]
        copies, remainder = divmod(per_property_target, len(trajs))
        chosen = trajs * copies + rng.sample(trajs, remainder)
        display = PROPERTY_DISPLAY.get(prop, prop)
        for traj in chosen:
            answer = MultiTurnAnswer(
                blocks=tuple(block_from_pair(s) for s in traj.steps)
            )
            yield CorpusSample(
                instruction=MULTITURN_INSTRUCTION.format(prop=display),
                input=molecule_line(traj.steps[0].src_smiles),
                output=render_answer(answer),
                meta=_meta("multiturn", "smeplus", prop, f"steps{len(traj.steps)}"),
            )
