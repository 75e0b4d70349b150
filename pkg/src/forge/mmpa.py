"""Matched-molecular-pair extraction from an activity table.

Molecules measured on the same target are fragmented at every acyclic
single bond; two molecules sharing the constant side and differing in the
variable side form a pair, oriented from lower to higher activity. Targets
whose description matches a leakage keyword are excluded up front.
"""

from __future__ import annotations

import csv
import math
from collections import defaultdict
from dataclasses import dataclass
from pathlib import Path
from typing import Any

from forge.context import environment_key
from forge.errors import ForgeError
from forge.fragment.types import Fragment, apply_cuts
from forge.molgraph.canon import canonical_smiles
from forge.molgraph.parser import normalize, parse_smiles
from forge.molgraph.types import MolGraph
from forge.props import normalize_score
from forge.smeplus import EditPair

LEAKAGE_KEYWORDS = ("JNK", "DRD", "GSK")

_COLUMNS = ("smiles", "target_id", "target_desc", "pchembl")


class MalformedCsv(ForgeError):
    """The activity table is missing columns or holds unreadable values."""


@dataclass(frozen=True, slots=True)
class ActivityRecord:
    """One measured molecule.

    Attributes:
        smiles: Molecule as given in the table.
        target_id: Opaque target identifier rows are grouped by.
        target_desc: Free-text target description (leakage filtering).
        pchembl: Negative log activity; finite.
    """

    smiles: str
    target_id: str
    target_desc: str
    pchembl: float


@dataclass(frozen=True, slots=True)
class MmpPair(EditPair):
    """An edit pair mined from measured activity, tagged with its target."""

    target_id: str

    def to_json(self) -> dict[str, Any]:
        # Explicit base call: zero-arg super() breaks inside slots=True
        # dataclasses because the decorator rebuilds the class.
        record = EditPair.to_json(self)
        record["target_id"] = self.target_id
        record["activity"] = self.score_tgt
        return record

    @classmethod
    def from_json(cls, record: dict[str, Any]) -> MmpPair:
        base = EditPair.from_json(record)
        return cls(
            **{f: getattr(base, f) for f in EditPair.__dataclass_fields__},
            target_id=record["target_id"],
        )


def load_activity_table(path: str | Path) -> tuple[list[ActivityRecord], list[int]]:
    """Read a `smiles,target_id,target_desc,pchembl` CSV.

    Args:
        path: CSV file with exactly that header.

    Returns:
        Parsed records, plus the 1-based line numbers of rows whose SMILES
        did not parse (those rows are skipped).

    Raises:
        MalformedCsv: On a missing column, a blank field, or a pchembl
            value that is not a finite number; the message carries the
            offending line number.
    """
    records: list[ActivityRecord] = []
    skipped: list[int] = []
    with open(path, newline="", encoding="utf-8") as handle:
        reader = csv.DictReader(handle)
        missing = [c for c in _COLUMNS if c not in (reader.fieldnames or ())]
        if missing:
            raise MalformedCsv(f"line 1: missing columns {', '.join(missing)}")
        for row in reader:
            line = reader.line_num
            values = [row.get(c) for c in _COLUMNS]
            if any(v is None or v == "" for v in values):
                raise MalformedCsv(f"line {line}: empty or missing field")
            smiles, target_id, target_desc, pchembl_text = values
            try:
                pchembl = float(pchembl_text)
            except ValueError as exc:
                raise MalformedCsv(
                    f"line {line}: pchembl {pchembl_text!r} is not a number"
                ) from exc
            if not math.isfinite(pchembl):
                raise MalformedCsv(f"line {line}: pchembl must be finite")
            try:
                normalize(parse_smiles(smiles))
            except ForgeError:
                skipped.append(line)
                continue
            records.append(ActivityRecord(smiles, target_id, target_desc, pchembl))
    return records, skipped


def leakage_filter(
    records: list[ActivityRecord],
    keywords: tuple[str, ...] = LEAKAGE_KEYWORDS,
) -> list[ActivityRecord]:
    """Drop records whose target description mentions a held-out family.

    Matching is case-insensitive substring, so "gsk-3 beta" is excluded by
    the keyword "GSK".

    Args:
        records: Records to filter.
        keywords: Exclusion keywords; non-empty.

    Returns:
        Records whose description matches no keyword.
    """
    lowered = [k.lower() for k in keywords]
    return [
        r
        for r in records
        if not any(k in r.target_desc.lower() for k in lowered)
    ]


def _single_cut_index(mol: MolGraph) -> list[tuple[str, str, Fragment]]:
    """(constant key, variable string, variable fragment) per admissible cut.

    Every acyclic non-aromatic single bond is cut once; each side in turn
    plays the variable fragment, subject to the size filters (at most 15
    heavy atoms and at most 40% of the parent's heavy atoms).
    """
    parent_heavy = len(mol)
    out = []
    for bond in mol.bonds:
        if bond.aromatic or bond.order != 1 or mol.edge_in_ring(bond.a, bond.b):
            continue
        decomp = apply_cuts(mol, [(bond.a, bond.b)], "mmp")
        if len(decomp.fragments) != 2:
            continue
        for variable, constant in (
            (decomp.fragments[0], decomp.fragments[1]),
            (decomp.fragments[1], decomp.fragments[0]),
        ):
            heavy = variable.heavy_atoms
            if heavy > 15 or heavy > 0.4 * parent_heavy:
                continue
            out.append((constant.smiles(), variable.smiles(), variable))
    return out


def mine_mmps(
    records: list[ActivityRecord],
    radius: int = 2,
    min_pchembl: float = 5.0,
) -> list[MmpPair]:
    """Mine low-to-high matched pairs within each target.

    Args:
        records: Filtered activity records.
        radius: Environment radius recorded on each pair.
        min_pchembl: Floor both sides of a pair must reach.

    Returns:
        Pairs sorted by (target, source, target molecule, edit); the set is
        invariant under input row permutation. Scores are the target's
        min-max normalized pchembl values.
    """
    by_target: defaultdict[str, list[ActivityRecord]] = defaultdict(list)
    for record in records:
        by_target[record.target_id].append(record)

    pairs: dict[tuple[str, str, str, str, str], MmpPair] = {}
    for target_id in sorted(by_target):
        rows = by_target[target_id]
        if len(rows) < 2:
            continue
        lo = min(r.pchembl for r in rows)
        hi = max(r.pchembl for r in rows)
        if lo == hi:
            continue
        entries: defaultdict[str, dict[str, tuple[ActivityRecord, MolGraph, Fragment]]]
        entries = defaultdict(dict)
        for record in sorted(rows, key=lambda r: (-r.pchembl, r.smiles)):
            mol = normalize(parse_smiles(record.smiles))
            for constant, variable, frag in _single_cut_index(mol):
                # Highest-pchembl record wins a (constant, variable) slot,
                # keeping the result independent of input row order.
                entries[constant].setdefault(variable, (record, mol, frag))
        for constant in entries:
            slots = entries[constant]
            variables = sorted(slots)
            for i, var_a in enumerate(variables):
                for var_b in variables[i + 1 :]:
                    if slots[var_a][0].pchembl == slots[var_b][0].pchembl:
                        continue
                    if slots[var_a][0].pchembl < slots[var_b][0].pchembl:
                        src, tgt = (*slots[var_a], var_a), (*slots[var_b], var_b)
                    else:
                        src, tgt = (*slots[var_b], var_b), (*slots[var_a], var_a)
                    (rec_s, mol_s, frag_s, var_s) = src
                    (rec_t, mol_t, _, var_t) = tgt
                    if rec_s.pchembl < min_pchembl or rec_t.pchembl < min_pchembl:
                        continue
                    src_smiles = canonical_smiles(mol_s)
                    tgt_smiles = canonical_smiles(mol_t)
                    if src_smiles == tgt_smiles:
                        continue
                    key = environment_key(mol_s, frag_s, radius)
                    pair = MmpPair(
                        src_smiles=src_smiles,
                        tgt_smiles=tgt_smiles,
                        frag_src=var_s,
                        frag_tgt=var_t,
                        property="activity",
                        score_src=normalize_score(rec_s.pchembl, lo, hi),
                        score_tgt=normalize_score(rec_t.pchembl, lo, hi),
                        env_key=key,
                        from_global=False,
                        target_id=target_id,
                    )
                    pairs.setdefault(
                        (target_id, src_smiles, tgt_smiles, var_s, var_t), pair
                    )
    return [pairs[k] for k in sorted(pairs)]
