"""Budgeted black-box optimization over verified molecular edits.

The loop keeps a replay buffer of scored (source, edit, result) tuples,
samples demonstrations biased toward high scores, asks a proposal policy
for candidate edits, verifies and constraint-checks them, and spends one
oracle call per surviving unique candidate until the budget is gone.
"""

from __future__ import annotations

import math
import random
import shlex
import subprocess
from collections.abc import Callable, Sequence
from dataclasses import dataclass, field
from typing import Protocol

from forge.editgrammar import ModificationBlock, verify_block
from forge.errors import ForgeError
from forge.fragment.attribution import attribute, auto_decompose
from forge.hashing import hash_ints, hash_str
from forge.molgraph.canon import canonical_smiles
from forge.molgraph.fingerprint import morgan_fingerprint, tanimoto
from forge.molgraph.parser import parse_smiles
from forge.molgraph.types import MolGraph
from forge.props import PropertyOracle, evaluate
from forge.smeplus import ReplacementPool, apply_edit, normalized_fragment_string

Oracle = Callable[[MolGraph], float]


class EmptyBuffer(ForgeError):
    """Demonstrations were requested from an empty replay buffer."""


@dataclass(frozen=True, slots=True)
class ReplayEntry:
    """One scored step; seeds carry ``block=None``.

    Attributes:
        src_smiles: Canonical molecule the edit was applied to.
        block: The applied modification, or None for a seed entry.
        result_smiles: Canonical resulting molecule.
        score: Oracle score of the result.
    """

    src_smiles: str
    block: ModificationBlock | None
    result_smiles: str
    score: float

    def edit_string(self) -> str:
        if self.block is None:
            return ""
        return f"{self.block.frag_src}>>{self.block.frag_tgt}"


class ReplayBuffer:
    """Score-ordered store, capacity-bounded, deduplicated on result."""

    def __init__(self, capacity: int = 200) -> None:
        self.capacity = capacity
        self.entries: list[ReplayEntry] = []
        self._results: set[str] = set()

    def __len__(self) -> int:
        return len(self.entries)

    def add(self, entry: ReplayEntry) -> bool:
        """Insert unless the result is already present; trim to capacity.

        Returns:
            True when the entry was inserted.
        """
        if entry.result_smiles in self._results:
            return False
        self.entries.append(entry)
        self.entries.sort(key=lambda e: (-e.score, e.result_smiles))
        self._results.add(entry.result_smiles)
        survived = True
        while len(self.entries) > self.capacity:
            dropped = self.entries.pop()
            self._results.discard(dropped.result_smiles)
            if dropped is entry:
                survived = False
        return survived

    def best(self) -> ReplayEntry:
        if not self.entries:
            raise EmptyBuffer("replay buffer is empty")
        return self.entries[0]


@dataclass(frozen=True, slots=True)
class SearchConfig:
    """Loop parameters.

    Attributes:
        budget: Total oracle calls allowed (seed scoring included).
        k: Demonstrations sampled per round.
        candidates_per_step: Proposals requested from the policy per round.
        similarity_floor: Minimum Tanimoto similarity to any seed, or None.
        extra_constraints: (property, lower, upper) bounds every scored
            candidate must satisfy; either bound may be None.
        sampling_temperature: Demo-sampling softmax temperature.
        seed: RNG seed for demo sampling.
    """

    budget: int = 1000
    k: int = 5
    candidates_per_step: int = 8
    similarity_floor: float | None = None
    extra_constraints: tuple[tuple[str, float | None, float | None], ...] = ()
    sampling_temperature: float = 0.7
    seed: int = 0

    def __post_init__(self) -> None:
        if self.budget <= 0:
            raise ForgeError("budget must be positive")
        floor = self.similarity_floor
        if floor is not None and not 0.0 <= floor <= 1.0:
            raise ForgeError("similarity floor must lie in [0, 1]")


class ProposalPolicy(Protocol):
    def propose(
        self, current: MolGraph, demos: list[ReplayEntry], n: int
    ) -> list[ModificationBlock]: ...


@dataclass(frozen=True, slots=True)
class CallRecord:
    smiles: str
    score: float
    round: int


@dataclass(frozen=True, slots=True)
class SearchReport:
    """Outcome of one optimization run."""

    config: SearchConfig
    calls: tuple[CallRecord, ...]
    best_smiles: str
    best_score: float
    top10_auc: float
    rounds: int
    policy_failure: bool

    def to_json(self) -> dict:
        return {
            "config": {
                "budget": self.config.budget,
                "k": self.config.k,
                "candidates_per_step": self.config.candidates_per_step,
                "similarity_floor": self.config.similarity_floor,
                "extra_constraints": [list(c) for c in self.config.extra_constraints],
                "sampling_temperature": self.config.sampling_temperature,
                "seed": self.config.seed,
            },
            "calls": [[c.smiles, c.score, c.round] for c in self.calls],
            "best": {"smiles": self.best_smiles, "score": self.best_score},
            "top10_auc": self.top10_auc,
            "rounds": self.rounds,
            "policy_failure": self.policy_failure,
        }


def sample_demos(
    buffer: ReplayBuffer, k: int, temperature: float, rng: random.Random
) -> list[ReplayEntry]:
    """Draw up to ``k`` entries without replacement, biased toward score.

    Probabilities follow exp((score - max) / temperature); temperatures at
    or below zero degenerate to the greedy top-k. Entries repeating an
    already-drawn frag_src>>frag_tgt edit are passed over while entries
    with fresh edits remain.

    Raises:
        EmptyBuffer: The buffer holds no entries.
    """
    if not buffer.entries:
        raise EmptyBuffer("replay buffer is empty")
    remaining = list(buffer.entries)
    chosen: list[ReplayEntry] = []
    seen_edits: set[str] = set()
    while remaining and len(chosen) < k:
        fresh = [e for e in remaining if e.edit_string() not in seen_edits]
        pool = fresh or remaining
        if temperature <= 1e-12:
            pick = pool[0]
        else:
            top = max(e.score for e in pool)
            weights = [math.exp((e.score - top) / temperature) for e in pool]
            roll = rng.random() * sum(weights)
            acc = 0.0
            pick = pool[-1]
            for entry, w in zip(pool, weights):
                acc += w
                if roll < acc:
                    pick = entry
                    break
        chosen.append(pick)
        seen_edits.add(pick.edit_string())
        remaining.remove(pick)
    return chosen


def property_oracle(name: str) -> Oracle:
    """Wrap a rule-based property as a maximization oracle."""
    oracle = PropertyOracle(name, "higher_better")
    return lambda mol: evaluate(oracle, mol)


class ExternalOracle:
    """Line-protocol oracle over a subprocess: SMILES in, score out.

    The child reads one SMILES per line on stdin and must answer one
    float per line on stdout. Use as a context manager or call
    :meth:`close` explicitly.
    """

    def __init__(self, command: str) -> None:
        self._proc = subprocess.Popen(
            shlex.split(command),
            stdin=subprocess.PIPE,
            stdout=subprocess.PIPE,
            text=True,
            bufsize=1,
        )

    def __call__(self, mol: MolGraph) -> float:
        assert self._proc.stdin is not None and self._proc.stdout is not None
        self._proc.stdin.write(canonical_smiles(mol) + "\n")
        self._proc.stdin.flush()
        line = self._proc.stdout.readline()
        if not line:
            raise ForgeError("external oracle closed its output stream")
        try:
            return float(line.strip())
        except ValueError as exc:
            raise ForgeError(f"external oracle returned {line.strip()!r}") from exc

    def close(self) -> None:
        if self._proc.stdin:
            self._proc.stdin.close()
        self._proc.wait(timeout=10)

    def __enter__(self) -> ExternalOracle:
        return self

    def __exit__(self, *exc_info: object) -> None:
        self.close()


@dataclass
class _EditTablePolicy:
    pool: ReplacementPool
    surrogate: PropertyOracle | None
    radius: int
    removal: str
    per_fragment: int = 4
    _table_cache: dict[str, list[tuple[str, str]]] = field(default_factory=dict)

    def _fragment_order(self, current: MolGraph) -> list:
        """Decompose and order fragments weakest first."""
        rng = random.Random(hash_ints([hash_str(canonical_smiles(current))]))
        decomp = auto_decompose(current, rng)
        frags = list(decomp.fragments)
        if self.surrogate is not None:
            records = attribute(current, decomp, self.surrogate, self.removal)
            scored = [(r.per_atom_score, i) for i, r in enumerate(records)]
        else:
            scored = []
            for i, frag in enumerate(frags):
                key = normalized_fragment_string(frag)
                cands = self.pool.global_pool.get(key, ())
                gain = max((d for _, d in cands), default=0.0)
                # No surrogate: a fragment is weak when the pool promises
                # large improvement for replacing it.
                scored.append((-gain, i))
        scored.sort(key=lambda t: (t[0], frags[t[1]].smiles()))
        return [frags[i] for _, i in scored]

    def _candidates(self, current: MolGraph, frag) -> list[str]:
        from forge.context import NoAttachment, environment_key

        key = normalized_fragment_string(frag)
        try:
            env = environment_key(current, frag, self.radius)
            binned = self.pool.by_env.get(env, ())
        except (NoAttachment, ForgeError):
            binned = ()
        ranked = [s for s, _ in binned]
        if not ranked:
            ranked = [s for s, _ in self.pool.global_pool.get(key, ())]
        return [t for t in ranked if t != key][: self.per_fragment]

    def _table_edits(self, current: MolGraph) -> list[tuple[str, str]]:
        """Weakness-ordered (frag_src, frag_tgt) table, cached per molecule."""
        canonical = canonical_smiles(current)
        cached = self._table_cache.get(canonical)
        if cached is None:
            cached = []
            for frag in self._fragment_order(current):
                frag_src = normalized_fragment_string(frag)
                for frag_tgt in self._candidates(current, frag):
                    cached.append((frag_src, frag_tgt))
            self._table_cache[canonical] = cached
        return cached

    def propose(
        self, current: MolGraph, demos: list[ReplayEntry], n: int
    ) -> list[ModificationBlock]:
        blocks: list[ModificationBlock] = []
        seen: set[tuple[str, str]] = set()

        def try_edit(frag_src: str, frag_tgt: str) -> None:
            if len(blocks) >= n or (frag_src, frag_tgt) in seen:
                return
            seen.add((frag_src, frag_tgt))
            try:
                result = apply_edit(current, frag_src, frag_tgt)
            except ForgeError:
                return
            blocks.append(
                ModificationBlock(
                    frag_src=frag_src,
                    frag_tgt=frag_tgt,
                    result_smiles=canonical_smiles(result),
                )
            )

        # Demonstrated edits first, best demo score first.
        for entry in sorted(demos, key=lambda e: -e.score):
            if entry.block is not None:
                try_edit(entry.block.frag_src, entry.block.frag_tgt)
        for frag_src, frag_tgt in self._table_edits(current):
            try_edit(frag_src, frag_tgt)
            if len(blocks) >= n:
                break
        return blocks


def edit_table_policy(
    pool: ReplacementPool,
    surrogate: PropertyOracle | None = None,
    radius: int = 2,
    removal: str = "replace_with_h",
) -> ProposalPolicy:
    """Build the table-driven proposal policy.

    The policy decomposes the current molecule, orders fragments weakest
    first (by surrogate attribution when configured, otherwise by the
    pool's promised improvement), and proposes replacements from the
    environment-keyed pool with global fallback. Edits seen in
    demonstrations are promoted ahead of table proposals. Falls through
    to the next-weakest fragment when a fragment has no applicable entry.
    """
    if not pool.by_env and not pool.global_pool:
        raise ForgeError("replacement pool is empty")
    return _EditTablePolicy(pool, surrogate, radius, removal)


def _top10_auc(scores: Sequence[float]) -> float:
    """Mean over calls of the running top-10 average (PMO metric shape)."""
    if not scores:
        return 0.0
    running: list[float] = []
    acc = 0.0
    for s in scores:
        running.append(s)
        running.sort(reverse=True)
        del running[10:]
        acc += sum(running) / len(running)
    return acc / len(scores)


def run_optimization(
    seed_mols: list[MolGraph],
    oracle: Oracle,
    policy: ProposalPolicy,
    cfg: SearchConfig,
) -> SearchReport:
    """Run the replay-buffer loop until the oracle budget is spent.

    Every seed is scored in round 0. Each later round takes the buffer's
    best molecule, samples demonstrations, verifies the policy's
    proposals, drops candidates failing the similarity floor or extra
    property bounds, and scores the survivors — one oracle call per
    unique molecule across the whole run. Ten consecutive rounds without
    a valid candidate terminate the run with ``policy_failure`` set.

    Args:
        seed_mols: Non-empty list of starting molecules.
        oracle: Black-box scoring function (higher is better).
        policy: Proposal policy; never sees the oracle.
        cfg: Loop parameters.

    Returns:
        Report with the call log, best molecule, and top-10 AUC.
    """
    if not seed_mols:
        raise ForgeError("at least one seed molecule is required")
    rng = random.Random(cfg.seed)
    buffer = ReplayBuffer()
    calls: list[CallRecord] = []
    scored: dict[str, float] = {}
    seed_fps = [morgan_fingerprint(m) for m in seed_mols]

    def spend(mol: MolGraph, smiles: str, rnd: int) -> float | None:
        if len(calls) >= cfg.budget:
            return None
        score = oracle(mol)
        calls.append(CallRecord(smiles=smiles, score=score, round=rnd))
        scored[smiles] = score
        return score

    for mol in seed_mols:
        smiles = canonical_smiles(mol)
        if smiles in scored:
            continue
        score = spend(mol, smiles, 0)
        if score is None:
            break
        buffer.add(ReplayEntry(smiles, None, smiles, score))

    failures = 0
    policy_failure = False
    rnd = 0
    current_smiles: str | None = None
    current: MolGraph | None = None
    while len(calls) < cfg.budget and buffer.entries:
        rnd += 1
        current_entry = buffer.best()
        if current_entry.result_smiles != current_smiles:
            # Keep the graph object across rounds so per-graph caches
            # (canonical form, applied edits) survive stagnant rounds.
            current_smiles = current_entry.result_smiles
            current = parse_smiles(current_smiles)
        demos = sample_demos(buffer, cfg.k, cfg.sampling_temperature, rng)
        proposals = policy.propose(current, demos, cfg.candidates_per_step)
        any_scored = False
        for block in proposals:
            if verify_block(current, block) != "ok":
                continue
            result = apply_edit(current, block.frag_src, block.frag_tgt)
            smiles = canonical_smiles(result)
            if smiles in scored:
                continue
            if cfg.similarity_floor is not None:
                fp = morgan_fingerprint(result)
                sim = max(tanimoto(fp, sfp) for sfp in seed_fps)
                if sim < cfg.similarity_floor:
                    continue
            if not _within_bounds(result, cfg.extra_constraints):
                continue
            score = spend(result, smiles, rnd)
            if score is None:
                break
            any_scored = True
            buffer.add(ReplayEntry(current_entry.result_smiles, block, smiles, score))
        if any_scored:
            failures = 0
        else:
            failures += 1
            if failures >= 10:
                policy_failure = True
                break

    best = max(calls, key=lambda c: (c.score, c.smiles))
    return SearchReport(
        config=cfg,
        calls=tuple(calls),
        best_smiles=best.smiles,
        best_score=best.score,
        top10_auc=_top10_auc([c.score for c in calls]),
        rounds=rnd,
        policy_failure=policy_failure,
    )


def _within_bounds(
    mol: MolGraph,
    constraints: tuple[tuple[str, float | None, float | None], ...],
) -> bool:
    for prop, lo, hi in constraints:
        value = evaluate(PropertyOracle(prop, "higher_better"), mol)
        if lo is not None and value < lo:
            return False
        if hi is not None and value > hi:
            return False
    return True
