"""Context-binned fragment replacement mining and trajectory chaining.

Fragment occurrences across a corpus are indexed by their local attachment
environment. Replacements that improved the normalized property score at a
compatible site are proposed, re-applied, re-scored, and kept only when the
rebuilt molecule verifiably improves — yielding low-to-high edit pairs that
can be chained into short monotone trajectories.
"""

from __future__ import annotations

import random
from collections import defaultdict
from dataclasses import dataclass
from statistics import fmean
from typing import Any

from forge.context import EnvironmentKey, environment_key
from forge.errors import ForgeError
from forge.fragment.attribution import attribute, auto_decompose
from forge.fragment.types import Fragment, strip_labels
from forge.hashing import hash_ints, hash_str
from forge.molgraph.canon import canonical_ranks, canonical_smiles
from forge.molgraph.match import subgraph_match
from forge.molgraph.parser import normalize, parse_smiles
from forge.molgraph.types import Atom, Bond, MolGraph, StructureError, ValenceError
from forge.props import PropertyOracle, evaluate, normalize_score


class NoMatch(ForgeError):
    """The source fragment does not occur cleanly in the molecule."""


class LabelMismatch(ForgeError):
    """Source and target fragments carry different attachment label sets."""


@dataclass(frozen=True, slots=True)
class EditPair:
    """One verified low-to-high fragment replacement.

    Attributes:
        src_smiles: Canonical starting molecule.
        tgt_smiles: Canonical result of applying the edit to the source.
        frag_src: Canonical fragment string removed (with ``[k*]`` labels).
        frag_tgt: Canonical fragment string installed (same label set).
        property: Property name the scores refer to.
        score_src: Normalized source score in [0, 1].
        score_tgt: Normalized target score in [0, 1].
        env_key: Environment the replaced occurrence sat in.
        from_global: True when the replacement came from the global pool
            rather than the occurrence's environment bin.
    """

    src_smiles: str
    tgt_smiles: str
    frag_src: str
    frag_tgt: str
    property: str
    score_src: float
    score_tgt: float
    env_key: EnvironmentKey
    from_global: bool

    @property
    def improvement(self) -> float:
        return self.score_tgt - self.score_src

    @property
    def env_key_hex(self) -> str:
        """Radius byte followed by the 64-bit digest; lossless round-trip."""
        return f"{self.env_key.radius:02x}{self.env_key.digest:016x}"

    def to_json(self) -> dict[str, Any]:
        return {
            "src": self.src_smiles,
            "tgt": self.tgt_smiles,
            "frag_src": self.frag_src,
            "frag_tgt": self.frag_tgt,
            "property": self.property,
            "score_src": self.score_src,
            "score_tgt": self.score_tgt,
            "env_key_hex": self.env_key_hex,
            "from_global": self.from_global,
        }

    @classmethod
    def from_json(cls, record: dict[str, Any]) -> EditPair:
        hex_key = record["env_key_hex"]
        key = EnvironmentKey(radius=int(hex_key[:2], 16), digest=int(hex_key[2:], 16))
        return cls(
            src_smiles=record["src"],
            tgt_smiles=record["tgt"],
            frag_src=record["frag_src"],
            frag_tgt=record["frag_tgt"],
            property=record["property"],
            score_src=record["score_src"],
            score_tgt=record["score_tgt"],
            env_key=key,
            from_global=record["from_global"],
        )


@dataclass(frozen=True, slots=True)
class ReplacementPool:
    """Frozen index of fragment occurrences for replacement lookup.

    Attributes:
        by_env: Environment key -> (fragment, mean attribution delta) seen
            in that bin, best first; only bins with at least ``min_bin``
            occurrences appear.
        global_pool: Fragment -> compatible replacements (same attachment
            count) ranked by global mean attribution delta, best first.
    """

    by_env: dict[EnvironmentKey, list[tuple[str, float]]]
    global_pool: dict[str, list[tuple[str, float]]]


@dataclass(frozen=True, slots=True)
class Trajectory:
    """A chain of edit pairs with strictly increasing scores."""

    steps: tuple[EditPair, ...]


@dataclass(frozen=True, slots=True)
class MiningResult:
    """Mined pairs plus counters describing what was skipped and why."""

    pairs: tuple[EditPair, ...]
    counters: dict[str, int]


def normalized_fragment_string(frag: Fragment) -> str:
    """Canonical fragment string with labels renumbered 1..m canonically.

    Cut labels are assigned per host decomposition, so the same chemical
    fragment can arrive as ``[2*]`` in one molecule and ``[1*]`` in
    another. Renumbering dummies in canonical-rank order of the
    label-stripped graph makes occurrences comparable across hosts.
    """
    stripped = strip_labels(frag.graph)
    ranks = canonical_ranks(stripped)
    dummies = sorted(
        (i for i, a in enumerate(stripped.atoms) if a.is_dummy),
        key=lambda i: ranks[i],
    )
    new_label = {i: k for k, i in enumerate(dummies, start=1)}
    atoms = [
        Atom(element="*", attachment_label=new_label[i]) if a.is_dummy else a
        for i, a in enumerate(stripped.atoms)
    ]
    return canonical_smiles(MolGraph(atoms=atoms, bonds=list(stripped.bonds)))


def _molecule_rng(seed: int, canonical: str) -> random.Random:
    return random.Random(hash_ints([seed, hash_str(canonical)]))


def _occurrences(
    corpus: list[MolGraph],
    oracle: PropertyOracle,
    radius: int,
    seed: int,
) -> list[tuple[MolGraph, str, Fragment, EnvironmentKey, float]]:
    """(host, fragment string, fragment, env key, raw delta) per occurrence."""
    out = []
    for mol in corpus:
        rng = _molecule_rng(seed, canonical_smiles(mol))
        decomp = auto_decompose(mol, rng)
        if len(decomp.fragments) < 2:
            continue
        for record in attribute(mol, decomp, oracle):
            frag = record.fragment
            if not frag.attachment_pairs:
                continue
            key = environment_key(mol, frag, radius)
            out.append(
                (mol, normalized_fragment_string(frag), frag, key, record.raw_delta)
            )
    return out


def build_pool(
    corpus: list[MolGraph],
    oracle: PropertyOracle,
    radius: int = 2,
    min_bin: int = 3,
    seed: int = 0,
) -> ReplacementPool:
    """Index fragment occurrences by environment and globally.

    Args:
        corpus: Molecules to decompose and attribute.
        oracle: Property whose attribution deltas rank replacements.
        radius: Environment radius.
        min_bin: Environment bins with fewer occurrences than this serve
            only the global map.
        seed: Stream seed for per-molecule decomposition choices; use the
            same value when mining against this pool.

    Returns:
        The frozen pool.
    """
    env_deltas: defaultdict[EnvironmentKey, defaultdict[str, list[float]]]
    env_deltas = defaultdict(lambda: defaultdict(list))
    global_deltas: defaultdict[str, list[float]] = defaultdict(list)
    for _, frag_str, _, key, delta in _occurrences(corpus, oracle, radius, seed):
        env_deltas[key][frag_str].append(delta)
        global_deltas[frag_str].append(delta)

    by_env = {}
    for key, per_frag in env_deltas.items():
        if sum(len(v) for v in per_frag.values()) < min_bin:
            continue
        ranked = [(f, fmean(v)) for f, v in per_frag.items()]
        ranked.sort(key=lambda t: (-t[1], t[0]))
        by_env[key] = ranked

    means = {f: fmean(v) for f, v in global_deltas.items()}
    by_arity: defaultdict[int, list[str]] = defaultdict(list)
    for frag_str in means:
        by_arity[frag_str.count("*")].append(frag_str)
    global_pool = {}
    for frag_str in means:
        peers = [
            (g, means[g]) for g in by_arity[frag_str.count("*")] if g != frag_str
        ]
        peers.sort(key=lambda t: (-t[1], t[0]))
        global_pool[frag_str] = peers
    return ReplacementPool(by_env=by_env, global_pool=global_pool)


def _parse_fragment(text: str) -> MolGraph:
    graph = parse_smiles(text)
    labels = [a.attachment_label for a in graph.atoms if a.is_dummy]
    if len(labels) != len(set(labels)) or None in labels:
        raise LabelMismatch(f"fragment {text!r} has duplicate or missing labels")
    for i, atom in enumerate(graph.atoms):
        if atom.is_dummy and graph.degree(i) != 1:
            raise LabelMismatch(f"dummy [{atom.attachment_label}*] must have one bond")
    return graph


def _clean_mappings(pattern: MolGraph, host: MolGraph) -> list[tuple[int, ...]]:
    """Matches where the pattern's dummies cover the boundary exactly.

    A clean match replaces a whole induced piece: every host bond between
    two matched non-dummy atoms is mirrored in the pattern, and each
    matched atom's outside neighbors are exactly the images of its dummy
    neighbors.
    """
    non_dummy = [i for i, a in enumerate(pattern.atoms) if not a.is_dummy]
    clean = []
    for mapping in subgraph_match(pattern, host):
        core = {mapping[p] for p in non_dummy}
        ok = True
        for p in non_dummy:
            inside, outside = set(), set()
            for nbr, _ in host.neighbors(mapping[p]):
                (inside if nbr in core else outside).add(nbr)
            matched_nbrs, dummy_images = set(), set()
            for q, _ in pattern.neighbors(p):
                target = dummy_images if pattern.atoms[q].is_dummy else matched_nbrs
                target.add(mapping[q])
            # Host bonds inside the core must all be pattern bonds, and the
            # boundary must be covered by this atom's dummies exactly.
            if inside != matched_nbrs or outside != dummy_images:
                ok = False
                break
        if ok:
            clean.append(mapping)
    return clean


def _rejoin(
    src: MolGraph,
    src_graph: MolGraph,
    tgt_graph: MolGraph,
    mapping: tuple[int, ...],
) -> MolGraph:
    """Swap the matched core of ``src`` for the target fragment's atoms."""
    core = {
        mapping[p] for p, a in enumerate(src_graph.atoms) if not a.is_dummy
    }
    anchor_of = {
        src_graph.atoms[p].attachment_label: mapping[p]
        for p, a in enumerate(src_graph.atoms)
        if a.is_dummy
    }
    kept = [i for i in range(len(src)) if i not in core]
    remap = {old: new for new, old in enumerate(kept)}
    atoms = [src.atoms[i] for i in kept]
    bonds = [
        Bond(a=remap[b.a], b=remap[b.b], order=b.order, aromatic=b.aromatic)
        for b in src.bonds
        if b.a in remap and b.b in remap
    ]
    tgt_index = {}
    for i, atom in enumerate(tgt_graph.atoms):
        if atom.is_dummy:
            continue
        tgt_index[i] = len(atoms)
        atoms.append(atom)
    seen_joins = set()
    for b in tgt_graph.bonds:
        da, db = tgt_graph.atoms[b.a], tgt_graph.atoms[b.b]
        if not da.is_dummy and not db.is_dummy:
            bonds.append(
                Bond(a=tgt_index[b.a], b=tgt_index[b.b], order=b.order,
                     aromatic=b.aromatic)
            )
            continue
        dummy_end, atom_end = (b.a, b.b) if da.is_dummy else (b.b, b.a)
        label = tgt_graph.atoms[dummy_end].attachment_label
        join = (remap[anchor_of[label]], tgt_index[atom_end])
        if frozenset(join) in seen_joins:
            raise ValenceError("edit rejoins two labels onto the same bond")
        seen_joins.add(frozenset(join))
        bonds.append(Bond(a=join[0], b=join[1], order=b.order, aromatic=b.aromatic))
    try:
        return MolGraph(atoms=atoms, bonds=bonds)
    except StructureError as exc:
        raise ValenceError(str(exc)) from exc


def apply_edit(src: MolGraph, frag_src: str, frag_tgt: str) -> MolGraph:
    """Replace one clean occurrence of ``frag_src`` with ``frag_tgt``.

    The source fragment is located as a clean subgraph (its dummies cover
    the boundary exactly); its non-dummy atoms are removed and the target
    fragment's atoms are installed, re-attached at matching dummy labels.
    With several clean matches, the lexicographically smallest atom
    mapping is used.

    Args:
        src: Molecule to edit.
        frag_src: Labeled fragment string to remove.
        frag_tgt: Labeled fragment string to install; same label set.

    Returns:
        The rebuilt molecule.

    Raises:
        LabelMismatch: If the label sets differ or a fragment is malformed.
        NoMatch: If ``frag_src`` has no clean occurrence in ``src``.
        ValenceError: If the rebuilt molecule is not chemically valid.
    """
    # Per-host memo: the search loop applies and re-verifies the same edit
    # on one graph object, and match + rejoin dominate its runtime.
    cache = src.__dict__.setdefault("_edit_cache", {})
    key = (frag_src, frag_tgt)
    hit = cache.get(key)
    if hit is not None:
        outcome, payload = hit
        if outcome == "ok":
            return payload
        raise payload
    try:
        result = _apply_edit_uncached(src, frag_src, frag_tgt)
    except ForgeError as exc:
        cache[key] = ("err", exc)
        raise
    cache[key] = ("ok", result)
    return result


def _apply_edit_uncached(src: MolGraph, frag_src: str, frag_tgt: str) -> MolGraph:
    src_graph = _parse_fragment(frag_src)
    tgt_graph = _parse_fragment(frag_tgt)
    src_labels = {a.attachment_label for a in src_graph.atoms if a.is_dummy}
    tgt_labels = {a.attachment_label for a in tgt_graph.atoms if a.is_dummy}
    if src_labels != tgt_labels:
        raise LabelMismatch(f"label sets differ: {src_labels} vs {tgt_labels}")
    mappings = _clean_mappings(src_graph, src)
    if not mappings:
        raise NoMatch(f"{frag_src!r} does not occur cleanly in the molecule")
    return _rejoin(src, src_graph, tgt_graph, mappings[0])


def mine_pairs(
    corpus: list[MolGraph],
    oracle: PropertyOracle,
    pool: ReplacementPool,
    radius: int = 2,
    dedup_cap: int = 5,
    candidate_cap: int = 20,
    min_improvement: float = 0.01,
    seed: int = 0,
) -> MiningResult:
    """Mine verified low-to-high replacement pairs against a pool.

    For every fragment occurrence, candidate replacements are drawn from
    its environment bin (global pool as fallback), applied with
    :func:`apply_edit`, re-scored, and kept when the normalized score
    improves by more than ``min_improvement``. Scores are min-max
    normalized over the corpus's raw oracle values.

    Args:
        corpus: Molecules to mine from.
        oracle: Property to improve.
        pool: Pool built with the same oracle, radius, and seed.
        radius: Environment radius.
        dedup_cap: Max occurrences of one (frag_src, frag_tgt) edit.
        candidate_cap: Max replacements tried per occurrence.
        min_improvement: Normalized improvement threshold.
        seed: Stream seed matching the pool build.

    Returns:
        Pairs in deterministic corpus order plus skip counters.
    """
    counters = {
        "occurrences": 0,
        "candidates_tried": 0,
        "no_match": 0,
        "label_mismatch": 0,
        "valence_error": 0,
        "below_threshold": 0,
        "duplicates": 0,
        "cap_hits": 0,
        "from_global": 0,
        "pairs": 0,
    }
    raw: dict[str, float] = {}
    for mol in corpus:
        raw.setdefault(canonical_smiles(mol), evaluate(oracle, mol))
    lo, hi = min(raw.values()), max(raw.values())
    if lo == hi:
        return MiningResult(pairs=(), counters=counters)

    def norm(value: float) -> float:
        return normalize_score(value, lo, hi, oracle.direction)

    memo: dict[str, float] = {}

    def score(mol: MolGraph, smiles: str) -> float:
        if smiles not in memo:
            memo[smiles] = norm(evaluate(oracle, mol))
        return memo[smiles]

    pairs: list[EditPair] = []
    seen: set[tuple[str, str, str, str]] = set()
    edit_counts: defaultdict[tuple[str, str], int] = defaultdict(int)
    # Edits are applied to the graph reparsed from the canonical string so
    # that the smallest-mapping choice is reproducible from src_smiles alone.
    hosts: dict[str, MolGraph] = {}
    for mol, frag_str, _, key, _ in _occurrences(corpus, oracle, radius, seed):
        counters["occurrences"] += 1
        src_smiles = canonical_smiles(mol)
        if src_smiles not in hosts:
            hosts[src_smiles] = normalize(parse_smiles(src_smiles))
        host = hosts[src_smiles]
        src_score = score(mol, src_smiles)
        bin_candidates = pool.by_env.get(key)
        from_global = bin_candidates is None
        candidates = (
            pool.global_pool.get(frag_str, []) if from_global else bin_candidates
        )
        arity = frag_str.count("*")
        tried = 0
        for frag_tgt, _ in candidates:
            if tried >= candidate_cap:
                break
            if frag_tgt == frag_str or frag_tgt.count("*") != arity:
                continue
            tried += 1
            counters["candidates_tried"] += 1
            if edit_counts[(frag_str, frag_tgt)] >= dedup_cap:
                counters["cap_hits"] += 1
                continue
            try:
                result = apply_edit(host, frag_str, frag_tgt)
            except NoMatch:
                counters["no_match"] += 1
                continue
            except LabelMismatch:
                counters["label_mismatch"] += 1
                continue
            except (ValenceError, StructureError):
                counters["valence_error"] += 1
                continue
            tgt_smiles = canonical_smiles(result)
            tgt_score = score(result, tgt_smiles)
            if tgt_score - src_score <= min_improvement:
                counters["below_threshold"] += 1
                continue
            dedup_key = (src_smiles, tgt_smiles, frag_str, frag_tgt)
            if dedup_key in seen:
                counters["duplicates"] += 1
                continue
            seen.add(dedup_key)
            edit_counts[(frag_str, frag_tgt)] += 1
            counters["pairs"] += 1
            if from_global:
                counters["from_global"] += 1
            pairs.append(
                EditPair(
                    src_smiles=src_smiles,
                    tgt_smiles=tgt_smiles,
                    frag_src=frag_str,
                    frag_tgt=frag_tgt,
                    property=oracle.name,
                    score_src=src_score,
                    score_tgt=tgt_score,
                    env_key=key,
                    from_global=from_global,
                )
            )
    return MiningResult(pairs=tuple(pairs), counters=counters)


def chain_trajectories(pairs: list[EditPair], max_steps: int = 6) -> list[Trajectory]:
    """Greedily chain pairs whose endpoints meet into monotone runs.

    Pairs are consumed in input order; each trajectory extends from its
    start while an unused pair continues from the current molecule to one
    not yet visited, up to ``max_steps`` (capped at 6) steps.

    Args:
        pairs: Mined edit pairs.
        max_steps: Longest trajectory to emit.

    Returns:
        Trajectories covering every pair exactly once; scores strictly
        increase along each one.
    """
    max_steps = min(max_steps, 6)
    by_src: defaultdict[str, list[int]] = defaultdict(list)
    for i, pair in enumerate(pairs):
        by_src[pair.src_smiles].append(i)
    used = [False] * len(pairs)
    trajectories = []
    for i, pair in enumerate(pairs):
        if used[i]:
            continue
        used[i] = True
        steps = [pair]
        visited = {pair.src_smiles, pair.tgt_smiles}
        current = pair.tgt_smiles
        floor = pair.score_tgt
        while len(steps) < max_steps:
            next_i = next(
                (
                    j
                    for j in by_src.get(current, [])
                    if not used[j]
                    and pairs[j].tgt_smiles not in visited
                    and pairs[j].score_tgt > floor
                ),
                None,
            )
            if next_i is None:
                break
            used[next_i] = True
            steps.append(pairs[next_i])
            visited.add(pairs[next_i].tgt_smiles)
            current = pairs[next_i].tgt_smiles
            floor = pairs[next_i].score_tgt
        trajectories.append(Trajectory(steps=tuple(steps)))
    return trajectories


def pool_from_pairs(pairs: list[EditPair]) -> ReplacementPool:
    """Rebuild a replacement pool from previously mined pairs.

    Each pair's improvement votes for its frag_src -> frag_tgt
    replacement, both inside the pair's environment bin and globally.
    Candidates are ranked by mean improvement, best first.
    """
    env_votes: defaultdict[EnvironmentKey, defaultdict[str, list[float]]] = defaultdict(
        lambda: defaultdict(list)
    )
    global_votes: defaultdict[str, defaultdict[str, list[float]]] = defaultdict(
        lambda: defaultdict(list)
    )
    for pair in pairs:
        env_votes[pair.env_key][pair.frag_tgt].append(pair.improvement)
        global_votes[pair.frag_src][pair.frag_tgt].append(pair.improvement)

    def ranked(votes: defaultdict[str, list[float]]) -> list[tuple[str, float]]:
        means = [(frag, fmean(deltas)) for frag, deltas in votes.items()]
        means.sort(key=lambda t: (-t[1], t[0]))
        return means

    return ReplacementPool(
        by_env={key: ranked(v) for key, v in sorted(env_votes.items(),
                                                    key=lambda kv: (kv[0].radius, kv[0].digest))},
        global_pool={frag: ranked(v) for frag, v in sorted(global_votes.items())},
    )
