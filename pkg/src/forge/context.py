"""Local-environment keys and the variance-reduction statistic.

A fragment occurrence is keyed by the circular identifiers of the atoms it
was attached to, computed on the remainder after deleting the fragment.
Grouping a fragment's attribution scores by that key and comparing pooled
within-group spread against the ungrouped spread measures how much of the
score variation the local context explains.
"""

from __future__ import annotations

import random
import statistics
from collections import Counter, defaultdict
from dataclasses import dataclass

from forge.errors import ForgeError
from forge.fragment.attribution import attribute, auto_decompose
from forge.fragment.removal import removal_result
from forge.fragment.types import Fragment
from forge.hashing import hash_ints, hash_str
from forge.molgraph.canon import canonical_smiles
from forge.molgraph.fingerprint import atom_identifiers
from forge.molgraph.types import MolGraph
from forge.props import PropertyOracle


class NoAttachment(ForgeError):
    """The fragment covers the whole molecule, so it has no surroundings."""


class TooFewSamples(ForgeError):
    """Variance reduction needs at least two scored occurrences."""


@dataclass(frozen=True, slots=True)
class EnvironmentKey:
    """Order-invariant digest of a fragment occurrence's surroundings.

    Attributes:
        radius: Neighborhood radius the digest was computed at.
        digest: Hash of the sorted radius-``radius`` circular identifiers
            of the remainder-side attachment atoms.
    """

    radius: int
    digest: int

    @property
    def hex(self) -> str:
        return f"{self.digest:016x}"


@dataclass(frozen=True, slots=True)
class VarianceReport:
    """Grouped-variance summary for one fragment.

    Attributes:
        fragment_key: Canonical fragment string the samples belong to.
        n_occurrences: Number of scored occurrences.
        n_environments: Number of distinct environment keys.
        sigma_original: Population std of all scores.
        sigma_grouped: Pooled within-group population std, size-weighted.
        vr: 1 - sigma_grouped / sigma_original (0 when sigma_original is 0).
        shuffled_vr_mean: Mean vr over random regroupings with the same
            group-size profile.
        delta: vr - shuffled_vr_mean.
    """

    fragment_key: str
    n_occurrences: int
    n_environments: int
    sigma_original: float
    sigma_grouped: float
    vr: float
    shuffled_vr_mean: float
    delta: float


def environment_key(host: MolGraph, frag: Fragment, radius: int = 2) -> EnvironmentKey:
    """Key the local environment a fragment occupies in its host.

    The fragment is deleted (hydrogen capping), circular identifiers are
    computed on the remainder, and the attachment atoms' identifiers at the
    requested radius are sorted and hashed. Sorting makes the key
    independent of cut enumeration order and host atom numbering; deleting
    the fragment first makes it describe the site rather than the occupant.

    Args:
        host: Host molecule.
        frag: Fragment of this host.
        radius: Neighborhood radius (0 uses attachment-atom invariants only).

    Returns:
        The occurrence's environment key.

    Raises:
        NoAttachment: If the fragment covers the whole molecule.
    """
    if not frag.attachment_pairs:
        raise NoAttachment("fragment has no attachment points")
    remainder, remap = removal_result(host, frag, "replace_with_h")
    ids = atom_identifiers(remainder, radius)
    anchors = sorted(ids[remap[a]][radius] for _, a in frag.attachment_pairs)
    return EnvironmentKey(radius=radius, digest=hash_ints([radius, *anchors]))


def _pooled_vr(groups: list[list[float]]) -> tuple[float, float, float]:
    """(sigma_original, sigma_grouped, vr) for one grouping of scores."""
    scores = [s for g in groups for s in g]
    sigma_o = statistics.pstdev(scores)
    if sigma_o == 0.0:
        return 0.0, 0.0, 0.0
    pooled = sum(statistics.pvariance(g) * len(g) for g in groups) / len(scores)
    sigma_g = pooled**0.5
    vr = min(1.0, max(0.0, 1.0 - sigma_g / sigma_o))
    return sigma_o, sigma_g, vr


def variance_reduction(
    samples: list[tuple[EnvironmentKey, float]],
    shuffles: int = 100,
    rng: random.Random | None = None,
    fragment_key: str = "",
) -> VarianceReport:
    """Compare true environment grouping against shuffled regroupings.

    Args:
        samples: (environment key, attribution score) per occurrence.
        shuffles: Number of random regroupings for the baseline mean; each
            preserves the true group-size profile.
        rng: Seeded generator for the regroupings.
        fragment_key: Carried into the report unchanged.

    Returns:
        The report; ``vr`` is 0 when all scores are equal, and lies in
        [0, 1] otherwise because pooled within-group spread cannot exceed
        the overall spread.

    Raises:
        TooFewSamples: On fewer than two samples.
    """
    if len(samples) < 2:
        raise TooFewSamples(f"need at least 2 samples, got {len(samples)}")
    rng = rng if rng is not None else random.Random(0)
    by_key: defaultdict[EnvironmentKey, list[float]] = defaultdict(list)
    for key, score in samples:
        by_key[key].append(score)
    groups = [by_key[k] for k in sorted(by_key, key=lambda k: (k.radius, k.digest))]
    sigma_o, sigma_g, vr = _pooled_vr(groups)

    # Shuffle from a sorted base so the baseline does not depend on the
    # order the caller collected samples in.
    base = sorted(s for _, s in samples)
    sizes = [len(g) for g in groups]
    shuffled: list[float] = []
    for _ in range(shuffles):
        pool = base[:]
        rng.shuffle(pool)
        parts, at = [], 0
        for size in sizes:
            parts.append(pool[at : at + size])
            at += size
        shuffled.append(_pooled_vr(parts)[2])
    shuffled_mean = statistics.fmean(shuffled) if shuffled else 0.0

    return VarianceReport(
        fragment_key=fragment_key,
        n_occurrences=len(samples),
        n_environments=len(groups),
        sigma_original=sigma_o,
        sigma_grouped=sigma_g,
        vr=vr,
        shuffled_vr_mean=shuffled_mean,
        delta=vr - shuffled_mean,
    )


def vr_study(
    corpus: list[MolGraph],
    oracle: PropertyOracle,
    radius: int = 2,
    top_k: int = 30,
    shuffles: int = 100,
    seed: int = 0,
    removal: str = "replace_with_h",
) -> tuple[list[VarianceReport], dict[str, float]]:
    """Run the grouped-variance analysis over a corpus.

    Every molecule is decomposed (method chosen per molecule from a stream
    seeded by its canonical string), every fragment's attribution score and
    environment key are recorded, occurrences are pooled per canonical
    fragment string (attachment labels stripped), and the ``top_k`` most
    frequent fragments with at least two occurrences are reported.

    Args:
        corpus: Molecules to analyze.
        oracle: Property to attribute.
        radius: Environment radius.
        top_k: Number of most-frequent fragments to keep (clamped).
        shuffles: Regroupings per fragment for the baseline.
        seed: Master seed; per-molecule and per-fragment streams are split
            from it deterministically, so reports do not depend on corpus
            order or parallel scheduling.
        removal: Capping mode for attribution deletions.

    Returns:
        Reports sorted by descending occurrence count (ties by fragment
        key), and aggregate means: ``mean_vr``, ``mean_shuffled_vr``,
        ``delta``, ``fraction_real_above_shuffled``, ``mean_environments``.
    """
    occurrences: defaultdict[str, list[tuple[EnvironmentKey, float]]] = defaultdict(
        list
    )
    for mol in corpus:
        mol_rng = random.Random(hash_ints([seed, hash_str(canonical_smiles(mol))]))
        decomp = auto_decompose(mol, mol_rng)
        if len(decomp.fragments) < 2:
            continue
        for record in attribute(mol, decomp, oracle, removal):
            frag = record.fragment
            if not frag.attachment_pairs:
                continue
            key = environment_key(mol, frag, radius)
            occurrences[frag.unlabeled_smiles()].append((key, record.raw_delta))

    counts = Counter({k: len(v) for k, v in occurrences.items()})
    eligible = [k for k, n in counts.items() if n >= 2]
    eligible.sort(key=lambda k: (-counts[k], k))
    reports = []
    for frag_key in eligible[:top_k]:
        frag_rng = random.Random(hash_ints([seed, 1, hash_str(frag_key)]))
        reports.append(
            variance_reduction(
                occurrences[frag_key], shuffles, frag_rng, fragment_key=frag_key
            )
        )

    if reports:
        aggregates = {
            "mean_vr": statistics.fmean(r.vr for r in reports),
            "mean_shuffled_vr": statistics.fmean(r.shuffled_vr_mean for r in reports),
            "delta": statistics.fmean(r.delta for r in reports),
            "fraction_real_above_shuffled": statistics.fmean(
                1.0 if r.vr > r.shuffled_vr_mean else 0.0 for r in reports
            ),
            "mean_environments": statistics.fmean(r.n_environments for r in reports),
        }
    else:
        aggregates = {
            "mean_vr": 0.0,
            "mean_shuffled_vr": 0.0,
            "delta": 0.0,
            "fraction_real_above_shuffled": 0.0,
            "mean_environments": 0.0,
        }
    return reports, aggregates
