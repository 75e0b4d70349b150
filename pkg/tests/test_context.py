"""Environment keys and the grouped-variance statistic."""
from __future__ import annotations

import math
import random
import statistics

import pytest

from forge.context import (
    EnvironmentKey,
    NoAttachment,
    TooFewSamples,
    VarianceReport,
    environment_key,
    variance_reduction,
    vr_study,
)
from forge.fragment import apply_cuts, decompose
from forge.molgraph import normalize, parse_smiles
from forge.props import PropertyOracle


def mol(smiles: str):
    return normalize(parse_smiles(smiles))


def chain_fragment(smiles: str, cut=(0, 1)):
    """Split a molecule at one bond and return (host, atom-0 side)."""
    host = mol(smiles)
    decomp = apply_cuts(host, [cut], "manual")
    for frag in decomp.fragments:
        if 0 in frag.host_atom_indices:
            return host, frag
    raise AssertionError


# -------------------------------------------------------- environment_key


def test_key_describes_site_not_occupant():
    # Methyl on benzene and ethyl on benzene leave the same remainder, so
    # their environment keys agree even though the fragments differ.
    host_a, frag_a = chain_fragment("Cc1ccccc1")
    host_b, frag_b = chain_fragment("CCc1ccccc1", cut=(1, 2))
    assert frag_a.unlabeled_smiles() != frag_b.unlabeled_smiles()
    assert environment_key(host_a, frag_a, 2) == environment_key(host_b, frag_b, 2)


def test_key_separates_different_sites():
    host_a, frag_a = chain_fragment("Cc1ccccc1")
    host_b, frag_b = chain_fragment("Cc1ccccn1")
    assert frag_a.unlabeled_smiles() == frag_b.unlabeled_smiles() == "C[*]"
    assert environment_key(host_a, frag_a, 2) != environment_key(host_b, frag_b, 2)


def test_key_radius_zero_coarser_than_radius_two():
    # Anchors in CCCO and CCCN look identical at radius 0 (a terminal sp3
    # carbon) but differ once the heteroatom enters the neighborhood.
    host_a, frag_a = chain_fragment("CCCO")
    host_b, frag_b = chain_fragment("CCCN")
    key_a0 = environment_key(host_a, frag_a, 0)
    key_b0 = environment_key(host_b, frag_b, 0)
    assert key_a0 == key_b0
    assert environment_key(host_a, frag_a, 2) != environment_key(host_b, frag_b, 2)
    assert key_a0.radius == 0


def test_key_invariant_under_host_relabeling():
    host = mol("CCOc1ccc(N)cc1")
    decomp = decompose(host, "murcko")
    rng = random.Random(9)
    for _ in range(5):
        order = list(range(len(host)))
        rng.shuffle(order)
        relabeled = host.relabeled(order)
        redecomp = decompose(relabeled, "murcko")
        keys = sorted(
            (f.unlabeled_smiles(), environment_key(host, f, 2).digest)
            for f in decomp.fragments
            if f.attachment_pairs
        )
        rekeys = sorted(
            (f.unlabeled_smiles(), environment_key(relabeled, f, 2).digest)
            for f in redecomp.fragments
            if f.attachment_pairs
        )
        assert keys == rekeys


def test_key_whole_molecule_rejected():
    host = mol("Cc1ccccc1")
    whole = decompose(host, "brics")
    (frag,) = whole.fragments
    assert not frag.attachment_pairs
    with pytest.raises(NoAttachment):
        environment_key(host, frag, 2)


def test_key_hex_is_padded():
    assert EnvironmentKey(radius=2, digest=255).hex == "00000000000000ff"


# ----------------------------------------------------- variance_reduction


def k(n: int) -> EnvironmentKey:
    return EnvironmentKey(radius=2, digest=n)


def test_vr_perfect_grouping():
    samples = [(k(1), 0.0)] * 3 + [(k(2), 1.0)] * 3
    report = variance_reduction(samples, shuffles=50, rng=random.Random(0))
    assert report.vr == 1.0
    assert report.sigma_grouped == 0.0
    assert report.n_occurrences == 6
    assert report.n_environments == 2
    assert report.shuffled_vr_mean < 1.0
    assert report.delta == report.vr - report.shuffled_vr_mean


def test_vr_hand_computed():
    samples = [(k(1), 0.0), (k(1), 2.0), (k(2), 4.0), (k(2), 6.0)]
    report = variance_reduction(samples, shuffles=10, rng=random.Random(0))
    assert report.sigma_original == pytest.approx(math.sqrt(5.0))
    assert report.sigma_grouped == pytest.approx(1.0)
    assert report.vr == pytest.approx(1.0 - 1.0 / math.sqrt(5.0))


def test_vr_constant_scores():
    samples = [(k(1), 0.5), (k(2), 0.5), (k(1), 0.5)]
    report = variance_reduction(samples, shuffles=20, rng=random.Random(0))
    assert report.sigma_original == 0.0
    assert report.vr == 0.0
    assert report.shuffled_vr_mean == 0.0
    assert report.delta == 0.0


def test_vr_single_environment_explains_nothing():
    samples = [(k(7), 0.0), (k(7), 1.0), (k(7), 2.0)]
    report = variance_reduction(samples, shuffles=20, rng=random.Random(0))
    assert report.n_environments == 1
    assert report.vr == 0.0
    assert report.shuffled_vr_mean == 0.0


def test_vr_too_few_samples():
    with pytest.raises(TooFewSamples):
        variance_reduction([], shuffles=5)
    with pytest.raises(TooFewSamples):
        variance_reduction([(k(1), 0.0)], shuffles=5)


def test_vr_sample_order_invariant():
    rng = random.Random(11)
    samples = [(k(rng.randrange(4)), rng.random()) for _ in range(30)]
    first = variance_reduction(samples, shuffles=40, rng=random.Random(3))
    shuffled = samples[:]
    random.Random(99).shuffle(shuffled)
    second = variance_reduction(shuffled, shuffles=40, rng=random.Random(3))
    assert first == second


def test_vr_bounds_on_random_data():
    rng = random.Random(21)
    for _ in range(20):
        n = rng.randrange(2, 25)
        samples = [(k(rng.randrange(1, 6)), rng.gauss(0, 1)) for _ in range(n)]
        report = variance_reduction(samples, shuffles=10, rng=random.Random(1))
        assert 0.0 <= report.vr <= 1.0
        assert 0.0 <= report.shuffled_vr_mean <= 1.0
        assert report.n_occurrences == n
        assert report.sigma_grouped <= report.sigma_original + 1e-12


def test_vr_carries_fragment_key():
    samples = [(k(1), 0.0), (k(2), 1.0)]
    report = variance_reduction(samples, shuffles=5, fragment_key="CO")
    assert report.fragment_key == "CO"
    assert isinstance(report, VarianceReport)


# ----------------------------------------------------------------- study

STUDY_CORPUS = [
    sub + scaffold
    for scaffold in ("c1ccccc1", "c1ccncc1", "C1CCCCC1", "c1ccsc1")
    for sub in ("C", "CC", "CCC", "O", "OC", "N", "NC", "ClC", "FC", "OCC")
]


def test_vr_study_structure_and_determinism():
    corpus = [mol(s) for s in STUDY_CORPUS]
    oracle = PropertyOracle("clogp", "higher_better")
    reports, aggregates = vr_study(
        corpus, oracle, radius=1, top_k=6, shuffles=20, seed=3
    )
    assert reports
    assert len(reports) <= 6
    counts = [r.n_occurrences for r in reports]
    assert counts == sorted(counts, reverse=True)
    assert all(n >= 2 for n in counts)
    assert set(aggregates) == {
        "mean_vr",
        "mean_shuffled_vr",
        "delta",
        "fraction_real_above_shuffled",
        "mean_environments",
    }
    assert aggregates["mean_vr"] == pytest.approx(
        statistics.fmean(r.vr for r in reports)
    )

    again, again_agg = vr_study(corpus, oracle, radius=1, top_k=6, shuffles=20, seed=3)
    assert again == reports
    assert again_agg == aggregates


def test_vr_study_corpus_order_invariant():
    corpus = [mol(s) for s in STUDY_CORPUS]
    oracle = PropertyOracle("clogp", "higher_better")
    forward, _ = vr_study(corpus, oracle, radius=1, top_k=4, shuffles=10, seed=3)
    backward, _ = vr_study(corpus[::-1], oracle, radius=1, top_k=4, shuffles=10, seed=3)
    assert forward == backward


def test_vr_study_empty_corpus():
    oracle = PropertyOracle("mol_weight", "higher_better")
    reports, aggregates = vr_study([], oracle, radius=1, shuffles=5, seed=0)
    assert reports == []
    assert aggregates["mean_vr"] == 0.0
