"""Parser, canonicalizer, fingerprint, and matcher behavior."""
from __future__ import annotations

import random
from pathlib import Path

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from forge.molgraph import (
    MolGraph,
    UnbalancedParen,
    UnbalancedRing,
    UnknownToken,
    ValenceError,
    canonical_ranks,
    canonical_smiles,
    morgan_fingerprint,
    normalize,
    parse_smiles,
    subgraph_match,
    tanimoto,
)

FIXTURES = Path(__file__).parent / "fixtures"

DIVERSE = [
    "CCO",
    "CC(C)C(=O)O",
    "c1ccccc1",
    "c1ccc2ncccc2c1",
    "Cn1cnc2c1c(=O)n(C)c(=O)n2C",
    "CC(=O)Oc1ccccc1C(=O)O",
    "C1CCNCC1S(=O)(=O)N",
    "FC(F)(F)c1ccc(Br)cc1",
    "[O-]C(=O)c1ccccc1[N+](=O)[O-]",
    "C1CC2CCC1CC2",
    "CC.O.c1ccsc1",
    "[2*]c1ccccc1[1*]",
]


def mol(smiles: str) -> MolGraph:
    return normalize(parse_smiles(smiles))


def permuted(graph: MolGraph, rng: random.Random) -> MolGraph:
    order = list(range(len(graph)))
    rng.shuffle(order)
    return graph.relabeled(order)


# ---------------------------------------------------------------- parsing


def test_parse_ethanol_structure():
    m = mol("CCO")
    assert [a.element for a in m.atoms] == ["C", "C", "O"]
    assert [m.hydrogens(i) for i in range(3)] == [3, 2, 1]
    assert [m.degree(i) for i in range(3)] == [1, 2, 1]
    assert m.bond_between(0, 1).order == 1
    assert m.bond_between(0, 2) is None


def test_parse_bond_orders():
    m = mol("C=CC#N")
    assert m.bond_between(0, 1).order == 2
    assert m.bond_between(2, 3).order == 3
    assert m.hydrogens(3) == 0


def test_parse_bracket_atom():
    m = parse_smiles("[13CH3-]")
    atom = m.atoms[0]
    assert atom.isotope == 13
    assert atom.charge == -1
    assert atom.explicit_h == 3
    assert m.hydrogens(0) == 3


def test_parse_charged_hydrogens():
    assert mol("[NH4+]").hydrogens(0) == 4
    assert mol("[O-]C").hydrogens(0) == 0


def test_parse_aromatic_ring():
    m = mol("c1ccccc1")
    assert all(a.aromatic for a in m.atoms)
    assert all(m.hydrogens(i) == 1 for i in range(6))
    assert all(b.aromatic for b in m.bonds)
    assert all(m.atom_in_ring(i) for i in range(6))


def test_parse_dummy_labels():
    by_map = parse_smiles("[*:3]C")
    by_prefix = parse_smiles("[3*]C")
    assert by_map.atoms[0].is_dummy and by_prefix.atoms[0].is_dummy
    assert by_map.atoms[0].attachment_label == 3
    assert by_prefix.atoms[0].attachment_label == 3
    assert by_map.has_dummy and not mol("CC").has_dummy


def test_parse_two_digit_ring_closure():
    assert canonical_smiles(mol("C%10CCCCC%10")) == canonical_smiles(mol("C1CCCCC1"))


def test_parse_components():
    m = mol("CCO.CC")
    assert len(m.components) == 2


def test_parse_errors():
    with pytest.raises(UnbalancedParen):
        parse_smiles("C((")
    with pytest.raises(UnbalancedRing):
        parse_smiles("C1CC")
    with pytest.raises(UnknownToken):
        parse_smiles("C$C")
    with pytest.raises(UnknownToken):
        parse_smiles("Xx")
    with pytest.raises(ValenceError):
        parse_smiles("FF(F)F")
    with pytest.raises(UnknownToken):
        parse_smiles("")


def test_ring_flags():
    m = mol("C1CC1C")
    ring = [i for i in range(4) if m.atom_in_ring(i)]
    assert ring == [0, 1, 2]
    assert m.atom_in_three_ring(0)
    assert m.edge_in_ring(0, 1)
    assert not m.edge_in_ring(2, 3)


def test_subgraph_remap():
    m = mol("CCO")
    sub, remap = m.subgraph((1, 2))
    assert len(sub) == 2
    assert {m.atoms[old].element for old in remap} == {"C", "O"}


def test_normalize_strips_organic_isotopes():
    assert canonical_smiles(mol("[13CH4]")) == canonical_smiles(mol("C"))
    kept = parse_smiles("[13CH4]")
    assert kept.atoms[0].isotope == 13


# ------------------------------------------------------- canonicalization


def test_canonical_equivalent_writings():
    assert canonical_smiles(mol("CCO")) == canonical_smiles(mol("OCC"))
    assert canonical_smiles(mol("CC.O")) == canonical_smiles(mol("O.CC"))
    assert canonical_smiles(mol("C(C)(C)C")) == canonical_smiles(mol("CC(C)C"))


def test_canonical_distinguishes_kekule_from_aromatic():
    assert canonical_smiles(mol("C1=CC=CC=C1")) != canonical_smiles(mol("c1ccccc1"))


def test_canonical_ignores_stereo():
    assert canonical_smiles(mol("C[C@H](N)O")) == canonical_smiles(mol("C[C@@H](N)O"))


def test_canonical_writes_dummy_labels():
    assert "[2*]" in canonical_smiles(mol("[*:2]C"))


def test_canonical_roundtrip_and_invariance():
    rng = random.Random(3)
    for smiles in DIVERSE:
        m = mol(smiles)
        ref = canonical_smiles(m)
        assert canonical_smiles(mol(ref)) == ref
        for _ in range(20):
            assert canonical_smiles(permuted(m, rng)) == ref


def test_canonical_ranks_are_a_permutation():
    for smiles in DIVERSE:
        m = mol(smiles)
        assert sorted(canonical_ranks(m)) == list(range(len(m)))


@settings(max_examples=40, deadline=None)
@given(st.sampled_from(DIVERSE), st.randoms(use_true_random=False))
def test_canonical_invariance_property(smiles, rng):
    m = mol(smiles)
    assert canonical_smiles(permuted(m, rng)) == canonical_smiles(m)


# ------------------------------------------------------------ fingerprints


def test_fingerprint_permutation_invariant():
    rng = random.Random(11)
    for smiles in DIVERSE:
        m = mol(smiles)
        assert morgan_fingerprint(permuted(m, rng)) == morgan_fingerprint(m)


def test_tanimoto_bounds_and_identity():
    a = morgan_fingerprint(mol("CCO"))
    b = morgan_fingerprint(mol("c1ccccc1"))
    assert tanimoto(a, a) == 1.0
    assert 0.0 <= tanimoto(a, b) < 1.0
    assert tanimoto(a, b) == tanimoto(b, a)


def test_tanimoto_empty_convention():
    from forge.molgraph import Fingerprint

    empty = Fingerprint(bits=frozenset(), n_bits=16)
    assert tanimoto(empty, empty) == 1.0


def test_fingerprint_length_mismatch():
    from forge.molgraph import LengthMismatch

    with pytest.raises(LengthMismatch):
        tanimoto(
            morgan_fingerprint(mol("CC"), n_bits=512),
            morgan_fingerprint(mol("CC"), n_bits=1024),
        )


def test_fingerprint_radius_refines():
    m = mol("CCCCO")
    r0 = morgan_fingerprint(m, radius=0)
    r2 = morgan_fingerprint(m, radius=2)
    assert r0.bits <= r2.bits
    assert len(r2.bits) > len(r0.bits)


# ---------------------------------------------------------------- matching


def test_match_counts():
    assert len(subgraph_match(mol("c1ccccc1"), mol("Cc1ccccc1"))) == 12
    assert len(subgraph_match(mol("CC"), mol("CCCC"))) == 6
    assert len(subgraph_match(mol("c1ccncc1"), mol("c1ccccc1"))) == 0


def test_match_limit():
    assert len(subgraph_match(mol("CC"), mol("CCCC"), limit=2)) == 2


def test_match_pins_explicit_hydrogens():
    assert len(subgraph_match(mol("[CH3]C"), mol("CCC"))) == 2


def test_match_dummy_is_wildcard():
    assert len(subgraph_match(mol("[1*]"), mol("CO"))) == 2
    assert len(subgraph_match(mol("[1*]c1ccccc1"), mol("Cc1ccccc1"))) == 2


def test_match_respects_bond_kind():
    assert len(subgraph_match(mol("C=C"), mol("CCCC"))) == 0
    assert len(subgraph_match(mol("C=C"), mol("C=CC"))) == 2


def test_match_mappings_are_injective():
    for mapping in subgraph_match(mol("CC"), mol("CCO")):
        assert len(set(mapping)) == len(mapping)


def test_match_agrees_with_brute_force():
    from itertools import permutations

    def brute(pattern: MolGraph, host: MolGraph) -> set[tuple[int, ...]]:
        found = set()
        for combo in permutations(range(len(host)), len(pattern)):
            ok = True
            for i, atom in enumerate(pattern.atoms):
                h = host.atoms[combo[i]]
                if atom.is_dummy:
                    continue
                if (atom.element, atom.aromatic, atom.charge) != (
                    h.element,
                    h.aromatic,
                    h.charge,
                ):
                    ok = False
                    break
                if atom.explicit_h is not None and pattern.hydrogens(
                    i
                ) != host.hydrogens(combo[i]):
                    ok = False
                    break
            if not ok:
                continue
            for bond in pattern.bonds:
                hb = host.bond_between(combo[bond.a], combo[bond.b])
                if hb is None or hb.key != bond.key:
                    ok = False
                    break
            if ok:
                found.add(combo)
        return found

    cases = [
        ("CC(=O)N", "CC(=O)Nc1ccc(O)cc1"),
        ("c1ccsc1", "Cc1ccsc1"),
        ("[1*]C(=O)[2*]", "CC(=O)OC"),
        ("C1CC1", "C1CC1C1CC1"),
    ]
    for pat, host in cases:
        p, h = mol(pat), mol(host)
        assert set(subgraph_match(p, h)) == brute(p, h)


# ------------------------------------------------------------ fixture file


def test_small_corpus_parses_cleanly():
    lines = (FIXTURES / "corpus_small.smi").read_text().split()
    assert len(lines) == 200
    canons = {canonical_smiles(mol(s)) for s in lines}
    assert len(canons) == 200
