"""Atom-level lexing and marked-span tokenization."""
from __future__ import annotations

import pytest

from forge.molgraph.parser import UnknownToken
from forge.tokenizer import (
    END_MARKER,
    START_MARKER,
    Token,
    UnbalancedMarker,
    build_vocab,
    lex_smiles_span,
    tokenize_mixed,
)


def kinds(stream):
    return [t.kind for t in stream.tokens]


def test_lex_atoms_and_bonds():
    stream = lex_smiles_span("CC(=O)Cl")
    assert stream.surfaces() == ["C", "C", "(", "=", "O", ")", "Cl"]
    assert kinds(stream) == [
        "atom",
        "atom",
        "branch_paren",
        "bond",
        "atom",
        "branch_paren",
        "two_letter_element",
    ]


def test_lex_bracket_atom_is_one_token():
    stream = lex_smiles_span("[13CH3-]C[*:2]")
    assert stream.surfaces() == ["[13CH3-]", "C", "[*:2]"]
    assert kinds(stream)[0] == "bracket_atom"


def test_lex_ring_closures():
    stream = lex_smiles_span("C%10CC%10")
    assert stream.surfaces() == ["C", "%10", "C", "C", "%10"]
    assert kinds(stream)[1] == "ring_digit"


def test_lex_aromatic_and_dot():
    stream = lex_smiles_span("c1ccccc1.O")
    assert kinds(stream)[0] == "aromatic_atom"
    assert Token(surface=".", kind="bond") in stream.tokens


def test_lex_is_lossless():
    for text in ["CC(=O)Oc1ccccc1C(=O)O", "[2*]c1ccc(Br)cc1", "C%12CC%12"]:
        assert "".join(lex_smiles_span(text).surfaces()) == text


def test_lex_rejects_unknown_character():
    with pytest.raises(UnknownToken):
        lex_smiles_span("C!C")


def test_mixed_stream_is_lossless():
    text = f"Rank these.\nMolecule SMILES: {START_MARKER}CCO{END_MARKER} done"
    stream = tokenize_mixed(text)
    assert "".join(stream.surfaces()) == text
    assert stream.source == text


def test_mixed_marker_tokens():
    stream = tokenize_mixed(f"{START_MARKER}CC{END_MARKER}")
    assert kinds(stream) == ["marker", "atom", "atom", "marker"]


def test_mixed_plain_text_outside_spans():
    stream = tokenize_mixed("no spans at all")
    assert all(t.kind == "plain_text" for t in stream.tokens)
    assert "".join(stream.surfaces()) == "no spans at all"


def test_mixed_unbalanced_markers():
    with pytest.raises(UnbalancedMarker):
        tokenize_mixed(f"{START_MARKER}CC")
    with pytest.raises(UnbalancedMarker):
        tokenize_mixed(f"CC{END_MARKER}")
    with pytest.raises(UnbalancedMarker):
        tokenize_mixed(f"{START_MARKER}C{START_MARKER}C{END_MARKER}")


def test_span_tokens_independent_of_host():
    fragment = "CC(=O)Oc1ccc(Cl)cc1"
    hosts = [
        "Molecule SMILES: {}",
        "{} is the query",
        "a {} b",
        "List: {}.",
        "x\n{}\ny",
    ]
    wrapped = START_MARKER + fragment + END_MARKER
    expected = lex_smiles_span(fragment).tokens
    for host in hosts:
        stream = tokenize_mixed(host.format(wrapped))
        start = stream.tokens.index(Token(START_MARKER, "marker"))
        inner = stream.tokens[start + 1 : start + 1 + len(expected)]
        assert tuple(inner) == tuple(expected)


def test_multiple_spans_in_one_host():
    text = f"{START_MARKER}CC{END_MARKER} then {START_MARKER}O{END_MARKER}"
    stream = tokenize_mixed(text)
    assert kinds(stream).count("marker") == 4
    assert "".join(stream.surfaces()) == text


def test_build_vocab_deterministic_and_complete():
    streams = [tokenize_mixed(f"{START_MARKER}CCO{END_MARKER}"), lex_smiles_span("Cl")]
    vocab = build_vocab(streams)
    assert set(vocab) >= {"C", "O", "Cl", START_MARKER, END_MARKER}
    assert vocab == build_vocab(streams)
    assert sorted(vocab.values()) == list(range(len(vocab)))
