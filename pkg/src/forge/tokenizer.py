"""Atom-level SMILES tokenization with marked-span support.

Inside ``<start_smiles>...<end_smiles>`` spans, text is lexed with a
regex-based atomic tokenizer: bracket atoms, two-letter elements (Cl, Br),
and ``%nn`` ring closures are single tokens, so a fragment's token
subsequence is identical no matter which host string surrounds it. Outside
spans, text is split on whitespace into plain-text tokens (whitespace runs
are kept as their own plain-text tokens so that concatenating all surfaces
reproduces the input byte-exactly).
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field

from forge.errors import ForgeError
from forge.molgraph.parser import UnknownToken

START_MARKER = "<start_smiles>"
END_MARKER = "<end_smiles>"


class UnbalancedMarker(ForgeError):
    """A span marker without its partner."""


@dataclass(frozen=True, slots=True)
class Token:
    """One lexed unit; ``surface`` is the exact substring it covers."""

    surface: str
    kind: str


@dataclass(frozen=True, slots=True)
class TokenStream:
    """Tokens of one input string; surfaces concatenate back to ``source``."""

    tokens: tuple[Token, ...]
    source: str

    def surfaces(self) -> list[str]:
        return [t.surface for t in self.tokens]


_SMILES_TOKEN = re.compile(
    r"""(?P<bracket_atom>\[[^\[\]]+\])
      | (?P<two_letter_element>Cl|Br)
      | (?P<atom>[BCNOPSFI])
      | (?P<aromatic_atom>[bcnops])
      | (?P<bond>[-=\#:/\\.])
      | (?P<ring_digit>%\d{2}|\d)
      | (?P<branch_paren>[()])
    """,
    re.VERBOSE,
)

_WORD_OR_SPACE = re.compile(r"\S+|\s+")


def lex_smiles_span(text: str) -> TokenStream:
    """Lex a bare SMILES body into atom-level tokens.

    Args:
        text: SMILES string without span markers.

    Returns:
        The token stream; one token per atom, bond, ring digit, or paren.

    Raises:
        UnknownToken: On the first character that starts no valid token,
            reported with its byte offset.
    """
    tokens: list[Token] = []
    pos = 0
    while pos < len(text):
        m = _SMILES_TOKEN.match(text, pos)
        if m is None:
            raise UnknownToken(f"unexpected character {text[pos]!r}", pos)
        kind = m.lastgroup
        assert kind is not None
        tokens.append(Token(surface=m.group(), kind=kind))
        pos = m.end()
    return TokenStream(tokens=tuple(tokens), source=text)


def tokenize_mixed(text: str) -> TokenStream:
    """Tokenize text that may embed marked SMILES spans.

    Outside spans, words and whitespace runs become plain-text tokens;
    inside spans, :func:`lex_smiles_span` applies; the markers themselves
    are single tokens.

    Args:
        text: Prompt-style text with zero or more marked spans.

    Returns:
        A lossless token stream over the whole input.

    Raises:
        UnbalancedMarker: If a start marker lacks its end (or vice versa).
        UnknownToken: On an unlexable character inside a span.
    """
    tokens: list[Token] = []
    pos = 0
    while pos < len(text):
        start = text.find(START_MARKER, pos)
        stray_end = text.find(END_MARKER, pos)
        if start == -1 or (stray_end != -1 and stray_end < start):
            if stray_end != -1 and (start == -1 or stray_end < start):
                raise UnbalancedMarker(
                    f"end marker at offset {stray_end} without a start marker"
                )
            chunk = text[pos:]
            pos = len(text)
        else:
            chunk = text[pos:start]
        for m in _WORD_OR_SPACE.finditer(chunk):
            tokens.append(Token(surface=m.group(), kind="plain_text"))
        if pos < len(text) and start != -1:
            end = text.find(END_MARKER, start + len(START_MARKER))
            if end == -1:
                raise UnbalancedMarker(
                    f"start marker at offset {start} without an end marker"
                )
            body = text[start + len(START_MARKER) : end]
            if START_MARKER in body:
                raise UnbalancedMarker(
                    f"nested start marker inside span at offset {start}"
                )
            tokens.append(Token(surface=START_MARKER, kind="marker"))
            inner = lex_smiles_span(body)
            tokens.extend(inner.tokens)
            tokens.append(Token(surface=END_MARKER, kind="marker"))
            pos = end + len(END_MARKER)
    return TokenStream(tokens=tuple(tokens), source=text)


def build_vocab(streams: list[TokenStream]) -> dict[str, int]:
    """Assign integer ids to token surfaces in first-seen order."""
    vocab: dict[str, int] = {}
    for stream in streams:
        for token in stream.tokens:
            if token.surface not in vocab:
                vocab[token.surface] = len(vocab)
    return vocab
