"""SMILES parser for the organic subset plus brackets, rings, and dummies.

Supported grammar: organic-subset atoms (B, C, N, O, P, S, F, Cl, Br, I),
aromatic lowercase (b c n o p s), bracket atoms with isotope / charge /
explicit H / atom map, ring closures (digits and ``%nn``), branches, bond
symbols ``- = # :`` plus retained-but-ignored stereo ``/ \\ @ @@``, dummy
atoms ``[k*]`` (label also accepted as ``[*:k]``), and ``.`` component
separators.

Aromaticity is trusted from the input; no perception or kekulization runs.
"""

from __future__ import annotations

import re
from dataclasses import replace

from forge.errors import ForgeError
from forge.molgraph.types import (
    AROMATIC_ELEMENTS,
    ORGANIC_SUBSET,
    Atom,
    Bond,
    MolGraph,
    StructureError,
    ValenceError,
)

__all__ = [
    "parse_smiles",
    "normalize",
    "SmilesSyntaxError",
    "UnknownToken",
    "UnbalancedParen",
    "UnbalancedRing",
    "ValenceError",
]


class SmilesSyntaxError(ForgeError):
    """Base for SMILES syntax errors; carries the byte offset when known."""

    def __init__(self, message: str, offset: int | None = None):
        self.offset = offset
        if offset is not None:
            message = f"{message} (at byte {offset})"
        super().__init__(message)


class UnknownToken(SmilesSyntaxError):
    """Unrecognized character or malformed bracket atom."""


class UnbalancedParen(SmilesSyntaxError):
    """Branch parentheses do not balance."""


class UnbalancedRing(SmilesSyntaxError):
    """A ring-closure digit is unpaired or inconsistent."""


_BRACKET = re.compile(
    r"\[(?P<isotope>\d+)?(?P<symbol>\*|[A-Z][a-z]?|[a-z])"
    r"(?P<stereo>@@?)?"
    r"(?P<hcount>H\d*)?"
    r"(?P<charge>\+\d+|-\d+|\++|-+)?"
    r"(?::(?P<map>\d+))?\]"
)

_TWO_LETTER = ("Cl", "Br")
_SINGLE_UPPER = frozenset("BCNOPSFI")
_BOND_ORDERS = {"-": 1, "=": 2, "#": 3}


def _parse_bracket(text: str, pos: int) -> tuple[Atom, int]:
    m = _BRACKET.match(text, pos)
    if m is None:
        raise UnknownToken("malformed bracket atom", pos)
    symbol = m.group("symbol")
    isotope = int(m.group("isotope")) if m.group("isotope") else None
    hcount_tok = m.group("hcount")
    if hcount_tok is None:
        explicit_h: int | None = None
    elif hcount_tok == "H":
        explicit_h = 1
    else:
        explicit_h = int(hcount_tok[1:])
    charge_tok = m.group("charge")
    if charge_tok is None:
        charge = 0
    elif set(charge_tok) == {"+"}:
        charge = len(charge_tok)
    elif set(charge_tok) == {"-"}:
        charge = -len(charge_tok)
    else:
        charge = int(charge_tok)
    atom_map = int(m.group("map")) if m.group("map") else None

    if symbol == "*":
        label = atom_map if atom_map is not None else isotope
        atom = Atom(
            element="*",
            attachment_label=label,
            charge=charge,
            explicit_h=explicit_h,
        )
        return atom, m.end()

    aromatic = symbol[0].islower()
    if aromatic:
        if symbol not in AROMATIC_ELEMENTS:
            raise UnknownToken(f"unknown aromatic symbol '{symbol}'", pos)
        element = symbol.upper()
    else:
        element = symbol
    atom = Atom(
        element=element,
        aromatic=aromatic,
        charge=charge,
        isotope=isotope,
        explicit_h=explicit_h,
        stereo=m.group("stereo"),
    )
    return atom, m.end()


def parse_smiles(text: str) -> MolGraph:
    """Parse a SMILES string into a :class:`MolGraph`.

    Raises:
        UnknownToken: unrecognized character (message carries byte offset).
        UnbalancedParen: branch parentheses do not balance.
        UnbalancedRing: unclosed or inconsistent ring closure.
        ValenceError: an atom exceeds its maximum allowed valence.
    """
    if not isinstance(text, str) or text.strip() == "":
        raise UnknownToken("empty SMILES", 0)
    text = text.strip()

    atoms: list[Atom] = []
    bonds: list[Bond] = []
    prev: int | None = None
    pending: tuple[int, bool, str | None] | None = None  # (order, aromatic, stereo)
    branch_stack: list[int | None] = []
    # ring digit -> (atom index, pending bond at open, byte offset)
    ring_open: dict[int, tuple[int, tuple[int, bool, str | None] | None, int]] = {}

    def add_atom(atom: Atom, pos: int) -> None:
        nonlocal prev, pending
        atoms.append(atom)
        idx = len(atoms) - 1
        if prev is not None:
            order, aromatic, stereo = _resolve_bond(prev, idx, pending, pos)
            bonds.append(Bond(prev, idx, order=order, aromatic=aromatic, stereo=stereo))
        elif pending is not None:
            raise UnknownToken("bond symbol with no preceding atom", pos)
        pending = None
        prev = idx

    def _resolve_bond(
        i: int,
        j: int,
        pend: tuple[int, bool, str | None] | None,
        pos: int,
    ) -> tuple[int, bool, str | None]:
        if pend is not None:
            return pend
        if atoms[i].aromatic and atoms[j].aromatic:
            return (1, True, None)
        return (1, False, None)

    def close_ring(digit: int, pos: int) -> None:
        nonlocal pending, prev
        if prev is None:
            raise UnbalancedRing("ring digit before any atom", pos)
        if digit in ring_open:
            open_idx, open_pending, open_pos = ring_open.pop(digit)
            if open_idx == prev:
                raise UnbalancedRing(f"ring bond {digit} closes on its own atom", pos)
            if open_pending is not None and pending is not None and open_pending != pending:
                raise UnbalancedRing(
                    f"conflicting bond symbols on ring closure {digit}", pos
                )
            pend = pending if pending is not None else open_pending
            order, aromatic, stereo = _resolve_bond(open_idx, prev, pend, pos)
            bonds.append(Bond(open_idx, prev, order=order, aromatic=aromatic, stereo=stereo))
            pending = None
        else:
            ring_open[digit] = (prev, pending, pos)
            pending = None

    pos = 0
    n = len(text)
    while pos < n:
        ch = text[pos]
        if ch == "[":
            atom, end = _parse_bracket(text, pos)
            add_atom(atom, pos)
            pos = end
        elif text.startswith(_TWO_LETTER[0], pos) or text.startswith(_TWO_LETTER[1], pos):
            add_atom(Atom(element=text[pos : pos + 2]), pos)
            pos += 2
        elif ch in _SINGLE_UPPER:
            add_atom(Atom(element=ch), pos)
            pos += 1
        elif ch == "*":
            add_atom(Atom(element="*"), pos)
            pos += 1
        elif ch.islower():
            if ch not in AROMATIC_ELEMENTS:
                raise UnknownToken(f"unknown atom symbol '{ch}'", pos)
            add_atom(Atom(element=ch.upper(), aromatic=True), pos)
            pos += 1
        elif ch in _BOND_ORDERS:
            if pending is not None:
                raise UnknownToken("doubled bond symbol", pos)
            pending = (_BOND_ORDERS[ch], False, None)
            pos += 1
        elif ch == ":":
            if pending is not None:
                raise UnknownToken("doubled bond symbol", pos)
            pending = (1, True, None)
            pos += 1
        elif ch in "/\\":
            if pending is not None:
                raise UnknownToken("doubled bond symbol", pos)
            pending = (1, False, ch)
            pos += 1
        elif ch.isdigit():
            close_ring(int(ch), pos)
            pos += 1
        elif ch == "%":
            m = re.match(r"%(\d{2})", text[pos:])
            if m is None:
                raise UnknownToken("malformed %nn ring closure", pos)
            close_ring(int(m.group(1)), pos)
            pos += 3
        elif ch == "(":
            if prev is None:
                raise UnbalancedParen("branch opened before any atom", pos)
            branch_stack.append(prev)
            pos += 1
        elif ch == ")":
            if not branch_stack:
                raise UnbalancedParen("unmatched ')'", pos)
            if pending is not None:
                raise UnknownToken("dangling bond before ')'", pos)
            prev = branch_stack.pop()
            pos += 1
        elif ch == ".":
            if pending is not None:
                raise UnknownToken("bond symbol before '.'", pos)
            prev = None
            pos += 1
        else:
            raise UnknownToken(f"unknown character {ch!r}", pos)

    if branch_stack:
        raise UnbalancedParen("unclosed '('", len(text))
    if ring_open:
        digits = ", ".join(str(d) for d in sorted(ring_open))
        raise UnbalancedRing(f"unclosed ring digit(s): {digits}", len(text))
    if pending is not None:
        raise UnknownToken("dangling bond at end of input", len(text))
    try:
        return MolGraph(atoms, bonds)
    except StructureError as exc:
        raise UnbalancedRing(str(exc)) from exc


def normalize(mol: MolGraph) -> MolGraph:
    """Strip isotope annotations from organic-subset atoms.

    Attachment labels and every other attribute are preserved; atoms outside
    the organic subset keep their isotopes.
    """
    changed = False
    atoms = []
    for atom in mol.atoms:
        if atom.isotope is not None and atom.element in ORGANIC_SUBSET:
            atoms.append(replace(atom, isotope=None))
            changed = True
        else:
            atoms.append(atom)
    if not changed:
        return mol
    return MolGraph(atoms, mol.bonds)
