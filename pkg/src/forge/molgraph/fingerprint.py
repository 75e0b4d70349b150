"""Circular (Morgan-style) atom identifiers and hashed bit fingerprints."""

from __future__ import annotations

from dataclasses import dataclass

from forge.errors import ForgeError
from forge.hashing import hash_ints, hash_str
from forge.molgraph.types import MolGraph


class LengthMismatch(ForgeError):
    """Tanimoto requested between fingerprints of different bit lengths."""


@dataclass(frozen=True, slots=True)
class Fingerprint:
    """Sparse set of on-bits in a fixed-length hashed fingerprint."""

    bits: frozenset[int]
    n_bits: int


def _bond_code(bond) -> int:
    return 4 if bond.aromatic else bond.order


def atom_identifiers(mol: MolGraph, radius: int = 2) -> list[list[int]]:
    """Circular identifiers per atom at radii ``0..radius``.

    Radius-0 identifiers hash the atom's element, degree, charge, hydrogen
    count, and ring-membership flag; each subsequent radius hashes the
    atom's previous identifier together with the sorted ``(bond, neighbor
    identifier)`` pairs of its neighborhood.

    Args:
        mol: Graph to fingerprint.
        radius: Largest neighborhood radius.

    Returns:
        ``ids[i][r]`` is atom ``i``'s identifier at radius ``r``.
    """
    n = len(mol)
    current = []
    for i, atom in enumerate(mol.atoms):
        current.append(
            hash_ints(
                (
                    hash_str(atom.element),
                    mol.degree(i),
                    atom.charge,
                    mol.hydrogens(i),
                    1 if mol.atom_in_ring(i) else 0,
                )
            )
        )
    history = [[c] for c in current]
    for _ in range(radius):
        nxt = []
        for i in range(n):
            pairs = sorted(
                (_bond_code(b), current[j]) for j, b in mol.neighbors(i)
            )
            vals = [current[i]]
            for code, nbr_id in pairs:
                vals.append(code)
                vals.append(nbr_id)
            nxt.append(hash_ints(vals))
        current = nxt
        for i in range(n):
            history[i].append(current[i])
    return history


def morgan_fingerprint(
    mol: MolGraph, radius: int = 2, n_bits: int = 2048
) -> Fingerprint:
    """Hashed circular fingerprint folding identifiers into ``n_bits`` bits.

    Args:
        mol: Graph to fingerprint.
        radius: Largest neighborhood radius contributing identifiers.
        n_bits: Bit-vector length the identifiers fold into.

    Returns:
        The fingerprint with every identifier's ``id % n_bits`` bit set.
    """
    bits = frozenset(
        ident % n_bits
        for per_atom in atom_identifiers(mol, radius)
        for ident in per_atom
    )
    return Fingerprint(bits=bits, n_bits=n_bits)


def tanimoto(a: Fingerprint, b: Fingerprint) -> float:
    """Tanimoto similarity between two fingerprints of equal length.

    Args:
        a: First fingerprint.
        b: Second fingerprint.

    Returns:
        ``|a ∧ b| / |a ∨ b|``; two empty fingerprints count as identical
        (similarity 1.0).

    Raises:
        LengthMismatch: If the fingerprints have different bit lengths.
    """
    if a.n_bits != b.n_bits:
        raise LengthMismatch(
            f"cannot compare fingerprints of {a.n_bits} and {b.n_bits} bits"
        )
    union = len(a.bits | b.bits)
    if union == 0:
        return 1.0
    return len(a.bits & b.bits) / union
