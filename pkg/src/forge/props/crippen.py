"""Wildman-Crippen atom-contribution clogp.

Every heavy atom is assigned the first matching class of the published
ordered rule list for its element; implicit hydrogens are assigned one of
the four hydrogen classes from the atom they sit on. clogp is the sum of
all class contributions. Class labels follow the original table (C1..C27,
CS, N1..N14, NS, O1..O12, OS, S1..S3, P, F/Cl/Br/I, H1..H4, HS) so that
per-atom assignments can be inspected and tested directly.
"""

from __future__ import annotations

from forge.molgraph.types import MolGraph

_HALOGENS = ("F", "Cl", "Br", "I")
_HETERO = ("N", "O", "P", "S", "F", "Cl", "Br", "I")

CONTRIB = {
    "C1": 0.1441, "C2": 0.0, "C3": -0.2035, "C4": -0.2051, "C5": -0.2783,
    "C6": 0.1551, "C7": 0.0017, "C8": 0.08452, "C9": -0.1444, "C10": -0.0516,
    "C11": 0.1193, "C12": -0.0967, "C13": -0.5443, "C14": 0.0, "C15": 0.245,
    "C16": 0.198, "C17": 0.0, "C18": 0.1581, "C19": 0.2955, "C20": 0.2713,
    "C21": 0.136, "C22": 0.4619, "C23": 0.5437, "C24": 0.1893, "C25": -0.8186,
    "C26": 0.264, "C27": 0.2148, "CS": 0.08129,
    "H1": 0.123, "H2": -0.2677, "H3": 0.2142, "H4": 0.298, "HS": 0.1125,
    "N1": -1.019, "N2": -0.7096, "N3": -1.027, "N4": -0.5188, "N5": 0.08387,
    "N6": 0.1836, "N7": -0.3187, "N8": -0.4458, "N9": 0.01508, "N10": -1.95,
    "N11": -0.3239, "N12": -1.119, "N13": -0.3396, "N14": 0.2887,
    "NS": -0.4806,
    "O1": 0.1552, "O2": -0.2893, "O3": -0.0684, "O4": -0.4195, "O5": 0.0335,
    "O6": -0.3339, "O7": -1.189, "O8": 0.1788, "O9": -0.1526, "O10": 0.1129,
    "O11": 0.4833, "O12": -1.326, "OS": -0.1188,
    "S1": 0.6482, "S2": -0.0024, "S3": 0.6237,
    "P": 0.8612,
    "F": 0.4202, "Cl": 0.6895, "Br": 0.8456, "I": 0.8857, "HalAnion": -2.996,
    "Other": 0.0,
}


def _bond_profile(mol: MolGraph, i: int):
    singles, doubles, triples, aromatics = [], [], [], []
    for j, bond in mol.neighbors(i):
        if bond.aromatic:
            aromatics.append(j)
        elif bond.order == 1:
            singles.append(j)
        elif bond.order == 2:
            doubles.append(j)
        else:
            triples.append(j)
    return singles, doubles, triples, aromatics


def _classify_aromatic_carbon(mol: MolGraph, i: int) -> str:
    if mol.hydrogens(i) > 0:
        return "C18"
    singles, doubles, _triples, aromatics = _bond_profile(mol, i)
    sub_elements = [mol.atoms[j].element for j in singles]
    for el, label in (("F", "C14"), ("Cl", "C15"), ("Br", "C16"), ("I", "C17")):
        if el in sub_elements:
            return label
    if doubles:
        if mol.atoms[doubles[0]].element in ("C", "N", "O", "S"):
            return "C25"
        return "CS"
    if len(aromatics) >= 3:
        return "C19"
    if singles and mol.atoms[singles[0]].aromatic:
        return "C20"
    if singles:
        el = mol.atoms[singles[0]].element
        if el == "C":
            return "C21"
        if el == "N":
            return "C22"
        if el == "O":
            return "C23"
        if el == "S":
            return "C24"
        return "C13"
    return "CS"


def _classify_aliphatic_carbon(mol: MolGraph, i: int) -> str:
    h = mol.hydrogens(i)
    singles, doubles, triples, _ = _bond_profile(mol, i)
    if triples:
        return "C7"
    if doubles:
        if any(mol.atoms[j].element != "C" for j in doubles):
            return "C5"
        if any(mol.atoms[j].aromatic for j in doubles + singles):
            return "C26"
        return "C6"
    # sp3 carbon.
    if any(
        not mol.atoms[j].aromatic and mol.atoms[j].element in _HETERO
        for j in singles
    ):
        return "C3" if h >= 2 else "C4"
    if any(mol.atoms[j].aromatic for j in singles):
        if h == 3:
            first = next(j for j in singles if mol.atoms[j].aromatic)
            return "C8" if mol.atoms[first].element == "C" else "C9"
        if h == 2:
            return "C10"
        if h == 1:
            return "C11"
        return "C12"
    if all(mol.atoms[j].element == "C" for j in singles):
        return "C1" if h >= 2 else "C2"
    return "C27"


def _classify_nitrogen(mol: MolGraph, i: int) -> str:
    atom = mol.atoms[i]
    h = mol.hydrogens(i)
    singles, doubles, triples, _ = _bond_profile(mol, i)
    if atom.aromatic:
        return "N12" if atom.charge > 0 else ("NS" if atom.charge < 0 else "N11")
    if atom.charge > 0:
        if h >= 1:
            return "N10"
        if len(singles) == 4:
            return "N13"
        if doubles and all(mol.atoms[j].element == "C" for j in doubles):
            return "N13"
        return "N14"
    if atom.charge < 0:
        return "NS"
    if triples:
        return "N9"
    if doubles:
        if h >= 1:
            return "N5"
        return "N6"
    aromatic_nbr = any(mol.atoms[j].aromatic for j in singles)
    if h == 2:
        return "N3" if aromatic_nbr else "N1"
    if h == 1:
        return "N4" if aromatic_nbr else "N2"
    if h == 0 and len(singles) == 3:
        return "N8" if aromatic_nbr else "N7"
    return "NS"


def _classify_oxygen(mol: MolGraph, i: int) -> str:
    atom = mol.atoms[i]
    h = mol.hydrogens(i)
    singles, doubles, _triples, _ = _bond_profile(mol, i)
    if atom.aromatic:
        return "O1"
    if atom.charge < 0:
        if any(mol.atoms[j].element == "N" for j in singles + doubles):
            return "O5"
        if any(mol.atoms[j].element == "S" for j in singles + doubles):
            return "O6"
        for j in singles:
            if mol.atoms[j].element == "C" and any(
                b.order == 2 and mol.atoms[k].element == "O"
                for k, b in mol.neighbors(j)
            ):
                return "O12"
        return "O7"
    if h >= 1:
        return "O2"
    if doubles:
        partner = doubles[0]
        pel = mol.atoms[partner].element
        if pel in ("N", "O"):
            return "O5"
        if pel == "S":
            return "O6"
        if pel == "C":
            if mol.atoms[partner].aromatic:
                return "O8"
            others = [
                mol.atoms[j]
                for j, _ in mol.neighbors(partner)
                if j != i
            ]
            if any(a.aromatic for a in others):
                return "O10"
            if others and all(a.element != "C" for a in others):
                return "O11"
            return "O9"
        return "OS"
    if len(singles) == 2:
        if any(mol.atoms[j].aromatic for j in singles):
            return "O4"
        return "O3"
    return "OS"


def _classify_h(mol: MolGraph, i: int) -> str:
    """Class of the implicit hydrogens sitting on heavy atom i."""
    el = mol.atoms[i].element
    if el == "C":
        return "H1"
    if el == "N":
        return "H3"
    if el != "O":
        return "H2"
    # Hydroxyl hydrogen: class depends on what else the oxygen touches.
    for j, _ in mol.neighbors(i):
        nbr = mol.atoms[j]
        if nbr.element == "N":
            return "H3"
        if nbr.element in ("O", "S"):
            return "H4"
        if nbr.element == "C":
            if nbr.aromatic:
                return "H2"
            sp3 = all(
                b.order == 1 and not b.aromatic for _, b in mol.neighbors(j)
            )
            if sp3:
                return "H2"
            if any(
                b.order == 2 and mol.atoms[k].element in ("C", "N", "O", "S")
                for k, b in mol.neighbors(j)
            ):
                return "H4"
            return "H2"
    return "H2"


def classify_atom(mol: MolGraph, i: int) -> str:
    """Wildman-Crippen class label of heavy atom i."""
    atom = mol.atoms[i]
    el = atom.element
    if el == "C":
        if atom.aromatic:
            return _classify_aromatic_carbon(mol, i)
        return _classify_aliphatic_carbon(mol, i)
    if el == "N":
        return _classify_nitrogen(mol, i)
    if el == "O":
        return _classify_oxygen(mol, i)
    if el == "S":
        return "S3" if atom.aromatic else ("S2" if atom.charge != 0 else "S1")
    if el == "P":
        return "P"
    if el in _HALOGENS:
        return "HalAnion" if atom.charge < 0 else el
    return "Other"


def atom_contributions(mol: MolGraph) -> list[tuple[str, float]]:
    """Per-heavy-atom (class, contribution) pairs, hydrogens folded in.

    Each entry sums the heavy atom's own class value and the contributions
    of its implicit hydrogens.

    Args:
        mol: Graph to type; must contain no dummy atoms.

    Returns:
        One (class label, total contribution) pair per atom, in atom order.
    """
    out = []
    for i in range(len(mol)):
        label = classify_atom(mol, i)
        value = CONTRIB[label]
        h = mol.hydrogens(i)
        if h:
            value += h * CONTRIB[_classify_h(mol, i)]
        out.append((label, value))
    return out


def clogp(mol: MolGraph) -> float:
    """Wildman-Crippen octanol/water partition estimate."""
    return round(sum(v for _, v in atom_contributions(mol)), 4)
