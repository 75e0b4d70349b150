"""Generate the committed test fixtures under tests/fixtures/.

Run from the repository root:

    python3 scripts/make_fixtures.py

Everything is deterministic: rerunning produces byte-identical files.
The script self-checks the properties the acceptance tests rely on
(corpus size and uniqueness, mined-pair coverage, chainability, seed
improvability) and fails loudly if a regeneration would break them.
"""
from __future__ import annotations

import sys
import time
from pathlib import Path

from forge.corpus import collect_attr_records
from forge.fileio import atomic_write_text, write_json, write_jsonl
from forge.hashing import hash_ints, hash_str
from forge.mmpa import ActivityRecord, mine_mmps
from forge.molgraph import canonical_smiles, parse_smiles
from forge.molgraph.parser import normalize
from forge.props import PROPERTY_NAMES, PropertyOracle, evaluate
from forge.search import SearchConfig, edit_table_policy, property_oracle, run_optimization
from forge.smeplus import build_pool, chain_trajectories, mine_pairs, pool_from_pairs

OUT = Path(__file__).resolve().parent.parent / "tests" / "fixtures"

SCAFFOLDS = [
    "c1ccccc1", "c1ccncc1", "c1cccnc1", "c1cncnc1", "c1ccc2ccccc2c1",
    "c1ccc2ncccc2c1", "c1ccc2[nH]ccc2c1", "c1ccc2occc2c1", "c1ccc2sccc2c1",
    "c1ccsc1", "c1ccoc1", "c1cc[nH]c1", "c1ocnc1", "c1scnc1",
    "C1CCCCC1", "C1CCNCC1", "C1CCOCC1", "C1CCSCC1", "C1CNCCN1",
    "C1COCCN1", "C1CCNC1", "C1CCOC1", "C1CCC2CCCCC2C1",
    "c1ccc2c(c1)CCCC2", "c1ccc(cc1)C1CCCCC1",
]

_BASE_SUBS = [
    "C", "N", "O", "F", "Cl", "Br", "I", "S",
    "CC", "CO", "CN", "CF", "CCl", "C(C)C", "C(C)(C)C", "C(C)O",
    "C(F)(F)F", "C#N", "C=C", "C=O", "C(=O)C", "C(=O)N", "C(=O)O",
    "C(=O)OC", "OC", "OCC", "OC(F)(F)F", "OC(C)C", "N(C)C", "NC",
    "NC(=O)C", "N(C)C(=O)C", "S(=O)(=O)C", "S(=O)(=O)N", "SC", "SCC",
    "[N+](=O)[O-]", "C(=O)NC", "CNC", "COC",
]
_PARA = [
    "C", "N", "O", "F", "Cl", "Br", "OC", "C#N", "C(F)(F)F", "CC",
    "N(C)C", "C(=O)O", "C(=O)N", "S(=O)(=O)C", "NC(=O)C", "OC(F)(F)F",
    "C(C)C", "SC", "[N+](=O)[O-]", "CO",
]
_RING_SUBS = [
    "c1ccccc1", "c1ccncc1", "c1cccs1", "c1ccco1", "Cc1ccccc1",
    "Oc1ccccc1", "Nc1ccccc1", "C(=O)c1ccccc1", "OCc1ccccc1", "N1CCOCC1",
    "N1CCCC1", "C1CC1", "C1CCC1", "C(F)F", "OC(F)F", "N1CCNCC1",
    "C(=O)N1CCOCC1", "C(C)(C)O", "C(=O)NC(C)C", "N(CC)CC",
]
SUBS = _BASE_SUBS + [f"c1ccc({x})cc1" for x in _PARA] + _RING_SUBS
# Spare substituents used to top the grid corpus back up to exactly 2000
# distinct molecules after canonical dedup removes coincidental repeats.
EXTRA_SUBS = [
    "OCF", "C(=O)F", "NN", "ON", "C(=O)CC", "OC(=O)C", "N(C)N",
    "SCN", "C(Cl)Cl", "C(=C)C", "OCO", "NCO", "C(=O)NN", "SS",
    "C(=S)N", "NC(=O)N", "C(=O)Cl", "N=O", "C(C)F", "OCCl",
]

CLASSICS = [
    "CC(=O)Oc1ccccc1C(=O)O",
    "Cn1cnc2c1c(=O)n(C)c(=O)n2C",
    "CC(C)Cc1ccc(cc1)C(C)C(=O)O",
    "OC(=O)c1ccccc1O",
    "c1ccc(cc1)C(=O)O",
    "CC(N)Cc1ccccc1",
    "Clc1ccccc1Cl",
    "CC(C)NCC(O)c1ccc(O)c(O)c1",
    "CN1CCC[C@H]1c1cccnc1",
    "CC(=O)Nc1ccc(O)cc1",
]

# Reference logP/TPSA values for well-characterized small molecules,
# tabulated from the published atom-contribution parameterizations. The
# remaining panel rows are frozen from a one-time computation.
LITERATURE_PANEL = {
    "c1ccccc1": (1.6866, 0.0),
    "Oc1ccccc1": (1.3922, 20.23),
    "Nc1ccccc1": (1.2688, 26.02),
    "c1ccncc1": (1.0816, 12.89),
    "OC(=O)c1ccccc1": (1.3848, 37.30),
    "CC(=O)O": (0.0909, 37.30),
    "Cn1cnc2c1c(=O)n(C)c(=O)n2C": (-1.0293, 61.82),
    "c1ccsc1": (1.7481, 28.24),
    "Clc1ccccc1": (2.3400, 0.0),
    "CC#N": (0.5299, 23.79),
    "CC(=O)N": (-0.5084, 43.09),
    "c1ccc2ccccc2c1": (2.8398, 0.0),
    "c1ccc(-c2ccccc2)cc1": (3.3536, 0.0),
    "Cc1ccccc1": (1.9950, 0.0),
    "CS(=O)C": (None, 36.28),
    "CS(=O)(=O)C": (None, 42.52),
    "c1cc[nH]c1": (None, 15.79),
    "c1ccoc1": (None, 13.14),
    "c1c[nH]cn1": (None, 28.68),
    "CCCCCC": (None, 0.0),
    "COC(=O)C": (None, 26.30),
}
PANEL_EXTRAS = [
    "COc1ccccc1", "O=[N+]([O-])c1ccccc1", "Cn1cnc2c1C(=O)N(C)C(=O)N2C",
    "CC(=O)Oc1ccccc1C(=O)O", "CC(C)Cc1ccc(cc1)C(C)C(=O)O",
    "CC(=O)Nc1ccc(O)cc1", "CC(C)NCC(O)c1ccc(O)c(O)c1", "CN1CCC[C@H]1c1cccnc1",
    "c1ccc2[nH]ccc2c1", "c1ccc2ncccc2c1", "c1ccc2occc2c1", "c1ccc2sccc2c1",
    "c1cncnc1", "C1CCNCC1", "C1COCCN1", "C1CCSCC1", "FC(F)(F)c1ccccc1",
    "CSc1ccccc1", "CN(C)c1ccccc1", "CC(=O)c1ccccc1", "COC(=O)c1ccccc1",
    "NC(=O)c1ccccc1", "N#Cc1ccccc1", "Brc1ccccc1", "Ic1ccccc1",
    "OCc1ccccc1", "CC(O)c1ccccc1", "C1CC1c1ccccc1", "c1ccc(cc1)N1CCOCC1",
]

MMP_TARGETS = [
    ("CHEMBL205", "Carbonic anhydrase II"),
    ("CHEMBL251", "Adenosine A2a receptor"),
    ("CHEMBL210", "Beta-2 adrenergic receptor"),
    ("CHEMBL220", "Acetylcholinesterase"),
    ("CHEMBL244", "Coagulation factor X"),
    ("CHEMBL204", "Thrombin"),
    ("CHEMBL228", "Serotonin transporter"),
    ("CHEMBL233", "Mu opioid receptor"),
    ("CHEMBL1862", "Tyrosine-protein kinase ABL"),
    ("CHEMBL279", "VEGF receptor 2"),
    ("CHEMBL3242", "Carbonic anhydrase XII"),
    ("CHEMBL2971", "Tyrosine-protein kinase JAK2"),
    ("CHEMBL4005", "PI3-kinase alpha"),
    ("CHEMBL203", "EGF receptor"),
]
MMP_SUBS = [
    "C", "CC", "O", "OC", "N", "F", "Cl", "Br", "C#N", "C(F)(F)F",
    "CO", "S(=O)(=O)C",
]

ACTIVITY_TARGETS = [
    ("CHEMBL205", "Carbonic anhydrase II"),
    ("CHEMBL251", "Adenosine A2a receptor"),
    ("CHEMBL210", "Beta-2 adrenergic receptor"),
    ("CHEMBL2801", "c-Jun N-terminal kinase JNK3"),
    ("CHEMBL217", "Dopamine D2 receptor DRD2"),
    ("CHEMBL262", "Glycogen synthase kinase GSK-3 beta"),
]


def _canon(smiles: str) -> str:
    return canonical_smiles(normalize(parse_smiles(smiles)))


def _unit(label: str, *parts: str) -> float:
    """Deterministic uniform draw in [0, 1) keyed by strings."""
    return (hash_ints([hash_str(label), *(hash_str(p) for p in parts)]) % 10**6) / 10**6


def build_corpus_small() -> list[str]:
    rows: list[str] = []
    seen: set[str] = set()
    pairs = [(i, j) for j in range(len(SUBS)) for i in range(len(SCAFFOLDS))]
    for i, j in pairs:
        if len(rows) >= 190:
            break
        smiles = SCAFFOLDS[i] + SUBS[(i * 7 + j) % len(SUBS)]
        canon = _canon(smiles)
        if canon not in seen:
            seen.add(canon)
            rows.append(smiles)
    rows.extend(CLASSICS)
    assert len(rows) == 200 and len({_canon(s) for s in rows}) == 200
    return rows


def build_corpus_2k() -> list[str]:
    rows: list[str] = []
    seen: set[str] = set()
    for sc in SCAFFOLDS:
        for su in SUBS + EXTRA_SUBS:
            if len(rows) >= 2000:
                return rows
            smiles = sc + su
            canon = _canon(smiles)
            if canon not in seen:
                seen.add(canon)
                rows.append(smiles)
    raise AssertionError(f"grid exhausted at {len(rows)} molecules")


def build_panel(corpus_small: list[str]) -> list[dict[str, float | str]]:
    molecules = list(LITERATURE_PANEL) + PANEL_EXTRAS
    assert len(molecules) == 50 and len({_canon(s) for s in molecules}) == 50
    panel = []
    for smiles in molecules:
        mol = normalize(parse_smiles(smiles))
        clogp = evaluate(PropertyOracle("clogp", "higher_better"), mol)
        tpsa = evaluate(PropertyOracle("tpsa", "higher_better"), mol)
        ref = LITERATURE_PANEL.get(smiles)
        if ref:
            lit_clogp, lit_tpsa = ref
            if lit_clogp is not None:
                assert abs(clogp - lit_clogp) <= 0.05, (smiles, clogp, lit_clogp)
                clogp = lit_clogp
            assert abs(tpsa - lit_tpsa) <= 0.05, (smiles, tpsa, lit_tpsa)
            tpsa = lit_tpsa
        panel.append({"smiles": smiles, "clogp": clogp, "tpsa": tpsa})
    return panel


def build_external(corpus_small: list[str]) -> list[dict[str, str]]:
    records = []
    for smiles in corpus_small:
        mol = normalize(parse_smiles(smiles))
        for prop, question in [
            ("mol_weight", "What is the molecular weight of the molecule?"),
            ("ring_count", "How many rings does the molecule contain?"),
            ("hba", "How many hydrogen-bond acceptors does the molecule have?"),
        ]:
            value = evaluate(PropertyOracle(prop, "higher_better"), mol)
            records.append(
                {
                    "instruction": question,
                    "input": f"Molecule SMILES: <start_smiles>{smiles}<end_smiles>",
                    "output": str(round(value, 2)),
                }
            )
    return records


def build_activity_rows() -> list[str]:
    """Exactly 200 CSV rows: analog series per target, plus edge cases."""
    cores = ["c1ccc2ncccc2c1", "c1ccsc1", "c1ccccc1C(=O)N", "C1CCNCC1C(=O)N"]
    subs15 = MMP_SUBS + ["NC(=O)C", "OCC", "N(C)C"]
    rows: list[str] = []
    for n, (tid, desc) in enumerate(ACTIVITY_TARGETS):
        series = cores[:2] if n < 3 else cores[2:]
        for core in series:
            for su in subs15:
                smiles = core + su
                pchembl = round(4.2 + 4.9 * _unit("activity", tid, smiles), 2)
                rows.append(f"{smiles},{tid},{desc},{pchembl}")
    # Oversized variable fragments exercise the 15-atom and 40% filters.
    big = "c1ccc2ncccc2c1" + "C(=O)N(Cc1ccccc1)Cc1ccc(Cl)cc1"
    small_parent = "c1ccccc1" + "c1ccncc1"
    tid, desc = ACTIVITY_TARGETS[0]
    rows.append(f"{big},{tid},{desc},7.5")
    rows.append(f"{small_parent},{tid},{desc},7.1")
    # Unparseable SMILES are skipped by the loader with a warning.
    rows.append(f"C((,{tid},{desc},6.0")
    rows.append(f"XYZ,{tid},{desc},6.1")
    assert len(rows) <= 200, len(rows)
    filler_subs = ["C(C)O", "C(C)C", "SC", "C=C", "C(=O)OC", "CF"]
    i = 0
    while len(rows) < 200:
        tid, desc = ACTIVITY_TARGETS[i % len(ACTIVITY_TARGETS)]
        smiles = "c1ccc2ccccc2c1" + filler_subs[i % len(filler_subs)]
        if i >= len(filler_subs):
            smiles = "c1ccoc1" + filler_subs[i % len(filler_subs)]
        pchembl = round(4.2 + 4.9 * _unit("filler", tid, smiles, str(i)), 2)
        rows.append(f"{smiles},{tid},{desc},{pchembl}")
        i += 1
    assert len(rows) == 200
    return rows


def mine_smeplus_fixture(mols) -> list[dict]:
    all_rows: list[dict] = []
    key_count = 0
    for prop in PROPERTY_NAMES:
        oracle = PropertyOracle(prop, "higher_better")
        t0 = time.time()
        pool = build_pool(mols, oracle)
        result = mine_pairs(mols, oracle, pool)
        # Coverage first: one pair per source molecule, then seconds up to
        # the budget, so weak properties keep their full source spread.
        counts: dict[str, int] = {}
        first_idx, second_idx = [], []
        for i, pair in enumerate(result.pairs):
            c = counts.get(pair.src_smiles, 0)
            if c == 0:
                first_idx.append(i)
            elif c == 1:
                second_idx.append(i)
            counts[pair.src_smiles] = c + 1
        chosen = set(first_idx) | set(second_idx[: max(0, 1800 - len(first_idx))])
        kept = [result.pairs[i] for i in sorted(chosen)]
        trajs = chain_trajectories(kept)
        long_trajs = sum(1 for t in trajs if len(t.steps) >= 2)
        key_count += len(first_idx)
        print(
            f"  {prop}: mined {len(result.pairs)} kept {len(kept)} "
            f"srcs {len(first_idx)} trajs>=2 {long_trajs} ({time.time()-t0:.0f}s)",
            flush=True,
        )
        assert len(first_idx) >= 550, (prop, len(first_idx))
        assert long_trajs >= 5, (prop, long_trajs)
        all_rows.extend(p.to_json() for p in kept)
    assert key_count >= 8500, key_count
    return all_rows


def mine_mmp_fixture() -> list[dict]:
    cores = [sc + dec for sc in SCAFFOLDS[:14] for dec in ("", "C", "CC", "O", "N")]
    assert len(cores) == 70
    records = []
    for tid, _desc in MMP_TARGETS:
        for core in cores:
            for su in MMP_SUBS:
                smiles = core + su
                pchembl = 4.0 + 5.5 * _unit("mmp", tid, smiles)
                records.append(ActivityRecord(smiles, tid, "synthetic", pchembl))
    pairs = mine_mmps(records)
    kept, seen_keys = [], set()
    for pair in pairs:
        key = (pair.target_id, pair.src_smiles)
        if key not in seen_keys:
            seen_keys.add(key)
            kept.append(pair)
    print(f"  mmp: mined {len(pairs)} kept {len(kept)} keys {len(seen_keys)}", flush=True)
    # A 100k stage-2 emission needs ~6k distinct (target, source) pairs for
    # its activity-direct slots (10% direct x 60% family share, plus binomial
    # spread); 7500 keys keeps the collision-redraw loop comfortably cheap.
    assert len(seen_keys) >= 7500, len(seen_keys)
    return [p.to_json() for p in kept]


def pick_seeds(pairs_rows: list[dict]) -> list[str]:
    """Ten clogp-improvable molecules spread over distinct scaffolds."""
    from collections import Counter

    src_pairs = Counter(
        r["src"] for r in pairs_rows if r["property"] == "clogp"
    )
    seeds, used_scaffold = [], set()
    for canon, count in sorted(src_pairs.items(), key=lambda kv: (-kv[1], kv[0])):
        mol = normalize(parse_smiles(canon))
        if not 10 <= len(mol) <= 16 or count < 3:
            continue
        key = frozenset(
            mol.atoms[i].element for i in range(len(mol)) if mol.atom_in_ring(i)
        )
        if key in used_scaffold:
            continue
        used_scaffold.add(key)
        seeds.append(canon)
        if len(seeds) == 10:
            return seeds
    raise AssertionError(f"only {len(seeds)} seeds found")


def check_search(seeds: list[str], pairs_rows: list[dict]) -> None:
    from forge.smeplus import EditPair

    pool_pairs = [
        EditPair.from_json(r) for r in pairs_rows if r["property"] == "clogp"
    ]
    pool = pool_from_pairs(pool_pairs)
    oracle = property_oracle("clogp")
    improved, t0 = 0, time.time()
    for i, seed in enumerate(seeds):
        mol = normalize(parse_smiles(seed))
        config = SearchConfig(budget=200, similarity_floor=0.4, seed=17)
        policy = edit_table_policy(pool, surrogate=None)
        report = run_optimization([mol], oracle, policy, config)
        base = evaluate(PropertyOracle("clogp", "higher_better"), mol)
        improved += report.best_score > base
        print(f"  seed {i}: calls {len(report.calls)} best {report.best_score:.2f} "
              f"(seed {base:.2f})", flush=True)
    elapsed = time.time() - t0
    print(f"  improved {improved}/10 in {elapsed:.0f}s", flush=True)
    assert improved >= 8, improved
    assert elapsed < 60, elapsed


def main() -> None:
    OUT.mkdir(parents=True, exist_ok=True)
    t0 = time.time()

    corpus_small = build_corpus_small()
    atomic_write_text(OUT / "corpus_small.smi", "\n".join(corpus_small) + "\n")
    print(f"corpus_small.smi: {len(corpus_small)} molecules", flush=True)

    corpus_2k = build_corpus_2k()
    assert len(corpus_2k) == 2000
    atomic_write_text(OUT / "corpus_2k.smi", "\n".join(corpus_2k) + "\n")
    print(f"corpus_2k.smi: {len(corpus_2k)} molecules", flush=True)

    panel = build_panel(corpus_small)
    write_json(OUT / "crippen_tpsa_panel.json", panel)
    print(f"crippen_tpsa_panel.json: {len(panel)} molecules", flush=True)

    external = build_external(corpus_small)
    write_jsonl(OUT / "external.jsonl", external)
    print(f"external.jsonl: {len(external)} records", flush=True)

    activity = build_activity_rows()
    atomic_write_text(
        OUT / "activity_200.csv",
        "smiles,target_id,target_desc,pchembl\n" + "\n".join(activity) + "\n",
    )
    print(f"activity_200.csv: {len(activity)} rows", flush=True)

    mols = [normalize(parse_smiles(s)) for s in corpus_2k]

    attr_mols = mols[::7][:300]
    records = collect_attr_records(attr_mols, PROPERTY_NAMES)
    write_jsonl(OUT / "attr_records.jsonl", [r.to_json() for r in records])
    print(f"attr_records.jsonl: {len(records)} records", flush=True)

    print("mining smeplus pairs...", flush=True)
    pairs_rows = mine_smeplus_fixture(mols)
    write_jsonl(OUT / "pairs_smeplus.jsonl", pairs_rows)
    print(f"pairs_smeplus.jsonl: {len(pairs_rows)} pairs", flush=True)

    print("mining mmp pairs...", flush=True)
    mmp_rows = mine_mmp_fixture()
    write_jsonl(OUT / "mmp_pairs.jsonl", mmp_rows)
    print(f"mmp_pairs.jsonl: {len(mmp_rows)} pairs", flush=True)

    seeds = pick_seeds(pairs_rows)
    atomic_write_text(OUT / "seeds.smi", "\n".join(seeds) + "\n")
    print(f"seeds.smi: {len(seeds)} seeds", flush=True)

    print("checking search criterion shape...", flush=True)
    check_search(seeds, pairs_rows)

    print(f"done in {time.time()-t0:.0f}s", flush=True)


if __name__ == "__main__":
    sys.exit(main())
