"""Command-line surface for the pipelines.

Exit codes: 0 success, 1 domain error, 2 usage error. Domain errors print
to stderr with an ``error:`` prefix; file outputs are written atomically
and accompanied by a ``<name>.summary.json`` sidecar.
"""

from __future__ import annotations

import csv
import io
import json
import logging
import random
import sys

import click

from forge import fileio
from forge.context import vr_study
from forge.corpus import (
    AttrRecord,
    MixtureSpec,
    emit_multiturn,
    emit_stage1,
    emit_stage2,
)
from forge.editgrammar import parse_answer, verify_answer
from forge.errors import ForgeError
from forge.fragment.attribution import attribute, auto_decompose, decompose
from forge.mmpa import MmpPair, leakage_filter, load_activity_table, mine_mmps
from forge.molgraph.canon import canonical_smiles
from forge.molgraph.fingerprint import morgan_fingerprint, tanimoto
from forge.molgraph.parser import normalize, parse_smiles
from forge.props import PROPERTY_NAMES, PropertyOracle, evaluate
from forge.search import (
    SearchConfig,
    edit_table_policy,
    ExternalOracle,
    property_oracle,
    run_optimization,
)
from forge.smeplus import (
    EditPair,
    build_pool,
    chain_trajectories,
    mine_pairs,
    pool_from_pairs,
)
from forge.tokenizer import tokenize_mixed


def _parse(smiles: str):
    return normalize(parse_smiles(smiles))


def _load_corpus(path: str, threads: int):
    strings = fileio.read_smiles_file(path)
    return fileio.ordered_map(_parse, strings, threads)


@click.group()
@click.option("--log-level", default="warning", show_default=True,
              type=click.Choice(["debug", "info", "warning", "error"]))
def cli(log_level: str) -> None:
    """Fragment attribution, edit mining, corpus emission, and search."""
    logging.basicConfig(level=log_level.upper(), stream=sys.stderr,
                        format="%(levelname)s %(name)s: %(message)s")


@cli.command()
@click.argument("smiles", nargs=-1, required=True)
def parse(smiles: tuple[str, ...]) -> None:
    """Print the canonical form of each SMILES."""
    for s in smiles:
        click.echo(canonical_smiles(_parse(s)))


@cli.command()
@click.argument("smiles", nargs=-1, required=True)
@click.option("--radius", default=2, show_default=True)
@click.option("--bits", default=2048, show_default=True)
@click.option("--pair", is_flag=True,
              help="Treat the two arguments as a pair and print their Tanimoto.")
def fp(smiles: tuple[str, ...], radius: int, bits: int, pair: bool) -> None:
    """Print set fingerprint bit indices (or a pair's Tanimoto)."""
    if pair:
        if len(smiles) != 2:
            raise click.UsageError("--pair needs exactly two SMILES")
        a, b = (morgan_fingerprint(_parse(s), radius, bits) for s in smiles)
        click.echo(f"{tanimoto(a, b):.6f}")
        return
    for s in smiles:
        vector = morgan_fingerprint(_parse(s), radius, bits)
        click.echo(" ".join(str(i) for i, bit in enumerate(vector) if bit))


@cli.command(name="tokenize")
@click.argument("text")
def tokenize_cmd(text: str) -> None:
    """Print one token per line as kind<TAB>surface."""
    for token in tokenize_mixed(text).tokens:
        click.echo(f"{token.kind}\t{token.surface}")


@cli.command()
@click.argument("smiles")
@click.option("--json", "as_json", is_flag=True, help="Emit one JSON object.")
def props(smiles: str, as_json: bool) -> None:
    """Print all properties of a molecule as name=value lines."""
    mol = _parse(smiles)
    values = {
        name: evaluate(PropertyOracle(name, "higher_better"), mol)
        for name in PROPERTY_NAMES
    }
    if as_json:
        click.echo(json.dumps(values))
        return
    for name, value in values.items():
        click.echo(f"{name}={value}")


@cli.command(name="decompose")
@click.argument("smiles")
@click.option("--method", default="auto", show_default=True,
              type=click.Choice(["murcko", "brics", "efg", "auto"]))
@click.option("--seed", default=0, show_default=True)
def decompose_cmd(smiles: str, method: str, seed: int) -> None:
    """Print the fragments of a decomposition, one per line."""
    mol = _parse(smiles)
    if method == "auto":
        result = auto_decompose(mol, random.Random(seed))
    else:
        result = decompose(mol, method)
    for frag in result.fragments:
        click.echo(frag.smiles())


@cli.command(name="attribute")
@click.argument("smiles")
@click.option("--prop", required=True, type=click.Choice(PROPERTY_NAMES))
@click.option("--method", default="auto", show_default=True,
              type=click.Choice(["murcko", "brics", "efg", "auto"]))
@click.option("--removal", default="replace_with_h", show_default=True,
              type=click.Choice(["replace_with_h", "delete_with_cap"]))
@click.option("--seed", default=0, show_default=True)
def attribute_cmd(smiles: str, prop: str, method: str, removal: str, seed: int) -> None:
    """Print fragments ranked by per-atom attribution, strongest first."""
    mol = _parse(smiles)
    if method == "auto":
        decomp = auto_decompose(mol, random.Random(seed))
    else:
        decomp = decompose(mol, method)
    oracle = PropertyOracle(prop, "higher_better")
    records = attribute(mol, decomp, oracle, removal)
    for rec in sorted(records, key=lambda r: (-r.per_atom_score, r.fragment.smiles())):
        click.echo(f"{rec.fragment.smiles()}\t{rec.raw_delta}\t{rec.per_atom_score}")


@cli.command()
@click.argument("corpus", type=click.Path(exists=True, dir_okay=False))
@click.option("--prop", required=True, type=click.Choice(PROPERTY_NAMES))
@click.option("--radius", default=2, show_default=True)
@click.option("--top-k", default=30, show_default=True)
@click.option("--shuffles", default=100, show_default=True)
@click.option("--seed", default=0, show_default=True)
@click.option("--removal", default="replace_with_h", show_default=True,
              type=click.Choice(["replace_with_h", "delete_with_cap"]))
@click.option("--threads", default=1, show_default=True)
@click.option("-o", "--output", type=click.Path(dir_okay=False))
def vr(corpus: str, prop: str, radius: int, top_k: int, shuffles: int,
       seed: int, removal: str, threads: int, output: str | None) -> None:
    """Variance-reduction study; emits a per-fragment CSV."""
    mols = _load_corpus(corpus, threads)
    oracle = PropertyOracle(prop, "higher_better")
    reports, aggregates = vr_study(
        mols, oracle, radius=radius, top_k=top_k, shuffles=shuffles,
        seed=seed, removal=removal,
    )
    buffer = io.StringIO()
    writer = csv.writer(buffer)
    writer.writerow(["fragment", "n", "n_envs", "real_vr", "shuf_vr", "delta"])
    for rep in reports:
        writer.writerow([
            rep.fragment_key, rep.n_occurrences, rep.n_environments,
            f"{rep.vr:.6f}", f"{rep.shuffled_vr_mean:.6f}", f"{rep.delta:.6f}",
        ])
    text = buffer.getvalue()
    if output is None:
        click.echo(text, nl=False)
        return
    fileio.atomic_write_text(output, text)
    fileio.write_summary(output, {
        "corpus": corpus, "property": prop, "radius": radius, "top_k": top_k,
        "shuffles": shuffles, "seed": seed, "removal": removal,
        "fragments": len(reports), **aggregates,
    })
    click.echo(f"wrote {len(reports)} fragments to {output}")


@cli.command(name="mine-smeplus")
@click.argument("corpus", type=click.Path(exists=True, dir_okay=False))
@click.option("--prop", required=True, type=click.Choice(PROPERTY_NAMES))
@click.option("--radius", default=2, show_default=True)
@click.option("--min-bin", default=3, show_default=True)
@click.option("--cap", default=5, show_default=True,
              help="Occurrence cap per distinct edit.")
@click.option("--candidate-cap", default=20, show_default=True)
@click.option("--min-improvement", default=0.01, show_default=True)
@click.option("--seed", default=0, show_default=True)
@click.option("--threads", default=1, show_default=True)
@click.option("-o", "--output", required=True, type=click.Path(dir_okay=False))
def mine_smeplus(corpus: str, prop: str, radius: int, min_bin: int, cap: int,
                 candidate_cap: int, min_improvement: float, seed: int,
                 threads: int, output: str) -> None:
    """Mine context-conditioned edit pairs from a corpus."""
    mols = _load_corpus(corpus, threads)
    oracle = PropertyOracle(prop, "higher_better")
    pool = build_pool(mols, oracle, radius=radius, min_bin=min_bin, seed=seed)
    result = mine_pairs(
        mols, oracle, pool, radius=radius, dedup_cap=cap,
        candidate_cap=candidate_cap, min_improvement=min_improvement, seed=seed,
    )
    fileio.write_jsonl(output, (p.to_json() for p in result.pairs))
    fileio.write_summary(output, {
        "corpus": corpus, "property": prop, "radius": radius, "min_bin": min_bin,
        "cap": cap, "candidate_cap": candidate_cap,
        "min_improvement": min_improvement, "seed": seed, **result.counters,
    })
    click.echo(f"wrote {len(result.pairs)} pairs to {output}")


@cli.command(name="mine-mmpa")
@click.argument("activity", type=click.Path(exists=True, dir_okay=False))
@click.option("--exclude", default="JNK,DRD,GSK", show_default=True,
              help="Comma-separated target-description keywords to drop.")
@click.option("--min-pchembl", default=5.0, show_default=True)
@click.option("--radius", default=2, show_default=True)
@click.option("-o", "--output", required=True, type=click.Path(dir_okay=False))
def mine_mmpa(activity: str, exclude: str, min_pchembl: float, radius: int,
              output: str) -> None:
    """Mine matched-pair edit pairs from an activity table."""
    records, skipped = load_activity_table(activity)
    for line in skipped:
        click.echo(f"warning: skipped unparseable row at line {line}", err=True)
    keywords = tuple(k for k in exclude.split(",") if k)
    kept = leakage_filter(records, keywords)
    pairs = mine_mmps(kept, radius=radius, min_pchembl=min_pchembl)
    fileio.write_jsonl(output, (p.to_json() for p in pairs))
    fileio.write_summary(output, {
        "activity": activity, "rows": len(records) + len(skipped),
        "skipped_rows": len(skipped), "excluded_by_leakage": len(records) - len(kept),
        "min_pchembl": min_pchembl, "radius": radius, "pairs": len(pairs),
    })
    click.echo(f"wrote {len(pairs)} pairs to {output}")


@cli.command()
@click.option("--src", required=True, help="Molecule the first block edits.")
def verify(src: str) -> None:
    """Verify Modification/Result blocks read from stdin; exit 0 only on ok."""
    text = sys.stdin.read()
    answer = parse_answer(text)
    verdicts = verify_answer(_parse(src), answer)
    for verdict in verdicts:
        click.echo(verdict)
    if any(v != "ok" for v in verdicts):
        sys.exit(1)


def _load_pairs(path: str) -> list[EditPair]:
    rows = fileio.read_jsonl(path)
    return [
        MmpPair.from_json(row) if "target_id" in row else EditPair.from_json(row)
        for row in rows
    ]


@cli.command(name="emit-corpus")
@click.option("--stage", required=True, type=click.Choice(["1", "2", "multiturn"]))
@click.option("--total", required=True, type=int,
              help="Samples to emit (per property for multiturn).")
@click.option("--seed", default=0, show_default=True)
@click.option("--spec", "spec_path", type=click.Path(exists=True, dir_okay=False),
              help="Mixture file of 'family = ratio' lines; defaults per stage.")
@click.option("--attr", type=click.Path(exists=True, dir_okay=False),
              help="Attribution records JSONL (stage 1).")
@click.option("--pairs", type=click.Path(exists=True, dir_okay=False),
              help="Edit pairs JSONL (stage 2 and multiturn).")
@click.option("--mmp", type=click.Path(exists=True, dir_okay=False),
              help="Matched-pair JSONL.")
@click.option("--external", type=click.Path(exists=True, dir_okay=False),
              help="Pass-through instruction JSONL (stage 1).")
@click.option("-o", "--output", required=True, type=click.Path(dir_okay=False))
def emit_corpus(stage: str, total: int, seed: int, spec_path: str | None,
                attr: str | None, pairs: str | None, mmp: str | None,
                external: str | None, output: str) -> None:
    """Emit a training corpus as instruction/input/output JSONL."""
    rng = random.Random(seed)
    mmp_pairs = [MmpPair.from_json(r) for r in fileio.read_jsonl(mmp)] if mmp else []
    if stage == "1":
        spec = MixtureSpec.from_file(spec_path) if spec_path else MixtureSpec.stage1_default()
        attr_records = (
            [AttrRecord.from_json(r) for r in fileio.read_jsonl(attr)] if attr else []
        )
        external_records = fileio.read_jsonl(external) if external else []
        samples = emit_stage1(attr_records, mmp_pairs, spec, total, rng,
                              external_records=external_records)
    elif stage == "2":
        spec = MixtureSpec.from_file(spec_path) if spec_path else MixtureSpec.stage2_default()
        edit_pairs = _load_pairs(pairs) if pairs else []
        samples = emit_stage2(edit_pairs, mmp_pairs, spec, total, rng)
    else:
        edit_pairs = _load_pairs(pairs) if pairs else []
        trajectories = chain_trajectories(edit_pairs)
        samples = emit_multiturn(trajectories, total, rng)
    count = fileio.write_jsonl(output, (s.to_json() for s in samples))
    fileio.write_summary(output, {
        "stage": stage, "total": total, "seed": seed, "samples": count,
        "attr": attr, "pairs": pairs, "mmp": mmp, "external": external,
    })
    click.echo(f"wrote {count} samples to {output}")


@cli.command()
@click.option("--seed-file", required=True, type=click.Path(exists=True, dir_okay=False))
@click.option("--oracle", "oracle_spec", required=True,
              help="Property name, or ext:<command> for a line-protocol subprocess.")
@click.option("--budget", default=1000, show_default=True)
@click.option("--delta", type=float, default=None,
              help="Minimum Tanimoto similarity to any seed.")
@click.option("--pool", "pool_path", required=True,
              type=click.Path(exists=True, dir_okay=False),
              help="Mined edit pairs JSONL backing the proposal policy.")
@click.option("--surrogate", default=None, type=click.Choice(PROPERTY_NAMES),
              help="Rule-based property for fragment weakness ranking.")
@click.option("--k", default=5, show_default=True)
@click.option("--candidates", default=8, show_default=True)
@click.option("--temperature", default=0.7, show_default=True)
@click.option("--seed", default=0, show_default=True)
@click.option("-o", "--output", required=True, type=click.Path(dir_okay=False))
def optimize(seed_file: str, oracle_spec: str, budget: int, delta: float | None,
             pool_path: str, surrogate: str | None, k: int, candidates: int,
             temperature: float, seed: int, output: str) -> None:
    """Budgeted black-box optimization from seed molecules."""
    seeds = [_parse(s) for s in fileio.read_smiles_file(seed_file)]
    pool = pool_from_pairs(_load_pairs(pool_path))
    surrogate_oracle = (
        PropertyOracle(surrogate, "higher_better") if surrogate else None
    )
    policy = edit_table_policy(pool, surrogate=surrogate_oracle)
    cfg = SearchConfig(
        budget=budget, k=k, candidates_per_step=candidates,
        similarity_floor=delta, sampling_temperature=temperature, seed=seed,
    )
    if oracle_spec.startswith("ext:"):
        with ExternalOracle(oracle_spec[4:]) as oracle:
            report = run_optimization(seeds, oracle, policy, cfg)
    else:
        if oracle_spec not in PROPERTY_NAMES:
            raise click.UsageError(f"unknown oracle {oracle_spec!r}")
        report = run_optimization(seeds, property_oracle(oracle_spec), policy, cfg)
    fileio.write_json(output, report.to_json())
    fileio.write_summary(output, {
        "seed_file": seed_file, "oracle": oracle_spec, "budget": budget,
        "delta": delta, "pool": pool_path, "seed": seed,
        "best_smiles": report.best_smiles, "best_score": report.best_score,
        "calls": len(report.calls), "top10_auc": report.top10_auc,
        "policy_failure": report.policy_failure,
    })
    click.echo(f"best {report.best_smiles} score {report.best_score}")


def main() -> None:
    try:
        cli.main(standalone_mode=True)
    except ForgeError as exc:
        print(f"error: {exc}", file=sys.stderr)
        sys.exit(1)


if __name__ == "__main__":
    main()
