"""Atomic file writes and the small formats the CLI moves around."""

from __future__ import annotations

import json
import os
import tempfile
from collections.abc import Callable, Iterable, Sequence
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path
from typing import Any, TypeVar

from forge.errors import ForgeError

T = TypeVar("T")
R = TypeVar("R")


def atomic_write_text(path: str | Path, text: str) -> None:
    """Write via a temp file in the same directory, then rename."""
    path = Path(path)
    fd, tmp = tempfile.mkstemp(dir=path.parent or Path("."), prefix=f".{path.name}.")
    try:
        with os.fdopen(fd, "w") as handle:
            handle.write(text)
        os.replace(tmp, path)
    except BaseException:
        try:
            os.unlink(tmp)
        except OSError:
            pass
        raise


def write_json(path: str | Path, payload: Any) -> None:
    atomic_write_text(path, json.dumps(payload, indent=2) + "\n")


def write_jsonl(path: str | Path, rows: Iterable[dict[str, Any]]) -> int:
    """Write one JSON object per line; returns the row count."""
    lines = [json.dumps(row, separators=(",", ":")) for row in rows]
    atomic_write_text(path, "".join(line + "\n" for line in lines))
    return len(lines)


def read_jsonl(path: str | Path) -> list[dict[str, Any]]:
    rows = []
    for line_num, line in enumerate(Path(path).read_text().splitlines(), 1):
        line = line.strip()
        if not line:
            continue
        try:
            rows.append(json.loads(line))
        except json.JSONDecodeError as exc:
            raise ForgeError(f"{path}: line {line_num}: invalid JSON") from exc
    return rows


def read_smiles_file(path: str | Path) -> list[str]:
    """Read a .smi file: one SMILES per line, blanks and '#' lines skipped.

    Only the first whitespace-separated field of each line is taken, so
    name columns are tolerated.
    """
    out = []
    for line in Path(path).read_text().splitlines():
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        out.append(line.split()[0])
    return out


def summary_path(path: str | Path) -> Path:
    path = Path(path)
    return path.with_name(path.name + ".summary.json")


def write_summary(path: str | Path, payload: dict[str, Any]) -> Path:
    """Write the machine-readable sidecar for an output file."""
    target = summary_path(path)
    write_json(target, payload)
    return target


def ordered_map(
    fn: Callable[[T], R], items: Sequence[T], threads: int = 1
) -> list[R]:
    """Map preserving input order, optionally on a thread pool."""
    if threads <= 1 or len(items) <= 1:
        return [fn(item) for item in items]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(fn, items))
