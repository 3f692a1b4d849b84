"""File formats: function and matrix CSVs, eigendecomposition archives, JSON reports."""

from __future__ import annotations

import csv
import hashlib
import json
import platform
import time
from pathlib import Path

import numpy as np

from .group import GroupFunction, GroupSpec
from .spectral import EigenDecomposition
from .zmatrix import ZMatrix

FUNCTION_HEADER = ["index", "re", "im"]
MATRIX_HEADER = ["row", "col", "re", "im"]


class FormatError(ValueError):
    pass


def _num(x: float) -> str:
    # repr gives the shortest string that round-trips (at most 17 significant digits)
    return repr(float(x))


def write_function_csv(path, f: GroupFunction) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(FUNCTION_HEADER)
        for i, v in enumerate(f.values):
            w.writerow([i, _num(v.real), _num(v.imag)])


def _parse_float(text: str, lineno: int) -> float:
    try:
        return float(text)
    except ValueError:
        raise FormatError(f"line {lineno}: cannot parse number {text!r}") from None


def read_function_csv(path, group: GroupSpec) -> GroupFunction:
    values = np.zeros(group.order, dtype=complex)
    with open(path, newline="", encoding="utf-8") as fh:
        rows = csv.reader(fh)
        header = next(rows, None)
        if header is None or [h.strip() for h in header] != FUNCTION_HEADER:
            raise FormatError(f"line 1: expected header {','.join(FUNCTION_HEADER)}")
        count = 0
        for lineno, row in enumerate(rows, start=2):
            if not row:
                continue
            if len(row) != 3:
                raise FormatError(f"line {lineno}: expected 3 fields, got {len(row)}")
            try:
                idx = int(row[0])
            except ValueError:
                raise FormatError(f"line {lineno}: bad index {row[0]!r}") from None
            if idx != count:
                raise FormatError(f"line {lineno}: expected index {count}, got {idx}")
            if idx >= group.order:
                raise FormatError(f"line {lineno}: more rows than |Z| = {group.order} for {group}")
            values[idx] = complex(_parse_float(row[1], lineno), _parse_float(row[2], lineno))
            count += 1
    if count != group.order:
        raise FormatError(f"expected {group.order} rows for {group}, found {count}")
    return GroupFunction(group, values)


def write_matrix_csv(path, m: ZMatrix) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        fh.write(f"# group={m.group}\n")
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(MATRIX_HEADER)
        n = m.group.order
        for r in range(n):
            for c in range(n):
                v = m.entries[r, c]
                w.writerow([r, c, _num(v.real), _num(v.imag)])


def read_matrix_csv(path) -> ZMatrix:
    with open(path, newline="", encoding="utf-8") as fh:
        first = fh.readline().strip()
        if not first.startswith("# group="):
            raise FormatError("line 1: expected '# group=<spec>'")
        group = GroupSpec.parse(first[len("# group="):])
        n = group.order
        entries = np.zeros((n, n), dtype=complex)
        seen = np.zeros((n, n), dtype=bool)
        rows = csv.reader(fh)
        header = next(rows, None)
        if header is None or [h.strip() for h in header] != MATRIX_HEADER:
            raise FormatError(f"line 2: expected header {','.join(MATRIX_HEADER)}")
        for lineno, row in enumerate(rows, start=3):
            if not row:
                continue
            if len(row) != 4:
                raise FormatError(f"line {lineno}: expected 4 fields, got {len(row)}")
            r, c = int(row[0]), int(row[1])
            if not (0 <= r < n and 0 <= c < n):
                raise FormatError(f"line {lineno}: index ({r}, {c}) outside {n}x{n}")
            entries[r, c] = complex(_parse_float(row[2], lineno), _parse_float(row[3], lineno))
            seen[r, c] = True
    if not seen.all():
        raise FormatError(f"matrix file is missing {int((~seen).sum())} entries")
    return ZMatrix(group, entries)


def _content_hash(group: GroupSpec, eigenvalues: np.ndarray, vectors: np.ndarray) -> str:
    h = hashlib.sha256()
    h.update(str(group).encode())
    h.update(np.ascontiguousarray(eigenvalues, dtype="<f8").tobytes())
    h.update(np.ascontiguousarray(vectors, dtype="<c16").tobytes())
    return h.hexdigest()


def save_decomposition(path, ed: EigenDecomposition) -> str:
    digest = _content_hash(ed.group, ed.eigenvalues, ed.vectors)
    with open(path, "wb") as fh:
        np.savez(fh, group=np.array(str(ed.group)), eigenvalues=ed.eigenvalues.astype("<f8"),
                 vectors=ed.vectors.astype("<c16"), sha256=np.array(digest))
    return digest


def load_decomposition(path) -> EigenDecomposition:
    with np.load(path, allow_pickle=False) as data:
        group = GroupSpec.parse(str(data["group"]))
        eigenvalues = data["eigenvalues"]
        vectors = data["vectors"]
        digest = str(data["sha256"])
    if _content_hash(group, eigenvalues, vectors) != digest:
        raise FormatError(f"{path}: content hash mismatch")
    return EigenDecomposition(group, eigenvalues, vectors)


def eigen_summary(ed: EigenDecomposition, top: int = 10) -> dict:
    return {"group": str(ed.group), "top_eigenvalues": ed.eigenvalues[:top].tolist(),
            "trace": float(ed.eigenvalues.sum()), "count": int(len(ed))}


def report_envelope(command: str, config: dict, payload: dict, started: float) -> dict:
    from . import __version__

    return {
        "tool": "hofa",
        "version": __version__,
        "command": command,
        "config": config,
        "seed": config.get("seed"),
        "group": config.get("group"),
        "wall_clock_s": time.perf_counter() - started,
        "python": platform.python_version(),
        "result": payload,
    }


def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return _jsonable(obj.tolist())
    if isinstance(obj, (np.floating, float)):
        v = float(obj)
        return v if np.isfinite(v) else str(v)
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, np.bool_):
        return bool(obj)
    if isinstance(obj, complex):
        return {"re": obj.real, "im": obj.imag}
    if isinstance(obj, Path):
        return str(obj)
    return obj


def dump_json(obj, path=None) -> str:
    text = json.dumps(_jsonable(obj), indent=2, sort_keys=False, ensure_ascii=False)
    if path is not None:
        Path(path).write_text(text + "\n", encoding="utf-8")
    return text
