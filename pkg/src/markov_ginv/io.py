"""Reading chain, matrix and vector files; writing output envelopes."""
from __future__ import annotations

import hashlib
import json
import re
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import ChainFileError

_SPLIT = re.compile(r"[,\s]+")


@dataclass(frozen=True)
class ChainFile:
    path: str
    format: str
    matrix: np.ndarray
    labels: tuple[str, ...] | None = None
    text: str = ""

    @property
    def digest(self) -> str:
        return "sha256:" + hashlib.sha256(self.text.encode()).hexdigest()


def detect_format(path: str, text: str) -> str:
    suffix = Path(path).suffix.lower()
    if suffix == ".json" or text.lstrip().startswith("{"):
        return "json"
    if suffix == ".csv":
        return "csv"
    return "plain"


def _parse_rows(text: str) -> list[list[float]]:
    rows = []
    width = None
    for lineno, line in enumerate(text.splitlines(), start=1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        fields = [f for f in _SPLIT.split(line) if f]
        try:
            row = [float(f) for f in fields]
        except ValueError as exc:
            raise ChainFileError(f"line {lineno}: {exc}", line=lineno) from None
        if not all(np.isfinite(row)):
            raise ChainFileError(f"line {lineno}: non-finite number", line=lineno)
        if width is None:
            width = len(row)
        elif len(row) != width:
            raise ChainFileError(f"line {lineno}: expected {width} numbers, found {len(row)}", line=lineno)
        rows.append(row)
    if not rows:
        raise ChainFileError("no numbers found")
    return rows


def _json_matrix(obj, key: str):
    if not isinstance(obj, dict) or key not in obj:
        raise ChainFileError(f"JSON input must be an object with a {key!r} array")
    rows = obj[key]
    if not isinstance(rows, list) or not rows or not all(isinstance(r, list) for r in rows):
        raise ChainFileError(f"{key!r} must be an array of arrays")
    width = len(rows[0])
    for i, r in enumerate(rows):
        if len(r) != width:
            raise ChainFileError(f"{key!r} row {i}: expected {width} numbers, found {len(r)}")
    try:
        return np.array(rows, dtype=float)
    except (TypeError, ValueError) as exc:
        raise ChainFileError(f"{key!r}: {exc}") from None


def read_matrix_file(path: str, key: str = "P", fmt: str | None = None) -> ChainFile:
    """Parse a square matrix from plain text, CSV or JSON.

    Plain and CSV files hold one row per line, numbers separated by
    whitespace or commas; ``#`` starts a comment. JSON files hold an object
    with ``key`` (default ``"P"``) as an array of arrays and optional
    ``"labels"``.
    """
    text = Path(path).read_text()
    fmt = fmt or detect_format(path, text)
    labels = None
    if fmt == "json":
        try:
            obj = json.loads(text)
        except json.JSONDecodeError as exc:
            raise ChainFileError(f"line {exc.lineno}: {exc.msg}", line=exc.lineno) from None
        A = _json_matrix(obj, key)
        if obj.get("labels") is not None:
            labels = tuple(str(s) for s in obj["labels"])
            if len(labels) != A.shape[0]:
                raise ChainFileError(f"{len(labels)} labels for {A.shape[0]} states")
    else:
        A = np.array(_parse_rows(text))
    if A.shape[0] != A.shape[1]:
        raise ChainFileError(f"matrix is {A.shape[0]}x{A.shape[1]}, expected square")
    return ChainFile(path=str(path), format=fmt, matrix=A, labels=labels, text=text)


def read_vector_file(path: str) -> np.ndarray:
    text = Path(path).read_text()
    if text.lstrip().startswith("["):
        try:
            return np.array(json.loads(text), dtype=float).reshape(-1)
        except (json.JSONDecodeError, TypeError, ValueError) as exc:
            raise ChainFileError(f"{path}: {exc}") from None
    rows = _parse_rows(text) if text.strip() else []
    values = [x for row in rows for x in row]
    if not values:
        raise ChainFileError(f"{path}: no numbers found")
    return np.array(values)


def round_sig(x, digits: int | None):
    """Recursively round floats (and arrays) to ``digits`` significant digits."""
    if isinstance(x, np.ndarray):
        x = x.tolist()
    if isinstance(x, dict):
        return {k: round_sig(v, digits) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [round_sig(v, digits) for v in x]
    if isinstance(x, (bool, np.bool_)):
        return bool(x)
    if isinstance(x, (int, np.integer)):
        return int(x)
    if isinstance(x, (float, np.floating)):
        x = float(x)
        return x if digits is None else float(f"{x:.{digits}g}")
    return x
