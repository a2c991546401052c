"""Reading joint PMF tables and sample files."""

from __future__ import annotations

import csv
import json
import math
from pathlib import Path

import numpy as np

from .distributions import DiscreteJoint
from .exceptions import InvalidDistributionError, InvalidInputError

INGEST_MASS_TOL = 1e-9


def _parse_float(text: str, where: str) -> float:
    try:
        v = float(text)
    except (TypeError, ValueError):
        raise InvalidInputError(f"{where}: expected a number, got {text!r}") from None
    if not math.isfinite(v):
        raise InvalidInputError(f"{where}: value must be finite, got {text!r}")
    return v


def _read_csv_rows(path: Path) -> list[tuple[float, float, float]]:
    rows = []
    with path.open(newline="") as fh:
        reader = csv.reader(fh)
        header = None
        for line_no, rec in enumerate(reader, start=1):
            if not rec or all(not c.strip() for c in rec) or rec[0].lstrip().startswith("#"):
                continue
            if header is None:
                header = [c.strip().lower() for c in rec]
                missing = [c for c in ("x", "y", "p") if c not in header]
                if missing:
                    raise InvalidInputError(f"{path}:{line_no}:1: header must name columns x, y, p (missing {', '.join(missing)})")
                cols = [header.index(c) for c in ("x", "y", "p")]
                continue
            if len(rec) != len(header):
                raise InvalidInputError(f"{path}:{line_no}:1: expected {len(header)} fields, got {len(rec)}")
            rows.append(tuple(_parse_float(rec[c], f"{path}:{line_no}:{c + 1}") for c in cols))
    if header is None:
        raise InvalidInputError(f"{path}: empty table")
    return rows


def _read_json_rows(path: Path) -> tuple[list[tuple[float, float, float]], list]:
    try:
        data = json.loads(path.read_text())
    except json.JSONDecodeError as exc:
        raise InvalidInputError(f"{path}:{exc.lineno}:{exc.colno}: {exc.msg}") from None
    limits = []
    if isinstance(data, dict):
        limits = data.get("declared_limit_points", [])
        data = data.get("atoms")
    if not isinstance(data, list):
        raise InvalidInputError(f"{path}: expected a list of atoms or an object with an 'atoms' list")
    rows = []
    for k, item in enumerate(data):
        where = f"{path}: atom {k}"
        if isinstance(item, dict):
            try:
                vals = (item["x"], item["y"], item["p"])
            except KeyError as exc:
                raise InvalidInputError(f"{where}: missing key {exc.args[0]!r}") from None
        elif isinstance(item, (list, tuple)) and len(item) == 3:
            vals = item
        else:
            raise InvalidInputError(f"{where}: expected {{x, y, p}} or [x, y, p]")
        rows.append(tuple(_parse_float(v, where) for v in vals))
    return rows, limits


def read_joint_table(path, renormalize: bool = False) -> tuple[DiscreteJoint, list[str]]:
    """Load a joint PMF from CSV (columns ``x,y,p``) or JSON.

    Masses must sum to 1 within ``1e-9``.  Otherwise the table is rejected
    unless ``renormalize`` is set, in which case it is rescaled and a note
    says so.  Duplicate atoms are input errors; negative masses make the
    table an invalid distribution.
    """
    path = Path(path)
    if not path.exists():
        raise InvalidInputError(f"{path}: no such file")
    if path.suffix.lower() == ".json":
        rows, limits = _read_json_rows(path)
    else:
        rows, limits = _read_csv_rows(path), []
    if not rows:
        raise InvalidInputError(f"{path}: table has no atoms")
    seen = set()
    for x, y, p in rows:
        if (x, y) in seen:
            raise InvalidInputError(f"{path}: duplicate atom ({x:g}, {y:g})")
        seen.add((x, y))
        if p < 0:
            raise InvalidDistributionError(f"{path}: negative mass {p:g} at ({x:g}, {y:g})")
    notes = []
    zero = sum(1 for *_, p in rows if p == 0)
    if zero:
        notes.append(f"dropped {zero} zero-mass rows")
    total = math.fsum(p for *_, p in rows)
    if total <= 0:
        raise InvalidDistributionError(f"{path}: total mass is zero")
    if abs(total - 1.0) > INGEST_MASS_TOL:
        if not renormalize:
            raise InvalidDistributionError(f"{path}: masses sum to {total:.12g}, not 1 (use --renormalize to rescale)")
        notes.append(f"masses summed to {total:.12g}; renormalized to 1")
    joint = DiscreteJoint(
        tuple(((x, y), p / total) for x, y, p in rows),
        declared_limit_points=tuple(tuple(lp) for lp in limits),
    )
    return joint, notes


def write_joint_csv(j: DiscreteJoint, path) -> None:
    lines = ["x,y,p"] + [f"{x:.17g},{y:.17g},{p:.17g}" for (x, y), p in j.atoms]
    Path(path).write_text("\n".join(lines) + "\n")


def read_samples(path) -> np.ndarray:
    """Two-column sample file (CSV, optional header)."""
    path = Path(path)
    if not path.exists():
        raise InvalidInputError(f"{path}: no such file")
    out = []
    with path.open(newline="") as fh:
        for line_no, rec in enumerate(csv.reader(fh), start=1):
            if not rec or rec[0].lstrip().startswith("#"):
                continue
            if len(rec) < 2:
                raise InvalidInputError(f"{path}:{line_no}:1: expected two columns")
            if line_no == 1 and not _looks_numeric(rec[0]):
                continue
            out.append((_parse_float(rec[0], f"{path}:{line_no}:1"), _parse_float(rec[1], f"{path}:{line_no}:2")))
    if not out:
        raise InvalidInputError(f"{path}: no samples")
    return np.asarray(out)


def _looks_numeric(text: str) -> bool:
    try:
        float(text)
    except ValueError:
        return False
    return True
