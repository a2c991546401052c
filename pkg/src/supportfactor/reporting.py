"""Deterministic JSON serialisation and report envelopes."""

from __future__ import annotations

import json
import math
from importlib import resources

import numpy as np

SCHEMA_VERSION = "1.0"


def _plain(obj):
    if isinstance(obj, dict):
        return {str(k): _plain(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_plain(v) for v in obj]
    if isinstance(obj, (np.bool_, bool)):
        return bool(obj)
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (np.floating, float)):
        v = float(obj)
        return v if math.isfinite(v) else None
    if isinstance(obj, np.ndarray):
        return _plain(obj.tolist())
    return obj


def dump_json(obj) -> str:
    """Sorted-key JSON with non-finite floats mapped to ``null``."""
    return json.dumps(_plain(obj), sort_keys=True, indent=2, allow_nan=False) + "\n"


def load_schema() -> dict:
    text = resources.files("supportfactor").joinpath("schema/report.schema.json").read_text()
    return json.loads(text)
