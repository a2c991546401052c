"""Small input validation helpers used across the package."""

from __future__ import annotations

import math
from numbers import Integral, Real

import numpy as np
from sklearn.utils import check_array

from .exceptions import InvalidInputError

DEFAULT_GRID = 512
MIN_GRID = 16


def check_finite_real(value, name: str) -> float:
    if not isinstance(value, (Real, np.floating, np.integer)) or isinstance(value, bool):
        raise InvalidInputError(f"{name} must be a real number, got {value!r}")
    value = float(value)
    if math.isnan(value):
        raise InvalidInputError(f"{name} is NaN")
    return value


def check_positive(value, name: str) -> float:
    value = check_finite_real(value, name)
    if not value > 0 or math.isinf(value):
        raise InvalidInputError(f"{name} must be positive and finite, got {value}")
    return value


def check_grid_shape(grid, name: str = "grid", minimum: int = 2) -> tuple[int, int]:
    """Normalise ``grid`` (an int or a pair of ints) to ``(n_x, n_y)``."""
    if isinstance(grid, (Integral, np.integer)) and not isinstance(grid, bool):
        grid = (int(grid), int(grid))
    try:
        n_x, n_y = grid
    except (TypeError, ValueError):
        raise InvalidInputError(f"{name} must be an int or a pair of ints, got {grid!r}") from None
    for n in (n_x, n_y):
        if not isinstance(n, (Integral, np.integer)) or isinstance(n, bool) or n < minimum:
            raise InvalidInputError(f"{name} dimensions must be integers >= {minimum}, got {grid!r}")
    return int(n_x), int(n_y)


def check_bbox(bbox, name: str = "bbox") -> tuple[float, float, float, float]:
    try:
        x_lo, x_hi, y_lo, y_hi = (check_finite_real(v, name) for v in bbox)
    except (TypeError, ValueError) as exc:
        if isinstance(exc, InvalidInputError):
            raise
        raise InvalidInputError(f"{name} must be (x_lo, x_hi, y_lo, y_hi), got {bbox!r}") from None
    if math.isinf(x_lo) or math.isinf(x_hi) or math.isinf(y_lo) or math.isinf(y_hi):
        raise InvalidInputError(f"{name} must be finite, got {bbox!r}")
    if not (x_lo < x_hi and y_lo < y_hi):
        raise InvalidInputError(f"{name} must have x_lo < x_hi and y_lo < y_hi, got {bbox!r}")
    return x_lo, x_hi, y_lo, y_hi


def check_samples(X) -> np.ndarray:
    """Validate an ``(n_samples, 2)`` array of finite bivariate observations."""
    try:
        X = check_array(X, dtype=np.float64, ensure_2d=True, ensure_min_samples=1)
    except ValueError as exc:
        raise InvalidInputError(str(exc)) from None
    if X.shape[1] != 2:
        raise InvalidInputError(f"expected bivariate samples with 2 columns, got {X.shape[1]}")
    return X
