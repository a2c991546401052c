"""Named built-in distributions.

Names may carry arguments in parentheses, e.g. ``exponential(2)``,
``example7(identity,square)`` or ``beta-bernoulli(2,1)``.
"""

from __future__ import annotations

import math
import re
from typing import Callable

import numpy as np

from .distributions import (
    ContinuousJoint,
    MarginalPMF,
    beta_bernoulli_joint,
    binomial_pmf,
    cantor,
    dyadic_pmf,
    exponential,
    geometric_pmf,
    normal,
    poisson_pmf,
    product_joint,
    pushforward_joint,
    uniform,
)
from .exceptions import InvalidInputError

EXAMPLE9_CLIP = 8.0


def _in_disk(x, y):
    return np.asarray(x) ** 2 + np.asarray(y) ** 2 <= 1.0


def _disk_sampler(rng, n):
    r = np.sqrt(rng.random(n))
    theta = 2.0 * np.pi * rng.random(n)
    return np.column_stack((r * np.cos(theta), r * np.sin(theta)))


def darts_uniform() -> ContinuousJoint:
    """Uniform on the closed unit disk."""
    return ContinuousJoint(
        "pdf", (-1.0, 1.0, -1.0, 1.0),
        pdf=lambda x, y: np.where(_in_disk(x, y), 1.0 / np.pi, 0.0),
        positivity=_in_disk, sampler=_disk_sampler, name="darts-uniform",
    )


def colosseum() -> ContinuousJoint:
    """Density ``(2/pi)(x^2 + y^2)`` on the unit disk: zero at the centre, highest at the rim."""

    def pdf(x, y):
        r2 = np.asarray(x) ** 2 + np.asarray(y) ** 2
        return np.where(r2 <= 1.0, 2.0 / np.pi * r2, 0.0)

    def sampler(rng, n):
        # radial density 4 r^3 on [0, 1]
        r = rng.random(n) ** 0.25
        theta = 2.0 * np.pi * rng.random(n)
        return np.column_stack((r * np.cos(theta), r * np.sin(theta)))

    return ContinuousJoint("pdf", (-1.0, 1.0, -1.0, 1.0), pdf=pdf, positivity=_in_disk, sampler=sampler, name="colosseum")


# name -> (g, antiderivative of g from 0)
EXAMPLE7_FUNCTIONS: dict[str, tuple[Callable, Callable]] = {
    "identity": (lambda t: t, lambda t: t**2 / 2.0),
    "square": (lambda t: t**2, lambda t: t**3 / 3.0),
    "exp": (np.exp, lambda t: np.expm1(t)),
    "constant": (lambda t: np.ones_like(t), lambda t: t),
}


def _in_unit_square(x, y):
    x = np.asarray(x)
    y = np.asarray(y)
    return (x >= 0.0) & (x <= 1.0) & (y >= 0.0) & (y <= 1.0)


def example7(g: str = "identity", h: str = "identity") -> ContinuousJoint:
    """Additive density ``c [g(x) + h(y)]`` on the unit square."""
    try:
        g_f, g_int = EXAMPLE7_FUNCTIONS[g]
        h_f, h_int = EXAMPLE7_FUNCTIONS[h]
    except KeyError as exc:
        raise InvalidInputError(f"unknown example7 function {exc.args[0]!r}; choose from {sorted(EXAMPLE7_FUNCTIONS)}") from None
    c = 1.0 / (float(g_int(1.0)) + float(h_int(1.0)))

    def pdf(x, y):
        x = np.asarray(x, dtype=float)
        y = np.asarray(y, dtype=float)
        return np.where(_in_unit_square(x, y), c * (g_f(x) + h_f(y)), 0.0)

    def cdf(x, y):
        xs = np.clip(np.asarray(x, dtype=float), 0.0, 1.0)
        ys = np.clip(np.asarray(y, dtype=float), 0.0, 1.0)
        return c * (g_int(xs) * ys + xs * h_int(ys))

    return ContinuousJoint("pdf", (0.0, 1.0, 0.0, 1.0), pdf=pdf, cdf=cdf, positivity=_in_unit_square, name=f"example7({g},{h})")


def example9_source() -> ContinuousJoint:
    """Independent ``X1, X2`` with density ``2x`` each on ``(0, 1]``."""

    def positivity(x, y):
        x = np.asarray(x)
        y = np.asarray(y)
        return (x > 0.0) & (x <= 1.0) & (y > 0.0) & (y <= 1.0)

    return ContinuousJoint(
        "pdf", (0.0, 1.0, 0.0, 1.0),
        pdf=lambda x, y: np.where(positivity(x, y), 4.0 * np.asarray(x) * np.asarray(y), 0.0),
        positivity=positivity,
        marginal_pdfs=(lambda t: np.where((np.asarray(t) > 0) & (np.asarray(t) <= 1), 2.0 * np.asarray(t), 0.0),) * 2,
        sampler=lambda rng, n: np.sqrt(rng.random((n, 2))),
        name="example9-source",
    )


def example9_forward(x1, x2):
    return np.asarray(x1) / np.asarray(x2), np.asarray(x1) * np.asarray(x2)


def example9_inverse(y1, y2):
    y1 = np.asarray(y1, dtype=float)
    y2 = np.asarray(y2, dtype=float)
    return np.sqrt(y1 * y2), np.sqrt(y2 / y1)


def example9_region(y1, y2):
    """Closed-form positivity set ``0 < y2 <= min(y1, 1/y1)``."""
    y1 = np.asarray(y1, dtype=float)
    y2 = np.asarray(y2, dtype=float)
    with np.errstate(divide="ignore"):
        cap = np.minimum(y1, np.where(y1 > 0, 1.0 / np.where(y1 > 0, y1, 1.0), 0.0))
    return (y1 > 0) & (y2 > 0) & (y2 <= cap)


def example9(clip: float = EXAMPLE9_CLIP) -> ContinuousJoint:
    """``(Y1, Y2) = (X1 / X2, X1 X2)``; ``Y1`` is unbounded above and clipped at ``clip``."""
    return pushforward_joint(
        example9_source(), example9_forward, example9_inverse, (0.0, float(clip), 0.0, 1.0),
        name="example9", unbounded=((False, True), (False, False)),
    )


JOINT_BUILDERS: dict[str, Callable] = {
    "normal": lambda: product_joint(normal(), normal(), name="normal"),
    "uniform": lambda: product_joint(uniform(), uniform(), name="uniform"),
    "exponential": lambda eta=1.0: product_joint(exponential(eta), exponential(eta), name=f"exponential({eta:g})"),
    "darts-uniform": darts_uniform,
    "colosseum": colosseum,
    "example7": example7,
    "example9": example9,
    "beta-bernoulli": lambda alpha=1.0, beta=1.0: beta_bernoulli_joint(alpha, beta),
}

UNIVARIATE_BUILDERS: dict[str, Callable] = {
    "cantor": lambda levels=10: cantor(int(levels)),
}

PMF_BUILDERS: dict[str, Callable[..., MarginalPMF]] = {
    "table1-margin": lambda: MarginalPMF(((4.0, 1 / 3), (5.0, 1 / 3), (7.0, 1 / 3))),
    "binomial": lambda n=10, p=0.3: binomial_pmf(int(n), p),
    "poisson": lambda eta=3.0: poisson_pmf(eta),
    "geometric": lambda p=0.5: geometric_pmf(p),
    "dyadic": lambda n_terms=40: dyadic_pmf(int(n_terms)),
}

_NAME_RE = re.compile(r"^\s*([A-Za-z][\w-]*)\s*(?:\((.*)\))?\s*$")


def _parse_arg(text: str):
    text = text.strip()
    try:
        value = float(text)
    except ValueError:
        return text
    if not math.isfinite(value):
        raise InvalidInputError(f"builtin argument must be finite, got {text}")
    return value


def parse_name(label: str) -> tuple[str, tuple]:
    m = _NAME_RE.match(label)
    if m is None:
        raise InvalidInputError(f"cannot parse builtin name {label!r}")
    name, args = m.group(1), m.group(2)
    parsed = tuple(_parse_arg(a) for a in args.split(",")) if args and args.strip() else ()
    return name, parsed


def builtin_names() -> list[str]:
    return sorted(JOINT_BUILDERS) + sorted(UNIVARIATE_BUILDERS)


def get_builtin(label: str):
    """Build a named distribution: a joint, a mixed joint or a univariate."""
    name, args = parse_name(label)
    builder = JOINT_BUILDERS.get(name) or UNIVARIATE_BUILDERS.get(name)
    if builder is None:
        raise InvalidInputError(f"unknown builtin {name!r}; available: {', '.join(builtin_names())}")
    try:
        return builder(*args)
    except TypeError as exc:
        raise InvalidInputError(f"bad arguments for builtin {name!r}: {exc}") from None


def get_pmf(label: str) -> MarginalPMF:
    name, args = parse_name(label)
    if name not in PMF_BUILDERS:
        raise InvalidInputError(f"unknown PMF {name!r}; available: {', '.join(sorted(PMF_BUILDERS))}")
    return PMF_BUILDERS[name](*args)
