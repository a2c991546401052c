"""Discrete, continuous and mixed bivariate distribution models.

Everything here is immutable; evaluators are plain vectorised callables
(``F(x, y)`` with numpy broadcasting) and must be pure.
"""

from __future__ import annotations

import math
from collections import defaultdict
from dataclasses import dataclass, field
from typing import Callable, Iterable, Iterator, Sequence

import numpy as np
from scipy import integrate, special, stats

from ._validation import check_bbox, check_positive
from .exceptions import InvalidDistributionError, InvalidInputError, NumericError

MASS_TOL = 1e-12
TAIL_TOL = 1e-12
EPS_POS = 1e-12

STEP_1D = 1e-5
STEP_2D = 1e-4
KINK_TOL = 1e-3
_ATOL_1D = 1e-8
_ATOL_2D = 1e-6
_MONO_TOL = 1e-12


# -------------------------------------------------------------- discrete PMFs


def _check_mass(probs: Sequence[float], slack: float, what: str) -> None:
    total = math.fsum(probs)
    if abs(total - 1.0) > MASS_TOL + slack:
        raise InvalidDistributionError(f"{what} masses sum to {total!r}, not 1")


@dataclass(frozen=True)
class MarginalPMF:
    """Finite (possibly truncated) PMF on the line.

    Only atoms with positive mass are stored, so ``values`` is exactly the
    positive-mass set.  ``truncation_mass`` is the tail mass dropped when a
    countable PMF was truncated; it widens the normalisation check.
    """

    atoms: tuple[tuple[float, float], ...]
    declared_limit_points: tuple[float, ...] = ()
    truncation_mass: float = 0.0

    def __post_init__(self):
        merged: dict[float, float] = {}
        for x, p in self.atoms:
            x, p = float(x), float(p)
            if not math.isfinite(x):
                raise InvalidInputError(f"atom location must be finite, got {x}")
            if p < 0 or math.isnan(p):
                raise InvalidDistributionError(f"negative mass {p} at {x}")
            if p > 0:
                merged[x] = merged.get(x, 0.0) + p
        _check_mass(list(merged.values()), self.truncation_mass, "PMF")
        object.__setattr__(self, "atoms", tuple(sorted(merged.items())))
        object.__setattr__(self, "declared_limit_points", tuple(sorted(float(v) for v in self.declared_limit_points)))

    @property
    def values(self) -> np.ndarray:
        return np.array([x for x, _ in self.atoms])

    @property
    def probs(self) -> np.ndarray:
        return np.array([p for _, p in self.atoms])

    def pmf(self, x) -> np.ndarray:
        lookup = dict(self.atoms)
        x = np.asarray(x, dtype=float)
        return np.vectorize(lambda v: lookup.get(float(v), 0.0), otypes=[float])(x)

    def cdf(self, x) -> np.ndarray:
        vals, probs = self.values, np.cumsum(self.probs)
        idx = np.searchsorted(vals, np.asarray(x, dtype=float), side="right")
        return np.where(idx > 0, probs[np.maximum(idx - 1, 0)], 0.0)


def truncated_pmf(terms: Iterable[tuple[float, float]], tail_tol: float = TAIL_TOL, declared_limit_points=(), max_terms: int = 10**6) -> MarginalPMF:
    """Build a PMF from a generator of ``(x, p)`` terms, stopping once the
    remaining mass drops below ``tail_tol``; the dropped mass is recorded."""
    atoms = []
    total = 0.0
    for n, (x, p) in enumerate(terms):
        if n >= max_terms:
            raise NumericError(f"PMF generator did not reach tail mass {tail_tol} within {max_terms} terms")
        atoms.append((x, p))
        total += p
        if 1.0 - total < tail_tol:
            break
    return MarginalPMF(tuple(atoms), tuple(declared_limit_points), truncation_mass=max(0.0, 1.0 - math.fsum(p for _, p in atoms)))


def _count_terms(logpmf: Callable[[int], float]) -> Iterator[tuple[float, float]]:
    k = 0
    while True:
        yield float(k), math.exp(logpmf(k))
        k += 1


def poisson_pmf(eta: float) -> MarginalPMF:
    eta = check_positive(eta, "eta")
    return truncated_pmf(_count_terms(lambda k: stats.poisson.logpmf(k, eta)))


def geometric_pmf(p: float) -> MarginalPMF:
    """Number of failures before the first success."""
    if not 0 < p <= 1:
        raise InvalidInputError(f"geometric p must lie in (0, 1], got {p}")
    return truncated_pmf(_count_terms(lambda k: k * math.log1p(-p) + math.log(p) if p < 1 else (0.0 if k == 0 else -math.inf)))


def binomial_pmf(n: int, p: float) -> MarginalPMF:
    if n < 0 or not 0 <= p <= 1:
        raise InvalidInputError(f"invalid binomial parameters n={n}, p={p}")
    return MarginalPMF(tuple((float(k), float(stats.binom.pmf(k, n, p))) for k in range(n + 1)))


def dyadic_pmf(n_terms: int | None = None, declare_limit: bool = True) -> MarginalPMF:
    """``p(x) = x`` on ``{1/2, 1/4, 1/8, ...}``; its positive-mass set is not closed.

    With ``declare_limit`` the accumulation point 0 is declared, which is the
    only way a finite truncation can carry it.
    """
    limit = (0.0,) if declare_limit else ()
    if n_terms is None:
        return truncated_pmf(((0.5**k, 0.5**k) for k in range(1, 2000)), declared_limit_points=limit)
    atoms = tuple((0.5**k, 0.5**k) for k in range(1, n_terms + 1))
    return MarginalPMF(atoms, limit, truncation_mass=0.5**n_terms)


@dataclass(frozen=True)
class DiscreteJoint:
    """Finite joint PMF with atoms in the plane."""

    atoms: tuple[tuple[tuple[float, float], float], ...]
    declared_limit_points: tuple[tuple[float, float], ...] = ()
    truncation_mass: float = 0.0

    def __post_init__(self):
        seen = set()
        kept = []
        for (x, y), p in self.atoms:
            x, y, p = float(x), float(y), float(p)
            if not (math.isfinite(x) and math.isfinite(y)):
                raise InvalidInputError(f"atom location must be finite, got ({x}, {y})")
            if (x, y) in seen:
                raise InvalidInputError(f"duplicate atom ({x:g}, {y:g})")
            seen.add((x, y))
            if p < 0 or math.isnan(p):
                raise InvalidDistributionError(f"negative mass {p} at ({x:g}, {y:g})")
            if p > 0:
                kept.append(((x, y), p))
        _check_mass([p for _, p in kept], self.truncation_mass, "joint PMF")
        object.__setattr__(self, "atoms", tuple(sorted(kept)))
        object.__setattr__(self, "declared_limit_points", tuple(sorted((float(a), float(b)) for a, b in self.declared_limit_points)))

    @classmethod
    def from_arrays(cls, x, y, p, **kw) -> "DiscreteJoint":
        return cls(tuple(((a, b), c) for a, b, c in zip(np.ravel(x), np.ravel(y), np.ravel(p))), **kw)

    @classmethod
    def outer(cls, px: MarginalPMF, py: MarginalPMF) -> "DiscreteJoint":
        """The independent coupling of two marginals."""
        return cls(tuple(((x, y), a * b) for x, a in px.atoms for y, b in py.atoms))

    @property
    def points(self) -> tuple[tuple[float, float], ...]:
        return tuple(xy for xy, _ in self.atoms)

    @property
    def xs(self) -> np.ndarray:
        return np.array([xy[0] for xy, _ in self.atoms])

    @property
    def ys(self) -> np.ndarray:
        return np.array([xy[1] for xy, _ in self.atoms])

    @property
    def probs(self) -> np.ndarray:
        return np.array([p for _, p in self.atoms])

    def pmf(self, x: float, y: float) -> float:
        return dict(self.atoms).get((float(x), float(y)), 0.0)

    def cdf(self, x, y) -> np.ndarray:
        x = np.asarray(x, dtype=float)[..., None]
        y = np.asarray(y, dtype=float)[..., None]
        return np.sum(np.where((self.xs <= x) & (self.ys <= y), self.probs, 0.0), axis=-1)


def marginals(j: DiscreteJoint) -> tuple[MarginalPMF, MarginalPMF]:
    """Row and column sums of a joint PMF."""
    px: dict[float, list[float]] = defaultdict(list)
    py: dict[float, list[float]] = defaultdict(list)
    for (x, y), p in j.atoms:
        px[x].append(p)
        py[y].append(p)
    lim_x = tuple(sorted({a for a, _ in j.declared_limit_points}))
    lim_y = tuple(sorted({b for _, b in j.declared_limit_points}))
    mx = MarginalPMF(tuple((x, math.fsum(v)) for x, v in px.items()), lim_x, j.truncation_mass)
    my = MarginalPMF(tuple((y, math.fsum(v)) for y, v in py.items()), lim_y, j.truncation_mass)
    return mx, my


# ---------------------------------------------------------- canonical densities


def _as_callable_cdf(F):
    return F.cdf if hasattr(F, "cdf") and not callable(F) else F


def canonical_pdf_1d(F: Callable, x, step: float = STEP_1D, kink_tol: float = KINK_TOL):
    """Derivative of a CDF where it is (numerically) differentiable, else 0.

    Differentiability is judged by comparing the left and right one-sided
    difference quotients: when they differ by more than ``kink_tol``
    (relative) the point is treated as a kink and 0 is returned.
    """
    step = check_positive(step, "step")
    F = _as_callable_cdf(F)
    x = np.asarray(x, dtype=float)
    f_m, f_0, f_p = (np.asarray(F(x + d), dtype=float) for d in (-step, 0.0, step))
    if np.any(f_m > f_0 + _MONO_TOL) or np.any(f_0 > f_p + _MONO_TOL):
        bad = x[(f_m > f_0 + _MONO_TOL) | (f_0 > f_p + _MONO_TOL)] if x.ndim else x
        raise InvalidDistributionError(f"CDF decreases near x = {np.ravel(bad)[:3]}")
    left = (f_0 - f_m) / step
    right = (f_p - f_0) / step
    agree = np.abs(left - right) <= kink_tol * np.maximum(np.abs(left), np.abs(right)) + _ATOL_1D
    central = (f_p - f_m) / (2.0 * step)
    out = np.where(agree, np.maximum(central, 0.0), 0.0)
    return float(out) if out.ndim == 0 else out


def canonical_pdf_2d(F: Callable, x, y, step: float = STEP_2D, kink_tol: float = KINK_TOL):
    """Mixed second difference of a joint CDF, or 0 where the four one-sided
    quadrant quotients disagree (the grid proxy for non-differentiability)."""
    step = check_positive(step, "step")
    x, y = np.broadcast_arrays(np.asarray(x, dtype=float), np.asarray(y, dtype=float))
    s = step
    G = {(a, b): np.asarray(F(x + a * s, y + b * s), dtype=float) for a in (-1, 0, 1) for b in (-1, 0, 1)}
    # coordinatewise monotonicity on the stencil
    for b in (-1, 0, 1):
        if np.any(G[(-1, b)] > G[(0, b)] + _MONO_TOL) or np.any(G[(0, b)] > G[(1, b)] + _MONO_TOL):
            raise InvalidDistributionError("joint CDF decreases in x near the probe point")
    for a in (-1, 0, 1):
        if np.any(G[(a, -1)] > G[(a, 0)] + _MONO_TOL) or np.any(G[(a, 0)] > G[(a, 1)] + _MONO_TOL):
            raise InvalidDistributionError("joint CDF decreases in y near the probe point")
    h2 = s * s
    quads = np.stack(
        [
            (G[(1, 1)] - G[(1, 0)] - G[(0, 1)] + G[(0, 0)]) / h2,
            (G[(1, 0)] - G[(1, -1)] - G[(0, 0)] + G[(0, -1)]) / h2,
            (G[(0, 1)] - G[(0, 0)] - G[(-1, 1)] + G[(-1, 0)]) / h2,
            (G[(0, 0)] - G[(0, -1)] - G[(-1, 0)] + G[(-1, -1)]) / h2,
        ]
    )
    if np.any(quads < -_ATOL_2D):
        raise InvalidDistributionError("joint CDF assigns negative mass to a rectangle near the probe point")
    spread = quads.max(axis=0) - quads.min(axis=0)
    agree = spread <= kink_tol * np.abs(quads).max(axis=0) + _ATOL_2D
    central = quads.mean(axis=0)
    out = np.where(agree, np.maximum(central, 0.0), 0.0)
    return float(out) if out.ndim == 0 else out


# -------------------------------------------------------- univariate builtins


@dataclass(frozen=True, eq=False)
class Univariate:
    """A named distribution on the line.

    ``positivity`` is a declared indicator of where the canonical density is
    positive; when present it takes precedence over thresholding the
    evaluated density.  ``sf`` (survival function) lets tail probabilities
    be computed without cancellation.
    """

    name: str
    cdf: Callable
    pdf: Callable | None = None
    positivity: Callable | None = None
    sf: Callable | None = None
    domain: tuple[float, float] = (-50.0, 50.0)
    unbounded: tuple[bool, bool] = (False, False)

    def interval_mass(self, a, b) -> np.ndarray:
        """``P(a < X <= b)``, using the survival function on the right half."""
        a = np.asarray(a, dtype=float)
        b = np.asarray(b, dtype=float)
        lower = np.asarray(self.cdf(b), dtype=float) - np.asarray(self.cdf(a), dtype=float)
        if self.sf is None:
            return lower
        upper = np.asarray(self.sf(a), dtype=float) - np.asarray(self.sf(b), dtype=float)
        return np.where(a >= 0, upper, lower)

    def canonical_pdf(self, x, step: float = STEP_1D, kink_tol: float = KINK_TOL):
        return canonical_pdf_1d(self.cdf, x, step, kink_tol)


def normal(mu: float = 0.0, sigma: float = 1.0, clip: float = 50.0) -> Univariate:
    sigma = check_positive(sigma, "sigma")
    d = stats.norm(mu, sigma)
    return Univariate(
        f"normal({mu:g},{sigma:g})", d.cdf, d.pdf, positivity=lambda x: np.ones(np.shape(x), dtype=bool), sf=d.sf,
        domain=(mu - clip * sigma, mu + clip * sigma), unbounded=(True, True),
    )


def _uniform_cdf(x):
    return np.clip(np.asarray(x, dtype=float), 0.0, 1.0)


def uniform() -> Univariate:
    return Univariate(
        "uniform", _uniform_cdf, lambda x: ((np.asarray(x) > 0) & (np.asarray(x) < 1)).astype(float),
        positivity=lambda x: (np.asarray(x) > 0) & (np.asarray(x) < 1), domain=(0.0, 1.0),
    )


def exponential(eta: float = 1.0, clip: float = 50.0) -> Univariate:
    eta = check_positive(eta, "eta")

    def cdf(x):
        x = np.asarray(x, dtype=float)
        return np.where(x > 0, -np.expm1(-eta * np.maximum(x, 0.0)), 0.0)

    def sf(x):
        x = np.asarray(x, dtype=float)
        return np.where(x > 0, np.exp(-eta * np.maximum(x, 0.0)), 1.0)

    def pdf(x):
        x = np.asarray(x, dtype=float)
        return np.where(x > 0, eta * np.exp(-eta * np.maximum(x, 0.0)), 0.0)

    return Univariate(f"exponential({eta:g})", cdf, pdf, positivity=lambda x: np.asarray(x) > 0, sf=sf, domain=(0.0, clip), unbounded=(False, True))


def point_mass(at: float = 0.0) -> Univariate:
    return Univariate(f"point-mass({at:g})", lambda x: (np.asarray(x, dtype=float) >= at).astype(float), domain=(at - 1.0, at + 1.0))


# --------------------------------------------------------------------- Cantor


@dataclass(frozen=True, eq=False)
class CantorCDF:
    """Piecewise-linear approximation of the Cantor function after ``levels``
    middle-thirds removals.

    The approximation is flat on every removed open third (``2**levels - 1``
    plateaus) and rises linearly by ``2**-levels`` across each of the
    ``2**levels`` kept intervals.
    """

    levels: int

    def __post_init__(self):
        if not isinstance(self.levels, (int, np.integer)) or not 1 <= self.levels <= 30:
            raise InvalidInputError(f"levels must be an integer in [1, 30], got {self.levels!r}")

    @property
    def n_plateaus(self) -> int:
        return 2**self.levels - 1

    def _digits(self, x):
        x = np.clip(np.asarray(x, dtype=float), 0.0, 1.0)
        value = np.zeros_like(x)
        frac = x.copy()
        flat = np.zeros(x.shape, dtype=bool)
        for k in range(1, self.levels + 1):
            frac = frac * 3.0
            d = np.minimum(np.floor(frac), 2.0)
            frac = frac - d
            live = ~flat
            value = np.where(live & (d >= 1.0), value + 0.5**k, value)
            flat = flat | (live & (d == 1.0))
        return x, value, frac, flat

    def __call__(self, x):
        x_in = np.asarray(x, dtype=float)
        x, value, frac, flat = self._digits(x_in)
        out = np.where(flat, value, value + frac * 0.5**self.levels)
        out = np.where(x_in >= 1.0, 1.0, np.where(x_in <= 0.0, 0.0, out))
        return float(out) if out.ndim == 0 else out

    def cdf(self, x):
        return self(x)

    def pdf(self, x):
        """Density of the approximation: ``1.5**levels`` on kept intervals."""
        x_in = np.asarray(x, dtype=float)
        _, _, _, flat = self._digits(x_in)
        out = np.where(~flat & (x_in > 0.0) & (x_in < 1.0), 1.5**self.levels, 0.0)
        return float(out) if out.ndim == 0 else out

    def kept_intervals(self) -> list[tuple[float, float]]:
        if self.levels > 20:
            raise InvalidInputError("explicit interval lists are limited to levels <= 20")
        ivs = [(0.0, 1.0)]
        for _ in range(self.levels):
            nxt = []
            for a, b in ivs:
                third = (b - a) / 3.0
                nxt += [(a, a + third), (b - third, b)]
            ivs = nxt
        return ivs

    def plateaus(self) -> list[tuple[float, float]]:
        """The removed open thirds, sorted; there are ``2**levels - 1`` of them."""
        kept = self.kept_intervals()
        return [(kept[i][1], kept[i + 1][0]) for i in range(len(kept) - 1)]

    def polyline(self) -> tuple[np.ndarray, np.ndarray]:
        """Vertices of the approximation on ``[0, 1]``."""
        kept = self.kept_intervals()
        xs = np.array([v for iv in kept for v in iv])
        return xs, np.asarray(self(xs))


def cantor_cdf(levels: int = 10) -> CantorCDF:
    return CantorCDF(int(levels))


def cantor(levels: int = 10) -> Univariate:
    c = cantor_cdf(levels)
    return Univariate(f"cantor({levels})", c, c.pdf, domain=(0.0, 1.0))


# ------------------------------------------------------------ Lebesgue mixture


@dataclass(frozen=True, eq=False)
class LebesgueMixture:
    """Weights and parts of a discrete / absolutely continuous / singular mixture."""

    pi: tuple[float, float, float]
    parts: tuple[Callable | None, Callable | None, Callable | None] = (None, None, None)

    def __post_init__(self):
        pi = tuple(float(v) for v in self.pi)
        if len(pi) != 3 or any(not 0.0 <= v <= 1.0 for v in pi) or abs(math.fsum(pi) - 1.0) > 1e-12:
            raise InvalidDistributionError(f"mixture weights must lie in [0, 1] and sum to 1, got {self.pi}")
        object.__setattr__(self, "pi", pi)


def mixture_cdf(m: LebesgueMixture, x):
    """``pi_1 F_D + pi_2 F_C + pi_3 F_S``."""
    total = 0.0
    for w, part, label in zip(m.pi, m.parts, ("discrete", "continuous", "singular")):
        if w == 0.0:
            continue
        if part is None:
            raise InvalidInputError(f"{label} part missing but its weight is {w}")
        total = total + w * np.asarray(_as_callable_cdf(part)(x), dtype=float)
    out = np.asarray(total, dtype=float)
    return float(out) if out.ndim == 0 else out


# --------------------------------------------------------- continuous joints


def _everywhere(x, y):
    return np.ones(np.broadcast(np.asarray(x), np.asarray(y)).shape, dtype=bool)


@dataclass(frozen=True, eq=False)
class ContinuousJoint:
    """An absolutely continuous bivariate distribution.

    In ``"cdf"`` mode densities are derived from the joint CDF by canonical
    differentiation.  In ``"pdf"`` mode the density is evaluated directly and
    the declared ``positivity`` indicator pins down which version of the
    density is meant.
    """

    mode: str
    bbox: tuple[float, float, float, float]
    cdf: Callable | None = None
    pdf: Callable | None = None
    positivity: Callable | None = None
    marginal_pdfs: tuple[Callable, Callable] | None = None
    marginal_cdfs: tuple[Callable, Callable] | None = None
    marginal_positivity: tuple[Callable, Callable] | None = None
    unbounded: tuple[tuple[bool, bool], tuple[bool, bool]] = ((False, False), (False, False))
    smoothness_hint: tuple[str, ...] = ()
    sampler: Callable | None = field(default=None, repr=False)
    name: str = "continuous"

    def __post_init__(self):
        object.__setattr__(self, "bbox", check_bbox(self.bbox))
        if self.mode not in ("cdf", "pdf"):
            raise InvalidInputError(f"mode must be 'cdf' or 'pdf', got {self.mode!r}")
        if self.mode == "cdf":
            if self.cdf is None:
                raise InvalidInputError("cdf-backed joint needs a cdf evaluator")
            self._check_cdf()
        if self.mode == "pdf" and self.pdf is None:
            raise InvalidInputError("pdf-backed joint needs a pdf evaluator")

    def _check_cdf(self, n: int = 33) -> None:
        x_lo, x_hi, y_lo, y_hi = self.bbox
        top = float(self.cdf(x_hi, y_hi))
        if abs(top - 1.0) > 1e-6:
            raise InvalidDistributionError(f"F at the bbox corner is {top}, not 1")
        xx, yy = np.meshgrid(np.linspace(x_lo, x_hi, n), np.linspace(y_lo, y_hi, n), indexing="ij")
        F = np.asarray(self.cdf(xx, yy), dtype=float)
        if np.any(np.diff(F, axis=0) < -_MONO_TOL) or np.any(np.diff(F, axis=1) < -_MONO_TOL):
            raise InvalidDistributionError("joint CDF is not monotone on the probe grid")

    def positive(self, x, y) -> np.ndarray:
        """Where the canonical density is positive (declared indicator if any)."""
        if self.positivity is not None:
            return np.asarray(self.positivity(x, y), dtype=bool)
        return np.asarray(self.density(x, y)) > EPS_POS

    def density(self, x, y):
        """Canonical joint density."""
        if self.mode == "cdf":
            return canonical_pdf_2d(self.cdf, x, y)
        val = np.asarray(self.pdf(x, y), dtype=float)
        if self.positivity is not None:
            val = np.where(np.asarray(self.positivity(x, y), dtype=bool), val, 0.0)
        return val

    def marginal_density(self, axis: str, values, n_intervals: int = 2048):
        """Canonical marginal density of ``X`` (``axis='x'``) or ``Y``.

        User-supplied marginals win.  Otherwise cdf-backed joints differentiate
        ``F(x, y_max)``; pdf-backed joints integrate the joint density over the
        other axis of the bbox with composite Simpson.
        """
        k = _axis_index(axis)
        values = np.asarray(values, dtype=float)
        if self.marginal_pdfs is not None:
            return np.asarray(self.marginal_pdfs[k](values), dtype=float)
        x_lo, x_hi, y_lo, y_hi = self.bbox
        if self.mode == "cdf":
            if k == 0:
                return canonical_pdf_1d(lambda t: self.cdf(t, y_hi), values)
            return canonical_pdf_1d(lambda t: self.cdf(x_hi, t), values)
        lo, hi = (y_lo, y_hi) if k == 0 else (x_lo, x_hi)
        nodes = np.linspace(lo, hi, n_intervals + 1)
        flat = np.atleast_1d(values).ravel()
        if k == 0:
            vals = self.density(flat[:, None], nodes[None, :])
        else:
            vals = self.density(nodes[None, :], flat[:, None])
        out = integrate.simpson(np.asarray(vals, dtype=float), x=nodes, axis=1)
        if not np.all(np.isfinite(out)):
            raise NumericError(f"marginal quadrature along {axis} produced non-finite values")
        out = out.reshape(np.shape(values))
        return float(out) if out.ndim == 0 else out

    def marginal_cdf(self, axis: str, values):
        k = _axis_index(axis)
        if self.marginal_cdfs is not None:
            return self.marginal_cdfs[k](values)
        if self.cdf is None:
            raise InvalidInputError(f"{self.name}: no CDF available for marginalisation")
        x_lo, x_hi, y_lo, y_hi = self.bbox
        return self.cdf(values, y_hi) if k == 0 else self.cdf(x_hi, values)


def _axis_index(axis: str) -> int:
    if axis not in ("x", "y"):
        raise InvalidInputError(f"axis must be 'x' or 'y', got {axis!r}")
    return 0 if axis == "x" else 1


def product_joint(fx: Univariate, fy: Univariate, name: str | None = None) -> ContinuousJoint:
    """cdf-backed joint of two independent univariates."""
    bbox = (*fx.domain, *fy.domain)
    positivity = None
    if fx.positivity is not None and fy.positivity is not None:
        def positivity(x, y):
            return np.asarray(fx.positivity(x), dtype=bool) & np.asarray(fy.positivity(y), dtype=bool)
    return ContinuousJoint(
        "cdf", bbox,
        cdf=lambda x, y: np.asarray(fx.cdf(x)) * np.asarray(fy.cdf(y)),
        positivity=positivity,
        marginal_pdfs=(fx.pdf, fy.pdf) if fx.pdf is not None and fy.pdf is not None else None,
        marginal_cdfs=(fx.cdf, fy.cdf),
        marginal_positivity=(fx.positivity, fy.positivity) if fx.positivity is not None and fy.positivity is not None else None,
        unbounded=(fx.unbounded, fy.unbounded),
        name=name or f"{fx.name} x {fy.name}",
    )


def numeric_jacobian_det(inverse: Callable, y1, y2, step: float = 1e-6) -> np.ndarray:
    """``|det d(inverse)/d(y)|`` by central differences."""
    y1 = np.asarray(y1, dtype=float)
    y2 = np.asarray(y2, dtype=float)
    s1 = step * np.maximum(1.0, np.abs(y1))
    s2 = step * np.maximum(1.0, np.abs(y2))
    a_p, b_p = inverse(y1 + s1, y2)
    a_m, b_m = inverse(y1 - s1, y2)
    c_p, d_p = inverse(y1, y2 + s2)
    c_m, d_m = inverse(y1, y2 - s2)
    j11 = (np.asarray(a_p) - a_m) / (2 * s1)
    j21 = (np.asarray(b_p) - b_m) / (2 * s1)
    j12 = (np.asarray(c_p) - c_m) / (2 * s2)
    j22 = (np.asarray(d_p) - d_m) / (2 * s2)
    return np.abs(j11 * j22 - j12 * j21)


def pushforward_joint(source: ContinuousJoint, forward: Callable, inverse: Callable, bbox, name: str = "pushforward", unbounded=((False, False), (False, False))) -> ContinuousJoint:
    """Distribution of ``forward(X)`` for a pdf-backed ``X`` and invertible ``forward``.

    The positivity indicator is the source indicator pulled back through
    ``inverse``; the density uses a finite-difference Jacobian.
    """
    if source.mode != "pdf":
        raise InvalidInputError("pushforward requires a pdf-backed source")

    def _pull(y1, y2):
        with np.errstate(invalid="ignore", divide="ignore"):
            x1, x2 = inverse(np.asarray(y1, dtype=float), np.asarray(y2, dtype=float))
        return np.asarray(x1, dtype=float), np.asarray(x2, dtype=float)

    def positivity(y1, y2):
        x1, x2 = _pull(y1, y2)
        ok = np.isfinite(x1) & np.isfinite(x2)
        return ok & source.positive(np.where(ok, x1, 0.0), np.where(ok, x2, 0.0))

    def pdf(y1, y2):
        x1, x2 = _pull(y1, y2)
        ok = np.isfinite(x1) & np.isfinite(x2)
        with np.errstate(invalid="ignore", divide="ignore"):
            det = numeric_jacobian_det(lambda a, b: _pull(a, b), y1, y2)
            val = source.density(np.where(ok, x1, 0.0), np.where(ok, x2, 0.0)) * det
        return np.where(ok & np.isfinite(val), val, 0.0)

    sampler = None
    if source.sampler is not None:
        def sampler(rng, n):
            x = source.sampler(rng, n)
            y1, y2 = forward(x[:, 0], x[:, 1])
            return np.column_stack((y1, y2))

    return ContinuousJoint("pdf", bbox, pdf=pdf, positivity=positivity, unbounded=unbounded, sampler=sampler, name=name)


# ----------------------------------------------------------------- mixed joints


@dataclass(frozen=True, eq=False)
class MixedJoint:
    """One discrete coordinate, one continuous coordinate.

    ``conditional_density(c, level)`` is the density of the continuous
    coordinate given the discrete one equals ``level``; ``weights`` are the
    level probabilities.
    """

    discrete_axis: str
    levels: tuple[float, ...]
    weights: tuple[float, ...]
    conditional_density: Callable
    continuous_range: tuple[float, float]
    positivity: Callable | None = None
    name: str = "mixed"

    def __post_init__(self):
        _axis_index(self.discrete_axis)
        if len(self.levels) != len(self.weights) or not self.levels:
            raise InvalidInputError("levels and weights must be non-empty and of equal length")
        if any(w < 0 for w in self.weights):
            raise InvalidDistributionError("negative level weight")
        total = math.fsum(self.weights)
        if abs(total - 1.0) > 1e-9:
            raise InvalidDistributionError(f"level weights sum to {total}, not 1")
        lo, hi = self.continuous_range
        if not lo < hi:
            raise InvalidInputError(f"continuous_range must have lo < hi, got {self.continuous_range}")

    @property
    def continuous_axis(self) -> str:
        return "x" if self.discrete_axis == "y" else "y"

    def level_weight(self, level: float) -> float:
        for lv, w in zip(self.levels, self.weights):
            if lv == level:
                return w
        return 0.0

    def positive(self, c, level) -> np.ndarray:
        if self.positivity is not None:
            return np.asarray(self.positivity(c, level), dtype=bool)
        return np.asarray(self.conditional_density(c, level)) > EPS_POS

    def joint_density(self, c, level):
        """Density in the continuous coordinate times the level probability."""
        return self.level_weight(level) * np.asarray(self.conditional_density(c, level), dtype=float)

    def _cond_mass(self, level: float, upper: float) -> float:
        lo, hi = self.continuous_range
        upper = min(max(upper, lo), hi)
        if upper <= lo:
            return 0.0
        val, err = integrate.quad(lambda t: float(self.conditional_density(t, level)), lo, upper, limit=200)
        if not math.isfinite(val):
            raise NumericError(f"{self.name}: quadrature failed for level {level}")
        return val

    def cdf(self, x: float, y: float) -> float:
        c, d = (x, y) if self.discrete_axis == "y" else (y, x)
        return math.fsum(w * self._cond_mass(lv, c) for lv, w in zip(self.levels, self.weights) if lv <= d)

    def marginal_cdf(self, axis: str, v: float) -> float:
        if axis == self.discrete_axis:
            return math.fsum(w for lv, w in zip(self.levels, self.weights) if lv <= v)
        return math.fsum(w * self._cond_mass(lv, v) for lv, w in zip(self.levels, self.weights))


def beta_bernoulli_joint(alpha: float, beta: float) -> MixedJoint:
    """``X ~ Beta(alpha, beta)`` and ``Y | X ~ Bernoulli(X)``.

    The joint is ``c x**(alpha + y - 1) (1 - x)**(beta - y)`` with
    ``c = 1 / B(alpha, beta)``; the level weights ``P(Y = y)`` come from
    integrating each slice numerically, not from the closed form.
    """
    alpha = check_positive(alpha, "alpha")
    beta = check_positive(beta, "beta")
    c = 1.0 / special.beta(alpha, beta)
    weights = []
    for y in (0, 1):
        # algebraic-weight quadrature integrates x**a (1-x)**b including endpoint singularities
        val, _ = integrate.quad(lambda t: c, 0.0, 1.0, weight="alg", wvar=(alpha + y - 1.0, beta - y))
        weights.append(val)

    def conditional(x, level):
        x = np.asarray(x, dtype=float)
        y = float(level)
        inside = (x >= 0.0) & (x <= 1.0)
        xs = np.clip(x, 0.0, 1.0)
        with np.errstate(divide="ignore", invalid="ignore"):
            val = c * xs ** (alpha + y - 1.0) * (1.0 - xs) ** (beta - y) / weights[int(y)]
        return np.where(inside, val, 0.0)

    return MixedJoint(
        "y", (0.0, 1.0), tuple(weights), conditional, (0.0, 1.0),
        positivity=lambda x, level: (np.asarray(x) >= 0.0) & (np.asarray(x) <= 1.0),
        name=f"beta-bernoulli({alpha:g},{beta:g})",
    )
