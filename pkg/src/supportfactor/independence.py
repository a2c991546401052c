"""Support-factorization screening and factorization oracles.

Independence forces ``S_XY = S_X x S_Y``, so a mismatch proves dependence
while a match proves nothing.  The screening vocabulary is therefore
``DependentBySupport`` / ``Inconclusive``; the oracles below test the full
factorization of the PMF, density or CDF and are reported separately.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from ._validation import check_bbox
from .distributions import ContinuousJoint, DiscreteJoint, MixedJoint, marginals
from .exceptions import InvalidInputError, NumericError
from .sets import ClosedSet1D, Region2D, cartesian_product, closure1d, region_compare
from .support import SlicedRegion, SupportReport, conditional_support, support, support_discrete

DEPENDENT_BY_SUPPORT = "DependentBySupport"
INCONCLUSIVE = "Inconclusive"
INDEPENDENT = "Independent"
DEPENDENT = "Dependent"
CONSISTENT = "ConsistentWithIndependence"

SCREENINGS = (DEPENDENT_BY_SUPPORT, INCONCLUSIVE)
ORACLES = (INDEPENDENT, DEPENDENT, CONSISTENT)

EXACT_TOL = 1e-12
PROBE_TOL = 1e-3


@dataclass(frozen=True)
class Verdict:
    """Screening outcome plus optional oracle outcome and diagnostics.

    ``witnesses`` are dicts ``{x, y, lhs, rhs, kind}``: for ``kind="support"``
    ``lhs``/``rhs`` flag membership in the joint support and in the product
    of the margins; for ``kind="factorization"`` they are the joint value and
    the product of marginal values.
    """

    screening: str
    oracle: str | None = None
    gap: float | None = None
    hausdorff: float | None = None
    witnesses: tuple[dict, ...] = ()
    notes: tuple[str, ...] = ()

    def __post_init__(self):
        if self.screening not in SCREENINGS:
            raise InvalidInputError(f"screening must be one of {SCREENINGS}, got {self.screening!r}")
        if self.oracle is not None and self.oracle not in ORACLES:
            raise InvalidInputError(f"oracle must be one of {ORACLES}, got {self.oracle!r}")
        if self.oracle == INDEPENDENT and self.screening == DEPENDENT_BY_SUPPORT:
            raise NumericError("support screening contradicts an exact independence oracle; tolerances are too tight")

    def with_oracle(self, result: "FactorizationResult") -> "Verdict":
        wit = self.witnesses + tuple(result.witnesses)
        return Verdict(self.screening, result.outcome, self.gap, self.hausdorff, wit, self.notes + tuple(result.notes))

    def with_notes(self, *notes: str) -> "Verdict":
        return Verdict(self.screening, self.oracle, self.gap, self.hausdorff, self.witnesses, self.notes + tuple(notes))

    def to_dict(self) -> dict:
        return {
            "screening": self.screening,
            "oracle": self.oracle,
            "gap": _finite(self.gap),
            "hausdorff": _finite(self.hausdorff),
            "witnesses": [dict(w) for w in self.witnesses],
            "notes": list(self.notes),
        }


def _finite(v):
    if v is None:
        return None
    return float(v) if math.isfinite(v) else None


@dataclass(frozen=True)
class FactorizationResult:
    outcome: str
    max_residual: float
    witnesses: tuple[dict, ...] = ()
    n_checked: int = 0
    tol: float = 0.0
    notes: tuple[str, ...] = field(default=())

    @property
    def worst(self) -> dict | None:
        return self.witnesses[0] if self.witnesses else None

    def to_dict(self) -> dict:
        return {
            "outcome": self.outcome,
            "max_residual": self.max_residual,
            "n_checked": self.n_checked,
            "tol": self.tol,
            "witnesses": [dict(w) for w in self.witnesses],
            "notes": list(self.notes),
        }


# ---------------------------------------------------------------- screening


def _support_witness(w) -> dict:
    return {"x": w.x, "y": w.y, "lhs": float(w.in_first), "rhs": float(w.in_second), "kind": "support"}


def necessary_condition(s_xy, s_x: ClosedSet1D, s_y: ClosedSet1D, tol_area: float | None = None, tol_dist: float | None = None, k: int = 10) -> Verdict:
    """Compare the joint support with the product of the marginal supports.

    Gridded regions are compared on the joint region's grid; atomic regions
    exactly; sliced (mixed) regions slice by slice.
    """
    if isinstance(s_xy, SlicedRegion):
        return _sliced_condition(s_xy, s_x, s_y, tol_area, tol_dist, k)
    if not isinstance(s_xy, Region2D):
        raise InvalidInputError(f"expected a Region2D or SlicedRegion, got {type(s_xy).__name__}")
    product = cartesian_product(s_x, s_y, grid=s_xy.grid)
    if s_xy.is_atomic and not product.is_atomic:
        raise InvalidInputError("atomic joint support with non-atomic marginal supports")
    rep = region_compare(s_xy, product, tol_area, tol_dist, k)
    screening = INCONCLUSIVE if rep.equal_within_tol else DEPENDENT_BY_SUPPORT
    notes = tuple(dict.fromkeys(s_xy.notes + product.notes))
    notes += (f"support comparison: {rep.measure_kind} tol {rep.tol_area:.3g}, distance tol {rep.tol_dist:.3g}",)
    return Verdict(screening, None, rep.sym_diff_measure, rep.hausdorff, tuple(_support_witness(w) for w in rep.witnesses), notes)


def _sliced_condition(region: SlicedRegion, s_x, s_y, tol_area, tol_dist, k) -> Verdict:
    cont, disc = (s_x, s_y) if region.discrete_axis == "y" else (s_y, s_x)
    span = cont.clip_hi - cont.clip_lo
    tol_dist = 2.0 * span / 1024 if tol_dist is None else tol_dist
    tol_area = 2.0 * span / 1024 if tol_area is None else tol_area
    gap, haus = 0.0, 0.0
    witnesses: list[dict] = []

    def emit(c, level, in_joint, in_prod):
        x, y = (c, level) if region.discrete_axis == "y" else (level, c)
        witnesses.append({"x": float(x), "y": float(y), "lhs": float(in_joint), "rhs": float(in_prod), "kind": "support"})

    joint_levels = set(region.levels)
    for lv in disc.atoms:
        if lv not in joint_levels:
            gap += cont.measure
            haus = math.inf
            emit(cont.extent[0] if cont.extent else 0.0, lv, False, True)
    probe = np.linspace(cont.clip_lo, cont.clip_hi, 2049)
    for lv, sl in zip(region.levels, region.slices):
        gap += sl.sym_diff_measure(cont)
        haus = max(haus, sl.hausdorff(cont))
        if not sl.approx_equal(cont, tol_dist):
            a, b = sl.contains(probe), cont.contains(probe)
            for c in probe[a != b][:k]:
                emit(c, lv, bool(sl.contains(c)), bool(cont.contains(c)))
    equal = gap <= tol_area and haus <= tol_dist
    note = f"mixed joint compared slice by slice: length tol {tol_area:.3g}, distance tol {tol_dist:.3g}"
    return Verdict(INCONCLUSIVE if equal else DEPENDENT_BY_SUPPORT, None, gap, haus, tuple(witnesses[:k]), (note,))


def conditional_support_check(j: DiscreteJoint | MixedJoint, tol: float | None = None) -> Verdict:
    """Dependent by support when some conditional support differs from the
    corresponding marginal support.  Offending conditioning values are
    returned as witnesses with ``kind="conditional"``."""
    offending: list[dict] = []
    if isinstance(j, DiscreteJoint):
        mx, my = marginals(j)
        s_x, s_y = support_discrete(mx), support_discrete(my)
        for axis, margin, other in (("x", mx, s_y), ("y", my, s_x)):
            for v in margin.values:
                cond = conditional_support(j, axis, v)
                if set(cond.atoms) != set(other.atoms) or cond.intervals != other.intervals:
                    missing = sorted(set(other.atoms) - set(cond.atoms))
                    offending.append({"axis": axis, "value": float(v), "missing": missing, "kind": "conditional"})
    elif isinstance(j, MixedJoint):
        rep = support(j)
        cont = rep.s_x if j.discrete_axis == "y" else rep.s_y
        lo, hi = j.continuous_range
        tol = 2.0 * (hi - lo) / 1024 if tol is None else tol
        for lv, w in zip(j.levels, j.weights):
            if w <= 0:
                continue
            cond = conditional_support(j, j.discrete_axis, lv)
            if not cond.approx_equal(cont, tol):
                offending.append({"axis": j.discrete_axis, "value": float(lv), "hausdorff": cond.hausdorff(cont), "kind": "conditional"})
    else:
        raise InvalidInputError(f"conditional support check needs a discrete or mixed joint, got {type(j).__name__}")
    screening = DEPENDENT_BY_SUPPORT if offending else INCONCLUSIVE
    return Verdict(screening, None, float(len(offending)), None, tuple(offending), ("conditional supports compared with marginal supports",))


def nary_discrete_check(table: Sequence[tuple[Sequence[float], float]], marginal_sets: Sequence[Sequence[float]] | None = None, k: int = 10) -> Verdict:
    """Compare the atom set of an n-ary finite table with the product of its
    coordinate supports.  ``table`` rows are ``(point, mass)``."""
    rows = [(tuple(float(v) for v in pt), float(p)) for pt, p in table]
    if not rows:
        raise InvalidInputError("empty table")
    n = len(rows[0][0])
    if n < 2 or any(len(pt) != n for pt, _ in rows):
        raise InvalidInputError("table points must share a dimension of at least 2")
    if any(p < 0 for _, p in rows):
        raise InvalidInputError("negative mass in table")
    atoms = {pt for pt, p in rows if p > 0}
    if marginal_sets is None:
        marginal_sets = [sorted({pt[i] for pt in atoms}) for i in range(n)]
    if len(marginal_sets) != n:
        raise InvalidInputError(f"expected {n} marginal supports, got {len(marginal_sets)}")
    product = set(itertools.product(*[sorted(set(float(v) for v in s)) for s in marginal_sets]))
    missing = sorted(product - atoms)
    extra = sorted(atoms - product)
    witnesses = [{"point": list(pt), "lhs": 0.0, "rhs": 1.0, "kind": "support"} for pt in missing[:k]]
    witnesses += [{"point": list(pt), "lhs": 1.0, "rhs": 0.0, "kind": "support"} for pt in extra[: max(0, k - len(witnesses))]]
    screening = DEPENDENT_BY_SUPPORT if (missing or extra) else INCONCLUSIVE
    note = f"{n}-ary atom set ({len(atoms)} points) vs product of coordinate supports ({len(product)} points)"
    return Verdict(screening, None, float(len(missing) + len(extra)), None, tuple(witnesses), (note,))


# ------------------------------------------------------------------- oracles


def _rank(residuals: np.ndarray, rows: list[dict], k: int) -> tuple[dict, ...]:
    """Rows sorted by residual, largest first; near-ties keep input order."""
    if not rows:
        return ()
    top = residuals.max()
    keys = np.where(residuals >= top - 1e-15 * max(1.0, top), top, residuals)
    order = np.argsort(-keys, kind="stable")[:k]
    return tuple(rows[i] for i in order)


def discrete_factorization_oracle(j: DiscreteJoint, tol: float = EXACT_TOL, k: int = 10) -> FactorizationResult:
    """Exact check of ``p_XY = p_X p_Y`` over the product of the marginal atom sets."""
    mx, my = marginals(j)
    table = dict(j.atoms)
    rows, res = [], []
    for x, px in mx.atoms:
        for y, py in my.atoms:
            lhs = table.get((x, y), 0.0)
            rhs = px * py
            rows.append({"x": x, "y": y, "lhs": lhs, "rhs": rhs, "kind": "factorization"})
            res.append(abs(lhs - rhs))
    res_arr = np.asarray(res)
    worst = float(res_arr.max())
    outcome = INDEPENDENT if worst <= tol else DEPENDENT
    wit = _rank(res_arr, rows, k) if outcome == DEPENDENT else _rank(res_arr, rows, 1)
    return FactorizationResult(outcome, worst, wit, len(rows), tol, (f"exact PMF factorization, tol {tol:g}",))


def default_probes(bbox, seed: int = 0, n_cheb: int = 7, n_random: int = 20) -> np.ndarray:
    """Chebyshev-spaced ``n_cheb x n_cheb`` interior grid plus seeded uniform points."""
    x_lo, x_hi, y_lo, y_hi = check_bbox(bbox)
    k = np.arange(1, n_cheb + 1)
    t = np.cos((2 * k - 1) * np.pi / (2 * n_cheb))
    xs = 0.5 * (x_lo + x_hi) + 0.5 * (x_hi - x_lo) * t
    ys = 0.5 * (y_lo + y_hi) + 0.5 * (y_hi - y_lo) * t
    grid = np.array([(x, y) for x in np.sort(xs) for y in np.sort(ys)])
    rng = np.random.default_rng(seed)
    rand = np.column_stack((rng.uniform(x_lo, x_hi, n_random), rng.uniform(y_lo, y_hi, n_random)))
    return np.vstack((grid, rand))


def _probe_result(lhs, rhs, pts, tol, k, label) -> FactorizationResult:
    lhs = np.asarray(lhs, dtype=float)
    rhs = np.asarray(rhs, dtype=float)
    if not (np.all(np.isfinite(lhs)) and np.all(np.isfinite(rhs))):
        raise NumericError(f"{label}: non-finite values at probe points")
    res = np.abs(lhs - rhs)
    rows = [{"x": float(x), "y": float(y), "lhs": float(a), "rhs": float(b), "kind": "factorization"} for (x, y), a, b in zip(pts, lhs, rhs)]
    worst = float(res.max())
    outcome = DEPENDENT if worst > tol else CONSISTENT
    note = f"{label} at {len(pts)} probes, tol {tol:g}"
    if outcome == CONSISTENT:
        note += " (probe-limited; not a proof of independence)"
    return FactorizationResult(outcome, worst, _rank(res, rows, k if outcome == DEPENDENT else 1), len(pts), tol, (note,))


def continuous_factorization_probe(j: ContinuousJoint | MixedJoint, probe_points=None, tol: float = PROBE_TOL, seed: int = 0, k: int = 10) -> FactorizationResult:
    """Compare the joint density with the product of marginal densities at probes.

    For a mixed joint the "density" is with respect to counting measure on
    the levels times Lebesgue measure, and probes pair continuous values with
    every level.
    """
    if isinstance(j, MixedJoint):
        lo, hi = j.continuous_range
        cs = default_probes((lo, hi, 0.0, 1.0), seed)[:, 0] if probe_points is None else np.asarray(probe_points, dtype=float).ravel()
        pts, lhs, rhs = [], [], []
        for c in np.unique(cs):
            f_c = sum(w * float(j.conditional_density(c, lv)) for lv, w in zip(j.levels, j.weights))
            for lv, w in zip(j.levels, j.weights):
                pts.append((c, lv) if j.discrete_axis == "y" else (lv, c))
                lhs.append(float(j.joint_density(c, lv)))
                rhs.append(f_c * w)
        return _probe_result(lhs, rhs, pts, tol, k, "density factorization")
    if not isinstance(j, ContinuousJoint):
        raise InvalidInputError(f"density probe needs a continuous or mixed joint, got {type(j).__name__}")
    pts = default_probes(j.bbox, seed) if probe_points is None else np.asarray(probe_points, dtype=float).reshape(-1, 2)
    f_xy = j.density(pts[:, 0], pts[:, 1])
    f_x = j.marginal_density("x", pts[:, 0])
    f_y = j.marginal_density("y", pts[:, 1])
    return _probe_result(f_xy, np.asarray(f_x) * np.asarray(f_y), pts, tol, k, "density factorization")


def cdf_factorization_probe(F_xy: Callable, F_x: Callable, F_y: Callable, probe_points, tol: float = PROBE_TOL, k: int = 10) -> FactorizationResult:
    """Compare ``F_XY(x, y)`` with ``F_X(x) F_Y(y)`` at probe points."""
    pts = np.asarray(probe_points, dtype=float).reshape(-1, 2)
    lhs = [float(F_xy(x, y)) for x, y in pts]
    rhs = [float(F_x(x)) * float(F_y(y)) for x, y in pts]
    return _probe_result(lhs, rhs, pts, tol, k, "CDF factorization")


def _discrete_cdf_probes(j: DiscreteJoint) -> np.ndarray:
    def mids(v):
        v = np.unique(v)
        if v.size == 1:
            return v
        return np.concatenate((0.5 * (v[:-1] + v[1:]), [v[-1]]))

    mx, my = marginals(j)
    return np.array([(a, b) for a in mids(mx.values) for b in mids(my.values)])


def cdf_probe(dist, probe_points=None, tol: float = PROBE_TOL, seed: int = 0) -> FactorizationResult:
    """CDF factorization probe with the distribution's own CDFs."""
    if isinstance(dist, DiscreteJoint):
        mx, my = marginals(dist)
        pts = _discrete_cdf_probes(dist) if probe_points is None else probe_points
        return cdf_factorization_probe(lambda x, y: dist.cdf(x, y), mx.cdf, my.cdf, pts, tol)
    if isinstance(dist, MixedJoint):
        lo, hi = dist.continuous_range
        if probe_points is None:
            cs = np.linspace(lo, hi, 9)[1:-1]
            lv = np.asarray(dist.levels)
            ds = np.concatenate((0.5 * (lv[:-1] + lv[1:]), lv[-1:])) if lv.size > 1 else lv
            probe_points = [(c, d) if dist.discrete_axis == "y" else (d, c) for c in cs for d in ds]
        return cdf_factorization_probe(dist.cdf, lambda v: dist.marginal_cdf("x", v), lambda v: dist.marginal_cdf("y", v), probe_points, tol)
    if isinstance(dist, ContinuousJoint):
        if dist.cdf is None:
            raise InvalidInputError(f"{dist.name}: no joint CDF available for the CDF probe")
        pts = default_probes(dist.bbox, seed) if probe_points is None else probe_points
        return cdf_factorization_probe(dist.cdf, lambda v: dist.marginal_cdf("x", v), lambda v: dist.marginal_cdf("y", v), pts, tol)
    raise InvalidInputError(f"cannot probe CDFs of {type(dist).__name__}")


# ----------------------------------------------------------------- pipeline


ORACLE_CHOICES = ("auto", "exact", "probe", "cdf", "none")


def run_oracle(dist, oracle: str = "auto", seed: int = 0, tol: float | None = None) -> FactorizationResult | None:
    if oracle not in ORACLE_CHOICES:
        raise InvalidInputError(f"oracle must be one of {ORACLE_CHOICES}, got {oracle!r}")
    if oracle == "none":
        return None
    if oracle == "auto":
        oracle = "exact" if isinstance(dist, DiscreteJoint) else ("cdf" if isinstance(dist, MixedJoint) else "probe")
    if oracle == "exact":
        if not isinstance(dist, DiscreteJoint):
            raise InvalidInputError("the exact oracle needs a finite discrete joint")
        return discrete_factorization_oracle(dist, EXACT_TOL if tol is None else tol)
    if oracle == "probe":
        if isinstance(dist, DiscreteJoint):
            raise InvalidInputError("the density probe needs a continuous or mixed joint; use --oracle exact")
        return continuous_factorization_probe(dist, tol=PROBE_TOL if tol is None else tol, seed=seed)
    return cdf_probe(dist, tol=PROBE_TOL if tol is None else tol, seed=seed)


def check(dist, oracle: str = "auto", grid=512, tol_area: float | None = None, tol_dist: float | None = None, seed: int = 0, report: SupportReport | None = None) -> tuple[SupportReport, Verdict]:
    """Support report, screening verdict and (optionally) an oracle outcome."""
    report = support(dist, grid) if report is None else report
    verdict = necessary_condition(report.s_xy, report.s_x, report.s_y, tol_area, tol_dist)
    result = run_oracle(dist, oracle, seed)
    if result is not None:
        verdict = verdict.with_oracle(result)
    return report, verdict
