"""Support sets of discrete, continuous and mixed distributions.

Discrete supports are closures of positive-mass atom sets.  Continuous
supports close the positivity set of the canonical (or declared) density.
Points of increase of a CDF give a second, independent route in 1D; the
coordinatewise 2D version is experimental.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field
from typing import Callable

import numpy as np
from scipy import ndimage
from scipy.interpolate import RegularGridInterpolator

from ._validation import DEFAULT_GRID, check_bbox, check_grid_shape, check_samples
from .distributions import (
    EPS_POS,
    CantorCDF,
    ContinuousJoint,
    DiscreteJoint,
    MarginalPMF,
    MixedJoint,
    Univariate,
    canonical_pdf_1d,
    marginals,
)
from .exceptions import InvalidDistributionError, InvalidInputError
from .sets import ClosedSet1D, Grid, Region2D, closure1d, closure_padding, limit_points1d

DEFAULT_NODES = 1025
POI_NODES = 2049
_BISECT_STEPS = 48
_MONO_TOL = 1e-12

METHODS = ("closure-of-atoms", "canonical-pdf-grid", "neighborhood-probe", "points-of-increase", "empirical-grid")


# ----------------------------------------------------------------- containers


@dataclass(frozen=True, eq=False)
class SlicedRegion:
    """Joint support of a mixed pair: one closed set of the continuous
    coordinate per level of the discrete coordinate."""

    discrete_axis: str
    levels: tuple[float, ...]
    slices: tuple[ClosedSet1D, ...]
    provenance: str = "analytic"
    notes: tuple[str, ...] = ()

    @property
    def is_empty(self) -> bool:
        return all(s.is_empty for s in self.slices)

    def slice(self, level: float) -> ClosedSet1D:
        for lv, s in zip(self.levels, self.slices):
            if lv == level:
                return s
        return ClosedSet1D()

    def contains(self, c, level, tol: float = 0.0) -> np.ndarray:
        return self.slice(float(level)).contains(c, tol)

    def to_dict(self) -> dict:
        return {
            "provenance": self.provenance,
            "discrete_axis": self.discrete_axis,
            "slices": [{"level": lv, "set": s.to_dict()} for lv, s in zip(self.levels, self.slices)],
            "notes": list(self.notes),
        }


@dataclass(frozen=True, eq=False)
class SupportReport:
    s_x: ClosedSet1D
    s_y: ClosedSet1D
    s_xy: Region2D | SlicedRegion
    method: str
    amiable_x: str | None = None
    amiable_y: str | None = None
    notes: tuple[str, ...] = field(default=())

    def to_dict(self) -> dict:
        return {
            "method": self.method,
            "s_x": self.s_x.to_dict(),
            "s_y": self.s_y.to_dict(),
            "s_xy": self.s_xy.to_dict(),
            "amiable": {"x": self.amiable_x, "y": self.amiable_y},
            "notes": list(self.notes),
        }


# ---------------------------------------------------------------- discrete


def support_discrete(m: MarginalPMF, clip: tuple[float, float] | None = None) -> ClosedSet1D:
    """Closure of the positive-mass atoms together with declared limit points."""
    if clip is None:
        pts = list(m.values) + list(m.declared_limit_points)
        lo, hi = (min(pts), max(pts)) if pts else (0.0, 1.0)
        clip = (min(-50.0, lo - 1.0), max(50.0, hi + 1.0))
    return closure1d(atoms=m.values, limit_points=m.declared_limit_points, clip=clip)


def amiability_check(m: MarginalPMF, tol: float = 1e-6, min_count: int = 5) -> str:
    """``"yes"`` when the positive-mass set is closed, ``"no"`` when a declared
    limit point carries no mass, ``"unknown"`` when only the clustering
    heuristic suggests an accumulation point."""
    values = m.values
    for lp in m.declared_limit_points:
        if not np.any(np.isclose(values, lp, rtol=1e-12, atol=0.0)):
            return "no"
    candidates = limit_points1d(values, tol=tol, min_count=min_count).candidates
    unexplained = [c for c in candidates if not any(abs(c - lp) <= tol for lp in m.declared_limit_points)]
    return "unknown" if unexplained else "yes"


def _discrete_report(j: DiscreteJoint, grid=DEFAULT_GRID) -> SupportReport:
    mx, my = marginals(j)
    s_x, s_y = support_discrete(mx), support_discrete(my)
    pts = list(j.points) + list(j.declared_limit_points)
    notes = []
    if j.truncation_mass:
        notes.append(f"countable PMF truncated; dropped tail mass {j.truncation_mass:.3g}")
    s_xy = Region2D.from_points(pts, _atom_grid(pts, grid), provenance="analytic", notes=notes)
    return SupportReport(s_x, s_y, s_xy, "closure-of-atoms", amiability_check(mx), amiability_check(my), tuple(notes))


def _atom_grid(pts, shape) -> Grid:
    arr = np.asarray(pts, dtype=float).reshape(-1, 2)
    if arr.size == 0:
        return Grid.covering((0.0, 1.0, 0.0, 1.0), shape)
    x_lo, x_hi = arr[:, 0].min(), arr[:, 0].max()
    y_lo, y_hi = arr[:, 1].min(), arr[:, 1].max()
    pad_x = max(0.05 * (x_hi - x_lo), 0.5)
    pad_y = max(0.05 * (y_hi - y_lo), 0.5)
    return Grid.covering((x_lo - pad_x, x_hi + pad_x, y_lo - pad_y, y_hi + pad_y), shape)


def conditional_support(j: DiscreteJoint | MixedJoint, axis: str, value: float) -> ClosedSet1D:
    """Support of the other coordinate given ``axis == value``.

    Conditioning on a value without positive mass (or level weight, or
    marginal density) is rejected.
    """
    if axis not in ("x", "y"):
        raise InvalidInputError(f"axis must be 'x' or 'y', got {axis!r}")
    value = float(value)
    if isinstance(j, DiscreteJoint):
        k = 0 if axis == "x" else 1
        others = [xy[1 - k] for xy, p in j.atoms if xy[k] == value]
        if not others:
            raise InvalidInputError(f"P({axis.upper()} = {value:g}) = 0; conditional support undefined")
        limits = [lp[1 - k] for lp in j.declared_limit_points if lp[k] == value]
        return closure1d(atoms=others, limit_points=limits, clip=(min(-50.0, min(others) - 1), max(50.0, max(others) + 1)))
    if isinstance(j, MixedJoint):
        lo, hi = j.continuous_range
        if axis == j.discrete_axis:
            if j.level_weight(value) <= 0.0:
                raise InvalidInputError(f"level {value:g} has zero probability")
            return support_continuous_1d(lambda c: j.positive(c, value), domain=(lo, hi), kind="positivity")
        levels = [lv for lv, w in zip(j.levels, j.weights) if w > 0 and float(j.joint_density(value, lv)) > EPS_POS]
        if not levels:
            raise InvalidInputError(f"continuous coordinate has zero density at {value:g}")
        return closure1d(atoms=levels)
    raise InvalidInputError(f"conditional support needs a discrete or mixed joint, got {type(j).__name__}")


# -------------------------------------------------------------- continuous 1D


def _positivity_fn(f, kind: str, eps_pos: float) -> Callable:
    if isinstance(f, Univariate):
        if f.positivity is not None:
            return lambda x: np.asarray(f.positivity(x), dtype=bool)
        if f.pdf is not None:
            return lambda x: np.asarray(f.pdf(x), dtype=float) > eps_pos
        return lambda x: np.asarray(canonical_pdf_1d(f.cdf, x), dtype=float) > eps_pos
    if kind == "positivity":
        return lambda x: np.asarray(f(x), dtype=bool)
    if kind == "pdf":
        return lambda x: np.asarray(f(x), dtype=float) > eps_pos
    if kind == "cdf":
        return lambda x: np.asarray(canonical_pdf_1d(f, x), dtype=float) > eps_pos
    raise InvalidInputError(f"kind must be 'pdf', 'cdf' or 'positivity', got {kind!r}")


def _bisect(pos_fn: Callable, outside: np.ndarray, inside: np.ndarray) -> np.ndarray:
    """Locate positivity boundaries; returns the innermost point found inside."""
    a, b = outside.astype(float).copy(), inside.astype(float).copy()
    for _ in range(_BISECT_STEPS):
        m = 0.5 * (a + b)
        pm = np.asarray(pos_fn(m), dtype=bool)
        a = np.where(pm, a, m)
        b = np.where(pm, m, b)
    return b


def _runs(flags: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    d = np.diff(flags.astype(np.int8))
    starts = np.flatnonzero(d == 1) + 1
    ends = np.flatnonzero(d == -1)
    if flags[0]:
        starts = np.r_[0, starts]
    if flags[-1]:
        ends = np.r_[ends, flags.size - 1]
    return starts, ends


def support_continuous_1d(
    f,
    domain: tuple[float, float] | None = None,
    grid_n: int = DEFAULT_NODES,
    *,
    kind: str = "pdf",
    unbounded: tuple[bool, bool] | None = None,
    eps_pos: float = EPS_POS,
    require_mass: bool = False,
) -> ClosedSet1D:
    """Closure of the positivity set of a density on ``domain``.

    ``f`` is a :class:`Univariate` (declared positivity, then pdf, then the
    canonical pdf of its CDF) or a callable interpreted according to
    ``kind``.  Positivity is evaluated on ``grid_n`` nodes; every boundary
    between a positive and a non-positive node is refined by bisection.
    Runs touching a domain end flagged in ``unbounded`` become unbounded
    components clipped at that end.
    """
    if isinstance(f, Univariate):
        domain = f.domain if domain is None else domain
        unbounded = f.unbounded if unbounded is None else unbounded
        require_mass = True
    if domain is None:
        raise InvalidInputError("domain is required for a bare evaluator")
    lo, hi = float(domain[0]), float(domain[1])
    if not (math.isfinite(lo) and math.isfinite(hi) and lo < hi):
        raise InvalidInputError(f"domain must be finite with lo < hi, got {domain}")
    if int(grid_n) < 2:
        raise InvalidInputError(f"grid_n must be at least 2, got {grid_n}")
    unbounded = unbounded or (False, False)
    pos_fn = _positivity_fn(f, kind, eps_pos)

    nodes = np.linspace(lo, hi, int(grid_n))
    pos = np.asarray(pos_fn(nodes), dtype=bool)
    if not pos.any():
        msg = f"density vanishes on every node of [{lo:g}, {hi:g}]"
        if require_mass:
            raise InvalidDistributionError(msg)
        warnings.warn(msg + "; returning the empty set", RuntimeWarning, stacklevel=2)
        return ClosedSet1D(clip_lo=lo, clip_hi=hi)

    starts, ends = _runs(pos)
    left = nodes[starts].copy()
    right = nodes[ends].copy()
    inner_l = starts > 0
    if inner_l.any():
        left[inner_l] = _bisect(pos_fn, nodes[starts[inner_l] - 1], nodes[starts[inner_l]])
    inner_r = ends < nodes.size - 1
    if inner_r.any():
        right[inner_r] = _bisect(pos_fn, nodes[ends[inner_r] + 1], nodes[ends[inner_r]])
    if unbounded[0] and pos[0]:
        left[0] = -math.inf
    if unbounded[1] and pos[-1]:
        right[-1] = math.inf
    return ClosedSet1D(intervals=tuple(zip(left.tolist(), right.tolist())), clip_lo=lo, clip_hi=hi)


# ------------------------------------------------------------ points of increase


def _cdf_parts(F):
    """(cdf, sf, domain, unbounded) for the accepted CDF-like inputs."""
    if isinstance(F, Univariate):
        return F.cdf, F.sf, F.domain, F.unbounded
    if isinstance(F, MarginalPMF):
        pts = list(F.values) + list(F.declared_limit_points)
        return F.cdf, None, (min(pts) - 1.0, max(pts) + 1.0), (False, False)
    if isinstance(F, CantorCDF):
        return F, None, (-0.25, 1.25), (False, False)
    if callable(F):
        return F, None, None, (False, False)
    raise InvalidInputError(f"expected a CDF evaluator, got {type(F).__name__}")


def points_of_increase_1d(
    F,
    domain: tuple[float, float] | None = None,
    grid_n: int = POI_NODES,
    eps_list=None,
    *,
    unbounded: tuple[bool, bool] | None = None,
) -> ClosedSet1D:
    """Grid nodes ``x`` with ``F(x + eps) > F(x - eps)`` for every ``eps`` in the
    schedule (default ``4h, 2h, h`` for node spacing ``h``), closed into
    intervals and atoms.

    When a survival function is available, window masses on the right half
    line are taken from it to avoid cancellation near 1.
    """
    cdf, sf, dom, unb = _cdf_parts(F)
    domain = dom if domain is None else domain
    unbounded = unb if unbounded is None else unbounded
    if domain is None:
        raise InvalidInputError("domain is required for a bare CDF evaluator")
    lo, hi = float(domain[0]), float(domain[1])
    if not lo < hi or int(grid_n) < 2:
        raise InvalidInputError(f"need lo < hi and grid_n >= 2, got domain={domain}, grid_n={grid_n}")
    nodes = np.linspace(lo, hi, int(grid_n))
    h = nodes[1] - nodes[0]
    eps_list = (4 * h, 2 * h, h) if eps_list is None else tuple(float(e) for e in eps_list)
    if not eps_list or min(eps_list) <= 0:
        raise InvalidInputError("eps_list must hold positive widths")

    values = np.asarray(cdf(nodes), dtype=float)
    if np.any(np.diff(values) < -_MONO_TOL):
        k = int(np.argmin(np.diff(values)))
        raise InvalidDistributionError(f"CDF decreases between {nodes[k]:g} and {nodes[k + 1]:g}")

    def window(eps):
        a, b = nodes - eps, nodes + eps
        lower = np.asarray(cdf(b), dtype=float) - np.asarray(cdf(a), dtype=float)
        if sf is None:
            return lower
        upper = np.asarray(sf(a), dtype=float) - np.asarray(sf(b), dtype=float)
        return np.where(a >= 0, upper, lower)

    passing = np.ones(nodes.size, dtype=bool)
    for eps in eps_list:
        passing &= window(eps) > 0.0
    if not passing.any():
        return ClosedSet1D(clip_lo=lo, clip_hi=hi)
    starts, ends = _runs(passing)
    left = nodes[starts].copy()
    right = nodes[ends].copy()
    if unbounded[0] and passing[0]:
        left[0] = -math.inf
    if unbounded[1] and passing[-1]:
        right[-1] = math.inf
    return ClosedSet1D(intervals=tuple(zip(left.tolist(), right.tolist())), clip_lo=lo, clip_hi=hi)


def points_of_increase_2d(F: Callable, bbox, grid=128, eps_list=None) -> Region2D:
    """Experimental coordinatewise points of increase of a joint CDF.

    A cell centre passes when, moving one coordinate at a time by ``eps``
    with the other held fixed, the CDF strictly increases, for every
    ``eps`` in the schedule.  This set is not guaranteed to equal the
    support; callers should compare, not assume.
    """
    g = Grid.covering(check_bbox(bbox), check_grid_shape(grid))
    xx, yy = g.mesh()
    h = g.h
    eps_list = (4 * h, 2 * h, h) if eps_list is None else tuple(float(e) for e in eps_list)
    base_x = np.asarray(F(xx, yy), dtype=float)
    if np.any(np.diff(base_x, axis=0) < -_MONO_TOL) or np.any(np.diff(base_x, axis=1) < -_MONO_TOL):
        raise InvalidDistributionError("joint CDF is not coordinatewise monotone on the grid")
    passing = np.ones(g.shape, dtype=bool)
    for eps in eps_list:
        passing &= np.asarray(F(xx + eps, yy), dtype=float) > np.asarray(F(xx - eps, yy), dtype=float)
        passing &= np.asarray(F(xx, yy + eps), dtype=float) > np.asarray(F(xx, yy - eps), dtype=float)
    return Region2D(g, passing, padding=closure_padding(passing), provenance="analytic", notes=("experimental coordinatewise points of increase",))


def grid_cdf(j: ContinuousJoint, grid=256) -> Callable:
    """Joint CDF of a pdf-backed joint by cumulative midpoint sums on a grid,
    bilinearly interpolated (zero below, margins above the bbox)."""
    g = Grid.covering(j.bbox, check_grid_shape(grid))
    xx, yy = g.mesh()
    mass = np.asarray(j.density(xx, yy), dtype=float) * g.cell_area
    total = mass.sum()
    if total <= 0:
        raise InvalidDistributionError(f"{j.name}: density has no mass on its bbox")
    cum = np.zeros((g.n_x + 1, g.n_y + 1))
    cum[1:, 1:] = np.cumsum(np.cumsum(mass / total, axis=0), axis=1)
    xe = g.x_lo + np.arange(g.n_x + 1) * g.hx
    ye = g.y_lo + np.arange(g.n_y + 1) * g.hy
    interp = RegularGridInterpolator((xe, ye), cum)

    def F(x, y):
        x, y = np.broadcast_arrays(np.asarray(x, dtype=float), np.asarray(y, dtype=float))
        pts = np.stack((np.clip(x, xe[0], xe[-1]), np.clip(y, ye[0], ye[-1])), axis=-1)
        return interp(pts)

    return F


# ------------------------------------------------------------------- joint 2D


def _clip_notes(j: ContinuousJoint) -> list[str]:
    notes = []
    x_lo, x_hi, y_lo, y_hi = j.bbox
    for axis, (left, right), (lo, hi) in (("x", j.unbounded[0], (x_lo, x_hi)), ("y", j.unbounded[1], (y_lo, y_hi))):
        if left or right:
            notes.append(f"{axis}-support unbounded; clipped to [{lo:g}, {hi:g}]")
    return notes


def support_region_2d(j: ContinuousJoint | MixedJoint, grid=DEFAULT_GRID, grid_n: int = DEFAULT_NODES) -> Region2D | SlicedRegion:
    """Positivity mask of the declared or canonical density at cell centres,
    closed by one cell of padding; mixed joints give exact slices instead."""
    if isinstance(j, MixedJoint):
        lo, hi = j.continuous_range
        levels, slices = [], []
        for lv, w in zip(j.levels, j.weights):
            if w <= 0:
                continue
            levels.append(lv)
            slices.append(support_continuous_1d(lambda c, lv=lv: j.positive(c, lv), domain=(lo, hi), grid_n=grid_n, kind="positivity"))
        return SlicedRegion(j.discrete_axis, tuple(levels), tuple(slices))
    if not isinstance(j, ContinuousJoint):
        raise InvalidInputError(f"expected a continuous or mixed joint, got {type(j).__name__}")
    g = Grid.covering(j.bbox, check_grid_shape(grid))
    method = "declared positivity" if j.positivity is not None else "canonical density > eps_pos"
    return Region2D.from_indicator(j.positive, g, provenance="analytic", notes=[method] + _clip_notes(j))


def marginal_supports(j: ContinuousJoint, grid_n: int = DEFAULT_NODES) -> tuple[ClosedSet1D, ClosedSet1D]:
    """Supports of both margins of a continuous joint, clipped to its bbox."""
    x_lo, x_hi, y_lo, y_hi = j.bbox
    out = []
    for k, axis, dom in ((0, "x", (x_lo, x_hi)), (1, "y", (y_lo, y_hi))):
        if j.marginal_positivity is not None:
            fn, kind = j.marginal_positivity[k], "positivity"
        else:
            fn, kind = (lambda v, axis=axis: j.marginal_density(axis, v)), "pdf"
        out.append(support_continuous_1d(fn, domain=dom, grid_n=grid_n, kind=kind, unbounded=j.unbounded[k]))
    return out[0], out[1]


def mixed_marginal_supports(j: MixedJoint, region: SlicedRegion) -> tuple[ClosedSet1D, ClosedSet1D]:
    levels = closure1d(atoms=region.levels)
    lo, hi = j.continuous_range
    cont = ClosedSet1D(
        intervals=tuple(iv for s in region.slices for iv in s.intervals),
        atoms=tuple(a for s in region.slices for a in s.atoms),
        clip_lo=lo, clip_hi=hi,
    )
    return (cont, levels) if j.discrete_axis == "y" else (levels, cont)


def support(dist, grid=DEFAULT_GRID, grid_n: int = DEFAULT_NODES) -> SupportReport:
    """Full support report for a discrete, continuous or mixed joint."""
    if isinstance(dist, DiscreteJoint):
        return _discrete_report(dist, grid)
    if isinstance(dist, MixedJoint):
        region = support_region_2d(dist, grid, grid_n)
        s_x, s_y = mixed_marginal_supports(dist, region)
        return SupportReport(s_x, s_y, region, "canonical-pdf-grid", notes=("mixed joint: joint support stored as exact slices",))
    if isinstance(dist, ContinuousJoint):
        region = support_region_2d(dist, grid)
        s_x, s_y = marginal_supports(dist, grid_n)
        return SupportReport(s_x, s_y, region, "canonical-pdf-grid", notes=tuple(region.notes))
    raise InvalidInputError(f"cannot compute the support of {type(dist).__name__}")


# ------------------------------------------------------------------ empirical


def empirical_support(samples, grid=256, min_count: int = 1, bbox=None) -> Region2D:
    """Cells holding at least ``min_count`` samples.

    Without ``bbox`` the grid spans the sample range, widened by half a cell
    so extreme samples sit inside.
    """
    X = check_samples(samples)
    if int(min_count) < 1:
        raise InvalidInputError(f"min_count must be >= 1, got {min_count}")
    n_x, n_y = check_grid_shape(grid)
    if bbox is None:
        x_lo, x_hi = X[:, 0].min(), X[:, 0].max()
        y_lo, y_hi = X[:, 1].min(), X[:, 1].max()
        wx = (x_hi - x_lo) or 1.0
        wy = (y_hi - y_lo) or 1.0
        bbox = (x_lo - wx / (2 * n_x), x_hi + wx / (2 * n_x), y_lo - wy / (2 * n_y), y_hi + wy / (2 * n_y))
    g = Grid.covering(bbox, (n_x, n_y))
    i, j, inside = g.index(X[:, 0], X[:, 1])
    counts = np.zeros(g.shape, dtype=np.int64)
    np.add.at(counts, (i[inside], j[inside]), 1)
    mask = counts >= int(min_count)
    notes = [f"{int(inside.sum())} of {len(X)} samples inside the grid", f"min_count={int(min_count)}"]
    return Region2D(g, mask, padding=closure_padding(mask), provenance="grid-estimated", notes=tuple(notes))


def empirical_margins(region: Region2D) -> tuple[ClosedSet1D, ClosedSet1D]:
    """Projections of an estimated mask onto the axes, as unions of cell extents."""
    g = region.grid
    out = []
    for axis_mask, lo, h, clip in ((region.mask.any(axis=1), g.x_lo, g.hx, (g.x_lo, g.x_hi)), (region.mask.any(axis=0), g.y_lo, g.hy, (g.y_lo, g.y_hi))):
        if not axis_mask.any():
            out.append(ClosedSet1D(clip_lo=clip[0], clip_hi=clip[1]))
            continue
        starts, ends = _runs(axis_mask)
        ivs = tuple((lo + s * h, lo + (e + 1) * h) for s, e in zip(starts, ends))
        out.append(ClosedSet1D(intervals=ivs, clip_lo=clip[0], clip_hi=clip[1]))
    return out[0], out[1]


def empirical_report(samples, grid=256, min_count: int = 1) -> SupportReport:
    region = empirical_support(samples, grid, min_count)
    s_x, s_y = empirical_margins(region)
    return SupportReport(s_x, s_y, region, "empirical-grid", notes=region.notes)


# -------------------------------------------------------- diagnostic helpers


def cell_masses(j: ContinuousJoint, grid: Grid) -> np.ndarray:
    """Midpoint-rule probability of every cell."""
    xx, yy = grid.mesh()
    return np.asarray(j.density(xx, yy), dtype=float) * grid.cell_area


def neighborhood_mass(j: ContinuousJoint, grid: Grid) -> np.ndarray:
    """Estimated probability of each cell's 3x3 neighbourhood."""
    return ndimage.convolve(cell_masses(j, grid), np.ones((3, 3)), mode="constant", cval=0.0)


def support_mass(j: ContinuousJoint, region: Region2D) -> float:
    """Midpoint-rule probability carried by the closed mask of ``region``."""
    return float(cell_masses(j, region.grid)[region.closed_mask].sum())
