"""Closed-set algebra on the line and the plane.

One-dimensional supports are stored exactly as a finite union of closed
intervals plus a finite set of isolated points (:class:`ClosedSet1D`).
Two-dimensional supports are boolean masks over a regular grid
(:class:`Region2D`), optionally backed by an analytic indicator or by an
exact finite point set when the region is purely atomic.
"""

from __future__ import annotations

import bisect
import math
import re
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Iterable, NamedTuple, Sequence

import numpy as np
from scipy import ndimage
from scipy.spatial import cKDTree

from ._validation import DEFAULT_GRID, check_bbox, check_finite_real, check_grid_shape
from .exceptions import InvalidInputError

DEFAULT_CLIP = 50.0

# relative tolerance used when deciding that two floats name the same point
_SAME_POINT_RTOL = 1e-12

_INTERVAL_RE = re.compile(
    r"^\s*([\[(])\s*([^,\s]+)\s*,\s*([^,\s\])]+)\s*([\])])\s*$"
)


@dataclass(frozen=True)
class RawInterval:
    """An interval before closure; either endpoint may be open or infinite."""

    lo: float
    hi: float
    closed_lo: bool = True
    closed_hi: bool = True

    @classmethod
    def parse(cls, text: str) -> "RawInterval":
        """Parse interval notation such as ``"(0, 1]"`` or ``"[0, inf)"``."""
        m = _INTERVAL_RE.match(text)
        if m is None:
            raise InvalidInputError(f"cannot parse interval {text!r}")
        left, lo, hi, right = m.groups()
        try:
            lo_v, hi_v = float(lo), float(hi)
        except ValueError:
            raise InvalidInputError(f"cannot parse interval {text!r}") from None
        return cls(lo_v, hi_v, left == "[", right == "]")


def _coerce_raw(item) -> RawInterval:
    if isinstance(item, RawInterval):
        return item
    if isinstance(item, str):
        return RawInterval.parse(item)
    try:
        values = tuple(item)
    except TypeError:
        raise InvalidInputError(f"not an interval: {item!r}") from None
    if len(values) == 2:
        return RawInterval(float(values[0]), float(values[1]))
    if len(values) == 4:
        return RawInterval(float(values[0]), float(values[1]), bool(values[2]), bool(values[3]))
    raise InvalidInputError(f"not an interval: {item!r}")


def _same_point(a: float, b: float) -> bool:
    return abs(a - b) <= _SAME_POINT_RTOL * max(1.0, abs(a), abs(b))


@dataclass(frozen=True)
class ClosedSet1D:
    """A closed subset of the real line in normal form.

    Intervals are sorted, pairwise disjoint and non-degenerate; degenerate
    intervals are stored as atoms and atoms never lie inside an interval, so
    two equal sets compare equal structurally.  An infinite endpoint is
    replaced by the clip extent on that side and recorded in the
    ``unbounded_*`` flag.
    """

    intervals: tuple[tuple[float, float], ...] = ()
    atoms: tuple[float, ...] = ()
    unbounded_left: bool = False
    unbounded_right: bool = False
    clip_lo: float = -DEFAULT_CLIP
    clip_hi: float = DEFAULT_CLIP

    def __post_init__(self):
        clip_lo = check_finite_real(self.clip_lo, "clip_lo")
        clip_hi = check_finite_real(self.clip_hi, "clip_hi")
        if math.isinf(clip_lo) or math.isinf(clip_hi) or clip_lo >= clip_hi:
            raise InvalidInputError(f"clip extents must be finite with lo < hi, got ({clip_lo}, {clip_hi})")
        unb_left, unb_right = bool(self.unbounded_left), bool(self.unbounded_right)

        spans = []
        atoms = []
        for iv in self.intervals:
            try:
                lo, hi = (float(v) for v in iv)
            except (TypeError, ValueError):
                raise InvalidInputError(f"not an interval: {iv!r}") from None
            if math.isnan(lo) or math.isnan(hi):
                raise InvalidInputError("interval endpoint is NaN")
            if lo > hi:
                raise InvalidInputError(f"interval with lo > hi: [{lo}, {hi}]")
            if lo == math.inf or hi == -math.inf:
                raise InvalidInputError(f"empty interval at infinity: [{lo}, {hi}]")
            if lo == -math.inf:
                lo, unb_left = clip_lo, True
            if hi == math.inf:
                hi, unb_right = clip_hi, True
            if lo > hi:
                raise InvalidInputError(f"clip extent ({clip_lo}, {clip_hi}) excludes interval [{lo}, {hi}]")
            if lo == hi:
                atoms.append(lo)
            else:
                spans.append((lo, hi))

        for a in self.atoms:
            a = check_finite_real(a, "atom")
            if math.isinf(a):
                raise InvalidInputError("atoms must be finite")
            atoms.append(a)

        spans.sort()
        merged: list[tuple[float, float]] = []
        for lo, hi in spans:
            if merged and lo <= merged[-1][1]:
                merged[-1] = (merged[-1][0], max(merged[-1][1], hi))
            else:
                merged.append((lo, hi))

        los = [lo for lo, _ in merged]
        kept: list[float] = []
        for a in sorted(set(atoms)):
            k = bisect.bisect_right(los, a) - 1
            if k >= 0 and a <= merged[k][1]:
                continue
            if kept and _same_point(kept[-1], a):
                continue
            kept.append(a)

        object.__setattr__(self, "intervals", tuple(merged))
        object.__setattr__(self, "atoms", tuple(kept))
        object.__setattr__(self, "unbounded_left", unb_left)
        object.__setattr__(self, "unbounded_right", unb_right)
        object.__setattr__(self, "clip_lo", clip_lo)
        object.__setattr__(self, "clip_hi", clip_hi)

    # ------------------------------------------------------------------ queries
    @property
    def is_empty(self) -> bool:
        return not self.intervals and not self.atoms

    @property
    def is_atomic(self) -> bool:
        """True when the set is a finite point set."""
        return not self.intervals

    @property
    def measure(self) -> float:
        """Lebesgue measure of the (clipped) set."""
        return float(sum(hi - lo for lo, hi in self.intervals))

    @property
    def n_components(self) -> int:
        return len(self.intervals) + len(self.atoms)

    @property
    def extent(self) -> tuple[float, float] | None:
        if self.is_empty:
            return None
        lows = [lo for lo, _ in self.intervals] + list(self.atoms)
        highs = [hi for _, hi in self.intervals] + list(self.atoms)
        return min(lows), max(highs)

    def _components(self) -> tuple[np.ndarray, np.ndarray]:
        comps = sorted(list(self.intervals) + [(a, a) for a in self.atoms])
        if not comps:
            return np.empty(0), np.empty(0)
        arr = np.asarray(comps, dtype=float)
        return arr[:, 0], arr[:, 1]

    def distance(self, x) -> np.ndarray:
        """Euclidean distance from each of ``x`` to the set (``inf`` if empty)."""
        x = np.asarray(x, dtype=float)
        lo, hi = self._components()
        if lo.size == 0:
            return np.full(x.shape, np.inf)
        idx = np.searchsorted(lo, x, side="right") - 1
        left = np.clip(idx, 0, lo.size - 1)
        right = np.clip(idx + 1, 0, lo.size - 1)
        d_left = np.maximum(np.maximum(lo[left] - x, x - hi[left]), 0.0)
        d_right = np.maximum(np.maximum(lo[right] - x, x - hi[right]), 0.0)
        return np.minimum(d_left, d_right)

    def contains(self, x, tol: float = 0.0) -> np.ndarray:
        return self.distance(x) <= tol

    def _directed_hausdorff(self, other: "ClosedSet1D") -> float:
        cand = [v for iv in self.intervals for v in iv] + list(self.atoms)
        lo, hi = other._components()
        # interior maxima of the distance function sit at midpoints of other's gaps
        for g_lo, g_hi in zip(hi[:-1], lo[1:]):
            mid = 0.5 * (g_lo + g_hi)
            if bool(self.contains(mid)):
                cand.append(mid)
        return float(np.max(other.distance(np.asarray(cand))))

    def hausdorff(self, other: "ClosedSet1D") -> float:
        """Exact Hausdorff distance between two clipped closed sets."""
        if self.is_empty and other.is_empty:
            return 0.0
        if self.is_empty or other.is_empty:
            return math.inf
        return max(self._directed_hausdorff(other), other._directed_hausdorff(self))

    def intersection_measure(self, other: "ClosedSet1D") -> float:
        total, i, j = 0.0, 0, 0
        a, b = self.intervals, other.intervals
        while i < len(a) and j < len(b):
            lo = max(a[i][0], b[j][0])
            hi = min(a[i][1], b[j][1])
            if hi > lo:
                total += hi - lo
            if a[i][1] < b[j][1]:
                i += 1
            else:
                j += 1
        return total

    def sym_diff_measure(self, other: "ClosedSet1D") -> float:
        """Lebesgue measure of the symmetric difference (atoms weigh nothing)."""
        return self.measure + other.measure - 2.0 * self.intersection_measure(other)

    def approx_equal(self, other: "ClosedSet1D", tol: float) -> bool:
        return self.unbounded_left == other.unbounded_left and self.unbounded_right == other.unbounded_right and self.hausdorff(other) <= tol

    # ------------------------------------------------------------ serialising
    def to_dict(self) -> dict:
        return {
            "intervals": [[lo, hi] for lo, hi in self.intervals],
            "atoms": list(self.atoms),
            "unbounded": {"left": self.unbounded_left, "right": self.unbounded_right},
            "clip": {"lo": self.clip_lo, "hi": self.clip_hi},
        }

    @classmethod
    def from_dict(cls, data: dict) -> "ClosedSet1D":
        try:
            unbounded = data.get("unbounded", {})
            clip = data.get("clip", {})
            return cls(
                intervals=tuple(tuple(iv) for iv in data.get("intervals", [])),
                atoms=tuple(data.get("atoms", [])),
                unbounded_left=bool(unbounded.get("left", False)),
                unbounded_right=bool(unbounded.get("right", False)),
                clip_lo=clip.get("lo", -DEFAULT_CLIP),
                clip_hi=clip.get("hi", DEFAULT_CLIP),
            )
        except (AttributeError, TypeError) as exc:
            raise InvalidInputError(f"malformed closed-set JSON: {exc}") from None

    def __str__(self) -> str:
        parts = [f"[{lo:g}, {hi:g}]" for lo, hi in self.intervals] + [f"{{{a:g}}}" for a in self.atoms]
        text = " u ".join(parts) if parts else "{}"
        flags = [s for s, f in (("unbounded left", self.unbounded_left), ("unbounded right", self.unbounded_right)) if f]
        return text + (f" ({', '.join(flags)})" if flags else "")


def closure1d(
    intervals: Iterable = (),
    atoms: Iterable[float] = (),
    limit_points: Iterable[float] = (),
    clip: tuple[float, float] = (-DEFAULT_CLIP, DEFAULT_CLIP),
) -> ClosedSet1D:
    """Closure of a finite union of intervals and points.

    ``intervals`` may mix :class:`RawInterval`, ``(lo, hi)`` pairs,
    ``(lo, hi, closed_lo, closed_hi)`` tuples and strings like ``"(0, 1]"``.
    Open endpoints become closed; ``limit_points`` are user-declared
    accumulation points of ``atoms`` (no finite procedure can find them).
    """
    raws = [_coerce_raw(iv) for iv in intervals]
    spans = []
    for r in raws:
        if math.isnan(r.lo) or math.isnan(r.hi):
            raise InvalidInputError("interval endpoint is NaN")
        if r.lo > r.hi:
            raise InvalidInputError(f"interval with lo > hi: ({r.lo}, {r.hi})")
        if r.lo == r.hi and not (r.closed_lo and r.closed_hi):
            continue  # empty interval such as (a, a)
        spans.append((r.lo, r.hi))
    return ClosedSet1D(
        intervals=tuple(spans),
        atoms=tuple(atoms) + tuple(limit_points),
        clip_lo=clip[0],
        clip_hi=clip[1],
    )


class LimitPoints(NamedTuple):
    """Limit points of a finite point list.

    ``exact`` is always empty (a finite set has none).  ``candidates`` are
    heuristic accumulation points found by clustering, useful when the list
    is a truncation of a countable set.
    """

    exact: tuple[float, ...]
    candidates: tuple[float, ...]
    heuristic: bool = True


def limit_points1d(atoms: Sequence[float], tol: float = 1e-6, min_count: int = 5) -> LimitPoints:
    """Find accumulation candidates: clusters of at least ``min_count`` atoms
    chained by gaps no larger than ``tol``.

    Each cluster reports the midpoint of its smallest internal gap, which is
    where a truncated convergent sequence is densest.
    """
    pts = np.unique(np.asarray(list(atoms), dtype=float))
    if pts.size < max(min_count, 2):
        return LimitPoints((), ())
    gaps = np.diff(pts)
    breaks = np.flatnonzero(gaps > tol)
    starts = np.concatenate(([0], breaks + 1))
    stops = np.concatenate((breaks + 1, [pts.size]))
    found = []
    for s, e in zip(starts, stops):
        if e - s < min_count:
            continue
        inner = gaps[s : e - 1]
        k = int(np.argmin(inner))
        found.append(float(0.5 * (pts[s + k] + pts[s + k + 1])))
    return LimitPoints((), tuple(found))


# --------------------------------------------------------------------- 2D grids


@dataclass(frozen=True)
class Grid:
    """Regular cell grid over ``[x_lo, x_hi] x [y_lo, y_hi]``; masks index ``[i_x, i_y]``."""

    x_lo: float
    x_hi: float
    y_lo: float
    y_hi: float
    n_x: int
    n_y: int

    def __post_init__(self):
        check_bbox(self.bbox)
        check_grid_shape((self.n_x, self.n_y), minimum=1)

    @classmethod
    def covering(cls, bbox, shape=DEFAULT_GRID) -> "Grid":
        x_lo, x_hi, y_lo, y_hi = check_bbox(bbox)
        n_x, n_y = check_grid_shape(shape, minimum=1)
        return cls(x_lo, x_hi, y_lo, y_hi, n_x, n_y)

    @classmethod
    def from_extents(cls, x_extent, y_extent, shape=DEFAULT_GRID, pad: float = 0.5) -> "Grid":
        """Grid over two extents, widening degenerate ones by ``pad`` on each side."""
        (x_lo, x_hi), (y_lo, y_hi) = x_extent, y_extent
        if x_hi <= x_lo:
            x_lo, x_hi = x_lo - pad, x_hi + pad
        if y_hi <= y_lo:
            y_lo, y_hi = y_lo - pad, y_hi + pad
        return cls.covering((x_lo, x_hi, y_lo, y_hi), shape)

    @property
    def bbox(self) -> tuple[float, float, float, float]:
        return (self.x_lo, self.x_hi, self.y_lo, self.y_hi)

    @property
    def shape(self) -> tuple[int, int]:
        return (self.n_x, self.n_y)

    @property
    def hx(self) -> float:
        return (self.x_hi - self.x_lo) / self.n_x

    @property
    def hy(self) -> float:
        return (self.y_hi - self.y_lo) / self.n_y

    @property
    def h(self) -> float:
        return max(self.hx, self.hy)

    @property
    def cell_area(self) -> float:
        return self.hx * self.hy

    @property
    def x_centers(self) -> np.ndarray:
        return self.x_lo + (np.arange(self.n_x) + 0.5) * self.hx

    @property
    def y_centers(self) -> np.ndarray:
        return self.y_lo + (np.arange(self.n_y) + 0.5) * self.hy

    def mesh(self) -> tuple[np.ndarray, np.ndarray]:
        return np.meshgrid(self.x_centers, self.y_centers, indexing="ij")

    def index(self, x, y) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        """Cell indices of points; the third array flags points inside the bbox."""
        x = np.asarray(x, dtype=float)
        y = np.asarray(y, dtype=float)
        inside = (x >= self.x_lo) & (x <= self.x_hi) & (y >= self.y_lo) & (y <= self.y_hi)
        i = np.clip(np.floor((x - self.x_lo) / self.hx).astype(np.int64), 0, self.n_x - 1)
        j = np.clip(np.floor((y - self.y_lo) / self.hy).astype(np.int64), 0, self.n_y - 1)
        return i, j, inside

    def _offset(self, other: "Grid") -> tuple[int, int] | None:
        if not (math.isclose(self.hx, other.hx, rel_tol=1e-9) and math.isclose(self.hy, other.hy, rel_tol=1e-9)):
            return None
        dx = (other.x_lo - self.x_lo) / self.hx
        dy = (other.y_lo - self.y_lo) / self.hy
        if abs(dx - round(dx)) > 1e-6 or abs(dy - round(dy)) > 1e-6:
            return None
        return int(round(dx)), int(round(dy))

    def is_aligned(self, other: "Grid") -> bool:
        return self._offset(other) is not None

    def union(self, other: "Grid") -> "Grid":
        if not self.is_aligned(other):
            raise InvalidInputError("grids differ in resolution or are not cell-aligned")
        x_lo, y_lo = min(self.x_lo, other.x_lo), min(self.y_lo, other.y_lo)
        x_hi, y_hi = max(self.x_hi, other.x_hi), max(self.y_hi, other.y_hi)
        n_x = int(round((x_hi - x_lo) / self.hx))
        n_y = int(round((y_hi - y_lo) / self.hy))
        return Grid(x_lo, x_lo + n_x * self.hx, y_lo, y_lo + n_y * self.hy, n_x, n_y)

    def embed(self, mask: np.ndarray, target: "Grid") -> np.ndarray:
        """Copy a mask defined on this grid into the (larger, aligned) ``target`` grid."""
        off = target._offset(self)
        if off is None:
            raise InvalidInputError("grids differ in resolution or are not cell-aligned")
        out = np.zeros(target.shape, dtype=bool)
        di, dj = off
        out[di : di + self.n_x, dj : dj + self.n_y] = mask
        return out

    def to_dict(self) -> dict:
        return {"bbox": list(self.bbox), "shape": [self.n_x, self.n_y], "h": [self.hx, self.hy]}


def closure_padding(mask: np.ndarray) -> np.ndarray:
    """Cells adjacent (8-neighbourhood) to ``mask`` but not in it."""
    if not mask.any():
        return np.zeros_like(mask, dtype=bool)
    grown = ndimage.binary_dilation(mask, structure=np.ones((3, 3), dtype=bool))
    return grown & ~mask


def _frozen(arr: np.ndarray) -> np.ndarray:
    arr = np.array(arr, dtype=bool, copy=True)
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True, eq=False)
class Region2D:
    """Grid representation of a closed planar set.

    ``mask`` holds the cells whose centres belong to the set.  ``padding``
    holds the one-cell ring added when a positivity set is closed up on the
    grid; it is kept apart so areas and comparisons use the core mask while
    exports can still show the closure.  ``points`` is the exact point set
    for purely atomic regions.
    """

    grid: Grid
    mask: np.ndarray
    padding: np.ndarray | None = None
    indicator: Callable | None = None
    points: tuple[tuple[float, float], ...] | None = None
    provenance: str = "analytic"
    notes: tuple[str, ...] = ()
    factors: tuple[ClosedSet1D, ClosedSet1D] | None = field(default=None, repr=False)

    def __post_init__(self):
        mask = _frozen(self.mask)
        if mask.shape != self.grid.shape:
            raise InvalidInputError(f"mask shape {mask.shape} does not match grid {self.grid.shape}")
        object.__setattr__(self, "mask", mask)
        if self.padding is not None:
            pad = _frozen(self.padding)
            if pad.shape != mask.shape:
                raise InvalidInputError("padding shape does not match mask")
            object.__setattr__(self, "padding", pad & ~mask)
        if self.points is not None:
            pts = tuple(sorted({(float(x), float(y)) for x, y in self.points}))
            object.__setattr__(self, "points", pts)

    # ----------------------------------------------------------- constructors
    @classmethod
    def from_indicator(cls, indicator: Callable, grid: Grid, provenance: str = "analytic", close: bool = True, notes=()) -> "Region2D":
        xx, yy = grid.mesh()
        mask = np.asarray(indicator(xx, yy), dtype=bool)
        if mask.shape != grid.shape:
            mask = np.broadcast_to(mask, grid.shape)
        padding = closure_padding(mask) if close else None
        return cls(grid, mask, padding=padding, indicator=indicator, provenance=provenance, notes=tuple(notes))

    @classmethod
    def from_points(cls, points: Iterable[tuple[float, float]], grid: Grid | None = None, provenance: str = "analytic", notes=()) -> "Region2D":
        pts = [(float(x), float(y)) for x, y in points]
        if grid is None:
            if pts:
                arr = np.asarray(pts)
                grid = Grid.from_extents((arr[:, 0].min(), arr[:, 0].max()), (arr[:, 1].min(), arr[:, 1].max()))
                pad_x = max(0.05 * (grid.x_hi - grid.x_lo), grid.hx)
                pad_y = max(0.05 * (grid.y_hi - grid.y_lo), grid.hy)
                grid = Grid.covering((grid.x_lo - pad_x, grid.x_hi + pad_x, grid.y_lo - pad_y, grid.y_hi + pad_y))
            else:
                grid = Grid.covering((0.0, 1.0, 0.0, 1.0))
        mask = np.zeros(grid.shape, dtype=bool)
        if pts:
            arr = np.asarray(pts)
            i, j, inside = grid.index(arr[:, 0], arr[:, 1])
            mask[i[inside], j[inside]] = True
        return cls(grid, mask, points=tuple(pts), provenance=provenance, notes=tuple(notes))

    # ---------------------------------------------------------------- queries
    @property
    def bbox(self):
        return self.grid.bbox

    @property
    def h(self) -> float:
        return self.grid.h

    @property
    def is_atomic(self) -> bool:
        return self.points is not None

    @property
    def is_empty(self) -> bool:
        if self.points is not None:
            return not self.points
        return not self.mask.any()

    @property
    def closed_mask(self) -> np.ndarray:
        if self.padding is None:
            return self.mask
        return self.mask | self.padding

    @property
    def area(self) -> float:
        """Area of the core mask; zero for atomic regions."""
        if self.points is not None:
            return 0.0
        return float(self.mask.sum()) * self.grid.cell_area

    @property
    def closed_area(self) -> float:
        """Area including closure padding."""
        if self.points is not None:
            return 0.0
        return float(self.closed_mask.sum()) * self.grid.cell_area

    @property
    def n_components(self) -> int:
        if self.points is not None:
            return len(self.points)
        _, n = ndimage.label(self.mask, structure=np.ones((3, 3), dtype=bool))
        return int(n)

    def contains(self, x, y, closed: bool = True) -> np.ndarray:
        """Grid membership of points (cells outside the bbox are out)."""
        i, j, inside = self.grid.index(x, y)
        mask = self.closed_mask if closed else self.mask
        return inside & mask[i, j]

    def cell_centers(self, which: str = "mask") -> np.ndarray:
        mask = {"mask": self.mask, "closed": self.closed_mask, "padding": self.padding if self.padding is not None else np.zeros_like(self.mask)}[which]
        i, j = np.nonzero(mask)
        return np.column_stack((self.grid.x_centers[i], self.grid.y_centers[j]))

    # ---------------------------------------------------------------- exports
    def to_pgm(self, path, padding_value: int = 128) -> None:
        """Write a binary PGM (P5): 255 inside, 0 outside, ``padding_value`` on closure padding.

        Image rows run from the top of the bbox (largest y) down.
        """
        img = np.zeros(self.grid.shape, dtype=np.uint8)
        if self.padding is not None and padding_value:
            img[self.padding] = padding_value
        img[self.mask] = 255
        img = np.ascontiguousarray(img.T[::-1, :])
        header = f"P5\n{self.grid.n_x} {self.grid.n_y}\n255\n".encode("ascii")
        Path(path).write_bytes(header + img.tobytes())

    def to_csv(self, path) -> None:
        """Write the centres of all closed-mask cells as ``x,y,closure_padding`` rows."""
        core = self.cell_centers("mask")
        pad = self.cell_centers("padding")
        lines = ["x,y,closure_padding"]
        lines += [f"{x:.17g},{y:.17g},0" for x, y in core]
        lines += [f"{x:.17g},{y:.17g},1" for x, y in pad]
        Path(path).write_text("\n".join(lines) + "\n")

    def to_dict(self) -> dict:
        out = {
            "provenance": self.provenance,
            "grid": self.grid.to_dict(),
            "area": self.area,
            "closed_area": self.closed_area,
            "n_cells": int(self.mask.sum()),
            "n_padding_cells": int(self.padding.sum()) if self.padding is not None else 0,
            "n_components": self.n_components,
            "notes": list(self.notes),
        }
        if self.points is not None:
            out["points"] = [list(p) for p in self.points]
        if self.factors is not None:
            out["factors"] = [f.to_dict() for f in self.factors]
        return out


def read_pgm(path) -> np.ndarray:
    """Read a P5 PGM written by :meth:`Region2D.to_pgm` back to ``[i_x, i_y]`` pixel values."""
    data = Path(path).read_bytes()
    tokens = []
    pos = 0
    while len(tokens) < 4:
        while data[pos : pos + 1].isspace():
            pos += 1
        start = pos
        while not data[pos : pos + 1].isspace():
            pos += 1
        tokens.append(data[start:pos])
    pos += 1
    if tokens[0] != b"P5":
        raise InvalidInputError(f"{path}: not a binary PGM")
    n_x, n_y = int(tokens[1]), int(tokens[2])
    img = np.frombuffer(data[pos : pos + n_x * n_y], dtype=np.uint8).reshape(n_y, n_x)
    return img[::-1, :].T.copy()


# ----------------------------------------------------------------- operations


def rasterize_axis(s: ClosedSet1D, edges_lo: float, h: float, n: int) -> np.ndarray:
    """1D cell mask of ``s`` on ``n`` cells of width ``h`` starting at ``edges_lo``.

    A cell is in when its centre lies in an interval, when it contains an
    atom, or when it contains the midpoint of an interval too short to cover
    any centre.
    """
    centers = edges_lo + (np.arange(n) + 0.5) * h
    out = np.zeros(n, dtype=bool)
    tol = 1e-9 * h
    for lo, hi in s.intervals:
        hit = (centers >= lo - tol) & (centers <= hi + tol)
        if hit.any():
            out |= hit
        else:
            k = int(np.floor((0.5 * (lo + hi) - edges_lo) / h))
            if 0 <= k < n:
                out[k] = True
    for a in s.atoms:
        k = int(np.floor((a - edges_lo) / h))
        if k == n and math.isclose(a, edges_lo + n * h, rel_tol=1e-12, abs_tol=1e-12):
            k = n - 1
        if 0 <= k < n:
            out[k] = True
    return out


def cartesian_product(a: ClosedSet1D, b: ClosedSet1D, grid: Grid | None = None, shape=DEFAULT_GRID) -> Region2D:
    """Product region ``a x b``.

    Both inputs are closed, so the result is closed as well.  Atomic inputs
    give an exact atomic region.  Without ``grid`` the product's bounding box
    (clip extents for unbounded sides) is rasterised at ``shape``.
    """
    notes = []
    for name, s in (("x", a), ("y", b)):
        if s.unbounded_left or s.unbounded_right:
            notes.append(f"{name}-support unbounded; clipped to [{s.clip_lo:g}, {s.clip_hi:g}]")
    if a.is_empty or b.is_empty:
        grid = grid or Grid.covering((0.0, 1.0, 0.0, 1.0), shape)
        pts = () if (a.is_atomic and b.is_atomic) else None
        return Region2D(grid, np.zeros(grid.shape, dtype=bool), points=pts, provenance="product", notes=tuple(notes), factors=(a, b))
    if grid is None:
        grid = Grid.from_extents(a.extent, b.extent, shape)
    if a.is_atomic and b.is_atomic:
        pts = [(x, y) for x in a.atoms for y in b.atoms]
        base = Region2D.from_points(pts, grid, provenance="product", notes=notes)
        return Region2D(grid, base.mask, points=base.points, provenance="product", notes=tuple(notes), factors=(a, b))
    mx = rasterize_axis(a, grid.x_lo, grid.hx, grid.n_x)
    my = rasterize_axis(b, grid.y_lo, grid.hy, grid.n_y)
    return Region2D(grid, np.outer(mx, my), provenance="product", notes=tuple(notes), factors=(a, b))


class Witness(NamedTuple):
    x: float
    y: float
    in_first: bool
    in_second: bool


@dataclass(frozen=True)
class ComparisonReport:
    """Outcome of comparing two regions.

    ``sym_diff_measure`` is an area for gridded regions and a point count
    for atomic ones (``measure_kind`` says which).
    """

    equal_within_tol: bool
    sym_diff_measure: float
    hausdorff: float
    witnesses: tuple[Witness, ...]
    tol_area: float
    tol_dist: float
    measure_kind: str = "area"

    def to_dict(self) -> dict:
        return {
            "equal_within_tol": self.equal_within_tol,
            "sym_diff_measure": self.sym_diff_measure,
            "measure_kind": self.measure_kind,
            "hausdorff": _json_float(self.hausdorff),
            "tol_area": self.tol_area,
            "tol_dist": self.tol_dist,
            "witnesses": [w._asdict() for w in self.witnesses],
        }


def _json_float(v: float):
    return v if math.isfinite(v) else None


def _compare_points(p: Region2D, q: Region2D, tol_area, tol_dist, k) -> ComparisonReport:
    tol_area = 0.0 if tol_area is None else tol_area
    tol_dist = 1e-9 if tol_dist is None else tol_dist
    a = np.asarray(p.points, dtype=float).reshape(-1, 2)
    b = np.asarray(q.points, dtype=float).reshape(-1, 2)
    if len(a) == 0 and len(b) == 0:
        return ComparisonReport(True, 0.0, 0.0, (), tol_area, tol_dist, "count")
    if len(a) == 0 or len(b) == 0:
        only = [Witness(x, y, len(a) > 0, len(b) > 0) for x, y in (a if len(a) else b)[:k]]
        return ComparisonReport(False, float(len(a) + len(b)), math.inf, tuple(only), tol_area, tol_dist, "count")
    da, _ = cKDTree(b).query(a)
    db, _ = cKDTree(a).query(b)
    match_tol = max(tol_dist, 1e-12)
    only_a = a[da > match_tol]
    only_b = b[db > match_tol]
    haus = float(max(da.max(), db.max()))
    wit = [Witness(float(x), float(y), True, False) for x, y in only_a] + [Witness(float(x), float(y), False, True) for x, y in only_b]
    sym = float(len(only_a) + len(only_b))
    equal = sym <= tol_area and haus <= tol_dist
    return ComparisonReport(equal, sym, haus, tuple(wit[:k]), tol_area, tol_dist, "count")


def _directed_dist(src: np.ndarray, dst: np.ndarray, sampling) -> np.ndarray:
    """Distance from each cell to the nearest ``dst`` cell (``inf`` if none)."""
    if not dst.any():
        return np.full(src.shape, np.inf)
    return ndimage.distance_transform_edt(~dst, sampling=sampling)


def region_compare(p: Region2D, q: Region2D, tol_area: float | None = None, tol_dist: float | None = None, k: int = 10) -> ComparisonReport:
    """Compare two regions on a common aligned grid.

    Defaults: ``tol_area = 10 * cell_area`` and ``tol_dist = 2 * h`` on grids;
    exact matching (count tolerance 0) for two atomic regions.
    """
    if p.is_atomic and q.is_atomic:
        return _compare_points(p, q, tol_area, tol_dist, k)
    if p.is_atomic:
        p = Region2D.from_points(p.points, q.grid, provenance=p.provenance)
        p = Region2D(p.grid, p.mask, provenance=p.provenance)
    if q.is_atomic:
        q = Region2D.from_points(q.points, p.grid, provenance=q.provenance)
        q = Region2D(q.grid, q.mask, provenance=q.provenance)
    if p.grid == q.grid:
        grid, mp, mq = p.grid, p.mask, q.mask
    else:
        if not p.grid.is_aligned(q.grid):
            raise InvalidInputError(f"cannot compare regions: grid resolution mismatch ({p.grid.hx:g}x{p.grid.hy:g} vs {q.grid.hx:g}x{q.grid.hy:g}) or misaligned cells")
        grid = p.grid.union(q.grid)
        mp, mq = p.grid.embed(p.mask, grid), q.grid.embed(q.mask, grid)
    tol_area = 10.0 * grid.cell_area if tol_area is None else tol_area
    tol_dist = 2.0 * grid.h if tol_dist is None else tol_dist

    diff = mp ^ mq
    sym = float(diff.sum()) * grid.cell_area
    if not mp.any() and not mq.any():
        return ComparisonReport(True, 0.0, 0.0, (), tol_area, tol_dist)
    sampling = (grid.hx, grid.hy)
    to_q = _directed_dist(mp, mq, sampling)
    to_p = _directed_dist(mq, mp, sampling)
    haus = 0.0
    if mp.any():
        haus = max(haus, float(to_q[mp].max()))
    if mq.any():
        haus = max(haus, float(to_p[mq].max()))

    witnesses: list[Witness] = []
    if diff.any():
        i, j = np.nonzero(diff)
        dist = np.where(mp[i, j], to_q[i, j], to_p[i, j])
        order = np.argsort(-dist, kind="stable")[:k]
        xc, yc = grid.x_centers, grid.y_centers
        witnesses = [Witness(float(xc[i[o]]), float(yc[j[o]]), bool(mp[i[o], j[o]]), bool(mq[i[o], j[o]])) for o in order]
    equal = sym <= tol_area and haus <= tol_dist
    return ComparisonReport(equal, sym, haus, tuple(witnesses), tol_area, tol_dist)
