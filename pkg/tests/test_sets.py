import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from supportfactor.exceptions import InvalidInputError
from supportfactor.sets import (
    ClosedSet1D,
    Grid,
    RawInterval,
    Region2D,
    cartesian_product,
    closure1d,
    limit_points1d,
    read_pgm,
    region_compare,
)


def test_open_interval_closes():
    s = closure1d(["(0, 1)"])
    assert s.intervals == ((0.0, 1.0),)
    assert s.contains([0.0, 1.0]).all()


def test_union_merges_touching_pieces():
    s = closure1d([(0, 1), "(1, 2]", (5, 6)], atoms=[0.5, 3.0])
    assert s.intervals == ((0.0, 2.0), (5.0, 6.0))
    assert s.atoms == (3.0,)


def test_empty_open_interval_dropped():
    assert closure1d(["(2, 2)"]).is_empty


def test_degenerate_closed_interval_becomes_atom():
    s = closure1d(["[2, 2]"])
    assert s.atoms == (2.0,) and s.intervals == ()


def test_infinite_endpoint_clipped_and_flagged():
    s = closure1d(["[0, inf)"], clip=(-10, 10))
    assert s.intervals == ((0.0, 10.0),)
    assert s.unbounded_right and not s.unbounded_left


def test_bad_intervals_rejected():
    with pytest.raises(InvalidInputError):
        RawInterval.parse("0, 1")
    with pytest.raises(InvalidInputError):
        closure1d([(2, 1)])


def test_declared_limit_point_is_added():
    atoms = [2.0**-k for k in range(1, 30)]
    s = closure1d(atoms=atoms, limit_points=[0.0])
    assert 0.0 in s.atoms


def test_limit_point_candidates_for_dyadic_sequence():
    atoms = [2.0**-k for k in range(1, 41)]
    lp = limit_points1d(atoms)
    assert lp.exact == ()
    assert len(lp.candidates) == 1 and abs(lp.candidates[0]) < 1e-9


def test_no_candidates_for_spread_points():
    assert limit_points1d([1.0, 2.0, 3.0, 4.0, 5.0, 6.0]).candidates == ()


def test_hausdorff_and_sym_diff_exact():
    a = closure1d([(0, 1)])
    b = closure1d([(0, 1)], atoms=[3.0])
    assert a.hausdorff(b) == pytest.approx(2.0)
    assert closure1d([(0, 1)]).sym_diff_measure(closure1d([(0.5, 2)])) == pytest.approx(1.5)


def test_dict_round_trip():
    s = closure1d(["[0, inf)", (-3, -2)], atoms=[-5.0])
    assert ClosedSet1D.from_dict(s.to_dict()) == s


def _disk(x, y):
    return x * x + y * y <= 1.0


def test_unit_disk_closed_area_converges_monotonically():
    areas = []
    for n in (64, 128, 256, 512):
        grid = Grid.covering((-1.0, 1.0, -1.0, 1.0), n)
        r = Region2D.from_indicator(_disk, grid)
        areas.append(r.closed_area)
        # the padded mask covers the disk, so its area is an upper bound within a band of cells
        assert math.pi <= r.closed_area <= math.pi + 8 * grid.h * 2 * math.pi
    assert all(a >= b for a, b in zip(areas, areas[1:]))
    assert abs(areas[-1] - math.pi) <= 8 * (2 / 512) * 2 * math.pi


def test_disk_vs_square_comparison():
    grid = Grid.covering((-1.0, 1.0, -1.0, 1.0), 512)
    disk = Region2D.from_indicator(_disk, grid)
    square = cartesian_product(closure1d([(-1, 1)]), closure1d([(-1, 1)]), grid=grid)
    cmp = region_compare(disk, square)
    assert not cmp.equal_within_tol
    assert cmp.sym_diff_measure == pytest.approx(4 - math.pi, abs=10 * grid.h)
    # farthest corner point from the disk is sqrt(2) - 1 away
    assert cmp.hausdorff == pytest.approx(math.sqrt(2) - 1, abs=2 * grid.h)
    assert len(cmp.witnesses) > 0


def test_product_with_atoms_counts_components():
    a = closure1d([(0, 1)], atoms=[2.0])
    b = closure1d(atoms=[0.0, 1.0])
    r = cartesian_product(a, b, shape=256)
    assert r.n_components == 4


def test_atomic_regions_compare_by_count():
    pts = [(4.0, 5.0), (4.0, 7.0), (5.0, 4.0), (5.0, 7.0), (7.0, 4.0), (7.0, 5.0)]
    joint = Region2D.from_points(pts)
    vals = (4.0, 5.0, 7.0)
    prod = Region2D.from_points([(a, b) for a in vals for b in vals])
    cmp = region_compare(joint, prod)
    assert cmp.measure_kind == "count" and cmp.sym_diff_measure == 3
    assert sorted((w.x, w.y) for w in cmp.witnesses) == [(4.0, 4.0), (5.0, 5.0), (7.0, 7.0)]


def test_pgm_round_trip(tmp_path):
    grid = Grid.covering((-1.0, 1.0, -1.0, 1.0), 32)
    r = Region2D.from_indicator(_disk, grid)
    r.to_pgm(tmp_path / "m.pgm")
    img = read_pgm(tmp_path / "m.pgm")
    assert img.shape == (32, 32)
    assert int((img == 255).sum()) == int(r.mask.sum())


finite = st.floats(min_value=-20, max_value=20, allow_nan=False)
pair = st.tuples(finite, finite).map(lambda t: (min(t), max(t)))
sets_1d = st.builds(
    lambda iv, at: closure1d(iv, atoms=at),
    st.lists(pair, max_size=5),
    st.lists(finite, max_size=5),
)


@settings(max_examples=150, deadline=None)
@given(sets_1d)
def test_closure_is_idempotent(s):
    assert closure1d(s.intervals, atoms=s.atoms) == s


@settings(max_examples=150, deadline=None)
@given(sets_1d, sets_1d)
def test_hausdorff_symmetric_and_zero_on_self(a, b):
    if a.is_empty or b.is_empty:
        return
    assert a.hausdorff(a) == 0.0
    assert a.hausdorff(b) == pytest.approx(b.hausdorff(a))


@settings(max_examples=40, deadline=None)
@given(st.lists(pair, min_size=1, max_size=3), st.lists(pair, min_size=1, max_size=3))
def test_product_contains_exactly_pairs_of_members(ix, iy):
    a, b = closure1d(ix), closure1d(iy)
    r = cartesian_product(a, b, shape=64)
    rng = np.random.default_rng(0)
    x0, x1, y0, y1 = r.grid.bbox
    xs, ys = rng.uniform(x0, x1, 200), rng.uniform(y0, y1, 200)
    got = r.contains(xs, ys, closed=True)
    # only points well clear of every edge have a resolution-independent answer
    far = (a.distance(xs) > 2 * r.grid.hx) | (b.distance(ys) > 2 * r.grid.hy)
    deep = (_depth(a, xs) > 2 * r.grid.hx) & (_depth(b, ys) > 2 * r.grid.hy)
    assert not got[far].any()
    assert got[deep].all()


def _depth(s, v):
    out = np.zeros_like(v)
    for lo, hi in s.intervals:
        out = np.maximum(out, np.minimum(v - lo, hi - v))
    return out
