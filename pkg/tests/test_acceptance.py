"""Acceptance gate: one test per criterion, each printing a PASS/FAIL line.

Reference values come from closed forms computed here (areas, densities,
ratios of Beta moments) or from the independent Monte Carlo pushforward,
never from the code under test.
"""

import math
import time

import numpy as np
import pytest
from scipy import stats

from supportfactor.bundles import example9_monte_carlo, iid_table, srs_table, SRS_CONFLICT_NOTE, bundle_example8_srs
from supportfactor.distributions import (
    DiscreteJoint,
    beta_bernoulli_joint,
    canonical_pdf_1d,
    canonical_pdf_2d,
    cantor,
    cantor_cdf,
    exponential,
    normal,
    uniform,
)
from supportfactor.exceptions import NumericError
from supportfactor.independence import (
    DEPENDENT,
    DEPENDENT_BY_SUPPORT,
    INCONCLUSIVE,
    INDEPENDENT,
    cdf_factorization_probe,
    check,
    continuous_factorization_probe,
    discrete_factorization_oracle,
)
from supportfactor.registry import PMF_BUILDERS, darts_uniform, example7, example9, example9_region, get_pmf
from supportfactor.sets import Region2D, closure1d, region_compare
from supportfactor.support import points_of_increase_1d, support_continuous_1d, support_discrete


def test_darts_gap(criterion):
    t0 = time.perf_counter()
    _, verdict = check(darts_uniform(), oracle="none", grid=512)
    elapsed = time.perf_counter() - t0
    h = 2 / 512
    err = abs(verdict.gap - (4 - math.pi))
    ok = err <= 10 * h and verdict.screening == DEPENDENT_BY_SUPPORT and elapsed < 5
    criterion(1, ok, f"gap {verdict.gap:.6f} vs 4-pi {4 - math.pi:.6f}, err {err:.2e} <= {10 * h:.2e}; {verdict.screening}; {elapsed:.2f}s < 5s")


def test_example7_density_gap(criterion):
    t0 = time.perf_counter()
    j = example7("identity", "identity")
    _, verdict = check(j, oracle="none", grid=512)
    w = continuous_factorization_probe(j, probe_points=[(0.1, 0.1)], tol=0.1).witnesses[0]
    elapsed = time.perf_counter() - t0
    # f = x + y on the unit square; f_X(x) = x + 1/2
    lhs_ref, rhs_ref = 0.2, 0.6 * 0.6
    resid = abs(w["lhs"] - w["rhs"])
    ok = (
        verdict.screening == INCONCLUSIVE
        and resid >= 0.1
        and abs(w["lhs"] - lhs_ref) < 1e-9
        and abs(w["rhs"] - rhs_ref) < 1e-6
        and elapsed < 2
    )
    criterion(2, ok, f"{verdict.screening}; f_XY(0.1,0.1)={w['lhs']:.6f} vs f_X f_Y={w['rhs']:.6f}, |diff| {resid:.3f} >= 0.1; {elapsed:.2f}s < 2s")


def test_example8_tables(criterion):
    t0 = time.perf_counter()
    _, iid = check(iid_table(), oracle="exact")
    iid_res = discrete_factorization_oracle(iid_table())
    _, srs = check(srs_table(), oracle="exact")
    srs_res = discrete_factorization_oracle(srs_table())
    doc = bundle_example8_srs()
    elapsed = time.perf_counter() - t0
    worst = srs_res.worst
    support_w = sorted((w["x"], w["y"]) for w in srs.witnesses if w["kind"] == "support")
    ok = (
        iid.screening == INCONCLUSIVE
        and iid.oracle == INDEPENDENT
        and iid_res.max_residual <= 1e-12
        and srs.oracle == DEPENDENT
        and (worst["x"], worst["y"]) == (4.0, 4.0)
        and abs(abs(worst["lhs"] - worst["rhs"]) - 1 / 9) < 1e-12
        and srs.screening == DEPENDENT_BY_SUPPORT
        and support_w == [(4.0, 4.0), (5.0, 5.0), (7.0, 7.0)]
        and SRS_CONFLICT_NOTE in doc["notes"]
        and elapsed < 1
    )
    criterion(
        3,
        ok,
        f"IID {iid.screening}/{iid.oracle} residual {iid_res.max_residual:.1e}; "
        f"SRS {srs.screening}/{srs.oracle} worst ({worst['x']:g},{worst['y']:g}) residual {abs(worst['lhs'] - worst['rhs']):.6f}, "
        f"support witnesses {support_w}; conflict note emitted; {elapsed:.2f}s < 1s",
    )


def test_example9_pushforward(criterion):
    t0 = time.perf_counter()
    clip = 8.0
    report, verdict = check(example9(clip), oracle="none", grid=512)
    region = report.s_xy
    analytic = Region2D.from_indicator(example9_region, region.grid)
    area = 0.5 + math.log(clip)  # integral of min(y1, 1/y1) over (0, clip]
    sym = region_compare(region, analytic).sym_diff_measure
    mc = example9_monte_carlo(region, 10**6, seed=0, clip=clip)
    elapsed = time.perf_counter() - t0
    checks = {
        "analytic": sym <= 0.02 * area,
        "monte carlo": mc["sym_diff_mc"] <= 0.02 * area,
        "verdict": verdict.screening == DEPENDENT_BY_SUPPORT,
        "corr": abs(mc["corr_y1_y2"] + 0.13) <= 0.02,
        "runtime": elapsed < 30,
    }
    failed = [k for k, v in checks.items() if not v]
    criterion(
        4,
        not failed,
        f"sym diff vs closed form {sym / area:.4f} of area, vs MC oracle {mc['sym_diff_mc'] / area:.4f} (<= 0.02); "
        f"{verdict.screening}; corr {mc['corr_y1_y2']:.4f} vs -0.13 +/- 0.02; {elapsed:.1f}s < 30s"
        + (f"; failing: {', '.join(failed)}" if failed else ""),
    )


def test_cantor_staircase(criterion):
    t0 = time.perf_counter()
    levels = 10
    c = cantor_cdf(levels)
    plateaus = c.plateaus()
    mids = np.array([0.5 * (lo + hi) for lo, hi in plateaus])
    # central difference with a step inside the narrowest removed third
    deriv = np.asarray(canonical_pdf_1d(c, mids, step=0.25 * 3.0**-levels))
    grid_n = 2049
    h = 1.0 / (grid_n - 1)
    poi = points_of_increase_1d(c, (0.0, 1.0), grid_n)
    haus = poi.hausdorff(closure1d([(0.0, 1.0)], clip=(0.0, 1.0)))
    elapsed = time.perf_counter() - t0
    checks = {
        "plateaus": len(plateaus) == 2**levels - 1,
        "derivative": float(np.max(np.abs(deriv))) == 0.0,
        "hausdorff": haus <= 4 * h,
        "runtime": elapsed < 5,
    }
    failed = [k for k, v in checks.items() if not v]
    criterion(
        5,
        not failed,
        f"{len(plateaus)} plateaus; max derivative on removed thirds {float(np.max(np.abs(deriv))):g}; "
        f"Hausdorff(points of increase, [0,1]) {haus:.4f} vs 4h {4 * h:.4f}; {elapsed:.2f}s < 5s"
        + (f"; failing: {', '.join(failed)}" if failed else ""),
    )


def _random_outer(rng) -> DiscreteJoint:
    nx, ny = rng.integers(2, 7, size=2)
    xs = np.sort(rng.choice(np.arange(-20, 21), nx, replace=False)).astype(float)
    ys = np.sort(rng.choice(np.arange(-20, 21), ny, replace=False)).astype(float)
    px, py = rng.dirichlet(np.ones(nx)), rng.dirichlet(np.ones(ny))
    return DiscreteJoint.from_arrays(np.repeat(xs, ny), np.tile(ys, nx), np.outer(px, py).ravel())


def _random_dependent(rng) -> DiscreteJoint:
    j = _random_outer(rng)
    probs = j.probs.copy()
    k = int(rng.integers(1, max(2, probs.size // 2)))
    probs[rng.choice(probs.size, k, replace=False)] = 0.0
    return DiscreteJoint.from_arrays(j.xs, j.ys, probs / math.fsum(probs))


def test_soundness_sweep(criterion):
    t0 = time.perf_counter()
    rng = np.random.default_rng(20240601)
    screened = independent = 0
    for _ in range(200):
        _, v = check(_random_outer(rng), oracle="exact")
        screened += v.screening == DEPENDENT_BY_SUPPORT
        independent += v.oracle == INDEPENDENT
    contradictions = 0
    for _ in range(200):
        try:
            _, v = check(_random_dependent(rng), oracle="exact")
        except NumericError:
            contradictions += 1
            continue
        contradictions += v.oracle == INDEPENDENT and v.screening == DEPENDENT_BY_SUPPORT
    elapsed = time.perf_counter() - t0
    ok = screened == 0 and independent == 200 and contradictions == 0 and elapsed < 10
    criterion(
        6,
        ok,
        f"outer products: {screened} DependentBySupport, {independent}/200 Independent; "
        f"zeroed-cell joints: {contradictions} contradictions; {elapsed:.2f}s < 10s",
    )


def test_canonical_pdf_numerics(criterion):
    xs = np.linspace(-4, 4, 801)
    dens = np.asarray(canonical_pdf_1d(stats.norm.cdf, xs))
    normal_err = float(np.max(np.abs(dens - stats.norm.pdf(xs))))
    kink = float(np.asarray(canonical_pdf_1d(lambda t: np.where(t > 0, -np.expm1(-np.maximum(t, 0)), 0.0), np.array([0.0])))[0])

    def F(x, y):
        return np.clip(x, 0, 1) * np.clip(y, 0, 1)

    rng = np.random.default_rng(7)
    pts = rng.uniform(0.05, 0.95, size=(50, 2))
    mixed = np.asarray(canonical_pdf_2d(F, pts[:, 0], pts[:, 1]))
    unif_err = float(np.max(np.abs(mixed - 1.0)))
    ok = normal_err <= 1e-6 and kink == 0.0 and unif_err <= 1e-4
    criterion(7, ok, f"normal max error {normal_err:.2e} <= 1e-6; exponential at 0 -> {kink:g}; uniform mixed partial max error {unif_err:.2e} <= 1e-4")


def test_equivalence_battery(criterion):
    rows = []
    for u in (uniform(), exponential(1.0), normal(0.0, 1.0, clip=8.0), cantor(10)):
        poi = points_of_increase_1d(u)
        fine = 3**11 + 1 if u.name.startswith("cantor") else 2049
        closure = support_continuous_1d(u, grid_n=fine)
        h = (poi.clip_hi - poi.clip_lo) / 2048
        rows.append((u.name, poi.hausdorff(closure), h))
    for name in PMF_BUILDERS:
        m = get_pmf(name)
        poi = points_of_increase_1d(m)
        h = (poi.clip_hi - poi.clip_lo) / 2048
        rows.append((name, poi.hausdorff(support_discrete(m)), h))
    bad = [name for name, d, h in rows if not d <= 2 * h]
    criterion(8, not bad, "; ".join(f"{n}: {d:.2e} <= {2 * h:.2e}" for n, d, h in rows) + (f"; failing: {bad}" if bad else ""))


def test_beta_bernoulli(criterion):
    pairs = ((1.0, 1.0), (2.0, 1.0), (0.5, 0.5), (3.0, 7.0), (0.2, 5.0))
    errs = [abs(beta_bernoulli_joint(a, b).level_weight(1.0) - a / (a + b)) for a, b in pairs]
    dist = beta_bernoulli_joint(1.0, 1.0)
    _, verdict = check(dist, oracle="none")
    probe = cdf_factorization_probe(dist.cdf, lambda v: dist.marginal_cdf("x", v), lambda v: dist.marginal_cdf("y", v), [(0.5, 0.5)])
    w = probe.worst
    ok = (
        max(errs) <= 1e-9
        and verdict.screening == INCONCLUSIVE
        and probe.outcome == DEPENDENT
        and abs(w["lhs"] - 3 / 8) < 1e-6
        and abs(w["rhs"] - 1 / 4) < 1e-6
    )
    criterion(9, ok, f"max |P(Y=1) - a/(a+b)| {max(errs):.1e} <= 1e-9; {verdict.screening}; F_XY(.5,.5)={w['lhs']:.6f} vs F_X F_Y={w['rhs']:.6f} -> {probe.outcome}")
