"""End-to-end acceptance checks; each test carries the criterion it decides."""

import math
import time

import numpy as np
import pytest

from lawson_kdv.harness import (
    IDENTITY_TOLERANCES,
    approximation_errors,
    cfl_sweep,
    convergence_study,
    fit_slope,
    identity_suite,
)
from lawson_kdv.problems import ReferenceTruth, pulse_initial, pulse_problem, soliton_exact, soliton_problem
from lawson_kdv.scheme import SchemeParams, defect_study, evolve
from lawson_kdv.spectral_core import Field, Grid, norm, propagate_airy

SIZES = (4, 16, 64, 256)
DISCRETE_IDENTITIES = [k for k in IDENTITY_TOLERANCES if k not in ("airy_isometry", "parseval")]


@pytest.fixture(scope="module")
def suite():
    start = time.perf_counter()
    report = identity_suite(seed=20240601, sizes=SIZES, trials=100, check=False)
    return report, time.perf_counter() - start


@pytest.mark.criterion(1, "discrete identities, residual <= 1e-12 over 100 vectors per N, < 10 s")
def test_identity_suite(suite, record_property):
    report, elapsed = suite
    worst = max(report.worst(name) for name in DISCRETE_IDENTITIES)
    record_property("measured", f"worst residual {worst:.2e}, {elapsed:.2f} s")
    assert {r.N for r in report.rows} == set(SIZES)
    assert worst <= 1e-12
    assert elapsed < 10.0


@pytest.mark.criterion(2, "Airy propagator isometry and Parseval, deviation <= 1e-13")
def test_isometry_and_parseval(suite, record_property):
    report, _ = suite
    worst = max(report.worst("airy_isometry"), report.worst("parseval"))
    # independent draws and propagation times on top of the suite's fixed t
    rng = np.random.default_rng(7)
    for N in SIZES:
        g = Grid(N, 30.0)
        for t in (1e-3, 0.5, 17.0):
            u = Field(g, rng.uniform(-1, 1, g.size))
            l2 = norm(u, "l2")
            worst = max(worst,
                        abs(norm(propagate_airy(u, t), "l2") - l2) / l2,
                        abs(norm(u, "discrete") - l2) / l2)
    record_property("measured", f"worst deviation {worst:.2e}")
    assert worst <= 1e-13


@pytest.mark.criterion(3, "mean conservation over 10^4 soliton steps")
def test_mean_conservation(record_property):
    g = Grid.from_h(30.0, 1 / 40)
    u0 = soliton_problem().initial_field(g)
    tau = g.h / 4
    res = evolve(u0, SchemeParams(tau=tau, c=4.0, final_time=10_000 * tau))
    tol = 1e-11 * (1 + norm(u0, "linf"))
    record_property("measured", f"drift {res.mean_drift:.2e} (tol {tol:.1e})")
    assert res.steps_taken == 10_000 and not res.blew_up
    assert res.mean_drift <= tol


@pytest.mark.slow
@pytest.mark.criterion(4, "soliton convergence slope in [0.8, 1.2], h = 1/40..1/640, < 5 min")
def test_soliton_convergence(record_property):
    start = time.perf_counter()
    table = convergence_study(soliton_problem(), c=4.0, T=2.0,
                              h_sequence=[1 / 40, 1 / 80, 1 / 160, 1 / 320, 1 / 640])
    elapsed = time.perf_counter() - start
    slope = table.fitted_slope
    record_property("measured", f"slope {slope:.3f}, {elapsed:.0f} s")
    assert len(table.stable_rows) == 5
    errors = [r.l2_error for r in table.rows]
    assert all(a > b for a, b in zip(errors, errors[1:]))
    assert 0.8 <= slope <= 1.2
    assert elapsed < 300


@pytest.mark.criterion(5, "defect drops by a factor in [3.4, 4.6] under joint halving")
def test_defect_scaling(record_property):
    p = soliton_problem()
    grids = [Grid.from_h(p.L, h) for h in (1 / 8, 1 / 16, 1 / 32, 1 / 64)]
    report = defect_study(lambda x, t: soliton_exact(x, t), grids, [g.h / 4 for g in grids], c=4.0)
    ratios = report.ratios()
    record_property("measured", "ratios " + ", ".join(f"{r:.3f}" for r in ratios))
    assert len(ratios) == 3
    assert np.all((ratios >= 3.4) & (ratios <= 4.6))


@pytest.mark.criterion(6, "CFL sharpness on the soliton run")
@pytest.mark.filterwarnings("ignore::UserWarning")
def test_cfl_sharpness(record_property):
    prob = soliton_problem()
    stable = cfl_sweep(prob, [4.0], [0.25], [1 / 40, 1 / 160], T=2.0)
    unstable = cfl_sweep(prob, [4.0], [0.75], [1 / 40, 1 / 160], T=2.0)
    low_c = cfl_sweep(prob, [2.0], [0.5], [1 / 320], T=2.0)
    record_property(
        "measured",
        "c=4,d=3/4 blow-up steps " + ", ".join(str(e.blowup_step) for e in unstable.entries)
        + f"; c=2,d=1/2,h=1/320 at step {low_c.entries[0].blowup_step}",
    )
    assert all(e.stable for e in stable.entries)
    assert not any(e.stable for e in unstable.entries)
    assert not low_c.entries[0].stable


@pytest.mark.slow
@pytest.mark.criterion(7, "pulse convergence slope in [0.8, 1.2] against the reference solution")
def test_pulse_convergence(record_property):
    ref = ReferenceTruth(pulse_initial, math.pi)
    table = convergence_study(pulse_problem(ref), c=3.0, T=3.0,
                              h_sequence=[math.pi / 2**k for k in range(10, 14)],
                              tau_rule=lambda h: h / math.pi)
    slope = table.fitted_slope
    # the reference must be far more accurate than the finest first-order run
    check = ReferenceTruth(pulse_initial, math.pi, N=ref.grid.N, tau=ref.tau / 2)
    ref_gap = norm(ref.solution(3.0) - check.solution(3.0), "discrete")
    finest = min(r.l2_error for r in table.rows)
    record_property("measured", f"slope {slope:.3f}, reference gap {ref_gap:.1e} vs finest error {finest:.1e}")
    assert len(table.stable_rows) == 4
    assert ref_gap < 1e-3 * finest
    assert 0.8 <= slope <= 1.2


@pytest.mark.criterion(8, "projection and interpolation slopes >= 2.8 on the sampled soliton")
def test_approximation_rates(record_property):
    r = approximation_errors(lambda x: soliton_exact(x, 0.0), 30.0, [8, 16, 32, 64], 1024)
    slopes = {k: fit_slope(zip(r["h"], r[k])) for k in ("projection", "interpolation")}
    record_property("measured", ", ".join(f"{k} {v:.2f}" for k, v in slopes.items()))
    assert min(slopes.values()) >= 2.8
