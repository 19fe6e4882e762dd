"""Experiment drivers: convergence studies, CFL sweeps, the discrete identity suite.

All studies return plain tables that can be written to CSV; nothing here plots.
"""

from __future__ import annotations

import csv
import io
import math
import os
import tempfile
import time
from dataclasses import dataclass, field
from typing import Callable, Iterable, Optional, Sequence

import numpy as np

from .problems import Problem, error_report
from .scheme import SchemeParams, evolve
from .spectral_core import (
    Field,
    Grid,
    ParameterError,
    bernstein_constant,
    centered_difference,
    forward_difference,
    norm,
    pad,
    project,
    propagate_airy,
    second_difference,
    sobolev_norm,
    sup_norm,
    to_spectrum,
)

__all__ = [
    "NoDataError",
    "IdentityCheckError",
    "ConvergenceRow",
    "ConvergenceTable",
    "StabilityEntry",
    "StabilityMap",
    "IdentityRow",
    "IdentityReport",
    "fit_slope",
    "convergence_study",
    "cfl_sweep",
    "identity_suite",
    "approximation_errors",
    "write_csv_atomic",
    "IDENTITY_TOLERANCES",
]


class NoDataError(RuntimeError):
    """Every run of a study blew up; nothing to fit."""


class IdentityCheckError(AssertionError):
    def __init__(self, report: "IdentityReport"):
        failed = [r for r in report.rows if not r.passed]
        lines = [
            f"{r.identity_name}: N={r.N} seed={r.seed} residual={r.max_rel_residual:.3e}"
            for r in failed
        ]
        super().__init__("discrete identity check failed:\n  " + "\n  ".join(lines))
        self.report = report


def fit_slope(rows: Iterable[tuple[float, float]]) -> float:
    """Least-squares slope of log(error) against log(h)."""
    pairs = np.asarray(list(rows), dtype=float)
    if pairs.ndim != 2 or pairs.shape[0] < 2:
        raise ValueError("need at least two (h, error) pairs")
    if np.any(~np.isfinite(pairs)) or np.any(pairs <= 0):
        raise ValueError("h and error values must be positive and finite")
    slope, _ = np.polyfit(np.log(pairs[:, 0]), np.log(pairs[:, 1]), 1)
    return float(slope)


def _fmt(x) -> str:
    if x is None:
        return ""
    if isinstance(x, (bool, np.bool_)):
        return "true" if x else "false"
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    return f"{float(x):.16e}"


def write_csv_atomic(path, header: Sequence[str], rows: Iterable[Sequence]) -> None:
    """Write CSV to a temporary file in the target directory, then rename over ``path``."""
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow([v if isinstance(v, str) else _fmt(v) for v in row])
    directory = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".tmp-", suffix=".csv")
    try:
        with os.fdopen(fd, "w", newline="") as fh:
            fh.write(buf.getvalue())
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


# -- convergence -----------------------------------------------------------------


@dataclass
class ConvergenceRow:
    N: int
    h: float
    tau: float
    c: float
    T: float
    l2_error: float
    linf_error: float
    blew_up: bool
    blowup_step: Optional[int]


CONVERGENCE_HEADER = (
    "experiment_id", "N", "h", "tau", "c", "T", "l2_error", "linf_error", "blew_up", "blowup_step",
)


@dataclass
class ConvergenceTable:
    experiment_id: str
    rows: list = field(default_factory=list)
    metadata: dict = field(default_factory=dict)

    @property
    def stable_rows(self) -> list:
        return [r for r in self.rows if not r.blew_up]

    @property
    def fitted_slope(self) -> Optional[float]:
        """Slope over stable rows; None with fewer than two."""
        stable = self.stable_rows
        if len(stable) < 2:
            return None
        return fit_slope((r.h, r.l2_error) for r in stable)

    def to_csv(self, path) -> None:
        write_csv_atomic(
            path,
            CONVERGENCE_HEADER,
            (
                (self.experiment_id, r.N, r.h, r.tau, r.c, r.T, r.l2_error, r.linf_error,
                 r.blew_up, r.blowup_step)
                for r in self.rows
            ),
        )


def _tau_for(h: float, c: float, tau_rule) -> float:
    if tau_rule is None:
        return h / c
    if callable(tau_rule):
        return float(tau_rule(h))
    return float(tau_rule) * h


def convergence_study(
    problem: Problem,
    c: float,
    T: float,
    h_sequence: Sequence[float],
    tau_rule: Callable[[float], float] | float | None = None,
    experiment_id: Optional[str] = None,
    blowup_threshold: float = 1e6,
) -> ConvergenceTable:
    """Run the scheme at each requested mesh size and tabulate errors at time T.

    ``tau_rule`` is a callable h -> tau, a number d (tau = d*h), or None for
    tau = h/c. A requested h is realised by the smallest odd grid with mesh size
    <= h; the achieved h enters the table.
    """
    hs = [float(h) for h in h_sequence]
    if len(hs) < 3:
        raise ParameterError("a convergence study needs at least three mesh sizes")
    if any(b >= a for a, b in zip(hs, hs[1:])):
        raise ParameterError("h_sequence must be strictly decreasing")
    table = ConvergenceTable(
        experiment_id or f"{problem.name}-c{c:g}-T{T:g}",
        metadata=dict(problem.metadata, L=problem.L),
    )
    for h_req in hs:
        grid = Grid.from_h(problem.L, h_req)
        tau = _tau_for(grid.h, c, tau_rule)
        result = evolve(problem.initial_field(grid),
                        SchemeParams(tau=tau, c=c, final_time=T, blowup_threshold=blowup_threshold))
        if result.blew_up:
            l2 = linf = math.nan
        else:
            rep = error_report(result.final, problem.truth(grid, T), T, result.tau)
            l2, linf = rep.l2_error, rep.linf_error
        table.rows.append(ConvergenceRow(grid.N, grid.h, result.tau, c, T, l2, linf,
                                         result.blew_up, result.blowup_step))
    if not table.stable_rows:
        raise NoDataError(f"all {len(hs)} runs of {table.experiment_id} blew up")
    return table


# -- CFL sweeps ------------------------------------------------------------------


@dataclass
class StabilityEntry:
    c: float
    d: float
    h: float
    tau: float
    stable: bool
    blowup_step: Optional[int]


STABILITY_HEADER = ("c", "d", "h", "tau", "stable", "blowup_step")


@dataclass
class StabilityMap:
    entries: list = field(default_factory=list)

    def lookup(self, c: float, d: float, h: float) -> StabilityEntry:
        for e in self.entries:
            if math.isclose(e.c, c) and math.isclose(e.d, d) and math.isclose(e.h, h, rel_tol=0.05):
                return e
        raise KeyError((c, d, h))

    def to_csv(self, path) -> None:
        write_csv_atomic(
            path,
            STABILITY_HEADER,
            ((e.c, e.d, e.h, e.tau, e.stable, e.blowup_step) for e in self.entries),
        )


def cfl_sweep(
    problem: Problem,
    c_values: Sequence[float],
    d_values: Sequence[float],
    h_values: Sequence[float],
    T: float,
    blowup_threshold: float = 1e6,
) -> StabilityMap:
    """One run per (c, d, h) with tau = d*h; records whether it reached T."""
    smap = StabilityMap()
    for c in c_values:
        for d in d_values:
            for h_req in h_values:
                grid = Grid.from_h(problem.L, h_req)
                result = evolve(
                    problem.initial_field(grid),
                    SchemeParams(tau=d * grid.h, c=c, final_time=T,
                                 blowup_threshold=blowup_threshold),
                )
                smap.entries.append(StabilityEntry(c, d, grid.h, result.tau,
                                                   not result.blew_up, result.blowup_step))
    return smap


# -- discrete identities -----------------------------------------------------------

# one tolerance per identity; inequalities count only the amount of violation
IDENTITY_TOLERANCES = {
    "summation_by_parts": 1e-12,
    "second_difference_energy": 1e-12,
    "forward_cubic": 1e-12,
    "centered_cubic": 1e-12,
    "product_rule": 1e-12,
    "nikolski": 1e-12,
    "bernstein": 1e-12,
    "airy_isometry": 1e-13,
    "parseval": 1e-13,
}


def _rel(lhs: float, rhs: float, scale: float) -> float:
    # scale is the sum of absolute summands, so cancellation does not inflate the residual
    diff = abs(lhs - rhs)
    return diff / scale if scale > 0 else diff


def _shift(v: np.ndarray, s: int) -> np.ndarray:
    """v_{j+s} with periodic wraparound."""
    return np.roll(v, -s)


def identity_residuals(a: np.ndarray, b: np.ndarray, grid: Grid, t: float = 0.37) -> dict:
    """Relative residual of every identity / inequality for one pair of grid vectors."""
    h = grid.h
    d0a, d2a, dpa = centered_difference(a, h), second_difference(a, h), forward_difference(a, h)
    d2b, dpb, d0b = second_difference(b, h), forward_difference(b, h), centered_difference(b, h)
    ap, am = _shift(a, 1), _shift(a, -1)
    out = {}

    terms_l, terms_r = h * a * d2b, -h * dpa * dpb
    out["summation_by_parts"] = _rel(terms_l.sum(), terms_r.sum(),
                                     np.abs(terms_l).sum() + np.abs(terms_r).sum())

    lhs = np.sum(d2a**2)
    rp, r0 = (4.0 / h**2) * dpa**2, (4.0 / h**2) * d0a**2
    out["second_difference_energy"] = _rel(lhs, rp.sum() - r0.sum(), lhs + rp.sum() + r0.sum())

    terms_l, terms_r = a * ap * dpa, -(h**2 / 3.0) * dpa**3
    out["forward_cubic"] = _rel(terms_l.sum(), terms_r.sum(),
                                np.abs(terms_l).sum() + np.abs(terms_r).sum())

    terms_l, terms_r = am * ap * d0a, -(4.0 * h**2 / 3.0) * d0a**3
    out["centered_cubic"] = _rel(terms_l.sum(), terms_r.sum(),
                                 np.abs(terms_l).sum() + np.abs(terms_r).sum())

    terms_l = d2a * centered_difference(a * b, h)
    r1, r2 = -a * ap * dpb / h**2, am * ap * d0b / h**2
    out["product_rule"] = _rel(terms_l.sum(), r1.sum() + r2.sum(),
                               np.abs(terms_l).sum() + np.abs(r1).sum() + np.abs(r2).sum())

    u = Field(grid, a)
    l2 = norm(u, "l2")
    bound = l2 / math.sqrt(h)
    out["nikolski"] = max(0.0, sup_norm(u) - bound) / bound if bound else 0.0

    worst = 0.0
    for mu in range(4):
        for m in range(mu, 4):
            rhs = bernstein_constant(grid, mu, m) * sobolev_norm(u, mu)
            if rhs:
                worst = max(worst, max(0.0, sobolev_norm(u, m) - rhs) / rhs)
    out["bernstein"] = worst

    moved = propagate_airy(u, t)
    out["airy_isometry"] = abs(norm(moved, "discrete") - norm(u, "discrete")) / l2 if l2 else 0.0
    out["parseval"] = abs(norm(u, "discrete") - l2) / l2 if l2 else 0.0
    return out


@dataclass
class IdentityRow:
    identity_name: str
    N: int
    seed: int
    max_rel_residual: float
    passed: bool


IDENTITY_HEADER = ("identity_name", "N", "seed", "max_rel_residual", "pass")


@dataclass
class IdentityReport:
    rows: list = field(default_factory=list)
    elapsed: float = 0.0

    @property
    def passed(self) -> bool:
        return all(r.passed for r in self.rows)

    def worst(self, identity_name: str) -> float:
        return max(r.max_rel_residual for r in self.rows if r.identity_name == identity_name)

    def to_csv(self, path) -> None:
        write_csv_atomic(
            path,
            IDENTITY_HEADER,
            ((r.identity_name, r.N, r.seed, r.max_rel_residual, r.passed) for r in self.rows),
        )


def identity_suite(
    seed: int,
    sizes: Sequence[int] = (4, 16, 64, 256),
    trials: int = 100,
    L: float = math.pi,
    check: bool = True,
) -> IdentityReport:
    """Worst residual of each discrete identity over ``trials`` random vector pairs per N.

    Vectors are uniform on [-1, 1] per node, drawn from numpy's PCG64 generator
    seeded with ``seed`` (a fresh generator per N, seeded by (seed, N)), so any row
    can be replayed from (seed, N). With ``check`` a failing row raises
    IdentityCheckError.
    """
    if not sizes:
        raise ParameterError("identity suite needs at least one grid size")
    start = time.perf_counter()
    report = IdentityReport()
    for N in sizes:
        grid = Grid(N, L)
        rng = np.random.Generator(np.random.PCG64([seed, N]))
        worst = dict.fromkeys(IDENTITY_TOLERANCES, 0.0)
        for _ in range(trials):
            a = rng.uniform(-1.0, 1.0, grid.size)
            b = rng.uniform(-1.0, 1.0, grid.size)
            for name, r in identity_residuals(a, b, grid).items():
                worst[name] = max(worst[name], r)
        for name, r in worst.items():
            report.rows.append(IdentityRow(name, N, seed, float(r), bool(r <= IDENTITY_TOLERANCES[name])))
    report.elapsed = time.perf_counter() - start
    if check and not report.passed:
        raise IdentityCheckError(report)
    return report


# -- approximation rates -----------------------------------------------------------


def approximation_errors(func: Callable[[np.ndarray], np.ndarray], L: float,
                         sizes: Sequence[int], N_fine: int, order: int = 0) -> dict:
    """H^order errors of projection and interpolation onto X_N for each N in ``sizes``.

    ``func`` is sampled on a fine grid with cutoff ``N_fine``; its coefficients
    stand in for the exact Fourier series. Returns {"h": [...], "projection": [...],
    "interpolation": [...]}.
    """
    fine = Grid(N_fine, L)
    exact = to_spectrum(func(np.asarray(fine.nodes)))
    weight = np.ones(fine.size)
    for j in range(1, order + 1):
        weight = weight + np.abs(fine.wavenumbers) ** (2 * j)
    out = {"h": [], "projection": [], "interpolation": []}

    def hnorm(diff):
        return math.sqrt(2.0 * L * float(np.sum(weight * np.abs(diff) ** 2)))

    for N in sizes:
        if N > N_fine:
            raise ParameterError("approximation grid finer than the reference grid")
        grid = Grid(N, L)
        proj = pad(project(exact, N), N_fine)
        interp = pad(to_spectrum(func(np.asarray(grid.nodes))), N_fine)
        out["h"].append(grid.h)
        out["projection"].append(hnorm(exact - proj))
        out["interpolation"].append(hnorm(exact - interp))
    return out
