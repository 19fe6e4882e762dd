"""Lawson-Rusanov time stepping for u_t + u_xxx + u u_x = 0 on a periodic grid.

One step of the first-order scheme is

    u^{n+1} = E(tau) [ u^n - (tau/2) D0((u^n)^2) + (c tau h / 2) D2 u^n ],

where E(t) = exp(-t d^3/dx^3) is applied exactly in Fourier space, D0 and D2
are the centered first and second difference stencils, and c is the Rusanov
(artificial viscosity) coefficient.
"""

from __future__ import annotations

import logging
import math
import warnings
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np
import scipy.fft as sfft

from .spectral_core import (
    Field,
    Grid,
    ParameterError,
    airy_phase,
    centered_difference,
    second_difference,
)

__all__ = [
    "BlowUpError",
    "CFLWarning",
    "SchemeParams",
    "EvolveResult",
    "DefectReport",
    "effective_step",
    "lawson_rusanov_step",
    "evolve",
    "truncation_defect",
    "defect_study",
    "reference_evolve",
    "estimate_rusanov_floor",
]

logger = logging.getLogger(__name__)


class BlowUpError(FloatingPointError):
    """The discrete solution left the finite / bounded range."""

    def __init__(self, message, step=None):
        super().__init__(message)
        self.step = step


class CFLWarning(UserWarning):
    pass


@dataclass(frozen=True)
class SchemeParams:
    tau: float
    c: float
    final_time: float = 1.0
    blowup_threshold: float = 1e6

    def __post_init__(self):
        if not self.tau > 0:
            raise ParameterError(f"tau must be positive, got {self.tau!r}")
        if not self.c >= 0:
            raise ParameterError(f"Rusanov coefficient must be nonnegative, got {self.c!r}")
        if not self.final_time >= 0:
            raise ParameterError(f"final_time must be nonnegative, got {self.final_time!r}")
        if not self.blowup_threshold > 0:
            raise ParameterError("blowup_threshold must be positive")

    def cfl_ratio(self, h: float) -> float:
        """c*tau/h; the convergence theory covers ratios <= 1."""
        return self.c * self.tau / h


def effective_step(tau: float, final_time: float) -> tuple[float, int]:
    """Shrink tau so an integer number of steps lands exactly on final_time."""
    if final_time == 0:
        return tau, 0
    nsteps = max(1, math.ceil(final_time / tau - 1e-12))
    return final_time / nsteps, nsteps


@dataclass
class EvolveResult:
    final: Field
    steps_taken: int
    blew_up: bool
    blowup_step: Optional[int]
    mean_drift: float
    max_linf: float
    tau: float
    cfl_ratio: float
    warnings: list = field(default_factory=list)


class _Stepper:
    """Precomputed Airy phase for repeated steps at fixed (grid, tau, c)."""

    def __init__(self, grid: Grid, tau: float, c: float, nonlinear: bool = True):
        self.n = grid.size
        self.h = grid.h
        self.tau = tau
        self.c = c
        self.nonlinear = nonlinear
        self.phase = airy_phase(grid, tau)

    def __call__(self, u: np.ndarray) -> np.ndarray:
        w = u
        if self.nonlinear:
            w = w - 0.5 * self.tau * centered_difference(u * u, self.h)
        if self.c:
            w = w + 0.5 * self.c * self.tau * self.h * second_difference(u, self.h)
        return sfft.irfft(self.phase * sfft.rfft(w), self.n)


def lawson_rusanov_step(u: Field, params: SchemeParams, *, nonlinear: bool = True) -> Field:
    """Advance ``u`` by one step of size ``params.tau``.

    ``nonlinear=False`` drops the flux term (with c = 0 the step is then the
    bare Airy propagator).
    """
    u.require_valid()
    with np.errstate(over="ignore", invalid="ignore"):
        out = _Stepper(u.grid, params.tau, params.c, nonlinear)(u.values)
    if not np.all(np.isfinite(out)):
        raise BlowUpError(
            f"non-finite values after one step (tau={params.tau:g}, c={params.c:g}, "
            f"N={u.grid.N})",
            step=1,
        )
    return Field(u.grid, out)


def evolve(u0: Field, params: SchemeParams) -> EvolveResult:
    """Iterate the scheme up to ``params.final_time``.

    tau is shrunk to final_time / ceil(final_time / tau). Blow-up (L_inf above
    the threshold or any non-finite value) stops the run; ``final`` is then the
    last state that passed the check and ``blowup_step`` the 1-based index of
    the offending step.
    """
    u0.require_valid()
    grid = u0.grid
    tau, nsteps = effective_step(params.tau, params.final_time)
    cfl = params.cfl_ratio(grid.h) if nsteps else params.c * params.tau / grid.h
    notes = []
    if cfl > 1 + 1e-12:
        msg = f"c*tau/h = {cfl:.4g} exceeds 1; outside the CFL regime of the convergence theory"
        notes.append(msg)
        warnings.warn(msg, CFLWarning, stacklevel=2)
    logger.info("evolve N=%d h=%.6g tau=%.6g c=%g steps=%d cfl_ratio=%.4g",
                grid.N, grid.h, tau, params.c, nsteps, cfl)

    u = u0.values
    mean0 = float(np.mean(u))
    max_linf = float(np.max(np.abs(u)))
    step = _Stepper(grid, tau, params.c)
    blowup_step = None
    taken = 0
    for n in range(1, nsteps + 1):
        with np.errstate(over="ignore", invalid="ignore"):
            new = step(u)
        peak = float(np.max(np.abs(new)))
        if not math.isfinite(peak) or peak > params.blowup_threshold:
            blowup_step = n
            logger.info("blow-up at step %d (t=%.6g, |u|_inf=%.3g)", n, n * tau, peak)
            break
        u = new
        taken = n
        max_linf = max(max_linf, peak)
    final = Field(grid, u)
    return EvolveResult(
        final=final,
        steps_taken=taken,
        blew_up=blowup_step is not None,
        blowup_step=blowup_step,
        mean_drift=abs(float(np.mean(u)) - mean0),
        max_linf=max_linf,
        tau=tau,
        cfl_ratio=cfl,
        warnings=notes,
    )


ExactSampler = Callable[[np.ndarray, float], np.ndarray]


def truncation_defect(exact: ExactSampler, t_n: float, params: SchemeParams, grid: Grid) -> Field:
    """Local defect left when exact grid samples are pushed through one step.

    xi = u(t+tau) - E u(t) + (tau/2) E [ D0(u(t)^2) - c h D2 u(t) ],
    assembled from samples ``exact(grid.nodes, t)``.
    """
    x = np.asarray(grid.nodes)
    tau, h, c = params.tau, grid.h, params.c
    now = np.asarray(exact(x, t_n), dtype=float)
    later = np.asarray(exact(x, t_n + tau), dtype=float)
    phase = airy_phase(grid, tau)
    n = grid.size

    def prop(v):
        return sfft.irfft(phase * sfft.rfft(v), n)

    correction = centered_difference(now * now, h) - c * h * second_difference(now, h)
    xi = later - prop(now) + 0.5 * tau * prop(correction)
    return Field(grid, xi)


@dataclass
class DefectReport:
    rows: list  # (tau, h, defect l2 norm)

    def __post_init__(self):
        if not self.rows:
            raise ValueError("defect report needs at least one row")
        for _, _, d in self.rows:
            if not (math.isfinite(d) and d >= 0):
                raise ValueError(f"invalid defect norm {d!r}")

    def ratios(self) -> np.ndarray:
        """Successive reduction factors norm[i] / norm[i+1]."""
        d = np.array([r[2] for r in self.rows])
        return d[:-1] / d[1:]


def defect_study(exact: ExactSampler, grids, taus, c: float, t_n: float = 0.0) -> DefectReport:
    """Discrete L2 norm of the defect for each (grid, tau) pair."""
    rows = []
    for grid, tau in zip(grids, taus):
        xi = truncation_defect(exact, t_n, SchemeParams(tau=tau, c=c), grid)
        rows.append((tau, grid.h, float(np.sqrt(grid.h * np.dot(xi.values, xi.values)))))
    return DefectReport(rows)


def _fast_odd_size(minimum: int) -> int:
    n = minimum if minimum % 2 else minimum + 1
    while True:
        m = n
        for p in (3, 5, 7):
            while m % p == 0:
                m //= p
        if m == 1:
            return n
        n += 2


def reference_evolve(u0: Field, final_time: float, tau: float) -> Field:
    """High-order reference solution: Lawson RK4 with fully dealiased products.

    The quadratic term is evaluated on a zero-padded grid of at least 3N+1
    points, so no product mode aliases back into |k| <= N. Raises BlowUpError
    if the run leaves the finite range.
    """
    u0.require_valid()
    grid = u0.grid
    N = grid.N
    tau, nsteps = effective_step(tau, final_time)
    if nsteps == 0:
        return u0
    npad = _fast_odd_size(3 * N + 1)
    scale = npad / grid.size
    ik = 1j * grid.rfft_wavenumbers
    half = airy_phase(grid, 0.5 * tau)
    full = half * half

    def flux(U):
        # -(1/2) d/dx (u^2), returned as a half spectrum on the base grid
        P = np.zeros(npad // 2 + 1, dtype=complex)
        P[: N + 1] = U * scale
        v = sfft.irfft(P, npad)
        sq = sfft.rfft(v * v)[: N + 1] / scale
        return -0.5 * ik * sq

    U = sfft.rfft(u0.values)
    for n in range(nsteps):
        with np.errstate(over="ignore", invalid="ignore"):
            k1 = flux(U)
            k2 = flux(half * (U + 0.5 * tau * k1))
            k3 = flux(half * U + 0.5 * tau * k2)
            k4 = flux(full * U + tau * half * k3)
            U = full * U + (tau / 6.0) * (full * k1 + 2.0 * half * (k2 + k3) + k4)
        if not np.all(np.isfinite(U)):
            raise BlowUpError(f"reference integrator diverged at step {n + 1}", step=n + 1)
    return Field(grid, sfft.irfft(U, grid.size))


def estimate_rusanov_floor(u0: Field) -> float:
    """Heuristic lower bound sqrt(2) * |u0|_inf for the Rusanov coefficient.

    The stability floor involves a bound on |u(t)|_inf over the whole run with an
    unknown embedding constant; the initial grid maximum stands in for it. The
    value is advisory only and never replaces a user-chosen c.
    """
    u0.require_valid()
    return math.sqrt(2.0) * float(np.max(np.abs(u0.values)))
