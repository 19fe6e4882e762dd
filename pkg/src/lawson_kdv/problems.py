"""Test problems: the KdV solitary wave, the modulated pulse, and error reporting."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from .scheme import reference_evolve
from .spectral_core import DimensionError, Field, Grid, ParameterError, pad, project, to_grid

__all__ = [
    "SolitonParams",
    "ErrorReport",
    "Problem",
    "soliton_exact",
    "pulse_initial",
    "sech2",
    "error_report",
    "restrict",
    "resample_periodic",
    "soliton_problem",
    "pulse_problem",
    "ReferenceTruth",
]


@dataclass(frozen=True)
class SolitonParams:
    lam: float = 0.25
    a: float = -1.0

    def __post_init__(self):
        if not self.lam > 0:
            raise ParameterError(f"lambda must be positive, got {self.lam!r}")

    @property
    def speed(self) -> float:
        return 4.0 * self.lam

    @property
    def peak(self) -> float:
        return 12.0 * self.lam


def sech2(z):
    # overflow-free: 4 e^{-2|z|} / (1 + e^{-2|z|})^2
    e = np.exp(-2.0 * np.abs(z))
    return 4.0 * e / (1.0 + e) ** 2


def soliton_exact(x, t: float, p: SolitonParams = SolitonParams()):
    """12 lam sech^2(sqrt(lam) (x - 4 lam t - a))."""
    return 12.0 * p.lam * sech2(math.sqrt(p.lam) * (np.asarray(x, dtype=float) - 4.0 * p.lam * t - p.a))


def pulse_initial(x):
    return 3.0 * sech2(2.0 * np.asarray(x, dtype=float)) * np.sin(x)


@dataclass(frozen=True)
class ErrorReport:
    time: float
    l2_error: float
    linf_error: float
    h: float
    tau: float


def error_report(numerical: Field, truth, time: float, tau: float = float("nan")) -> ErrorReport:
    """Discrete L2 and max-node errors against truth samples (Field or array)."""
    if isinstance(truth, Field):
        if truth.grid != numerical.grid:
            raise DimensionError(f"grid mismatch: {numerical.grid} vs {truth.grid}")
        truth = truth.values
    truth = np.asarray(truth, dtype=float)
    if truth.shape != numerical.values.shape:
        raise DimensionError(f"truth has shape {truth.shape}, expected {numerical.values.shape}")
    if not np.all(np.isfinite(truth)):
        raise ValueError("truth contains non-finite values")
    diff = numerical.values - truth
    h = numerical.grid.h
    return ErrorReport(
        time=time,
        l2_error=float(np.sqrt(h * np.dot(diff, diff))),
        linf_error=float(np.max(np.abs(diff))),
        h=h,
        tau=tau,
    )


def restrict(field_: Field, grid: Grid) -> Field:
    """Move a field to another grid on the same period by truncating or zero-padding modes."""
    if grid.L != field_.grid.L:
        raise DimensionError("restrict needs grids with the same half-period")
    c = field_.coeffs
    if grid.N <= field_.grid.N:
        c = project(c, grid.N)
    else:
        c = pad(c, grid.N)
    return Field(grid, to_grid(c))


def resample_periodic(x, u, grid: Grid, rtol: float = 1e-6) -> Field:
    """Trigonometric interpolation of equispaced periodic samples onto ``grid``.

    The samples must cover exactly one period [-L, L) of the target grid,
    optionally including the duplicated endpoint x = L (which must then
    repeat the value at -L).
    """
    x = np.asarray(x, dtype=float)
    u = np.asarray(u, dtype=float)
    if x.ndim != 1 or x.shape != u.shape or x.size < 3:
        raise DimensionError("need matching 1-D x and u arrays with at least 3 samples")
    if not (np.all(np.isfinite(x)) and np.all(np.isfinite(u))):
        raise ValueError("samples contain non-finite values")
    dx = np.diff(x)
    if np.any(dx <= 0) or np.ptp(dx) > rtol * np.mean(dx):
        raise ValueError("samples must be strictly increasing and equispaced")
    spacing = float(np.mean(dx))
    period = 2.0 * grid.L
    if abs(x[-1] - x[0] - period) <= 1e-6 * period:
        scale = max(1.0, float(np.max(np.abs(u))))
        if abs(u[-1] - u[0]) > 1e-8 * scale:
            raise ValueError(
                f"endpoint values differ ({u[0]:.6g} vs {u[-1]:.6g}); data are not periodic"
            )
        x, u = x[:-1], u[:-1]
    elif abs(x.size * spacing - period) > 1e-6 * period:
        raise ValueError(
            f"samples span {x.size * spacing:.6g}, expected one period {period:.6g}"
        )
    n = u.size
    spectrum = np.fft.fft(u) / n
    k = np.fft.fftfreq(n, d=1.0 / n)
    if n % 2 == 0:
        # split the unpaired Nyquist mode symmetrically
        nyq = n // 2
        spectrum = np.append(spectrum, spectrum[nyq] / 2)
        spectrum[nyq] /= 2
        k = np.append(k, -k[nyq])
        k[nyq] = abs(k[nyq])
    k = k.astype(int)
    # coefficients of exp(i k pi x / L) in absolute position x
    spectrum = spectrum * np.exp(-1j * k * np.pi * x[0] / grid.L)
    coeffs = np.zeros(grid.size, dtype=complex)
    keep = np.abs(k) <= grid.N
    np.add.at(coeffs, k[keep] + grid.N, spectrum[keep])
    return Field(grid, to_grid(coeffs))


@dataclass
class Problem:
    """Initial data, domain and ground truth for a convergence experiment."""

    name: str
    L: float
    initial: Callable[[np.ndarray], np.ndarray]
    truth: Callable[[Grid, float], np.ndarray]
    metadata: dict = field(default_factory=dict)

    def initial_field(self, grid: Grid) -> Field:
        return Field(grid, self.initial(np.asarray(grid.nodes)))


def soliton_problem(params: SolitonParams = SolitonParams(), L: float = 30.0) -> Problem:
    return Problem(
        name="soliton",
        L=L,
        initial=lambda x: soliton_exact(x, 0.0, params),
        truth=lambda grid, t: soliton_exact(grid.nodes, t, params),
        metadata={"lambda": params.lam, "a": params.a},
    )


class ReferenceTruth:
    """Lazily computed high-order reference solutions, restricted to coarser grids.

    One reference run per final time is cached on the instance.
    """

    def __init__(self, initial, L: float, N: int = 1093, tau: float = 2e-4):
        self.initial = initial
        self.grid = Grid(N, L)
        self.tau = tau
        self._cache: dict = {}

    def solution(self, t: float) -> Field:
        if t not in self._cache:
            u0 = Field(self.grid, self.initial(np.asarray(self.grid.nodes)))
            self._cache[t] = reference_evolve(u0, t, self.tau)
        return self._cache[t]

    def __call__(self, grid: Grid, t: float) -> np.ndarray:
        return restrict(self.solution(t), grid).values


def pulse_problem(reference: Optional[ReferenceTruth] = None) -> Problem:
    L = math.pi
    reference = reference or ReferenceTruth(pulse_initial, L)
    return Problem(
        name="pulse",
        L=L,
        initial=pulse_initial,
        truth=reference,
        metadata={"reference_N": reference.grid.N, "reference_tau": reference.tau},
    )
