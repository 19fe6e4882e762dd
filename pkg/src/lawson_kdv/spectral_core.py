"""
Periodic Fourier collocation on odd grids.

The grid has 2N+1 equispaced nodes x_j = -L + j*h on (-L, L), h = 2L/(2N+1).
Trigonometric polynomials are written as

    v(x) = sum_{k=-N}^{N} c_k exp(i * mu_k * x),    mu_k = k*pi/L,

with coefficients stored in one contiguous vector ordered k = -N..N
(``coeffs[k + N]``). Phases are taken relative to the absolute node positions,
so coefficients computed on grids of different size share one basis.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from typing import Callable

import numpy as np
import scipy.fft as sfft

__all__ = [
    "DimensionError",
    "SymmetryError",
    "ParameterError",
    "InvalidFieldError",
    "Grid",
    "Field",
    "to_spectrum",
    "to_grid",
    "project",
    "pad",
    "propagate_airy",
    "airy_phase",
    "centered_difference",
    "second_difference",
    "forward_difference",
    "backward_difference",
    "finite_difference",
    "difference_symbol",
    "norm",
    "sobolev_norm",
    "sup_norm",
    "inner_discrete",
    "bernstein_constant",
]

IMAG_TOL = 1e-10


class DimensionError(ValueError):
    """Vector length or grid mismatch."""


class SymmetryError(ValueError):
    """Coefficients do not describe a real function."""


class ParameterError(ValueError):
    """Out-of-range parameter (mode cutoff, Sobolev order, ...)."""


class InvalidFieldError(ValueError):
    """Field holds non-finite values."""


@dataclass(frozen=True)
class Grid:
    """Periodic collocation grid with 2N+1 nodes on (-L, L)."""

    N: int
    L: float = np.pi

    def __post_init__(self):
        if int(self.N) != self.N or self.N < 1:
            raise ParameterError(f"N must be a positive integer, got {self.N!r}")
        if not self.L > 0:
            raise ParameterError(f"L must be positive, got {self.L!r}")
        object.__setattr__(self, "N", int(self.N))
        object.__setattr__(self, "L", float(self.L))

    @classmethod
    def from_h(cls, L: float, h: float) -> "Grid":
        """Smallest odd grid on (-L, L) whose mesh size does not exceed ``h``."""
        if not h > 0:
            raise ParameterError(f"h must be positive, got {h!r}")
        N = max(1, int(np.ceil((2.0 * L / h - 1.0) / 2.0 - 1e-9)))
        return cls(N, L)

    @property
    def size(self) -> int:
        return 2 * self.N + 1

    @property
    def h(self) -> float:
        return 2.0 * self.L / self.size

    @cached_property
    def nodes(self) -> np.ndarray:
        x = -self.L + self.h * np.arange(self.size)
        x.setflags(write=False)
        return x

    @cached_property
    def modes(self) -> np.ndarray:
        """Integer mode indices -N..N in storage order."""
        k = np.arange(-self.N, self.N + 1)
        k.setflags(write=False)
        return k

    @cached_property
    def wavenumbers(self) -> np.ndarray:
        """mu_k = k*pi/L in storage order."""
        mu = self.modes * (np.pi / self.L)
        mu.setflags(write=False)
        return mu

    @cached_property
    def rfft_wavenumbers(self) -> np.ndarray:
        """mu_k for k = 0..N, the half spectrum of a real field."""
        mu = np.arange(self.N + 1) * (np.pi / self.L)
        mu.setflags(write=False)
        return mu

    def sample(self, func: Callable[[np.ndarray], np.ndarray]) -> "Field":
        return Field(self, func(np.asarray(self.nodes)))

    def zeros(self) -> "Field":
        return Field(self, np.zeros(self.size))


class Field:
    """Real function in X_N, held as grid values with lazily computed coefficients."""

    __slots__ = ("grid", "values", "_coeffs")

    def __init__(self, grid: Grid, values):
        values = np.array(values, dtype=float, copy=True)
        if values.shape != (grid.size,):
            raise DimensionError(
                f"expected {grid.size} grid values for N={grid.N}, got shape {values.shape}"
            )
        values.setflags(write=False)
        self.grid = grid
        self.values = values
        self._coeffs = None

    @classmethod
    def from_coeffs(cls, grid: Grid, coeffs) -> "Field":
        field = cls(grid, to_grid(coeffs))
        return field

    @property
    def coeffs(self) -> np.ndarray:
        if self._coeffs is None:
            c = to_spectrum(self.values)
            c.setflags(write=False)
            self._coeffs = c
        return self._coeffs

    @property
    def valid(self) -> bool:
        return bool(np.all(np.isfinite(self.values)))

    @property
    def mean(self) -> float:
        return float(np.mean(self.values))

    def require_valid(self) -> "Field":
        if not self.valid:
            raise InvalidFieldError("field contains non-finite values")
        return self

    def __add__(self, other: "Field") -> "Field":
        _check_same_grid(self, other)
        return Field(self.grid, self.values + other.values)

    def __sub__(self, other: "Field") -> "Field":
        _check_same_grid(self, other)
        return Field(self.grid, self.values - other.values)

    def __mul__(self, scalar: float) -> "Field":
        return Field(self.grid, self.values * scalar)

    __rmul__ = __mul__

    def __repr__(self):
        return f"Field(N={self.grid.N}, L={self.grid.L:g}, linf={np.max(np.abs(self.values)):.3e})"


def _check_same_grid(u: Field, v: Field) -> None:
    if u.grid != v.grid:
        raise DimensionError(f"grid mismatch: {u.grid} vs {v.grid}")


def _cutoff(n: int) -> int:
    if n < 3 or n % 2 == 0:
        raise DimensionError(f"need an odd length 2N+1 >= 3, got {n}")
    return (n - 1) // 2


def _sign(N: int) -> np.ndarray:
    # exp(-i*l*pi*x_0/L) with x_0 = -L
    return np.where(np.arange(-N, N + 1) % 2 == 0, 1.0, -1.0)


def to_spectrum(values) -> np.ndarray:
    """Discrete Fourier coefficients (1/(2N+1)) sum_j v_j exp(-i mu_l x_j), l = -N..N."""
    v = np.asarray(values)
    if v.ndim != 1:
        raise DimensionError("expected a 1-D vector of grid values")
    n = v.shape[0]
    N = _cutoff(n)
    c = sfft.fftshift(sfft.fft(v)) / n
    return c * _sign(N)


def to_grid(coeffs) -> np.ndarray:
    """Evaluate the trigonometric polynomial with coefficients -N..N at the grid nodes.

    Raises SymmetryError when the result has an imaginary part above 1e-10
    (relative to max(1, |v|_inf)).
    """
    c = np.asarray(coeffs, dtype=complex)
    if c.ndim != 1:
        raise DimensionError("expected a 1-D coefficient vector")
    n = c.shape[0]
    N = _cutoff(n)
    v = sfft.ifft(sfft.ifftshift(c * _sign(N))) * n
    scale = max(1.0, float(np.max(np.abs(v.real))))
    residue = float(np.max(np.abs(v.imag))) / scale
    if residue > IMAG_TOL:
        raise SymmetryError(f"coefficients are not Hermitian (imaginary residue {residue:.2e})")
    return np.ascontiguousarray(v.real)


def project(coeffs, M: int) -> np.ndarray:
    """Spectral truncation to |k| <= M."""
    c = np.asarray(coeffs)
    N = _cutoff(c.shape[0])
    if int(M) != M or M < 0 or M > N:
        raise ParameterError(f"projection cutoff must satisfy 0 <= M <= N={N}, got {M}")
    M = int(M)
    return c[N - M : N + M + 1].copy()


def pad(coeffs, M: int) -> np.ndarray:
    """Embed coefficients -N..N into -M..M (M >= N) with zeros."""
    c = np.asarray(coeffs)
    N = _cutoff(c.shape[0])
    if M < N:
        raise ParameterError(f"pad target M={M} smaller than N={N}")
    out = np.zeros(2 * M + 1, dtype=c.dtype)
    out[M - N : M + N + 1] = c
    return out


def airy_phase(grid: Grid, t: float) -> np.ndarray:
    """Half-spectrum multiplier exp(i t mu_k^3), k = 0..N, of exp(-t d^3/dx^3)."""
    mu = grid.rfft_wavenumbers
    return np.exp(1j * t * mu**3)


def propagate_airy(field: Field, t: float) -> Field:
    """Exact solution operator of v_t = -v_xxx over time t (either sign)."""
    field.require_valid()
    if t == 0:
        return field
    n = field.grid.size
    values = sfft.irfft(airy_phase(field.grid, t) * sfft.rfft(field.values), n)
    return Field(field.grid, values)


def centered_difference(v: np.ndarray, h: float) -> np.ndarray:
    return (np.roll(v, -1) - np.roll(v, 1)) / (2.0 * h)


def second_difference(v: np.ndarray, h: float) -> np.ndarray:
    return (np.roll(v, -1) - 2.0 * v + np.roll(v, 1)) / (h * h)


def forward_difference(v: np.ndarray, h: float) -> np.ndarray:
    return (np.roll(v, -1) - v) / h


def backward_difference(v: np.ndarray, h: float) -> np.ndarray:
    return (v - np.roll(v, 1)) / h


_STENCILS = {
    "centered": centered_difference,
    "second": second_difference,
    "forward": forward_difference,
    "backward": backward_difference,
}


def finite_difference(field: Field, kind: str) -> Field:
    """Periodic stencil ``kind`` in {'centered', 'second', 'forward', 'backward'}."""
    try:
        stencil = _STENCILS[kind]
    except KeyError:
        raise ParameterError(f"unknown difference kind {kind!r}") from None
    field.require_valid()
    return Field(field.grid, stencil(field.values, field.grid.h))


def difference_symbol(grid: Grid, kind: str) -> np.ndarray:
    """Fourier multiplier of a stencil on modes -N..N (cross-check for the stencils)."""
    h = grid.h
    theta = grid.wavenumbers * h
    if kind == "centered":
        return 1j * np.sin(theta) / h
    if kind == "second":
        return 2.0 * (np.cos(theta) - 1.0) / h**2
    if kind == "forward":
        return (np.exp(1j * theta) - 1.0) / h
    if kind == "backward":
        return (1.0 - np.exp(-1j * theta)) / h
    raise ParameterError(f"unknown difference kind {kind!r}")


def _seminorm_sq(field: Field, m: int) -> float:
    c = field.coeffs
    weight = np.abs(field.grid.wavenumbers) ** (2 * m) if m else 1.0
    return 2.0 * field.grid.L * float(np.sum(weight * np.abs(c) ** 2))


def _check_order(m) -> int:
    if m not in (0, 1, 2, 3):
        raise ParameterError(f"Sobolev order must be one of 0, 1, 2, 3; got {m!r}")
    return int(m)


def norm(field: Field, kind: str = "l2", m: int | None = None) -> float:
    """Norms of a field.

    kind:
        ``"l2"``        L2 norm of the interpolant, via Parseval
        ``"discrete"``  sqrt(h * sum_j v_j^2)
        ``"linf"``      max over the nodes
        ``"h"``         Sobolev seminorm |v|_m, m in {0, 1, 2, 3}
    """
    field.require_valid()
    if kind == "l2":
        return float(np.sqrt(_seminorm_sq(field, 0)))
    if kind == "discrete":
        return float(np.sqrt(field.grid.h * np.dot(field.values, field.values)))
    if kind == "linf":
        return float(np.max(np.abs(field.values)))
    if kind == "h":
        if m is None:
            raise ParameterError("seminorm needs an order m")
        return float(np.sqrt(_seminorm_sq(field, _check_order(m))))
    raise ParameterError(f"unknown norm kind {kind!r}")


def sobolev_norm(field: Field, m: int) -> float:
    """Full H^m norm, ||v||_m^2 = sum_{j<=m} |v|_j^2."""
    m = _check_order(m)
    field.require_valid()
    return float(np.sqrt(sum(_seminorm_sq(field, j) for j in range(m + 1))))


def sup_norm(field: Field, oversample: int = 8) -> float:
    """Sup of the interpolant, estimated on a grid refined by ``oversample``."""
    field.require_valid()
    N = field.grid.N
    M = oversample * N + (oversample - 1) // 2
    fine = to_grid(pad(field.coeffs, M))
    return float(np.max(np.abs(fine)))


def inner_discrete(u: Field, v: Field) -> float:
    """<u, v>_N = h sum_j u_j v_j."""
    _check_same_grid(u, v)
    return float(u.grid.h * np.dot(u.values, v.values))


def bernstein_constant(grid: Grid, mu: int, m: int) -> float:
    """Sharp C with ||v||_m <= C ||v||_mu for every v in X_N (0 <= mu <= m <= 3).

    The ratio of the Fourier weights sum_{j<=m} k^{2j} / sum_{j<=mu} k^{2j}
    increases with |k|, so the extreme is attained at the cutoff mode.
    """
    mu, m = _check_order(mu), _check_order(m)
    if mu > m:
        raise ParameterError("need mu <= m")
    kmax = grid.N * np.pi / grid.L
    w = [kmax ** (2 * j) for j in range(m + 1)]
    return float(np.sqrt(sum(w) / sum(w[: mu + 1])))
