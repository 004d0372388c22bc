"""The tanh-stretched grid on (-1, 1) and its spectral dual.

The interval is mapped to the real line by ``x = tanh(omega)``. A uniform
grid in omega clusters nodes exponentially at the endpoints, and the dual
grid in xi carries the transform images. With ``h`` the omega step and ``n``
points the spectral step is ``pi / (n h)``; the factor 2 between xi and the
ordinary Fourier variable of omega is built into that relation.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import cached_property
from typing import Callable

import numpy as np

from .errors import DomainError, GridError, SamplingError

DEFAULT_N = 4096
DEFAULT_L = 12.0


def omega_of_x(x):
    """Inverse of the tanh map, ``artanh(x) = 0.5 * ln((1 + x) / (1 - x))``."""
    arr = np.asarray(x, dtype=float)
    if not np.all(np.isfinite(arr)) or np.any(np.abs(arr) >= 1.0):
        raise DomainError("omega_of_x requires |x| < 1")
    out = np.arctanh(arr)
    return float(out) if out.ndim == 0 else out


def x_of_omega(omega):
    """Map the real line onto (-1, 1) by ``tanh``."""
    arr = np.asarray(omega, dtype=float)
    if not np.all(np.isfinite(arr)):
        raise DomainError("x_of_omega requires finite omega")
    out = np.tanh(arr)
    return float(out) if out.ndim == 0 else out


def _is_power_of_two(n: int) -> bool:
    return n > 0 and (n & (n - 1)) == 0


@dataclass(frozen=True)
class OmegaGrid:
    """Uniform omega grid ``omega_j = (j - n/2) h`` on ``[-L, L)``.

    Parameters
    ----------
    n : int
        Number of nodes, a power of two not below 8.
    half_width : float
        Truncation radius ``L``; the step is ``h = 2 L / n``.
    """

    n: int = DEFAULT_N
    half_width: float = DEFAULT_L

    def __post_init__(self):
        if not isinstance(self.n, (int, np.integer)) or not _is_power_of_two(int(self.n)) or self.n < 8:
            raise GridError(f"n must be a power of two >= 8, got {self.n!r}")
        if not (math.isfinite(self.half_width) and self.half_width > 0):
            raise GridError(f"half_width must be positive and finite, got {self.half_width!r}")
        object.__setattr__(self, "n", int(self.n))
        object.__setattr__(self, "half_width", float(self.half_width))
        x = self.x
        if x[0] <= -1.0 or x[-1] >= 1.0 or np.any(np.diff(x) <= 0.0):
            raise GridError(
                f"L={self.half_width} with n={self.n} puts tanh nodes on +-1 or makes them "
                "non-increasing in double precision; reduce L or n"
            )

    @property
    def h(self) -> float:
        return 2.0 * self.half_width / self.n

    @cached_property
    def omega(self) -> np.ndarray:
        w = (np.arange(self.n) - self.n // 2) * self.h
        w.flags.writeable = False
        return w

    @cached_property
    def x(self) -> np.ndarray:
        v = np.tanh(self.omega)
        v.flags.writeable = False
        return v

    @cached_property
    def weight(self) -> np.ndarray:
        """``1 - x_j^2`` evaluated as ``sech^2(omega_j)`` (no cancellation)."""
        v = 1.0 / np.cosh(self.omega) ** 2
        v.flags.writeable = False
        return v

    @cached_property
    def sech(self) -> np.ndarray:
        v = 1.0 / np.cosh(self.omega)
        v.flags.writeable = False
        return v

    @cached_property
    def endpoint_distance(self) -> tuple:
        """``(1 + x_j, 1 - x_j)`` without the cancellation of ``1 -+ tanh``."""
        lo = 2.0 / (1.0 + np.exp(-2.0 * self.omega))
        hi = 2.0 / (1.0 + np.exp(2.0 * self.omega))
        lo.flags.writeable = False
        hi.flags.writeable = False
        return lo, hi

    @cached_property
    def spectral(self) -> "SpectralGrid":
        return SpectralGrid(self.n, self.h)

    def same_as(self, other: "OmegaGrid") -> bool:
        return self.n == other.n and self.half_width == other.half_width


@dataclass(frozen=True)
class SpectralGrid:
    """Dual grid ``xi_k = (k - n/2) dxi`` with ``dxi * h = pi / n``."""

    n: int
    h: float

    @property
    def dxi(self) -> float:
        return math.pi / (self.n * self.h)

    @cached_property
    def xi(self) -> np.ndarray:
        v = (np.arange(self.n) - self.n // 2) * self.dxi
        v.flags.writeable = False
        return v

    def same_as(self, other: "SpectralGrid") -> bool:
        return self.n == other.n and self.h == other.h

    def pairs_with(self, grid: OmegaGrid) -> bool:
        return self.n == grid.n and self.h == grid.h


def _frozen(values, n, what):
    arr = np.array(values, dtype=np.complex128)
    if arr.shape != (n,):
        raise GridError(f"{what} expects {n} values, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise SamplingError(f"{what} values must be finite")
    arr.flags.writeable = False
    return arr


@dataclass(frozen=True, eq=False)
class GridFunction:
    """Complex samples ``v(x_j)`` of a function on an :class:`OmegaGrid`."""

    grid: OmegaGrid
    values: np.ndarray = field(repr=False)

    def __post_init__(self):
        object.__setattr__(self, "values", _frozen(self.values, self.grid.n, "GridFunction"))

    def __add__(self, other):
        _check_same(self.grid, other.grid)
        return GridFunction(self.grid, self.values + other.values)

    def __sub__(self, other):
        _check_same(self.grid, other.grid)
        return GridFunction(self.grid, self.values - other.values)

    def __mul__(self, scalar):
        return GridFunction(self.grid, self.values * scalar)

    __rmul__ = __mul__

    @property
    def real(self) -> np.ndarray:
        return self.values.real


@dataclass(frozen=True, eq=False)
class SpectralFunction:
    """Complex samples ``U(xi_k)`` of a transform image."""

    grid: SpectralGrid
    values: np.ndarray = field(repr=False)

    def __post_init__(self):
        object.__setattr__(self, "values", _frozen(self.values, self.grid.n, "SpectralFunction"))

    def __mul__(self, other):
        if isinstance(other, SpectralFunction):
            if not self.grid.same_as(other.grid):
                raise GridError("spectral grids differ")
            return SpectralFunction(self.grid, self.values * other.values)
        return SpectralFunction(self.grid, self.values * other)

    __rmul__ = __mul__


def _check_same(a: OmegaGrid, b: OmegaGrid):
    if not a.same_as(b):
        raise GridError(f"grid mismatch: (n={a.n}, L={a.half_width}) vs (n={b.n}, L={b.half_width})")


def sample(fn: Callable, grid: OmegaGrid) -> GridFunction:
    """Evaluate ``fn`` at every node ``x_j`` of ``grid``.

    ``fn`` is called once with the full node array; scalar-only callables
    are retried point by point.
    """
    x = grid.x
    try:
        vals = np.asarray(fn(x), dtype=np.complex128)
        if vals.shape == ():
            vals = np.full(grid.n, vals)
    except (TypeError, ValueError):
        vals = np.array([fn(float(xj)) for xj in x], dtype=np.complex128)
    if vals.shape != (grid.n,):
        raise SamplingError(f"callable returned shape {vals.shape}, expected ({grid.n},)")
    bad = np.flatnonzero(~np.isfinite(vals))
    if bad.size:
        j = int(bad[0])
        raise SamplingError(f"non-finite value at node j={j} (x={x[j]!r}, omega={grid.omega[j]!r})")
    return GridFunction(grid, vals)


def sample_omega(fn: Callable, grid: OmegaGrid) -> GridFunction:
    """Like :func:`sample` but ``fn`` receives omega instead of x."""
    vals = np.asarray(fn(grid.omega), dtype=np.complex128)
    if vals.shape == ():
        vals = np.full(grid.n, vals)
    bad = np.flatnonzero(~np.isfinite(vals))
    if bad.size:
        j = int(bad[0])
        raise SamplingError(f"non-finite value at node j={j} (omega={grid.omega[j]!r})")
    return GridFunction(grid, vals)
