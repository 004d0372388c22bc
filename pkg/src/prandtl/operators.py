"""Three realisations of the weighted Prandtl operator.

The operator is ``K u = -(1 - x^2) * (1 / 2 pi) * PV int u'(t) / (t - x) dt``.

* spectral: ``K`` is the multiplier ``xi * coth(pi xi)`` on the transform side;
* principal-value quadrature of the Cauchy integral (independent of the FFT);
* the Glauert sine series, where ``sin(n theta)`` (``x = cos theta``) maps to
  ``n sin(n theta) / (2 sin theta)`` before weighting.

The DFT realisation sees the truncated omega window as periodic. Admissible
functions behave like ``c sqrt(1 -+ x)`` at the endpoints, i.e. like
``exp(-|omega|)``, so the window edge carries an ``O(exp(-L))`` jump or kink.
By default :func:`apply_prandtl_spectral` removes it: the even/odd pair
``sech(omega)``, ``tanh(omega) sech(omega)`` (the Glauert modes ``sin theta``
and ``sin(2 theta) / 2``) is fitted to the two edge samples and mapped through
its closed-form image, and only the remainder goes through the FFT.
"""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Callable

import numpy as np

from . import _kernels
from .errors import DomainError, QuadratureError
from .grid import GridFunction, OmegaGrid, SpectralFunction, SpectralGrid
from .ptransform import _centered_fft, _centered_ifft

INV_PI = 1.0 / math.pi


# ---------------------------------------------------------------- multiplier

def multiplier(xi):
    """Symbol ``xi * coth(pi xi)``, continued by ``1/pi`` at ``xi = 0``."""
    scalar = np.ndim(xi) == 0
    out = _kernels.multiplier(xi)
    return float(out[0]) if scalar else out


def multiplier_bounds(xi):
    """Return ``(lower, m^2, upper)`` of ``1/pi^2 + 2/3 xi^2 <= m^2 <= 1/pi^2 + xi^2``."""
    xi = np.atleast_1d(np.asarray(xi, dtype=float))
    m = _kernels.multiplier(xi)
    base = INV_PI * INV_PI
    return base + (2.0 / 3.0) * xi * xi, m * m, base + xi * xi


@dataclass(frozen=True, eq=False)
class MultiplierTable:
    """Multiplier sampled on a spectral grid, checked on construction."""

    grid: SpectralGrid
    values: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        xi = self.grid.xi
        m = _kernels.multiplier(xi)
        lower, m2, upper = multiplier_bounds(xi)
        if np.any(m < INV_PI) or np.any(m2 < lower) or np.any(m2 > upper):
            bad = int(np.flatnonzero((m < INV_PI) | (m2 < lower) | (m2 > upper))[0])
            raise AssertionError(f"multiplier bounds violated at xi={xi[bad]!r}")
        m.flags.writeable = False
        object.__setattr__(self, "values", m)


@lru_cache(maxsize=32)
def multiplier_table(sgrid: SpectralGrid) -> MultiplierTable:
    return MultiplierTable(sgrid)


# ---------------------------------------------------------- spectral route

def apply_periodic(values: np.ndarray, grid: OmegaGrid) -> np.ndarray:
    """Raw ``inverse(m * forward(v))`` on the periodic omega window."""
    m = multiplier_table(grid.spectral).values
    return _centered_ifft(m * _centered_fft(values))


class EdgeTail:
    """Closed-form handling of the ``exp(-|omega|)`` tails at the window edge."""

    def __init__(self, grid: OmegaGrid):
        s, x = grid.sech, grid.x
        self.grid = grid
        self.even = np.asarray(s)
        self.odd = x * s
        self.even_image = 0.5 * s * s
        self.odd_image = x * s * s
        # nodes 1 and n-1 sit at -(L-h) and L-h, symmetric about 0
        self.index = (1, grid.n - 1)
        basis = np.array([[self.even[i], self.odd[i]] for i in self.index])
        self._fit = np.linalg.inv(basis)
        # image error committed by the periodic route on each tail mode
        self.defect = np.stack([
            self.even_image - apply_periodic(self.even, grid),
            self.odd_image - apply_periodic(self.odd, grid),
        ], axis=1)

    def coefficients(self, values: np.ndarray) -> np.ndarray:
        return self._fit @ values[list(self.index)]

    def apply(self, values: np.ndarray) -> np.ndarray:
        """Tail-corrected operator: periodic part plus rank-2 edge repair."""
        return apply_periodic(values, self.grid) + self.defect @ self.coefficients(values)


@lru_cache(maxsize=32)
def edge_tail(grid: OmegaGrid) -> EdgeTail:
    return EdgeTail(grid)


def apply_prandtl_spectral(u: GridFunction, tail_correction: bool = True) -> GridFunction:
    """Weighted singular operator via the spectral multiplier.

    Returns samples of ``-(1 - x^2) (1/2pi) PV int u'(t) / (t - x) dt``; note
    the ``(1 - x^2)`` factor carried by the output.
    """
    grid = u.grid
    if tail_correction:
        return GridFunction(grid, edge_tail(grid).apply(u.values))
    return GridFunction(grid, apply_periodic(u.values, grid))


def apply_multiplier(U: SpectralFunction) -> SpectralFunction:
    return SpectralFunction(U.grid, multiplier_table(U.grid).values * U.values)


# ---------------------------------------------------------- PV quadrature

_GL_NODES, _GL_WEIGHTS = np.polynomial.legendre.leggauss(20)


def _as_vector_fn(fn: Callable) -> Callable:
    def call(t):
        try:
            with warnings.catch_warnings():
                # math.* on a size-1 array: treat as scalar-only
                warnings.simplefilter("error", DeprecationWarning)
                out = np.asarray(fn(t), dtype=float)
            if out.shape == t.shape:
                return out
        except (TypeError, ValueError, DeprecationWarning):
            pass
        return np.array([fn(float(ti)) for ti in t])
    return call


def _gauss(fn: Callable, a: float, b: float, panel: float) -> float:
    if b <= a:
        return 0.0
    k = max(1, int(math.ceil((b - a) / panel)))
    edges = np.linspace(a, b, k + 1)
    mid = 0.5 * (edges[1:] + edges[:-1])
    half = 0.5 * (edges[1:] - edges[:-1])
    pts = (mid[:, None] + half[:, None] * _GL_NODES[None, :]).ravel()
    wts = (half[:, None] * _GL_WEIGHTS[None, :]).ravel()
    return float(np.dot(wts, fn(pts)))


def _richardson(table: list[list[float]], value: float, exponents) -> list[float]:
    row = [value]
    if table:
        prev = table[-1]
        for j in range(1, min(len(prev) + 1, len(exponents) + 1)):
            r = 2.0 ** exponents[j - 1]
            row.append(row[j - 1] + (row[j - 1] - prev[j - 1]) / (r - 1.0))
    table.append(row)
    return row


def apply_prandtl_pv(u: Callable, du: Callable, x: float, *, eps0: float = 1e-3,
                     tol: float = 1e-9, max_halvings: int = 36, panel: float = 0.5) -> float:
    """``-(1/2pi) PV int_{-1}^{1} u'(t) / (t - x) dt`` by direct quadrature.

    The Cauchy singularity is removed by subtracting ``u'(x)``; the remaining
    integrand is integrated with composite Gauss-Legendre in ``tau = artanh t``
    on ``[-1 + eps, 1 - eps]``. The two end slivers are closed with
    ``u(+-(1 - eps))`` (hence the need for ``u``), which leaves an error
    ``O(eps^{3/2})``; ``eps`` is halved and the values are Richardson
    extrapolated until successive estimates change by less than ``tol``.
    """
    x = float(x)
    if not abs(x) < 1.0:
        raise DomainError(f"apply_prandtl_pv needs |x| < 1, got {x}")
    duv = _as_vector_fn(du)
    uv = _as_vector_fn(u)
    tx = math.atanh(x)
    dux = float(duv(np.array([x]))[0])
    cx = math.cosh(tx)

    def integrand(tau):
        t = np.tanh(tau)
        ch = np.cosh(tau)
        # t - x without cancellation near tau = tx
        diff = np.sinh(tau - tx) / (ch * cx)
        return (duv(t) - dux) / diff / (ch * ch)

    def t_of(eps):
        return 0.5 * math.log((2.0 - eps) / eps)

    exponents = [1.5 + 0.5 * k for k in range(8)]
    eps = eps0
    T = t_of(eps)
    inner = _gauss(integrand, -T, tx, panel) + _gauss(integrand, tx, T, panel)
    table: list[list[float]] = []
    best = prev_best = None
    change = math.inf
    for _ in range(max_halvings):
        ends = np.array([1.0 - eps, -1.0 + eps])
        ue = uv(ends)
        total = (inner
                 + dux * math.log((1.0 - eps - x) / (1.0 - eps + x))
                 - ue[0] / (1.0 - x) - ue[1] / (1.0 + x))
        row = _richardson(table, total, exponents)
        prev_best, best = best, row[-1]
        if prev_best is not None:
            change = abs(best - prev_best)
            if change < tol and len(row) >= 3:
                return -best / (2.0 * math.pi)
        eps *= 0.5
        T_new = t_of(eps)
        inner += _gauss(integrand, T, T_new, panel) + _gauss(integrand, -T_new, -T, panel)
        T = T_new
    raise QuadratureError("PV quadrature did not converge", estimate=-best / (2.0 * math.pi),
                          error=change / (2.0 * math.pi))


# ---------------------------------------------------------- Glauert oracle

@dataclass(frozen=True, eq=False)
class GlauertExpansion:
    """``u(cos theta) = sum_{n=1}^{N} A_n sin(n theta)``."""

    coefficients: np.ndarray

    def __post_init__(self):
        a = np.array(self.coefficients)
        if a.ndim != 1 or a.size == 0 or not np.all(np.isfinite(a)):
            raise ValueError("Glauert coefficients must be a non-empty finite vector")
        a.flags.writeable = False
        object.__setattr__(self, "coefficients", a)

    @property
    def N(self) -> int:
        return self.coefficients.size

    def evaluate_theta(self, theta):
        theta = np.atleast_1d(np.asarray(theta, dtype=float))
        nn = np.arange(1, self.N + 1)
        return np.sin(np.outer(theta, nn)) @ self.coefficients

    def evaluate(self, x):
        return self.evaluate_theta(np.arccos(np.asarray(x, dtype=float)))


def _check_theta(theta):
    theta = np.atleast_1d(np.asarray(theta, dtype=float))
    if np.any(~(theta > 0.0)) or np.any(~(theta < math.pi)):
        raise DomainError("theta must lie strictly inside (0, pi)")
    return theta


def glauert_apply(e: GlauertExpansion, theta):
    """Unweighted image ``sum A_n n sin(n theta) / (2 sin theta)`` at ``x = cos theta``."""
    scalar = np.ndim(theta) == 0
    th = _check_theta(theta)
    a = e.coefficients
    if np.iscomplexobj(a):
        out = _kernels.glauert_image(a.real, th) + 1j * _kernels.glauert_image(a.imag, th)
    else:
        out = _kernels.glauert_image(a, th)
    return out[0] if scalar else out


def theta_of_omega(omega):
    """Glauert angle of ``x = tanh(omega)``; ``2 atan(exp(-omega))`` is exact at the edges."""
    return 2.0 * np.arctan(np.exp(-np.asarray(omega, dtype=float)))


def glauert_project(u: GridFunction, N: int) -> GlauertExpansion:
    """Sine coefficients ``A_n = (2/pi) int_0^pi u sin(n theta) d theta`` of a grid function.

    ``d theta = -sech(omega) d omega``, so the integral is a trapezoidal sum
    on the omega grid.
    """
    grid = u.grid
    theta = theta_of_omega(grid.omega)
    coeffs = _kernels.sine_projection(u.values, theta, grid.sech, grid.h, N)
    if np.all(u.values.imag == 0):
        coeffs = coeffs.real
    return GlauertExpansion(coeffs)


# ---------------------------------------------------------- coth image

def verify_coth_image(xi: float, *, eps0: float = 1e-4, tol: float = 1e-9,
                      max_halvings: int = 40, panel: float = 0.25) -> complex:
    """Numerical ``PV int (1/y) ((1-y)/(1+y))^{i xi} dy / (1 - y^2)``.

    With ``y = tanh(omega)`` the integrand is ``coth(omega) exp(-2 i xi omega)``.
    The principal value at ``y = 0`` is taken by pairing ``+-omega``, which
    leaves ``-2i coth(omega) sin(2 xi omega)`` on ``(0, T)``. The truncated
    integral oscillates in ``T`` without decaying, so the endpoint value is
    the mean of ``I(T)`` over one period ``pi/|xi|`` starting at the cutoff
    ``1 - eps``. ``eps`` is halved until the mean changes by less than ``tol``.
    The exact value is ``-i pi coth(pi xi)``.
    """
    xi = float(xi)
    if xi == 0.0 or not abs(xi) <= 10.0:
        raise DomainError(f"verify_coth_image needs 0 < |xi| <= 10, got {xi}")
    period = math.pi / abs(xi)

    def f(w):
        return np.sin(2.0 * xi * w) / np.tanh(w)

    def averaged(t0, head):
        tail = _gauss(lambda w: f(w) * (t0 + period - w), t0, t0 + period, panel) / period
        return head + tail

    eps = eps0
    t0 = 0.5 * math.log((2.0 - eps) / eps)
    head = _gauss(f, 0.0, t0, panel)
    value = averaged(t0, head)
    change = math.inf
    for _ in range(max_halvings):
        eps *= 0.5
        t1 = 0.5 * math.log((2.0 - eps) / eps)
        head += _gauss(f, t0, t1, panel)
        t0 = t1
        new = averaged(t0, head)
        change = abs(new - value)
        value = new
        if change < tol:
            return complex(0.0, -2.0 * value)
    raise QuadratureError("coth image did not converge", estimate=complex(0.0, -2.0 * value),
                          error=2.0 * change)


def coth_image_exact(xi: float) -> complex:
    return complex(0.0, -math.pi / math.tanh(math.pi * xi))


__all__ = [
    "EdgeTail", "GlauertExpansion", "MultiplierTable", "apply_multiplier", "apply_periodic",
    "apply_prandtl_pv", "apply_prandtl_spectral", "coth_image_exact", "edge_tail",
    "glauert_apply", "glauert_project", "multiplier", "multiplier_bounds", "multiplier_table",
    "theta_of_omega", "verify_coth_image",
]
