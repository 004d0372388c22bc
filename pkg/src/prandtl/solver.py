"""Weak solution of the degenerate Prandtl equation and its a-priori bounds.

The equation ``V u + K u / (1 - x^2) = f`` is multiplied by ``1 - x^2`` and
posed on the omega grid::

    (W + K) u = g,   W = (1 - x^2) V in [0, M],   g = (1 - x^2) f,

with ``K`` the spectral multiplier ``m(xi) >= 1/pi``. This is a symmetric
positive-definite system in plain ``L2(d omega)``. It is solved by
preconditioned CG with the spectral diagonal ``(m + M/2)^-1``.

The edge-tail repair of the operator (see :mod:`prandtl.operators`) is a
rank-2 modification ``K_tc = K + Y C``. It is folded in with the Woodbury
identity, costing two extra CG solves on the same symmetric system.
"""
from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from typing import Callable, Optional, Union

import numpy as np

from ._kernels import INV_PI
from .errors import ConvergenceError, GridError, OracleError, SpecError
from .grid import GridFunction, OmegaGrid, sample
from .operators import (GlauertExpansion, apply_periodic, edge_tail, multiplier_table)
from .ptransform import _centered_fft, _centered_ifft, forward
from . import _kernels
from .spaces import (embedding_constant, h1_norm_spatial, hs_norm, l2_tilde_norm, l2r_norm,
                     sup_norm)

log = logging.getLogger(__name__)

KINDS = ("elliptic", "constant", "triangular", "tabulated")
SPEC_SLACK = 1e-9
BOUND_SLACK = 1e-8
TAIL_WARN = 1e-4


# ------------------------------------------------------------ coefficient

@dataclass(frozen=True)
class CoefficientSpec:
    """Coefficient ``V = 1/p`` of the equation.

    Parameters
    ----------
    kind : str
        ``elliptic`` (``p = p0 sqrt(1 - x^2)``), ``constant`` (``p = p0``),
        ``triangular`` (``p = p0 (1 - |x|)``) or ``tabulated``.
    p0 : float
        Positive scale of the presets.
    samples : sequence of (x, p) pairs, optional
        Table for ``tabulated``; ``(1 - x^2) / p`` is interpolated linearly
        in omega and held constant beyond the first and last sample.
    M : float, optional
        Declared bound on ``(1 - x^2) V``. Filled in from the preset (or the
        table maximum) when omitted; checked at every grid node otherwise.
    """

    kind: str = "elliptic"
    p0: float = 1.0
    samples: Optional[tuple] = None
    M: Optional[float] = None

    def __post_init__(self):
        if self.kind not in KINDS:
            raise SpecError(f"coefficient kind must be one of {KINDS}, got {self.kind!r}")
        if not (isinstance(self.p0, (int, float)) and math.isfinite(self.p0) and self.p0 > 0):
            raise SpecError(f"p0 must be positive and finite, got {self.p0!r}")
        object.__setattr__(self, "p0", float(self.p0))
        if self.kind == "tabulated":
            if self.samples is None or len(self.samples) < 2:
                raise SpecError("tabulated coefficient needs at least two (x, p) samples")
            tab = np.array(self.samples, dtype=float)
            if tab.ndim != 2 or tab.shape[1] != 2 or not np.all(np.isfinite(tab)):
                raise SpecError("samples must be finite (x, p) pairs")
            if np.any(np.abs(tab[:, 0]) >= 1.0):
                raise SpecError("sample abscissae must satisfy |x| < 1")
            if np.any(tab[:, 1] <= 0.0):
                raise SpecError("tabulated p must be positive")
            tab = tab[np.argsort(tab[:, 0])]
            if np.any(np.diff(tab[:, 0]) <= 0.0):
                raise SpecError("sample abscissae must be distinct")
            object.__setattr__(self, "samples", tuple(map(tuple, tab)))
        elif self.samples is not None:
            raise SpecError(f"samples are only meaningful for kind='tabulated', not {self.kind!r}")
        if self.M is None:
            object.__setattr__(self, "M", self.default_bound())
        elif not (math.isfinite(self.M) and self.M >= 0):
            raise SpecError(f"M must be finite and non-negative, got {self.M!r}")
        else:
            object.__setattr__(self, "M", float(self.M))

    def default_bound(self) -> float:
        if self.kind in ("elliptic", "constant"):
            return 1.0 / self.p0
        if self.kind == "triangular":
            return 2.0 / self.p0
        tab = np.array(self.samples)
        return float(np.max((1.0 - tab[:, 0] ** 2) / tab[:, 1]))

    def _table(self):
        tab = np.array(self.samples)
        x, p = tab[:, 0], tab[:, 1]
        return np.arctanh(x), (1.0 - x) * (1.0 + x) / p

    def weight_omega(self, omega) -> np.ndarray:
        """``W = (1 - x^2) V`` as a function of omega, never via bare ``V``."""
        w = np.asarray(omega, dtype=float)
        if self.kind == "elliptic":
            return 1.0 / (self.p0 * np.cosh(w))
        if self.kind == "constant":
            return 1.0 / (self.p0 * np.cosh(w) ** 2)
        if self.kind == "triangular":
            return (1.0 + np.abs(np.tanh(w))) / self.p0
        wo, wv = self._table()
        return np.interp(w, wo, wv)

    def weight(self, grid: OmegaGrid) -> np.ndarray:
        """Node values of ``W``; raises :class:`SpecError` if the bound ``M`` fails."""
        W = self.weight_omega(grid.omega)
        if np.any(W < 0) or np.any(W > self.M * (1.0 + SPEC_SLACK)):
            j = int(np.argmax(W))
            raise SpecError(f"(1 - x^2) V = {W[j]!r} exceeds declared M = {self.M!r} at x = {grid.x[j]!r}")
        return W

    def V_theta(self, theta) -> np.ndarray:
        """Bare ``V(cos theta)``, for interior collocation nodes only."""
        th = np.asarray(theta, dtype=float)
        s = np.sin(th)
        if self.kind == "elliptic":
            return 1.0 / (self.p0 * s)
        if self.kind == "constant":
            return np.full_like(th, 1.0 / self.p0)
        if self.kind == "triangular":
            return 1.0 / (self.p0 * (1.0 - np.abs(np.cos(th))))
        omega = np.log(1.0 / np.tan(0.5 * th))
        return self.weight_omega(omega) / (s * s)


# ------------------------------------------------------------ problem data

RightHandSide = Union[GridFunction, Callable]


@dataclass(frozen=True)
class ProblemSpec:
    """Coefficient, right-hand side, grid and CG parameters."""

    coefficient: CoefficientSpec
    f: RightHandSide
    grid: OmegaGrid = field(default_factory=OmegaGrid)
    tol: float = 1e-10
    max_iter: int = 5000
    tail_correction: bool = True

    def __post_init__(self):
        if not (0 < self.tol < 1):
            raise SpecError(f"tol must lie in (0, 1), got {self.tol!r}")
        if int(self.max_iter) < 1:
            raise SpecError(f"max_iter must be >= 1, got {self.max_iter!r}")
        if isinstance(self.f, GridFunction):
            if not self.f.grid.same_as(self.grid):
                raise GridError("right-hand side lives on a different grid")
        elif not callable(self.f):
            raise SpecError("f must be a GridFunction or a callable of x")

    def rhs(self) -> GridFunction:
        f = self.f if isinstance(self.f, GridFunction) else sample(self.f, self.grid)
        if not math.isfinite(l2r_norm(f)):
            raise SpecError("right-hand side is not in L2 with weight (1 - x^2)")
        return f


@dataclass(frozen=True)
class BoundRecord:
    name: str
    lhs: float
    rhs: float

    @property
    def ratio(self) -> float:
        return self.lhs / self.rhs if self.rhs > 0 else math.inf

    @property
    def passed(self) -> bool:
        return self.lhs <= self.rhs * (1.0 + BOUND_SLACK)

    def as_dict(self) -> dict:
        return {"name": self.name, "lhs": self.lhs, "rhs": self.rhs, "pass": self.passed}


@dataclass
class SolveReport:
    iterations: int
    residual: float
    norms: dict
    bounds: list
    spectral_tail: float
    aux_iterations: int = 0
    residual_history: list = field(default_factory=list)
    energy_history: list = field(default_factory=list)
    coercivity_history: list = field(default_factory=list)

    @property
    def all_passed(self) -> bool:
        return all(b.passed for b in self.bounds)


# ------------------------------------------------------------ CG

class _System:
    """``A = W + K`` on one grid with the spectral preconditioner."""

    def __init__(self, W: np.ndarray, grid: OmegaGrid, M: float, real: bool):
        self.W = W
        self.grid = grid
        self.m = multiplier_table(grid.spectral).values
        self.pdiag = 1.0 / (self.m + 0.5 * M)
        self.real = real

    def _cast(self, v):
        return v.real if self.real else v

    def apply(self, v):
        return self.W * v + self._cast(apply_periodic(v, self.grid))

    def precondition(self, r):
        return self._cast(_centered_ifft(self.pdiag * _centered_fft(r)))

    def half_norm_sq(self, v):
        U = self.grid.h * _centered_fft(v)
        xi = self.grid.spectral.xi
        return self.grid.spectral.dxi / math.pi * float(np.sum(np.sqrt(1.0 + 4.0 * xi * xi) * np.abs(U) ** 2))


@dataclass
class _CGResult:
    x: np.ndarray
    iterations: int
    residuals: list
    energies: list
    coercivity: list


def _pcg(sys: _System, b: np.ndarray, tol: float, max_iter: int, monitor: bool) -> _CGResult:
    h = sys.grid.h
    x = np.zeros_like(b)
    if not np.any(b):
        return _CGResult(x, 0, [0.0], [0.0], [])
    r = b.copy()
    z = sys.precondition(r)
    rz = float(np.vdot(r, z).real)
    bnorm = math.sqrt(rz)
    p = z.copy()
    residuals, energies, coercivity = [1.0], [0.0], []
    for it in range(1, max_iter + 1):
        Ap = sys.apply(p)
        alpha = rz / float(np.vdot(p, Ap).real)
        x = x + alpha * p
        r = r - alpha * Ap
        # E(u) = 1/2 [u,u] - Re (f,u) = -1/2 Re <u, g + r>
        energies.append(-0.5 * h * float(np.vdot(x, b + r).real))
        if monitor:
            form = h * float(np.vdot(x, b - r).real)
            coercivity.append(form / (INV_PI * sys.half_norm_sq(x)))
        z = sys.precondition(r)
        rz_new = float(np.vdot(r, z).real)
        rel = math.sqrt(max(rz_new, 0.0)) / bnorm
        residuals.append(rel)
        if rel <= tol:
            return _CGResult(x, it, residuals, energies, coercivity)
        p = z + (rz_new / rz) * p
        rz = rz_new
    raise ConvergenceError(f"CG did not reach tol={tol:g} in {max_iter} iterations "
                           f"(last relative residual {residuals[-1]:.3e})", history=residuals)


# ------------------------------------------------------------ solve

def spectral_tail(U) -> float:
    """Share of ``sum |U|^2`` carried by ``|xi| >= xi_max / 2``."""
    energy = np.abs(U.values) ** 2
    total = float(np.sum(energy))
    if total == 0.0:
        return 0.0
    xi = np.abs(U.grid.xi)
    return float(np.sum(energy[xi >= 0.5 * xi.max()])) / total


def solve_weak(spec: ProblemSpec, *, monitor: bool = False):
    """Solve the weak problem on ``spec.grid``.

    Parameters
    ----------
    spec : ProblemSpec
    monitor : bool
        Also record ``[u,u] / ((1/pi) ||u||_{1/2}^2)`` for every CG iterate
        (one extra FFT per iteration).

    Returns
    -------
    (GridFunction, SolveReport)
    """
    grid = spec.grid
    coeff = spec.coefficient
    W = coeff.weight(grid)
    f = spec.rhs()
    g = grid.weight * f.values
    real = bool(np.all(g.imag == 0))
    if real:
        g = g.real
    sys = _System(W, grid, coeff.M, real)

    main = _pcg(sys, g, spec.tol, spec.max_iter, monitor)
    u = main.x
    aux = 0
    if spec.tail_correction and np.any(u):
        tail = edge_tail(grid)
        Y = tail.defect.real if real else tail.defect
        Z = np.empty_like(Y)
        for k in range(Y.shape[1]):
            res = _pcg(sys, Y[:, k], spec.tol, spec.max_iter, False)
            Z[:, k] = res.x
            aux += res.iterations
        CZ = np.stack([tail.coefficients(Z[:, k]) for k in range(Z.shape[1])], axis=1)
        u = u - Z @ np.linalg.solve(np.eye(2) + CZ, tail.coefficients(u))

    # residual of the system actually solved
    if spec.tail_correction:
        Au = W * u + sys._cast(edge_tail(grid).apply(u))
    else:
        Au = sys.apply(u)
    r = g - Au
    gpg = float(np.vdot(g, sys.precondition(g)).real)
    residual = math.sqrt(max(float(np.vdot(r, sys.precondition(r)).real), 0.0) / gpg) if gpg > 0 else 0.0

    sol = GridFunction(grid, u)
    report = _report(sol, f, spec, main.iterations, residual, aux, main)
    return sol, report


def _norms(u: GridFunction, f: GridFunction) -> dict:
    U = forward(u)
    return {
        "l2_tilde": l2_tilde_norm(u),
        "h_half": hs_norm(U, 0.5),
        "h_one": hs_norm(U, 1.0),
        "h_one_spatial": h1_norm_spatial(u),
        "f_l2r": l2r_norm(f),
    }


def _report(u, f, spec, iterations, residual, aux, cg: _CGResult) -> SolveReport:
    U = forward(u)
    tail = spectral_tail(U)
    if tail > TAIL_WARN:
        log.warning("spectral tail %.3e exceeds %.0e; the grid may under-resolve u", tail, TAIL_WARN)
    return SolveReport(
        iterations=iterations,
        residual=residual,
        norms=_norms(u, f),
        bounds=verify_bounds(u, spec, f=f),
        spectral_tail=tail,
        aux_iterations=aux,
        residual_history=cg.residuals,
        energy_history=cg.energies,
        coercivity_history=cg.coercivity,
    )


# ------------------------------------------------------------ bounds

def c2_constant(M: float) -> float:
    """``pi^2 (2 + pi M / 2)``."""
    return math.pi ** 2 * (2.0 + 0.5 * math.pi * M)


def c_theta(theta: float, M: float) -> float:
    """Interpolated constant ``pi^(1 - 2 theta) * C2^theta`` for ``0 <= theta <= 1/2``."""
    if not 0.0 <= theta <= 0.5:
        raise ValueError(f"theta must lie in [0, 1/2], got {theta}")
    return math.pi ** (1.0 - 2.0 * theta) * c2_constant(M) ** theta


def verify_bounds(u: GridFunction, spec: ProblemSpec, *, f: Optional[GridFunction] = None) -> list:
    """Evaluate every a-priori bound for a converged solution.

    ``||f||_{L2,r}`` is the exact dual norm of ``f`` against ``L~2``; it
    majorises every dual norm against ``H~^t``, ``t >= 0``, and stands in
    for them on all right-hand sides below. Failures are recorded, not raised.
    """
    f = spec.rhs() if f is None else f
    M = spec.coefficient.M
    grid = u.grid
    U = forward(u)
    fn = l2r_norm(f)
    c2 = c2_constant(M)
    W = spec.coefficient.weight(grid)
    h1 = hs_norm(U, 1.0)
    out = [
        BoundRecord("h_half", hs_norm(U, 0.5), math.pi * fn),
        BoundRecord("potential", grid.h * float(np.sum(W * np.abs(u.values) ** 2)), 0.25 * math.pi * fn * fn),
        BoundRecord("h_one_squared", h1 * h1, c2 * fn * fn),
    ]
    for theta in (0.0, 0.25, 0.5):
        out.append(BoundRecord(f"interpolation_theta_{theta:g}", hs_norm(U, 0.5 + theta), c_theta(theta, M) * fn))
    for s in (0.0, 0.25, 0.5, 0.75, 1.0):
        out.append(BoundRecord(f"scale_s_{s:g}", hs_norm(U, s), math.sqrt(c2) * fn))
    sup = sup_norm(u)
    out.append(BoundRecord("embedding", sup, embedding_constant(1.0) * h1))
    for theta in (0.25, 0.5):
        out.append(BoundRecord(f"sup_theta_{theta:g}", sup,
                               embedding_constant(0.5 + theta) * c_theta(theta, M) * fn))
    return out


def boundary_decay(u: GridFunction) -> float:
    """``max(|u(x_0)|, |u(x_{n-1})|)``, the discrete trace at the endpoints."""
    return float(max(abs(u.values[0]), abs(u.values[-1])))


# ------------------------------------------------------------ oracle

def solve_glauert(spec: ProblemSpec, N: int) -> GlauertExpansion:
    """Collocation solve in the sine basis at ``theta_m = m pi / (N + 1)``.

    Independent of the FFT route; intended for ``N <= 128``.
    """
    if int(N) < 1:
        raise ValueError(f"N must be >= 1, got {N}")
    N = int(N)
    if isinstance(spec.f, GridFunction):
        raise SpecError("the collocation oracle needs f as a callable of x")
    theta = np.arange(1, N + 1) * math.pi / (N + 1)
    x = np.cos(theta)
    vvals = spec.coefficient.V_theta(theta)
    if not np.all(np.isfinite(vvals)):
        raise SpecError("V is not finite at the collocation nodes")
    A = _kernels.glauert_matrix(vvals, theta, N)
    rhs = np.asarray(spec.f(x), dtype=np.complex128)
    if rhs.shape == ():
        rhs = np.full(N, rhs)
    cond = float(np.linalg.cond(A))
    if not math.isfinite(cond) or cond > 1e14:
        raise OracleError(f"collocation matrix is singular (cond ~ {cond:.3e})", condition=cond)
    try:
        coeffs = np.linalg.solve(A, rhs)
    except np.linalg.LinAlgError as exc:
        raise OracleError(f"collocation solve failed: {exc}", condition=cond) from exc
    if np.all(coeffs.imag == 0):
        coeffs = coeffs.real
    return GlauertExpansion(coeffs)


__all__ = [
    "BoundRecord", "CoefficientSpec", "ProblemSpec", "SolveReport", "boundary_decay",
    "c2_constant", "c_theta", "solve_glauert", "solve_weak", "spectral_tail", "verify_bounds",
]
