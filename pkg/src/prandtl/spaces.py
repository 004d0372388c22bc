"""Norms of the weighted Sobolev scale and the embedding constant."""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import _kernels
from .errors import DomainError
from .grid import GridFunction, SpectralFunction
from .ptransform import forward


@dataclass(frozen=True)
class NormReport:
    s: float
    value: float
    side: str  # "spectral" or "spatial"


def hs_norm(U: SpectralFunction, s: float) -> float:
    """Discrete ``sqrt((1/pi) * dxi * sum (1 + 4 xi^2)^s |U|^2)``."""
    if not s >= 0:
        raise DomainError(f"smoothness index must be >= 0, got {s}")
    xi = U.grid.xi
    w = (1.0 + 4.0 * xi * xi) ** s
    return math.sqrt(U.grid.dxi / math.pi * float(np.sum(w * np.abs(U.values) ** 2)))


def hs_norm_report(u: GridFunction, s: float) -> NormReport:
    return NormReport(float(s), hs_norm(forward(u), s), "spectral")


def l2_tilde_norm(u: GridFunction) -> float:
    """``sqrt(int |u|^2 dx / (1 - x^2))``, i.e. the plain L2 norm in omega."""
    return math.sqrt(u.grid.h * float(np.sum(np.abs(u.values) ** 2)))


def h1_norm_spatial(u: GridFunction) -> float:
    """Spatial H~1 norm from 4th-order finite differences in omega.

    Uses ``(1 - x^2) d/dx = d/d omega``, so no transform is involved; this is
    the independent check on ``hs_norm(forward(u), 1)``.
    """
    grid = u.grid
    du = _kernels.fd4_derivative(u.values, grid.h)
    total = np.sum(np.abs(u.values) ** 2) + np.sum(np.abs(du) ** 2)
    return math.sqrt(grid.h * float(total))


def l2r_norm(f: GridFunction) -> float:
    """``sqrt(int (1 - x^2) |f|^2 dx)``; with ``dx = (1 - x^2) d omega``."""
    grid = f.grid
    return math.sqrt(grid.h * float(np.sum(grid.weight ** 2 * np.abs(f.values) ** 2)))


def weighted_l2_norm(g: GridFunction) -> float:
    """Same as :func:`l2r_norm` but for data already multiplied by ``1 - x^2``."""
    return math.sqrt(g.grid.h * float(np.sum(np.abs(g.values) ** 2)))


def embedding_constant(s: float) -> float:
    """Sup-norm embedding constant ``sqrt(Gamma(s - 1/2) / (2 sqrt(pi) Gamma(s)))``.

    Valid for ``s > 1/2``; the constant blows up as ``s -> 1/2``.
    """
    if not s > 0.5:
        raise DomainError(f"embedding constant needs s > 1/2, got {s}")
    log_ratio = math.lgamma(s - 0.5) - math.lgamma(s)
    return math.sqrt(math.exp(log_ratio) / (2.0 * math.sqrt(math.pi)))


def sup_norm(u: GridFunction) -> float:
    return float(np.max(np.abs(u.values)))
