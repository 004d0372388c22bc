"""Discrete interval transform, its inverse, Parseval pairing and convolutions.

In omega coordinates the kernel ``((1 - y) / (1 + y))**(i xi)`` is
``exp(-2 i xi omega)`` and ``dy / (1 - y^2) = d omega``, so the transform is
a Fourier integral of ``u(tanh omega)``. The trapezoidal rule on the uniform
omega grid turns it into a centred DFT::

    U_k = h * sum_j u_j exp(-2 i xi_k omega_j)
    u_j = (dxi / pi) * sum_k U_k exp(+2 i xi_k omega_j)

Because ``n/2`` is even for every admissible ``n``, the centring phases reduce
to ``fftshift``/``ifftshift`` and the pair is an exact discrete inverse.
"""
from __future__ import annotations

import math
from typing import Callable

import numpy as np

from . import _kernels
from .errors import GridError
from .grid import GridFunction, OmegaGrid, SpectralFunction, SpectralGrid

# h * sum |v_1| above this is treated as "not integrable"
L1_LIMIT = 1e12


def _centered_fft(values):
    return np.fft.fftshift(np.fft.fft(np.fft.ifftshift(values)))


def _centered_ifft(values):
    return np.fft.fftshift(np.fft.ifft(np.fft.ifftshift(values)))


def forward(u: GridFunction, spectral: SpectralGrid | None = None) -> SpectralFunction:
    """Transform image ``U(xi_k)`` of a grid function."""
    grid = u.grid
    sgrid = grid.spectral
    if spectral is not None and not spectral.pairs_with(grid):
        raise GridError("spectral grid is not the dual of the function's omega grid")
    return SpectralFunction(sgrid, grid.h * _centered_fft(u.values))


def inverse(U: SpectralFunction, grid: OmegaGrid) -> GridFunction:
    """Inverse transform onto ``grid`` (which must be dual to ``U.grid``)."""
    if not U.grid.pairs_with(grid):
        raise GridError("spectral grid is not the dual of the target omega grid")
    return GridFunction(grid, _centered_ifft(U.values) / grid.h)


def spectral_function(fn: Callable, grid: OmegaGrid) -> SpectralFunction:
    """Sample a closed-form image ``fn(xi)`` on the dual grid of ``grid``."""
    sgrid = grid.spectral
    return SpectralFunction(sgrid, np.asarray(fn(sgrid.xi), dtype=np.complex128))


def pairing(u: GridFunction, g: GridFunction) -> complex:
    """Weighted inner product ``int u conj(g) dx / (1 - x^2)``.

    On the omega grid this is the plain sum ``h * sum u_j conj(g_j)``.
    """
    if not u.grid.same_as(g.grid):
        raise GridError("pairing of functions on different grids")
    return complex(u.grid.h * np.vdot(g.values, u.values))


def spectral_pairing(U: SpectralFunction, G: SpectralFunction) -> complex:
    """``(1/pi) int U conj(G) d xi`` by the rectangle rule on the xi grid."""
    if not U.grid.same_as(G.grid):
        raise GridError("pairing of spectra on different grids")
    return complex(U.grid.dxi / math.pi * np.vdot(G.values, U.values))


def derivative_image(U: SpectralFunction, order: int = 1) -> SpectralFunction:
    """Image of ``((1 - y^2) d/dy)^order u``, i.e. ``(2 i xi)^order U``."""
    return SpectralFunction(U.grid, (2j * U.grid.xi) ** order * U.values)


def _l1_check(v: GridFunction):
    total = v.grid.h * np.sum(np.abs(v.values))
    if not np.isfinite(total) or total > L1_LIMIT:
        raise GridError(f"kernel is not integrable in the weighted L1 sense (h*sum|v| = {total:.3e})")


def _pad_values(values, factor: int) -> np.ndarray:
    n = values.shape[0]
    out = np.zeros(n * factor, dtype=np.complex128)
    off = (factor - 1) * n // 2
    out[off:off + n] = values
    return out


def _spectral_product(u: GridFunction, v: GridFunction, pad: int, derivative: bool) -> GridFunction:
    if not u.grid.same_as(v.grid):
        raise GridError("convolution of functions on different grids")
    _l1_check(v)
    grid = u.grid
    if pad == 1:
        U = grid.h * _centered_fft(u.values)
        V = grid.h * _centered_fft(v.values)
        xi = grid.spectral.xi
        prod = U * V * (2j * xi if derivative else 1.0)
        return GridFunction(grid, _centered_ifft(prod) / grid.h)
    if pad < 1:
        raise ValueError("pad must be a positive integer")
    uu = _pad_values(u.values, pad)
    vv = _pad_values(v.values, pad)
    h, nbig = grid.h, grid.n * pad
    xi = (np.arange(nbig) - nbig // 2) * (math.pi / (nbig * h))
    prod = (h * _centered_fft(uu)) * (h * _centered_fft(vv)) * (2j * xi if derivative else 1.0)
    out = _centered_ifft(prod) / h
    off = (pad - 1) * grid.n // 2
    return GridFunction(grid, out[off:off + grid.n])


def convolve(u: GridFunction, v: GridFunction, pad: int = 1) -> GridFunction:
    """Interval convolution whose image is ``U * V``.

    In x this is ``int u(x) v((y - x) / (1 - x y)) dx / (1 - x^2)``, an
    ordinary convolution in omega. ``pad > 1`` zero-pads by that factor to
    suppress periodic wrap-around.
    """
    return _spectral_product(u, v, pad, derivative=False)


def convolve_derivative(u: GridFunction, v: GridFunction, pad: int = 1) -> GridFunction:
    """Convolution of ``u'`` with ``v``; its image is ``2 i xi U V``."""
    return _spectral_product(u, v, pad, derivative=True)


def direct_convolution(u: GridFunction, v: Callable) -> GridFunction:
    """Brute-force double sum for the interval convolution.

    ``v`` is a callable of x; it is evaluated at ``tanh((i - j) h)``, the
    Moebius difference ``(y - x) / (1 - x y)`` of two grid nodes. This is an
    O(n^2) oracle that never touches the FFT. For the derivative variant pass
    the samples of ``(1 - x^2) u'(x)`` as ``u``.
    """
    grid = u.grid
    n, h = grid.n, grid.h
    shifts = np.arange(-(n - 1), n) * h
    kern = np.asarray(v(np.tanh(shifts)), dtype=np.complex128)
    if kern.shape == ():
        kern = np.full(2 * n - 1, kern)
    return GridFunction(grid, _kernels.direct_convolution(u.values, kern, h))
