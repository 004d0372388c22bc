"""Hot inner loops, compiled with numba when available.

Every kernel exists twice: a plain-loop version that numba compiles, and a
vectorised numpy version. Set ``PRANDTL_DISABLE_NUMBA=1`` to force the numpy
path (useful for debugging and for environments without numba). Both
implementations are importable directly as ``numba_impl`` / ``numpy_impl``
so the test-suite and the benchmark can compare them.
"""
import math
import os
from types import SimpleNamespace

import numpy as np

try:
    import numba

    NUMBA_AVAILABLE = True
except ImportError:  # pragma: no cover - numba is a declared dependency
    NUMBA_AVAILABLE = False

USE_NUMBA = NUMBA_AVAILABLE and os.environ.get("PRANDTL_DISABLE_NUMBA", "0") not in ("1", "true", "yes")

INV_PI = 1.0 / math.pi
# below this |xi| the series 1/pi + pi xi^2/3 replaces xi*coth(pi xi)
_SERIES_CUTOFF = 1e-4
# coth(pi xi) == 1 to double precision beyond this |pi xi|
_SATURATION = 30.0


# --------------------------------------------------------------------------
# loop versions (compiled by numba if enabled, otherwise kept as reference)
# --------------------------------------------------------------------------

def _multiplier_loop(xi):
    out = np.empty(xi.shape[0])
    for k in range(xi.shape[0]):
        z = xi[k]
        a = abs(z)
        if a < _SERIES_CUTOFF:
            out[k] = INV_PI + math.pi * z * z / 3.0
        elif math.pi * a > _SATURATION:
            out[k] = a
        else:
            out[k] = z / math.tanh(math.pi * z)
    return out


def _direct_convolution_loop(u, kern, h):
    # w_i = h * sum_j u_j * kern[i - j + n - 1]
    n = u.shape[0]
    out = np.zeros(n, dtype=np.complex128)
    for i in range(n):
        acc = 0.0 + 0.0j
        for j in range(n):
            acc += u[j] * kern[i - j + n - 1]
        out[i] = h * acc
    return out


def _fd4_loop(u, h):
    n = u.shape[0]
    d = np.empty(n, dtype=np.complex128)
    for j in range(2, n - 2):
        d[j] = (u[j - 2] - 8.0 * u[j - 1] + 8.0 * u[j + 1] - u[j + 2]) / (12.0 * h)
    # one-sided 4th-order closures
    for j in range(2):
        d[j] = (-25.0 * u[j] + 48.0 * u[j + 1] - 36.0 * u[j + 2]
                + 16.0 * u[j + 3] - 3.0 * u[j + 4]) / (12.0 * h)
        k = n - 1 - j
        d[k] = (25.0 * u[k] - 48.0 * u[k - 1] + 36.0 * u[k - 2]
                - 16.0 * u[k - 3] + 3.0 * u[k - 4]) / (12.0 * h)
    return d


def _glauert_matrix_loop(vvals, theta, nmodes):
    m = theta.shape[0]
    out = np.empty((m, nmodes))
    for i in range(m):
        s = math.sin(theta[i])
        for k in range(nmodes):
            nn = k + 1
            sn = math.sin(nn * theta[i])
            out[i, k] = vvals[i] * sn + nn * sn / (2.0 * s)
    return out


def _glauert_image_loop(coeffs, theta):
    out = np.empty(theta.shape[0])
    for i in range(theta.shape[0]):
        s = math.sin(theta[i])
        acc = 0.0
        for k in range(coeffs.shape[0]):
            nn = k + 1
            acc += coeffs[k] * nn * math.sin(nn * theta[i])
        out[i] = acc / (2.0 * s)
    return out


def _sine_projection_loop(u1, theta, weight, h, nmodes):
    # A_n = (2/pi) * h * sum_j u1_j sin(n theta_j) weight_j
    out = np.zeros(nmodes, dtype=np.complex128)
    for k in range(nmodes):
        nn = k + 1
        acc = 0.0 + 0.0j
        for j in range(u1.shape[0]):
            acc += u1[j] * math.sin(nn * theta[j]) * weight[j]
        out[k] = 2.0 * h * acc / math.pi
    return out


# --------------------------------------------------------------------------
# numpy versions
# --------------------------------------------------------------------------

def _multiplier_np(xi):
    xi = np.asarray(xi, dtype=float)
    a = np.abs(xi)
    out = np.empty_like(xi)
    small = a < _SERIES_CUTOFF
    big = math.pi * a > _SATURATION
    mid = ~(small | big)
    out[small] = INV_PI + math.pi * xi[small] ** 2 / 3.0
    out[big] = a[big]
    out[mid] = xi[mid] / np.tanh(math.pi * xi[mid])
    return out


def _direct_convolution_np(u, kern, h):
    n = u.shape[0]
    full = np.convolve(u, kern)
    return h * full[n - 1:2 * n - 1]


def _fd4_np(u, h):
    u = np.asarray(u, dtype=np.complex128)
    n = u.shape[0]
    d = np.empty(n, dtype=np.complex128)
    d[2:-2] = (u[:-4] - 8.0 * u[1:-3] + 8.0 * u[3:-1] - u[4:]) / (12.0 * h)
    c = np.array([-25.0, 48.0, -36.0, 16.0, -3.0]) / (12.0 * h)
    for j in range(2):
        d[j] = c @ u[j:j + 5]
        k = n - 1 - j
        d[k] = -(c @ u[k - 4:k + 1][::-1])
    return d


def _glauert_matrix_np(vvals, theta, nmodes):
    nn = np.arange(1, nmodes + 1)
    sn = np.sin(np.outer(theta, nn))
    return vvals[:, None] * sn + nn * sn / (2.0 * np.sin(theta)[:, None])


def _glauert_image_np(coeffs, theta):
    nn = np.arange(1, coeffs.shape[0] + 1)
    return (np.sin(np.outer(theta, nn)) @ (coeffs * nn)) / (2.0 * np.sin(theta))


def _sine_projection_np(u1, theta, weight, h, nmodes):
    nn = np.arange(1, nmodes + 1)
    basis = np.sin(np.outer(nn, theta)) * weight
    return 2.0 * h * (basis @ np.asarray(u1, dtype=np.complex128)) / math.pi


numpy_impl = SimpleNamespace(
    multiplier=_multiplier_np,
    direct_convolution=_direct_convolution_np,
    fd4_derivative=_fd4_np,
    glauert_matrix=_glauert_matrix_np,
    glauert_image=_glauert_image_np,
    sine_projection=_sine_projection_np,
)

if NUMBA_AVAILABLE:
    _jit = numba.njit(cache=True, nogil=True)
    numba_impl = SimpleNamespace(
        multiplier=_jit(_multiplier_loop),
        direct_convolution=_jit(_direct_convolution_loop),
        fd4_derivative=_jit(_fd4_loop),
        glauert_matrix=_jit(_glauert_matrix_loop),
        glauert_image=_jit(_glauert_image_loop),
        sine_projection=_jit(_sine_projection_loop),
    )
else:  # pragma: no cover
    numba_impl = None


def _dispatch(name):
    np_fn = getattr(numpy_impl, name)
    if not USE_NUMBA:
        return np_fn
    nb_fn = getattr(numba_impl, name)
    return nb_fn


def multiplier(xi):
    xi = np.ascontiguousarray(np.atleast_1d(np.asarray(xi, dtype=float)))
    return _dispatch("multiplier")(xi)


def direct_convolution(u, kern, h):
    u = np.ascontiguousarray(u, dtype=np.complex128)
    kern = np.ascontiguousarray(kern, dtype=np.complex128)
    return _dispatch("direct_convolution")(u, kern, float(h))


def fd4_derivative(u, h):
    return _dispatch("fd4_derivative")(np.ascontiguousarray(u, dtype=np.complex128), float(h))


def glauert_matrix(vvals, theta, nmodes):
    return _dispatch("glauert_matrix")(np.ascontiguousarray(vvals, dtype=float),
                                       np.ascontiguousarray(theta, dtype=float), int(nmodes))


def glauert_image(coeffs, theta):
    return _dispatch("glauert_image")(np.ascontiguousarray(coeffs, dtype=float),
                                      np.ascontiguousarray(theta, dtype=float))


def sine_projection(u1, theta, weight, h, nmodes):
    return _dispatch("sine_projection")(np.ascontiguousarray(u1, dtype=np.complex128),
                                        np.ascontiguousarray(theta, dtype=float),
                                        np.ascontiguousarray(weight, dtype=float),
                                        float(h), int(nmodes))


def backend():
    """Name of the active kernel backend."""
    return "numba" if USE_NUMBA else "numpy"
