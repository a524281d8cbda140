"""Hot evaluation loops for products of power factors.

Everything here is a plain function of ndarrays so it can be compiled
with numba when available.  Set ``ORTHOSCHERK_KERNELS=numpy`` to force
the pure-numpy fallback (used in tests and on machines without numba);
``ORTHOSCHERK_KERNELS=numba`` insists on the compiled path and fails
loudly if numba is missing.
"""

from __future__ import annotations

import os

import numpy as np

try:
    from numba import njit

    _HAVE_NUMBA = True
except ImportError:
    _HAVE_NUMBA = False


def _abs_product(x, t, half_a):
    """prod_i |x - t_i|**half_a[i] for each real x, via log accumulation."""
    n = x.shape[0]
    m = t.shape[0]
    out = np.empty(n)
    for k in range(n):
        s = 0.0
        for i in range(m):
            s += half_a[i] * np.log(np.abs(x[k] - t[i]))
        out[k] = np.exp(s)
    return out


def _complex_product(z, z0, args0, t, half_a):
    """prod_i (z - t_i)**half_a[i] with branches continued from z0.

    args0[i] is the argument of (z0 - t_i) on the caller's branch.  Each
    factor's argument at z is args0[i] + Arg((z - t_i)/(z0 - t_i)), which
    is exact provided the straight segment z0 -> z stays clear of t_i.
    """
    n = z.shape[0]
    m = t.shape[0]
    out = np.empty(n, dtype=np.complex128)
    for k in range(n):
        lr = 0.0
        li = 0.0
        for i in range(m):
            dr = z[k].real - t[i].real
            di = z[k].imag - t[i].imag
            d0r = z0.real - t[i].real
            d0i = z0.imag - t[i].imag
            lr += half_a[i] * 0.5 * np.log(dr * dr + di * di)
            # Arg of (z - t_i)/(z0 - t_i) without forming the quotient.
            num_i = di * d0r - dr * d0i
            num_r = dr * d0r + di * d0i
            li += half_a[i] * (args0[i] + np.arctan2(num_i, num_r))
        out[k] = np.exp(lr) * complex(np.cos(li), np.sin(li))
    return out


_choice = os.environ.get("ORTHOSCHERK_KERNELS", "")
if _choice == "":
    _choice = "numba" if _HAVE_NUMBA else "numpy"
if _choice not in ("numba", "numpy"):
    raise ImportError(f"ORTHOSCHERK_KERNELS must be 'numba' or 'numpy', got {_choice!r}")
if _choice == "numba" and not _HAVE_NUMBA:
    raise ImportError("ORTHOSCHERK_KERNELS=numba but numba is not importable")

BACKEND = _choice

if BACKEND == "numba":
    abs_product = njit(cache=True)(_abs_product)
    complex_product = njit(cache=True)(_complex_product)
else:
    abs_product = _abs_product
    complex_product = _complex_product


def thread_count() -> int:
    """Worker cap for the few thread pools in the package (>= 1)."""
    raw = os.environ.get("ORTHOSCHERK_THREADS", "")
    if not raw:
        return min(4, os.cpu_count() or 1)
    return max(1, int(raw))
