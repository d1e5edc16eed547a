"""Hot loops: Hermite recurrences evaluated over whole coordinate arrays.

Each kernel exists twice, a numba ``@njit`` version and a plain numpy
version with identical results.  The numba path is used when numba imports
and ``HGSQUEEZE_DISABLE_NUMBA`` is unset (or ``0``); set it to ``1`` to force
the numpy fallback.
"""

import os

import numpy as np

_DISABLED = os.environ.get("HGSQUEEZE_DISABLE_NUMBA", "0").strip().lower() not in ("", "0", "false", "no")

try:
    from numba import njit

    HAS_NUMBA = True
except ImportError:  # pragma: no cover - numba is a declared dependency
    HAS_NUMBA = False

USE_NUMBA = HAS_NUMBA and not _DISABLED

_PI_QUARTER = np.pi ** -0.25


def _hermite_table_numpy(nmax, xi):
    out = np.empty((nmax + 1, xi.shape[0]))
    out[0] = 1.0
    if nmax >= 1:
        out[1] = 2.0 * xi
    for k in range(2, nmax + 1):
        out[k] = 2.0 * xi * out[k - 1] - 2.0 * (k - 1) * out[k - 2]
    return out


def _hg_table_numpy(nmax, xi):
    # orthonormal oscillator functions, H_k(xi) exp(-xi^2/2) / sqrt(2^k k! sqrt(pi))
    out = np.empty((nmax + 1, xi.shape[0]))
    out[0] = _PI_QUARTER * np.exp(-0.5 * xi * xi)
    if nmax >= 1:
        out[1] = np.sqrt(2.0) * xi * out[0]
    for k in range(2, nmax + 1):
        out[k] = np.sqrt(2.0 / k) * xi * out[k - 1] - np.sqrt((k - 1.0) / k) * out[k - 2]
    return out


if HAS_NUMBA:

    # k outer, points inner: each row is written contiguously and the
    # recurrence coefficients are computed once per order
    @njit(cache=True)
    def _hermite_table_numba(nmax, xi):
        m = xi.shape[0]
        out = np.empty((nmax + 1, m))
        for j in range(m):
            out[0, j] = 1.0
        if nmax >= 1:
            for j in range(m):
                out[1, j] = 2.0 * xi[j]
        for k in range(2, nmax + 1):
            b = 2.0 * (k - 1)
            for j in range(m):
                out[k, j] = 2.0 * xi[j] * out[k - 1, j] - b * out[k - 2, j]
        return out

    @njit(cache=True)
    def _hg_table_numba(nmax, xi):
        m = xi.shape[0]
        out = np.empty((nmax + 1, m))
        c0 = np.pi ** -0.25
        for j in range(m):
            out[0, j] = c0 * np.exp(-0.5 * xi[j] * xi[j])
        if nmax >= 1:
            r2 = np.sqrt(2.0)
            for j in range(m):
                out[1, j] = r2 * xi[j] * out[0, j]
        for k in range(2, nmax + 1):
            a = np.sqrt(2.0 / k)
            b = np.sqrt((k - 1.0) / k)
            for j in range(m):
                out[k, j] = a * xi[j] * out[k - 1, j] - b * out[k - 2, j]
        return out

else:  # pragma: no cover
    _hermite_table_numba = _hermite_table_numpy
    _hg_table_numba = _hg_table_numpy


def hermite_table(nmax, xi):
    """Rows ``H_0(xi) .. H_nmax(xi)`` (physicists' convention) for a 1-D array ``xi``."""
    xi = np.ascontiguousarray(xi, dtype=np.float64).ravel()
    if USE_NUMBA:
        return _hermite_table_numba(int(nmax), xi)
    return _hermite_table_numpy(int(nmax), xi)


def hg_table(nmax, xi):
    """Rows of orthonormal Hermite functions of the dimensionless coordinate ``xi``.

    Uses the normalized recurrence, so no factorials appear and orders far past
    the overflow point of ``2**n n!`` stay finite.
    """
    xi = np.ascontiguousarray(xi, dtype=np.float64).ravel()
    if USE_NUMBA:
        return _hg_table_numba(int(nmax), xi)
    return _hg_table_numpy(int(nmax), xi)
