"""Symmetric tridiagonal kernels with a numba path and a pure-numpy path.

All kernels work on a zero-diagonal matrix described by its off-diagonal
vector ``t`` (length ``n - 1``), which is the form of every excitation block.

The numba path is used when numba imports and ``DICKEQPT_DISABLE_NUMBA`` is
unset (or falsy).  Both paths stay importable so the tests and the benchmark
can run them side by side.
"""

import os

import numpy as np
from scipy.linalg import solve_banded

try:
    import numba
except ImportError:  # pragma: no cover
    numba = None

_TRUTHY = {"1", "true", "yes", "on"}

HAVE_NUMBA = numba is not None
NUMBA_DISABLED = os.environ.get("DICKEQPT_DISABLE_NUMBA", "").strip().lower() in _TRUTHY

# bisection needs ~60 halvings at double precision; anything past this is a bug
MAX_BISECT = 200
MULTISECT_POINTS = 7


def default_backend():
    return "numba" if HAVE_NUMBA and not NUMBA_DISABLED else "numpy"


def pivmin(t2):
    top = float(t2.max()) if t2.size else 1.0
    return np.finfo(np.float64).tiny * max(1.0, top)


if HAVE_NUMBA:
    _jit = numba.njit(cache=True, nogil=True)
else:  # pragma: no cover
    def _jit(func):
        return func


# ---------------------------------------------------------------------------
# scalar kernels (numba)
# ---------------------------------------------------------------------------

@_jit
def sturm_count(t2, x, piv):
    """Number of eigenvalues strictly below ``x``; ``t2`` holds squared off-diagonals."""
    n = t2.shape[0] + 1
    q = -x
    if abs(q) < piv:
        q = -piv
    count = 1 if q < 0.0 else 0
    for i in range(1, n):
        q = -x - t2[i - 1] / q
        if abs(q) < piv:
            q = -piv
        if q < 0.0:
            count += 1
    return count


@_jit
def kth_eigenvalue(t2, k, lo, hi, tol, piv):
    it = 0
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if mid <= lo or mid >= hi:
            break
        if sturm_count(t2, mid, piv) >= k + 1:
            hi = mid
        else:
            lo = mid
        it += 1
        if it > MAX_BISECT:
            return np.nan
    return 0.5 * (lo + hi)


@_jit
def lowest_eigenvalues(t2_rows, dims, lo, hi, tol, piv):
    """Lowest eigenvalue of each zero-padded row block; 1x1 blocks give 0."""
    m = dims.shape[0]
    out = np.empty(m)
    for r in range(m):
        if dims[r] <= 1:
            out[r] = 0.0
        else:
            out[r] = kth_eigenvalue(t2_rows[r, : dims[r] - 1], 0, lo[r], hi[r], tol[r], piv[r])
    return out


@_jit
def all_eigenvalues(t2, lo, hi, tol, piv):
    n = t2.shape[0] + 1
    out = np.empty(n)
    for k in range(n):
        out[k] = kth_eigenvalue(t2, k, lo, hi, tol, piv)
    return out


@_jit
def shifted_solve(t, sigma, rhs, piv):
    """Solve ``(T - sigma I) x = rhs`` by unpivoted LDL^T.

    ``sigma`` must sit below the spectrum so every pivot is positive.
    """
    n = rhs.shape[0]
    d = np.empty(n)
    y = np.empty(n)
    d[0] = -sigma
    if abs(d[0]) < piv:
        d[0] = piv
    y[0] = rhs[0]
    for i in range(1, n):
        l = t[i - 1] / d[i - 1]
        d[i] = -sigma - l * t[i - 1]
        if abs(d[i]) < piv:
            d[i] = piv
        y[i] = rhs[i] - l * y[i - 1]
    x = np.empty(n)
    x[n - 1] = y[n - 1] / d[n - 1]
    for i in range(n - 2, -1, -1):
        x[i] = (y[i] - t[i] * x[i + 1]) / d[i]
    return x


# ---------------------------------------------------------------------------
# vectorized numpy kernels
# ---------------------------------------------------------------------------

def sturm_counts_np(t2, xs, piv):
    """Sturm counts for an array of shifts at once."""
    xs = np.asarray(xs, dtype=np.float64)
    q = -xs
    q = np.where(np.abs(q) < piv, -piv, q)
    counts = (q < 0.0).astype(np.int64)
    for t2i in t2:
        q = -xs - t2i / q
        q = np.where(np.abs(q) < piv, -piv, q)
        counts += q < 0.0
    return counts


def lowest_eigenvalues_np(t2_rows, dims, lo, hi, tol, piv):
    """Multisection on every row at once; rows are zero-padded to a common width.

    Padding columns never add to a Sturm count below zero, and each row's
    arithmetic is elementwise, so a row's result does not depend on the batch.
    """
    lo = np.array(lo, dtype=np.float64)
    hi = np.array(hi, dtype=np.float64)
    frac = np.arange(1, MULTISECT_POINTS + 1) / (MULTISECT_POINTS + 1)
    active = dims > 1
    for _ in range(MAX_BISECT):
        active &= hi - lo > tol
        rows = np.flatnonzero(active)
        if rows.size == 0:
            break
        l, h = lo[rows], hi[rows]
        xs = l[:, None] + (h - l)[:, None] * frac
        p = piv[rows][:, None]
        q = -xs
        q = np.where(np.abs(q) < p, -p, q)
        counts = (q < 0.0).astype(np.int64)
        for col in range(int(dims[rows].max()) - 1):
            q = -xs - t2_rows[rows, col][:, None] / q
            q = np.where(np.abs(q) < p, -p, q)
            counts += q < 0.0
        above = counts >= 1
        idx = np.where(above.any(axis=1), above.argmax(axis=1), MULTISECT_POINTS)
        r = np.arange(rows.size)
        new_lo = np.where(idx == 0, l, xs[r, np.maximum(idx - 1, 0)])
        new_hi = np.where(idx == MULTISECT_POINTS, h, xs[r, np.minimum(idx, MULTISECT_POINTS - 1)])
        stalled = (new_lo == l) & (new_hi == h)
        lo[rows], hi[rows] = new_lo, new_hi
        active[rows[stalled]] = False
    else:
        return np.where(active, np.nan, np.where(dims > 1, 0.5 * (lo + hi), 0.0))
    return np.where(dims > 1, 0.5 * (lo + hi), 0.0)


def all_eigenvalues_np(t2, lo, hi, tol, piv):
    n = t2.size + 1
    k = np.arange(n)
    lo_v = np.full(n, lo)
    hi_v = np.full(n, hi)
    for _ in range(MAX_BISECT):
        if np.all(hi_v - lo_v <= tol):
            break
        mid = 0.5 * (lo_v + hi_v)
        below = sturm_counts_np(t2, mid, piv) >= k + 1
        hi_v = np.where(below, mid, hi_v)
        lo_v = np.where(below, lo_v, mid)
    else:
        return np.full(n, np.nan)
    return 0.5 * (lo_v + hi_v)


def shifted_solve_np(t, sigma, rhs, piv):
    n = rhs.size
    if n == 1:
        return rhs / max(-sigma, piv)
    ab = np.zeros((3, n))
    ab[0, 1:] = t
    ab[1, :] = -sigma
    ab[2, :-1] = t
    return solve_banded((1, 1), ab, rhs)


BACKENDS = {
    "numba": {
        "lowest_eigenvalues": lowest_eigenvalues,
        "all_eigenvalues": all_eigenvalues,
        "shifted_solve": shifted_solve,
    },
    "numpy": {
        "lowest_eigenvalues": lowest_eigenvalues_np,
        "all_eigenvalues": all_eigenvalues_np,
        "shifted_solve": shifted_solve_np,
    },
}


def get_backend(name=None):
    name = name or default_backend()
    if name not in BACKENDS:
        raise ValueError(f"unknown backend {name!r}; choose from {sorted(BACKENDS)}")
    if name == "numba" and not HAVE_NUMBA:  # pragma: no cover
        raise ValueError("numba backend requested but numba is not installed")
    return BACKENDS[name]
