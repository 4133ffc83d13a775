"""Extremal eigenpair of a zero-diagonal symmetric tridiagonal block.

The lowest eigenvalue comes from Sturm-sequence bisection, the eigenvector
from inverse iteration with a shift just below it.  Both are deterministic.
"""

from dataclasses import dataclass

import numpy as np

from . import _kernels

EIG_RTOL = 1e-13
SPECTRUM_ATOL = 1e-12
RESIDUAL_RTOL = 1e-10
# shift sits this far (relative to the Gershgorin radius) below the eigenvalue,
# well outside the bisection error so T - sigma I stays positive definite
SHIFT_GAP = 1e-10
MAX_INVERSE_ITER = 12
BATCH_ELEMENTS = 1 << 21


class ConvergenceError(RuntimeError):
    """Raised when a solver exhausts its iteration budget on a valid block."""


@dataclass(frozen=True, eq=False)
class GroundBranch:
    p: int
    k_slope: float
    amplitudes: np.ndarray

    @property
    def weights(self):
        return self.amplitudes**2

    @property
    def dim(self):
        return self.amplitudes.size


def gershgorin_radius(t):
    if t.size == 0:
        return 0.0
    rows = np.zeros(t.size + 1)
    rows[:-1] += t
    rows[1:] += t
    return float(rows.max())


def apply_coupling(t, x):
    """``T @ x`` for zero-diagonal tridiagonal ``T`` with off-diagonal ``t``."""
    y = np.zeros_like(x)
    y[:-1] += t * x[1:]
    y[1:] += t * x[:-1]
    return y


def _edge(radius):
    # a hair past the Gershgorin radius so the bracket strictly contains the spectrum
    return radius + radius * 4 * np.finfo(np.float64).eps + np.finfo(np.float64).tiny


def _bracket(t):
    radius = gershgorin_radius(t)
    return radius, _edge(radius)


def _readonly(a):
    a = np.ascontiguousarray(a, dtype=np.float64)
    a.flags.writeable = False
    return a


def lowest_eigenvalues(offdiags, backend=None):
    """Lowest eigenvalue of each block given by its off-diagonal vector.

    Blocks are bisected together in zero-padded batches; every result equals
    the one-block answer bit for bit.
    """
    offdiags = [np.asarray(t, dtype=np.float64) for t in offdiags]
    kern = _kernels.get_backend(backend)
    out = np.empty(len(offdiags))
    start = 0
    while start < len(offdiags):
        # cap each batch at about BATCH_ELEMENTS padded entries
        width = 0
        stop = start
        while stop < len(offdiags):
            w = max(width, offdiags[stop].size, 1)
            if stop > start and w * (stop - start + 1) > BATCH_ELEMENTS:
                break
            width = w
            stop += 1
        chunk = offdiags[start:stop]
        t2_rows = np.zeros((len(chunk), width))
        dims = np.empty(len(chunk), dtype=np.int64)
        radius = np.empty(len(chunk))
        piv = np.empty(len(chunk))
        for i, t in enumerate(chunk):
            t2_rows[i, : t.size] = t * t
            dims[i] = t.size + 1
            radius[i] = gershgorin_radius(t)
            piv[i] = _kernels.pivmin(t2_rows[i, : t.size])
        edge = _edge(radius)
        vals = kern["lowest_eigenvalues"](t2_rows, dims, -edge, np.zeros(len(chunk)), EIG_RTOL * radius, piv)
        if not np.all(np.isfinite(vals)):
            raise ConvergenceError("bisection did not converge")
        out[start:stop] = vals
        start = stop
    return out


def lowest_eigenvalue(t, backend=None):
    return float(lowest_eigenvalues([t], backend)[0])


def inverse_iteration(t, lam, backend=None):
    """Unit eigenvector for eigenvalue ``lam`` (the lowest one) of ``T``."""
    t = np.asarray(t, dtype=np.float64)
    n = t.size + 1
    kern = _kernels.get_backend(backend)
    radius = gershgorin_radius(t)
    sigma = lam - SHIFT_GAP * radius
    piv = _kernels.pivmin(t * t)
    tol = RESIDUAL_RTOL * max(1.0, abs(lam))

    # the lowest eigenvector of a positive off-diagonal chain alternates in
    # sign, so the alternating vector overlaps it far better than all-ones
    start = np.where(np.arange(n) % 2 == 0, 1.0, -1.0) / np.sqrt(n)
    x = start
    best = np.inf
    for _ in range(MAX_INVERSE_ITER):
        y = kern["shifted_solve"](t, sigma, x, piv)
        x = y / np.linalg.norm(y)
        res = float(np.abs(apply_coupling(t, x) - lam * x).max())
        if res <= tol:
            # one more sweep costs O(n) and buys full working precision
            y = kern["shifted_solve"](t, sigma, x, piv)
            x = y / np.linalg.norm(y)
            break
        if res >= best:
            # no progress: restart from a deterministically tilted vector
            start = start * (1.0 + 1e-8 * np.arange(n))
            x = start / np.linalg.norm(start)
        best = min(best, res)
    else:
        raise ConvergenceError(f"inverse iteration stalled (dim={n}, residual={res:.3e})")
    if x[0] < 0:
        x = -x
    return x


def ground_eigenpair(block, backend=None):
    """Lowest eigenvalue ``K^(p)`` of the coupling matrix and its eigenvector."""
    t = block.offdiag
    if block.dim == 1:
        return GroundBranch(block.p, 0.0, _readonly(np.ones(1)))
    lam = lowest_eigenvalue(t, backend)
    vec = inverse_iteration(t, lam, backend)
    return GroundBranch(block.p, lam, _readonly(vec))


def full_spectrum(block, backend=None):
    """All eigenvalues of ``T^(p)``, ascending."""
    t = np.asarray(block.offdiag, dtype=np.float64)
    if t.size == 0:
        return np.zeros(1)
    kern = _kernels.get_backend(backend)
    t2 = t * t
    radius, edge = _bracket(t)
    tol = min(EIG_RTOL * radius, SPECTRUM_ATOL)
    vals = kern["all_eigenvalues"](t2, -edge, edge, tol, _kernels.pivmin(t2))
    if not np.all(np.isfinite(vals)):
        raise ConvergenceError(f"bisection did not converge (dim={block.dim})")
    return np.asarray(vals)
