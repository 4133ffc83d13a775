"""Excitation-number blocks of the resonant Tavis-Cummings Hamiltonian.

Inside the sector with ``p`` total excitations the Hamiltonian is spanned by
``|D_s> |p - s>`` (symmetric Dicke state with ``s`` excited atoms, ``p - s``
photons), ``s = 0 .. min(p, N)``.  In that basis

    H^(p) = (p - N/2) * omega * I + kappa * T^(p)

with ``T^(p)`` real symmetric tridiagonal, zero diagonal and off-diagonal
``t_s = sqrt((s + 1) (N - s) (p - s))``.
"""

from dataclasses import dataclass

import numpy as np

MAX_ATOMS = 10**6
MAX_EXCITATIONS = 10**12


@dataclass(frozen=True)
class ModelParams:
    """Atom count, common atom/field frequency and coupling (hbar = 1)."""

    n_atoms: int
    omega: float = 1.0
    kappa: float = 0.0

    def __post_init__(self):
        if int(self.n_atoms) != self.n_atoms or self.n_atoms < 1:
            raise ValueError(f"n_atoms must be a positive integer, got {self.n_atoms!r}")
        if self.n_atoms > MAX_ATOMS:
            raise ValueError(f"n_atoms above supported limit {MAX_ATOMS}")
        if not self.omega > 0 or not np.isfinite(self.omega):
            raise ValueError(f"omega must be positive and finite, got {self.omega!r}")
        if not self.kappa >= 0 or not np.isfinite(self.kappa):
            raise ValueError(f"kappa must be non-negative and finite, got {self.kappa!r}")
        object.__setattr__(self, "n_atoms", int(self.n_atoms))
        object.__setattr__(self, "omega", float(self.omega))
        object.__setattr__(self, "kappa", float(self.kappa))

    def with_kappa(self, kappa):
        return ModelParams(self.n_atoms, self.omega, kappa)


@dataclass(frozen=True, eq=False)
class SubspaceBlock:
    n_atoms: int
    p: int
    dim: int
    e0: float
    offdiag: np.ndarray

    def coupling_matrix(self):
        """Dense ``T^(p)``; meant for small blocks and cross-checks."""
        return np.diag(self.offdiag, 1) + np.diag(self.offdiag, -1)

    def hamiltonian(self, kappa):
        return self.e0 * np.eye(self.dim) + kappa * self.coupling_matrix()


def _check_p(p):
    if int(p) != p or p < 0:
        raise ValueError(f"excitation number must be a non-negative integer, got {p!r}")
    if p > MAX_EXCITATIONS:
        raise ValueError(f"excitation number above supported limit {MAX_EXCITATIONS}")
    return int(p)


def block_dim(n_atoms, p):
    return min(p, n_atoms) + 1


def coupling_offdiag(n_atoms, p):
    """``sqrt((s+1)(N-s)(p-s))`` for ``s = 0 .. dim-2``, formed in floating point."""
    p = _check_p(p)
    s = np.arange(block_dim(n_atoms, p) - 1, dtype=np.float64)
    return np.sqrt((s + 1.0) * (float(n_atoms) - s) * (float(p) - s))


def build_block(params, p):
    p = _check_p(p)
    n = params.n_atoms
    t = coupling_offdiag(n, p)
    t.flags.writeable = False
    return SubspaceBlock(
        n_atoms=n,
        p=p,
        dim=block_dim(n, p),
        e0=(p - n / 2) * params.omega,
        offdiag=t,
    )


def excitation_number_of(s, p, n_atoms=None):
    """Label of basis vector ``s`` in block ``p``: (excited atoms, photons)."""
    p = _check_p(p)
    top = p if n_atoms is None else min(p, n_atoms)
    if int(s) != s or not 0 <= s <= top:
        raise ValueError(f"basis index {s!r} outside 0..{top}")
    return int(s), p - int(s)
