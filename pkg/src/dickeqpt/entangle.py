"""Pairwise and atom-field entanglement of a ground branch.

Tracing the field out of ``sum_s A_s |D_s>|p-s>`` leaves the diagonal Dicke
mixture ``sum_s |A_s|^2 |D_s><D_s|``, so every atomic quantity here is a
function of the weights ``w_s = |A_s|^2`` alone.
"""

import math
from dataclasses import dataclass

import numpy as np

from .phase import ground_branch

PSD_ATOL = 1e-10
# eigenvalues of rho at or below this are treated as exact zeros
RANK_ATOL = 1e-12

# sigma_y (x) sigma_y in the {gg, ge, eg, ee} basis
SIGMA_YY = np.array(
    [
        [0.0, 0.0, 0.0, -1.0],
        [0.0, 0.0, 1.0, 0.0],
        [0.0, 1.0, 0.0, 0.0],
        [-1.0, 0.0, 0.0, 0.0],
    ]
)


def dicke_weights(branch):
    return branch.amplitudes**2


def two_atom_rdm(weights, n_atoms):
    """Reduced state of any two atoms of a symmetric Dicke mixture.

    Basis order is ``gg, ge, eg, ee``; the only coherence is ``ge <-> eg``.
    """
    if n_atoms < 2:
        raise ValueError("two-atom reduced state needs at least two atoms")
    w = np.asarray(weights, dtype=np.float64)
    if w.size > n_atoms + 1:
        raise ValueError(f"{w.size} weights for only {n_atoms} atoms")
    s = np.arange(w.size, dtype=np.float64)
    n = float(n_atoms)
    pairs = n * (n - 1)
    gg = np.dot(w, (n - s) * (n - s - 1)) / pairs
    mixed = np.dot(w, s * (n - s)) / pairs
    ee = np.dot(w, s * (s - 1)) / pairs
    rho = np.zeros((4, 4))
    rho[0, 0] = gg
    rho[1, 1] = rho[2, 2] = rho[1, 2] = rho[2, 1] = mixed
    rho[3, 3] = ee
    return rho


def check_density(rho, atol=1e-12):
    rho = np.asarray(rho)
    if rho.shape != (4, 4):
        raise ValueError(f"expected a 4x4 two-qubit density matrix, got shape {rho.shape}")
    if not np.allclose(rho, rho.conj().T, atol=atol):
        raise ValueError("density matrix is not Hermitian")
    if abs(np.trace(rho).real - 1.0) > atol:
        raise ValueError(f"density matrix trace {np.trace(rho).real!r} != 1")
    return rho


def wootters_lambdas(rho):
    """Square roots of the eigenvalues of ``rho @ rho_tilde``, descending.

    Computed as singular values of ``F^T (sy x sy) F`` with ``rho = F F^dagger``;
    this avoids square-rooting eigenvalues that are zero up to rounding.
    """
    rho = check_density(rho)
    mu, vecs = np.linalg.eigh(rho)
    if mu.min() < -PSD_ATOL:
        raise ValueError(f"density matrix has negative eigenvalue {mu.min():.3e}")
    keep = mu > RANK_ATOL
    factor = vecs[:, keep] * np.sqrt(mu[keep])
    lam = np.zeros(4)
    if keep.any():
        tau = factor.T @ SIGMA_YY @ factor
        lam[: tau.shape[0]] = np.linalg.svd(tau, compute_uv=False)
    return np.sort(lam)[::-1]


def concurrence(rho):
    lam = wootters_lambdas(rho)
    return float(min(1.0, max(0.0, lam[0] - lam[1] - lam[2] - lam[3])))


def closed_form_concurrence(n_atoms, p):
    """Analytic pair concurrence of ground branches p = 0, 1, 2."""
    if n_atoms < 2:
        raise ValueError("concurrence needs at least two atoms")
    n = float(n_atoms)
    if p == 0:
        return 0.0
    if p == 1:
        return 1.0 / n
    if p == 2:
        return (4 * n - 5 - 2 * math.sqrt(2 * n * n - 5 * n + 4)) / (n * (2 * n - 1))
    raise ValueError(f"closed form known only for p in 0..2, got {p!r}")


def tau_atoms(c, n_atoms):
    """Pairwise entanglement summed over all ``N (N - 1) / 2`` atom pairs."""
    return c * c * n_atoms * (n_atoms - 1) / 2


def atom_field_entropy(weights):
    """Von Neumann entropy (nats) of the atoms, equal to that of the field."""
    w = np.asarray(weights, dtype=np.float64)
    w = w[w > 0]
    return float(max(0.0, -np.dot(w, np.log(w))))


@dataclass(frozen=True)
class EntanglementReport:
    concurrence: float
    tau_a: float
    entropy_nats: float


def entanglement_report(branch, n_atoms):
    w = dicke_weights(branch)
    if n_atoms >= 2:
        c = concurrence(two_atom_rdm(w, n_atoms))
        tau = tau_atoms(c, n_atoms)
    else:
        c = tau = math.nan
    return EntanglementReport(c, tau, atom_field_entropy(w))


# ---------------------------------------------------------------------------
# monogamy at p = 1, where the field only visits |0> and |1>
# ---------------------------------------------------------------------------

def single_atom_rdm(weights, n_atoms):
    w = np.asarray(weights, dtype=np.float64)
    excited = np.dot(w, np.arange(w.size)) / n_atoms
    return np.diag([1.0 - excited, excited])


def field_rdm_p1(branch):
    # basis |0>, |1>; vacuum pairs with s = 1
    a0, a1 = branch.amplitudes
    return np.diag([a1 * a1, a0 * a0])


def atom_field_rdm_p1(branch, n_atoms):
    """Joint state of one atom and the field qubit for the p = 1 ground branch.

    Basis order ``(atom, field)`` in ``{g0, g1, e0, e1}``.
    """
    a0, a1 = branch.amplitudes
    n = float(n_atoms)
    # |Xi> = a0 |g..g>|1> + a1 |D_1>|0>, and |D_1> splits as
    # |e>|g..g>/sqrt(N) + sqrt((N-1)/N) |g>|D_1 of the others>
    pure = np.array([0.0, a0, a1 / math.sqrt(n), 0.0])
    rho = np.outer(pure, pure)
    rho[0, 0] += a1 * a1 * (n - 1) / n
    return rho


def qubit_tangle(rho1):
    return float(4.0 * np.linalg.det(rho1).real)


@dataclass(frozen=True)
class CKWReport:
    n_atoms: int
    field_tangle: float
    field_concurrence_sq_sum: float
    atom_tangle: float
    atom_concurrence_sq_sum: float
    c_field_atom: float
    c_atom_atom: float

    @property
    def field_residual(self):
        return self.field_tangle - self.field_concurrence_sq_sum

    @property
    def atom_residual(self):
        return self.atom_tangle - self.atom_concurrence_sq_sum


def ckw_report_p1(n_atoms, branch=None, backend=None):
    """Monogamy bookkeeping for the one-excitation ground branch."""
    if branch is None:
        branch = ground_branch(n_atoms, 1, backend)
    if branch.p != 1:
        raise ValueError(f"CKW report is defined for the p=1 branch only, got p={branch.p}")
    if n_atoms < 1:
        raise ValueError("need at least one atom")
    w = dicke_weights(branch)
    c_fa = concurrence(atom_field_rdm_p1(branch, n_atoms))
    c_aa = concurrence(two_atom_rdm(w, n_atoms)) if n_atoms >= 2 else 0.0
    return CKWReport(
        n_atoms=n_atoms,
        field_tangle=qubit_tangle(field_rdm_p1(branch)),
        field_concurrence_sq_sum=n_atoms * c_fa**2,
        atom_tangle=qubit_tangle(single_atom_rdm(w, n_atoms)),
        atom_concurrence_sq_sum=(n_atoms - 1) * c_aa**2 + c_fa**2,
        c_field_atom=c_fa,
        c_atom_atom=c_aa,
    )
