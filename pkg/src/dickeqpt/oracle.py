"""Brute-force dense model of N atoms and a truncated field mode.

Basis ordering is atom bitstring major, Fock number minor: the index of
``|b_0 b_1 ... b_{N-1}> |n>`` is ``int(b_0...b_{N-1}, 2) * (n_c + 1) + n``
with ``b = 0`` for ``g`` and ``b = 1`` for ``e``; atom 0 is the most
significant bit.  Only for small N; this is a correctness anchor.
"""

from dataclasses import dataclass
from functools import reduce
from math import comb

import numpy as np

MAX_ATOMS = 6
MAX_CUTOFF = 64
CUTOFF_WEIGHT_ATOL = 1e-10

FIELD = "field"

_SZ = np.diag([-1.0, 1.0])
_SPLUS = np.array([[0.0, 0.0], [1.0, 0.0]])  # |e><g|
_SMINUS = _SPLUS.T
_I2 = np.eye(2)


class CutoffTooSmall(RuntimeError):
    """Ground state leaks into the top Fock levels of the truncated field."""


def _kron_all(ops):
    return reduce(np.kron, ops)


def _atom_op(op, j, n_atoms):
    return _kron_all([op if k == j else _I2 for k in range(n_atoms)])


@dataclass(frozen=True, eq=False)
class DenseModel:
    n_atoms: int
    photon_cutoff: int
    omega: float
    kappa: float
    hamiltonian: np.ndarray
    p_operator: np.ndarray

    @property
    def dim(self):
        return self.hamiltonian.shape[0]

    @property
    def field_dim(self):
        return self.photon_cutoff + 1

    def commutator_norm(self):
        h, p = self.hamiltonian, self.p_operator
        return float(np.abs(h @ p - p @ h).sum(axis=1).max())


def build_dense(params, n_c):
    n = params.n_atoms
    if n > MAX_ATOMS:
        raise ValueError(f"dense oracle supports at most {MAX_ATOMS} atoms, got {n}")
    if not 0 <= n_c <= MAX_CUTOFF:
        raise ValueError(f"photon cutoff must be in 0..{MAX_CUTOFF}, got {n_c}")
    nf = n_c + 1
    a = np.diag(np.sqrt(np.arange(1.0, nf)), 1)
    num = np.diag(np.arange(float(nf)))
    if_ = np.eye(nf)
    ia = np.eye(2**n)

    sz = sum(_atom_op(_SZ, j, n) for j in range(n))
    sp = sum(_atom_op(_SPLUS, j, n) for j in range(n))
    excited = sum(_atom_op(_SPLUS @ _SMINUS, j, n) for j in range(n))

    w = params.omega
    h = 0.5 * w * np.kron(sz, if_) + w * np.kron(ia, num)
    h = h + params.kappa * (np.kron(sp.T, a.T) + np.kron(sp, a))
    p_op = np.kron(ia, num) + np.kron(excited, if_)
    return DenseModel(n, n_c, params.omega, params.kappa, h, p_op)


def dense_ground(dense, p_star=None):
    """Lowest eigenpair; raises :class:`CutoffTooSmall` if truncation shows.

    Sectors with more than ``photon_cutoff`` excitations are missing basis
    states.  By interlacing their energies only move up, so the dense ground
    is exact whenever the true ground sector ``p_star`` fits under the cutoff;
    pass ``p_star`` when it is known to get that guarantee.
    """
    if p_star is not None and p_star > dense.photon_cutoff:
        raise CutoffTooSmall(
            f"cutoff too small: ground sector p={p_star} exceeds photon cutoff {dense.photon_cutoff}"
        )
    vals, vecs = np.linalg.eigh(dense.hamiltonian)
    psi = vecs[:, 0]
    k = int(np.argmax(np.abs(psi)))
    if psi[k] < 0:
        psi = -psi
    clipped = np.diag(dense.p_operator) > dense.photon_cutoff + 0.5
    leak = float((psi[clipped] ** 2).sum())
    if leak > CUTOFF_WEIGHT_ATOL:
        raise CutoffTooSmall(
            f"cutoff too small: ground weight {leak:.3e} in sectors truncated by cutoff {dense.photon_cutoff}"
        )
    return float(vals[0]), psi


def _parse_keep(keep, n_atoms):
    keep = list(keep)
    axes = []
    for item in keep:
        if item == FIELD:
            axes.append(n_atoms)
        elif isinstance(item, (int, np.integer)) and not isinstance(item, bool) and 0 <= item < n_atoms:
            axes.append(int(item))
        else:
            raise ValueError(f"bad subsystem selector {item!r}; use atom indices or {FIELD!r}")
    if len(set(axes)) != len(axes):
        raise ValueError("subsystem selector repeats an entry")
    return axes


def dense_partial_trace(state, keep, n_atoms, photon_cutoff):
    """Reduced density matrix over ``keep`` (atom indices and/or ``"field"``).

    The kept subsystems appear in the order given.
    """
    shape = [2] * n_atoms + [photon_cutoff + 1]
    psi = np.asarray(state).reshape(shape)
    axes = _parse_keep(keep, n_atoms)
    traced = [k for k in range(n_atoms + 1) if k not in axes]
    psi = np.transpose(psi, axes + traced)
    kept_dim = int(np.prod([shape[k] for k in axes])) if axes else 1
    m = psi.reshape(kept_dim, -1)
    return m @ m.conj().T


def symmetric_basis_vector(n_atoms, photon_cutoff, s, n_photons):
    """``|D_s> |n>`` in the dense ordering."""
    nf = photon_cutoff + 1
    vec = np.zeros(2**n_atoms * nf)
    amp = 1.0 / np.sqrt(comb(n_atoms, s))
    for bits in range(2**n_atoms):
        if bin(bits).count("1") == s:
            vec[bits * nf + n_photons] = amp
    return vec


def extract_block(dense, p):
    """Dense H projected onto ``|D_s>|p - s>``, s ascending."""
    n = dense.n_atoms
    top = min(p, n)
    if p > dense.photon_cutoff:
        raise ValueError(f"block p={p} needs cutoff >= {p}")
    basis = np.column_stack(
        [symmetric_basis_vector(n, dense.photon_cutoff, s, p - s) for s in range(top + 1)]
    )
    return basis.T @ dense.hamiltonian @ basis


# ---------------------------------------------------------------------------
# equivalence suite: dense model against the block pipeline
# ---------------------------------------------------------------------------

EQUIVALENCE_TOL = 1e-9
COMMUTATOR_RTOL = 1e-12
BLOCK_ATOL = 1e-12
# grid points closer than this (in units of omega/sqrt(N)) to a crossing are
# pushed off it; near-degenerate dense eigenvectors would mix two blocks
CROSSING_MARGIN = 1e-4


@dataclass(frozen=True)
class CheckResult:
    name: str
    max_error: float
    tolerance: float

    @property
    def passed(self):
        return bool(self.max_error <= self.tolerance)


def _entropy(rho):
    mu = np.linalg.eigvalsh(rho)
    mu = mu[mu > 0]
    return float(-np.dot(mu, np.log(mu)))


def kappa_samples(n_atoms, samples, omega=1.0, span=3.0):
    """Uniform grid on ``[0, span * omega / sqrt(N)]`` kept clear of crossings."""
    from .phase import critical_coupling

    scale = omega / np.sqrt(n_atoms)
    grid = np.linspace(0.0, span * scale, samples)
    top = int(np.ceil((n_atoms * grid[-1] / (2 * omega)) ** 2)) + n_atoms + 8
    crossings = np.array([critical_coupling(n_atoms, j, omega) for j in range(1, top + 1)])
    margin = CROSSING_MARGIN * scale
    out = []
    for k in grid:
        near = np.abs(crossings - k) < margin
        if near.any():
            k = crossings[near][0] + margin
        out.append(float(k))
    return out


def equivalence_suite(n_atoms, cutoff, samples, omega=1.0, backend=None):
    """Compare the dense model with the block pipeline on a coupling grid.

    Raises :class:`CutoffTooSmall` when the cutoff cannot hold a ground state.
    """
    from .entangle import atom_field_entropy, two_atom_rdm
    from .fieldstats import photon_statistics
    from .phase import ground_energy, ground_excitation
    from .subspace import ModelParams, build_block

    errors = {
        "commutator": 0.0,
        "block_elements": 0.0,
        "ground_energy": 0.0,
        "excitation_number": 0.0,
        "two_atom_rdm": 0.0,
        "field_entropy": 0.0,
        "atom_entropy": 0.0,
        "photon_mean": 0.0,
        "photon_variance": 0.0,
    }
    tolerances = dict.fromkeys(errors, EQUIVALENCE_TOL)
    tolerances["block_elements"] = BLOCK_ATOL
    tolerances["commutator"] = COMMUTATOR_RTOL

    kappas = kappa_samples(n_atoms, samples, omega)
    for i, kappa in enumerate(kappas):
        params = ModelParams(n_atoms, omega, kappa)
        dense = build_dense(params, cutoff)
        if i == 0 or i == len(kappas) - 1:
            h_norm = np.abs(dense.hamiltonian).sum(axis=1).max()
            errors["commutator"] = max(errors["commutator"], dense.commutator_norm() / h_norm)
        if i == len(kappas) - 1:
            for p in range(min(6, cutoff) + 1):
                ref = build_block(params, p).hamiltonian(kappa)
                errors["block_elements"] = max(
                    errors["block_elements"], float(np.abs(extract_block(dense, p) - ref).max())
                )

        p_star, branch = ground_excitation(params, backend)
        energy, psi = dense_ground(dense, p_star)
        w = branch.amplitudes**2
        errors["ground_energy"] = max(
            errors["ground_energy"], abs(energy - ground_energy(params, p_star, backend))
        )
        p_mean = psi @ dense.p_operator @ psi
        p_var = psi @ dense.p_operator @ dense.p_operator @ psi - p_mean**2
        errors["excitation_number"] = max(errors["excitation_number"], abs(p_mean - p_star), abs(p_var))

        if n_atoms >= 2:
            rho_pair = dense_partial_trace(psi, [0, 1], n_atoms, cutoff)
            err = float(np.abs(rho_pair - two_atom_rdm(w, n_atoms)).max())
            errors["two_atom_rdm"] = max(errors["two_atom_rdm"], err)

        rho_f = dense_partial_trace(psi, [FIELD], n_atoms, cutoff)
        rho_a = dense_partial_trace(psi, range(n_atoms), n_atoms, cutoff)
        s_ref = atom_field_entropy(w)
        errors["field_entropy"] = max(errors["field_entropy"], abs(_entropy(rho_f) - s_ref))
        errors["atom_entropy"] = max(errors["atom_entropy"], abs(_entropy(rho_a) - s_ref))

        pn = np.diag(rho_f)
        n = np.arange(pn.size)
        mean = float(pn @ n)
        var = float(pn @ (n - mean) ** 2)
        stats = photon_statistics(branch)
        errors["photon_mean"] = max(errors["photon_mean"], abs(mean - stats.mean))
        errors["photon_variance"] = max(errors["photon_variance"], abs(var - stats.variance))

    return [CheckResult(name, errors[name], tolerances[name]) for name in errors]
