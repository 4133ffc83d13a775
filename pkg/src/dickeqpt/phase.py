"""Ground-state branches, excitation-number jumps and the critical-coupling ladder.

Each excitation block contributes one straight line
``E^(p)(kappa) = (p - N/2) omega + K^(p) kappa``; the ground state follows the
lower envelope of these lines and switches branch at ``kappa_j``.
"""

import math
import threading
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from . import _kernels
from .eigen import GroundBranch, ground_eigenpair, lowest_eigenvalues
from .subspace import ModelParams, build_block

DEGENERACY_ATOL = 1e-14
TIE_RTOL = 1e-12


class PhaseError(RuntimeError):
    """Internal invariant of the branch ladder violated."""


@lru_cache(maxsize=1 << 16)
def _cached_branch(n_atoms, p, backend):
    return ground_eigenpair(build_block(ModelParams(n_atoms), p), backend)


def ground_branch(n_atoms, p, backend=None):
    """Memoized lowest branch of block ``p``; depends on N and p only."""
    return _cached_branch(int(n_atoms), int(p), backend or _kernels.default_backend())


# eigenvalue-only cache: candidate branches in a ground-state search never need vectors
_slopes = {}
_slopes_lock = threading.Lock()
MAX_CACHED_SLOPES = 1 << 20


def slopes(n_atoms, ps, backend=None):
    """``K^(p)`` for every ``p`` in ``ps``; missing values are solved in one batch."""
    n_atoms = int(n_atoms)
    backend = backend or _kernels.default_backend()
    ps = [int(p) for p in ps]
    with _slopes_lock:
        known = {p: _slopes[(n_atoms, p, backend)] for p in set(ps) if (n_atoms, p, backend) in _slopes}
    missing = sorted(set(ps) - set(known))
    if missing:
        blocks = [build_block(ModelParams(n_atoms), p).offdiag for p in missing]
        known.update(zip(missing, lowest_eigenvalues(blocks, backend).tolist()))
        with _slopes_lock:
            if len(_slopes) + len(missing) > MAX_CACHED_SLOPES:
                _slopes.clear()
            _slopes.update({(n_atoms, p, backend): known[p] for p in missing})
    return np.array([known[p] for p in ps])


def slope(n_atoms, p, backend=None):
    return float(slopes(n_atoms, [p], backend)[0])


def clear_caches():
    _cached_branch.cache_clear()
    with _slopes_lock:
        _slopes.clear()


def ground_energy(params, p, backend=None):
    return (p - params.n_atoms / 2) * params.omega + params.kappa * slope(params.n_atoms, p, backend)


def energy_derivative(params, p, backend=None):
    """dE/dkappa on branch ``p``; exact, since each branch is linear in kappa."""
    return slope(params.n_atoms, p, backend)


def critical_coupling(n_atoms, j, omega=1.0, backend=None):
    """``kappa_j`` where branches ``j-1`` and ``j`` cross."""
    if int(j) != j or j < 1:
        raise ValueError(f"critical index must be >= 1, got {j!r}")
    gap = slope(n_atoms, j - 1, backend) - slope(n_atoms, j, backend)
    if abs(gap) < DEGENERACY_ATOL:
        raise PhaseError(f"degenerate branches at j={j}, N={n_atoms}")
    return omega / gap


def closed_form_kappa(n_atoms, j, omega=1.0):
    """Analytic kappa_1..kappa_3."""
    n = float(n_atoms)
    if j == 1:
        return omega / math.sqrt(n)
    if j == 2:
        return omega / (math.sqrt(4 * n - 2) - math.sqrt(n))
    if j == 3:
        return omega / (math.sqrt(5 * (n - 1) + math.sqrt((4 * n - 5) ** 2 + 8 * n)) - math.sqrt(4 * n - 2))
    raise ValueError(f"closed form known only for j in 1..3, got {j!r}")


def closed_form_slope(n_atoms, p):
    """Analytic K^(p) for p = 0..4."""
    n = float(n_atoms)
    if p == 0:
        return 0.0
    if p == 1:
        return -math.sqrt(n)
    if p == 2:
        return -math.sqrt(2 * (2 * n - 1))
    if p == 3:
        return -math.sqrt(5 * (n - 1) + math.sqrt((4 * n - 5) ** 2 + 8 * n))
    if p == 4:
        return -math.sqrt(10 * n - 15 + 3 * math.sqrt(17 - 12 * n + 4 * n * n))
    raise ValueError(f"closed form known only for p in 0..4, got {p!r}")


def closed_form_energy(params, p):
    n = params.n_atoms
    return (p - n / 2) * params.omega + params.kappa * closed_form_slope(n, p)


def asymptotic_kappa(n_atoms, p, omega=1.0):
    """Strong-coupling estimate ``omega / (N (sqrt(p+1) - sqrt(p)))``."""
    if p < 1:
        raise ValueError("asymptotic critical coupling needs p >= 1")
    # sqrt(p+1) - sqrt(p) rewritten to avoid cancellation
    return omega * (math.sqrt(p + 1) + math.sqrt(p)) / n_atoms


def excitation_cap(params):
    return math.ceil((params.n_atoms * params.kappa / (2 * params.omega)) ** 2) + params.n_atoms + 8


def branch_energies(params, p_max, backend=None):
    p = np.arange(p_max + 1)
    k = slopes(params.n_atoms, p, backend)
    return (p - params.n_atoms / 2) * params.omega + params.kappa * k


def ground_excitation(params, backend=None):
    """Excitation number of the ground state and its branch.

    At an exact crossing the lower excitation number wins.
    """
    cap = excitation_cap(params)
    energies = branch_energies(params, cap, backend)
    e_min = energies.min()
    tol = TIE_RTOL * max(1.0, abs(e_min))
    p_star = int(np.flatnonzero(energies <= e_min + tol)[0])
    if p_star == cap:
        raise PhaseError(f"excitation cap {cap} exhausted at kappa={params.kappa}")
    # the next branch must not undercut, nor may we be past its crossing
    if energies[p_star + 1] < energies[p_star] - tol:
        raise PhaseError(f"branch {p_star + 1} lies below the selected ground branch")
    kappa_next = critical_coupling(params.n_atoms, p_star + 1, params.omega, backend)
    if params.kappa > kappa_next * (1 + TIE_RTOL):
        raise PhaseError(f"kappa={params.kappa} beyond kappa_{p_star + 1}={kappa_next}")
    return p_star, ground_branch(params.n_atoms, p_star, backend)


@dataclass(frozen=True)
class PhaseDiagram:
    n_atoms: int
    omega: float
    criticals: tuple
    branches: tuple

    def window(self, p):
        """Coupling interval ``[kappa_p, kappa_{p+1}]`` hosting ground branch ``p``."""
        lo = 0.0 if p == 0 else self.criticals[p - 1][1]
        hi = self.criticals[p][1] if p < len(self.criticals) else math.inf
        return lo, hi


def build_phase_diagram(n_atoms, j_max, omega=1.0, backend=None):
    """Ladder ``kappa_1 < ... < kappa_jmax`` plus the branches p = 0..j_max."""
    branches = tuple(ground_branch(n_atoms, p, backend) for p in range(j_max + 1))
    criticals = []
    for j in range(1, j_max + 1):
        gap = branches[j - 1].k_slope - branches[j].k_slope
        if abs(gap) < DEGENERACY_ATOL:
            raise PhaseError(f"degenerate branches at j={j}, N={n_atoms}")
        criticals.append((j, omega / gap))
    kappas = [k for _, k in criticals]
    if any(b <= a for a, b in zip(kappas, kappas[1:])):
        raise PhaseError(f"critical ladder not strictly increasing for N={n_atoms}")
    return PhaseDiagram(n_atoms, omega, tuple(criticals), branches)
