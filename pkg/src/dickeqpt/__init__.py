"""Ground-state instabilities and entanglement of the resonant Dicke model.

The Hamiltonian conserves the total excitation number, so the ground state is
found block by block; see :mod:`dickeqpt.phase` for the branch ladder and
:mod:`dickeqpt.entangle` / :mod:`dickeqpt.fieldstats` for the observables.
"""

__version__ = "0.1.0"

from ._kernels import default_backend
from .eigen import GroundBranch, full_spectrum, ground_eigenpair
from .entangle import (
    atom_field_entropy,
    ckw_report_p1,
    concurrence,
    dicke_weights,
    entanglement_report,
    tau_atoms,
    two_atom_rdm,
)
from .fieldstats import PhotonStats, binomial_amplitudes, photon_statistics
from .phase import (
    PhaseDiagram,
    build_phase_diagram,
    critical_coupling,
    ground_branch,
    ground_energy,
    ground_excitation,
)
from .subspace import ModelParams, SubspaceBlock, build_block

__all__ = [
    "GroundBranch",
    "ModelParams",
    "PhaseDiagram",
    "PhotonStats",
    "SubspaceBlock",
    "atom_field_entropy",
    "binomial_amplitudes",
    "build_block",
    "build_phase_diagram",
    "ckw_report_p1",
    "concurrence",
    "critical_coupling",
    "default_backend",
    "dicke_weights",
    "entanglement_report",
    "full_spectrum",
    "ground_branch",
    "ground_eigenpair",
    "ground_energy",
    "ground_excitation",
    "photon_statistics",
    "tau_atoms",
    "two_atom_rdm",
]
