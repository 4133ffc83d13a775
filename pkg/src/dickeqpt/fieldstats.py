"""Photon-number statistics of the field mode in a ground branch."""

import math
from dataclasses import dataclass

import numpy as np
from scipy.special import gammaln


@dataclass(frozen=True, eq=False)
class PhotonStats:
    """Photon distribution ``P(n)`` on ``n = photon_numbers`` and its moments.

    Two Mandel conventions are kept: ``mandel_q_variance`` is the usual
    ``(Var(n) - nbar) / nbar``; ``mandel_q_dispersion`` uses the standard
    deviation in place of the variance.  Both are ``None`` when ``nbar == 0``.
    """

    photon_numbers: np.ndarray
    distribution: np.ndarray
    mean: float
    variance: float
    mandel_q_variance: float | None
    mandel_q_dispersion: float | None

    @property
    def std_dev(self):
        return math.sqrt(self.variance)


def photon_statistics(branch, n_atoms=None):
    """Statistics of ``P(p - s) = |A_s|^2``."""
    w = branch.amplitudes**2
    s = np.arange(w.size)
    n = (branch.p - s).astype(np.float64)
    mean = float(np.dot(w, n))
    # central moment avoids cancellation when nbar >> spread
    variance = float(np.dot(w, (n - mean) ** 2))
    if mean > 0:
        q_var = (variance - mean) / mean
        q_disp = (math.sqrt(variance) - mean) / mean
    else:
        q_var = q_disp = None
    order = np.argsort(n)
    return PhotonStats(n[order].astype(np.int64), w[order], mean, variance, q_var, q_disp)


def binomial_amplitudes(n_atoms, p=None):
    """Strong-coupling estimate ``(-1)^(N+s) sqrt(C(N, s) / 2^N)``; ``p`` is unused."""
    s = np.arange(n_atoms + 1)
    log_mag = 0.5 * (gammaln(n_atoms + 1) - gammaln(s + 1) - gammaln(n_atoms - s + 1) - n_atoms * math.log(2))
    sign = np.where((n_atoms + s) % 2 == 0, 1.0, -1.0)
    return sign * np.exp(log_mag)


def mean_excitation_atoms(weights, n_atoms=None):
    w = np.asarray(weights, dtype=np.float64)
    return float(np.dot(w, np.arange(w.size)))
