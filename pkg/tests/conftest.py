import time
from contextlib import contextmanager

import numpy as np
import pytest
from hypothesis import HealthCheck, settings

from dickeqpt import _kernels
from dickeqpt.eigen import full_spectrum, inverse_iteration, lowest_eigenvalues
from dickeqpt.phase import clear_caches
from dickeqpt.subspace import ModelParams, build_block

# the backend fixture is a plain string, safe to share across examples
settings.register_profile(
    "dickeqpt", deadline=None, suppress_health_check=[HealthCheck.function_scoped_fixture]
)
settings.load_profile("dickeqpt")

BACKENDS = ["numba", "numpy"] if _kernels.HAVE_NUMBA else ["numpy"]

ACCEPTANCE_LINES = []


@pytest.fixture(params=BACKENDS)
def backend(request):
    return request.param


@pytest.fixture
def cold_cache():
    clear_caches()
    yield
    clear_caches()


@pytest.fixture(scope="session", autouse=True)
def warm_kernels():
    # compile the jitted kernels once so timed checks measure the numerics
    t = np.array([1.0, 2.0])
    for name in BACKENDS:
        lowest_eigenvalues([t, t[:1]], name)
        full_spectrum(build_block(ModelParams(3), 2), name)
        inverse_iteration(t, lowest_eigenvalues([t], name)[0], name)


def dense_coupling(n_atoms, p):
    """T^(p) written out from collective-spin matrix elements, entry by entry."""
    dim = min(p, n_atoms) + 1
    j = n_atoms / 2
    t = np.zeros((dim, dim))
    for s in range(dim - 1):
        m = s - j  # J_z eigenvalue of |D_s>
        spin = np.sqrt(j * (j + 1) - m * (m + 1))  # <D_{s+1}|J+|D_s>
        photon = np.sqrt(p - s)  # <p-s-1|a|p-s>
        t[s, s + 1] = t[s + 1, s] = spin * photon
    return t


@pytest.fixture
def acceptance(cold_cache):
    """Time a criterion from a cold branch cache and record a pass/fail line."""

    @contextmanager
    def criterion(number, title, limit=None):
        start = time.perf_counter()
        try:
            yield
            elapsed = time.perf_counter() - start
            assert limit is None or elapsed < limit, f"took {elapsed:.2f} s, limit {limit} s"
        except BaseException as exc:
            elapsed = time.perf_counter() - start
            ACCEPTANCE_LINES.append(f"[{number:2d}] FAIL {title} ({elapsed:.2f} s): {exc}")
            raise
        budget = "" if limit is None else f", limit {limit} s"
        ACCEPTANCE_LINES.append(f"[{number:2d}] PASS {title} ({elapsed:.2f} s{budget})")

    return criterion


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
