import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from dickeqpt.oracle import (
    FIELD,
    CutoffTooSmall,
    build_dense,
    dense_ground,
    dense_partial_trace,
    equivalence_suite,
    extract_block,
    kappa_samples,
    symmetric_basis_vector,
)
from dickeqpt.phase import critical_coupling, ground_energy, ground_excitation
from dickeqpt.subspace import ModelParams, build_block


def test_dimensions_and_hermiticity():
    d = build_dense(ModelParams(3, 1.0, 0.4), 5)
    assert d.dim == 8 * 6 and d.field_dim == 6
    np.testing.assert_array_equal(d.hamiltonian, d.hamiltonian.T)


def test_basis_ordering():
    # |e g>|0> for two atoms: atom 0 is the most significant bit
    d = build_dense(ModelParams(2, 1.0, 0.0), 3)
    idx = 0b10 * 4 + 0
    assert d.p_operator[idx, idx] == 1
    assert d.hamiltonian[idx, idx] == pytest.approx(0.0)
    vac = 0
    assert d.hamiltonian[vac, vac] == pytest.approx(-1.0)
    assert d.hamiltonian[3, 3] == pytest.approx(-1.0 + 3)


@settings(max_examples=30, deadline=None)
@given(st.integers(1, 4), st.integers(0, 8), st.floats(0.0, 2.0), st.floats(0.2, 3.0))
def test_commutator_vanishes(n, n_c, kappa, omega):
    d = build_dense(ModelParams(n, omega, kappa), n_c)
    assert d.commutator_norm() <= 1e-12 * max(1.0, np.abs(d.hamiltonian).max())


@pytest.mark.parametrize("n", [1, 2, 3, 4])
def test_blocks_match_collective_form(n):
    params = ModelParams(n, 1.3, 0.7)
    d = build_dense(params, 8)
    for p in range(9):
        ref = build_block(params, p).hamiltonian(0.7)
        np.testing.assert_allclose(extract_block(d, p), ref, atol=1e-12)
    with pytest.raises(ValueError):
        extract_block(d, 9)


def test_symmetric_basis_vector_normalized():
    for n in range(1, 6):
        for s in range(n + 1):
            v = symmetric_basis_vector(n, 2, s, 1)
            assert np.linalg.norm(v) == pytest.approx(1.0)


def test_partial_trace_ordering_and_trace():
    rng = np.random.default_rng(7)
    psi = rng.normal(size=2**3 * 3)
    psi /= np.linalg.norm(psi)
    full = dense_partial_trace(psi, [0, 1, 2, FIELD], 3, 2)
    np.testing.assert_allclose(full, np.outer(psi, psi), atol=1e-14)
    r01 = dense_partial_trace(psi, [0, 1], 3, 2)
    r10 = dense_partial_trace(psi, [1, 0], 3, 2)
    swap = np.eye(4)[[0, 2, 1, 3]]
    np.testing.assert_allclose(r10, swap @ r01 @ swap, atol=1e-14)
    assert np.trace(dense_partial_trace(psi, [FIELD], 3, 2)) == pytest.approx(1.0)
    for bad in ([3], [0, 0], ["atoms"], [True]):
        with pytest.raises(ValueError):
            dense_partial_trace(psi, bad, 3, 2)


@pytest.mark.parametrize("kappa", [0.1, 0.5, 0.8, 1.2])
def test_dense_ground_energy(kappa):
    params = ModelParams(3, 1.0, kappa)
    p_star, _ = ground_excitation(params)
    energy, psi = dense_ground(build_dense(params, 12), p_star)
    assert energy == pytest.approx(ground_energy(params, p_star), abs=1e-10)
    assert np.linalg.norm(psi) == pytest.approx(1.0)


def test_cutoff_too_small():
    params = ModelParams(2, 1.0, 3.0)
    p_star, _ = ground_excitation(params)
    with pytest.raises(CutoffTooSmall, match="cutoff too small"):
        dense_ground(build_dense(params, p_star - 1), p_star)
    with pytest.raises(CutoffTooSmall, match="cutoff too small"):
        dense_ground(build_dense(params, 1), p_star)
    # without the known ground sector, truncation silently lands in a lower sector
    _, psi = dense_ground(build_dense(params, 1))
    assert psi @ build_dense(params, 1).p_operator @ psi == pytest.approx(1.0)


def test_limits():
    with pytest.raises(ValueError):
        build_dense(ModelParams(7), 2)
    with pytest.raises(ValueError):
        build_dense(ModelParams(2), 65)


def test_kappa_samples_avoid_crossings():
    ks = kappa_samples(4, 200)
    crossings = [critical_coupling(4, j) for j in range(1, 20)]
    margin = 1e-4 / 2
    assert len(ks) == 200 and ks[0] == 0.0
    for k in ks:
        assert min(abs(k - c) for c in crossings) >= margin * 0.999


@pytest.mark.parametrize("n", [2, 3, 4])
def test_equivalence_suite(n):
    results = equivalence_suite(n, 10, 50)
    names = {r.name for r in results}
    assert {"ground_energy", "two_atom_rdm", "field_entropy", "photon_mean", "photon_variance", "commutator"} <= names
    for r in results:
        assert r.passed, (r.name, r.max_error)


def test_equivalence_single_atom():
    results = equivalence_suite(1, 10, 20)
    assert all(r.passed for r in results)
