"""The twelve acceptance criteria, each timed from a cold branch cache."""

import math

import numpy as np
import pytest

from dickeqpt.cli import cmd_scan
from dickeqpt.entangle import (
    atom_field_entropy,
    ckw_report_p1,
    closed_form_concurrence,
    concurrence,
    dicke_weights,
    tau_atoms,
    two_atom_rdm,
)
from dickeqpt.fieldstats import photon_statistics
from dickeqpt.oracle import equivalence_suite
from dickeqpt.phase import (
    closed_form_energy,
    closed_form_kappa,
    critical_coupling,
    ground_branch,
    ground_energy,
    ground_excitation,
)
from dickeqpt.subspace import ModelParams

# frozen from the convergence sweep in test_merging_convergence_sweep
MERGING_TOL = 3e-4


def pair_concurrence(n, p):
    return concurrence(two_atom_rdm(dicke_weights(ground_branch(n, p)), n))


def test_01_critical_couplings(acceptance):
    with acceptance(1, "critical couplings N=12 vs closed forms, 1e-10 rel", 1.0):
        for j in (1, 2, 3):
            got, ref = critical_coupling(12, j), closed_form_kappa(12, j)
            assert abs(got - ref) / ref <= 1e-10, (j, got, ref)


def test_02_table1_energies(acceptance):
    with acceptance(2, "closed-form branch energies p=0..4, N in {2,4,12,50}, 1e-10 rel", 5.0):
        for n in (2, 4, 12, 50):
            for kappa in np.linspace(0.0, 2.0, 20):
                params = ModelParams(n, 1.0, float(kappa))
                for p in range(5):
                    got, ref = ground_energy(params, p), closed_form_energy(params, p)
                    assert abs(got - ref) <= 1e-10 * abs(ref), (n, kappa, p, got, ref)


def test_03_table1_concurrences(acceptance):
    with acceptance(3, "closed-form pair concurrences p=0..2, N=2..100, 1e-10", 5.0):
        for n in range(2, 101):
            for p in range(3):
                got, ref = pair_concurrence(n, p), closed_form_concurrence(n, p)
                assert abs(got - ref) <= 1e-10, (n, p, got, ref)


def test_04_coupling_scan(acceptance):
    n = 12
    with acceptance(4, "N=12 scan, 6001 steps: continuity, slope jump, concurrence jumps", 10.0):
        rows, _ = cmd_scan(n, 0.0, 0.6, 6001)
        ps = np.array([r["p_star"] for r in rows])
        jumps = np.flatnonzero(np.diff(ps))
        assert ps[0] == 0 and len(jumps) >= 3
        # (a) adjacent branches meet at every crossing inside the scan
        for j in range(1, ps[-1] + 1):
            params = ModelParams(n, 1.0, critical_coupling(n, j))
            left, right = ground_energy(params, j - 1), ground_energy(params, j)
            assert abs(left - right) <= 1e-9, (j, left, right)
        # and the sampled energy never moves more than the steepest slope allows
        energy = np.array([r["energy"] for r in rows])
        slopes = np.array([r["d_energy_d_kappa"] for r in rows])
        step = 0.6 / 6000
        assert np.all(np.abs(np.diff(energy)) <= np.abs(slopes).max() * step * (1 + 1e-9))
        # (b) derivative jump at kappa_1
        first = jumps[0]
        assert rows[first + 1]["d_energy_d_kappa"] - rows[first]["d_energy_d_kappa"] == pytest.approx(
            -math.sqrt(12), rel=1e-12
        )
        # (c) concurrence 0 -> 1/12 at kappa_1, then down at kappa_2 and kappa_3
        c = [rows[k]["concurrence"] for k in jumps[:3]] + [rows[jumps[2] + 1]["concurrence"]]
        assert c[0] == 0
        assert c[1] == pytest.approx(1 / 12, abs=1e-12)
        assert c[1] > c[2] > c[3]


def test_05_ckw_saturation(acceptance):
    with acceptance(5, "CKW saturation at p=1, N=2..200, residuals <= 1e-10", 5.0):
        for n in range(2, 201):
            r = ckw_report_p1(n)
            assert abs(r.field_residual) <= 1e-10 and abs(r.atom_residual) <= 1e-10, n
            assert abs(r.field_tangle - 1.0) <= 1e-10, n
            assert abs(r.c_field_atom - 1 / math.sqrt(n)) <= 1e-10, n


def test_06_entropy_plateau(acceptance):
    with acceptance(6, "S_A = ln 2 on the p=1 window (1e-12), 0 below kappa_1"):
        for n in (1, 2, 3, 12, 100, 1000, 2000):
            k1, k2 = critical_coupling(n, 1), critical_coupling(n, 2)
            for kappa in np.linspace(k1, k2, 7)[1:-1]:
                p, br = ground_excitation(ModelParams(n, 1.0, float(kappa)))
                assert p == 1
                assert abs(atom_field_entropy(dicke_weights(br)) - math.log(2)) <= 1e-12
            for kappa in (0.0, 0.5 * k1, 0.999 * k1):
                p, br = ground_excitation(ModelParams(n, 1.0, kappa))
                assert p == 0 and atom_field_entropy(dicke_weights(br)) == 0


def test_07_entropy_band(acceptance):
    with acceptance(7, "p=4N entropy within 0.8 nats of ln(N+1)/2, N in {20,50,100}", 10.0):
        for n in (20, 50, 100):
            s = atom_field_entropy(dicke_weights(ground_branch(n, 4 * n)))
            assert abs(s - 0.5 * math.log(n + 1)) <= 0.8, (n, s)


def test_08_strong_coupling_photons(acceptance):
    n = 10
    with acceptance(8, "N=10, p in {200,500,1000}: nbar, Delta within 5%, Mandel Q <= -0.9", 5.0):
        for p in (200, 500, 1000):
            st = photon_statistics(ground_branch(n, p))
            assert abs(st.mean - (p - n / 2)) <= 0.5, (p, st.mean)
            assert abs(st.std_dev - math.sqrt(n) / 2) / (math.sqrt(n) / 2) <= 0.05, (p, st.std_dev)
            assert st.mandel_q_variance <= -0.9, (p, st.mandel_q_variance)


def test_09_diagonal_p_equals_n(acceptance):
    with acceptance(9, "p=N: nbar ~ 2N/3 and Delta ~ sqrt(5N/26), < 5% at N=100, shrinking", 10.0):
        dev_mean, dev_std = [], []
        for n in (25, 50, 100):
            st = photon_statistics(ground_branch(n, n))
            dev_mean.append(abs(st.mean - 2 * n / 3) / (2 * n / 3))
            dev_std.append(abs(st.std_dev - math.sqrt(5 * n / 26)) / math.sqrt(5 * n / 26))
        assert dev_mean[-1] < 0.05 and dev_std[-1] < 0.05, (dev_mean, dev_std)
        assert dev_mean[0] > dev_mean[1] > dev_mean[2], dev_mean
        assert dev_std[0] > dev_std[1] > dev_std[2], dev_std


def test_10_tau_limit(acceptance):
    with acceptance(10, "tau_A(p=1) = (N-1)/(2N), within 0.005 of 1/2 at N=100"):
        for n in range(2, 201):
            assert tau_atoms(pair_concurrence(n, 1), n) == pytest.approx((n - 1) / (2 * n), abs=1e-12)
        # the exact value 99/200 sits on the bound itself
        assert abs(tau_atoms(pair_concurrence(100, 1), 100) - 0.5) <= 0.005 + 1e-12


def test_11_oracle_equivalence(acceptance):
    with acceptance(11, "dense oracle vs blocks, N in {2,3,4}, cutoff 10, 50 samples", 60.0):
        for n in (2, 3, 4):
            for result in equivalence_suite(n, 10, 50):
                assert result.passed, (n, result)


def merging_spread(n, j_max=5):
    return max(abs(critical_coupling(n, j) * math.sqrt(n) - 1.0) for j in range(1, j_max + 1))


def test_12_thermodynamic_merging(acceptance):
    with acceptance(12, f"N=1e4, j<=5: kappa_j sqrt(N) within {MERGING_TOL} of 1", 10.0):
        spread = merging_spread(10_000)
        assert spread < MERGING_TOL, spread


def test_merging_convergence_sweep():
    spreads = [merging_spread(n) for n in (100, 1000, 10_000)]
    assert spreads[0] > spreads[1] > spreads[2]
    # the spread falls like 1/N
    for a, b in zip(spreads, spreads[1:]):
        assert a / b == pytest.approx(10, rel=0.05)
