import numpy as np
import pytest

from qembed import fci, lattice
from qembed.cluster import (ClusterHamiltonian, IB,
                            build_whole_system_hamiltonian)
from qembed.errors import Overflow


def dimer_hamiltonian(u, t=1.0):
    h = np.array([[0.0, -t], [-t, 0.0]])
    g = np.zeros((2, 2, 2, 2))
    g[0, 0, 0, 0] = g[1, 1, 1, 1] = u
    return ClusterHamiltonian(n_cluster=2, n_frag=1, n_elec_cluster=2,
                              h_eff=h, g_eff=g, mu_frag=0.0,
                              e_core_env=0.0, mode=IB)


class TestEnumerate:
    def test_counts(self):
        assert fci.enumerate_determinants(2, 1, 1).dim == 4
        assert fci.enumerate_determinants(6, 3, 3).dim == 400
        assert fci.enumerate_determinants(1, 1, 1).dim == 1

    def test_strings_sorted_unique(self):
        basis = fci.enumerate_determinants(5, 2, 3)
        a = basis.alpha_strings
        assert np.all(np.diff(a) > 0)
        assert all(bin(int(m)).count("1") == 2 for m in a)

    def test_overflow(self):
        with pytest.raises(Overflow):
            fci.enumerate_determinants(24, 12, 12)

    def test_bad_counts(self):
        with pytest.raises(ValueError):
            fci.enumerate_determinants(3, 4, 0)


class TestHamiltonian:
    def test_hubbard_dimer_ground_energy(self):
        ch = dimer_hamiltonian(4.0)
        basis = fci.enumerate_determinants(2, 1, 1)
        h = fci.build_hamiltonian(ch, basis)
        w = np.linalg.eigvalsh(h)
        assert abs(w[0] - (2.0 - 2.0 * np.sqrt(2.0))) < 1e-12

    def test_noninteracting_pair_energies(self):
        rng = np.random.default_rng(0)
        a = rng.normal(size=(4, 4))
        h1 = 0.5 * (a + a.T)
        ch = ClusterHamiltonian(n_cluster=4, n_frag=2, n_elec_cluster=4,
                                h_eff=h1, g_eff=np.zeros((4,) * 4),
                                mu_frag=0.0, e_core_env=0.0, mode=IB)
        sol = fci.ground_state(ch)
        eps = np.linalg.eigvalsh(h1)
        assert abs(sol.energy - 2.0 * np.sum(eps[:2])) < 1e-10

    def test_doubly_occupied_diagonal(self):
        # a single doubly occupied orbital: diagonal is 2 h00 + (00|00)
        h = np.array([[-0.7]])
        g = np.full((1, 1, 1, 1), 0.9)
        ch = ClusterHamiltonian(n_cluster=1, n_frag=1, n_elec_cluster=2,
                                h_eff=h, g_eff=g, mu_frag=0.0,
                                e_core_env=0.0, mode=IB)
        basis = fci.enumerate_determinants(1, 1, 1)
        hmat = fci.build_hamiltonian(ch, basis)
        assert hmat.shape == (1, 1)
        assert abs(hmat[0, 0] - (2 * -0.7 + 0.9)) < 1e-12

    def test_hermitian(self):
        rng = np.random.default_rng(1)
        a = rng.normal(size=(3, 3))
        h1 = 0.5 * (a + a.T)
        g = rng.normal(size=(3, 3, 3, 3))
        # make the tensor 8-fold symmetric
        g = g + g.transpose(1, 0, 2, 3)
        g = g + g.transpose(0, 1, 3, 2)
        g = g + g.transpose(2, 3, 0, 1)
        ch = ClusterHamiltonian(n_cluster=3, n_frag=1, n_elec_cluster=4,
                                h_eff=h1, g_eff=g, mu_frag=0.0,
                                e_core_env=0.0, mode=IB)
        basis = fci.enumerate_determinants(3, 2, 2)
        hmat = fci.build_hamiltonian(ch, basis)
        assert np.allclose(hmat, hmat.T, atol=1e-12)

    def test_diagonal_matches_dense(self):
        spec = lattice.LatticeSpec(n_sites=4, u=3.0)
        ch = build_whole_system_hamiltonian(spec, 4)
        basis = fci.enumerate_determinants(4, 2, 2)
        op = fci.CiOperator(ch.h_eff, ch.g_eff, basis)
        assert np.allclose(op.diagonal(), np.diag(op.dense()), atol=1e-11)


class TestGroundState:
    def test_one_dimensional_basis(self):
        h = np.array([[0.25]])
        ch = ClusterHamiltonian(n_cluster=1, n_frag=1, n_elec_cluster=2,
                                h_eff=h, g_eff=np.zeros((1, 1, 1, 1)),
                                mu_frag=0.0, e_core_env=0.0, mode=IB)
        sol = fci.ground_state(ch)
        assert sol.energy == pytest.approx(0.5)

    def test_iterative_matches_dense(self, monkeypatch):
        spec = lattice.LatticeSpec(n_sites=4, u=4.0)
        ch = build_whole_system_hamiltonian(spec, 4)
        basis = fci.enumerate_determinants(4, 2, 2)
        dense = fci.ground_state(ch, basis)
        monkeypatch.setattr(fci, "DENSE_CUTOFF", 1)
        lanczos = fci.ground_state(ch, basis)
        assert abs(dense.energy - lanczos.energy) < 1e-9
        assert np.allclose(dense.rdm1, lanczos.rdm1, atol=1e-7)

    def test_energy_monotone_in_u(self):
        basis = fci.enumerate_determinants(2, 1, 1)
        energies = [fci.ground_state(dimer_hamiltonian(u), basis).energy
                    for u in (8.0, 4.0, 2.0, 1.0, 0.0)]
        assert all(b < a for a, b in zip(energies, energies[1:]))

    def test_degenerate_flag(self):
        # two decoupled identical orbitals, one electron pair: the singlet
        # combinations are degenerate at zero coupling
        h = np.zeros((2, 2))
        ch = ClusterHamiltonian(n_cluster=2, n_frag=1, n_elec_cluster=2,
                                h_eff=h, g_eff=np.zeros((2,) * 4),
                                mu_frag=0.0, e_core_env=0.0, mode=IB)
        sol = fci.ground_state(ch)
        assert sol.degenerate


class TestRdms:
    def test_single_determinant(self):
        sol = fci.ground_state(dimer_hamiltonian(0.0))
        # bonding orbital doubly occupied: site rdm1 has 1.0 everywhere
        assert np.allclose(sol.rdm1, [[1.0, 1.0], [1.0, 1.0]], atol=1e-10)
        ch = ClusterHamiltonian(n_cluster=2, n_frag=1, n_elec_cluster=2,
                                h_eff=np.diag([-1.0, 1.0]),
                                g_eff=np.zeros((2,) * 4), mu_frag=0.0,
                                e_core_env=0.0, mode=IB)
        sol = fci.ground_state(ch)
        assert np.allclose(sol.rdm1, np.diag([2.0, 0.0]), atol=1e-10)

    def test_strong_coupling_double_occupancy(self):
        sol = fci.ground_state(dimer_hamiltonian(100.0))
        assert sol.rdm2[0, 0, 0, 0] / 2.0 < 0.01

    def test_energy_reconstruction(self):
        ch = dimer_hamiltonian(4.0)
        sol = fci.ground_state(ch)
        e = (np.sum(ch.h_eff * sol.rdm1.T) +
             0.5 * np.sum(ch.g_eff * sol.rdm2))
        assert abs(e - sol.energy) < 1e-9

    def test_partial_trace_and_norm(self):
        spec = lattice.LatticeSpec(n_sites=4, u=4.0)
        sol = fci.ground_state(build_whole_system_hamiltonian(spec, 4))
        n_elec = 4
        pt = np.einsum("pqrr->pq", sol.rdm2)
        assert np.max(np.abs(pt - (n_elec - 1) * sol.rdm1)) < 1e-8
        assert abs(np.trace(sol.rdm1) - n_elec) < 1e-10
        assert np.linalg.norm(sol.ci) == pytest.approx(1.0, abs=1e-12)
        assert np.min(np.linalg.eigvalsh(sol.rdm1)) > -1e-10

    def test_rejects_unnormalized(self):
        basis = fci.enumerate_determinants(2, 1, 1)
        with pytest.raises(ValueError):
            fci.make_rdms(np.ones(4), basis)
