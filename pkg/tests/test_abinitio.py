import io

import numpy as np
import pytest

from qembed import abinitio as ab
from qembed import fci, linalg
from qembed.cluster import build_whole_system_hamiltonian
from qembed.errors import (FermiDegeneracy, InconsistentHeader,
                           NotPositiveDefinite, ParseError)

HEADER = "&FCI NORB=2,NELEC=2,MS2=0,\n  ORBSYM=1,1,\n  ISYM=1,\n&END\n"


def small_ints(seed=0, n=3, n_elec=2, interaction=1.0):
    rng = np.random.default_rng(seed)
    a = rng.normal(size=(n, n))
    h1 = 0.5 * (a + a.T)
    g = rng.normal(size=(n, n, n, n)) * interaction
    g = g + g.transpose(1, 0, 2, 3)
    g = g + g.transpose(0, 1, 3, 2)
    g = g + g.transpose(2, 3, 0, 1)
    g = 0.1 * g + 0.0
    return ab.IntegralSet(n_orb=n, n_elec=n_elec, e_core=0.3, h1=h1, g2=g)


class TestParse:
    def test_two_body_line(self):
        ints = ab.parse_fcidump(HEADER + "0.75 1 1 1 1\n")
        assert ints.g2[0, 0, 0, 0] == 0.75
        assert ints.n_orb == 2 and ints.n_elec == 2

    def test_one_body_line_symmetrized(self):
        ints = ab.parse_fcidump(HEADER + "-1.25 1 2 0 0\n")
        assert ints.h1[0, 1] == -1.25 and ints.h1[1, 0] == -1.25

    def test_core_energy_and_fortran_exponent(self):
        ints = ab.parse_fcidump(HEADER + "1.5D-1 0 0 0 0\n")
        assert ints.e_core == pytest.approx(0.15)

    def test_eightfold_population(self):
        ints = ab.parse_fcidump(HEADER + "0.5 2 1 2 2\n")
        for idx in ((1, 0, 1, 1), (0, 1, 1, 1), (1, 1, 1, 0), (1, 1, 0, 1)):
            assert ints.g2[idx] == 0.5

    def test_dimer_fixture_ground_energy(self, fixtures_dir):
        ints = ab.parse_fcidump(fixtures_dir +
                                "/hubbard_dimer_t1_u4.fcidump")
        sol = fci.ground_state(build_whole_system_hamiltonian(ints, 2))
        assert abs(sol.energy - (2.0 - 2.0 * np.sqrt(2.0))) < 1e-12

    def test_parse_error_carries_line_number(self):
        with pytest.raises(ParseError) as err:
            ab.parse_fcidump(HEADER + "0.5 1 1\n")
        assert "line 5" in str(err.value)

    def test_index_beyond_norb(self):
        with pytest.raises(InconsistentHeader):
            ab.parse_fcidump(HEADER + "0.5 3 1 0 0\n")

    def test_missing_header(self):
        with pytest.raises(ParseError):
            ab.parse_fcidump("1.0 1 1 0 0\n")

    def test_stream_input(self):
        ints = ab.parse_fcidump(io.StringIO(HEADER + "0.5 1 1 0 0\n"))
        assert ints.h1[0, 0] == 0.5

    def test_round_trip(self):
        ints = small_ints()
        again = ab.parse_fcidump(ab.serialize_fcidump(ints))
        assert linalg.norm_inf(again.h1 - ints.h1) < 1e-14
        assert linalg.norm_inf(again.g2 - ints.g2) < 1e-14
        assert again.e_core == ints.e_core
        assert (again.n_orb, again.n_elec) == (ints.n_orb, ints.n_elec)

    def test_overlap_round_trip(self, tmp_path):
        rng = np.random.default_rng(1)
        a = rng.normal(size=(4, 4))
        s = a @ a.T + 4 * np.eye(4)
        path = tmp_path / "metric.overlap"
        ab.write_overlap(s, path)
        assert linalg.norm_inf(ab.read_overlap(path) - s) < 1e-14


class TestLowdin:
    def test_identity(self):
        assert np.allclose(ab.lowdin(np.eye(3)), np.eye(3))

    def test_metric_orthonormalization(self):
        s = np.array([[1.0, 0.5], [0.5, 1.0]])
        x = ab.lowdin(s)
        assert linalg.norm_inf(x.T @ s @ x - np.eye(2)) < 1e-12

    def test_inverse_sqrt_spectrum(self):
        rng = np.random.default_rng(2)
        a = rng.normal(size=(5, 5))
        s = a @ a.T + 3 * np.eye(5)
        x = ab.lowdin(s)
        got = np.sort(np.linalg.eigvalsh(x))
        want = np.sort(1.0 / np.sqrt(np.linalg.eigvalsh(s)))
        assert np.allclose(got, want, atol=1e-12)

    def test_linear_dependence(self):
        s = np.array([[1.0, 1.0], [1.0, 1.0]])
        with pytest.raises(NotPositiveDefinite):
            ab.lowdin(s)


class TestTransform:
    def test_identity_and_permutation(self):
        ints = small_ints()
        same = ab.transform_integrals(np.eye(3), ints)
        assert linalg.norm_inf(same.g2 - ints.g2) < 1e-14
        perm = np.eye(3)[:, [2, 0, 1]]
        moved = ab.transform_integrals(perm, ints)
        assert moved.h1[0, 0] == pytest.approx(ints.h1[2, 2])
        assert moved.g2[0, 1, 2, 0] == pytest.approx(ints.g2[2, 0, 1, 2])

    def test_orthogonal_invariants(self):
        ints = small_ints(interaction=0.5)
        rng = np.random.default_rng(3)
        q = np.linalg.qr(rng.normal(size=(3, 3)))[0]
        moved = ab.transform_integrals(q, ints)
        assert abs(np.trace(moved.h1) - np.trace(ints.h1)) < 1e-10
        moved.check_symmetry(tol=1e-9)
        e0 = fci.ground_state(build_whole_system_hamiltonian(ints, 2)).energy
        e1 = fci.ground_state(build_whole_system_hamiltonian(moved,
                                                             2)).energy
        assert abs(e0 - e1) < 1e-9


class TestRhf:
    def test_noninteracting_dimer(self):
        h1 = np.array([[0.0, -1.0], [-1.0, 0.0]])
        ints = ab.IntegralSet(n_orb=2, n_elec=2, e_core=0.0, h1=h1,
                              g2=np.zeros((2, 2, 2, 2)))
        scf = ab.rhf(ints)
        assert scf.e_total == pytest.approx(-2.0)
        assert np.allclose(scf.gamma.gamma, 0.5 * np.ones((2, 2)),
                           atol=1e-10)

    def test_single_orbital_closed_form(self):
        h1 = np.array([[-1.3]])
        g2 = np.full((1, 1, 1, 1), 0.8)
        ints = ab.IntegralSet(n_orb=1, n_elec=2, e_core=0.2, h1=h1, g2=g2)
        scf = ab.rhf(ints)
        assert scf.e_total == pytest.approx(2 * -1.3 + 0.8 + 0.2)

    def test_variational_versus_fci(self, fixtures_dir):
        ints = ab.parse_fcidump(fixtures_dir + "/h4_pes/h4_trap_d1.20"
                                               ".fcidump")
        s = ab.read_overlap(fixtures_dir + "/h4_pes/h4_trap_d1.20.overlap")
        oao = ab.transform_integrals(ab.lowdin(s), ints)
        scf = ab.rhf(oao)
        sol = fci.ground_state(build_whole_system_hamiltonian(oao, 4))
        assert scf.e_total > sol.energy + oao.e_core
        assert scf.commutator < 1e-8
        g = scf.gamma.gamma
        assert linalg.norm_inf(g @ g - g) < 1e-8
        assert abs(np.trace(g) - 2.0) < 1e-10

    def test_damped_iterations_monotone(self, fixtures_dir):
        ints = ab.parse_fcidump(fixtures_dir + "/h4_irregular.fcidump")
        s = ab.read_overlap(fixtures_dir + "/h4_irregular.overlap")
        oao = ab.transform_integrals(ab.lowdin(s), ints)
        scf = ab.rhf(oao)
        assert scf.iterations > 3
        hist = scf.energy_history
        assert all(b <= a + 1e-10 for a, b in zip(hist[1:], hist[2:]))

    def test_frontier_degeneracy(self):
        # closed triangle at two pairs: the upper doublet is split by
        # symmetry, so the aufbau choice is ill-posed
        h1 = np.array([[0.0, -1.0, -1.0],
                       [-1.0, 0.0, -1.0],
                       [-1.0, -1.0, 0.0]])
        ints = ab.IntegralSet(n_orb=3, n_elec=4, e_core=0.0, h1=h1,
                              g2=np.zeros((3, 3, 3, 3)))
        with pytest.raises(FermiDegeneracy):
            ab.rhf(ints)

    def test_odd_electron_count_rejected(self):
        ints = small_ints(n_elec=3)
        with pytest.raises(ValueError):
            ab.rhf(ints)


class TestH2Fixture:
    def test_pipeline_and_correlation(self, fixtures_dir):
        ints = ab.parse_fcidump(fixtures_dir + "/h2_sto6g_d0.74.fcidump")
        s = ab.read_overlap(fixtures_dir + "/h2_sto6g_d0.74.overlap")
        oao = ab.transform_integrals(ab.lowdin(s), ints)
        scf = ab.rhf(oao)
        sol = fci.ground_state(build_whole_system_hamiltonian(oao, 2))
        e_fci = sol.energy + oao.e_core
        assert scf.e_total > e_fci
        assert e_fci < -1.14          # bound state, correlation included
        assert scf.e_total - e_fci < 0.03
