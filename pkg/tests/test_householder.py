import numpy as np
import pytest

from qembed import linalg
from qembed.errors import (BadPartition, DegenerateSingularValue,
                           DimensionMismatch, SingularCoupling)
from qembed.householder import (BathSpace, DensityMatrix, FragmentPartition,
                                build_block_householder, cluster_blocks,
                                cluster_coeffs, householder_bath,
                                partition_columns, permute_gamma,
                                scalar_householder, subspace_distance,
                                svd_bath)
from qembed.verify import random_meanfield

from conftest import ring_rdm

H2_GAMMA = DensityMatrix(gamma=np.array([[0.5, 0.5], [0.5, 0.5]]),
                         n_elec_per_spin=1, idempotent=True)


class TestScalarHouseholder:
    def test_already_sparse_column(self):
        r, trivial = scalar_householder(np.array([3.0, 0.0, 0.0]), 0)
        assert trivial
        assert np.allclose(r, np.eye(3))

    def test_pythagorean(self):
        x = np.array([0.0, 3.0, 4.0])
        r, trivial = scalar_householder(x, 0)
        assert not trivial
        y = r @ x
        assert abs(abs(y[1]) - 5.0) < 1e-12
        assert abs(y[0]) < 1e-14 and abs(y[2]) < 1e-12

    def test_norm_preservation_random(self):
        rng = np.random.default_rng(0)
        for _ in range(25):
            x = rng.normal(size=6)
            r, _ = scalar_householder(x, int(rng.integers(0, 5)))
            assert abs(np.linalg.norm(r @ x) - np.linalg.norm(x)) < 1e-12
            assert linalg.norm_inf(r @ r - np.eye(6)) < 1e-12

    def test_zeroes_below_pivot_plus_one(self):
        rng = np.random.default_rng(1)
        x = rng.normal(size=7)
        for pivot in range(6):
            r, _ = scalar_householder(x, pivot)
            y = r @ x
            assert np.allclose(y[:pivot + 1], x[:pivot + 1])
            assert np.all(np.abs(y[pivot + 2:]) < 1e-12)

    def test_matches_block_construction_single_orbital(self):
        # the scalar sign convention is the one the block route produces
        dm = ring_rdm(8, 3)
        frag = FragmentPartition.from_sites([0], 8)
        hr = build_block_householder(dm, frag)
        col = permute_gamma(dm, frag)[:, 0]
        r_scalar, _ = scalar_householder(col, 0)
        assert linalg.norm_inf(hr.r - r_scalar) < 1e-10


class TestPartition:
    def test_two_by_two(self):
        gff, g1, g2 = partition_columns(
            H2_GAMMA, FragmentPartition.from_sites([0], 2))
        assert gff.shape == (1, 1) and gff[0, 0] == 0.5
        assert g1[0, 0] == 0.5
        assert g2.shape == (0, 1)

    def test_half_filled_ring_values(self, half_filled_ring6):
        gff, g1, _ = partition_columns(
            half_filled_ring6, FragmentPartition.from_sites([0], 6))
        assert abs(gff[0, 0] - 0.5) < 1e-12
        assert abs(g1[0, 0] - 1.0 / 3.0) < 1e-12

    def test_permutation_round_trip(self):
        rng = np.random.default_rng(2)
        a = rng.normal(size=(8, 8))
        dm = DensityMatrix(gamma=a @ a.T / 8, idempotent=False)
        frag = FragmentPartition.from_sites([2, 5], 8)
        gp = permute_gamma(dm, frag)
        assert gp[0, 1] == dm.gamma[2, 5]
        inv = np.argsort(frag.order)
        assert np.array_equal(gp[np.ix_(inv, inv)], dm.gamma)

    def test_partition_validation(self):
        with pytest.raises(BadPartition):
            FragmentPartition.from_sites([0, 1], 3)
        with pytest.raises(BadPartition):
            FragmentPartition.from_sites([0, 0], 6)
        with pytest.raises(BadPartition):
            FragmentPartition(order=np.array([0, 0, 1]), n_frag=1)


class TestBlockHouseholder:
    def test_two_orbital_analytic(self):
        hr = build_block_householder(H2_GAMMA,
                                     FragmentPartition.from_sites([0], 2))
        assert np.allclose(hr.r, np.diag([1.0, -1.0]))
        assert np.allclose(hr.v.ravel(), [0.0, 1.0])
        assert np.allclose(hr.gamma_tilde, [[0.5, -0.5], [-0.5, 0.5]])

    def test_ring_cluster_trace(self, half_filled_ring6):
        hr = build_block_householder(half_filled_ring6,
                                     FragmentPartition.from_sites([0], 6))
        gt = hr.gamma_tilde
        assert abs(np.trace(gt[:2, :2]) - 1.0) < 1e-12
        off = gt.copy()
        off[:2, :2] = 0.0
        off[2:, 2:] = 0.0
        assert linalg.norm_inf(off) < 1e-10     # block diagonal

    @pytest.mark.parametrize("n_frag", [1, 2, 3])
    def test_random_meanfield_full_decoupling(self, n_frag):
        rng = np.random.default_rng(10 + n_frag)
        dm = random_meanfield(rng, 40, min_occ=n_frag)
        frag = FragmentPartition.from_sites(list(range(n_frag)), 40)
        hr = build_block_householder(dm, frag)
        blocks = cluster_blocks(hr)
        assert linalg.norm_inf(blocks.gamma_eb) < 1e-10
        assert linalg.norm_inf(blocks.gamma_ef) < 1e-10
        gt = hr.gamma_tilde
        assert linalg.norm_inf(gt @ gt - gt) < 1e-10
        assert abs(np.trace(gt[:2 * n_frag, :2 * n_frag]) - n_frag) < 1e-10

    def test_invariants_non_idempotent(self, hubbard4_fci_rdm):
        frag = FragmentPartition.from_sites([0], 4)
        hr = build_block_householder(hubbard4_fci_rdm, frag)
        gp = permute_gamma(hubbard4_fci_rdm, frag)
        assert linalg.norm_inf(hr.r @ hr.r - np.eye(4)) < 1e-10
        assert linalg.norm_inf(hr.r - hr.r.T) < 1e-12
        assert np.array_equal(hr.r[:1, :], np.eye(4)[:1, :])
        assert linalg.norm_inf(hr.gamma_tilde - hr.r @ gp @ hr.r) < 1e-10
        assert linalg.norm_inf(hr.gamma_tilde[:1, :1] - gp[:1, :1]) < 1e-12

    def test_correlated_source_keeps_environment_coupling(
            self, hubbard4_fci_rdm):
        hr = build_block_householder(hubbard4_fci_rdm,
                                     FragmentPartition.from_sites([0], 4))
        blocks = cluster_blocks(hr)
        assert linalg.norm_inf(blocks.gamma_ef) < 1e-10
        assert linalg.norm_inf(blocks.gamma_eb) > 1e-3

    def test_w_equations(self):
        rng = np.random.default_rng(3)
        for _ in range(10):
            dm = random_meanfield(rng, 24, min_occ=2)
            frag = FragmentPartition.from_sites([1, 4], 24)
            hr = build_block_householder(dm, frag)
            _, g1, g2 = partition_columns(dm, hr.partition)
            w = -hr.gamma_tilde[2:4, :2]
            assert linalg.norm_inf(w.T @ w - (g1.T @ g1 + g2.T @ g2)) < 1e-10
            assert linalg.norm_inf(g1.T @ w - w.T @ g1) < 1e-10

    def test_empty_gamma2_case(self):
        # 2N == n_total: the reflection flips the environment sign block
        dm = ring_rdm(6, 3)
        hr = build_block_householder(dm,
                                     FragmentPartition.from_sites([0, 1, 2],
                                                                  6))
        assert hr.v.shape == (6, 3)
        assert linalg.norm_inf(hr.r @ hr.r - np.eye(6)) < 1e-10

    def test_decoupled_fragment_raises(self):
        gamma = np.zeros((5, 5))
        gamma[0, 0] = 1.0
        gamma[1:, 1:] = 0.25
        dm = DensityMatrix(gamma=gamma, idempotent=False)
        with pytest.raises(SingularCoupling):
            build_block_householder(dm, FragmentPartition.from_sites([0], 5))

    def test_pivot_changes_labels_not_bath(self):
        rng = np.random.default_rng(7)
        dm = random_meanfield(rng, 20, min_occ=2)
        frag = FragmentPartition.from_sites([0, 9], 20)
        plain = build_block_householder(dm, frag)
        pivoted = build_block_householder(dm, frag, pivot=True)
        d = subspace_distance(householder_bath(plain),
                              householder_bath(pivoted))
        assert d < 1e-9


class TestClusterBlocks:
    def test_two_orbital_blocks(self):
        hr = build_block_householder(H2_GAMMA,
                                     FragmentPartition.from_sites([0], 2))
        blocks = cluster_blocks(hr)
        assert blocks.gamma_bb[0, 0] == pytest.approx(0.5)
        assert blocks.gamma_bf[0, 0] == pytest.approx(-0.5)
        assert blocks.gamma_ee.size == 0

    def test_blocks_tile_gamma_tilde(self, half_filled_ring6):
        hr = build_block_householder(half_filled_ring6,
                                     FragmentPartition.from_sites([1], 6))
        blocks = cluster_blocks(hr)
        n = 1
        gt = hr.gamma_tilde
        assert np.array_equal(blocks.gamma_ff, gt[:n, :n])
        assert np.array_equal(blocks.gamma_ee, gt[2 * n:, 2 * n:])
        assert linalg.norm_inf(gt[:n, n:2 * n] - blocks.gamma_bf.T) < 1e-12


class TestClusterCoeffs:
    def test_two_orbital(self):
        hr = build_block_householder(H2_GAMMA,
                                     FragmentPartition.from_sites([0], 2))
        assert np.allclose(cluster_coeffs(hr), [[1.0, 0.0], [0.0, -1.0]])

    def test_orthonormal_random(self):
        rng = np.random.default_rng(8)
        dm = random_meanfield(rng, 15, min_occ=2)
        frag = FragmentPartition.from_sites([3, 7], 15)
        c = cluster_coeffs(build_block_householder(dm, frag))
        assert linalg.norm_inf(c.T @ c - np.eye(4)) < 1e-10
        # fragment columns are canonical unit vectors on the fragment sites
        assert np.allclose(c[:, 0], np.eye(15)[:, 3])
        assert np.allclose(c[:, 1], np.eye(15)[:, 7])

    def test_ring_bath_mirror_symmetry(self):
        dm = ring_rdm(10, 5)
        hr = build_block_householder(dm, FragmentPartition.from_sites([0],
                                                                      10))
        bath = cluster_coeffs(hr)[:, 1]
        for k in range(1, 10):
            assert abs(abs(bath[k]) - abs(bath[10 - k])) < 1e-10


class TestSvdBath:
    def test_two_orbital_bonding(self):
        bs = svd_bath(H2_GAMMA, FragmentPartition.from_sites([0], 2))
        assert abs(bs.singular_values[0] - 1.0 / np.sqrt(2.0)) < 1e-12
        hh = householder_bath(
            build_block_householder(H2_GAMMA,
                                    FragmentPartition.from_sites([0], 2)))
        assert subspace_distance(bs, hh) < 1e-10

    def test_ring_span_equality(self, half_filled_ring6):
        frag = FragmentPartition.from_sites([0], 6)
        hh = householder_bath(build_block_householder(half_filled_ring6,
                                                      frag))
        sv = svd_bath(half_filled_ring6, frag)
        assert subspace_distance(hh, sv) < 1e-10

    @pytest.mark.parametrize("n_frag", [1, 2, 3])
    def test_random_equivalence(self, n_frag):
        rng = np.random.default_rng(40 + n_frag)
        for _ in range(20):
            dm = random_meanfield(rng, 20, min_occ=n_frag)
            sites = sorted(int(s) for s in
                           rng.choice(20, size=n_frag, replace=False))
            frag = FragmentPartition.from_sites(sites, 20)
            hh = householder_bath(build_block_householder(dm, frag,
                                                          pivot=True))
            sv = svd_bath(dm, frag)
            assert subspace_distance(hh, sv) < 1e-8
            # bath vectors live strictly outside the fragment
            assert linalg.norm_inf(sv.coeffs[frag.fragment_sites]) < 1e-10
            assert linalg.norm_inf(sv.coeffs.T @ sv.coeffs -
                                   np.eye(n_frag)) < 1e-10

    def test_requires_idempotent(self, hubbard4_fci_rdm):
        with pytest.raises(ValueError):
            svd_bath(hubbard4_fci_rdm, FragmentPartition.from_sites([0], 4))

    def test_degenerate_singular_value(self):
        # fully decoupled fragment: overlap singular value exactly 1
        gamma = np.zeros((4, 4))
        gamma[0, 0] = 1.0
        gamma[2:, 2:] = 0.5
        gamma[2, 3] = gamma[3, 2] = 0.5
        dm = DensityMatrix(gamma=gamma, n_elec_per_spin=2, idempotent=True)
        with pytest.raises(DegenerateSingularValue):
            svd_bath(dm, FragmentPartition.from_sites([0], 4))


class TestSubspaceDistance:
    def test_identical(self):
        c = np.array([[1.0], [0.0]])
        assert subspace_distance(BathSpace(c), BathSpace(c.copy())) == 0.0

    def test_orthogonal_one_dim(self):
        a = BathSpace(np.array([[1.0], [0.0]]))
        b = BathSpace(np.array([[0.0], [1.0]]))
        assert subspace_distance(a, b) == pytest.approx(1.0)

    def test_dimension_mismatch(self):
        with pytest.raises(DimensionMismatch):
            subspace_distance(BathSpace(np.eye(3)[:, :1]),
                              BathSpace(np.eye(3)[:, :2]))

    def test_basis_invariance(self):
        rng = np.random.default_rng(9)
        c = rng.normal(size=(8, 3))
        q, _ = np.linalg.qr(rng.normal(size=(3, 3)))
        assert subspace_distance(BathSpace(c), BathSpace(c @ q)) < 1e-12


from hypothesis import given, settings
from hypothesis import strategies as st


@settings(max_examples=50, deadline=None)
@given(st.lists(st.floats(min_value=-5.0, max_value=5.0), min_size=2,
                max_size=9))
def test_scalar_reflection_preserves_norms(values):
    x = np.array(values)
    r, _ = scalar_householder(x, 0)
    assert abs(np.linalg.norm(r @ x) - np.linalg.norm(x)) < 1e-10
    assert linalg.norm_inf(r @ r - np.eye(len(values))) < 1e-10


def test_occupation_spectrum_bounds(half_filled_ring6, hubbard4_fci_rdm):
    # any physical 1-RDM has occupations inside [0, 1] per spin channel
    for dm in (half_filled_ring6, hubbard4_fci_rdm):
        occ = dm.occupation_spectrum()
        assert occ[0] > -1e-8
        assert occ[-1] < 1.0 + 1e-8
