"""Block reflections that carve a fragment+bath cluster out of a 1-RDM.

Given a one-body reduced density matrix gamma (one spin channel) and a chosen
fragment of N orbitals, a single symmetric involutive reflection R zeroes the
coupling between the fragment and everything beyond the first N environment
orbitals.  The transformed matrix R @ gamma @ R then exposes a 2N-orbital
"cluster" block (fragment + bath) on top and an environment block below.  For
idempotent gamma the two blocks decouple exactly and the cluster holds exactly
N electrons per spin.

Construction of R from gamma, with the fragment columns split as
X = [gamma_ff; gamma1; gamma2]:

    lam = gamma2 @ inv(gamma1)
    m2  = 1 + lam.T @ lam            (SPD)
    w   = sqrt(m2) @ gamma1          (positive SPD branch of the root)
    v   = [0; gamma1 + w; gamma2]
    R   = 1 - 2 v (v.T v)^{-1} v.T

which guarantees R @ X = [gamma_ff; -w; 0]: the fragment block is untouched
and the deep-environment coupling vanishes.

An independent cross-check construction (`svd_bath`) builds the same bath
subspace from the singular value decomposition of the fragment/occupied
overlap, the way density-matrix embedding codes traditionally do.
"""

from dataclasses import dataclass, field

import numpy as np

from . import linalg
from .errors import (BadPartition, DegenerateSingularValue, DimensionMismatch,
                     SingularCoupling)

IDEMPOTENCY_TOL = 1e-10
COUPLING_RTOL = 1e-10   # smallest singular value of gamma1, relative to |gamma|


@dataclass(frozen=True)
class DensityMatrix:
    """Real symmetric 1-RDM for one spin channel.

    ``idempotent`` is a certificate set by mean-field builders; it is checked
    at construction when claimed.  ``n_elec_per_spin`` may be None for
    matrices not produced by an integer filling.
    """

    gamma: np.ndarray
    n_elec_per_spin: int | None = None
    idempotent: bool = False
    check: bool = True

    def __post_init__(self):
        gamma = np.asarray(self.gamma, dtype=float)
        object.__setattr__(self, "gamma", gamma)
        if not self.check:
            return
        linalg.check_symmetric(gamma, what="density matrix")
        if self.idempotent:
            dev = linalg.norm_inf(gamma @ gamma - gamma)
            if dev > IDEMPOTENCY_TOL:
                raise ValueError(
                    "idempotency certificate violated: |g@g-g|=%.3e" % dev)

    @property
    def n_orb(self):
        return self.gamma.shape[0]

    def occupation_spectrum(self):
        """Eigenvalues of gamma, ascending (occupations in [0, 1])."""
        return linalg.sym_eig(self.gamma).values


@dataclass(frozen=True)
class FragmentPartition:
    """Permutation of the orbitals putting the fragment first.

    ``order`` is a bijection of 0..n_total-1; its first ``n_frag`` entries are
    the fragment orbitals.  The reflection needs at least as many environment
    orbitals as fragment ones (2N <= n_total).
    """

    order: np.ndarray
    n_frag: int

    def __post_init__(self):
        order = np.asarray(self.order, dtype=int)
        object.__setattr__(self, "order", order)
        n = order.shape[0]
        if sorted(order.tolist()) != list(range(n)):
            raise BadPartition("order is not a permutation of 0..%d" % (n - 1))
        if not 1 <= self.n_frag:
            raise BadPartition("fragment must contain at least one orbital")
        if 2 * self.n_frag > n:
            raise BadPartition(
                "2N = %d exceeds orbital count %d" % (2 * self.n_frag, n))

    @classmethod
    def from_sites(cls, sites, n_total):
        """Fragment given as a list of orbital indices; the rest keep order."""
        sites = list(sites)
        rest = [i for i in range(n_total) if i not in set(sites)]
        if len(set(sites)) != len(sites):
            raise BadPartition("duplicate fragment sites")
        return cls(order=np.array(sites + rest), n_frag=len(sites))

    @property
    def n_total(self):
        return self.order.shape[0]

    @property
    def fragment_sites(self):
        return self.order[:self.n_frag]

    @property
    def environment_sites(self):
        return self.order[self.n_frag:]


@dataclass(frozen=True)
class HouseholderResult:
    """Reflection R, its generator V and the transformed 1-RDM.

    All matrices live in the permuted (fragment-first) basis recorded in
    ``partition``.  R is symmetric and involutive; its first n_frag rows are
    exact identity rows, so the fragment block of gamma is untouched.
    """

    r: np.ndarray
    v: np.ndarray
    gamma_tilde: np.ndarray
    n_frag: int
    partition: FragmentPartition


@dataclass(frozen=True)
class ClusterBlocks:
    """Tiles of the transformed 1-RDM (fragment-first basis).

    gamma_ef vanishes by construction; gamma_eb vanishes additionally when
    the source matrix was idempotent.
    """

    gamma_ff: np.ndarray
    gamma_bf: np.ndarray
    gamma_bb: np.ndarray
    gamma_ef: np.ndarray
    gamma_eb: np.ndarray
    gamma_ee: np.ndarray


@dataclass(frozen=True)
class BathSpace:
    """Orthonormal bath vectors in the original orbital basis.

    Columns are orthogonal to the fragment subspace.  ``singular_values`` is
    populated by the SVD route only (descending).
    """

    coeffs: np.ndarray
    singular_values: np.ndarray | None = None


def scalar_householder(x, pivot=0):
    """Reflection zeroing a column strictly below ``pivot + 1``.

    Entries up to and including the pivot are untouched; the norm of the
    sub-column collects at pivot+1 with the numerically stable sign.
    Returns (R, trivial) where ``trivial`` flags a sub-column too small to
    reflect (R is then the identity).
    """
    x = np.asarray(x, dtype=float).ravel()
    n = x.shape[0]
    if not 0 <= pivot < n:
        raise ValueError("pivot %d out of range" % pivot)
    r = np.eye(n)
    u = x[pivot + 1:]
    if u.shape[0] == 0:
        return r, True
    nu = np.linalg.norm(u)
    if nu < 1e-14:
        return r, True
    y = np.zeros_like(u)
    y[0] = -np.copysign(nu, u[0])
    v = u - y
    v /= np.linalg.norm(v)
    r[pivot + 1:, pivot + 1:] -= 2.0 * np.outer(v, v)
    return r, False


def permute_gamma(dm, frag):
    """gamma re-indexed so the fragment comes first."""
    if frag.n_total != dm.n_orb:
        raise BadPartition("partition is for %d orbitals, matrix has %d"
                           % (frag.n_total, dm.n_orb))
    o = frag.order
    return dm.gamma[np.ix_(o, o)]


def partition_columns(dm, frag):
    """Split the fragment columns of gamma into (gamma_ff, gamma1, gamma2).

    gamma_ff is the N x N fragment block, gamma1 the next N environment rows
    and gamma2 the remaining (n_total - 2N) rows, all in the permuted order.
    """
    gp = permute_gamma(dm, frag)
    n = frag.n_frag
    x = gp[:, :n]
    return x[:n].copy(), x[n:2 * n].copy(), x[2 * n:].copy()


def _pivot_environment_rows(frag, xt):
    """Reorder environment rows so the leading N are as independent as can be.

    Row selection via column-pivoted QR of the transposed fragment-column
    block; only the labelling of environment orbitals changes, never the
    bath subspace itself.
    """
    import scipy.linalg

    n = frag.n_frag
    if xt.shape[0] <= n:
        return frag
    _, _, perm = scipy.linalg.qr(xt.T, pivoting=True, mode="economic")
    env = frag.order[n:]
    new_env = env[perm]
    order = np.concatenate([frag.order[:n], new_env])
    return FragmentPartition(order=order, n_frag=n)


def build_block_householder(dm, frag, pivot=False):
    """Construct the block reflection for ``frag`` from the 1-RDM ``dm``.

    Raises SingularCoupling when gamma1 is numerically singular, which
    signals a fragment with no environment coupling to exploit.  With
    ``pivot=True`` the environment rows feeding gamma1 are re-picked by a
    rank-revealing factorization first (labelling change only).
    """
    linalg.check_symmetric(dm.gamma, what="density matrix")
    if pivot:
        _, g1_probe, g2_probe = partition_columns(dm, frag)
        xt = np.vstack([g1_probe, g2_probe])
        frag = _pivot_environment_rows(frag, xt)
    gp = permute_gamma(dm, frag)
    n = frag.n_frag
    ntot = frag.n_total
    gamma1 = gp[n:2 * n, :n]
    gamma2 = gp[2 * n:, :n]

    smin = linalg.smallest_singular_value(gamma1)
    if smin < COUPLING_RTOL * max(linalg.norm_inf(dm.gamma), 1e-300):
        raise SingularCoupling(
            "fragment-environment coupling block is singular "
            "(smallest singular value %.3e)" % smin)

    # lam = gamma2 @ inv(gamma1), via a solve on the transposed system
    lam = linalg.solve(gamma1.T, gamma2.T).T if gamma2.size else \
        np.zeros((0, n))
    m2 = np.eye(n) + lam.T @ lam
    w = linalg.spd_sqrt(m2) @ gamma1

    v = np.zeros((ntot, n))
    v[n:2 * n] = gamma1 + w
    v[2 * n:] = gamma2
    # R = 1 - P with the rank-N projector P = 2 V (V^T V)^{-1} V^T; the
    # transform is applied as rank-N updates, never as L^3 products
    m = v.T @ v
    r = np.eye(ntot) - 2.0 * v @ linalg.solve(m, v.T)
    r = 0.5 * (r + r.T)
    b = linalg.solve(m, v.T @ gp)               # M^{-1} V^T gamma, N x L
    pg = 2.0 * v @ b                            # P gamma
    c = linalg.solve(m, (b @ v).T).T            # (B V) M^{-1}
    pgp = 4.0 * (v @ c) @ v.T                   # P gamma P
    gt = gp - pg - pg.T + pgp
    gt = 0.5 * (gt + gt.T)
    return HouseholderResult(r=r, v=v, gamma_tilde=gt, n_frag=n,
                             partition=frag)


def cluster_blocks(hr):
    """Tile the transformed 1-RDM into its named blocks."""
    n = hr.n_frag
    gt = hr.gamma_tilde
    return ClusterBlocks(
        gamma_ff=gt[:n, :n],
        gamma_bf=gt[n:2 * n, :n],
        gamma_bb=gt[n:2 * n, n:2 * n],
        gamma_ef=gt[2 * n:, :n],
        gamma_eb=gt[2 * n:, n:2 * n],
        gamma_ee=gt[2 * n:, 2 * n:],
    )


def cluster_coeffs(hr):
    """Cluster orbital coefficients in the original basis, n_total x 2N.

    The first N columns are unit vectors on the fragment orbitals; the next N
    are the bath orbitals (columns N..2N-1 of R, rows un-permuted).
    """
    n = hr.n_frag
    coeffs_permuted = hr.r[:, :2 * n]
    out = np.empty_like(coeffs_permuted)
    out[hr.partition.order] = coeffs_permuted
    return out


def householder_bath(hr):
    """Bath subspace of the reflection, as a BathSpace in the original basis."""
    return BathSpace(coeffs=cluster_coeffs(hr)[:, hr.n_frag:])


def svd_bath(dm, frag):
    """DMET-style bath from the fragment/occupied overlap SVD.

    Only defined for idempotent gamma = C_occ @ C_occ.T.  Each bath vector is
    the environment projection of a rotated occupied orbital, normalized by
    sqrt(1 - sigma^2); sigma values pinned at 0 or 1 leave no usable vector
    and raise DegenerateSingularValue.
    """
    if not dm.idempotent:
        raise ValueError("svd bath requires an idempotent density matrix")
    if frag.n_total != dm.n_orb:
        raise BadPartition("partition is for %d orbitals, matrix has %d"
                           % (frag.n_total, dm.n_orb))
    eig = linalg.sym_eig(dm.gamma)
    occ = eig.values > 0.5
    c_occ = eig.vectors[:, occ]
    n = frag.n_frag
    fsites = frag.fragment_sites
    esites = frag.environment_sites

    overlap = c_occ[fsites, :].T           # <kappa|f>, n_occ x N
    if overlap.shape[0] < n:
        raise DegenerateSingularValue(
            "only %d occupied orbitals for a %d-orbital fragment"
            % (overlap.shape[0], n))
    gram = overlap.T @ overlap
    geig = linalg.sym_eig(gram)
    order = np.argsort(geig.values)[::-1]   # descending, SVD convention
    sig2 = geig.values[order]
    vmat = geig.vectors[:, order]
    sig2 = np.clip(sig2, 0.0, None)
    sigma = np.sqrt(sig2)
    if np.any(sigma >= 1.0 - 1e-10):
        raise DegenerateSingularValue(
            "singular value at 1: bath vector norm vanishes")
    if np.any(sigma <= 1e-10):
        raise DegenerateSingularValue(
            "singular value at 0: fragment channel decoupled")

    u = overlap @ vmat / sigma
    rotated = c_occ @ u                     # |kappa_bar> in orbital basis
    coeffs = np.zeros((dm.n_orb, n))
    coeffs[esites] = rotated[esites]
    coeffs /= np.sqrt(1.0 - sig2)
    return BathSpace(coeffs=coeffs, singular_values=sigma)


def subspace_distance(a, b):
    """Entrywise max-abs distance between the two subspace projectors.

    Columns are re-orthonormalized first, so only the spans matter; 0 iff the
    subspaces coincide.
    """
    ca, cb = a.coeffs, b.coeffs
    if ca.shape != cb.shape:
        raise DimensionMismatch("bath shapes differ: %s vs %s"
                                % (ca.shape, cb.shape))
    qa, _ = np.linalg.qr(ca)
    qb, _ = np.linalg.qr(cb)
    return linalg.norm_inf(qa @ qa.T - qb @ qb.T)
