"""Exact diagonalization over alpha/beta determinant strings.

Determinants are occupation bitmasks; matrix elements follow the usual
Slater-Condon rules, realized here through spin-summed single-excitation
generators E_pq = sum_sigma a^+_{p sigma} a_{q sigma}.  With the CI vector
stored as a (dim_alpha x dim_beta) matrix, applying E_pq is a signed
row/column scatter, and

    H = sum_pq h'_pq E_pq + 1/2 sum_pqrs (pq|rs) E_pq E_rs,
    h'_pq = h_pq - 1/2 sum_r (pr|rq)

turns the matrix-vector product into n_orb^2 scatters plus one GEMM against
the integral tensor.  Small problems are assembled densely from the same
machinery; large ones go through a LinearOperator and Lanczos.

The 2-RDM is returned in chemist convention:
    rdm2[p,q,r,s] = <E_pq E_rs> - delta_qr <E_ps>.
"""

import itertools
from dataclasses import dataclass
from math import comb

import numpy as np
from scipy.sparse.linalg import LinearOperator, eigsh

from .errors import NoConvergence, Overflow

DENSE_CUTOFF = 4000
BASIS_DIM_CAP = 2_000_000
DEGENERACY_TOL = 1e-9


@dataclass(frozen=True)
class DeterminantBasis:
    """Product basis of alpha and beta occupation strings (sorted bitmasks)."""

    n_orb: int
    n_alpha: int
    n_beta: int
    alpha_strings: np.ndarray
    beta_strings: np.ndarray

    @property
    def dim_alpha(self):
        return self.alpha_strings.shape[0]

    @property
    def dim_beta(self):
        return self.beta_strings.shape[0]

    @property
    def dim(self):
        return self.dim_alpha * self.dim_beta

    @property
    def n_elec(self):
        return self.n_alpha + self.n_beta


def _occupation_strings(n_orb, n_occ):
    masks = [sum(1 << i for i in occ)
             for occ in itertools.combinations(range(n_orb), n_occ)]
    return np.array(sorted(masks), dtype=np.int64)


def enumerate_determinants(n_orb, n_alpha, n_beta, dim_cap=BASIS_DIM_CAP):
    """All (n_alpha, n_beta) determinants over n_orb spatial orbitals."""
    if not (0 <= n_alpha <= n_orb and 0 <= n_beta <= n_orb):
        raise ValueError("electron counts out of range")
    dim = comb(n_orb, n_alpha) * comb(n_orb, n_beta)
    if dim > dim_cap:
        raise Overflow("determinant space %d exceeds cap %d" % (dim, dim_cap))
    return DeterminantBasis(
        n_orb=n_orb, n_alpha=n_alpha, n_beta=n_beta,
        alpha_strings=_occupation_strings(n_orb, n_alpha),
        beta_strings=_occupation_strings(n_orb, n_beta),
    )


def _parity(mask, orb):
    """(-1)^(number of occupied orbitals below orb)."""
    below = mask & ((1 << orb) - 1)
    return -1.0 if bin(below).count("1") & 1 else 1.0


def _excitation_table(strings, n_orb):
    """For each (p, q): aligned arrays (src, dst, sign) of E_pq actions.

    Destination indices are unique for a fixed (p, q), so signed scatters can
    use plain fancy-index accumulation.
    """
    addr = {int(m): i for i, m in enumerate(strings)}
    lists = {(p, q): ([], [], []) for p in range(n_orb) for q in range(n_orb)}
    for i, m in enumerate(strings):
        m = int(m)
        occ = [o for o in range(n_orb) if (m >> o) & 1]
        for q in occ:
            m1 = m & ~(1 << q)
            sign_q = _parity(m, q)
            for p in range(n_orb):
                if p == q:
                    src, dst, sgn = lists[(p, p)]
                    src.append(i)
                    dst.append(i)
                    sgn.append(1.0)
                elif not (m1 >> p) & 1:
                    m2 = m1 | (1 << p)
                    src, dst, sgn = lists[(p, q)]
                    src.append(i)
                    dst.append(addr[m2])
                    sgn.append(sign_q * _parity(m1, p))
    return {
        pq: (np.array(src, dtype=np.intp), np.array(dst, dtype=np.intp),
             np.array(sgn))
        for pq, (src, dst, sgn) in lists.items()
    }


_TABLE_CACHE = {}


def _tables(n_orb, n_occ):
    key = (n_orb, n_occ)
    if key not in _TABLE_CACHE:
        strings = _occupation_strings(n_orb, n_occ)
        _TABLE_CACHE[key] = _excitation_table(strings, n_orb)
    return _TABLE_CACHE[key]


class CiOperator:
    """Hamiltonian action on CI vectors for fixed integrals and basis."""

    def __init__(self, h1, g2, basis):
        h1 = np.asarray(h1, dtype=float)
        g2 = np.asarray(g2, dtype=float)
        n = basis.n_orb
        if h1.shape != (n, n) or g2.shape != (n, n, n, n):
            raise ValueError("integral shapes do not match the basis")
        self.basis = basis
        self.h1 = h1
        self.g2 = g2
        self.h1_eff = h1 - 0.5 * np.einsum("prrq->pq", g2)
        self.g_flat = g2.reshape(n * n, n * n)
        self.ta = _tables(n, basis.n_alpha)
        self.tb = _tables(n, basis.n_beta)

    # -- generator scatters ------------------------------------------------

    def apply_e_all(self, c):
        """T[p,q] = E_pq c for all pairs.

        c has shape (dim_a, dim_b) or (dim_a, dim_b, batch); destination
        indices are unique per pair, so fancy-index accumulation is exact.
        """
        n = self.basis.n_orb
        t = np.zeros((n * n,) + c.shape)
        a_sgn = (slice(None), None, None) if c.ndim == 3 else (slice(None), None)
        b_sgn = (None, slice(None), None) if c.ndim == 3 else (None, slice(None))
        for p in range(n):
            for q in range(n):
                out = t[p * n + q]
                src, dst, sgn = self.ta[(p, q)]
                if src.size:
                    out[dst] += sgn[a_sgn] * c[src]
                src, dst, sgn = self.tb[(p, q)]
                if src.size:
                    out[:, dst] += c[:, src] * sgn[b_sgn]
        return t

    def _accumulate_e(self, blocks, out):
        """out += sum_pq E_pq blocks[p,q]."""
        n = self.basis.n_orb
        a_sgn = (slice(None), None, None) if out.ndim == 3 else (slice(None), None)
        b_sgn = (None, slice(None), None) if out.ndim == 3 else (None, slice(None))
        for p in range(n):
            for q in range(n):
                blk = blocks[p * n + q]
                src, dst, sgn = self.ta[(p, q)]
                if src.size:
                    out[dst] += sgn[a_sgn] * blk[src]
                src, dst, sgn = self.tb[(p, q)]
                if src.size:
                    out[:, dst] += blk[:, src] * sgn[b_sgn]

    # -- Hamiltonian -------------------------------------------------------

    def _sigma(self, c):
        n = self.basis.n_orb
        t = self.apply_e_all(c)
        sigma = np.tensordot(self.h1_eff.reshape(n * n),
                             t.reshape(n * n, -1), axes=(0, 0))
        sigma = sigma.reshape(c.shape)
        g_t = 0.5 * (self.g_flat @ t.reshape(n * n, -1))
        self._accumulate_e(g_t.reshape(t.shape), sigma)
        return sigma

    def matvec(self, x):
        b = self.basis
        c = np.asarray(x, dtype=float).reshape(b.dim_alpha, b.dim_beta)
        return self._sigma(c).reshape(np.asarray(x).shape)

    def matmat(self, x):
        """Hamiltonian times a block of column vectors."""
        b = self.basis
        nvec = x.shape[1]
        c = np.asarray(x, dtype=float).reshape(b.dim_alpha, b.dim_beta, nvec)
        return self._sigma(c).reshape(b.dim, nvec)

    def diagonal(self):
        """Diagonal of H, for solver preconditioning and seeding."""
        b = self.basis
        n = b.n_orb
        occ_a = np.array([[(int(m) >> o) & 1 for o in range(n)]
                          for m in b.alpha_strings], dtype=float)
        occ_b = np.array([[(int(m) >> o) & 1 for o in range(n)]
                          for m in b.beta_strings], dtype=float)
        occ = occ_a[:, None, :] + occ_b[None, :, :]   # (da, db, n)
        diag = occ @ np.diag(self.h1)
        jmat = np.einsum("ppqq->pq", self.g2)
        kmat = np.einsum("pqqp->pq", self.g2)
        diag += 0.5 * np.einsum("abp,pq,abq->ab", occ, jmat, occ)
        diag -= 0.5 * (np.einsum("ap,pq,aq->a", occ_a, kmat,
                                 occ_a)[:, None] +
                       np.einsum("bp,pq,bq->b", occ_b, kmat,
                                 occ_b)[None, :])
        return diag.ravel()

    def dense(self, chunk=256):
        """Explicit Hamiltonian matrix (small bases only)."""
        dim = self.basis.dim
        h = np.empty((dim, dim))
        eye = np.eye(dim)
        for lo in range(0, dim, chunk):
            hi = min(lo + chunk, dim)
            h[:, lo:hi] = self.matmat(eye[:, lo:hi])
        return 0.5 * (h + h.T)

    def linear_operator(self):
        dim = self.basis.dim
        return LinearOperator((dim, dim), matvec=self.matvec, dtype=float)


def build_hamiltonian(ch, basis):
    """Hamiltonian for a cluster problem: dense array or LinearOperator."""
    op = CiOperator(ch.h_eff, ch.g_eff, basis)
    if basis.dim <= DENSE_CUTOFF:
        return op.dense()
    return op.linear_operator()


def make_rdms(ci, basis, _op=None):
    """Spin-summed 1-RDM and chemist-convention 2-RDM of a CI vector."""
    if _op is None:
        n = basis.n_orb
        _op = CiOperator(np.zeros((n, n)), np.zeros((n, n, n, n)), basis)
    c = np.asarray(ci, dtype=float).reshape(basis.dim_alpha, basis.dim_beta)
    nrm = np.linalg.norm(c)
    if abs(nrm - 1.0) > 1e-10:
        raise ValueError("CI vector is not normalized (|c| = %.3e)" % nrm)
    n = basis.n_orb
    t = _op.apply_e_all(c).reshape(n * n, -1)
    rdm1 = (t @ c.ravel()).reshape(n, n)
    rdm1 = 0.5 * (rdm1 + rdm1.T)
    pair = (t @ t.T).reshape(n, n, n, n)        # <E_qp E_rs> at [q,p,r,s]
    rdm2 = pair.transpose(1, 0, 2, 3).copy()
    for q in range(n):
        rdm2[:, q, q, :] -= rdm1
    return rdm1, rdm2


@dataclass(frozen=True)
class ClusterSolution:
    """Ground state of a cluster problem with its reduced density matrices."""

    energy: float
    ci: np.ndarray
    basis: DeterminantBasis
    rdm1: np.ndarray
    rdm2: np.ndarray
    degenerate: bool = False


def _lowest_eigenpair(op, dim):
    if dim <= DENSE_CUTOFF:
        h = op.dense()
        w, v = np.linalg.eigh(h)
        gap = w[1] - w[0] if dim > 1 else np.inf
        return w[0], v[:, 0], gap < DEGENERACY_TOL
    diag = op.diagonal()
    v0 = np.full(dim, 1e-3)
    v0[int(np.argmin(diag))] = 1.0
    v0 /= np.linalg.norm(v0)
    k = 2 if dim > 2 else 1
    try:
        w, v = eigsh(op.linear_operator(), k=k, which="SA", v0=v0,
                     tol=1e-12, maxiter=max(4000, 40 * dim // 100))
    except Exception as exc:   # ArpackNoConvergence and friends
        raise NoConvergence("iterative eigensolver failed: %s" % exc) from exc
    order = np.argsort(w)
    gap = w[order[1]] - w[order[0]] if k > 1 else np.inf
    return w[order[0]], v[:, order[0]], gap < DEGENERACY_TOL


def ground_state(ch, basis=None):
    """Lowest eigenpair of a ClusterHamiltonian plus its RDMs."""
    if basis is None:
        na = ch.n_elec_cluster // 2
        nb = ch.n_elec_cluster - na
        basis = enumerate_determinants(ch.n_cluster, na, nb)
    op = CiOperator(ch.h_eff, ch.g_eff, basis)
    energy, vec, degenerate = _lowest_eigenpair(op, basis.dim)
    vec = vec / np.linalg.norm(vec)
    # fix the overall sign for reproducible CI vectors
    lead = np.argmax(np.abs(vec))
    if vec[lead] < 0:
        vec = -vec
    rdm1, rdm2 = make_rdms(vec, basis, _op=op)
    return ClusterSolution(energy=float(energy), ci=vec, basis=basis,
                           rdm1=rdm1, rdm2=rdm2, degenerate=degenerate)
