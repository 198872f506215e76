"""Projection of the full problem into the fragment+bath cluster.

The embedded problem keeps 2N spatial orbitals (fragment + bath) and, for an
idempotent source 1-RDM, exactly 2N electrons.  Two interaction pictures:

* NIB (non-interacting bath): the local repulsion acts on the fragment
  orbitals only.
* IB (interacting bath): the full two-body operator is projected into the
  cluster basis (exact four-index transform over the cluster columns).

A fragment-local chemical potential mu_frag is subtracted from the fragment
number operators, so raising it pulls electrons onto the fragment.
"""

from dataclasses import dataclass, replace

import numpy as np

from .errors import DimensionMismatch, NonIdempotentSource
from .householder import cluster_coeffs
from .lattice import LatticeSpec, build_h1

NIB = "NIB"
IB = "IB"


@dataclass(frozen=True)
class ClusterHamiltonian:
    """Embedded cluster problem, closed shell.

    h_eff includes the -mu_frag shift on the fragment diagonals (mu_frag
    records the value used).  e_core_env is the constant energy carried by
    the cluster's environment.
    """

    n_cluster: int
    n_frag: int
    n_elec_cluster: int
    h_eff: np.ndarray
    g_eff: np.ndarray
    mu_frag: float
    e_core_env: float
    mode: str

    def with_mu_frag(self, mu):
        """Same cluster with a different fragment chemical potential."""
        h = self.h_eff.copy()
        idx = np.arange(self.n_frag)
        h[idx, idx] += self.mu_frag - mu
        return replace(self, h_eff=h, mu_frag=float(mu))


def _coulomb_exchange(g2, density):
    j = np.einsum("pqrs,rs->pq", g2, density, optimize=True)
    k = np.einsum("prqs,rs->pq", g2, density, optimize=True)
    return j, k


def project_one_body(h_full, coeffs, gamma_env=None, g_full=None):
    """One-body cluster Hamiltonian and the environment's constant energy.

    For lattice problems (no g_full) the environment is decoupled at mean
    field and h_eff is the plain projection C.T @ h @ C.  With a two-body
    tensor, the environment density (both spins) dresses the projection with
    its closed-shell Coulomb/exchange potential.
    """
    h_full = np.asarray(h_full, dtype=float)
    coeffs = np.asarray(coeffs, dtype=float)
    if coeffs.shape[0] != h_full.shape[0]:
        raise DimensionMismatch("coefficients have %d rows, h has %d"
                                % (coeffs.shape[0], h_full.shape[0]))
    if g_full is None:
        h_eff = coeffs.T @ h_full @ coeffs
        e_core = 0.0
        if gamma_env is not None:
            e_core = 2.0 * float(np.sum(gamma_env * h_full))
        return 0.5 * (h_eff + h_eff.T), e_core
    if gamma_env is None:
        raise DimensionMismatch("environment density required with g_full")
    d_env = 2.0 * np.asarray(gamma_env, dtype=float)
    j, k = _coulomb_exchange(g_full, d_env)
    v_env = j - 0.5 * k
    h_eff = coeffs.T @ (h_full + v_env) @ coeffs
    e_core = float(np.sum(d_env * h_full) + 0.5 * np.sum(d_env * v_env))
    return 0.5 * (h_eff + h_eff.T), e_core


def _apply_mu(h_eff, n_frag, mu):
    h = h_eff.copy()
    idx = np.arange(n_frag)
    h[idx, idx] -= mu
    return h


def tensor_mean_field(g_eff):
    """Closed-shell mean field of a two-body tensor at unit occupations.

    2J - K with J_ps = sum_r g[p,s,r,r] and K_ps = sum_r g[p,r,r,s]; used to
    center interacting clusters so hole and electron doping are treated
    evenly (the two-body operator minus half this matrix is self-conjugate
    under the particle-hole transformation).
    """
    j = np.einsum("psrr->ps", g_eff)
    k = np.einsum("prrs->ps", g_eff)
    return 2.0 * j - k


def build_cluster_hamiltonian(mode, system, hh, mu_frag=0.0, *,
                              gamma_env=None, source_idempotent=True,
                              v_bath=0.0, ph_symmetric=False):
    """Assemble the interacting cluster problem from a reflection result.

    ``system`` is a LatticeSpec (Hubbard interaction) or an IntegralSet
    (molecular h1/g2).  ``v_bath`` adds a uniform potential on the bath
    diagonals, used by the self-consistent potential loop.  With
    ``ph_symmetric`` the one-body block is shifted by minus half the
    tensor's own mean field, which makes the cluster exactly covariant
    under particle-hole conjugation; the fragment potential is then
    measured from the half-filling point.
    """
    if mode not in (NIB, IB):
        raise ValueError("mode must be NIB or IB")
    if not source_idempotent:
        raise NonIdempotentSource(
            "cluster construction requires an idempotent source 1-RDM")
    n = hh.n_frag
    nc = 2 * n
    coeffs = cluster_coeffs(hh)

    if isinstance(system, LatticeSpec):
        h_full = build_h1(system, 0.0)
        h_eff, e_core = project_one_body(h_full, coeffs,
                                         gamma_env=gamma_env)
        g_eff = np.zeros((nc, nc, nc, nc))
        if mode == NIB:
            for f in range(n):
                g_eff[f, f, f, f] = system.u
        else:
            # exact projection of the on-site tensor U * delta_pqrs
            if system.u != 0.0:
                g_eff = system.u * np.einsum(
                    "xp,xq,xr,xs->pqrs", coeffs, coeffs, coeffs, coeffs,
                    optimize=True)
    else:
        ints = system
        h_eff, e_core = project_one_body(ints.h1, coeffs,
                                         gamma_env=gamma_env,
                                         g_full=ints.g2)
        if mode == NIB:
            g_eff = np.zeros((nc, nc, nc, nc))
            g_eff[:n, :n, :n, :n] = _transform_g(
                ints.g2, coeffs[:, :n])
        else:
            g_eff = _transform_g(ints.g2, coeffs)

    if v_bath:
        bath = np.arange(n, nc)
        h_eff = h_eff.copy()
        h_eff[bath, bath] += v_bath
    if ph_symmetric:
        h_eff = h_eff - 0.5 * tensor_mean_field(g_eff)
    h_eff = _apply_mu(h_eff, n, mu_frag)
    return ClusterHamiltonian(n_cluster=nc, n_frag=n, n_elec_cluster=nc,
                              h_eff=h_eff, g_eff=g_eff,
                              mu_frag=float(mu_frag), e_core_env=e_core,
                              mode=mode)


def build_whole_system_hamiltonian(system, n_elec, mu_frag=0.0):
    """Degenerate "embedding of everything": no bath, no transformation."""
    if isinstance(system, LatticeSpec):
        L = system.n_sites
        h_eff = build_h1(system, 0.0)
        g_eff = np.zeros((L, L, L, L))
        for s in range(L):
            g_eff[s, s, s, s] = system.u
        n = L
    else:
        h_eff = system.h1.copy()
        g_eff = system.g2
        n = system.n_orb
    h_eff = _apply_mu(h_eff, n, mu_frag)
    return ClusterHamiltonian(n_cluster=n, n_frag=n, n_elec_cluster=n_elec,
                              h_eff=h_eff, g_eff=g_eff,
                              mu_frag=float(mu_frag), e_core_env=0.0,
                              mode=IB)


def _transform_g(g2, c):
    """Four-index transform as four sequential one-index contractions."""
    g = np.tensordot(g2, c, axes=(3, 0))        # pqrS
    g = np.tensordot(g, c, axes=(2, 0))         # pqSR -> order pq,s,r
    g = np.tensordot(g, c, axes=(1, 0))         # p,s,r,q
    g = np.tensordot(g, c, axes=(0, 0))         # s,r,q,p
    return g.transpose(3, 2, 1, 0)
