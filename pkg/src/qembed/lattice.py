"""One-body Hamiltonians and mean-field 1-RDMs for 1-D Hubbard rings."""

from dataclasses import dataclass, field

import numpy as np

from .errors import BadPotentialLength, FermiDegeneracy
from .householder import DensityMatrix

GAP_TOL = 1e-10


@dataclass(frozen=True)
class LatticeSpec:
    """Ring (or open chain) with hopping t, on-site repulsion u and v_ext."""

    n_sites: int
    u: float = 0.0
    t: float = 1.0
    v_ext: np.ndarray | None = None
    periodic: bool = True

    def __post_init__(self):
        if self.n_sites < 2:
            raise ValueError("need at least 2 sites")
        if self.t <= 0:
            raise ValueError("hopping must be positive")
        if self.u < 0:
            raise ValueError("on-site repulsion must be non-negative")
        v = self.v_ext
        if v is None:
            v = np.zeros(self.n_sites)
        v = np.asarray(v, dtype=float)
        if v.shape != (self.n_sites,):
            raise BadPotentialLength("v_ext must have one entry per site")
        object.__setattr__(self, "v_ext", v)

    @property
    def uniform(self):
        return bool(np.ptp(self.v_ext) == 0.0)


def hopping_matrix(spec):
    """Kinetic part only: -t on nearest-neighbour bonds.

    A 2-site ring keeps a single bond rather than a doubled one.
    """
    L = spec.n_sites
    h = np.zeros((L, L))
    last = L if spec.periodic and L > 2 else L - 1
    for s in range(last):
        sp = (s + 1) % L
        h[s, sp] -= spec.t
        h[sp, s] -= spec.t
    return h


def build_h1(spec, v_hxc=0.0):
    """One-body Hamiltonian: hopping plus v_ext plus v_hxc on the diagonal.

    v_hxc is a uniform scalar or a per-site array.
    """
    v = np.asarray(v_hxc, dtype=float)
    if v.ndim == 0 or v.shape == (1,):
        v = np.full(spec.n_sites, float(v))
    elif v.shape != (spec.n_sites,):
        raise BadPotentialLength(
            "v_hxc must be uniform or length %d" % spec.n_sites)
    h = hopping_matrix(spec)
    h[np.diag_indices_from(h)] += spec.v_ext + v
    return h


def orbitals(h):
    """Eigenvalues (ascending) and orbitals of a one-body Hamiltonian."""
    from . import linalg

    eig = linalg.sym_eig(h)
    return eig.values, eig.vectors


def rdm_from_orbitals(eps, c, n_per_spin, check_gap=True):
    """Aufbau 1-RDM from precomputed orbitals; errors on a degenerate edge."""
    L = eps.shape[0]
    if not 0 <= n_per_spin <= L:
        raise ValueError("filling %d out of range" % n_per_spin)
    if check_gap and 0 < n_per_spin < L:
        gap = eps[n_per_spin] - eps[n_per_spin - 1]
        if gap < GAP_TOL:
            raise FermiDegeneracy(
                "gap %.3e at filling %d; shift the filling or break symmetry"
                % (gap, n_per_spin))
    if n_per_spin == 0:
        gamma = np.zeros((L, L))
    else:
        cocc = c[:, :n_per_spin]
        gamma = cocc @ cocc.T
        gamma = 0.5 * (gamma + gamma.T)
    return DensityMatrix(gamma=gamma, n_elec_per_spin=n_per_spin,
                         idempotent=True, check=False)


def meanfield_rdm(h, n_per_spin):
    """Idempotent 1-RDM from filling the n_per_spin lowest orbitals of h."""
    eps, c = orbitals(h)
    return rdm_from_orbitals(eps, c, n_per_spin)


def filling_from_mu(h, mu):
    """(per-spin count, both-spin density) of levels at or below mu."""
    eps = np.linalg.eigvalsh(0.5 * (h + h.T))
    n_per_spin = int(np.sum(eps <= mu))
    density = 2.0 * n_per_spin / eps.shape[0]
    return n_per_spin, density


def closed_shell_fillings(eps, gap_tol=GAP_TOL):
    """Per-spin fillings whose Fermi gap is open (no degenerate edge)."""
    L = eps.shape[0]
    good = [n for n in range(1, L)
            if eps[n] - eps[n - 1] >= gap_tol]
    good.append(L)
    return good
