import os

import numpy as np
import pytest

from qembed import lattice
from qembed.cluster import build_whole_system_hamiltonian
from qembed import fci

FIXTURES = os.path.join(os.path.dirname(__file__), "fixtures")


@pytest.fixture(scope="session")
def fixtures_dir():
    return FIXTURES


def ring_rdm(n_sites, n_per_spin, t=1.0):
    spec = lattice.LatticeSpec(n_sites=n_sites, u=0.0, t=t)
    return lattice.meanfield_rdm(lattice.build_h1(spec), n_per_spin)


@pytest.fixture(scope="session")
def half_filled_ring6():
    return ring_rdm(6, 3)


@pytest.fixture(scope="session")
def hubbard4_fci_rdm():
    """Per-spin 1-RDM of the 4-site half-filled Hubbard ring at U = 4."""
    spec = lattice.LatticeSpec(n_sites=4, u=4.0)
    sol = fci.ground_state(build_whole_system_hamiltonian(spec, 4))
    gamma = 0.5 * sol.rdm1          # closed-shell: per-spin channel
    from qembed.householder import DensityMatrix
    return DensityMatrix(gamma=gamma, n_elec_per_spin=2, idempotent=False)
