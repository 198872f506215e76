"""Quantum embedding of multi-orbital fragments.

Block reflections of a mean-field 1-RDM carve a fragment+bath cluster out of
a large lattice or molecular problem; the interacting cluster is solved
exactly and stitched back through density matching and democratic energy
partitioning.
"""

__version__ = "0.1.0"

from . import abinitio, cluster, embed, fci, householder, lattice, linalg
from .errors import QembedError

__all__ = [
    "__version__",
    "QembedError",
    "abinitio",
    "cluster",
    "embed",
    "fci",
    "householder",
    "lattice",
    "linalg",
]
