"""Molecular integral ingestion, orthogonalization and restricted SCF.

Integrals arrive as FCIDUMP text (chemist notation, 8-fold permutational
symmetry, 1-based indices, Fortran D-exponents accepted).  An optional
companion overlap file carries the AO metric for the symmetric-
orthogonalization path; after that everything runs in an orthonormal basis.
"""

import io
import re
from dataclasses import dataclass, replace

import numpy as np

from . import linalg
from .errors import (FermiDegeneracy, DimensionMismatch, InconsistentHeader,
                     NotPositiveDefinite, ParseError, ScfNoConvergence)
from .householder import DensityMatrix

SCF_TOL = 1e-8
SCF_MAX_ITER = 200
SCF_MIXING = 0.5
SYMMETRY_TOL = 1e-10


@dataclass(frozen=True)
class IntegralSet:
    """One- and two-electron integrals over an orbital basis.

    g2 is the full rank-4 chemist tensor (pq|rs); e_core collects nuclear
    repulsion plus any frozen constants.
    """

    n_orb: int
    n_elec: int
    e_core: float
    h1: np.ndarray
    g2: np.ndarray
    ms2: int = 0

    def __post_init__(self):
        h1 = np.asarray(self.h1, dtype=float)
        g2 = np.asarray(self.g2, dtype=float)
        n = self.n_orb
        if h1.shape != (n, n) or g2.shape != (n, n, n, n):
            raise DimensionMismatch("integral arrays do not match n_orb")
        object.__setattr__(self, "h1", h1)
        object.__setattr__(self, "g2", g2)

    def check_symmetry(self, tol=SYMMETRY_TOL):
        """Verify h1 symmetry and the 8-fold permutation symmetry of g2."""
        dev = linalg.norm_inf(self.h1 - self.h1.T)
        for perm in ((1, 0, 2, 3), (0, 1, 3, 2), (2, 3, 0, 1)):
            dev = max(dev, linalg.norm_inf(self.g2 -
                                           self.g2.transpose(perm)))
        if dev > tol:
            raise ValueError("integral symmetry violated by %.3e" % dev)
        return dev


_HEADER_INT = re.compile(r"([A-Z0-9]+)\s*=\s*(-?\d+)")


def _set_g2(g2, p, q, r, s, value):
    for (a, b) in ((p, q), (q, p)):
        for (c, d) in ((r, s), (s, r)):
            g2[a, b, c, d] = value
            g2[c, d, a, b] = value


def parse_fcidump(source):
    """Parse FCIDUMP text (string, stream or path) into an IntegralSet."""
    if hasattr(source, "read"):
        text = source.read()
    else:
        text = str(source)
        if "\n" not in text and not text.lstrip().startswith("&"):
            with open(text) as fh:
                text = fh.read()
    lines = text.splitlines()

    header_lines = []
    body_start = None
    for i, line in enumerate(lines):
        header_lines.append(line)
        if "&END" in line.upper() or line.strip() == "/" \
                or line.strip().endswith("/"):
            body_start = i + 1
            break
    if body_start is None:
        raise ParseError("missing header terminator (&END or /)")
    header = " ".join(header_lines).upper()
    if "&FCI" not in header:
        raise ParseError("missing &FCI header", 1)
    fields = dict(_HEADER_INT.findall(header))
    try:
        n_orb = int(fields["NORB"])
        n_elec = int(fields["NELEC"])
    except KeyError as exc:
        raise ParseError("header lacks %s" % exc, 1) from exc
    ms2 = int(fields.get("MS2", 0))

    h1 = np.zeros((n_orb, n_orb))
    g2 = np.zeros((n_orb, n_orb, n_orb, n_orb))
    e_core = 0.0
    for line_no, raw in enumerate(lines[body_start:], start=body_start + 1):
        line = raw.strip()
        if not line:
            continue
        parts = line.split()
        if len(parts) != 5:
            raise ParseError("expected 'value i j k l'", line_no)
        try:
            value = float(parts[0].upper().replace("D", "E"))
            i, j, k, l = (int(x) for x in parts[1:])
        except ValueError as exc:
            raise ParseError(str(exc), line_no) from exc
        if max(i, j, k, l) > n_orb or min(i, j, k, l) < 0:
            raise InconsistentHeader(
                "line %d: index beyond NORB=%d" % (line_no, n_orb))
        if i == 0 and j == 0 and k == 0 and l == 0:
            e_core = value
        elif k == 0 and l == 0:
            if i == 0 or j == 0:
                continue    # orbital-energy records: parsed, ignored
            h1[i - 1, j - 1] = value
            h1[j - 1, i - 1] = value
        elif i == 0 or j == 0 or k == 0 or l == 0:
            raise ParseError("mixed zero/non-zero indices", line_no)
        else:
            _set_g2(g2, i - 1, j - 1, k - 1, l - 1, value)
    return IntegralSet(n_orb=n_orb, n_elec=n_elec, e_core=e_core,
                       h1=h1, g2=g2, ms2=ms2)


def serialize_fcidump(ints, comment=None):
    """Render an IntegralSet as FCIDUMP text (canonical unique entries)."""
    out = io.StringIO()
    orbsym = ",".join(["1"] * ints.n_orb)
    out.write("&FCI NORB=%d,NELEC=%d,MS2=%d,\n" %
              (ints.n_orb, ints.n_elec, ints.ms2))
    out.write("  ORBSYM=%s,\n  ISYM=1,\n&END\n" % orbsym)

    def emit(value, i, j, k, l):
        out.write("%24.16E %4d %4d %4d %4d\n" % (value, i, j, k, l))

    n = ints.n_orb
    for p in range(n):
        for q in range(p + 1):
            pq = p * (p + 1) // 2 + q
            for r in range(p + 1):
                for s in range(r + 1):
                    rs = r * (r + 1) // 2 + s
                    if rs > pq:
                        continue
                    v = ints.g2[p, q, r, s]
                    if v != 0.0:
                        emit(v, p + 1, q + 1, r + 1, s + 1)
    for p in range(n):
        for q in range(p + 1):
            if ints.h1[p, q] != 0.0:
                emit(ints.h1[p, q], p + 1, q + 1, 0, 0)
    emit(ints.e_core, 0, 0, 0, 0)
    return out.getvalue()


def read_overlap(source):
    """Overlap matrix file: a dimension line then row-major entries."""
    if hasattr(source, "read"):
        text = source.read()
    else:
        with open(source) as fh:
            text = fh.read()
    tokens = [t for line in text.splitlines()
              if not line.lstrip().startswith("#")
              for t in line.split()]
    if not tokens:
        raise ParseError("empty overlap file")
    n = int(tokens[0])
    vals = [float(t) for t in tokens[1:]]
    if len(vals) != n * n:
        raise ParseError("expected %d entries, found %d" % (n * n, len(vals)))
    return np.array(vals).reshape(n, n)


def write_overlap(s, path):
    s = np.asarray(s, dtype=float)
    with open(path, "w") as fh:
        fh.write("%d\n" % s.shape[0])
        for row in s:
            fh.write(" ".join("%.16e" % v for v in row) + "\n")


def lowdin(s):
    """Symmetric orthogonalizer X = S^{-1/2}.

    Raises NotPositiveDefinite for a linearly dependent basis.
    """
    eig = linalg.sym_eig(s)
    floor = linalg.PD_FLOOR * max(1.0, linalg.norm_inf(s))
    if eig.values[0] <= floor:
        raise NotPositiveDefinite(
            "overlap eigenvalue %.3e at or below floor" % eig.values[0])
    x = (eig.vectors / np.sqrt(eig.values)) @ eig.vectors.T
    return 0.5 * (x + x.T)


def transform_integrals(c, ints):
    """Rotate the integral set into the basis given by the columns of c."""
    c = np.asarray(c, dtype=float)
    if c.shape[0] != ints.n_orb:
        raise DimensionMismatch("rotation has %d rows, expected %d"
                                % (c.shape[0], ints.n_orb))
    from .cluster import _transform_g

    h1 = c.T @ ints.h1 @ c
    g2 = _transform_g(ints.g2, c)
    return replace(ints, n_orb=c.shape[1], h1=0.5 * (h1 + h1.T), g2=g2)


@dataclass(frozen=True)
class ScfResult:
    """Converged restricted mean field in an orthonormal basis."""

    e_total: float
    orbital_energies: np.ndarray
    mo_coeffs: np.ndarray
    gamma: DensityMatrix
    iterations: int
    commutator: float
    energy_history: tuple = ()


def _fock(ints, density):
    j = np.einsum("pqrs,rs->pq", ints.g2, density, optimize=True)
    k = np.einsum("prqs,rs->pq", ints.g2, density, optimize=True)
    return ints.h1 + j - 0.5 * k


def scf_energy(ints, density):
    """Closed-shell mean-field energy of a (both-spin) density matrix."""
    f = _fock(ints, density)
    return float(ints.e_core + 0.5 * np.sum(density * (ints.h1 + f)))


def rhf(ints, tol=SCF_TOL, max_iter=SCF_MAX_ITER, mixing=SCF_MIXING):
    """Damped closed-shell SCF; the basis must already be orthonormal.

    Convergence is measured on the Fock/density commutator.  Degenerate
    frontier orbitals abort with FermiDegeneracy rather than fractional
    occupations.
    """
    if ints.n_elec % 2:
        raise ValueError("restricted SCF needs an even electron count")
    nocc = ints.n_elec // 2
    if nocc > ints.n_orb:
        raise ValueError("more electron pairs than orbitals")

    eps, c = np.linalg.eigh(ints.h1)
    density = 2.0 * c[:, :nocc] @ c[:, :nocc].T
    history = []
    for iterations in range(1, max_iter + 1):
        f = _fock(ints, density)
        eps, c = np.linalg.eigh(f)
        if 0 < nocc < ints.n_orb and eps[nocc] - eps[nocc - 1] < 1e-10:
            raise FermiDegeneracy(
                "frontier gap %.3e in the SCF cycle"
                % (eps[nocc] - eps[nocc - 1]))
        d_pure = 2.0 * c[:, :nocc] @ c[:, :nocc].T
        f_pure = _fock(ints, d_pure)
        history.append(float(ints.e_core +
                             0.5 * np.sum(d_pure * (ints.h1 + f_pure))))
        comm = linalg.norm_inf(f_pure @ d_pure - d_pure @ f_pure)
        if comm < tol:
            density = d_pure
            break
        density = (1.0 - mixing) * density + mixing * d_pure
    else:
        raise ScfNoConvergence("commutator %.3e after %d iterations"
                               % (comm, max_iter))
    gamma = DensityMatrix(gamma=0.5 * density, n_elec_per_spin=nocc,
                          idempotent=True)
    return ScfResult(e_total=history[-1], orbital_energies=eps,
                     mo_coeffs=c, gamma=gamma, iterations=iterations,
                     commutator=comm, energy_history=tuple(history))
