#!/usr/bin/env python3
"""Generate the committed hydrogen-ring integral fixtures.

One-off developer tool: the package itself never generates Gaussian
integrals, it only consumes the FCIDUMP/overlap files this script writes
into tests/fixtures/.  Everything here is s-type-only closed forms
(overlap, kinetic, nuclear attraction, repulsion for contracted 1s
Gaussians), which covers minimal-basis hydrogen exactly.

Self-check: the STO-3G H2 integrals at R = 1.4 bohr are compared against
the values tabulated in Szabo & Ostlund (Modern Quantum Chemistry, ch. 3)
before anything is written.

Run from the repository root:  python3 scripts/make_h_ring_fixtures.py
"""

import os
import sys

import numpy as np
from scipy.special import erf

sys.path.insert(0, os.path.join(os.path.dirname(__file__), "..", "src"))

from qembed.abinitio import IntegralSet, serialize_fcidump, write_overlap  # noqa: E402

BOHR_PER_ANGSTROM = 1.8897259886

# Contractions for a 1s Slater orbital with zeta = 1.24 (standard hydrogen
# STO-nG exponents from the Basis Set Exchange).
STO3G_H = (
    (3.42525091, 0.15432897),
    (0.62391373, 0.53532814),
    (0.16885540, 0.44463454),
)
STO6G_H = (
    (35.52322122, 0.00916359628),
    (6.513143725, 0.04936149294),
    (1.822142904, 0.16853830490),
    (0.625955266, 0.37056279970),
    (0.243076747, 0.41649152980),
    (0.100112428, 0.13033408410),
)


def _norm(alpha):
    return (2.0 * alpha / np.pi) ** 0.75


def _boys0(t):
    if t < 1e-12:
        return 1.0 - t / 3.0
    return 0.5 * np.sqrt(np.pi / t) * erf(np.sqrt(t))


def _pair(alpha, a, beta, b):
    p = alpha + beta
    diff = a - b
    k = np.exp(-alpha * beta / p * diff @ diff)
    center = (alpha * a + beta * b) / p
    return p, k, center


def overlap_prim(alpha, a, beta, b):
    p, k, _ = _pair(alpha, a, beta, b)
    return _norm(alpha) * _norm(beta) * (np.pi / p) ** 1.5 * k


def kinetic_prim(alpha, a, beta, b):
    p, k, _ = _pair(alpha, a, beta, b)
    red = alpha * beta / p
    diff = a - b
    return (_norm(alpha) * _norm(beta) * red *
            (3.0 - 2.0 * red * (diff @ diff)) * (np.pi / p) ** 1.5 * k)


def nuclear_prim(alpha, a, beta, b, centers, charges):
    p, k, pc = _pair(alpha, a, beta, b)
    total = 0.0
    for c, z in zip(centers, charges):
        d = pc - c
        total -= z * _boys0(p * (d @ d))
    return _norm(alpha) * _norm(beta) * 2.0 * np.pi / p * k * total


def eri_prim(alpha, a, beta, b, gamma, c, delta, d):
    p, kab, pp = _pair(alpha, a, beta, b)
    q, kcd, qq = _pair(gamma, c, delta, d)
    diff = pp - qq
    pref = 2.0 * np.pi ** 2.5 / (p * q * np.sqrt(p + q))
    t = p * q / (p + q) * (diff @ diff)
    norms = _norm(alpha) * _norm(beta) * _norm(gamma) * _norm(delta)
    return norms * pref * kab * kcd * _boys0(t)


def contracted(prim_fn, basis, ia, ib, geom, *extra):
    total = 0.0
    for aa, ca in basis:
        for ab, cb in basis:
            total += ca * cb * prim_fn(aa, geom[ia], ab, geom[ib], *extra)
    return total


def contracted_eri(basis, i, j, k, l, geom):
    total = 0.0
    for aa, ca in basis:
        for ab, cb in basis:
            partial = 0.0
            for ac, cc in basis:
                for ad, cd in basis:
                    partial += cc * cd * eri_prim(aa, geom[i], ab, geom[j],
                                                  ac, geom[k], ad, geom[l])
            total += ca * cb * partial
    return total


def hydrogen_integrals(geometry, basis):
    """AO-basis IntegralSet plus overlap for hydrogens at the given points."""
    geom = [np.asarray(g, dtype=float) for g in geometry]
    n = len(geom)
    charges = [1.0] * n
    s = np.zeros((n, n))
    h1 = np.zeros((n, n))
    for i in range(n):
        for j in range(n):
            s[i, j] = contracted(overlap_prim, basis, i, j, geom)
            h1[i, j] = (contracted(kinetic_prim, basis, i, j, geom) +
                        contracted(nuclear_prim, basis, i, j, geom,
                                   geom, charges))
    g2 = np.zeros((n, n, n, n))
    done = set()
    for i in range(n):
        for j in range(n):
            for k in range(n):
                for l in range(n):
                    key = tuple(sorted([tuple(sorted((i, j))),
                                        tuple(sorted((k, l)))]))
                    if key in done:
                        continue
                    done.add(key)
                    v = contracted_eri(basis, i, j, k, l, geom)
                    for (a, b) in ((i, j), (j, i)):
                        for (c, d) in ((k, l), (l, k)):
                            g2[a, b, c, d] = v
                            g2[c, d, a, b] = v
    e_nuc = 0.0
    for i in range(n):
        for j in range(i + 1, n):
            e_nuc += 1.0 / np.linalg.norm(geom[i] - geom[j])
    ints = IntegralSet(n_orb=n, n_elec=n, e_core=e_nuc, h1=h1, g2=g2)
    return ints, s


def self_check():
    """Szabo-Ostlund table values for STO-3G H2 at R = 1.4 bohr."""
    geom = [np.zeros(3), np.array([1.4, 0.0, 0.0])]
    ints, s = hydrogen_integrals(geom, STO3G_H)
    refs = {
        "S12": (s[0, 1], 0.6593),
        "T11+V11": (ints.h1[0, 0], -1.1204),
        "(11|11)": (ints.g2[0, 0, 0, 0], 0.7746),
        "(11|22)": (ints.g2[0, 0, 1, 1], 0.5697),
        "(11|12)": (ints.g2[0, 0, 0, 1], 0.4441),
        "(12|12)": (ints.g2[0, 1, 0, 1], 0.2970),
    }
    for name, (got, want) in refs.items():
        if abs(got - want) > 5e-4:
            raise SystemExit("self-check failed: %s = %.6f, expected %.4f"
                             % (name, got, want))
    from qembed.abinitio import lowdin, rhf, transform_integrals

    oao = transform_integrals(lowdin(s), ints)
    scf = rhf(oao)
    if abs(scf.e_total - (-1.1167)) > 5e-4:
        raise SystemExit("self-check failed: E_HF = %.6f" % scf.e_total)
    print("self-check against published STO-3G H2 values: ok "
          "(E_HF = %.5f)" % scf.e_total)


def ring_geometry(n_atoms, d_ang):
    """Regular ring with nearest-neighbour distance d (angstrom)."""
    d = d_ang * BOHR_PER_ANGSTROM
    radius = d / (2.0 * np.sin(np.pi / n_atoms))
    return [radius * np.array([np.cos(2 * np.pi * k / n_atoms),
                               np.sin(2 * np.pi * k / n_atoms), 0.0])
            for k in range(n_atoms)]


def rectangle_geometry(d_ang, aspect=1.5):
    """H4 rectangle, short side d (angstrom); breaks the square degeneracy.

    Note the mean field of a rectangle factorizes into two decoupled dimers
    (all cross elements of the 1-RDM vanish by symmetry), which makes
    two-atom fragments genuinely uncouplable: useful as an error-path
    fixture, not as a dissociation family.
    """
    a = d_ang * BOHR_PER_ANGSTROM
    b = aspect * a
    return [np.array([0.0, 0.0, 0.0]), np.array([a, 0.0, 0.0]),
            np.array([a, b, 0.0]), np.array([0.0, b, 0.0])]


def trapezoid_geometry(d_ang, top=1.3, height=1.1):
    """Isosceles-trapezoid H4 ring, bottom side d (angstrom), fixed shape.

    C2v symmetry: closed shell at every scale, no accidental decoupling
    between one- or two-atom fragments and their environment.
    """
    a = d_ang * BOHR_PER_ANGSTROM
    t = top * a
    h = height * a
    return [np.array([0.0, 0.0, 0.0]), np.array([a, 0.0, 0.0]),
            np.array([0.5 * (a + t), h, 0.0]),
            np.array([0.5 * (a - t), h, 0.0])]


def write_fixture(outdir, stem, ints, s, note):
    path = os.path.join(outdir, stem + ".fcidump")
    with open(path, "w") as fh:
        fh.write(serialize_fcidump(ints))
    opath = os.path.join(outdir, stem + ".overlap")
    write_overlap(s, opath)
    with open(opath, "a") as fh:
        fh.write("# %s\n" % note)
    print("wrote", path)


def main():
    outdir = os.path.join(os.path.dirname(__file__), "..", "tests",
                          "fixtures")
    os.makedirs(outdir, exist_ok=True)
    self_check()

    # two-site Hubbard interchange fixture (t = 1, U = 4), written directly
    h1 = np.array([[0.0, -1.0], [-1.0, 0.0]])
    g2 = np.zeros((2, 2, 2, 2))
    g2[0, 0, 0, 0] = g2[1, 1, 1, 1] = 4.0
    dimer = IntegralSet(n_orb=2, n_elec=2, e_core=0.0, h1=h1, g2=g2)
    with open(os.path.join(outdir, "hubbard_dimer_t1_u4.fcidump"),
              "w") as fh:
        fh.write(serialize_fcidump(dimer))
    print("wrote hubbard_dimer_t1_u4.fcidump")

    # H2 molecule, STO-6G, bond length 1.4 bohr (0.74 angstrom)
    ints, s = hydrogen_integrals(
        [np.zeros(3), np.array([1.4, 0.0, 0.0])], STO6G_H)
    write_fixture(outdir, "h2_sto6g_d0.74", ints, s,
                  "H2, STO-6G (zeta 1.24), R = 1.4 bohr, AO basis; "
                  "generated by scripts/make_h_ring_fixtures.py")

    # H4 trapezoid family (shape fixed, bottom side keyed in the name)
    pes4 = os.path.join(outdir, "h4_pes")
    os.makedirs(pes4, exist_ok=True)
    for d in (0.80, 1.00, 1.20, 1.40, 1.60):
        ints, s = hydrogen_integrals(trapezoid_geometry(d), STO6G_H)
        write_fixture(pes4, "h4_trap_d%.2f" % d, ints, s,
                      "H4 trapezoid ring, STO-6G, bottom side %.2f A "
                      "(top 1.3x, height 1.1x), AO basis; generated by "
                      "scripts/make_h_ring_fixtures.py" % d)

    # one rectangle: its mean field decouples the two dimers exactly,
    # which exercises the disconnected-fragment error path
    ints, s = hydrogen_integrals(rectangle_geometry(1.00), STO6G_H)
    write_fixture(outdir, "h4_rect_d1.00", ints, s,
                  "H4 rectangle, STO-6G, short side 1.00 A, aspect 1.5, "
                  "AO basis; generated by scripts/make_h_ring_fixtures.py")

    # an H4 with no point-group symmetry, so the SCF actually iterates
    irregular = [np.array([0.0, 0.0, 0.0]),
                 np.array([1.9, 0.3, 0.0]),
                 np.array([3.1, 2.0, 0.4]),
                 np.array([0.8, 3.2, 0.7])]
    ints, s = hydrogen_integrals(irregular, STO6G_H)
    write_fixture(outdir, "h4_irregular", ints, s,
                  "H4, STO-6G, irregular C1 geometry (coords in bohr: "
                  "see scripts/make_h_ring_fixtures.py)")

    # H10 rings for the molecular dissociation demo (FCI dim 63504)
    pes10 = os.path.join(outdir, "h10_pes")
    os.makedirs(pes10, exist_ok=True)
    for d in (0.80, 1.00, 1.30, 1.80):
        ints, s = hydrogen_integrals(ring_geometry(10, d), STO6G_H)
        write_fixture(pes10, "h10_ring_d%.2f" % d, ints, s,
                      "H10 ring, STO-6G, nearest-neighbour %.2f A, AO basis; "
                      "generated by scripts/make_h_ring_fixtures.py" % d)


if __name__ == "__main__":
    main()
