"""Randomized invariant suites behind the ``verify`` CLI subcommand.

Each suite draws reproducible random mean-field problems, runs the block
reflection machinery, and counts violations of the structural guarantees:
block sparsity of the transformed 1-RDM, electron count of the cluster,
the generator's quadratic identities, and agreement between the two
independent bath constructions.  The error-path suite checks that corrupt
inputs are rejected with the right exceptions.
"""

from dataclasses import dataclass, field

import numpy as np

from . import linalg
from .errors import NotSymmetric, SingularCoupling
from .householder import (DensityMatrix, FragmentPartition,
                          build_block_householder, cluster_blocks,
                          householder_bath, partition_columns, svd_bath,
                          subspace_distance)


@dataclass
class SuiteResult:
    name: str
    passed: int = 0
    failed: int = 0
    failures: list = field(default_factory=list)

    def check(self, ok, detail):
        if ok:
            self.passed += 1
        else:
            self.failed += 1
            self.failures.append(detail)

    @property
    def ok(self):
        return self.failed == 0


def random_meanfield(rng, n_orb, min_occ=1, max_tries=20):
    """Idempotent 1-RDM of a random symmetric one-body problem.

    The filling is drawn away from degenerate edges so the aufbau state is
    unique, and kept at least ``min_occ`` away from the empty and full
    band: an N-orbital fragment needs N occupied and N virtual orbitals to
    support a full-rank bath.
    """
    for _ in range(max_tries):
        a = rng.normal(size=(n_orb, n_orb))
        h = 0.5 * (a + a.T)
        w, c = np.linalg.eigh(h)
        fillings = [n for n in range(min_occ, n_orb - min_occ + 1)
                    if w[n] - w[n - 1] > 1e-6]
        if not fillings:
            continue
        n_occ = int(rng.choice(fillings))
        cocc = c[:, :n_occ]
        gamma = cocc @ cocc.T
        return DensityMatrix(gamma=0.5 * (gamma + gamma.T),
                             n_elec_per_spin=n_occ, idempotent=True)
    raise RuntimeError("could not draw a gapped random filling")


def _draw_case(rng, sizes, frag_sizes):
    n_orb = int(rng.integers(sizes[0], sizes[1] + 1))
    n_frag = int(rng.choice(frag_sizes))
    n_frag = min(n_frag, n_orb // 2)
    dm = random_meanfield(rng, n_orb, min_occ=n_frag)
    sites = rng.choice(n_orb, size=n_frag, replace=False)
    frag = FragmentPartition.from_sites(sorted(int(s) for s in sites), n_orb)
    return dm, frag


def suite_block_diagonalization(seed=0, trials=100, sizes=(10, 100),
                                frag_sizes=(1, 2, 3, 4)):
    """Sparsity, involution, fragment preservation and cluster filling."""
    rng = np.random.default_rng(seed)
    res = SuiteResult("block-diagonalization")
    for t in range(trials):
        dm, frag = _draw_case(rng, sizes, frag_sizes)
        try:
            hr = build_block_householder(dm, frag, pivot=True)
        except SingularCoupling:
            res.check(False, "trial %d: unexpected singular coupling" % t)
            continue
        blocks = cluster_blocks(hr)
        n = frag.n_frag
        gp = hr.gamma_tilde
        gff0 = dm.gamma[np.ix_(frag.fragment_sites, frag.fragment_sites)]
        checks = [
            (linalg.norm_inf(blocks.gamma_ef) < 1e-10, "EF block"),
            (linalg.norm_inf(blocks.gamma_eb) < 1e-10, "EB block"),
            (linalg.norm_inf(blocks.gamma_ff - gff0) < 1e-12,
             "fragment block changed"),
            (linalg.norm_inf(hr.r @ hr.r - np.eye(frag.n_total)) < 1e-10,
             "reflection not involutive"),
            (abs(np.trace(gp[:2 * n, :2 * n]) - n) < 1e-10,
             "cluster electron count"),
            (linalg.norm_inf(gp @ gp - gp) < 1e-10,
             "idempotency not propagated"),
        ]
        for ok, label in checks:
            res.check(ok, "trial %d: %s" % (t, label))
    return res


def suite_w_equation(seed=0, trials=100, sizes=(10, 100),
                     frag_sizes=(1, 2, 3, 4)):
    """Quadratic identities of the generator block W."""
    rng = np.random.default_rng(seed)
    res = SuiteResult("w-equation")
    for t in range(trials):
        dm, frag = _draw_case(rng, sizes, frag_sizes)
        try:
            hr = build_block_householder(dm, frag, pivot=True)
        except SingularCoupling:
            res.check(False, "trial %d: unexpected singular coupling" % t)
            continue
        n = frag.n_frag
        _, g1, g2 = partition_columns(dm, hr.partition)
        w = -hr.gamma_tilde[n:2 * n, :n]
        scale = max(1.0, linalg.norm_inf(dm.gamma))
        res.check(linalg.norm_inf(w.T @ w - (g1.T @ g1 + g2.T @ g2))
                  < 1e-10 * scale,
                  "trial %d: W^T W mismatch" % t)
        res.check(linalg.norm_inf(g1.T @ w - w.T @ g1) < 1e-10 * scale,
                  "trial %d: gamma1^T W not symmetric" % t)
    return res


def suite_svd_equivalence(seed=0, trials=100, sizes=(10, 60),
                          frag_sizes=(1, 2, 3)):
    """The reflection bath and the overlap-SVD bath span the same space."""
    rng = np.random.default_rng(seed)
    res = SuiteResult("svd-equivalence")
    for t in range(trials):
        dm, frag = _draw_case(rng, sizes, frag_sizes)
        try:
            hr = build_block_householder(dm, frag, pivot=True)
            dist = subspace_distance(householder_bath(hr),
                                     svd_bath(dm, frag))
        except SingularCoupling:
            res.check(False, "trial %d: unexpected singular coupling" % t)
            continue
        res.check(dist < 1e-8, "trial %d: bath distance %.2e" % (t, dist))
    return res


def suite_error_paths(seed=0):
    """Corrupt inputs must fail loudly with the dedicated exceptions."""
    rng = np.random.default_rng(seed)
    res = SuiteResult("error-paths")

    asymmetric = rng.normal(size=(8, 8))
    try:
        DensityMatrix(gamma=asymmetric)
        res.check(False, "asymmetric matrix accepted")
    except NotSymmetric:
        res.check(True, "")

    # a fragment with exactly zero environment coupling
    gamma = np.zeros((6, 6))
    gamma[0, 0] = 1.0
    gamma[1:, 1:] = random_meanfield(rng, 5).gamma
    dm = DensityMatrix(gamma=gamma, idempotent=False)
    try:
        build_block_householder(dm, FragmentPartition.from_sites([0], 6))
        res.check(False, "decoupled fragment accepted")
    except SingularCoupling:
        res.check(True, "")
    return res


def run_all(seed=0, trials=100, sizes=(10, 100)):
    """All suites with a shared base seed; returns the list of results."""
    return [
        suite_block_diagonalization(seed=seed, trials=trials, sizes=sizes),
        suite_w_equation(seed=seed + 1, trials=trials, sizes=sizes),
        suite_svd_equivalence(seed=seed + 2, trials=trials,
                              sizes=(sizes[0], min(sizes[1], 60))),
        suite_error_paths(seed=seed + 3),
    ]
