"""Embedding drivers and energy estimators.

Two schemes are provided on top of the fragment+bath construction:

* single-shot matching: a chemical potential on the cluster's fragment
  orbitals is tuned until the correlated fragment occupation reproduces the
  lattice (or molecular) electron count;
* self-consistent local potential: an auxiliary mean-field lattice with a
  uniform Hxc potential supplies the bath, and the potential is adjusted
  until the mean-field density agrees with the correlated fragment density
  at the requested chemical potential.

Energies come from fragment-row contractions of the cluster RDMs (democratic
partitioning); auxiliary potentials and fragment chemical potentials never
enter the energy density.
"""

from dataclasses import dataclass, field

import numpy as np

from . import fci, lattice
from .cluster import (IB, NIB, ClusterHamiltonian,
                      build_cluster_hamiltonian,
                      build_whole_system_hamiltonian)
from .errors import (NoConvergence, PartitionNotTiling, RootBracketFailure,
                     SingularCoupling)
from .householder import (FragmentPartition, build_block_householder,
                          cluster_coeffs)


@dataclass(frozen=True)
class HtDmfetConfig:
    """Single-shot driver knobs."""

    mode: str = NIB
    frag_size: int = 1
    mu_bracket: tuple | None = None     # default derived from (u, t)
    tol_occ: float = 1e-8
    max_root_iters: int = 100

    def bracket_for(self, spec):
        if self.mu_bracket is not None:
            return self.mu_bracket
        return (-2.0 * spec.u - 4.0 * spec.t, 2.0 * spec.u + 4.0 * spec.t)


@dataclass(frozen=True)
class LpfetConfig:
    """Self-consistent potential driver knobs."""

    frag_size: int = 1
    mu_lattice: float = 0.0
    tol_density: float = 1e-8
    max_iters: int = 200
    mixing: float = 0.5


@dataclass
class EmbeddingReport:
    """Outcome of one embedding solve."""

    converged: bool
    iterations: int
    density: float
    mu_tilde: float | None = None
    v_hxc: float | None = None
    per_site_energy: float | None = None
    total_energy: float | None = None
    residual: float | None = None
    cluster_solution: fci.ClusterSolution | None = None
    evaluations: list = field(default_factory=list)


def fragment_occupation(sol, n_frag):
    """Average site density (both spins) over the fragment orbitals."""
    return float(np.trace(sol.rdm1[:n_frag, :n_frag])) / n_frag


# ---------------------------------------------------------------------------
# lattice machinery
# ---------------------------------------------------------------------------

class _LatticeWorkspace:
    """Caches the bare-lattice orbitals across repeated filling builds."""

    def __init__(self, spec, frag_sites=None, frag_size=1):
        self.spec = spec
        if frag_sites is None:
            frag_sites = list(range(frag_size))
        self.frag_sites = list(frag_sites)
        h0 = lattice.build_h1(spec, 0.0)
        self.eps, self.c = lattice.orbitals(h0)
        self.h_kin = lattice.hopping_matrix(spec)
        self.closed_shells = lattice.closed_shell_fillings(self.eps)

    @property
    def n_frag(self):
        return len(self.frag_sites)

    def gamma(self, n_per_spin):
        return lattice.rdm_from_orbitals(self.eps, self.c, n_per_spin)

    def householder(self, n_per_spin):
        # pivoted row selection keeps the construction regular at fillings
        # where the default environment ordering degenerates; the bath
        # subspace itself is unaffected
        frag = FragmentPartition.from_sites(self.frag_sites,
                                            self.spec.n_sites)
        return build_block_householder(self.gamma(n_per_spin), frag,
                                       pivot=True)

    def cluster(self, hh, mode, mu_frag=0.0, v_bath=0.0,
                ph_symmetric=False):
        return build_cluster_hamiltonian(mode, self.spec, hh,
                                         mu_frag=mu_frag, v_bath=v_bath,
                                         ph_symmetric=ph_symmetric)

    def allowed_shells(self):
        """Closed-shell fillings for which the bath construction has rank."""
        L = self.spec.n_sites
        n = self.n_frag
        return [j for j in self.closed_shells if n <= j <= L - n]


def _solve_cluster(ch):
    na = ch.n_elec_cluster // 2
    basis = fci.enumerate_determinants(ch.n_cluster, na,
                                       ch.n_elec_cluster - na)
    return fci.ground_state(ch, basis)


def _bracketed_root(eval_occ, target, bracket, tol_occ, max_iters):
    """Find mu with occupation(mu) == target on a monotone bracket.

    ``eval_occ(mu) -> (occ, payload)``.  Returns (mu, occ, payload, evals,
    converged).  Raises RootBracketFailure when the bracket does not
    straddle the target.
    """
    lo, hi = float(bracket[0]), float(bracket[1])
    evals = []

    def probe(mu):
        occ, payload = eval_occ(mu)
        evals.append((mu, occ))
        return occ, payload

    occ_lo, pay_lo = probe(lo)
    if abs(occ_lo - target) <= tol_occ:
        return lo, occ_lo, pay_lo, evals, True
    occ_hi, pay_hi = probe(hi)
    if abs(occ_hi - target) <= tol_occ:
        return hi, occ_hi, pay_hi, evals, True
    if not (occ_lo < target < occ_hi):
        raise RootBracketFailure(
            "occupation range [%.6f, %.6f] does not straddle target %.6f"
            % (occ_lo, occ_hi, target))

    best = (hi, occ_hi, pay_hi) if abs(occ_hi - target) < abs(occ_lo - target) \
        else (lo, occ_lo, pay_lo)
    a, fa = lo, occ_lo - target
    b, fb = hi, occ_hi - target
    last = (b, fb)
    prev = (a, fa)
    for _ in range(max_iters):
        # secant candidate, falling back to bisection when it misbehaves
        x_prev, f_prev = prev
        x_last, f_last = last
        mu = None
        if f_last != f_prev:
            cand = x_last - f_last * (x_last - x_prev) / (f_last - f_prev)
            if a < cand < b:
                mu = cand
        if mu is None or min(mu - a, b - mu) < 1e-15 * max(1.0, abs(mu)):
            mu = 0.5 * (a + b)
        occ, payload = probe(mu)
        res = occ - target
        if abs(res) < abs(best[1] - target):
            best = (mu, occ, payload)
        if abs(res) <= tol_occ:
            return mu, occ, payload, evals, True
        if res < 0:
            a, fa = mu, res
        else:
            b, fb = mu, res
        prev, last = last, (mu, res)
        if b - a < 1e-15 * max(1.0, abs(a)):
            break
    return best[0], best[1], best[2], evals, False


def per_site_energy(sol, spec, hh, mode=None):
    """Energy per lattice site from the converged cluster RDMs.

    Kinetic part: fragment rows of the projected hopping contracted with the
    cluster 1-RDM.  Interaction part: U times the fragment double
    occupancies read from the 2-RDM.  Chemical-potential and auxiliary
    potentials are excluded.
    """
    h_kin = lattice.hopping_matrix(spec)
    if hh is None:
        # whole-system solve: every site is a fragment site
        n = spec.n_sites
        e_kin = float(np.sum(h_kin * sol.rdm1.T))
        dbl = 0.5 * float(np.einsum("ssss->", sol.rdm2[:n, :n, :n, :n]))
        return (e_kin + spec.u * dbl) / n
    n = hh.n_frag
    coeffs = cluster_coeffs(hh)
    ht = coeffs.T @ h_kin @ coeffs
    e_kin = float(np.sum(ht[:n, :] * sol.rdm1[:, :n].T))
    dbl = 0.5 * sum(float(sol.rdm2[f, f, f, f]) for f in range(n))
    return (e_kin + spec.u * dbl) / n


def htdmfet_lattice(spec, cfg, n_per_spin, frag_sites=None):
    """Single-shot embedding at a fixed mean-field filling.

    The fragment chemical potential is tuned until the cluster's fragment
    density equals the lattice density 2 * n_per_spin / L.
    """
    ws = _LatticeWorkspace(spec, frag_sites=frag_sites,
                           frag_size=cfg.frag_size)
    L = spec.n_sites
    target = 2.0 * n_per_spin / L

    if ws.n_frag == L:
        return _whole_lattice_solve(spec, n_per_spin, target)

    hh = ws.householder(n_per_spin)
    # centered cluster: hole and electron doping treated evenly, so the
    # converged potential sits symmetrically around u/2 at half filling
    ch0 = ws.cluster(hh, cfg.mode, mu_frag=0.0, ph_symmetric=True)
    shift = 0.5 * spec.u

    def eval_occ(mu):
        sol = _solve_cluster(ch0.with_mu_frag(mu - shift))
        return fragment_occupation(sol, ws.n_frag), sol

    occ0, sol0 = eval_occ(shift)
    if abs(occ0 - target) <= cfg.tol_occ:
        mu, occ, sol, evals, ok = shift, occ0, sol0, [(shift, occ0)], True
    else:
        mu, occ, sol, evals, ok = _bracketed_root(
            eval_occ, target, cfg.bracket_for(spec), cfg.tol_occ,
            cfg.max_root_iters)
    e = per_site_energy(sol, spec, hh, cfg.mode)
    return EmbeddingReport(converged=ok, iterations=len(evals),
                           density=occ, mu_tilde=mu, per_site_energy=e,
                           residual=abs(occ - target),
                           cluster_solution=sol, evaluations=evals)


def _whole_lattice_solve(spec, n_per_spin, target, mu=0.0):
    ch = build_whole_system_hamiltonian(spec, 2 * n_per_spin, mu_frag=mu)
    sol = _solve_cluster(ch)
    e = per_site_energy(sol, spec, None)
    return EmbeddingReport(converged=True, iterations=1, density=target,
                           mu_tilde=mu, per_site_energy=e, residual=0.0,
                           cluster_solution=sol)


def _band_edge_rows(spec, mu):
    """Reports for an empty and for a completely filled lattice."""
    eps_kin = np.linalg.eigvalsh(lattice.hopping_matrix(spec))
    L = spec.n_sites
    e_full = 2.0 * float(np.sum(eps_kin)) / L + spec.u
    empty = EmbeddingReport(converged=True, iterations=1, density=0.0,
                            mu_tilde=mu, per_site_energy=0.0, residual=0.0)
    full = EmbeddingReport(converged=True, iterations=1, density=2.0,
                           mu_tilde=mu, per_site_energy=e_full, residual=0.0)
    return empty, full


def _walk_shells(shells, resid, guess):
    """Locate the sign change of a decreasing residual over the fillings.

    Gallops outward from the nearest shell to the guess (doubling stride),
    then narrows the bracketing pair by bisection over shell indices.
    Returns ("bracket", k) with the crossing between shells[k] and
    shells[k+1], or ("bottom"/"top", edge index) when the residual keeps
    one sign throughout.
    """
    k = int(np.argmin(np.abs(np.asarray(shells, dtype=float) - guess)))
    r = resid(shells[k])
    step = 1 if r > 0 else -1
    stride = 1
    while True:
        nk = k + step * stride
        nk = max(0, min(len(shells) - 1, nk))
        if nk == k:
            return ("top", k) if step > 0 else ("bottom", k)
        rn = resid(shells[nk])
        if (rn > 0) != (r > 0):
            lo, hi = (k, nk) if step > 0 else (nk, k)
            break
        k = nk
        stride *= 2
    # residual is positive at lo, non-positive at hi: narrow to neighbours
    while hi - lo > 1:
        mid = (lo + hi) // 2
        if resid(shells[mid]) > 0:
            lo = mid
        else:
            hi = mid
    return "bracket", lo


def htdmfet_at_mu(spec, cfg, mu):
    """Single-shot embedding at a fixed chemical potential.

    The potential acts on the cluster's fragment orbitals; the lattice
    filling is walked (over non-degenerate fillings) until it agrees with
    the fragment density the correlated cluster returns.  The reported
    density is the continuous cluster value; outside the representable
    filling range the exact empty/full rows are returned.
    """
    ws = _LatticeWorkspace(spec, frag_size=cfg.frag_size)
    L = spec.n_sites
    shells = ws.allowed_shells()
    if not shells:
        raise SingularCoupling("no usable filling for this fragment size")
    empty_row, full_row = _band_edge_rows(spec, mu)

    cache = {}

    def solve(j):
        if j not in cache:
            hh = ws.householder(j)
            ch = ws.cluster(hh, cfg.mode, mu_frag=mu - 0.5 * spec.u,
                            ph_symmetric=True)
            sol = _solve_cluster(ch)
            occ = fragment_occupation(sol, ws.n_frag)
            cache[j] = (occ - 2.0 * j / L, occ, sol, hh)
        return cache[j]

    guess, _ = lattice.filling_from_mu(
        lattice.build_h1(spec, 0.0), mu - 0.5 * spec.u)
    where, k = _walk_shells(shells, lambda j: solve(j)[0], guess)
    if where == "bottom":
        return empty_row
    if where == "top":
        return full_row
    lo, hi = shells[k], shells[k + 1]
    best_j = lo if abs(cache[lo][0]) <= abs(cache[hi][0]) else hi
    r, occ, sol, hh = cache[best_j]
    e = per_site_energy(sol, spec, hh, cfg.mode)
    return EmbeddingReport(converged=abs(r) <= max(cfg.tol_occ, 1.0 / L),
                           iterations=len(cache), density=occ, mu_tilde=mu,
                           per_site_energy=e, residual=abs(r),
                           cluster_solution=sol,
                           evaluations=[(j, cache[j][1]) for j in
                                        sorted(cache)])


def lpfet(spec, cfg):
    """Self-consistent uniform Hxc potential on a homogeneous lattice.

    The auxiliary mean-field lattice carries a uniform potential v; its
    filling at the requested chemical potential supplies the bath, and the
    correlated cluster (non-interacting bath, fragment potential v) must
    return the same density.  The filling window containing the fixed point
    is located first; v is then polished inside it by damped secant updates
    with a bisection safeguard.
    """
    if not spec.uniform:
        raise ValueError("self-consistent potential loop requires a "
                         "uniform external potential")
    ws = _LatticeWorkspace(spec, frag_size=cfg.frag_size)
    L = spec.n_sites
    mu = cfg.mu_lattice
    eps = ws.eps + spec.v_ext[0]
    shells = ws.allowed_shells()
    if not shells:
        raise SingularCoupling("no usable filling for this fragment size")
    empty_row, full_row = _band_edge_rows(spec, mu)
    empty_row.v_hxc = 0.0
    full_row.v_hxc = spec.u

    evals = []
    n_solves = [0]
    cluster_cache = {}

    def cluster_occ(j, v):
        if j not in cluster_cache:
            hh = ws.householder(j)
            cluster_cache[j] = (hh, ws.cluster(hh, NIB, mu_frag=0.0))
        hh, ch0 = cluster_cache[j]
        sol = _solve_cluster(ch0.with_mu_frag(v))
        n_solves[0] += 1
        occ = fragment_occupation(sol, ws.n_frag)
        evals.append((v, occ))
        return occ, sol, hh

    def window(j):
        # mean-field filling is j exactly while eps[j-1] <= mu - v < eps[j]
        hi = mu - eps[j - 1]
        lo = mu - eps[j] + 1e-12 if j < L else hi - 1.0
        return lo, hi

    # occupation rises with v inside a window, and windows of larger j sit
    # at lower v with smaller occupations: the window-edge residual is a
    # decreasing function of j, walked like any other filling search.
    edge_cache = {}

    def edge_resid(j):
        if j not in edge_cache:
            lo, hi = window(j)
            target = 2.0 * j / L
            r_hi = cluster_occ(j, hi)[0] - target
            r_lo = cluster_occ(j, lo)[0] - target
            edge_cache[j] = (r_lo, r_hi)
        r_lo, r_hi = edge_cache[j]
        # sign for the walk: positive when even the lowest in-window
        # occupation overshoots, negative when the highest undershoots
        if r_lo > 0:
            return r_lo
        if r_hi < 0:
            return r_hi
        return 0.0

    # fast path: probe the bare starting point first (exact at zero
    # interaction, a good warm start otherwise)
    j0 = int(np.sum(eps <= mu))
    if j0 in shells:
        occ0, sol0, hh0 = cluster_occ(j0, 0.0)
        if abs(occ0 - 2.0 * j0 / L) <= cfg.tol_density:
            e = per_site_energy(sol0, spec, hh0, NIB)
            return EmbeddingReport(converged=True, iterations=n_solves[0],
                                   density=occ0, v_hxc=0.0,
                                   per_site_energy=e,
                                   residual=abs(occ0 - 2.0 * j0 / L),
                                   cluster_solution=sol0, evaluations=evals)

    guess, _ = lattice.filling_from_mu(
        lattice.build_h1(spec, 0.0), mu - 0.5 * spec.u)
    where, k = _walk_shells(shells, edge_resid, guess)
    if where == "bottom" and edge_resid(shells[0]) < 0:
        empty_row.iterations = n_solves[0]
        return empty_row
    if where == "top" and edge_resid(shells[-1]) > 0:
        full_row.iterations = n_solves[0]
        return full_row

    # pick the crossing window: either one shell has an interior root
    # (edge_resid == 0) or the fixed point falls between two windows
    candidates = [shells[k]] if where != "bracket" else         [shells[k], shells[k + 1]]
    root_shells = [j for j in candidates if edge_resid(j) == 0.0]
    if root_shells:
        j = root_shells[0]
        target = 2.0 * j / L
        a, b = window(j)
        fa = edge_cache[j][0]
        v = b
        fv = edge_cache[j][1]
        for it in range(1, cfg.max_iters + 1):
            if abs(fv) <= cfg.tol_density:
                occ, sol, hh = cluster_occ(j, v)
                e = per_site_energy(sol, spec, hh, NIB)
                return EmbeddingReport(
                    converged=True, iterations=n_solves[0], density=occ,
                    v_hxc=v, per_site_energy=e, residual=abs(fv),
                    cluster_solution=sol, evaluations=evals)
            # damped secant step, clipped into the bracket
            slope = (b - a) / max(edge_cache[j][1] - edge_cache[j][0], 1e-12)
            v_new = v - cfg.mixing * fv * slope
            if not a < v_new < b:
                v_new = 0.5 * (a + b)
            f_new = cluster_occ(j, v_new)[0] - target
            if f_new > 0:
                b = v_new
            else:
                a = v_new
            v, fv = v_new, f_new
        raise NoConvergence(
            "potential refinement exhausted %d iterations" % cfg.max_iters)

    # no exact fixed point on this finite lattice: report the better edge
    best = None
    for j in candidates:
        r_lo, r_hi = edge_cache[j]
        lo, hi = window(j)
        for v, r in ((lo, r_lo), (hi, r_hi)):
            if best is None or abs(r) < abs(best[1]):
                best = (v, r, j)
    v, r, j = best
    occ, sol, hh = cluster_occ(j, v)
    e = per_site_energy(sol, spec, hh, NIB)
    return EmbeddingReport(converged=False, iterations=n_solves[0],
                           density=occ, v_hxc=v, per_site_energy=e,
                           residual=abs(r), cluster_solution=sol,
                           evaluations=evals)


# ---------------------------------------------------------------------------
# molecular driver
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class FragmentResult:
    """Per-fragment embedding data at a common fragment potential."""

    sites: tuple
    coeffs: np.ndarray
    ch: ClusterHamiltonian
    solution: fci.ClusterSolution
    h_bare: np.ndarray          # plain projection of the one-body operator


def _check_tiling(fragments, n_orb):
    seen = []
    for sites in fragments:
        seen.extend(sites)
    if sorted(seen) != list(range(n_orb)):
        raise PartitionNotTiling(
            "fragments must cover every orbital exactly once")


def democratic_energy(frag_results, ints):
    """Total energy from fragment-row contractions of every cluster's RDMs.

    The one-body matrix is the average of the bare and environment-dressed
    projections, which stops the embedding potential energy from being
    counted twice; the fragment chemical potential is excluded.
    """
    _check_tiling([fr.sites for fr in frag_results], ints.n_orb)
    energy = ints.e_core
    for fr in frag_results:
        n = fr.ch.n_frag
        h_dressed = fr.ch.with_mu_frag(0.0).h_eff
        h_avg = 0.5 * (fr.h_bare + h_dressed)
        rdm1, rdm2 = fr.solution.rdm1, fr.solution.rdm2
        energy += float(np.sum(h_avg[:n, :] * rdm1[:, :n].T))
        energy += 0.5 * float(np.sum(fr.ch.g_eff[:n] * rdm2[:n]))
    return energy


def _molecular_fragments(ints, gamma, fragments, mode, mu):
    """Build and solve every fragment cluster at a common mu."""
    results = []
    for sites in fragments:
        sites = tuple(sites)
        if len(sites) == ints.n_orb:
            ch = build_whole_system_hamiltonian(ints, ints.n_elec,
                                                mu_frag=mu)
            sol = _solve_cluster(ch)
            results.append(FragmentResult(sites=sites,
                                          coeffs=np.eye(ints.n_orb),
                                          ch=ch, solution=sol,
                                          h_bare=ints.h1.copy()))
            continue
        frag = FragmentPartition.from_sites(sites, ints.n_orb)
        hh = build_block_householder(gamma, frag, pivot=True)
        coeffs = cluster_coeffs(hh)
        proj = coeffs @ coeffs.T
        gamma_env = gamma.gamma - proj @ gamma.gamma @ proj
        ch = build_cluster_hamiltonian(mode, ints, hh, mu_frag=mu,
                                       gamma_env=gamma_env)
        sol = _solve_cluster(ch)
        h_bare = coeffs.T @ ints.h1 @ coeffs
        results.append(FragmentResult(sites=sites, coeffs=coeffs, ch=ch,
                                      solution=sol, h_bare=h_bare))
    return results


@dataclass
class MoleculeReport:
    """Embedding outcome for a molecular integral set."""

    converged: bool
    iterations: int
    mu_tilde: float
    n_elec_fragments: float
    e_total: float
    e_hf: float
    fragment_results: list
    evaluations: list


def htdmfet_molecule(ints, fragments, mode=IB, tol_occ=1e-8,
                     mu_bracket=(-10.0, 10.0), max_root_iters=100,
                     scf=None):
    """Single-shot embedding of a molecule tiled into orbital fragments.

    A common fragment chemical potential is tuned until the summed fragment
    electron counts reproduce the molecule's electron number; the energy is
    assembled by democratic partitioning.
    """
    from .abinitio import rhf

    fragments = [tuple(f) for f in fragments]
    _check_tiling(fragments, ints.n_orb)
    if scf is None:
        scf = rhf(ints)
    gamma = scf.gamma

    def eval_elec(mu):
        results = _molecular_fragments(ints, gamma, fragments, mode, mu)
        n = sum(float(np.trace(fr.solution.rdm1[:fr.ch.n_frag,
                                                :fr.ch.n_frag]))
                for fr in results)
        return n, results

    n0, res0 = eval_elec(0.0)
    if abs(n0 - ints.n_elec) <= tol_occ:
        mu, n_frag, results, evals, ok = 0.0, n0, res0, [(0.0, n0)], True
    else:
        mu, n_frag, results, evals, ok = _bracketed_root(
            eval_elec, float(ints.n_elec), mu_bracket, tol_occ,
            max_root_iters)
    e_total = democratic_energy(results, ints)
    return MoleculeReport(converged=ok, iterations=len(evals), mu_tilde=mu,
                          n_elec_fragments=n_frag, e_total=e_total,
                          e_hf=scf.e_total, fragment_results=results,
                          evaluations=evals)


# ---------------------------------------------------------------------------
# scans
# ---------------------------------------------------------------------------

@dataclass
class ScanRow:
    """One point of a chemical-potential scan."""

    mu: float
    n: float | None
    e: float | None
    converged: bool = False
    aux: float | None = None      # converged mu_tilde or v_hxc
    error: str | None = None
    note: str = ""


def mu_scan(spec, cfg, mu_grid, scheme=None, jobs=1):
    """One embedding solve per grid point; failures recorded, not raised.

    Rows keep grid order; the reported n is checked for monotonicity and
    flagged (never altered) when it decreases.
    """
    if scheme is None:
        scheme = "lpfet" if isinstance(cfg, LpfetConfig) else "htdmfet"

    def solve(mu):
        try:
            if scheme == "lpfet":
                rep = lpfet(spec, LpfetConfig(
                    frag_size=cfg.frag_size, mu_lattice=mu,
                    tol_density=cfg.tol_density, max_iters=cfg.max_iters,
                    mixing=cfg.mixing))
                aux = rep.v_hxc
            else:
                rep = htdmfet_at_mu(spec, cfg, mu)
                aux = rep.mu_tilde
            return ScanRow(mu=mu, n=rep.density, e=rep.per_site_energy,
                           converged=rep.converged, aux=aux)
        except Exception as exc:  # record and keep scanning
            return ScanRow(mu=mu, n=None, e=None, converged=False,
                           error="%s: %s" % (type(exc).__name__, exc))

    mu_grid = list(mu_grid)
    if jobs > 1:
        from concurrent.futures import ThreadPoolExecutor

        with ThreadPoolExecutor(max_workers=jobs) as pool:
            rows = list(pool.map(solve, mu_grid))
    else:
        rows = [solve(mu) for mu in mu_grid]

    last = None
    for row in rows:
        if row.n is None:
            continue
        if last is not None and row.n < last - 1e-10:
            row.note = "nonmonotone"
        last = row.n
    return rows
