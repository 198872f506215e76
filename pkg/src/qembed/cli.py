"""Command-line front end: lattice scans, molecular runs, invariant suites.

Outputs are CSV with '#'-prefixed metadata lines carrying the tool version
and the full configuration, so identical invocations produce byte-identical
files.  Exit codes: 0 success, 1 usage error, 2 numerical failure,
3 invariant violation.
"""

import argparse
import glob
import json
import os
import re
import sys

import numpy as np

from . import __version__, abinitio, embed, fci, lattice, verify
from .errors import QembedError

USAGE_ERROR = 1
NUMERICAL_ERROR = 2
INVARIANT_ERROR = 3


def _fmt(x):
    if x is None:
        return ""
    if isinstance(x, float):
        return "%.12g" % x
    return str(x)


def _write_csv(path, header, rows, config):
    lines = ["# qembed %s" % __version__,
             "# config: %s" % json.dumps(config, sort_keys=True)]
    lines.append(",".join(header))
    for row in rows:
        lines.append(",".join(_fmt(v) for v in row))
    text = "\n".join(lines) + "\n"
    if path is None or path == "-":
        sys.stdout.write(text)
    else:
        with open(path, "w") as fh:
            fh.write(text)


def _parse_range(text):
    """lo:hi:step inclusive grid specification."""
    parts = text.split(":")
    if len(parts) != 3:
        raise argparse.ArgumentTypeError("expected lo:hi:step")
    lo, hi, step = (float(p) for p in parts)
    if step <= 0 or hi < lo:
        raise argparse.ArgumentTypeError("need hi >= lo and step > 0")
    count = int(round((hi - lo) / step))
    return [lo + i * step for i in range(count + 1)]


def _parse_int_pair(text):
    parts = text.split(":")
    if len(parts) != 2:
        raise argparse.ArgumentTypeError("expected lo:hi")
    return int(parts[0]), int(parts[1])


def _parse_int_list(text):
    return [int(t) for t in text.split(",") if t]


def build_parser():
    parser = argparse.ArgumentParser(
        prog="qembed",
        description="fragment+bath quantum embedding workflows")
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="subcommand", required=True)

    hub = sub.add_parser("hubbard", help="1-D Hubbard ring workflows")
    hub.add_argument("--config", help="JSON file with defaults; explicit "
                                      "flags override its values")
    hub.add_argument("--L", type=int, default=400)
    hub.add_argument("--U", type=float, default=8.0)
    hub.add_argument("--t", type=float, default=1.0)
    hub.add_argument("--frag", type=int, default=1)
    hub.add_argument("--scheme", choices=("htdmfet", "lpfet"),
                     default="htdmfet")
    hub.add_argument("--bath", choices=("NIB", "IB"), default="NIB")
    hub.add_argument("--mu-scan", dest="mu_scan", type=_parse_range,
                     metavar="LO:HI:STEP",
                     help="chemical-potential grid; one solve per point")
    hub.add_argument("--fillings", type=_parse_int_list,
                     help="comma-separated per-spin electron counts for a "
                          "per-site-energy table (htdmfet only)")
    hub.add_argument("--tol-occ", type=float, default=1e-8)
    hub.add_argument("--jobs", type=int, default=1)
    hub.add_argument("--seed", type=int, default=0)
    hub.add_argument("--out", default=None)

    mol = sub.add_parser("molecule", help="molecular embedding from "
                                          "FCIDUMP files")
    mol.add_argument("--config", help="JSON file with defaults")
    mol.add_argument("--fcidump", required=True,
                     help="FCIDUMP file, or a directory of files keyed by "
                          "distance in the file name")
    mol.add_argument("--overlap", default=None,
                     help="overlap matrix file (default: .overlap sidecar "
                          "next to each FCIDUMP; omit for orthonormal "
                          "inputs)")
    mol.add_argument("--frag-size", type=int, default=1,
                     help="orbitals per fragment (must tile the basis)")
    mol.add_argument("--fci-cap", type=int, default=fci.BASIS_DIM_CAP,
                     help="skip the exact reference when the determinant "
                          "space exceeds this")
    mol.add_argument("--tol-occ", type=float, default=1e-8)
    mol.add_argument("--seed", type=int, default=0)
    mol.add_argument("--out", default=None)

    ver = sub.add_parser("verify", help="randomized invariant suites")
    ver.add_argument("--seed", type=int, default=0)
    ver.add_argument("--trials", type=int, default=100)
    ver.add_argument("--sizes", type=_parse_int_pair, default=(10, 100),
                     metavar="LO:HI")
    return parser


def _apply_config_file(args, parser):
    """Fill non-explicit options from the --config JSON file."""
    if not getattr(args, "config", None):
        return args
    with open(args.config) as fh:
        conf = json.load(fh)
    explicit = {a.split("=")[0].lstrip("-").replace("-", "_")
                for a in sys.argv if a.startswith("--")}
    for key, value in conf.items():
        attr = key.replace("-", "_")
        if attr in explicit or not hasattr(args, attr):
            continue
        if attr == "mu_scan" and isinstance(value, str):
            value = _parse_range(value)
        if attr == "fillings" and isinstance(value, str):
            value = _parse_int_list(value)
        if attr == "sizes" and isinstance(value, str):
            value = _parse_int_pair(value)
        setattr(args, attr, value)
    return args


def run_hubbard(args):
    spec = lattice.LatticeSpec(n_sites=args.L, u=args.U, t=args.t)
    config = {"subcommand": "hubbard", "L": args.L, "U": args.U,
              "t": args.t, "frag": args.frag, "scheme": args.scheme,
              "bath": args.bath, "seed": args.seed, "jobs": args.jobs,
              "tol_occ": args.tol_occ,
              "mu_scan": args.mu_scan, "fillings": args.fillings}
    if args.mu_scan is None and args.fillings is None:
        print("error: need --mu-scan or --fillings", file=sys.stderr)
        return USAGE_ERROR

    if args.mu_scan is not None:
        if args.scheme == "lpfet":
            cfg = embed.LpfetConfig(frag_size=args.frag)
        else:
            cfg = embed.HtDmfetConfig(mode=args.bath, frag_size=args.frag,
                                      tol_occ=args.tol_occ)
        rows = embed.mu_scan(spec, cfg, args.mu_scan, scheme=args.scheme,
                             jobs=args.jobs)
        mode = "NIB" if args.scheme == "lpfet" else args.bath
        out = [(r.mu, r.n, r.e, args.frag, mode, args.scheme, args.U,
                args.t, args.L, r.converged, r.aux, r.error or "", r.note)
               for r in rows]
        _write_csv(args.out, ["mu", "n", "e", "frag_size", "mode",
                              "scheme", "U", "t", "L", "converged", "aux",
                              "error", "note"], out, config)
        return 0

    if args.scheme == "lpfet":
        print("error: the per-site table needs --scheme htdmfet "
              "(the potential loop is driven by mu, use --mu-scan)",
              file=sys.stderr)
        return USAGE_ERROR
    cfg = embed.HtDmfetConfig(mode=args.bath, frag_size=args.frag,
                              tol_occ=args.tol_occ)
    out = []
    for n_per_spin in args.fillings:
        rep = embed.htdmfet_lattice(spec, cfg, n_per_spin)
        out.append((rep.density, rep.per_site_energy, args.frag, args.bath,
                    args.scheme, args.U, args.t, args.L, rep.mu_tilde,
                    rep.converged))
    _write_csv(args.out, ["n", "e", "frag_size", "mode", "scheme", "U",
                          "t", "L", "mu_tilde", "converged"], out, config)
    return 0


_DISTANCE_RE = re.compile(r"(\d+\.\d+)")


def _distance_key(path):
    m = _DISTANCE_RE.findall(os.path.basename(path))
    return float(m[-1]) if m else float("nan")


def _load_molecule(path, overlap_path):
    ints = abinitio.parse_fcidump(path)
    sidecar = os.path.splitext(path)[0] + ".overlap"
    if overlap_path:
        sidecar = overlap_path
    if os.path.exists(sidecar):
        x = abinitio.lowdin(abinitio.read_overlap(sidecar))
        ints = abinitio.transform_integrals(x, ints)
    return ints


def run_molecule(args):
    if os.path.isdir(args.fcidump):
        paths = sorted(glob.glob(os.path.join(args.fcidump, "*.fcidump")),
                       key=_distance_key)
    else:
        paths = [args.fcidump]
    if not paths:
        print("error: no FCIDUMP files found", file=sys.stderr)
        return USAGE_ERROR
    config = {"subcommand": "molecule", "fcidump": args.fcidump,
              "overlap": args.overlap, "frag_size": args.frag_size,
              "fci_cap": args.fci_cap, "tol_occ": args.tol_occ,
              "seed": args.seed}
    rows = []
    for path in paths:
        ints = _load_molecule(path, args.overlap)
        if ints.n_orb % args.frag_size:
            print("error: %d orbitals not tiled by fragments of %d"
                  % (ints.n_orb, args.frag_size), file=sys.stderr)
            return USAGE_ERROR
        fragments = [tuple(range(i, i + args.frag_size))
                     for i in range(0, ints.n_orb, args.frag_size)]
        scf = abinitio.rhf(ints)
        rep = embed.htdmfet_molecule(ints, fragments,
                                     tol_occ=args.tol_occ, scf=scf)
        e_fci = None
        pct = None
        from math import comb
        dim = comb(ints.n_orb, ints.n_elec // 2) ** 2
        if dim <= args.fci_cap:
            basis = fci.enumerate_determinants(
                ints.n_orb, ints.n_elec // 2, ints.n_elec // 2)
            from .cluster import build_whole_system_hamiltonian
            sol = fci.ground_state(
                build_whole_system_hamiltonian(ints, ints.n_elec), basis)
            e_fci = sol.energy + ints.e_core
            denom = scf.e_total - e_fci
            if abs(denom) > 1e-14:
                pct = (scf.e_total - rep.e_total) / denom * 100.0
        rows.append((_distance_key(path), scf.e_total, rep.e_total,
                     e_fci, pct))
    _write_csv(args.out, ["d_hh", "e_hf", "e_htdmfet", "e_fci",
                          "pct_correlation"], rows, config)
    return 0


def run_verify(args):
    results = verify.run_all(seed=args.seed, trials=args.trials,
                             sizes=tuple(args.sizes))
    worst = 0
    for res in results:
        status = "pass" if res.ok else "FAIL"
        print("%-24s %s  (%d passed, %d failed)"
              % (res.name, status, res.passed, res.failed))
        for detail in res.failures[:5]:
            print("    %s" % detail)
        if not res.ok:
            worst = INVARIANT_ERROR
    return worst


def _merge_negative_ranges(argv):
    """Allow ``--mu-scan -2:10:0.1`` (value starting with a minus sign)."""
    merged = []
    skip = False
    for i, arg in enumerate(argv):
        if skip:
            skip = False
            continue
        if (arg in ("--mu-scan",) and i + 1 < len(argv)
                and argv[i + 1].startswith("-") and ":" in argv[i + 1]):
            merged.append("%s=%s" % (arg, argv[i + 1]))
            skip = True
        else:
            merged.append(arg)
    return merged


def main(argv=None):
    parser = build_parser()
    if argv is None:
        argv = sys.argv[1:]
    argv = _merge_negative_ranges(list(argv))
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        # argparse exits 2 on usage problems and 0 on --help
        raise SystemExit(USAGE_ERROR if exc.code else 0)
    try:
        args = _apply_config_file(args, parser)
        if args.subcommand == "hubbard":
            code = run_hubbard(args)
        elif args.subcommand == "molecule":
            code = run_molecule(args)
        else:
            code = run_verify(args)
    except QembedError as exc:
        print("numerical failure: %s: %s" % (type(exc).__name__, exc),
              file=sys.stderr)
        return NUMERICAL_ERROR
    except OSError as exc:
        print("error: %s" % exc, file=sys.stderr)
        return USAGE_ERROR
    return code


if __name__ == "__main__":
    sys.exit(main())
