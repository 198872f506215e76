"""Render result tables into publication-style figures.

Three figure kinds are understood, matching the CSV tables the embedding
CLI emits:

* ``persite``: energy per site against lattice filling, one series per
  grouping-key combination (fragment size, bath mode, scheme);
* ``muscan``: lattice filling against chemical potential, overlaid series
  with line styles distinguishing the bath mode / scheme;
* ``pes``: two panels, dissociation energies (mean field, embedding,
  exact where available) and the percentage of correlation recovered.

No numbers are recomputed here: the tool displays CSV columns as they are.
"""

import csv
import itertools
from dataclasses import dataclass, field

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402


class PlotkitError(Exception):
    pass


class MissingColumn(PlotkitError):
    """A referenced column is absent from the CSV header."""


class EmptySeries(PlotkitError):
    """No plottable rows survive grouping."""


KIND_DEFAULT_KEYS = {
    "persite": ("frag_size", "mode", "scheme"),
    "muscan": ("frag_size", "mode", "scheme"),
    "pes": (),
}

AXES = {
    "persite": ("lattice filling n", "energy per site  [t]"),
    "muscan": ("chemical potential mu  [t]", "lattice filling n"),
    "pes": ("interatomic distance  [angstrom]", "energy  [hartree]"),
}


@dataclass(frozen=True)
class FigureSpec:
    """One figure: input tables, kind, grouping keys, output path."""

    inputs: tuple
    kind: str
    output: str
    group_keys: tuple | None = None

    def __post_init__(self):
        if self.kind not in KIND_DEFAULT_KEYS:
            raise PlotkitError("unknown figure kind %r" % self.kind)
        object.__setattr__(self, "inputs", tuple(self.inputs))
        keys = self.group_keys
        if keys is None:
            keys = KIND_DEFAULT_KEYS[self.kind]
        object.__setattr__(self, "group_keys", tuple(keys))


@dataclass
class RenderInfo:
    """What a render produced, for callers and tests."""

    output: str
    series: list = field(default_factory=list)
    n_rows: int = 0


def read_table(path):
    """Rows of a '#'-commented CSV as a list of dicts (strings kept)."""
    with open(path) as fh:
        lines = [line for line in fh if not line.startswith("#")]
    reader = csv.DictReader(lines)
    rows = list(reader)
    header = reader.fieldnames or []
    return header, rows


def _require_columns(header, needed, path):
    missing = [c for c in needed if c not in header]
    if missing:
        raise MissingColumn("%s lacks column(s) %s" % (path,
                                                       ", ".join(missing)))


def _to_float(value):
    try:
        return float(value)
    except (TypeError, ValueError):
        return None


def _load(spec, x_col, y_col):
    """Merge the inputs and group rows by the grouping keys."""
    groups = {}
    total = 0
    for path in spec.inputs:
        header, rows = read_table(path)
        _require_columns(header, (x_col, y_col) + spec.group_keys, path)
        for row in rows:
            x = _to_float(row[x_col])
            y = _to_float(row[y_col])
            if x is None or y is None:
                continue
            key = tuple(row[k] for k in spec.group_keys)
            groups.setdefault(key, []).append((x, y))
            total += 1
    if total == 0:
        raise EmptySeries("no plottable rows in %s" % (spec.inputs,))
    return groups, total


def _series_label(spec, key):
    if not key:
        return "data"
    return ", ".join("%s=%s" % (k, v)
                     for k, v in zip(spec.group_keys, key))


_DASHES = ("-", "--", "-.", ":")


def _render_xy(spec, x_col, y_col):
    groups, total = _load(spec, x_col, y_col)
    fig, ax = plt.subplots(figsize=(5.2, 3.8))
    styles = itertools.cycle(_DASHES)
    info = RenderInfo(output=spec.output, n_rows=total)
    for key in sorted(groups):
        pts = sorted(groups[key])
        xs = [p[0] for p in pts]
        ys = [p[1] for p in pts]
        label = _series_label(spec, key)
        marker = "o" if len(pts) == 1 else None
        ax.plot(xs, ys, next(styles), marker=marker, label=label)
        info.series.append(label)
    xlabel, ylabel = AXES[spec.kind]
    ax.set_xlabel(xlabel)
    ax.set_ylabel(ylabel)
    ax.legend(fontsize=7)
    fig.tight_layout()
    fig.savefig(spec.output, dpi=150, metadata=_no_date(spec.output))
    plt.close(fig)
    return info


def _no_date(path):
    # keep repeated renders byte-stable where the backend allows it
    if path.endswith(".svg"):
        return {"Date": None}
    if path.endswith(".png"):
        return {"Software": "plotkit"}
    return None


def _render_pes(spec):
    curves = {}
    pct = []
    total = 0
    for path in spec.inputs:
        header, rows = read_table(path)
        _require_columns(header, ("d_hh", "e_hf", "e_htdmfet"), path)
        has_fci = "e_fci" in header
        has_pct = "pct_correlation" in header
        for row in rows:
            d = _to_float(row["d_hh"])
            if d is None:
                continue
            total += 1
            for col in ("e_hf", "e_htdmfet") + (("e_fci",) if has_fci
                                                else ()):
                val = _to_float(row[col])
                if val is not None:
                    curves.setdefault(col, []).append((d, val))
            if has_pct:
                v = _to_float(row["pct_correlation"])
                if v is not None:
                    pct.append((d, v))
    if total == 0:
        raise EmptySeries("no plottable rows in %s" % (spec.inputs,))

    panels = 2 if pct else 1
    fig, axes = plt.subplots(1, panels, figsize=(5.2 * panels, 3.8))
    axes = [axes] if panels == 1 else list(axes)
    info = RenderInfo(output=spec.output, n_rows=total)
    styles = {"e_hf": "-", "e_htdmfet": "--", "e_fci": ":"}
    for col in ("e_hf", "e_htdmfet", "e_fci"):
        if col not in curves:
            continue
        pts = sorted(curves[col])
        marker = "o" if len(pts) == 1 else None
        axes[0].plot([p[0] for p in pts], [p[1] for p in pts],
                     styles[col], marker=marker, label=col)
        info.series.append(col)
    xlabel, ylabel = AXES["pes"]
    axes[0].set_xlabel(xlabel)
    axes[0].set_ylabel(ylabel)
    axes[0].legend(fontsize=7)
    if pct:
        pts = sorted(pct)
        axes[1].plot([p[0] for p in pts], [p[1] for p in pts], "-",
                     marker="o" if len(pts) == 1 else None)
        axes[1].axhline(100.0, lw=0.6, color="k")
        axes[1].set_xlabel(xlabel)
        axes[1].set_ylabel("correlation energy recovered  [%]")
        info.series.append("pct_correlation")
    fig.tight_layout()
    fig.savefig(spec.output, dpi=150, metadata=_no_date(spec.output))
    plt.close(fig)
    return info


def render(spec):
    """Render one FigureSpec; returns a RenderInfo."""
    if spec.kind == "persite":
        return _render_xy(spec, "n", "e")
    if spec.kind == "muscan":
        return _render_xy(spec, "mu", "n")
    return _render_pes(spec)
