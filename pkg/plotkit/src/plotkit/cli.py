"""Batch entry point: render every figure described in a JSON spec file.

The spec file is a list (or a single object) of figure descriptions:

    [{"inputs": ["persite_frag1.csv", "persite_frag2.csv"],
      "kind": "persite",
      "group_keys": ["frag_size"],
      "output": "persite.png"}]

Paths are resolved relative to the spec file's directory.
"""

import argparse
import json
import os
import sys

from .figures import FigureSpec, PlotkitError, render


def load_specs(path):
    with open(path) as fh:
        raw = json.load(fh)
    if isinstance(raw, dict):
        raw = [raw]
    base = os.path.dirname(os.path.abspath(path))

    def resolve(p):
        return p if os.path.isabs(p) else os.path.join(base, p)

    specs = []
    for entry in raw:
        specs.append(FigureSpec(
            inputs=tuple(resolve(p) for p in entry["inputs"]),
            kind=entry["kind"],
            output=resolve(entry["output"]),
            group_keys=tuple(entry["group_keys"])
            if "group_keys" in entry else None,
        ))
    return specs


def main(argv=None):
    parser = argparse.ArgumentParser(
        prog="plotkit", description="render qembed CSV tables as figures")
    parser.add_argument("specfile", help="JSON figure-spec file")
    args = parser.parse_args(argv)
    try:
        specs = load_specs(args.specfile)
        for spec in specs:
            info = render(spec)
            print("wrote %s (%d series, %d rows)"
                  % (info.output, len(info.series), info.n_rows))
    except (PlotkitError, OSError, KeyError, json.JSONDecodeError) as exc:
        print("error: %s" % exc, file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
