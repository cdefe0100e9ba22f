"""`hcbviz plot` command-line entry point."""

from __future__ import annotations

import argparse
import json
import sys

from .data import FormatViolation
from .render import render_breather, render_phase_diagram, render_spacetime


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(prog="hcbviz",
                                     description="Render hcbsol artifacts")
    sub = parser.add_subparsers(dest="command", required=True)
    plot = sub.add_parser("plot")
    kinds = plot.add_subparsers(dest="kind", required=True)

    st = kinds.add_parser("spacetime")
    st.add_argument("--in", dest="inputs", nargs=1, required=True,
                    metavar="TRAJECTORY_CSV")
    st.add_argument("--out", required=True)
    st.add_argument("--field", choices=("density", "phase"), default="density")

    dg = kinds.add_parser("diagram")
    dg.add_argument("--in", dest="inputs", nargs=1, required=True,
                    metavar="GRID_JSON")
    dg.add_argument("--out", required=True)

    br = kinds.add_parser("breather")
    br.add_argument("--in", dest="inputs", nargs=2, required=True,
                    metavar=("TRAJECTORY_CSV", "REPORT_JSON"))
    br.add_argument("--out", required=True)

    args = parser.parse_args(argv)
    try:
        if args.kind == "spacetime":
            render_spacetime(args.inputs[0], args.out, kind=args.field)
        elif args.kind == "diagram":
            render_phase_diagram(args.inputs[0], args.out)
        else:
            render_breather(args.inputs[0], args.inputs[1], args.out)
    except (FormatViolation, OSError) as exc:
        json.dump({"error": type(exc).__name__, "message": str(exc)}, sys.stderr)
        sys.stderr.write("\n")
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
