"""diskviz CLI: `diskviz render --kind <kind> --in <path...> --outimg <path>`.

Exit codes: 0 on success, 1 on usage errors, 2 on schema mismatches (the
message names the offending file and missing columns).
"""

from __future__ import annotations

import argparse
import sys

from .render import FIGURE_KINDS, FigureSpec, SchemaError, render


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="diskviz", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)
    p = sub.add_parser("render", help="render one figure from CSV/JSON inputs")
    p.add_argument("--kind", required=True, choices=FIGURE_KINDS)
    p.add_argument("--in", dest="inputs", required=True, nargs="+", help="input file(s)")
    p.add_argument("--outimg", required=True, help="output image path")
    return parser


def main(argv=None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 1 if exc.code else 0
    try:
        out = render(FigureSpec(kind=args.kind, inputs=tuple(args.inputs), output=args.outimg))
    except SchemaError as exc:
        print(f"diskviz render: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"diskviz render: {exc}", file=sys.stderr)
        return 1
    print(out)
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
