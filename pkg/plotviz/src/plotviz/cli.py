"""Script entry point: render one figure from a spec file."""

import argparse
import sys

from .figspec import SpecError, load_spec
from .reader import SchemaError
from .render import render_phase


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="plotviz",
        description="Render a phase-portrait figure from solver CSV artifacts.",
    )
    parser.add_argument("spec", help="figure-spec text file (INI)")
    args = parser.parse_args(argv)
    try:
        spec = load_spec(args.spec)
        out = render_phase(spec)
    except (SpecError, SchemaError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    print(f"wrote {out}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
