"""Command line front end.

Usage:
  comex-plot --metric {regret|cost} --out panel.png [--log] [--self-test] label=trajectories.csv ...
"""

from __future__ import annotations

import argparse
import sys

from .panels import PanelSpec, SchemaError, render_panels, self_test


def parse_series(pairs: list[str]) -> tuple[tuple[str, str], ...]:
    out = []
    for pair in pairs:
        label, sep, path = pair.partition("=")
        if not sep or not label or not path:
            raise ValueError(f"series must be written label=path, got {pair!r}")
        out.append((label, path))
    return tuple(out)


def main(argv: list[str] | None = None) -> int:
    parser = argparse.ArgumentParser(prog="comex-plot", description=__doc__)
    parser.add_argument("--metric", required=True, choices=("regret", "cost"))
    parser.add_argument("--out", required=True, help="output image path (png or svg)")
    parser.add_argument("--log", action="store_true", help="log-scale the y axis")
    parser.add_argument("--self-test", action="store_true",
                        help="verify plotted means against the CSV columns")
    parser.add_argument("series", nargs="+", metavar="label=csv")
    args = parser.parse_args(argv)
    metric = "comm_cost" if args.metric == "cost" else "regret"
    try:
        spec = PanelSpec(parse_series(args.series), args.out, metric, log_scale=args.log)
        rendered = render_panels([spec])
        if args.self_test:
            self_test(rendered, [spec])
            print("self-test ok: plotted means match CSV means")
        print(f"wrote {args.out}")
        return 0
    except (SchemaError, ValueError, OSError, AssertionError) as e:
        print(f"error: {e}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
