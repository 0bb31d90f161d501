"""plotgen command line: one figure per harness trace CSV."""

from __future__ import annotations

import argparse
import sys

from .render import PlotSpec, SchemaError, render


def parse_segments(raw: str | None) -> list[int]:
    if not raw:
        return []
    try:
        return [int(part) for part in raw.split(",") if part.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad segment list {raw!r}") from None


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="plotgen", description="Render loss curves from a harness trace CSV"
    )
    parser.add_argument("--in", dest="input_csv", required=True, help="trace CSV path")
    parser.add_argument("--out", dest="output_path", required=True,
                        help="output image path (.png or .svg)")
    parser.add_argument("--window", type=int, default=10,
                        help="moving-mean window, used only when the CSV has no "
                             "movmean column (10 for the expert-advice task, 20 "
                             "for metric learning)")
    parser.add_argument("--segments", type=parse_segments, default=[],
                        help="comma-separated segment boundaries to mark")
    parser.add_argument("--title", default=None)
    args = parser.parse_args(argv)

    spec = PlotSpec(
        input_csv=args.input_csv,
        output_path=args.output_path,
        window=args.window,
        segments=args.segments,
        title=args.title,
    )
    try:
        curves = render(spec)
    except SchemaError as exc:
        print(f"schema error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"i/o error: {exc}", file=sys.stderr)
        return 3
    print(f"wrote {spec.output_path} with {len(curves)} curve(s)")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
