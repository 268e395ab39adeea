"""Command-line entry point: ``concentra <command> ...``."""
from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from .errors import ConcentraError, EmptySet, FormatError
from .grid import GridSet, MAGIC, loads, save

EXIT_OK, EXIT_FAIL, EXIT_USAGE, EXIT_EMPTY = 0, 1, 2, 3


class UsageError(Exception):
    pass


def read_input(path: str) -> GridSet:
    """A GSET1 file, or a JSON ShapeSpec that is rasterized on the fly."""
    from .shapes import ShapeSpec, generate

    try:
        data = Path(path).read_bytes()
    except OSError as exc:
        raise UsageError(f"cannot read {path}: {exc.strerror}") from exc
    if data.startswith(MAGIC.encode()):
        return loads(data)
    try:
        spec = json.loads(data)
    except (UnicodeDecodeError, json.JSONDecodeError) as exc:
        raise FormatError(f"{path} is neither GSET1 nor JSON") from exc
    if not isinstance(spec, dict):
        raise FormatError("ShapeSpec JSON must be an object")
    return generate(ShapeSpec.from_dict(spec))


def _positive(text: str) -> float:
    try:
        v = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a number: {text!r}")
    if not v > 0:
        raise argparse.ArgumentTypeError("must be positive")
    return v


def _r_grid(text: str) -> tuple[float, ...]:
    return tuple(_positive(t) for t in text.split(",") if t.strip())


def cmd_compute(args) -> int:
    from .functionals import deficit_report

    E = read_input(args.input)
    if E.is_empty:
        raise EmptySet("input set has no occupied cells")
    print(json.dumps(deficit_report(E, args.r).to_dict(), indent=2, sort_keys=False))
    return EXIT_OK


def cmd_sweep(args) -> int:
    from .shapes import corpus
    from .sweep import DEFAULT_R_GRID, run_sweep

    result = run_sweep(corpus(args.corpus), h=args.h, r_grid=args.r_grid or DEFAULT_R_GRID,
                       corpus_name=args.corpus)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    result.write_csv(out / "sweep.csv")
    summary = json.dumps(result.summary(), indent=2)
    (out / "summary.json").write_text(summary + "\n")
    print(summary)
    return EXIT_OK


def cmd_verify(args) -> int:
    from .verify import run_verify

    report = run_verify(args.level, mutate=args.mutate)
    print(report.table())
    if report.passed:
        print("all invariants hold")
        return EXIT_OK
    print("FAILED: " + ", ".join(report.failures), file=sys.stderr)
    return EXIT_FAIL


def cmd_polylem(args) -> int:
    from .steiner import MAX_DEGREE, polylem_constant

    if args.max_n > MAX_DEGREE:
        raise UsageError(f"--max-n must be at most {MAX_DEGREE}")
    print("N,c,minimizer")
    for n in range(args.max_n + 1):
        res = polylem_constant(n)
        mins = " ".join(f"{b:.5f}" for b in res.minimizer)
        print(f"{n},{res.c_value:.12g},{mins}")
    return EXIT_OK


def cmd_envelope(args) -> int:
    from .distance import envelope

    E = read_input(args.input)
    if E.is_empty:
        raise EmptySet("input set has no occupied cells")
    C = envelope(E, args.r)
    save(C, args.out)
    print(f"wrote {args.out}: {E.count} -> {C.count} cells")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="concentra", description="Concentration deficits of planar grid sets.")
    sub = p.add_subparsers(dest="command", required=True)

    c = sub.add_parser("compute", help="deficit report for one set (JSON)")
    c.add_argument("--input", required=True, help="GSET1 file or ShapeSpec JSON")
    c.add_argument("--r", required=True, type=_positive)
    c.set_defaults(func=cmd_compute)

    s = sub.add_parser("sweep", help="corpus sweep to CSV plus JSON summary")
    s.add_argument("--corpus", required=True, choices=("smoke", "full"))
    s.add_argument("--h", type=_positive, default=None, help="override the grid spacing of every spec")
    s.add_argument("--r-grid", type=_r_grid, default=None, help="comma-separated multiples of r_E")
    s.add_argument("--out", required=True)
    s.set_defaults(func=cmd_sweep)

    v = sub.add_parser("verify", help="run the invariant suite")
    v.add_argument("--level", choices=("smoke", "full"), default="smoke")
    v.add_argument("--mutate", choices=("strict-dilation",), default=None,
                   help="deliberately break the build to confirm the suite notices")
    v.set_defaults(func=cmd_verify)

    q = sub.add_parser("polylem", help="table of c(N)")
    q.add_argument("--max-n", type=int, default=4)
    q.set_defaults(func=cmd_polylem)

    e = sub.add_parser("envelope", help="write the r-envelope of a set as GSET1")
    e.add_argument("--input", required=True)
    e.add_argument("--r", required=True, type=_positive)
    e.add_argument("--out", required=True)
    e.set_defaults(func=cmd_envelope)
    return p


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except EmptySet as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_EMPTY
    except (UsageError, FormatError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except ConcentraError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
