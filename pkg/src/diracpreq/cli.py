"""Command line entry point: ``diracpreq check <manifest>``."""

import argparse
import os
import sys
from importlib import resources

from .checks import run_checks
from .errors import EngineError
from .manifest import parse_manifest
from .report import emit_report

FORMAT_ENV = "DIRACPREQ_FORMAT"


def fixture_names():
    root = resources.files("diracpreq") / "fixtures"
    return sorted(p.name[:-5] for p in root.iterdir() if p.name.endswith(".json"))


def fixture_text(name):
    return (resources.files("diracpreq") / "fixtures" / f"{name}.json").read_text(encoding="utf-8")


def read_manifest(ref):
    """A path, or the name of a shipped fixture."""
    if os.path.exists(ref):
        with open(ref, encoding="utf-8") as fh:
            return fh.read()
    name = ref[:-5] if ref.endswith(".json") else ref
    if name in fixture_names():
        return fixture_text(name)
    raise FileNotFoundError(ref)


def build_parser():
    p = argparse.ArgumentParser(prog="diracpreq", description="Exact checks on Dirac and Dirac-Jacobi structures.")
    sub = p.add_subparsers(dest="command", required=True)
    c = sub.add_parser("check", help="run the checks of a manifest")
    c.add_argument("manifest", help="manifest path or shipped fixture name")
    c.add_argument("--format", choices=["text", "json"], default=None,
                   help=f"report format (default: ${FORMAT_ENV} or text)")
    c.add_argument("--only", metavar="CHECK_ID", help="run a single check")
    c.add_argument("--seed", type=int, help="override the manifest seed")
    c.add_argument("--timing", action="store_true", help="include per-check timings (not byte-stable)")
    c.add_argument("--output", "-o", help="write the report to a file")
    sub.add_parser("fixtures", help="list the shipped fixture manifests")
    return p


def main(argv=None):
    args = build_parser().parse_args(argv)
    if args.command == "fixtures":
        print("\n".join(fixture_names()))
        return 0
    fmt = args.format or os.environ.get(FORMAT_ENV, "text")
    if fmt not in ("text", "json"):
        print(f"error: {FORMAT_ENV}={fmt!r} is not text or json", file=sys.stderr)
        return 2
    try:
        m = parse_manifest(read_manifest(args.manifest))
        if args.only is not None:
            m.check(args.only)
    except FileNotFoundError as e:
        print(f"error: no such manifest {e}", file=sys.stderr)
        return 2
    except EngineError as e:
        print(f"error: {type(e).__name__}: {e}", file=sys.stderr)
        return 2
    report = run_checks(m, seed=args.seed, only=args.only)
    out = emit_report(report, fmt, timing=args.timing)
    if args.output:
        with open(args.output, "w", encoding="utf-8") as fh:
            fh.write(out)
    else:
        sys.stdout.write(out)
    return 0 if report.ok else 1


if __name__ == "__main__":
    sys.exit(main())
