"""Command-line interface: one entry point per module operation.

Every run prints a report whose numeric payload is exact rational strings,
never floats.  Reports are deterministic for fixed inputs up to the
timing_ms field, independent of worker count.  Exit codes: 0 success,
1 semantic failure (an inequality or verification that does not hold),
2 input error (malformed arguments, files, or out-of-range requests).
"""

from __future__ import annotations

import argparse
import hashlib
import json
import os
import sys
import time
from fractions import Fraction
from importlib import resources

from . import __version__, census, certificate, cutmetric, extremal
from .algebra import format_rational
from .graphs import SmallGraph, density, from_graph6, to_graph6

ASSET_NAME = "pentagon.json"


def bundled_asset_bytes() -> bytes:
    return resources.files("flagsos.data").joinpath(ASSET_NAME).read_bytes()


def _asset_hash() -> str:
    try:
        return hashlib.sha256(bundled_asset_bytes()).hexdigest()
    except (FileNotFoundError, ModuleNotFoundError):
        return "unavailable"


def _rat(q) -> str:
    return format_rational(Fraction(q))


def _read_graphs(args_graphs: list[str]) -> list[SmallGraph]:
    tokens = list(args_graphs)
    if not tokens:
        tokens = sys.stdin.read().split()
    if not tokens:
        raise ValueError("no graphs given (pass graph6 arguments or pipe them on stdin)")
    return [from_graph6(t) for t in tokens]


def _bitmask_str(mask: int, n: int) -> str:
    return format(mask, f"0{max(n, 1)}b")


# ---------------------------------------------------------------------------
# subcommand implementations: each returns (exit_code, inputs, outputs)

def cmd_verify(args) -> tuple[int, dict, dict]:
    if args.certificate in (None, "bundled"):
        data = bundled_asset_bytes()
        source = "bundled"
    else:
        with open(args.certificate, "rb") as fh:
            data = fh.read()
        source = args.certificate
    cert = certificate.load_certificate(data)
    report = certificate.verify(cert, workers=args.workers)
    outputs = {
        "passed": report.passed,
        "psd_ok": report.psd_ok,
        "psd_results": list(report.psd_results),
        "level": report.level,
        "bound": _rat(report.bound),
        "max_coefficient": _rat(report.max_coefficient),
        "derived_bound": _rat(report.derived_bound),
        "coefficients": {g6: _rat(c) for g6, c in report.coefficients},
        "slacks": {g6: _rat(c) for g6, c in report.slacks},
    }
    return (0 if report.passed else 1), {"certificate": source}, outputs


def cmd_enumerate(args) -> tuple[int, dict, dict]:
    n = args.n
    count = census.model_count(n, workers=args.workers)
    outputs: dict = {"n": n, "count": count}
    if not args.count:
        models: list[str] = []
        census.enumerate_models_stream(n, lambda g: models.append(to_graph6(g)))
        outputs["models"] = models
    return 0, {"n": n}, outputs


def cmd_pentagons(args) -> tuple[int, dict, dict]:
    graphs = _read_graphs(args.graphs)
    results = []
    for g in graphs:
        results.append(
            {"graph6": to_graph6(g), "n": g.n, "pentagons": extremal.count_pentagons(g)}
        )
    return 0, {"graphs": [to_graph6(g) for g in graphs]}, {"results": results}


def cmd_extremal(args) -> tuple[int, dict, dict]:
    rep = extremal.exhaustive_max_pentagons(args.n, workers=args.workers)
    outputs = {
        "n": rep.n,
        "max_pentagons": rep.max_pentagons,
        "chi": rep.chi_value,
        "extremal": list(rep.extremal_graph6),
        "all_almost_balanced": rep.all_almost_balanced,
        "sporadic_present": rep.sporadic_present,
    }
    return 0, {"n": args.n}, outputs


def parse_blowup_spec(text: str) -> extremal.BlowupSpec:
    base_text, sep, parts_text = text.partition(":")
    if not sep:
        raise ValueError("blow-up spec must look like BASE_GRAPH6:k1,k2,...")
    base = from_graph6(base_text)
    try:
        parts = tuple(int(x) for x in parts_text.split(","))
    except ValueError:
        raise ValueError(f"malformed part sizes {parts_text!r}") from None
    return extremal.BlowupSpec(base, parts)


def cmd_blowup(args) -> tuple[int, dict, dict]:
    spec = parse_blowup_spec(args.spec)
    g = extremal.blowup(spec)
    outputs = {
        "base": to_graph6(spec.base),
        "parts": list(spec.parts),
        "n": g.n,
        "edges": g.edge_count(),
        "pentagons": extremal.count_pentagons(g),
    }
    if isinstance(g, SmallGraph):
        outputs["graph6"] = to_graph6(g)
    return 0, {"spec": args.spec}, outputs


def cmd_cutnorm(args) -> tuple[int, dict, dict]:
    graphs = _read_graphs(args.graphs)
    if len(graphs) == 1:
        (g,) = graphs
        value, s, t = cutmetric.cut_norm_witness(cutmetric.adjacency_matrix(g))
        n = g.n
        inputs = {"graphs": [to_graph6(g)]}
    elif len(graphs) == 2:
        g1, g2 = graphs
        if g1.n != g2.n:
            raise ValueError(f"graphs have different sizes {g1.n} and {g2.n}")
        value, s, t = cutmetric.cut_norm_witness(cutmetric._diff_matrix(g1, g2))
        n = g1.n
        inputs = {"graphs": [to_graph6(g1), to_graph6(g2)]}
    else:
        raise ValueError("cutnorm takes one or two graphs")
    outputs = {
        "cut_norm": _rat(value),
        "S": _bitmask_str(s, n),
        "T": _bitmask_str(t, n),
    }
    return 0, inputs, outputs


def cmd_density(args) -> tuple[int, dict, dict]:
    graphs = _read_graphs(args.graphs)
    if len(graphs) != 2:
        raise ValueError("density takes exactly two graphs: pattern then host")
    h, g = graphs
    value = density(h, g)
    outputs = {"density": _rat(value)}
    return 0, {"pattern": to_graph6(h), "host": to_graph6(g)}, outputs


# ---------------------------------------------------------------------------

def _add_common(p: argparse.ArgumentParser, suppress: bool = False):
    default = argparse.SUPPRESS if suppress else None
    p.add_argument(
        "--workers",
        type=int,
        default=default,
        help="parallel worker cap (results do not depend on it)",
    )
    p.add_argument(
        "--output", choices=("json", "tsv"), default=default, help="report format"
    )


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="flagsos",
        description="Exact flag-algebra toolkit for triangle-free graphs",
    )
    _add_common(p)
    sub = p.add_subparsers(dest="subcommand", required=True)

    sp = sub.add_parser("verify", help="verify a sum-of-squares certificate")
    sp.add_argument(
        "--certificate",
        default="bundled",
        help='certificate JSON path, or "bundled" (default)',
    )
    sp.set_defaults(fn=cmd_verify)

    sp = sub.add_parser("enumerate", help="triangle-free graphs up to isomorphism")
    sp.add_argument("n", type=int)
    sp.add_argument("--count", action="store_true", help="emit the count only")
    sp.set_defaults(fn=cmd_enumerate)

    sp = sub.add_parser("pentagons", help="count 5-cycles in triangle-free graphs")
    sp.add_argument("graphs", nargs="*", help="graph6 strings (or stdin)")
    sp.set_defaults(fn=cmd_pentagons)

    sp = sub.add_parser("extremal", help="exhaustive pentagon maximization")
    sp.add_argument("n", type=int)
    sp.set_defaults(fn=cmd_extremal)

    sp = sub.add_parser("blowup", help="build a blow-up: BASE_GRAPH6:k1,k2,...")
    sp.add_argument("spec")
    sp.set_defaults(fn=cmd_blowup)

    sp = sub.add_parser("cutnorm", help="cut norm of a graph or distance of two")
    sp.add_argument("graphs", nargs="*", help="one or two graph6 strings (or stdin)")
    sp.set_defaults(fn=cmd_cutnorm)

    sp = sub.add_parser("density", help="induced density p(pattern, host)")
    sp.add_argument("graphs", nargs="*", help="two graph6 strings (or stdin)")
    sp.set_defaults(fn=cmd_density)

    for sub_parser in set(sub.choices.values()):
        _add_common(sub_parser, suppress=True)
    return p


def _flatten(prefix: str, value, rows: list[tuple[str, str]]):
    if isinstance(value, dict):
        for k, v in value.items():
            _flatten(f"{prefix}.{k}" if prefix else str(k), v, rows)
    elif isinstance(value, list):
        if all(not isinstance(x, (dict, list)) for x in value):
            rows.append((prefix, ",".join(str(x) for x in value)))
        else:
            for i, v in enumerate(value):
                _flatten(f"{prefix}[{i}]", v, rows)
    else:
        rows.append((prefix, str(value)))


def render_report(report: dict, fmt: str) -> str:
    if fmt == "json":
        return json.dumps(report, indent=2, sort_keys=True)
    rows: list[tuple[str, str]] = []
    _flatten("", report, rows)
    return "\n".join(f"{k}\t{v}" for k, v in rows)


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.workers is None:
        args.workers = os.cpu_count() or 1
    if args.output is None:
        args.output = "json"
    t0 = time.monotonic()
    try:
        code, inputs, outputs = args.fn(args)
    except (ValueError, OSError) as e:
        err = {"subcommand": args.subcommand, "error": str(e)}
        print(render_report(err, args.output), file=sys.stderr)
        return 2
    report = {
        "subcommand": args.subcommand,
        "inputs": inputs,
        "outputs": outputs,
        "timing_ms": round((time.monotonic() - t0) * 1000),
        "engine_version": __version__,
        "certificate_sha256": _asset_hash(),
    }
    print(render_report(report, args.output))
    return code


if __name__ == "__main__":
    sys.exit(main())
