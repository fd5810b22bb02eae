"""Command-line front end.

Subcommands mirror the service routes and call the same handler functions
in-process, so no server is required; `serve` starts the HTTP service for
multi-client use.  All numerics live in the library; this module only
parses arguments, reads CSV, and renders results.

Output conventions: JSON reports go to stdout with floats printed to 17
significant digits (full double round-trip precision) and non-finite
values as the strings "Infinity"/"-Infinity"/"NaN"; sample output is a
one-column CSV.  Exit codes: 0 success, 1 domain/convergence errors
(machine-readable JSON object on stderr), 2 usage errors.
"""

from __future__ import annotations

import argparse
import json
import math
import sys

from . import __version__
from .errors import DataFormatError, DomainError, SeriesError
from .estimation import default_p_grid
from . import service

USAGE_ERROR = 2
DOMAIN_ERROR = 1


def _format_float(v: float) -> str:
    if math.isnan(v):
        return '"NaN"'
    if math.isinf(v):
        return '"Infinity"' if v > 0 else '"-Infinity"'
    return format(v, ".17g")


def render_json(obj, indent: int = 0) -> str:
    """Serialize nested dicts/lists/scalars with .17g floats."""
    pad = "  " * indent
    inner = "  " * (indent + 1)
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = (f'{inner}{json.dumps(str(k))}: {render_json(v, indent + 1)}'
                 for k, v in obj.items())
        return "{\n" + ",\n".join(items) + "\n" + pad + "}"
    if isinstance(obj, (list, tuple)):
        if not obj:
            return "[]"
        items = (f"{inner}{render_json(v, indent + 1)}" for v in obj)
        return "[\n" + ",\n".join(items) + "\n" + pad + "]"
    if isinstance(obj, bool):
        return "true" if obj else "false"
    if isinstance(obj, float):
        return _format_float(obj)
    return json.dumps(obj)


def _emit(model) -> None:
    print(render_json(model.model_dump()))


def read_values(path: str) -> list[float]:
    """Read a one-column CSV of numbers; '-' means stdin.

    An optional single header line is allowed; any other unparseable row
    aborts with its 1-based line number.
    """
    if path == "-":
        lines = sys.stdin.read().splitlines()
    else:
        with open(path, "r", encoding="utf-8") as fh:
            lines = fh.read().splitlines()
    values: list[float] = []
    seen_data = False
    for lineno, raw in enumerate(lines, start=1):
        text = raw.strip()
        if not text:
            continue
        if "," in text:
            raise DataFormatError(
                f"line {lineno}: expected a single column, got {text!r}", lineno)
        try:
            values.append(float(text))
            seen_data = True
        except ValueError:
            if not seen_data and not values:
                continue  # header line
            raise DataFormatError(
                f"line {lineno}: could not parse {text!r} as a number", lineno)
    return values


def _write_sample_csv(values, stream) -> None:
    stream.write("value\n")
    for v in values:
        stream.write(format(v, ".17g") + "\n")


def _parse_grid(text: str) -> list[float]:
    try:
        return [float(tok) for tok in text.split(",") if tok.strip() != ""]
    except ValueError:
        raise DataFormatError(f"could not parse grid value in {text!r}")


def _table_text(rows) -> str:
    header = ("p", "d_beta/d_alpha", "Distribution", "Beta div.", "Alpha div.", "Entropy")
    cells = [header] + [
        (format(r.p, "g"), r.beta_alpha_ratio, r.distribution, r.beta, r.alpha, r.entropy)
        for r in rows
    ]
    widths = [max(len(row[i]) for row in cells) for i in range(len(header))]
    lines = []
    for i, row in enumerate(cells):
        lines.append("  ".join(cell.ljust(w) for cell, w in zip(row, widths)).rstrip())
        if i == 0:
            lines.append("  ".join("-" * w for w in widths))
    return "\n".join(lines)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="powerdiv",
        description="Alpha/beta divergences, Tweedie densities, sampling and fitting.",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p_div = sub.add_parser("div", help="evaluate an alpha or beta divergence")
    p_div.add_argument("--kind", choices=["alpha", "beta"], required=True)
    p_div.add_argument("--p", type=float, required=True)
    p_div.add_argument("--x", type=float, required=True)
    p_div.add_argument("--mu", type=float, required=True)

    p_pdf = sub.add_parser("pdf", help="evaluate a Tweedie log-density")
    p_pdf.add_argument("--p", type=float, required=True)
    p_pdf.add_argument("--mu", type=float, required=True)
    p_pdf.add_argument("--phi", type=float, required=True)
    p_pdf.add_argument("--x", type=float, required=True)
    p_pdf.add_argument("--method", choices=["exact", "series", "saddlepoint"], default=None)

    p_sample = sub.add_parser("sample", help="draw variates, emitting one-column CSV")
    p_sample.add_argument("--p", type=float, required=True)
    p_sample.add_argument("--mu", type=float, required=True)
    p_sample.add_argument("--phi", type=float, required=True)
    p_sample.add_argument("--n", type=int, required=True)
    p_sample.add_argument("--seed", type=int, required=True)
    p_sample.add_argument("--output", default=None,
                          help="write CSV here and print a JSON summary instead")

    p_fit = sub.add_parser("fit", help="maximum-likelihood fit of (mu, phi, p) to CSV data")
    p_fit.add_argument("--input", required=True, help="one-column CSV path, or - for stdin")
    p_fit.add_argument("--p-min", type=float, default=None)
    p_fit.add_argument("--p-max", type=float, default=None)
    p_fit.add_argument("--grid", default=None,
                       help="comma-separated candidate p values (overrides --p-min/--p-max)")

    p_prof = sub.add_parser("profile", help="deviance/likelihood profile across p")
    p_prof.add_argument("--input", required=True)
    p_prof.add_argument("--grid", default=None, help="comma-separated p values")
    p_prof.add_argument("--p-min", type=float, default=None)
    p_prof.add_argument("--p-max", type=float, default=None)
    p_prof.add_argument("--grid-step", type=float, default=None,
                        help="step for a uniform grid between --p-min and --p-max")
    p_prof.add_argument("--format", choices=["json", "csv"], default="json")

    p_table = sub.add_parser("table", help="index/distribution/divergence correspondence")
    p_table.add_argument("--format", choices=["text", "json"], default="text")

    p_serve = sub.add_parser("serve", help="run the HTTP service")
    p_serve.add_argument("--host", default="127.0.0.1")
    p_serve.add_argument("--port", type=int, default=8000)

    return parser


def _run(args) -> int:
    if args.command == "div":
        _emit(service.compute_divergence(service.DivergenceRequest(
            kind=args.kind, p=args.p, x=args.x, mu=args.mu)))
        return 0

    if args.command == "pdf":
        _emit(service.compute_log_density(service.LogDensityRequest(
            p=args.p, mu=args.mu, phi=args.phi, x=args.x, method=args.method)))
        return 0

    if args.command == "sample":
        resp = service.run_sample(service.SampleRequest(
            p=args.p, mu=args.mu, phi=args.phi, n=args.n, seed=args.seed))
        if args.output is None:
            _write_sample_csv(resp.values, sys.stdout)
        else:
            with open(args.output, "w", encoding="utf-8") as fh:
                _write_sample_csv(resp.values, fh)
            print(render_json({"written": args.output, "n": resp.n,
                               "seed": resp.seed, "version": resp.version}))
        return 0

    if args.command == "fit":
        values = read_values(args.input)
        grid = _parse_grid(args.grid) if args.grid else None
        resp = service.run_fit(service.FitRequest(
            values=values, p_min=args.p_min, p_max=args.p_max, p_grid=grid))
        _emit(resp)
        if not resp.converged:
            sys.stderr.write(render_json({"error": {
                "type": "ConvergenceError",
                "message": "optimizer did not meet tolerances; best-so-far reported",
            }}) + "\n")
            return DOMAIN_ERROR
        return 0

    if args.command == "profile":
        values = read_values(args.input)
        if args.grid:
            p_values = _parse_grid(args.grid)
        elif args.grid_step is not None and args.p_min is not None and args.p_max is not None:
            p_values = []
            q = args.p_min
            while q <= args.p_max + 1e-12:
                p_values.append(round(q, 12))
                q += args.grid_step
        else:
            p_values = [float(v) for v in default_p_grid(args.p_min, args.p_max)]
        resp = service.run_profile(service.ProfileRequest(values=values, p_values=p_values))
        if args.format == "json":
            _emit(resp)
        else:
            print("p,total_deviance,log_likelihood,phi_hat,feasible")
            for r in resp.rows:
                print(",".join([
                    format(r.p, ".17g"), format(r.total_deviance, ".17g"),
                    format(r.log_likelihood, ".17g"), format(r.phi_hat, ".17g"),
                    "true" if r.feasible else "false",
                ]))
        return 0

    if args.command == "table":
        resp = service.table_rows()
        if args.format == "json":
            _emit(resp)
        else:
            print(_table_text(resp.rows))
        return 0

    if args.command == "serve":
        import uvicorn

        uvicorn.run(service.app, host=args.host, port=args.port)
        return 0

    raise AssertionError(f"unhandled command {args.command!r}")


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return _run(args)
    except SeriesError as exc:
        sys.stderr.write(render_json({"error": {
            "type": "SeriesError", "message": str(exc),
            "terms_used": exc.terms_used, "p": exc.p, "phi": exc.phi,
        }}) + "\n")
        return DOMAIN_ERROR
    except DataFormatError as exc:
        payload = {"type": "DataFormatError", "message": str(exc)}
        if exc.line_number is not None:
            payload["line_number"] = exc.line_number
        sys.stderr.write(render_json({"error": payload}) + "\n")
        return DOMAIN_ERROR
    except DomainError as exc:
        sys.stderr.write(render_json({"error": {
            "type": "DomainError", "message": str(exc)}}) + "\n")
        return DOMAIN_ERROR
    except OSError as exc:
        sys.stderr.write(render_json({"error": {
            "type": "IOError", "message": str(exc)}}) + "\n")
        return USAGE_ERROR


if __name__ == "__main__":
    sys.exit(main())
