"""Command-line front end.

Exit codes: 0 decided verdict, 3 undecided, 1 input error, 2 numerical failure.
"""

from __future__ import annotations

import argparse
import csv
import io
import math
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import replace

from .classify import (EXPOSED, EXTREME_NOT_EXPOSED, NOT_EXTREME, UNDECIDED, ClassifyConfig,
                       classify, dumps, report_json, zero_report)
from . import gauss as G
from . import secant as S
from . import witness as W
from .errors import InputError, NumericalError, SchemaError
from .model import GAUSS, FunctionSpec, finite_spec, parse_spec
from .zeros import OUTSIDE

EXIT_OK = 0
EXIT_INPUT = 1
EXIT_NUMERIC = 2
EXIT_UNDECIDED = 3

MAX_RESOLUTION = 512


# -- helpers ---------------------------------------------------------------------

def _read_spec(path: str, force_normalize: bool) -> FunctionSpec:
    try:
        text = sys.stdin.read() if path == "-" else open(path, encoding="utf-8").read()
    except OSError as exc:
        raise SchemaError(f"cannot read {path}: {exc}") from exc
    spec = parse_spec(text)
    if force_normalize:
        spec = replace(spec, normalize=True)
    return spec


def _config(args) -> ClassifyConfig:
    return ClassifyConfig(tol_quad=args.tol_quad, tol_root=args.tol_root,
                            tol_pair=args.tol_pair, tol_strip=args.tol_strip)


def _emit(text: str, out: str | None) -> None:
    if out:
        with open(out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _csv(header, rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for r in rows:
        w.writerow([format(v, ".17g") if isinstance(v, float) else v for v in r])
    return buf.getvalue()


def _svg(width: int, height: int, body: list[str]) -> str:
    head = (f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" '
            f'viewBox="0 0 {width} {height}">')
    return "\n".join([head, *body, "</svg>", ""])


# -- subcommands --------------------------------------------------------------------

def cmd_classify(args) -> int:
    spec = _read_spec(args.input, args.normalize)
    if args.format not in ("json",):
        raise InputError("classify supports --format json only")
    report = classify(spec, _config(args))
    _emit(report_json(report) + "\n", args.out)
    return EXIT_UNDECIDED if report.overall == UNDECIDED else EXIT_OK


def cmd_zeros(args) -> int:
    spec = _read_spec(args.input, args.normalize)
    cfg = _config(args)
    zr = zero_report(spec, cfg)
    kept = [z for z in zr.zeros if z.location != OUTSIDE]
    row_of = {id(z): i for i, z in enumerate(kept)}
    rows = []
    for z in kept:
        partner = ""
        if z.partner is not None:
            p = zr.zeros[z.partner]
            partner = row_of.get(id(p), "")
        rows.append((z.lam.real, z.lam.imag, z.multiplicity, z.w.real, z.w.imag, partner, z.location))
    if args.format == "csv":
        text = _csv(["re_lambda", "im_lambda", "multiplicity", "w_re", "w_im", "paired_with_row"],
                    [r[:6] for r in rows])
    elif args.format == "svg":
        text = _zeros_svg(spec, rows)
    else:
        text = dumps({
            "certified_annulus": list(zr.annulus),
            "complete": zr.complete,
            "zeros": [
                {"re_lambda": r[0], "im_lambda": r[1], "multiplicity": r[2], "w_re": r[3],
                 "w_im": r[4], "paired_with_row": r[5] if r[5] != "" else None, "location": r[6]}
                for r in rows
            ],
        }) + "\n"
    _emit(text, args.out)
    return EXIT_OK


def _zeros_svg(spec: FunctionSpec, rows) -> str:
    a = spec.a
    h = math.pi / a
    xs = [r[0] for r in rows] or [0.0]
    x0, x1 = min(xs) - 1.0, max(xs) + 1.0
    W_, H_ = 480, 240

    def px(x, y):
        return 20 + (x - x0) / (x1 - x0) * (W_ - 40), H_ - 20 - y / h * (H_ - 40)

    body = [f'<rect x="20" y="20" width="{W_ - 40}" height="{H_ - 40}" fill="#f4f4f4" stroke="#888"/>']
    _, ymid = px(x0, h / 2)
    body.append(f'<line x1="20" y1="{ymid:.2f}" x2="{W_ - 20}" y2="{ymid:.2f}" stroke="#bbb" '
                'stroke-dasharray="4 3"/>')
    for r in rows:
        cx, cy = px(r[0], r[1])
        color = "#c0392b" if r[5] != "" else "#2c3e50"
        body.append(f'<circle cx="{cx:.2f}" cy="{cy:.2f}" r="{3 + r[2]}" fill="{color}"/>')
    return _svg(W_, H_, body)


def _norm_payload(spec: FunctionSpec, tol: float) -> dict:
    res = W.l1_norm(spec, tol)
    out = {"l1": res.value, "error_bound": res.error_bound}
    for side, key in ((1, "weighted_plus"), (-1, "weighted_minus")):
        try:
            wres = W.l1_norm(spec, tol, side)
            out[key] = wres.value
            out[key + "_error_bound"] = wres.error_bound
        except NumericalError:
            out[key] = "divergent"
    return out


def cmd_norm(args) -> int:
    spec = _read_spec(args.input, args.normalize)
    if args.format != "json":
        raise InputError("norm supports --format json only")
    _emit(dumps(_norm_payload(spec, args.tol_quad)) + "\n", args.out)
    return EXIT_OK


def cmd_witness(args) -> int:
    spec = _read_spec(args.input, args.normalize)
    if args.format != "json":
        raise InputError("witness supports --format json only")
    report = classify(spec, _config(args))
    payload = {"overall": report.overall, "witnesses": [w.to_dict() for w in report.witnesses]}
    _emit(dumps(payload) + "\n", args.out)
    return EXIT_UNDECIDED if report.overall == UNDECIDED else EXIT_OK


def cmd_recover(args) -> int:
    """Recover coefficients from the synthesized function (round trip)."""
    spec = _read_spec(args.input, args.normalize)
    if spec.kind == GAUSS:
        fn = G.GaussFunction.from_spec(spec)
        lo, hi = int(fn.nodes.min()), int(fn.nodes.max())
        m = G.membership_v1_gauss(fn, spec.a, (lo - 2, hi + 2))
        coeffs = {float(n): c for n, c in m.coefficients.items()}
        resid = m.resynthesis_residual
    else:
        fn = S.SecantFunction.from_spec(spec, check_poles=False)
        m = S.membership_v1_secant(fn, S.spec_nodes(spec), spec.a)
        coeffs, resid = m.coefficients, m.resynthesis_residual
    rows = sorted(coeffs.items())
    if args.format == "csv":
        text = _csv(["node", "re", "im"], [(n, c.real, c.imag) for n, c in rows])
    elif args.format == "json":
        text = dumps({"resynthesis_residual": resid,
                        "coefficients": [{"node": n, "re": c.real, "im": c.imag} for n, c in rows]}) + "\n"
    else:
        raise InputError("recover supports --format json or csv")
    _emit(text, args.out)
    return EXIT_OK


# -- sigma sweep ---------------------------------------------------------------------

def sigma_spec(sigma: complex, a: float = 1.0) -> FunctionSpec:
    """f_sigma = G_a(x - 1) - sigma G_a(x + 1), normalized."""
    return finite_spec(GAUSS, a, {1: 1.0, -1: -complex(sigma)}, normalize=True)


def sigma_grid(re_range, im_range, nx: int, ny: int) -> list[complex]:
    """Grid points with exact zeros on the axes when they are hit."""
    def axis(lo, hi, n):
        if n == 1:
            return [lo]
        step = (hi - lo) / (n - 1)
        vals = [lo + k * step for k in range(n)]
        return [0.0 if abs(v) <= 1e-12 * max(1.0, abs(step)) else v for v in vals]

    return [complex(x, y) for y in axis(*im_range, ny) for x in axis(*re_range, nx)]


def sweep_cell(sigma: complex, a: float, config: ClassifyConfig) -> dict:
    try:
        r = classify(sigma_spec(sigma, a), config)
        verdict = r.overall
        witness_ok = all(w.passed for w in r.witnesses)
    except NumericalError as exc:
        verdict, witness_ok = "Error", False
        r = exc
    note = "single translate" if sigma == 0 else ""
    return {"sigma": sigma, "overall": verdict, "witnesses_verified": witness_ok, "note": note}


def run_sweep(re_range, im_range, nx, ny, a=1.0, config=ClassifyConfig(), jobs=1) -> list[dict]:
    if nx > MAX_RESOLUTION or ny > MAX_RESOLUTION or nx < 1 or ny < 1:
        raise InputError(f"resolution must be between 1 and {MAX_RESOLUTION} per axis")
    grid = sigma_grid(re_range, im_range, nx, ny)
    if jobs > 1:
        with ThreadPoolExecutor(max_workers=jobs) as ex:
            return list(ex.map(lambda s: sweep_cell(s, a, config), grid))
    return [sweep_cell(s, a, config) for s in grid]


_COLORS = {NOT_EXTREME: "#c0392b", EXTREME_NOT_EXPOSED: "#2e86c1", EXPOSED: "#27ae60",
           UNDECIDED: "#f1c40f", "Error": "#000000"}


def _sweep_svg(cells, nx, ny) -> str:
    size = max(4, min(24, 480 // max(nx, ny)))
    body = []
    for k, c in enumerate(cells):
        i, j = k % nx, k // nx
        x, y = 10 + i * size, 10 + (ny - 1 - j) * size
        body.append(f'<rect x="{x}" y="{y}" width="{size}" height="{size}" '
                    f'fill="{_COLORS.get(c["overall"], "#999")}"><title>sigma={c["sigma"].real:g}'
                    f'{c["sigma"].imag:+g}i {c["overall"]}</title></rect>')
    return _svg(20 + nx * size, 20 + ny * size, body)


def cmd_example_sigma(args) -> int:
    cells = run_sweep((args.re_min, args.re_max), (args.im_min, args.im_max), args.nx, args.ny,
                      args.a, _config(args), args.jobs)
    if args.format == "csv":
        text = _csv(["re_sigma", "im_sigma", "overall", "witnesses_verified", "note"],
                    [(c["sigma"].real, c["sigma"].imag, c["overall"], c["witnesses_verified"], c["note"])
                     for c in cells])
    elif args.format == "svg":
        text = _sweep_svg(cells, args.nx, args.ny)
    else:
        text = dumps({"a": args.a, "cells": [
            {"sigma": c["sigma"], "overall": c["overall"], "witnesses_verified": c["witnesses_verified"],
             "note": c["note"]} for c in cells]}) + "\n"
    _emit(text, args.out)
    if any(c["overall"] == "Error" for c in cells):
        return EXIT_NUMERIC
    return EXIT_UNDECIDED if any(c["overall"] == UNDECIDED for c in cells) else EXIT_OK


# -- parser -------------------------------------------------------------------------------

def _positive(text: str) -> float:
    v = float(text)
    if not v > 0:
        raise argparse.ArgumentTypeError("tolerance must be positive")
    return v


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--out", help="write output to PATH instead of stdout")
    common.add_argument("--format", choices=("json", "csv", "svg"), default="json")
    common.add_argument("--tol-quad", type=_positive, default=1e-10)
    common.add_argument("--tol-root", type=_positive, default=1e-10)
    common.add_argument("--tol-pair", type=_positive, default=1e-6)
    common.add_argument("--tol-strip", type=_positive, default=1e-6)
    common.add_argument("--normalize", action="store_true", help="divide f by its L1 norm first")

    p = argparse.ArgumentParser(prog="sisext", description=(
        "Decide extreme and exposed points of the unit ball of Gaussian and "
        "hyperbolic-secant shift-invariant spaces."))
    sub = p.add_subparsers(dest="command", required=True)
    for name, fn, help_ in (
        ("classify", cmd_classify, "full condition battery and overall verdict"),
        ("zeros", cmd_zeros, "zeros of f in the fundamental strip"),
        ("norm", cmd_norm, "L1 norm and exponentially weighted norms"),
        ("witness", cmd_witness, "witness multipliers with verification data"),
        ("recover", cmd_recover, "recover coefficients from the synthesized function"),
    ):
        sp = sub.add_parser(name, parents=[common], help=help_)
        sp.add_argument("input", help='spec JSON path, or "-" for stdin')
        sp.set_defaults(func=fn)
    sp = sub.add_parser("example-sigma", parents=[common],
                        help="verdict sweep over f_sigma = G(x-1) - sigma G(x+1)")
    sp.add_argument("--re-min", type=float, default=-3.0)
    sp.add_argument("--re-max", type=float, default=3.0)
    sp.add_argument("--im-min", type=float, default=-3.0)
    sp.add_argument("--im-max", type=float, default=3.0)
    sp.add_argument("--nx", type=int, default=21)
    sp.add_argument("--ny", type=int, default=21)
    sp.add_argument("--a", type=_positive, default=1.0)
    sp.add_argument("--jobs", type=int, default=1, help="worker threads for the sweep")
    sp.set_defaults(func=cmd_example_sigma)
    return p


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.format == "svg" and args.command not in ("zeros", "example-sigma"):
        print("error: --format svg is only valid for zeros and example-sigma", file=sys.stderr)
        return EXIT_INPUT
    try:
        return args.func(args)
    except InputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except NumericalError as exc:
        print(f"numerical failure: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_NUMERIC


if __name__ == "__main__":
    sys.exit(main())
