"""Command-line front-end ``nullsim``.

Exit codes: 0 success (or similar), 1 not similar, 2 any error. Errors are
reported on stderr as one line ``ERROR <code>: <detail>``.
"""
from __future__ import annotations

import argparse
import json
import math
import sys
import warnings
from pathlib import Path

import numpy as np

from . import catalog
from .analysis import DEFAULT_NULL_TOL, analyze
from .errors import InvalidParamsError, NullSimError, ParseError
from .expressions import parse_expression
from .formats import (atomic_write, fmt, read_curve_csv, read_frame_json, read_signature_json,
                      write_curve_csv, write_profile_csv, write_signature_json)
from .matching import decide_similar
from .minkowski import REFERENCE_FRAME, NullRotation, PSimilarity
from .reconstruction import (DriftWarning, ShapeCurvatureSpec, compensating_z1, reconstruct_curve,
                             transport_frame)

EXIT_OK, EXIT_NOT_SIMILAR, EXIT_ERROR = 0, 1, 2
TRANSPORT_STEP = 1e-3


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise ParseError(f"usage: {message}")


def _floats(text: str, n: int, what: str) -> np.ndarray:
    try:
        vals = [float(v) for v in text.split(",")]
    except ValueError:
        raise ParseError(f"{what} must be {n} comma-separated numbers, got {text!r}") from None
    if len(vals) != n or not all(math.isfinite(v) for v in vals):
        raise ParseError(f"{what} must be {n} comma-separated finite numbers, got {text!r}")
    return np.array(vals)


def _curvature_source(text: str, which: str):
    """Expression, or a signature file providing ``kappa_tilde`` (z1) / ``tau_tilde`` (z2)."""
    path = Path(text)
    if path.suffix == ".json" or path.is_file():
        sig = read_signature_json(path)
        values = sig.kappa_tilde if which == "z1" else sig.tau_tilde
        s = np.asarray(sig.sigma)
        return (lambda x: np.interp(x, s, values)), (float(s[0]), float(s[-1])), sig
    return parse_expression(text), None, None


def cmd_analyze(args) -> int:
    curve = read_curve_csv(args.input)
    origin = 0
    if args.sigma_origin is not None:
        origin = int(np.argmin(np.abs(curve.t - args.sigma_origin)))
    profile, sig = analyze(curve, null_tol=args.eps, sigma0_at=origin)
    write_signature_json(args.out, sig)
    if args.profile_out:
        write_profile_csv(args.profile_out, profile, sig.sigma)
    print(f"samples {len(sig)} sigma {fmt(sig.sigma[0])} {fmt(sig.sigma[-1])}")
    return EXIT_OK


def cmd_reconstruct(args) -> int:
    z1, dom1, sig1 = _curvature_source(args.z1, "z1")
    z2, dom2, sig2 = _curvature_source(args.z2, "z2")
    lo, hi = sorted((args.sigma0, args.sigma_end))
    for dom in (dom1, dom2):
        if dom is not None:
            lo, hi = max(lo, dom[0]), min(hi, dom[1])
    if not lo < hi:
        lo, hi = sorted((args.sigma0, args.sigma_end))
    if sig1 is not None and sig1 is sig2:
        spec = ShapeCurvatureSpec.from_signature(sig1)
    else:
        spec = ShapeCurvatureSpec(z1, z2, (lo, hi))
    if args.exact_shape:
        spec = compensating_z1(spec)
    if args.frame == "n8":
        # the carried frame must meet the initial-frame tolerance whatever --step is
        K0 = transport_frame(spec.z1, REFERENCE_FRAME, 0.0, args.sigma0, min(args.step, TRANSPORT_STEP))
    else:
        K0 = read_frame_json(args.frame)
    x0 = _floats(args.x0, 4, "--x0") if args.x0 else np.zeros(4)
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always", DriftWarning)
        result = reconstruct_curve(spec, K0, x0, args.sigma0, args.sigma_end, args.step, tau0=args.tau0,
                                   reproject_every=args.reproject_every)
    for w in caught:
        print(f"WARNING DriftWarning: {w.message}", file=sys.stderr)
    write_curve_csv(args.out, result.sigma, result.curve)
    print(f"orthonormality_drift {fmt(result.orthonormality_drift)}")
    return EXIT_OK


def _generate_samples(args) -> tuple[np.ndarray, np.ndarray]:
    lo, hi = args.range
    if not (math.isfinite(lo) and math.isfinite(hi) and hi > lo):
        raise InvalidParamsError("--range needs LO < HI")
    if not args.step > 0:
        raise InvalidParamsError("--step must be positive")
    n = int(round((hi - lo) / args.step))
    t = np.linspace(lo, hi, n + 1)
    if args.kind == "helix":
        if args.tau is None:
            raise InvalidParamsError("helix needs --tau")
        return t, catalog.null_helix(args.kappa, args.tau, t)
    if args.kind == "example":
        return t, catalog.example_curve(t)
    params = catalog.CatalogParams(a=args.a, b=args.b, c=args.c)
    return t, catalog.self_similar_case(int(args.kind[-1]), params, t)


def cmd_generate(args) -> int:
    t, x = _generate_samples(args)
    write_curve_csv(args.out, t, x)
    return EXIT_OK


def cmd_match(args) -> int:
    a = read_curve_csv(args.input_a)
    b = read_curve_csv(args.input_b)
    verdict = decide_similar(a, b, tol=args.tol)
    mu = verdict.mu
    text = ('{"similar": ' + ("true" if verdict.similar else "false")
            + ', "sigma_shift": ' + fmt(verdict.sigma_shift)
            + ', "residual": ' + fmt(verdict.residual)
            + ', "mu": ' + ("null" if mu is None else fmt(mu)) + "}")
    print(text)
    if args.json_out:
        payload = json.loads(text)
        payload["diagnostics"] = {k: v for k, v in verdict.diagnostics.items()}
        if verdict.recovered is not None:
            payload["linear"] = verdict.recovered.linear.tolist()
            payload["translation"] = verdict.recovered.translation.tolist()
        atomic_write(args.json_out, json.dumps(payload, indent=2) + "\n")
    return EXIT_OK if verdict.similar else EXIT_NOT_SIMILAR


def cmd_transform(args) -> int:
    if not args.mu > 0:
        raise InvalidParamsError(f"--mu must be positive for curves, got {args.mu}")
    b = _floats(args.b, 4, "--b") if args.b else np.zeros(4)
    f = PSimilarity(args.mu, NullRotation(args.lam, args.epsilon, args.zeta, args.theta), b)
    curve = read_curve_csv(args.input)
    write_curve_csv(args.out, curve.t, f.apply(curve.x))
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="nullsim", description="Null Cartan curves under p-similarities.")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    a = sub.add_parser("analyze", help="Cartan curvatures and shape signature of a curve file")
    a.add_argument("input")
    a.add_argument("--eps", type=float, default=DEFAULT_NULL_TOL, help="relative nullity tolerance")
    a.add_argument("--sigma-origin", type=float, default=None,
                   help="parameter t whose nearest sample gets sigma = 0 (default: first sample)")
    a.add_argument("--out", required=True, help="signature JSON")
    a.add_argument("--profile-out", help="CSV with columns s,sigma,kappa,tau_mag")
    a.set_defaults(func=cmd_analyze)

    r = sub.add_parser("reconstruct", help="curve from shape curvatures")
    r.add_argument("--z1", required=True, help="expression in x, or signature JSON (uses kappa_tilde)")
    r.add_argument("--z2", required=True, help="expression in x, or signature JSON (uses tau_tilde)")
    r.add_argument("--frame", default="n8",
                   help='"n8" (reference frame at sigma=0, carried to --sigma0) or a JSON 4x4 frame at --sigma0')
    r.add_argument("--x0", help="initial point bx0,bx1,bx2,bx3 (default origin)")
    r.add_argument("--sigma0", type=float, default=0.0)
    r.add_argument("--sigma-end", type=float, required=True)
    r.add_argument("--step", type=float, default=1e-3)
    r.add_argument("--tau0", type=float, default=1.0, help="Cartan torsion at sigma0")
    r.add_argument("--reproject-every", type=int, default=None)
    r.add_argument("--exact-shape", action="store_true",
                   help="compensate z1 so that the output has shape curvatures exactly (z1, z2)")
    r.add_argument("--out", required=True)
    r.set_defaults(func=cmd_reconstruct)

    g = sub.add_parser("generate", help="sample a catalog curve")
    g.add_argument("--kind", required=True, choices=["helix", "case1", "case2", "case3", "case4", "example"])
    g.add_argument("--kappa", type=float, default=0.0)
    g.add_argument("--tau", type=float, default=None)
    g.add_argument("--a", type=float, default=0.0)
    g.add_argument("--b", type=float, default=0.0)
    g.add_argument("--c", type=float, default=1.0)
    g.add_argument("--range", type=float, nargs=2, default=[0.0, 2.0], metavar=("LO", "HI"))
    g.add_argument("--step", type=float, default=1e-3)
    g.add_argument("--out", required=True)
    g.set_defaults(func=cmd_generate)

    m = sub.add_parser("match", help="decide p-similarity of two curve files")
    m.add_argument("input_a")
    m.add_argument("input_b")
    m.add_argument("--tol", type=float, default=None)
    m.add_argument("--json-out")
    m.set_defaults(func=cmd_match)

    t = sub.add_parser("transform", help="apply a p-similarity to a curve file")
    t.add_argument("input")
    t.add_argument("--mu", type=float, default=1.0)
    t.add_argument("--lambda", dest="lam", type=float, default=1.0)
    t.add_argument("--epsilon", type=float, default=0.0)
    t.add_argument("--zeta", type=float, default=0.0)
    t.add_argument("--theta", type=float, default=0.0)
    t.add_argument("--b", help="translation bx0,bx1,bx2,bx3")
    t.add_argument("--out", required=True)
    t.set_defaults(func=cmd_transform)
    return p


def main(argv=None) -> int:
    try:
        args = build_parser().parse_args(argv)
        return args.func(args)
    except NullSimError as exc:
        print(f"ERROR {exc.code}: {exc}", file=sys.stderr)
    except OSError as exc:
        print(f"ERROR IOError: {exc}", file=sys.stderr)
    except (ValueError, ArithmeticError) as exc:
        print(f"ERROR InvalidInput: {exc}", file=sys.stderr)
    return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
