"""Command-line front end: ``ising-exact <subcommand> ...``.

Output goes to stdout as JSON (default) or CSV.  Usage errors exit with 2,
computation errors exit with 1 and a JSON error object on stderr.  Every JSON
document carries ``"schema": "ising-exact/1"`` and every real number carries
the precision it was computed at.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from dataclasses import dataclass
from fractions import Fraction

from .errors import IsingExactError, ParameterError
from .numerics import DEFAULT_PREC, MIN_PREC, PrecReal, ctx
from .series import SCHEMA, RationalSeries

__all__ = ["RunConfig", "main", "build_parser"]


@dataclass(frozen=True)
class RunConfig:
    precision_bits: int = DEFAULT_PREC
    series_order: int = 20
    quadrature_target: float = 1e-12
    n_max: int = 6
    N_max: int = 64
    output_format: str = "json"

    def __post_init__(self):
        if self.precision_bits < MIN_PREC:
            raise ParameterError(f"precision must be at least {MIN_PREC} bits")
        if self.series_order < 1:
            raise ParameterError("series order must be positive")
        if not 0 < self.quadrature_target < 1:
            raise ParameterError("quadrature target must lie in (0,1)")
        if self.n_max < 1 or self.N_max < 0:
            raise ParameterError("caps must be positive")
        if self.output_format not in ("json", "csv"):
            raise ParameterError("output format is json or csv")


def _real(x, prec):
    return PrecReal(ctx(prec).mpf(x), prec).to_json()


def _double(x):
    return {"value": repr(float(x)), "precision_bits": 53}


def _doc(kind, **body):
    out = {"schema": SCHEMA, "kind": kind}
    out.update(body)
    return out


def _csv(header, rows):
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    w.writerows(rows)
    return buf.getvalue()


# --- subcommands --------------------------------------------------------------

def cmd_correlate(args, cfg):
    from .params import CouplingPoint
    from .toeplitz import correlation_det, diagonal_symbol, row_symbol

    prec = cfg.precision_bits
    if args.kind == "diag":
        if args.t is None:
            raise ParameterError("--t is required for the diagonal correlation")
        sym = diagonal_symbol(args.t, args.side, prec)
        where = {"t": args.t, "side": args.side}
    else:
        if args.Kv is None or args.Kh is None:
            raise ParameterError("--Kv and --Kh are required for the row correlation")
        sym = row_symbol(CouplingPoint(args.Kv, args.Kh, prec))
        where = {"Kv": args.Kv, "Kh": args.Kh}
    val = correlation_det(sym, args.N, cap=cfg.N_max)
    if cfg.output_format == "csv":
        return _csv(["kind", "N", "value", "precision_bits"], [[args.kind, args.N, _real(val, prec)["value"], prec]])
    return _doc("correlation", correlation=args.kind, N=args.N, point=where, value=_real(val, prec))


def cmd_formfactor(args, cfg):
    from .formfactor import formfactor_quad, formfactor_series

    if args.t is not None:
        val = formfactor_quad(args.n, args.N, float(args.t), rtol=cfg.quadrature_target)
        if cfg.output_format == "csv":
            return _csv(["n", "N", "t", "value", "precision_bits"], [[args.n, args.N, args.t, repr(val), 53]])
        return _doc("formfactor_value", n=args.n, N=args.N, t=args.t, value=_double(val))
    order = args.order if args.order is not None else cfg.series_order
    ff = formfactor_series(args.n, args.N, order)
    if cfg.output_format == "csv":
        s = ff.series
        return _csv(["exponent", "coefficient"], [[str(s.offset + k), str(v)] for k, v in enumerate(s.coeffs)])
    return ff.to_json()


def cmd_lambda(args, cfg):
    from .formfactor import lambda_correlation

    lam = Fraction(args.lam)
    order = args.order or cfg.series_order
    ser = lambda_correlation(args.N, args.side, lam, order)
    out = {"N": args.N, "lambda": str(lam), "side": args.side, "series": ser.to_json()}
    if args.t is not None:
        c = ctx(cfg.precision_bits)
        out["t"] = args.t
        out["value"] = _real(ser.evaluate(c.mpf(args.t), c), cfg.precision_bits)
        out["truncation_order"] = str(ser.order)
    return _doc("lambda_correlation", **out)


def cmd_pvi(args, cfg):
    from .painleve import first_nonzero, pvi_residual

    lam = None if args.lam is None else Fraction(args.lam)
    r = pvi_residual(args.N, args.side, args.order, lam=lam)
    fz = first_nonzero(r)
    return _doc("pvi_check", N=args.N, side=args.side, order=args.order,
                **{"lambda": "symbolic" if lam is None else str(lam)},
                residual_zero=r.is_zero(), first_nonzero=None if fz is None else str(fz[0]))


def cmd_piii(args, cfg):
    from .painleve import piii_defect, piii_solve, scaling_G

    lam = float(args.lam)
    r = float(args.r)
    sol = piii_solve(lam, theta_min=min(r / 2, 0.25), theta_max=max(10.0, r))
    if cfg.output_format == "csv":
        return sol.to_csv()
    return _doc("piii", **{"lambda": lam}, r=r,
                G_minus=_double(scaling_G(r, lam, "minus", sol)),
                G_plus=_double(scaling_G(r, lam, "plus", sol)),
                eta=_double(sol.eta(r / 2)),
                defect=_double(piii_defect(sol, max(0.5, sol.theta_min), 8.0)))


def cmd_chi(args, cfg):
    from .chi import chi_bulk_closed, chi_bulk_integral, chi_diag_closed, chi_diag_series
    from .params import CouplingPoint

    prec = cfg.precision_bits
    if args.kind == "bulk":
        if args.t is None:
            raise ParameterError("--t is required for bulk terms")
        cp = CouplingPoint.isotropic_from_t(args.t, args.side, prec)
        q = chi_bulk_integral(args.n, cp, rtol=cfg.quadrature_target)
        out = {"n": args.n, "t": args.t, "side": args.side, "integral": q.to_json()}
        if args.n <= 2:
            out["closed_form"] = chi_bulk_closed(args.n, args.t, prec).to_json()
        return _doc("chi_bulk", **out)
    if args.t is not None:
        val = chi_diag_closed(args.n, args.t, prec)
        return _doc("chi_diag_value", n=args.n, t=args.t, value=val.to_json())
    order = args.order or cfg.series_order
    ser = chi_diag_series(args.n, order)
    if cfg.output_format == "csv":
        return _csv(["exponent", "coefficient"], [[str(ser.offset + k), str(v)] for k, v in enumerate(ser.coeffs)])
    return ser.to_json()


def cmd_singularities(args, cfg):
    from .chi import diagonal_singularities, nickel_singularities

    if args.kind == "nickel":
        recs = nickel_singularities(args.n, new_only=not args.all, prec=cfg.precision_bits)
    else:
        recs = diagonal_singularities(args.n, cfg.precision_bits)
    rows = [r.to_json() for r in recs]
    if cfg.output_format == "csv":
        body = []
        for r in rows:
            loc = r["location"]
            re, im = (loc, "0.0") if isinstance(loc, str) else loc
            body.append([r["n"], r["variable"], re, im, r["exponent"], r["has_log"]])
        return _csv(["n", "variable", "re", "im", "exponent", "has_log"], body)
    return _doc("singularities", n=args.n, singularity_kind=args.kind, precision_bits=cfg.precision_bits,
                singularities=rows)


def cmd_amplitudes(args, cfg):
    from .chi import amplitude_constants, amplitude_ratio

    prec = cfg.precision_bits
    C = amplitude_constants(prec)
    c = ctx(prec)
    return _doc("amplitudes", constants={f"C{k + 1}": v.to_json() for k, v in enumerate(C)},
                ratio_two_terms=_real(amplitude_ratio(prec, 2), prec),
                ratio_four_terms=_real(amplitude_ratio(prec, 4), prec),
                twelve_pi=_real(12 * c.pi, prec))


def cmd_ode_fit(args, cfg):
    from .odehunt import DEFAULT_PRIME, SeriesModP, fit_ode, lift_ode

    with open(args.input) as fh:
        ser = RationalSeries.from_json(json.load(fh))
    if args.lift:
        return lift_ode(ser, args.max_order, args.max_degree).to_json()
    p = args.prime or DEFAULT_PRIME
    return fit_ode(SeriesModP.from_rational(ser, p), args.max_order, args.max_degree).to_json()


def cmd_acceptance(args, cfg):
    from .acceptance import run_all

    results = run_all(args.only, jobs=args.jobs)
    for r in results:
        # timings vary between runs, so they go to stderr only
        print(json.dumps({"criterion": r.number, "seconds": round(r.seconds, 2)}), file=sys.stderr)
    passed = all(r.passed for r in results)
    if cfg.output_format == "csv":
        text = _csv(["criterion", "title", "passed"], [[r.number, r.title, r.passed] for r in results])
    else:
        doc = _doc("acceptance", passed=passed,
                   criteria=[{k: v for k, v in r.to_json().items() if k != "seconds"} for r in results])
        text = doc
    return text, 0 if passed else 1


# --- parser -----------------------------------------------------------------------

def build_parser():
    p = argparse.ArgumentParser(prog="ising-exact", description="Exact 2D Ising correlations and susceptibility.")
    p.add_argument("--prec", type=int, default=DEFAULT_PREC, help="working precision in bits")
    p.add_argument("--order", dest="global_order", type=int, default=20, help="default series order")
    p.add_argument("--quad-rtol", type=float, default=1e-12)
    p.add_argument("--output-format", choices=("json", "csv"), default="json")
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("correlate", help="Toeplitz determinant correlations")
    s.add_argument("--kind", choices=("diag", "row"), default="diag")
    s.add_argument("--N", type=int, required=True)
    s.add_argument("--t", type=str)
    s.add_argument("--side", choices=("below", "above", "at"), default="below")
    s.add_argument("--Kv", type=str)
    s.add_argument("--Kh", type=str)
    s.set_defaults(func=cmd_correlate)

    s = sub.add_parser("formfactor", help="form-factor series or value")
    s.add_argument("--n", type=int, required=True)
    s.add_argument("--N", type=int, required=True)
    g = s.add_mutually_exclusive_group()
    g.add_argument("--order", type=int)
    g.add_argument("--t", type=str)
    s.set_defaults(func=cmd_formfactor)

    s = sub.add_parser("lambda", help="lambda-extended diagonal correlation")
    s.add_argument("--N", type=int, required=True)
    s.add_argument("--lambda", dest="lam", type=str, required=True, help="exact rational, e.g. 1/2")
    s.add_argument("--t", type=str)
    s.add_argument("--side", choices=("below", "above"), default="below")
    s.add_argument("--order", type=int)
    s.set_defaults(func=cmd_lambda)

    s = sub.add_parser("pvi-check", help="exact PVI residual of the diagonal correlation")
    s.add_argument("--N", type=int, required=True)
    s.add_argument("--side", choices=("below", "above"), required=True)
    s.add_argument("--order", type=int, default=16)
    s.add_argument("--lambda", dest="lam", type=str, help="rational lambda; symbolic if omitted")
    s.set_defaults(func=cmd_pvi)

    s = sub.add_parser("piii", help="PIII scaling functions")
    s.add_argument("--lambda", dest="lam", type=str, default="1")
    s.add_argument("--r", type=str, required=True)
    s.set_defaults(func=cmd_piii)

    s = sub.add_parser("chi", help="susceptibility terms")
    s.add_argument("--kind", choices=("bulk", "diag"), required=True)
    s.add_argument("--n", type=int, required=True)
    g = s.add_mutually_exclusive_group()
    g.add_argument("--t", type=str)
    g.add_argument("--order", type=int)
    s.add_argument("--side", choices=("below", "above"), default="above")
    s.set_defaults(func=cmd_chi)

    s = sub.add_parser("singularities", help="singularity locations")
    s.add_argument("--n", type=int, required=True)
    s.add_argument("--kind", choices=("nickel", "diag"), default="nickel")
    s.add_argument("--all", action="store_true", help="include points inherited from smaller n")
    s.set_defaults(func=cmd_singularities)

    s = sub.add_parser("amplitudes", help="critical amplitude constants")
    s.set_defaults(func=cmd_amplitudes)

    s = sub.add_parser("ode-fit", help="fit a linear ODE to a series JSON file")
    s.add_argument("--input", required=True)
    s.add_argument("--max-order", type=int, required=True)
    s.add_argument("--max-degree", type=int, required=True)
    s.add_argument("--prime", type=int)
    s.add_argument("--lift", action="store_true", help="reconstruct rational coefficients")
    s.set_defaults(func=cmd_ode_fit)

    s = sub.add_parser("acceptance", help="run the acceptance suite")
    s.add_argument("--only", type=int, nargs="*", help="criterion numbers (default: all)")
    s.add_argument("--jobs", type=int, default=1)
    s.set_defaults(func=cmd_acceptance)
    return p


def _emit(out):
    if isinstance(out, str):
        sys.stdout.write(out if out.endswith("\n") else out + "\n")
    else:
        sys.stdout.write(json.dumps(out, indent=2) + "\n")


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)  # exits with 2 on usage errors
    try:
        cfg = RunConfig(precision_bits=args.prec, series_order=args.global_order,
                        quadrature_target=args.quad_rtol, output_format=args.output_format)
    except ParameterError as exc:
        parser.exit(2, f"ising-exact: error: {exc}\n")
    try:
        out = args.func(args, cfg)
    except IsingExactError as exc:
        print(json.dumps({"schema": SCHEMA, **exc.to_json()}), file=sys.stderr)
        return 1
    except (ValueError, ZeroDivisionError, OverflowError) as exc:
        print(json.dumps({"schema": SCHEMA, "error": "computation", "message": str(exc)}), file=sys.stderr)
        return 1
    except OSError as exc:
        print(json.dumps({"schema": SCHEMA, "error": "io", "message": str(exc)}), file=sys.stderr)
        return 1
    code = 0
    if isinstance(out, tuple):
        out, code = out
    _emit(out)
    return code


if __name__ == "__main__":
    sys.exit(main())
