"""Command line front end. Every subcommand prints one JSON document on stdout.

Exit codes: 0 success, 2 mismatch against the in-repo golden data (or a failed
cross-check in verify-example), 1 usage or runtime error.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from fractions import Fraction

import mpmath

from . import golden
from .cache import CACHE_ENV
from .classical import delta_and_j, eisenstein, jacobi_thetas, weak_jacobi_components, weakly_holo_gk
from .cubic import PiBasis, factor_in_pibasis
from .factor import PrincipalPart, formula_report, primes_up_to
from .heegner import evaluate_at_cm, hauptmodul_j23
from .petersson import TruncatedDomain, regularized_petersson
from .pipeline import (
    Config,
    ConfigError,
    Context,
    borcherds_exponents,
    check_b_table,
    check_f_table,
    check_heegner,
    check_j23,
    check_tln,
    check_weak_jacobi,
    formula_vs_borcherds,
    green_pipeline,
    numeric_check,
    scrub,
)
from .quadclass import class_group, rep_table
from .vvforms import VectorForm, theta_series

EXIT_OK, EXIT_ERROR, EXIT_MISMATCH = 0, 1, 2


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog}: {message}")


def _emit(obj) -> None:
    sys.stdout.write(json.dumps(scrub(obj), sort_keys=True, indent=1, default=str) + "\n")


def _config(args) -> Config:
    return Config(
        terms=getattr(args, "prec", None) or 300,
        bits=getattr(args, "bits", 192),
        tol=getattr(args, "tol", 1e-8),
        D=getattr(args, "disc", 23),
        class_label=getattr(args, "cls", "O"),
        cache_dir=args.cache_dir,
        use_cache=not args.no_cache,
        workers=args.workers,
    ).validate()


# ---------------------------------------------------------------------------
# subcommands
# ---------------------------------------------------------------------------


def cmd_classgroup(args):
    G = class_group(args.disc)
    labels = [A.label for A in G.classes]
    table = {a.label: {b.label: G.compose(a, b).label for b in G.classes} for a in G.classes}
    return EXIT_OK, {"D": G.D, "h": G.h, "classes": labels, "identity": G.identity.label,
                     "inverses": {A.label: G.inverse(A).label for A in G.classes}, "composition": table}


def cmd_repcount(args):
    G = class_group(args.disc)
    B = G.get(args.cls)
    r = rep_table(G, B, args.upto + 1)
    return EXIT_OK, {"D": G.D, "B": B.label, "r": {t: r[t] for t in range(1, args.upto + 1)}}


def cmd_theta(args):
    cfg = Config(terms=max(args.prec, 50), D=args.disc, cache_dir=args.cache_dir, use_cache=not args.no_cache)
    ctx = Context(cfg)
    B = ctx.G.get(args.cls)
    th = ctx.cache.get_or_compute("theta_series", {"D": args.disc, "B": B.label, "P": args.prec},
                                  lambda: theta_series(ctx.G, B, args.prec), VectorForm.to_json,
                                  VectorForm.from_json)
    return EXIT_OK, th.to_json()


def _named_series(name: str, P: int):
    if name in ("E4", "E6"):
        return eisenstein(int(name[1]), P).series
    if name in ("Delta", "Deltainv", "j"):
        d, dinv, j = delta_and_j(P)
        return {"Delta": d, "Deltainv": dinv, "j": j}[name].series
    if name in ("theta0", "theta1"):
        return jacobi_thetas(P)[int(name[-1])].series
    if name in ("psi0", "psi1", "phi0", "phi1"):
        idx = ["psi0", "psi1", "phi0", "phi1"].index(name)
        return weak_jacobi_components(P)[idx].series
    if name == "j23":
        return hauptmodul_j23(P).series
    if name.startswith("g") and name[1:].isdigit():
        return weakly_holo_gk(int(name[1:]), P).series
    raise UsageError(f"unknown series name {name!r}")


def cmd_series(args):
    s = _named_series(args.name, args.prec)
    return EXIT_OK, {"name": args.name, "P": args.prec, "series": s.to_json()}


def cmd_seesaw_h(args):
    ctx = Context(_config(args))
    res = check_b_table(ctx)
    out = {"D": args.disc, "P": ctx.config.terms, "ok": res["ok"], "scale": res["scale"],
           "corrections": res["corrections"], "j_powers": res["j_powers"], "mismatches": res["mismatches"],
           "extra": res["extra"], "b_at_23s2": res["b_at_23s2"], "cache": {"hits": ctx.cache.hits, "misses": ctx.cache.misses}}
    if args.dump_table:
        out["b_table"] = res["_pre"].b_table(res["scale"])
    return (EXIT_OK if res["ok"] else EXIT_MISMATCH), out


def cmd_heegner_poly(args):
    ctx = Context(_config(args))
    H = ctx.heegner(args.d)
    out = {"d": args.d, "degree": H.degree, "coeffs": H.coeffs, "poly": str(H), "rounding_residual": H.residual}
    v = evaluate_at_cm(H)
    out["value_at_cm"] = [v.x, v.y, v.z]
    code = EXIT_OK
    if v.is_zero():
        out["factorization"] = "zero"
    else:
        fac = factor_in_pibasis(v)
        out["factorization"] = {"basis": fac.exponents, "rho": fac.unit_exponent, "sign": fac.sign}
    table = golden.heegner_table()
    if args.d in table:
        coeffs, ex, unit = table[args.d]
        agree = H.coeffs == coeffs and (v.is_zero() or (fac.exponents == ex and fac.unit_exponent == unit))
        out["golden_match"] = agree
        code = EXIT_OK if agree else EXIT_MISMATCH
    return code, out


def cmd_borcherds_eval(args):
    ctx = Context(_config(args))
    b = check_b_table(ctx)
    res = borcherds_exponents(ctx, b["_pre"])
    out = res["_report"].to_json()
    out["matches_golden"] = res["ok"]
    out["unit_note"] = res["note"]
    return (EXIT_OK if res["ok"] and b["ok"] else EXIT_MISMATCH), out


def cmd_petersson(args):
    ctx = Context(_config(args))
    if ctx.config.D != 23:
        raise UsageError("petersson is wired to the D = 23 example form")
    P = 60
    f = ctx.example_f(P)
    th = theta_series(ctx.G, ctx.G.get(args.cls), P)
    res = regularized_petersson(f, th, args.tol, TruncatedDomain(T=args.T), prec_bits=ctx.config.petersson_bits)
    out = res.to_json()
    if ctx.G.get(args.cls) == ctx.G.identity:
        b = check_b_table(ctx)
        alpha = borcherds_exponents(ctx, b["_pre"])["_alpha"]
        with mpmath.workprec(ctx.config.petersson_bits):
            la = alpha.log_abs(PiBasis.default(), ctx.config.petersson_bits)
            out["log_alpha_from_factorization"] = mpmath.nstr(la, 30)
            out["difference"] = mpmath.nstr(res.value - la, 10)
            out["ratio"] = mpmath.nstr(res.value / la, 20)
    return EXIT_OK, out


def cmd_factor(args):
    ctx = Context(_config(args))
    G = ctx.G
    f = ctx.example_f(ctx.config.terms)
    pp = PrincipalPart.from_form(f)
    primes = [args.prime] if args.prime else primes_up_to(23)
    rep = formula_report(pp, G, G.get(args.cls), primes, with_ramified=args.with_ramified)
    return EXIT_OK, rep.to_json()


def cmd_green(args):
    ctx = Context(_config(args))
    if args.k == 6:
        raise UsageError("k = 6 needs S_12 = 0, which fails; use k in 2, 3, 4, 5, 7")
    return EXIT_OK, green_pipeline(ctx, args.k)


def run_verify(ctx: Context, numeric: bool = True) -> dict:
    out = {}
    out["f_table"] = check_f_table(ctx)
    out["weak_jacobi"] = check_weak_jacobi(ctx.config.terms)
    b = check_b_table(ctx, min(ctx.config.terms, 300))
    out["h_table"] = b
    out["tln"] = check_tln(ctx, b["_pre"], min(ctx.config.terms, 200))
    out["j23"] = check_j23()
    out["heegner"] = check_heegner(ctx)
    bx = borcherds_exponents(ctx, b["_pre"])
    out["borcherds"] = bx
    out["reconcile"] = formula_vs_borcherds(ctx, ctx.example_f(ctx.config.terms), bx["_report"])
    if numeric:
        out["numeric"] = numeric_check(ctx, bx["_alpha"])
    out["exponent_vector"] = {"basis": bx["exponents"], "rho": bx["unit_exponent"]}
    out["failed"] = sorted(k for k, v in out.items() if isinstance(v, dict) and v.get("ok") is False)
    return out


def cmd_verify_example(args):
    ctx = Context(_config(args))
    out = run_verify(ctx, numeric=not args.skip_numeric)
    for k in ("f_table", "h_table", "heegner"):
        out[k].pop("rows", None)
    return (EXIT_OK if not out["failed"] else EXIT_MISMATCH), out


# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("--cache-dir", default=None, help=f"cache directory (default ${CACHE_ENV} or ~/.cache/cmfactor)")
    common.add_argument("--no-cache", action="store_true")
    common.add_argument("--workers", type=int, default=1, help="process pool size for Heegner polynomials")
    common.add_argument("--json", action="store_true", help="accepted for compatibility; JSON is the only output mode")
    common.add_argument("-v", "--verbose", action="store_true")

    p = _Parser(prog="cmfactor", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def add(name, fn, help_):
        sp = sub.add_parser(name, parents=[common], help=help_)
        sp.set_defaults(fn=fn)
        return sp

    sp = add("classgroup", cmd_classgroup, "classes and composition table")
    sp.add_argument("--disc", type=int, required=True)

    sp = add("repcount", cmd_repcount, "r_B(t) for t = 1..T")
    sp.add_argument("--disc", type=int, required=True)
    sp.add_argument("--class", dest="cls", required=True)
    sp.add_argument("--upto", type=int, required=True)

    sp = add("theta", cmd_theta, "theta series components")
    sp.add_argument("--disc", type=int, required=True)
    sp.add_argument("--class", dest="cls", required=True)
    sp.add_argument("--prec", type=int, required=True)

    sp = add("series", cmd_series, "named scalar q-series")
    sp.add_argument("--name", required=True)
    sp.add_argument("--prec", type=int, required=True)

    sp = add("seesaw-h", cmd_seesaw_h, "preimage h and its b(-d) table")
    sp.add_argument("--disc", type=int, default=23)
    sp.add_argument("--prec", type=int, default=300)
    sp.add_argument("--dump-table", action="store_true")

    sp = add("heegner-poly", cmd_heegner_poly, "H_d and the factorization of its CM value")
    sp.add_argument("--disc", type=int, default=23)
    sp.add_argument("-d", type=int, required=True)
    sp.add_argument("--bits", type=int, default=192)

    sp = add("borcherds-eval", cmd_borcherds_eval, "Borcherds product at the CM point")
    sp.add_argument("--disc", type=int, default=23)
    sp.add_argument("--prec", type=int, default=300)
    sp.add_argument("--bits", type=int, default=192)

    sp = add("petersson", cmd_petersson, "numerical regularized Petersson product")
    sp.add_argument("--disc", type=int, default=23)
    sp.add_argument("--class", dest="cls", default="O")
    sp.add_argument("--tol", type=float, default=1e-8)
    sp.add_argument("--T", type=float, default=20.0)

    sp = add("factor", cmd_factor, "closed-form valuations")
    sp.add_argument("--disc", type=int, default=23)
    sp.add_argument("--class", dest="cls", default="O")
    sp.add_argument("--prime", type=int, default=None)
    sp.add_argument("--with-ramified", action="store_true")
    sp.add_argument("--prec", type=int, default=300)

    sp = add("green", cmd_green, "Green function value for f_k")
    sp.add_argument("-k", type=int, required=True, choices=range(2, 8), metavar="K")
    sp.add_argument("--tol", type=float, default=1e-8)

    sp = add("verify-example", cmd_verify_example, "full D = 23 pipeline with reconciliation")
    sp.add_argument("--prec", type=int, default=300)
    sp.add_argument("--tol", type=float, default=1e-8)
    sp.add_argument("--skip-numeric", action="store_true", help="skip the numerical integral")
    return p


def run_command(argv) -> int:
    try:
        args = build_parser().parse_args(argv)
    except UsageError as exc:
        sys.stderr.write(f"{exc}\n")
        return EXIT_ERROR
    except SystemExit as exc:  # --help
        return EXIT_OK if exc.code in (0, None) else EXIT_ERROR
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, stream=sys.stderr)
    try:
        code, out = args.fn(args)
    except (UsageError, ConfigError) as exc:
        sys.stderr.write(f"error: {exc}\n")
        return EXIT_ERROR
    except Exception as exc:  # noqa: BLE001
        logging.getLogger("cmfactor").debug("failure", exc_info=True)
        sys.stderr.write(f"error: {type(exc).__name__}: {exc}\n")
        return EXIT_ERROR
    _emit(out)
    return code


def main() -> None:
    sys.exit(run_command(sys.argv[1:]))


if __name__ == "__main__":
    main()
