"""Command-line entry point: ``esrel [global options] VERB [options]``.

Exit codes: 0 when every requested check passes, 1 on a failed check, 2 for a
usage error (unknown verb included), 3 when a numerical quantity is unstable.
"""

from __future__ import annotations

import argparse
import csv
import json
import os
import sys
from dataclasses import asdict, dataclass
from fractions import Fraction

import mpmath

from . import cmtrace, lfunc, poincare, relations, weilrep
from .quadforms import class_count, hurwitz_H

EXIT_OK, EXIT_FAIL, EXIT_USAGE, EXIT_UNSTABLE = 0, 1, 2, 3


@dataclass(frozen=True)
class RunConfig:
    qprec: int = 50
    float_bits: int = 192
    kloosterman_cutoff: int = 1000
    direct_sum_N: int = 10**6
    trace_cache_path: str | None = None
    output: str = "json"

    def __post_init__(self):
        if self.qprec < 16:
            raise ValueError("qprec must be at least 16")
        if self.float_bits < 64:
            raise ValueError("float_bits must be at least 64")
        if self.kloosterman_cutoff < 1 or self.direct_sum_N < 1:
            raise ValueError("cutoffs must be positive")
        if self.output not in ("json", "csv", "text"):
            raise ValueError("output must be json, csv or text")


def _num(x) -> str | int | float:
    if isinstance(x, Fraction):
        return int(x) if x.denominator == 1 else str(x)
    if isinstance(x, (mpmath.mpf, mpmath.mpc)):
        return mpmath.nstr(x, 30)
    return x


def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    return _num(obj)


def _emit(cfg: RunConfig, payload: dict, out) -> None:
    payload = {"config": asdict(cfg), **payload}
    if cfg.output == "json":
        out.write(json.dumps(_jsonable(payload), sort_keys=True, indent=2) + "\n")
        return
    rows = payload.get("rows")
    if cfg.output == "csv" and rows:
        w = csv.writer(out, lineterminator="\n")
        w.writerow(rows[0].keys())
        for row in rows:
            w.writerow([_num(v) for v in row.values()])
        return
    for key in sorted(payload):
        if key != "config":
            out.write(f"{key}: {_jsonable(payload[key])}\n")


# -- verbs ----------------------------------------------------------------------------


def _cmd_trace(cfg, a):
    rec = cmtrace.trace_tm(a.m, a.d, bits=cfg.float_bits if a.bits else None)
    return {"verb": "trace", "m": rec.m, "d": rec.d, "t": rec.value, "err": rec.err, "bits": rec.bits}, True


def _cmd_classnum(cfg, a):
    rows = []
    for d in range(a.dmin, a.dmax + 1):
        if d % 4 in (0, 3):
            rows.append({"d": d, "h": class_count(d), "H": hurwitz_H(d)})
    return {"verb": "classnum", "rows": rows}, True


def _cmd_gseries(cfg, a):
    g = relations.g_series(a.m, a.nu, a.nmax).series
    return {"verb": "gseries", "m": a.m, "nu": a.nu, "series": g.to_dict()}, True


def _cmd_kloosterman(cfg, a):
    if a.k in ("0", "int"):
        val = weilrep.kloosterman_int(a.m, a.n, a.c, cfg.float_bits)
    else:
        val = weilrep.kloosterman_half(Fraction(a.k), a.m, a.n, a.c, cfg.float_bits)
    return {"verb": "kloosterman", "k": a.k, "m": a.m, "n": a.n, "c": a.c, "value": val}, True


def _cmd_poincare(cfg, a):
    h = -a.index
    form = poincare.poincare_form(a.weight, h, max(a.n + 1, 2), cfg.kloosterman_cutoff, cfg.float_bits)
    exact = form.exact_part[a.n]
    total = form.coefficient(a.n, cfg.float_bits) if form.cusp_coeffs else exact
    return {
        "verb": "poincare",
        "weight": a.weight,
        "index": -h,
        "n": a.n,
        "coefficient": total,
        "exact_part": exact,
        "cusp_coeffs": list(form.cusp_coeffs),
        "tail_bound": form.tail_bound,
    }, True


def _cmd_lhat(cfg, a):
    if a.method == "direct":
        res = lfunc.shifted_conv_direct(a.m, 2 * a.nu + 1, cfg.direct_sum_N)
    else:
        res = lfunc.thm14_invert(a.m, a.nu, cfg.kloosterman_cutoff, cfg.float_bits)
    return {"verb": "lhat", **res.to_dict()}, True


def _cmd_norm(cfg, a):
    val = lfunc.petersson_norm(a.weight, cfg.kloosterman_cutoff, cfg.float_bits)
    return {"verb": "norm", "weight": a.weight, "value": val}, True


def _verify(cfg, a):
    which = a.identity
    if which == "thm12":
        rep = relations.verify_thm_1_2(a.m, a.nmax)
    elif which == "thm13":
        rep = relations.verify_thm_1_3(a.m, a.nu, a.nmax)
    elif which == "es":
        rep = relations.verify_eichler_selberg(a.weight, a.nmax)
    elif which == "bracket":
        rep = relations.verify_bracket_identity(a.m, a.nu, a.nmax)
    elif which == "id26":
        rep = relations.verify_identity_2_6(a.nu, a.kappa)
    elif which == "weilrep":
        scan = weilrep.weil_kloosterman_scan(a.mn, a.cmax, max(cfg.float_bits, 128))
        rep = relations.Report("Weil representation / Kloosterman sums", {"mn_max": a.mn, "c_max": a.cmax})
        rep.checked = scan["cases"]
        rep.details = scan
        if scan["max_residual"] >= 1e-20:
            rep.fail(case=scan["worst_case"], residual=scan["max_residual"])
    elif which == "cor15":
        rep = lfunc.verify_cor_1_5(a.m, a.weight, a.nmax, cfg.kloosterman_cutoff, cfg.float_bits)
    elif which == "thm14":
        rep = relations.verify_thm_1_1(a.m, a.nu, a.nmax)
        if rep.status and relations.cusp_dim(2 * a.nu + 2) == 1:
            inv = lfunc.thm14_invert(a.m, a.nu, cfg.kloosterman_cutoff, cfg.float_bits)
            rep.details["lhat_invert"] = inv.to_dict()
            if a.nu == 5:
                direct = lfunc.shifted_conv_direct(a.m, 11, cfg.direct_sum_N)
                rep.details["lhat_direct"] = direct.to_dict()
                if abs(direct.value - inv.value) >= 0.5:
                    rep.fail(invert=inv.value, direct=direct.value)
    else:  # pragma: no cover - argparse restricts choices
        raise AssertionError(which)
    return {"verb": "verify", "report": rep.to_dict()}, rep.status


VERBS = {
    "trace": _cmd_trace,
    "classnum": _cmd_classnum,
    "gseries": _cmd_gseries,
    "kloosterman": _cmd_kloosterman,
    "poincare": _cmd_poincare,
    "lhat": _cmd_lhat,
    "norm": _cmd_norm,
    "verify": _verify,
}

IDENTITIES = ("thm12", "thm13", "es", "bracket", "id26", "weilrep", "cor15", "thm14")


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="esrel", description="Eichler-Selberg relations for traces of singular moduli.")
    p.add_argument("--qprec", type=int, default=50)
    p.add_argument("--bits", dest="float_bits", type=int, default=192)
    p.add_argument("--cutoff", dest="kloosterman_cutoff", type=int, default=1000)
    p.add_argument("--N", dest="direct_sum_N", type=int, default=10**6)
    p.add_argument("--cache", dest="trace_cache_path", default=None)
    p.add_argument("--output", choices=("json", "csv", "text"), default="json")
    sub = p.add_subparsers(dest="verb", required=True)

    s = sub.add_parser("trace", help="t_m(d)")
    s.add_argument("--m", type=int, required=True)
    s.add_argument("--d", type=int, required=True)
    s.add_argument("--fixed-bits", dest="bits", action="store_true", help="use --bits instead of the automatic precision")

    s = sub.add_parser("classnum", help="h(d) and H(d)")
    s.add_argument("--dmin", type=int, default=3)
    s.add_argument("--dmax", type=int, required=True)

    s = sub.add_parser("gseries", help="G_{m,nu} coefficients")
    s.add_argument("--m", type=int, required=True)
    s.add_argument("--nu", type=int, required=True)
    s.add_argument("--nmax", type=int, default=20)

    s = sub.add_parser("kloosterman", help="half-integral (or --k int) Kloosterman sum")
    s.add_argument("--k", default="3/2")
    s.add_argument("--m", type=int, required=True)
    s.add_argument("--n", type=int, required=True)
    s.add_argument("--c", type=int, required=True)

    s = sub.add_parser("poincare", help="c_{W,-H}(n)")
    s.add_argument("--weight", type=int, required=True)
    s.add_argument("--index", type=int, required=True, help="-H (non-positive)")
    s.add_argument("--n", type=int, default=1)

    s = sub.add_parser("lhat", help="symmetrized shifted convolution value")
    s.add_argument("--m", type=int, required=True)
    s.add_argument("--nu", type=int, default=5)
    s.add_argument("--method", choices=("direct", "invert"), default="invert")

    s = sub.add_parser("norm", help="Petersson norm of a one-dimensional cusp space")
    s.add_argument("--weight", type=int, default=12)

    s = sub.add_parser("verify", help="run one identity check")
    s.add_argument("identity", choices=IDENTITIES)
    s.add_argument("--m", type=int, default=1)
    s.add_argument("--nu", type=int, default=1)
    s.add_argument("--nmax", type=int, default=20)
    s.add_argument("--weight", type=int, default=12)
    s.add_argument("--kappa", type=int, default=12)
    s.add_argument("--mn", type=int, default=8)
    s.add_argument("--cmax", type=int, default=50)
    return p


def dispatch(argv: list[str] | None = None, out=None) -> int:
    out = out or sys.stdout
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code else EXIT_OK
    cache_path = os.environ.get("SELBERG_CACHE") or args.trace_cache_path
    try:
        cfg = RunConfig(args.qprec, args.float_bits, args.kloosterman_cutoff, args.direct_sum_N, cache_path, args.output)
    except ValueError as exc:
        print(f"esrel: {exc}", file=sys.stderr)
        return EXIT_USAGE
    if cache_path:
        cmtrace.set_default_cache(cmtrace.TraceCache(cache_path))
    try:
        payload, ok = VERBS[args.verb](cfg, args)
    except (cmtrace.RoundingError, poincare.ConvergenceError, lfunc.InstabilityError) as exc:
        print(f"esrel: numerical instability: {exc}", file=sys.stderr)
        return EXIT_UNSTABLE
    except ValueError as exc:
        print(f"esrel: {exc}", file=sys.stderr)
        return EXIT_USAGE
    _emit(cfg, payload, out)
    return EXIT_OK if ok else EXIT_FAIL


def main() -> None:
    sys.exit(dispatch())


if __name__ == "__main__":
    main()
