"""Command-line front end: `k3 <subcommand>` producing JSON reports.

Every report carries the schema tag, tool version, an echo of the parsed
configuration, the results object, wall-clock timing, and cache-hit
statistics when a cache was in play.  Results are a pure function of
(config, cache): timing lives outside the results object so that results
bytes are reproducible across runs and thread counts.

Exit codes: 0 success, 1 mathematical verification failure, 2 usage error.
"""

import argparse
import json
import os
import sys
import time
from fractions import Fraction

from . import __version__, bqf, cmmod, count, ellsurf, singk3, zeta
from .cache import CountCache
from .errors import K3ArithError, UsageError
from .ff import CyclotomicInt

SCHEMA = "k3arith-report/1"
_BIG = 2 ** 53


def _enc(x):
    """JSON-safe encoding: big ints as strings, exact rationals as
    "num/den" strings, complex as {re, im} pairs."""
    if isinstance(x, bool) or x is None or isinstance(x, (str, float)):
        return x
    if isinstance(x, int):
        return str(x) if abs(x) >= _BIG else x
    if isinstance(x, Fraction):
        return _enc(x.numerator) if x.denominator == 1 else str(x)
    if isinstance(x, complex):
        return {"re": x.real, "im": x.imag}
    if isinstance(x, CyclotomicInt):
        return {"m": x.m, "coeffs": list(x.coeffs)}
    if isinstance(x, dict):
        return {str(k): _enc(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_enc(v) for v in x]
    raise TypeError(f"cannot encode {type(x).__name__} into a report")


def _csv_ints(text: str):
    try:
        return [int(tok) for tok in text.split(",") if tok.strip() != ""]
    except ValueError:
        raise UsageError(f"expected comma-separated integers, got {text!r}")


def _form_arg(text: str):
    vals = _csv_ints(text)
    if len(vals) != 3:
        raise UsageError("a form needs exactly three integers a,b,c")
    return bqf.BinaryQuadraticForm(*vals)


def _primes_arg(text: str):
    """Either a comma list "3,5,7" or an inclusive range "3..37"."""
    if ".." in text:
        lo, _, hi = text.partition("..")
        try:
            lo, hi = int(lo), int(hi)
        except ValueError:
            raise UsageError(f"bad prime range {text!r}")
        import sympy
        return list(sympy.primerange(lo, hi + 1))
    return _csv_ints(text)


# --- subcommand handlers: each returns (results dict, verified flag) ---------

def _cmd_count(args, cache):
    coeffs = tuple(_csv_ints(args.coeffs))
    if args.model == "quartic":
        surface = count.Quartic(coeffs)
    elif args.model == "diagonal":
        surface = count.DiagonalQuartic(coeffs)
    elif args.model == "sextic":
        surface = count.DoubleSextic(coeffs)
    else:
        raise UsageError(f"unknown model {args.model!r}")
    records = count.count_tower(surface, args.p, args.r, cache=cache,
                                jobs=args.jobs, force=args.force)
    return {
        "model": args.model,
        "surface": surface.surface_hash(),
        "counts": [{"p": rec.p, "r": rec.r, "count": _enc(rec.count)}
                   for rec in records],
    }, True


def _cmd_zeta(args, cache):
    store = CountCache(args.counts)
    records = store.as_records()
    tr = zeta.traces_from_counts(records)
    known = _csv_ints(args.known_factor) if args.known_factor else None
    poly = zeta.p2_from_traces(tr, known)
    return {
        "q": poly.q,
        "traces": [_enc(t) for t in tr.traces],
        "epsilon": poly.epsilon,
        "known": list(poly.known),
        "completed": [_enc(c) for c in poly.completed],
        "p2": [_enc(c) for c in poly.coeffs],
        "degree": poly.degree,
    }, True


def _cmd_picard(args, cache):
    coeffs = tuple(_csv_ints(args.p2))
    poly = zeta.FrobeniusPoly(q=args.q, coeffs=coeffs)
    bound, factors = zeta.picard_upper_bound(poly)
    results = {
        "q": args.q,
        "degree": poly.degree,
        "slack": zeta.H2_DIM - poly.degree,
        "bound": bound,
        "cyclotomic_factors": [{"m": m, "multiplicity": mult}
                               for m, mult in factors],
    }
    if args.artin_tate:
        if args.rho is None:
            raise UsageError("--artin-tate needs --rho")
        value, sclass = zeta.artin_tate_discriminant(poly, args.rho)
        results["artin_tate"] = {"rho": args.rho, "value": _enc(value),
                                 "square_class": sclass}
    return results, True


def _cmd_bqf(args, cache):
    if args.action == "reduce":
        f = _form_arg(args.form)
        g = bqf.reduce(f)
        return {"input": list(f.astuple()), "reduced": list(g.astuple()),
                "disc": f.disc}, True
    if args.action == "classgroup":
        grp = bqf.class_group(args.d)
        return {
            "d": args.d,
            "h": grp.h,
            "exponent": grp.exponent,
            "forms": [list(f.astuple()) for f in grp.forms],
            "identity": list(grp.forms[grp.identity_index].astuple()),
        }, True
    if args.action == "compose":
        f = _form_arg(args.f)
        g = _form_arg(args.g)
        prod = bqf.compose(f, g)
        return {"f": list(f.astuple()), "g": list(g.astuple()),
                "product": list(prod.astuple())}, True
    if args.action == "h1list":
        ds = bqf.class_number_one_discriminants(args.bound)
        return {"bound": args.bound, "discriminants": ds,
                "count": len(ds)}, True
    raise UsageError(f"unknown bqf action {args.action!r}")


def _cmd_inose(args, cache):
    f = _form_arg(args.form)
    periods = singk3.shioda_mitani_periods(f)
    tau = complex(periods.tau)
    tau_p = complex(periods.tau_prime)
    j1 = singk3.j_invariant(tau, args.tol)
    j2 = singk3.j_invariant(tau_p, args.tol)
    pencil = singk3.inose_coefficients(j1, j2)
    d1, d2 = pencil.relation_defects()
    return {
        "form": list(f.astuple()),
        "disc": f.disc,
        "tau": _enc(tau),
        "tau_prime": _enc(tau_p),
        "j1": _enc(j1),
        "j2": _enc(j2),
        "A": _enc(pencil.A),
        "B": _enc(pencil.B),
        "a4": _enc(pencil.a4),
        "a6": _enc(pencil.a6),
        "relation_defects": [d1, d2],
    }, True


def _cmd_kuwata(args, cache):
    config, rank = ellsurf.kuwata_row(args.n, args.relation, args.isomorphic)
    return {
        "n": args.n,
        "relation": args.relation.replace("-", "_"),
        "isomorphic": args.isomorphic,
        "configuration": config.as_dict(),
        "rank": rank,
        "euler": ellsurf.euler_number(config),
        "rho": ellsurf.rho_kummer_product(args.relation),
    }, True


def _cmd_modularity(args, cache):
    primes = _primes_arg(args.primes)
    report = cmmod.verify_modularity(primes, cache=cache, jobs=args.jobs)
    return {
        "primes": primes,
        "entries": [{"p": e.p, "predicted": _enc(e.predicted),
                     "counted": _enc(e.counted), "agree": e.agree}
                    for e in report.entries],
        "all_agree": report.all_agree,
        "mismatches": report.mismatches,
    }, report.all_agree


def _orbit_classes(lams, p):
    """Group residues into orbits under lam -> i*lam when F_p contains i."""
    roots = [x for x in range(2, p) if (x * x + 1) % p == 0]
    if not roots:
        return [[lam] for lam in sorted(lams)]
    i = min(roots)
    seen = set()
    orbits = []
    for lam in sorted(lams):
        if lam in seen:
            continue
        orbit = sorted({lam, (lam * i) % p, (-lam) % p, (-lam * i) % p} & set(lams))
        seen.update(orbit)
        orbits.append(orbit)
    return orbits


def _cmd_sieve(args, cache):
    if args.family != "dwork":
        raise UsageError(f"unknown family {args.family!r}")
    if args.target != "eta4_6":
        raise UsageError(f"unknown target {args.target!r}")
    primes = _primes_arg(args.primes)
    if not primes:
        raise UsageError("no primes supplied")
    target = cmmod.eta4_pow6_expansion(max(primes))
    candidates = cmmod.cm_sieve(count.dwork_pencil, target, primes,
                                cache=cache, jobs=args.jobs)
    per_prime = {}
    for cand in candidates:
        per_prime.setdefault(cand.p, []).append(cand.lam)
    # small integers congruent to a candidate residue at EVERY prime
    common = [c for c in range(-cmmod.H_BOUND, cmmod.H_BOUND + 1)
              if all(c % p in per_prime.get(p, []) for p in primes)]
    results = {
        "family": args.family,
        "target": args.target,
        "primes": primes,
        "candidates": [{"p": c.p, "lam": c.lam, "h": c.h,
                        "count": _enc(c.count)} for c in candidates],
        "per_prime_residues": {str(p): per_prime.get(p, []) for p in primes},
        "symmetry_orbits": {str(p): _orbit_classes(per_prime.get(p, []), p)
                            for p in primes},
        "common_small_integers": common,
    }
    if args.lift:
        sets = [per_prime.get(p, []) for p in primes]
        total = 1
        for s in sets:
            total *= max(len(s), 1)
        if total > 4096:
            raise UsageError(f"{total} residue combinations exceed the lift "
                             f"budget; narrow the sieve first")
        lifts = []
        stack = [[]]
        for p, s in zip(primes, sets):
            stack = [prefix + [(p, lam)] for prefix in stack for lam in s]
        for combo in stack:
            lifted = cmmod.lift_parameter(combo, args.height)
            if lifted is not None:
                lifts.append({"residues": [[p, lam] for p, lam in combo],
                              "parameter": _enc(lifted)})
        results["lifts"] = lifts
    return results, True


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="k3", description="Arithmetic of K3 surfaces: point counts, "
        "zeta functions, Picard bounds, class groups, and CM sieves.")
    parser.add_argument("--version", action="version",
                        version=f"k3arith {__version__}")
    sub = parser.add_subparsers(dest="subcommand", required=True)

    def common(sp):
        sp.add_argument("--jobs", type=int, default=1,
                        help="worker process cap (default 1)")
        sp.add_argument("--cache", default=None,
                        help="count cache path (default: $K3_CACHE)")
        sp.add_argument("--out", default=None,
                        help="write the JSON report here instead of stdout")

    sp = sub.add_parser("count", help="count points over a field tower")
    sp.add_argument("--model", required=True,
                    choices=["quartic", "sextic", "diagonal"])
    sp.add_argument("--coeffs", required=True,
                    help="comma-separated integer coefficients")
    sp.add_argument("--p", type=int, required=True, help="prime")
    sp.add_argument("--r", type=int, default=1, help="tower height (default 1)")
    sp.add_argument("--force", action="store_true",
                    help="override the feasibility cap")
    common(sp)
    sp.set_defaults(func=_cmd_count)

    sp = sub.add_parser("zeta", help="complete P2 from counts")
    sp.add_argument("--counts", required=True,
                    help="LDJSON count-record file (cache format)")
    sp.add_argument("--known-factor", default=None,
                    help="known divisor of P2: coefficients low first")
    common(sp)
    sp.set_defaults(func=_cmd_zeta)

    sp = sub.add_parser("picard", help="Picard bound from a P2 factor")
    sp.add_argument("--p2", required=True,
                    help="P2 coefficients, low degree first")
    sp.add_argument("--q", type=int, required=True, help="prime power")
    sp.add_argument("--artin-tate", action="store_true",
                    help="also evaluate the Artin-Tate special value")
    sp.add_argument("--rho", type=int, default=None,
                    help="NS rank over F_q for --artin-tate")
    common(sp)
    sp.set_defaults(func=_cmd_picard)

    sp = sub.add_parser("bqf", help="binary quadratic forms and class groups")
    sp.add_argument("action",
                    choices=["reduce", "classgroup", "compose", "h1list"])
    sp.add_argument("--form", default=None, help="a,b,c for reduce")
    sp.add_argument("--f", default=None, help="left factor for compose")
    sp.add_argument("--g", default=None, help="right factor for compose")
    sp.add_argument("--d", type=int, default=None,
                    help="discriminant for classgroup")
    sp.add_argument("--bound", type=int, default=None,
                    help="|d| bound for h1list")
    common(sp)
    sp.set_defaults(func=_cmd_bqf)

    sp = sub.add_parser("inose", help="Inose pencil of a singular K3")
    sp.add_argument("--form", required=True, help="transcendental form a,b,c")
    sp.add_argument("--tol", type=float, default=1e-12,
                    help="j-evaluation tolerance")
    common(sp)
    sp.set_defaults(func=_cmd_inose)

    sp = sub.add_parser("kuwata", help="fiber configuration and MW rank of "
                        "a cyclic Inose cover")
    sp.add_argument("--n", type=int, required=True, help="cover degree 1..6")
    sp.add_argument("--relation", required=True,
                    help="not-isogenous | isogenous-no-cm | isogenous-cm")
    sp.add_argument("--isomorphic", action="store_true",
                    help="E and E' isomorphic")
    common(sp)
    sp.set_defaults(func=_cmd_kuwata)

    sp = sub.add_parser("modularity", help="Fermat quartic: prediction vs count")
    sp.add_argument("--primes", required=True, help='"3,5,7" or "3..37"')
    common(sp)
    sp.set_defaults(func=_cmd_modularity)

    sp = sub.add_parser("sieve", help="CM parameter sieve over a family")
    sp.add_argument("--family", default="dwork", help="family name")
    sp.add_argument("--target", default="eta4_6", help="target q-series")
    sp.add_argument("--primes", required=True, help='"5,13,17" or a range')
    sp.add_argument("--lift", action="store_true",
                    help="lift surviving residues by CRT + reconstruction")
    sp.add_argument("--height", type=int, default=100,
                    help="height bound for --lift (default 100)")
    common(sp)
    sp.set_defaults(func=_cmd_sieve)
    return parser


def _config_echo(args) -> dict:
    cfg = {k: v for k, v in sorted(vars(args).items()) if k != "func"}
    return _enc(cfg)


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:  # argparse already printed usage/help
        code = exc.code
        return code if isinstance(code, int) else 2

    cache_path = args.cache if getattr(args, "cache", None) else \
        os.environ.get("K3_CACHE") or None
    started = time.perf_counter()
    try:
        cache = CountCache(cache_path) if cache_path else CountCache()
        results, ok = args.func(args, cache)
    except UsageError as exc:
        print(f"k3: usage error: {exc}", file=sys.stderr)
        return 2
    except K3ArithError as exc:
        print(f"k3: verification failure: {exc}", file=sys.stderr)
        return 1
    elapsed = time.perf_counter() - started

    report = {
        "schema": SCHEMA,
        "tool": {"name": "k3arith", "version": __version__},
        "config": _config_echo(args),
        "results": results,
        "timing": {"seconds": round(elapsed, 3)},
        "cache": cache.stats,
    }
    text = json.dumps(report, indent=2, sort_keys=True)
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(text + "\n")
    else:
        print(text)
    return 0 if ok else 1


if __name__ == "__main__":
    sys.exit(main())
