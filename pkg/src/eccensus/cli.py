"""eccensus command line: censuses, verification suites and constant tables."""

from __future__ import annotations

import argparse
import csv
import io
import json
import logging
import sys
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path
from typing import Any, Dict, List, Optional, Sequence

from . import census as cen
from . import constants as K
from .arith import prime_factors, primes_in_interval
from .curves import GroupShape
from .quadforms import class_table
from .store import ShapeStore, resolve_cache_dir

log = logging.getLogger("eccensus")

EXIT_OK, EXIT_INTERNAL, EXIT_CONFIG, EXIT_VERIFY = 0, 1, 2, 3
SUITES = ("schoof", "sieve", "lemma14", "assembly", "gl2", "aut")
CONSTANTS = ("kn", "knm", "kg", "k0", "factors", "mps", "bdh", "classnumbers")


class ConfigError(ValueError):
    pass


def q(x: Fraction) -> str:
    x = Fraction(x)
    return f"{x.numerator}/{x.denominator}"


@dataclass
class Table:
    header: List[str]
    rows: List[List[Any]]

    def as_records(self) -> List[Dict[str, Any]]:
        return [dict(zip(self.header, r)) for r in self.rows]


def render(payload: Any, fmt: str) -> str:
    if fmt == "json" or not isinstance(payload, Table):
        data = payload.as_records() if isinstance(payload, Table) else payload
        return json.dumps(data, indent=2, sort_keys=True) + "\n"
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(payload.header)
    w.writerows(payload.rows)
    return buf.getvalue()


def emit(text: str, out: Optional[str]) -> None:
    if out:
        Path(out).write_text(text, encoding="utf-8", newline="\n")
    else:
        sys.stdout.write(text)


# --- config helpers ------------------------------------------------------------------


def variants_of(arg: str) -> List[str]:
    return list(K.VARIANTS) if arg == "both" else [arg]


def parse_group(text: str) -> GroupShape:
    try:
        return GroupShape.parse(text)
    except ValueError as e:
        raise ConfigError(str(e)) from e


def odd_order(N: int) -> int:
    if N < 1 or N % 2 == 0:
        raise ConfigError(f"order must be a positive odd integer, got {N}")
    return N


def torsion_levels(N: int) -> List[int]:
    return [m for m in range(1, N + 1, 2) if N % (m * m) == 0]


def make_store(args) -> ShapeStore:
    return ShapeStore(resolve_cache_dir(args.cache_dir), threads=args.threads)


# --- census -----------------------------------------------------------------------------

CENSUS_HEADER = ["N", "N1", "N2", "m", "p", "weighted", "class_value", "match"]


def record_row(r: cen.CensusRecord) -> List[Any]:
    return [r.N, r.N1, r.N2, r.m, r.p, q(r.weighted), q(r.class_value), int(r.match)]


def cmd_census(args) -> int:
    store = make_store(args)
    rows: List[List[Any]] = []
    failed = False
    if args.group:
        G = parse_group(args.group)
        odd_order(G.order)
        _, rep = cen.inclusion_exclusion_check(G, store)
        for p, (w, c) in sorted(rep.per_prime.items()):
            rows.append([G.order, G.N1, G.N2, G.N1, p, q(w), q(c), int(w == c)])
            failed |= w != c
    else:
        orders = [odd_order(args.order)] if args.order else list(range(5, (args.nmax or 0) + 1, 2))
        if not orders:
            raise ConfigError("census needs --order, --group or --nmax")
        for N in orders:
            levels = [args.m] if args.m else torsion_levels(N)
            for m in levels:
                if m % 2 == 0 or N % (m * m):
                    raise ConfigError(f"m = {m} must be odd with m^2 | {N}")
                for r in cen.schoof_identity_check(N, m, store):
                    rows.append(record_row(r))
                    failed |= not r.match
    emit(render(Table(CENSUS_HEADER, rows), args.format), args.out)
    return EXIT_OK


# --- verify -------------------------------------------------------------------------------


def suite_schoof(args, variant) -> Dict[str, Any]:
    store = make_store(args)
    nmax = args.nmax or 300
    cases, fails = 0, []
    for N in range(5, nmax + 1, 2):
        for m in torsion_levels(N):
            for r in cen.schoof_identity_check(N, m, store):
                cases += 1
                if not r.match or not cen.remark_precondition_holds(N, m, r.p):
                    fails.append({"N": N, "m": m, "p": r.p, "weighted": q(r.weighted), "class_value": q(r.class_value)})
    return {"cases": cases, "failures": fails}


def suite_sieve(args, variant) -> Dict[str, Any]:
    store = make_store(args)
    gmax = args.gmax or 300
    groups = cen.odd_group_shapes(gmax)
    store.prefetch(p for G in groups for p in cen.hasse_window(G.order).primes())
    fails = []
    for G in groups:
        ok, rep = cen.inclusion_exclusion_check(G, store)
        if not ok:
            fails.append({
                "group": str(G), "curve_side": q(rep.curve_side), "class_side": q(rep.class_side),
                "per_prime": {str(p): [q(a), q(b)] for p, (a, b) in rep.per_prime.items() if a != b},
            })
    return {"cases": len(groups), "failures": fails}


def lemma14_cases(nmax: int = 225, ell_max: int = 13, pmax: int = 200):
    """(N, f, ell, alpha) in the case ell | (N, f), nu(N) = 2 nu(f), f a power of ell."""
    for ell in primes_in_interval(2, ell_max + 1):
        for N in range(1, nmax + 1, 2):
            for f in (ell, ell * ell):
                if not K.is_erratum_case(N, f, ell):
                    continue
                alpha = 1
                while ell**alpha <= pmax:
                    yield N, f, ell, alpha
                    alpha += 1


def suite_lemma14(args, variant) -> Dict[str, Any]:
    cases, fails = 0, []
    for N, f, ell, alpha in lemma14_cases(args.nmax or 225):
        cases += 1
        brute = K.c_brute_ratio(N, f, ell, alpha)
        stated = K.c_closed_prime_power(N, f, ell, alpha, variant)
        if brute != stated:
            fails.append({"N": N, "f": f, "ell": ell, "alpha": alpha, "brute": q(brute), "closed": q(stated)})
    # the summed n-series against the stated local factor, over every (ell, j) configuration
    for ell in primes_in_interval(2, 14):
        for N in range(1, (args.nmax or 225) + 1, 2):
            for f in (1, ell, ell * ell):
                cases += 1
                if not K.local_n_sum_check(N, f, ell, variant):
                    fails.append({"N": N, "f": f, "ell": ell, "n_series": q(K.local_n_series(N, f, ell, variant)),
                                  "stated": q(K.stated_n_factor(N, f, ell, variant))})
    return {"cases": cases, "failures": fails, "normalization": K.C_NORMALIZATION}


def suite_assembly(args, variant) -> Dict[str, Any]:
    groups = [G for G in cen.odd_group_shapes(args.gmax or 500) if G.order > 1]
    fails = []
    for G in groups:
        lhs, rhs = K.kG_assembly_sides(G, variant)
        if lhs != rhs:
            fails.append({"group": str(G), "N1": G.N1, "N2": G.N2, "lhs": q(lhs), "rhs": q(rhs)})
    return {"cases": len(groups), "failures": fails}


def suite_gl2(args, variant) -> Dict[str, Any]:
    cutoff = min(args.ell_cutoff or 13, K.GL2_MAX_ELL)
    cases, fails, skipped = 0, [], []
    for ell in primes_in_interval(2, cutoff + 1):
        for r in range(ell):
            res = K.gl2_census(r, ell)
            item = {"ell": ell, "N_residue": r, "count": res.count, "ratio": q(res.ratio), "factor": q(res.factor)}
            if not res.applicable:
                skipped.append(item)
                continue
            cases += 1
            if not res.ok:
                fails.append(item)
    return {"cases": cases, "failures": fails, "skipped": skipped}


def suite_aut(args, variant) -> Dict[str, Any]:
    groups = cen.odd_group_shapes(args.gmax or 225)
    fails = []
    for G in groups:
        n_aut = K.brute_aut_count(G)
        if K.aut_ratio(G) != Fraction(G.order, n_aut):
            fails.append({"group": str(G), "brute_aut": n_aut, "ratio": q(K.aut_ratio(G))})
    return {"cases": len(groups), "failures": fails}


SUITE_FUNCS = {
    "schoof": suite_schoof, "sieve": suite_sieve, "lemma14": suite_lemma14,
    "assembly": suite_assembly, "gl2": suite_gl2, "aut": suite_aut,
}
VARIANT_SUITES = {"lemma14", "assembly"}


def cmd_verify(args) -> int:
    runs = []
    for variant in variants_of(args.variant) if args.suite in VARIANT_SUITES else ["erratum"]:
        res = SUITE_FUNCS[args.suite](args, variant)
        res["variant"] = variant
        res["passed"] = not res["failures"]
        runs.append(res)
    report = {"suite": args.suite, "passed": all(r["passed"] for r in runs), "runs": runs}
    emit(json.dumps(report, indent=2, sort_keys=True) + "\n", args.out)
    return EXIT_OK if report["passed"] else EXIT_VERIFY


# --- constants ---------------------------------------------------------------------------------


def _need(value, flag):
    if value is None:
        raise ConfigError(f"{flag} is required")
    return value


def const_kn(args) -> Table:
    N = odd_order(_need(args.order, "--order"))
    if N < 3:
        raise ConfigError("K(N) needs N >= 3")
    rows = []
    for v in variants_of(args.variant):
        kn = K.K_of_N(N, v, args.ell_cutoff or 10**4)
        rows.append([N, v, q(kn.finite), kn.tail, kn.value, kn.L, kn.tail_bound])
    return with_differs(Table(["N", "variant", "finite", "tail", "value", "L", "tail_bound"], rows), args, 2)


def const_knm(args) -> Table:
    N, m = odd_order(_need(args.order, "--order")), _need(args.m, "--m")
    if m % 2 == 0 or N % (m * m):
        raise ConfigError(f"m = {m} must be odd with m^2 | {N}")
    rows = [[N, m, v, q(K.K_of_N_m(N, m, v))] for v in variants_of(args.variant)]
    return with_differs(Table(["N", "m", "variant", "value"], rows), args, 3)


def const_kg(args) -> Table:
    G = parse_group(_need(args.group, "--group"))
    odd_order(G.order)
    rows = []
    for v in variants_of(args.variant):
        kg = K.K_of_G(G, v, args.ell_cutoff or 10**4)
        rows.append([G.N1, G.N2, v, q(kg.finite), kg.tail, kg.value, q(K.aut_ratio(G))])
    return with_differs(Table(["N1", "N2", "variant", "finite", "tail", "value", "aut_ratio"], rows), args, 3)


def const_k0(args) -> Table:
    N = odd_order(_need(args.order, "--order"))
    m = args.m or 1
    if m % 2 == 0 or N % (m * m):
        raise ConfigError(f"m = {m} must be odd with m^2 | {N}")
    U, V = args.u or 1000, args.v or 30
    L = args.ell_cutoff or 10**4
    trunc = K.K0_truncated(N, m, U, V)
    rows = []
    for v in variants_of(args.variant):
        e = K.K0_euler(N, m, v, L)
        gap = float(trunc) / e.value - 1
        rows.append([N, m, U, V, L, v, q(trunc), float(trunc), q(e.finite), e.value, gap])
    header = ["N", "m", "U", "V", "L", "variant", "truncated", "truncated_float", "euler_finite", "euler_value", "rel_gap"]
    return with_differs(Table(header, rows), args, 8)


def const_factors(args) -> Table:
    N = odd_order(_need(args.order, "--order"))
    cutoff = args.ell_cutoff or 50
    ells = [ell for ell in primes_in_interval(2, cutoff + 1) if ell != 2]
    ells = sorted(set(ells) | set(p for p in prime_factors(N) if p != 2))
    rows = []
    for v in variants_of(args.variant):
        for kind in K.KINDS:
            arg = args.m if kind in ("F5", "Klocal") else (args.f if kind == "F2" else None)
            rows.extend(K.euler_factor_table(kind, N, arg, v, ells).rows())
    rows.sort(key=lambda r: (r[0], K.KINDS.index(r[1]), r[2]))
    t = Table(["ell", "kind", "variant", "numerator", "denominator"], [list(r) for r in rows])
    if args.variant != "both":
        return t
    seen: Dict[tuple, set] = {}
    for r in rows:
        seen.setdefault((r[0], r[1]), set()).add((r[3], r[4]))
    return Table(t.header + ["differs"], [r + [int(len(seen[(r[0], r[1])]) > 1)] for r in t.rows])


def const_mps(args) -> Table:
    xs = [args.x] if args.x else [10**3, 10**4, 10**5]
    rows = []
    for x in xs:
        r = K.mps_average_report(x, args.ell_cutoff or 10**4)
        rows.append([x, r.L, r.partial_sum, r.comparator, r.ratio])
    return Table(["x", "L", "partial_sum", "comparator", "ratio"], rows)


def const_bdh(args) -> Table:
    X, Y, Q = _need(args.x, "--x"), _need(args.y, "--y"), _need(args.q, "--q")
    try:
        r = cen.bdh_variance_sum(X, Y, Q)
    except ValueError as e:
        raise ConfigError(str(e)) from e
    return Table(["X", "Y", "Q", "variance", "comparator", "ratio"], [[X, Y, Q, r.variance, r.comparator, r.ratio]])


def const_classnumbers(args) -> Table:
    dmin = args.dmin if args.dmin is not None else -1000
    if dmin > -3:
        raise ConfigError("--dmin must be at most -3")
    return Table(["d", "h", "w", "H"], [[d, h, w, q(H)] for d, h, w, H in class_table(dmin)])


def with_differs(t: Table, args, value_col: int) -> Table:
    """With --variant both, add a column flagging rows whose value differs from the other variant."""
    if args.variant != "both":
        return t
    vals = {r[t.header.index("variant")]: r[value_col] for r in t.rows}
    differs = int(len(set(vals.values())) > 1)
    return Table(t.header + ["differs"], [r + [differs] for r in t.rows])


CONST_FUNCS = {
    "kn": const_kn, "knm": const_knm, "kg": const_kg, "k0": const_k0, "factors": const_factors,
    "mps": const_mps, "bdh": const_bdh, "classnumbers": const_classnumbers,
}


def cmd_constants(args) -> int:
    table = CONST_FUNCS[args.what](args)
    emit(render(table, args.format), args.out)
    return EXIT_OK


# --- parser -----------------------------------------------------------------------------------


def positive_int(text: str) -> int:
    v = int(text)
    if v < 1:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {text}")
    return v


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--order", "-N", "--n", type=int, dest="order")
    common.add_argument("--group", help="N1xM meaning Z/N1 x Z/M")
    common.add_argument("--m", type=positive_int)
    common.add_argument("--f", type=positive_int, default=None, help="f for the F2 factor table")
    common.add_argument("--nmax", type=positive_int)
    common.add_argument("--gmax", type=positive_int)
    common.add_argument("--u", type=positive_int)
    common.add_argument("--v", type=positive_int)
    common.add_argument("--x", type=positive_int)
    common.add_argument("--y", type=positive_int)
    common.add_argument("--q", type=positive_int)
    common.add_argument("--dmin", type=int)
    common.add_argument("--ell-cutoff", type=positive_int, dest="ell_cutoff")
    common.add_argument("--variant", choices=("original", "erratum", "both"), default="erratum")
    common.add_argument("--threads", type=positive_int, default=1)
    common.add_argument("--out")
    common.add_argument("--cache-dir", dest="cache_dir", default=None)
    common.add_argument("--format", choices=("csv", "json"), default="csv")
    common.add_argument("--verbose", "-v", action="store_true")

    p = argparse.ArgumentParser(prog="eccensus", description="Elliptic curve censuses over prime fields and their constants.")
    sub = p.add_subparsers(dest="command", required=True)
    sub.add_parser("census", parents=[common], help="per-prime census rows")
    pv = sub.add_parser("verify", parents=[common], help="run a verification suite")
    pv.add_argument("suite", choices=SUITES)
    pc = sub.add_parser("constants", parents=[common], help="evaluate constants")
    pc.add_argument("what", choices=CONSTANTS)
    return p


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return int(e.code) if e.code is not None else EXIT_OK
    logging.basicConfig(
        level=logging.INFO if args.verbose else logging.WARNING,
        format="%(levelname)s %(name)s: %(message)s",
        stream=sys.stderr,
    )
    handler = {"census": cmd_census, "verify": cmd_verify, "constants": cmd_constants}[args.command]
    try:
        return handler(args)
    except ConfigError as e:
        log.error("invalid configuration: %s", e)
        return EXIT_CONFIG
    except Exception:
        log.exception("internal error")
        return EXIT_INTERNAL


if __name__ == "__main__":
    sys.exit(main())
