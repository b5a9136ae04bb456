"""Command-line entry point: ``jetlog <command> FIXTURE [options]``.

Exit status is 0 when the command's verdict holds (or it has none), 1 when
the verdict fails, and the error's own code for library errors.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
import warnings
from fractions import Fraction

from . import counting, resolution
from .errors import BadFixture, JetlogError
from .fixture import Fixture, load_fixture
from .grothendieck import element_to_json
from .jets import jet_equations, stratum_conditions

DEFAULT_PRIMES = (5, 7, 11, 13)
FORCE_BANNER = "WARNING: out-of-regime query (n < theta*e); the stability statements do not apply"


def fmt(x) -> str:
    """Exact text form: "p/q", integers plain, infinities as "inf" / "-inf"."""
    if isinstance(x, float):
        if x == float("inf"):
            return "inf"
        if x == float("-inf"):
            return "-inf"
        raise TypeError(f"refusing to print float {x!r}")
    return str(Fraction(x)) if isinstance(x, (int, Fraction)) else str(x)


def parse_primes(text: str) -> list[int]:
    try:
        return [int(p) for p in text.split(",") if p.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad prime list {text!r}")


def parse_rational(text: str) -> Fraction:
    try:
        return Fraction(text)
    except (ValueError, ZeroDivisionError):
        raise argparse.ArgumentTypeError(f"bad rational {text!r}")


def resolve_budget(args, fx: Fixture | None) -> int:
    if getattr(args, "budget", None) is not None:
        return args.budget
    if os.environ.get("JETLOG_BUDGET"):
        return counting.default_budget()
    if fx is not None and fx.budget is not None:
        return fx.budget
    return counting.default_budget()


def resolve_primes(args, fx: Fixture | None) -> list[int]:
    if getattr(args, "primes", None):
        return args.primes
    if fx is not None and fx.primes:
        return fx.primes
    return list(DEFAULT_PRIMES)


class Output:
    def __init__(self, fmt_name: str, stream):
        self.format = fmt_name
        self.stream = stream

    def emit(self, payload: dict, text_lines: list[str]):
        if self.format == "json":
            self.stream.write(json.dumps(payload, indent=2) + "\n")
        else:
            self.stream.write("\n".join(text_lines) + "\n")


def _table(rows: list[list[str]]) -> list[str]:
    widths = [max(len(r[i]) for r in rows) for i in range(len(rows[0]))]
    return ["  ".join(c.rjust(w) for c, w in zip(r, widths)).rstrip() for r in rows]


# -- commands ------------------------------------------------------------------


def cmd_jets_eq(args, out: Output) -> int:
    fx = load_fixture(args.fixture)
    system = jet_equations(fx.require_scheme(), args.n)
    eqs = system.strings()
    out.emit({"level": system.level, "variables": list(system.variables), "equations": eqs},
             [f"# level {system.level}: {len(eqs)} equations, {len(system.variables)} variables",
              "# variables: " + " ".join(system.variables)] + eqs)
    return 0


def _count_target(args, fx: Fixture):
    """(stratum or None, warning) for the count/dim commands."""
    if args.e is None:
        return None, None
    pair = fx.require_pair()
    if args.q_pair is not None:
        pair = pair.replace(q=args.q_pair)
    st = stratum_conditions(pair, args.n, args.e, force=args.force)
    warn = FORCE_BANNER if args.n < pair.theta * args.e else None
    return st, warn


def cmd_count(args, out: Output) -> int:
    fx = load_fixture(args.fixture)
    budget = resolve_budget(args, fx)
    st, warn = _count_target(args, fx)
    if st is None:
        scheme = fx.require_scheme()
        query = counting.CountQuery(jet_equations(scheme, args.n), (), args.q)
        value = counting.count_points(query, budget=budget, workers=args.workers)
        desc = f"#L_{args.n}({fx.name})(F_{args.q})"
    else:
        value = counting.count_stratum(st, args.q, budget=budget, workers=args.workers)
        desc = f"#L_{args.n}^{args.e}({fx.name})(F_{args.q})"
    payload = {"query": {"fixture": fx.name, "n": args.n, "e": args.e, "q": args.q}, "count": value}
    lines = [str(value)]
    if warn:
        payload["warning"] = warn
        lines.insert(0, warn)
    if args.verbose:
        lines.append(f"# {desc}")
    out.emit(payload, lines)
    return 0


def cmd_dim(args, out: Output) -> int:
    fx = load_fixture(args.fixture)
    budget = resolve_budget(args, fx)
    primes = resolve_primes(args, fx)
    st, warn = _count_target(args, fx)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        if st is None:
            est = counting.estimate_dimension(jet_equations(fx.require_scheme(), args.n), (), primes,
                                              budget=budget, workers=args.workers)
        else:
            est = counting.estimate_stratum_dimension(st, primes, budget=budget, workers=args.workers)
    payload = est.to_json()
    lines = [f"{fmt(est.dim)}, {'consistent' if est.consistent else 'INCONSISTENT'}",
             "# poly: " + (" ".join(str(c) for c in est.count_polynomial) if est.count_polynomial else "none"),
             "# primes: " + ",".join(str(p) for p in est.primes_used)]
    if warn:
        payload["warning"] = warn
        lines.insert(0, warn)
    out.emit(payload, lines)
    return 0 if est.consistent else 1


def cmd_klt(args, out: Output) -> int:
    data = load_fixture(args.fixture).require_resolution()
    klt, lc = resolution.is_klt(data, args.q), resolution.is_lc(data, args.q)
    rows = [[D.name or str(i), fmt(data.log_discrepancy(i, args.q))] for i, D in enumerate(data.divisors)]
    out.emit({"q": fmt(args.q), "klt": klt, "lc": lc,
              "log_discrepancies": {r[0]: r[1] for r in rows}},
             [f"KLT: {str(klt).lower()}, LC: {str(lc).lower()}"])
    return 0 if klt else 1


def cmd_lct(args, out: Output) -> int:
    data = load_fixture(args.fixture).require_resolution()
    value = fmt(resolution.lct(data))
    out.emit({"lct": value}, [value])
    return 0


def cmd_sdim(args, out: Output) -> int:
    data = load_fixture(args.fixture).require_resolution()
    value = resolution.s_dim(data, args.q, args.e, args.n, mode=args.mode)
    payload = {"q": fmt(args.q), "e": args.e, "n": args.n, "mode": args.mode, "s_dim": fmt(value)}
    lines = [fmt(value)]
    if args.element:
        el = resolution.s_element(data, args.q, args.e, args.n, mode=args.mode)
        payload["s_element"] = element_to_json(el)
        lines.append(f"# S = {el}")
    out.emit(payload, lines)
    return 0


def _load_dims(path: str) -> dict:
    try:
        with open(path) as fh:
            doc = json.load(fh)
        table = {}
        for key, value in doc.items():
            e, n = (int(k) for k in key.split(","))
            table[(e, n)] = float("-inf") if value == "-inf" else int(value)
        return table
    except (OSError, ValueError, AttributeError) as exc:
        raise BadFixture(f"bad dimension table {path}: {exc}") from exc


def cmd_check_main(args, out: Output) -> int:
    fx = load_fixture(args.fixture)
    data_fx = load_fixture(args.data) if args.data else fx
    pair = fx.require_pair()
    changes = {k: v for k, v in (("q", args.q), ("l", args.l)) if v is not None}
    if changes:
        pair = pair.replace(**changes)
    data = data_fx.resolution
    if args.dims:
        dims = _load_dims(args.dims)
    else:
        with warnings.catch_warnings():
            warnings.simplefilter("ignore")
            dims = counting.jet_dimension_table(pair, args.nmax, args.emax, resolve_primes(args, fx),
                                                budget=resolve_budget(args, fx), workers=args.workers)
    report = resolution.main_theorem_check(pair, data, dims, args.mode, n_max=args.nmax, e_max=args.emax)
    payload = report.to_json()
    payload["holds"] = report.holds
    rows = [["e", "n", "dim", "lhs", "rhs", "ok"]]
    for r in report.rows:
        rows.append([str(r.e), str(r.n), fmt(r.dim), fmt(r.lhs), fmt(r.rhs), "yes" if r.holds else "NO"])
    res = "n/a" if report.resolution_verdict is None else str(report.resolution_verdict).lower()
    lines = _table(rows) + [
        f"{report.mode.upper()} by jets: {str(report.jet_verdict).lower()}; by resolution: {res}"]
    lines += [f"# note: {n}" for n in report.notes]
    out.emit(payload, lines)
    return 0 if report.holds else 1


def cmd_verify_transform(args, out: Output) -> int:
    fx = load_fixture(args.fixture)
    data = (load_fixture(args.data) if args.data else fx).require_resolution()
    pair = fx.require_pair()
    report = resolution.transformation_check(pair, data, args.mmax, resolve_primes(args, fx), e_max=args.emax,
                                             coefficient=args.coefficient, budget=resolve_budget(args, fx),
                                             workers=args.workers)
    rows = [["m", "e", "q", "downstairs", "upstairs", "equal"]]
    for r in report.rows:
        rows.append([str(r.m), str(r.e), str(r.prime), fmt(r.downstairs), fmt(r.upstairs),
                     "yes" if r.equal else "NO"])
    if report.holds:
        verdict = "EQUAL at all primes"
    else:
        bad = sorted({r.prime for r in report.rows if not r.equal})
        verdict = "MISMATCH at primes " + ",".join(map(str, bad))
    lines = (_table(rows) if args.verbose else []) + [verdict]
    out.emit(report.to_json(), lines)
    return 0 if report.holds else 1


def cmd_bundle_check(args, out: Output) -> int:
    fx = load_fixture(args.fixture)
    pair = fx.require_pair()
    report = counting.bundle_ratio_check(pair, args.e, range(args.nmin, args.nmax + 1), args.q,
                                         budget=resolve_budget(args, fx), workers=args.workers,
                                         lift=not args.no_lift)
    rows = [["n", "#pi_n", "#pi_n+1", "ratio", "regime", "ok"]]
    for r in report.rows:
        rows.append([str(r.n), "-" if r.count_n is None else str(r.count_n),
                     "-" if r.count_next is None else str(r.count_next),
                     "-" if r.ratio is None else fmt(r.ratio), "yes" if r.in_regime else "no",
                     "-" if r.ok is None else ("yes" if r.ok else "NO")])
    verdict = f"ratio q^{pair.d} = {args.q ** pair.d}: {'HOLDS' if report.holds else 'FAILS'} for n >= {pair.theta * args.e}"
    out.emit(report.to_json(), _table(rows) + [verdict])
    return 0 if report.holds else 1


def cmd_linear_bound(args, out: Output) -> int:
    fx = load_fixture(args.fixture)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        report = counting.linear_bound_check(fx.require_scheme(), args.e, args.nmax, resolve_primes(args, fx),
                                             pair=fx.pair, budget=resolve_budget(args, fx), workers=args.workers)
    rows = [["n", "dim", "bound", "ok"]]
    for n, est in report.dims.items():
        rows.append([str(n), fmt(est.dim), str((n + 1) * report.d_prime), "yes" if report.bound_ok(n) else "NO"])
    lines = _table(rows) + [f"slope {fmt(report.slope) if report.slope is not None else 'n/a'} "
                            f"(< {report.d}: {str(report.slope_ok).lower()}); "
                            f"{'HOLDS' if report.holds else 'FAILS'}"]
    out.emit(report.to_json(), lines)
    return 0 if report.holds else 1


# -- parser --------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="jetlog", description="Jet schemes, motivic measures and KLT/LC checks.")
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--format", choices=("text", "json"), default="text")
    common.add_argument("--budget", type=int, default=None, help="search budget in candidate evaluations")
    common.add_argument("--workers", type=int, default=1)
    common.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    def counting_args(p, need_q: bool):
        p.add_argument("fixture")
        p.add_argument("--n", type=int, required=True)
        if need_q:
            p.add_argument("--q", type=int, required=True, help="field size")
        else:
            p.add_argument("--primes", type=parse_primes)
        p.add_argument("--e", type=int, default=None, help="Z-order stratum of the pair")
        p.add_argument("--pair-q", dest="q_pair", type=parse_rational, default=None)
        p.add_argument("--force", action="store_true", help="allow n < theta*e")

    def add_count(s):
        p = s.add_parser("count", parents=[common], help="count jets over F_q")
        counting_args(p, True)
        p.set_defaults(func=cmd_count)

    def add_dim(s):
        p = s.add_parser("dim", parents=[common], help="dimension by interpolation over primes")
        counting_args(p, False)
        p.set_defaults(func=cmd_dim)

    jets = sub.add_parser("jets", help="jet scheme commands")
    jsub = jets.add_subparsers(dest="jets_command", required=True)
    p = jsub.add_parser("eq", parents=[common], help="print the jet equations")
    p.add_argument("fixture")
    p.add_argument("n", type=int)
    p.set_defaults(func=cmd_jets_eq)
    add_count(jsub)
    add_dim(jsub)
    add_count(sub)
    add_dim(sub)

    p = sub.add_parser("klt", parents=[common], help="KLT / LC test from resolution data")
    p.add_argument("fixture")
    p.add_argument("--q", type=parse_rational, required=True)
    p.set_defaults(func=cmd_klt)

    p = sub.add_parser("lct", parents=[common], help="log canonical threshold")
    p.add_argument("fixture")
    p.set_defaults(func=cmd_lct)

    p = sub.add_parser("sdim", parents=[common], help="dim S(e, n) from resolution data")
    p.add_argument("fixture")
    p.add_argument("--q", type=parse_rational, required=True)
    p.add_argument("--e", type=int, required=True)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--mode", choices=("n+1", "n"), default="n+1")
    p.add_argument("--element", action="store_true", help="also print the element S(e, n)")
    p.set_defaults(func=cmd_sdim)

    p = sub.add_parser("check-main", parents=[common], help="jet-dimension criterion for KLT / LC")
    p.add_argument("fixture")
    p.add_argument("data", nargs="?")
    p.add_argument("--q", type=parse_rational, default=None)
    p.add_argument("--l", type=int, default=None)
    p.add_argument("--nmax", type=int, required=True)
    p.add_argument("--emax", type=int, default=0)
    p.add_argument("--mode", choices=("klt", "lc"), default="klt")
    p.add_argument("--primes", type=parse_primes)
    p.add_argument("--dims", help='JSON table {"e,n": dim} instead of counting')
    p.set_defaults(func=cmd_check_main)

    p = sub.add_parser("verify-transform", parents=[common], help="transformation rule on level sets")
    p.add_argument("fixture")
    p.add_argument("data", nargs="?")
    p.add_argument("--primes", type=parse_primes)
    p.add_argument("--mmax", type=int, required=True)
    p.add_argument("--emax", type=int, default=None)
    p.add_argument("--coefficient", type=parse_rational, default=Fraction(0))
    p.set_defaults(func=cmd_verify_transform)

    p = sub.add_parser("bundle-check", parents=[common], help="affine-bundle ratio between levels")
    p.add_argument("fixture")
    p.add_argument("--e", type=int, required=True)
    p.add_argument("--q", type=int, required=True)
    p.add_argument("--nmin", type=int, default=0)
    p.add_argument("--nmax", type=int, required=True)
    p.add_argument("--no-lift", action="store_true", help="count the literal conjunction of conditions")
    p.set_defaults(func=cmd_bundle_check)

    p = sub.add_parser("linear-bound", parents=[common], help="dim L_n^e(Y) <= (n+1) dim Y")
    p.add_argument("fixture")
    p.add_argument("--e", type=int, default=0)
    p.add_argument("--nmax", type=int, required=True)
    p.add_argument("--primes", type=parse_primes)
    p.set_defaults(func=cmd_linear_bound)
    return parser


def main(argv=None, stdout=None) -> int:
    stdout = stdout or sys.stdout
    args = build_parser().parse_args(argv)
    try:
        return args.func(args, Output(args.format, stdout))
    except JetlogError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.exit_code
    except (ValueError, ArithmeticError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return BadFixture.exit_code


if __name__ == "__main__":
    sys.exit(main())
