"""Command-line front end.

Tables go to stdout as CSV (default) or as JSON lines with ``--json``.
Rationals are written as ``num/den`` strings and floats with 12 significant
digits.  Exit status: 0 success, 2 usage error, 1 failed ``--verify`` check or
numerical failure.
"""

from __future__ import annotations

import argparse
import csv
import json
import secrets
import sys
from datetime import datetime, timezone
from fractions import Fraction
from typing import Any

from . import __version__, chain, exactmath, montecarlo, oracle
from .errors import EnumerationLimitError, InvalidArgument, NumericFailure

EXACT_LIMIT = 10**4
DP_VERIFY_LIMIT = 50


def fmt(value: Any) -> Any:
    """Serialise one result field for CSV."""
    if isinstance(value, Fraction):
        return f"{value.numerator}/{value.denominator}"
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return format(value, ".12g")
    return value


def _jsonable(value: Any) -> Any:
    if isinstance(value, (Fraction, float)):
        return fmt(value)
    return value


class Emitter:
    def __init__(self, args: argparse.Namespace, out=None):
        self.args = args
        self.out = out if out is not None else sys.stdout

    def meta(self, **extra) -> dict:
        m = {"version": __version__,
             "timestamp": datetime.now(timezone.utc).isoformat(timespec="seconds")}
        m.update(extra)
        return m

    def emit(self, rows: list[dict], params: dict, **meta) -> None:
        if self.args.json:
            m = self.meta(**meta)
            for row in rows:
                obj = {"command": self.args.command, "params": params,
                       "result": {k: _jsonable(v) for k, v in row.items()}, "meta": m}
                self.out.write(json.dumps(obj) + "\n")
            return
        if not rows:
            return
        w = csv.writer(self.out, lineterminator="\n")
        w.writerow(list(rows[0]))
        for row in rows:
            w.writerow([fmt(v) for v in row.values()])


def _check(cond: bool, message: str, failures: list[str]) -> None:
    if not cond:
        failures.append(message)


# -- commands ---------------------------------------------------------------

def cmd_thresholds(args, em: Emitter, failures: list[str]) -> None:
    rows = []
    for n, r, a in exactmath.threshold_table(args.n_max):
        rows.append({"n": n, "r_n": r, "a_n": a, "r_over_n": r / n, "a_over_n": a / n})
    if args.verify:
        for row in rows:
            n = row["n"]
            if n <= 500 or n == args.n_max:
                _check(row["r_n"] == exactmath.threshold_r(n), f"r_{n} table/search mismatch", failures)
                _check(row["a_n"] == exactmath.csp_threshold_a(n), f"a_{n} table/search mismatch", failures)
    em.emit(rows, {"n_max": args.n_max})


def _prob_row(n: int, exact: bool) -> dict:
    p, q = exactmath.success_prob_p(n), exactmath.csp_prob_q(n)
    conv = (lambda v: v) if exact else float
    return {"n": n, "r_n": exactmath.threshold_r(n), "a_n": exactmath.csp_threshold_a(n),
            "p_n": conv(p), "q_n": conv(q), "p_minus_q": conv(p - q)}


def _verify_prob(n: int, args, failures: list[str]) -> None:
    p, q = exactmath.success_prob_p(n), exactmath.csp_prob_q(n)
    if n >= 2:
        _check(p > q, f"p_{n} <= q_{n}", failures)
    if n <= DP_VERIFY_LIMIT:
        _check(chain.dp_solve(n).value_at_start == p, f"DP value differs from p_{n}", failures)
    if n <= oracle.enumeration_cap(args.allow_large):
        got = oracle.exact_policy_prob(n, exactmath.threshold_r(n), args.allow_large, args.threads)
        _check(got == p, f"enumeration gives {got}, closed form p_{n} = {p}", failures)
    if n <= oracle.CSP_CAP:
        _check(oracle.csp_oracle(n) == q, f"classical enumeration differs from q_{n}", failures)


def cmd_prob(args, em: Emitter, failures: list[str]) -> None:
    n = args.n
    if args.exact and n > EXACT_LIMIT:
        raise InvalidArgument(f"--exact output is limited to n <= {EXACT_LIMIT}")
    if args.verify:
        _verify_prob(n, args, failures)
    em.emit([_prob_row(n, args.exact)], {"n": n, "exact": args.exact})


def cmd_limits(args, em: Emitter, failures: list[str]) -> None:
    sol = exactmath.limit_r(args.tol)
    if args.verify:
        res = abs(exactmath.limit_objective(sol.r) - exactmath.E_MINUS_5)
        _check(res <= args.tol, f"residual {res} exceeds {args.tol}", failures)
    em.emit([{"r": sol.r, "p_limit": sol.p_limit, "residual": sol.residual,
              "iterations": sol.iterations, "tolerance": sol.tolerance}], {"tol": args.tol})


def _threshold_arg(args, n: int) -> int:
    t = args.threshold if args.threshold is not None else exactmath.threshold_r(n)
    if not 1 <= t <= n:
        raise InvalidArgument(f"--threshold must lie in 1..{n}")
    return t


def cmd_oracle(args, em: Emitter, failures: list[str]) -> None:
    n = args.n
    t = _threshold_arg(args, n)
    total, wins = oracle.policy_success_counts(n, args.allow_large, args.threads)
    prob = Fraction(wins[t - 1], total)
    if args.verify:
        scan = oracle.best_threshold(n, args.allow_large, args.threads)
        r = exactmath.threshold_r(n)
        _check(r in scan.maximizers, f"r_{n}={r} not among maximizers {sorted(scan.maximizers)}", failures)
        if t == r:
            _check(prob == exactmath.success_prob_p(n), "enumeration differs from closed form", failures)
    em.emit([{"n": n, "threshold": t, "successes": wins[t - 1], "total": total,
              "prob": prob, "prob_float": float(prob)}],
            {"n": n, "threshold": t, "allow_large": args.allow_large})


def cmd_dp(args, em: Emitter, failures: list[str]) -> None:
    n = args.n
    sol = chain.dp_solve(n)
    rep = chain.ola_region_check(n, sol)
    if args.verify:
        _check(sol.value_at_start == exactmath.success_prob_p(n), "DP differs from closed form", failures)
        _check(rep.ok, f"DP stop region disagrees with threshold at {rep.disagreements[:3]}", failures)
    em.emit([{"n": n, "value": sol.value_at_start, "value_float": float(sol.value_at_start),
              "r_n": rep.threshold, "region_min": min(sol.stop_region), "ola_match": rep.ok}],
            {"n": n})


def cmd_simulate(args, em: Emitter, failures: list[str]) -> None:
    n = args.n
    t = _threshold_arg(args, n)
    seed = args.seed
    if seed is None:
        seed = secrets.randbits(63)
        print(f"seed: {seed}", file=sys.stderr)
    est = montecarlo.estimate(n, t, args.trials, seed, workers=args.threads)
    row = {"n": n, "threshold": t, "trials": est.trials, "successes": est.successes,
           "p_hat": est.p_hat, "std_err": est.std_err, "seed": seed, "rng": est.rng}
    reference = None
    if t == exactmath.threshold_r(n):
        reference = exactmath.success_prob_p(n)
    elif n <= 4:
        reference = oracle.exact_policy_prob(n, t)
    if reference is not None:
        cmp = montecarlo.SweepRow(est, Fraction(reference))
        row.update({"reference": float(reference), "z": cmp.z})
        if args.verify:
            _check(abs(cmp.z) <= 5, f"|z| = {abs(cmp.z):.2f} exceeds 5", failures)
    em.emit([row], {"n": n, "threshold": t, "trials": args.trials, "seed": seed},
            seed=seed, rng=est.rng, trials=est.trials)


def cmd_transitions(args, em: Emitter, failures: list[str]) -> None:
    s = chain.ChainState(args.j, args.i, args.m)
    row = chain.transitions(args.n, s)
    if args.verify:
        _check(row.total() == 1, "row does not sum to 1", failures)
        if args.n <= 5:
            emp = oracle.conditional_prob_check(args.n).kernel.get(s)
            _check(emp == row.as_dict(), f"counted row {emp} differs from kernel", failures)
    em.emit([{"j": t.j, "i": t.i, "m": t.m, "prob": p} for t, p in row.targets],
            {"n": args.n, "j": args.j, "i": args.i, "m": args.m})


def cmd_table(args, em: Emitter, failures: list[str]) -> None:
    if args.exact and args.n_max > EXACT_LIMIT:
        raise InvalidArgument(f"--exact output is limited to n <= {EXACT_LIMIT}")
    rows = []
    for n, r, a in exactmath.threshold_table(args.n_max):
        row = _prob_row(n, args.exact)
        row.update({"r_over_n": r / n, "a_over_n": a / n})
        rows.append(row)
        if args.verify:
            _check(row["r_n"] == r and row["a_n"] == a, f"threshold mismatch at n={n}", failures)
            if n <= 20:
                _verify_prob(n, args, failures)
            elif n >= 2:
                _check(exactmath.success_prob_p(n) > exactmath.csp_prob_q(n), f"p_{n} <= q_{n}", failures)
    em.emit(rows, {"n_max": args.n_max, "exact": args.exact})


# -- parser -----------------------------------------------------------------

def _positive(text: str) -> int:
    try:
        v = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected an integer, got {text!r}") from None
    if v < 1:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {v}")
    return v


def _nonnegative(text: str) -> int:
    try:
        v = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected an integer, got {text!r}") from None
    if v < 0:
        raise argparse.ArgumentTypeError(f"expected a non-negative integer, got {v}")
    return v


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--json", action="store_true", help="emit JSON lines instead of CSV")
    common.add_argument("--verify", action="store_true", help="run cross-checks; exit 1 on mismatch")
    common.add_argument("--threads", type=_positive, default=1, help="worker count (results unaffected)")

    p = argparse.ArgumentParser(prog="dsp", description="Double secretary problem calculator.")
    p.add_argument("--version", action="version", version=__version__)
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("thresholds", parents=[common], help="r_n and a_n for n = 1..n_max")
    s.add_argument("--n-max", type=_positive, required=True)
    s.set_defaults(func=cmd_thresholds)

    s = sub.add_parser("prob", parents=[common], help="p_n, q_n and their difference")
    s.add_argument("--n", type=_positive, required=True)
    s.add_argument("--exact", action="store_true", help="print rationals")
    s.add_argument("--allow-large", action="store_true")
    s.set_defaults(func=cmd_prob)

    s = sub.add_parser("limits", parents=[common], help="limiting cutoff fraction and success probability")
    s.add_argument("--tol", type=float, default=1e-12)
    s.set_defaults(func=cmd_limits)

    s = sub.add_parser("oracle", parents=[common], help="exact success probability by enumeration")
    s.add_argument("--n", type=_positive, required=True)
    s.add_argument("--threshold", type=_positive)
    s.add_argument("--allow-large", action="store_true", help="permit n = 7")
    s.set_defaults(func=cmd_oracle)

    s = sub.add_parser("dp", parents=[common], help="backward induction over the chain")
    s.add_argument("--n", type=_positive, required=True)
    s.set_defaults(func=cmd_dp)

    s = sub.add_parser("simulate", parents=[common], help="Monte Carlo estimate of a threshold rule")
    s.add_argument("--n", type=_positive, required=True)
    s.add_argument("--threshold", type=_positive)
    s.add_argument("--trials", type=_positive, default=10**5)
    s.add_argument("--seed", type=_nonnegative)
    s.set_defaults(func=cmd_simulate)

    s = sub.add_parser("transitions", parents=[common], help="one row of the transition kernel")
    s.add_argument("--n", type=_positive, required=True)
    s.add_argument("--j", type=_positive, required=True)
    s.add_argument("--i", type=_positive, required=True)
    s.add_argument("--m", type=int, choices=(1, 2), required=True)
    s.set_defaults(func=cmd_transitions)

    s = sub.add_parser("table", parents=[common], help="combined thresholds and probabilities")
    s.add_argument("--n-max", type=_positive, default=20)
    s.add_argument("--exact", action="store_true")
    s.add_argument("--allow-large", action="store_true")
    s.set_defaults(func=cmd_table)
    return p


def main(argv: list[str] | None = None, out=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if not hasattr(args, "allow_large"):
        args.allow_large = False
    failures: list[str] = []
    try:
        args.func(args, Emitter(args, out), failures)
    except (InvalidArgument, EnumerationLimitError) as exc:
        print(f"dsp {args.command}: error: {exc}", file=sys.stderr)
        return 2
    except NumericFailure as exc:
        print(f"dsp {args.command}: numerical failure: {exc}", file=sys.stderr)
        return 1
    if failures:
        for f in failures:
            print(f"verification failed: {f}", file=sys.stderr)
        return 1
    return 0
