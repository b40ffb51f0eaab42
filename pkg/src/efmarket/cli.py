"""Command-line front end.

Exit codes: 0 success, 2 verification failure, 3 parse or format error,
4 regime mismatch, 5 size-cap refusal.
"""

from __future__ import annotations

import argparse
import json
import sys
import time
from fractions import Fraction
from pathlib import Path
from typing import Sequence

from .auction_hb import run_auction_hb
from .auction_lb import run_auction_lb
from .experiments import BenchConfig, bench, gap_report
from .instance import Instance, InstanceError, Regime, gen_lower_bound_instance, gen_random_instance
from .invariants import check_trace
from .market import RegimeError
from .oracle import DEFAULT_CAP, SizeCapError, optimal_ef_revenue
from .outcome import Outcome
from .prices import parse_rational
from .verify import MalformedOutcome, verify_outcome

EXIT_OK = 0
EXIT_VERIFY = 2
EXIT_PARSE = 3
EXIT_REGIME = 4
EXIT_CAP = 5


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message: str):  # bad flags count as a format error
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(EXIT_PARSE)


def _cap(text: str) -> tuple[int, int]:
    try:
        a, b = (int(x) for x in text.split(","))
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected N,M but got {text!r}") from None
    return a, b


def _eps(text: str) -> Fraction | None:
    if text == "limit":
        return None
    try:
        e = parse_rational(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected 'limit' or a positive rational, got {text!r}") from None
    if e <= 0:
        raise argparse.ArgumentTypeError("eps must be positive")
    return e


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="efmarket", description="Envy-free pricing auctions for budgeted matching markets.")
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp: argparse.ArgumentParser) -> None:
        sp.add_argument("--out", type=Path, help="write the JSON report here instead of stdout")

    run = sub.add_parser("run", help="run an auction on an instance file")
    run.add_argument("instance", type=Path)
    run.add_argument("--algo", choices=["hb", "lb", "auto"], default="auto")
    run.add_argument("--eps", type=_eps, default=None, metavar="{limit|RATIONAL}",
                     help="report revenue in the limit (default) or at a concrete epsilon")
    run.add_argument("--verify", action="store_true", help="run the verifiers and trace checks")
    common(run)

    ver = sub.add_parser("verify", help="verify an outcome report against its instance")
    ver.add_argument("instance", type=Path)
    ver.add_argument("outcome", type=Path)
    ver.add_argument("--eps", type=_eps, default=None, metavar="{limit|RATIONAL}")
    common(ver)

    orc = sub.add_parser("oracle", help="optimal pairwise envy-free revenue by exhaustive search")
    orc.add_argument("instance", type=Path)
    orc.add_argument("--oracle-cap", type=_cap, default=DEFAULT_CAP, metavar="N,M")
    common(orc)

    gen = sub.add_parser("gen", help="generate a random or lower-bound instance")
    gen.add_argument("--n", type=int, default=5)
    gen.add_argument("--m", type=int, default=5)
    gen.add_argument("--seed", type=int, default=0)
    gen.add_argument("--regime", choices=[r.value for r in Regime], default=Regime.HIGH_BUDGET.value)
    gen.add_argument("--lower-bound", action="store_true", help="the disjoint-singleton family of size --n")
    common(gen)

    b = sub.add_parser("bench", help="seeded fuzzing against verifiers and the oracle")
    b.add_argument("--algo", choices=["hb", "lb", "auto"], default="auto", help="auto runs both regimes")
    b.add_argument("--seed", type=int, default=0)
    b.add_argument("--count", type=int, default=100)
    b.add_argument("--n", type=int, default=8)
    b.add_argument("--m", type=int, default=8)
    b.add_argument("--oracle-cap", type=_cap, default=(4, 4), metavar="N,M")
    common(b)

    g = sub.add_parser("gap", help="uniform-price gap on the disjoint-singleton family")
    g.add_argument("--n", type=int, required=True)
    common(g)
    return p


def _emit(obj: dict, out: Path | None) -> None:
    text = json.dumps(obj, sort_keys=True, indent=2) + "\n"
    if out is None:
        sys.stdout.write(text)
    else:
        out.write_text(text)


def _load_instance(path: Path) -> Instance:
    try:
        return Instance.loads(path.read_text())
    except OSError as exc:
        raise InstanceError(f"cannot read {path}: {exc}") from exc


def _auction(instance: Instance, algo: str) -> Outcome:
    if algo == "auto":
        if instance.regime is Regime.HIGH_BUDGET:
            algo = "hb"
        elif instance.regime is Regime.LOW_BUDGET:
            algo = "lb"
        else:
            raise RegimeError("instance mixes budgets above and below valuations; no auction applies")
    return run_auction_hb(instance) if algo == "hb" else run_auction_lb(instance)


def _verification(instance: Instance, outcome: Outcome, eps: Fraction | None) -> dict:
    audited = outcome if eps is None else outcome.at_epsilon(eps)
    rep = verify_outcome(instance, audited).to_json()
    violations = check_trace(instance, outcome) if outcome.algorithm in ("hb", "lb") else []
    rep["trace_violations"] = violations
    rep["passed"] = rep["passed"] and not violations
    return rep


def cmd_run(args) -> int:
    instance = _load_instance(args.instance)
    outcome = _auction(instance, args.algo)
    report = {"outcome": outcome.to_json()}
    revenue = outcome.revenue() if args.eps is None else outcome.revenue_at(args.eps)
    report["revenue"] = str(revenue)
    report["eps"] = "limit" if args.eps is None else str(args.eps)
    code = EXIT_OK
    if args.verify:
        report["verification"] = _verification(instance, outcome, args.eps)
        code = EXIT_OK if report["verification"]["passed"] else EXIT_VERIFY
    _emit(report, args.out)
    if args.out is not None:
        print(f"revenue {revenue}")
    return code


def cmd_verify(args) -> int:
    instance = _load_instance(args.instance)
    try:
        obj = json.loads(args.outcome.read_text())
        outcome = Outcome.from_json(obj.get("outcome", obj))
    except (OSError, ValueError, KeyError, TypeError) as exc:
        raise InstanceError(f"cannot read outcome {args.outcome}: {exc}") from exc
    rep = _verification(instance, outcome, args.eps)
    _emit(rep, args.out)
    return EXIT_OK if rep["passed"] else EXIT_VERIFY


def cmd_oracle(args) -> int:
    instance = _load_instance(args.instance)
    res = optimal_ef_revenue(instance, args.oracle_cap)
    rep = res.to_json()
    check = verify_outcome(instance, res.as_outcome(), "pairwise")
    rep["witness_verified"] = check.passed
    _emit(rep, args.out)
    return EXIT_OK if check.passed else EXIT_VERIFY


def cmd_gen(args) -> int:
    if args.n < 1 or args.m < 1:
        raise UsageError("--n and --m must be at least 1")
    if args.lower_bound:
        inst = gen_lower_bound_instance(args.n)
    else:
        inst = gen_random_instance(args.n, args.m, args.regime, args.seed)
    _emit(inst.to_json(), args.out)
    return EXIT_OK


def cmd_bench(args) -> int:
    regimes = {
        "hb": (Regime.HIGH_BUDGET,),
        "lb": (Regime.LOW_BUDGET,),
        "auto": (Regime.HIGH_BUDGET, Regime.LOW_BUDGET),
    }[args.algo]
    cfg = BenchConfig(args.seed, args.count, args.n, args.m, regimes, args.oracle_cap)
    start = time.perf_counter()
    report, ok = bench(cfg)
    _emit(report, args.out)
    # timing stays off the report so that reruns are byte-identical
    print(f"bench: {time.perf_counter() - start:.2f}s", file=sys.stderr)
    if not ok:
        f = report["failure"]
        print(f"bench: {f['class']} violation in {f['regime']} instance {f['index']}", file=sys.stderr)
    return EXIT_OK if ok else EXIT_VERIFY


def cmd_gap(args) -> int:
    if args.n < 1:
        raise UsageError("--n must be at least 1")
    _emit(gap_report(args.n), args.out)
    return EXIT_OK


COMMANDS = {
    "run": cmd_run,
    "verify": cmd_verify,
    "oracle": cmd_oracle,
    "gen": cmd_gen,
    "bench": cmd_bench,
    "gap": cmd_gap,
}


def main(argv: Sequence[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return COMMANDS[args.command](args)
    except (InstanceError, MalformedOutcome, UsageError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except RegimeError as exc:
        print(f"regime mismatch: {exc}", file=sys.stderr)
        return EXIT_REGIME
    except SizeCapError as exc:
        print(f"refused: {exc}", file=sys.stderr)
        return EXIT_CAP


if __name__ == "__main__":
    raise SystemExit(main())
