"""Command-line front end.

    lelmbell classify --k 4
    lelmbell search --k 5 --seed 42
    lelmbell nogo --chain projective-qutrit

The JSON report goes to stdout, a short summary to stderr. Exit status is 0
when everything verifies, 1 on a verification failure and 2 on bad usage.
"""

from __future__ import annotations

import argparse
import sys
import time
from collections import Counter
from contextlib import contextmanager

from . import nogo, povm
from .fock import BOSON, FERMION, STATISTICS, DomainError
from .report import RunReport, classification_record, feasibility_record, jsonable
from .search import SearchConfig, batch_classify
from .symmetry import classify_tictactoe, enumerate_sets

EXIT_OK = 0
EXIT_VERIFICATION = 1
EXIT_USAGE = 2

CHAINS = ("projective-qutrit", "povm-qubit", "povm-qutrit", "six-set-coverage")

_defaults = SearchConfig()


class UsageError(Exception):
    pass


class Timer:
    def __init__(self):
        self.ms: dict[str, float] = {}

    @contextmanager
    def phase(self, name: str):
        t0 = time.perf_counter()
        try:
            yield
        finally:
            self.ms[name] = round((time.perf_counter() - t0) * 1000, 3)


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--d", type=int, default=3, help="qudit dimension (default 3)")
    common.add_argument("--k", type=int, default=4, help="Bell-set size (default 4)")
    common.add_argument("--statistics", choices=STATISTICS, default=None,
                        help="particle statistics; search defaults to boson, POVM chains run both")
    common.add_argument("--restarts", type=int, default=_defaults.restarts)
    common.add_argument("--seed", type=int, default=_defaults.seed)
    common.add_argument("--tol", type=float, default=_defaults.accept_tolerance,
                        help="residual at or below which a search instance counts as found")
    common.add_argument("--samples", type=int, default=1000, help="random draws per elimination step")
    common.add_argument("--format", choices=("json", "csv"), default="json")

    parser = argparse.ArgumentParser(prog="lelmbell", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)
    sub.add_parser("classify", parents=[common], help="tic-tac-toe classes of all k-sets (k = 4 or 6)")
    sub.add_parser("search", parents=[common], help="numerical feasibility search over all k-sets")
    p = sub.add_parser("nogo", parents=[common], help="run a no-go verification chain")
    p.add_argument("--chain", choices=CHAINS, default="projective-qutrit")
    return parser


def config_echo(args: argparse.Namespace) -> dict:
    return dict(sorted(vars(args).items()))


def cmd_classify(args, timer: Timer) -> tuple[RunReport, bool]:
    if args.d != 3 or args.k not in (4, 6):
        raise UsageError("classify supports d = 3 with k = 4 or k = 6")
    with timer.phase("classify"):
        results = [classification_record(s) for s in enumerate_sets(args.k, args.d)]
    counts = Counter(r["class"] for r in results)
    return RunReport("classify", config_echo(args), results, {"total": len(results), "counts": dict(sorted(counts.items()))}), True


def _search_config(args) -> SearchConfig:
    if args.d < 2:
        raise UsageError("--d must be >= 2")
    if not 1 <= args.k <= args.d**2:
        raise UsageError(f"--k must lie in [1, {args.d ** 2}]")
    try:
        return SearchConfig(restarts=args.restarts, accept_tolerance=args.tol, seed=args.seed,
                            statistics=args.statistics or BOSON)
    except DomainError as exc:
        raise UsageError(str(exc)) from exc


def cmd_search(args, timer: Timer) -> tuple[RunReport, bool]:
    cfg = _search_config(args)
    with timer.phase("search"):
        reports = batch_classify(args.k, args.d, cfg)
    results = [feasibility_record(r) for r in reports]
    summary = {
        "total": len(results),
        "statuses": dict(sorted(Counter(r.status for r in reports).items())),
        "min_best_residual": min(r.best_residual for r in reports),
    }
    if args.d == 3 and args.k == 4:
        by_class = Counter((classify_tictactoe(r.set), r.status) for r in reports)
        summary["by_class"] = {f"{c}/{s}": n for (c, s), n in sorted(by_class.items())}
    return RunReport("search", config_echo(args), results, summary), True


def _povm_statistics(args) -> tuple[str, ...]:
    return (args.statistics,) if args.statistics else povm.STATISTICS_BOTH


def _projective(args, timer, results, summary) -> list[str]:
    if args.statistics == FERMION:
        raise UsageError("the projective-qutrit chain is established for bosons only")
    if args.samples < 1:
        raise UsageError("--samples must be >= 1")
    cfg = _search_config(argparse.Namespace(**{**vars(args), "d": 3, "k": 4}))
    with timer.phase("projective-qutrit"):
        chain = nogo.projective_qutrit_chain(args.samples, args.seed, cfg)
    results += [s.to_dict() for s in chain["steps"]]
    results += [chain["identity"], chain["losers"]]
    failed = [s.name for s in chain["steps"] if not s.eliminated]
    if not chain["identity"]["disjoint"]:
        failed.append("identity-apparatus")
    if not chain["losers"]["ok"]:
        failed.append("loser-class")
    summary["steps"] = {s.name: s.verdict for s in chain["steps"]}
    summary["bound"] = chain["bound"] | {"statement": "at most 3 of 9 bosonic qutrit Bell states under projective LELM"}
    return failed


def _certificates(fn, name, args, timer, results, summary) -> list[str]:
    failed = []
    for st in _povm_statistics(args):
        with timer.phase(f"{name}-{st}"):
            cert = fn(st, restarts=args.restarts, seed=args.seed)
        results.append(cert.to_dict())
        summary.setdefault("certificates", {})[f"{name}/{st}"] = cert.status
        if not cert.verified:
            bad = next((s["name"] for s in cert.steps if not s["verified"]), cert.name)
            failed.append(f"{name}/{st}: {bad}")
    return failed


def _coverage(timer, results, summary) -> list[str]:
    with timer.phase("six-set-coverage"):
        rows = povm.six_set_coverage()
    for r in rows:
        results.append({"kind": "coverage", "set": r.set.key, "class": r.tictactoe,
                        "transform": r.transform, "image": None if r.image is None else r.image.key})
    covered = sum(r.transform is not None for r in rows)
    summary["coverage"] = {"covered": covered, "total": len(rows)}
    return [f"six-set-coverage: {r.set.key}" for r in rows if r.transform is None]


def cmd_nogo(args, timer: Timer) -> tuple[RunReport, bool]:
    results: list = []
    summary: dict = {"chain": args.chain}
    if args.chain == "projective-qutrit":
        failed = _projective(args, timer, results, summary)
    elif args.chain == "povm-qubit":
        failed = _certificates(povm.qubit_povm_nogo, "povm-qubit", args, timer, results, summary)
        summary["bound"] = {"d": 2, "statistics": list(_povm_statistics(args)), "of": 4,
                            "max_distinguishable": None if failed else 3,
                            "statement": "no LELM POVM distinguishes all four qubit Bell states"}
    elif args.chain == "povm-qutrit":
        failed = _certificates(povm.qutrit_subset_nogo, "povm-qutrit-subset", args, timer, results, summary)
        failed += _coverage(timer, results, summary)
        summary["bound"] = {"d": 3, "statistics": list(_povm_statistics(args)), "of": 9,
                            "dimension_bound": povm.distinguishability_upper_bound(3),
                            "max_distinguishable": None if failed else 5,
                            "statement": "at most 5 of 9 qutrit Bell states under LELM POVMs"}
    else:
        failed = _coverage(timer, results, summary)
    summary["failed"] = failed
    return RunReport("nogo", config_echo(args), results, summary), not failed


COMMANDS = {"classify": cmd_classify, "search": cmd_search, "nogo": cmd_nogo}


def run(argv=None) -> tuple[RunReport | None, int]:
    parser = build_parser()
    args = parser.parse_args(argv)  # exits with status 2 on malformed flags
    timer = Timer()
    try:
        report, ok = COMMANDS[args.command](args, timer)
    except UsageError as exc:
        parser.print_usage(sys.stderr)
        print(f"lelmbell: error: {exc}", file=sys.stderr)
        return None, EXIT_USAGE
    report.timings = timer.ms
    return report, EXIT_OK if ok else EXIT_VERIFICATION


def _print_summary(report: RunReport, code: int) -> None:
    s = report.summary
    lines = [f"{report.command}: {len(report.results)} result(s)"]
    for key in ("counts", "statuses", "by_class", "steps", "certificates", "coverage"):
        if key in s:
            lines.append(f"  {key}: {jsonable(s[key])}")
    if "bound" in s:
        b = s["bound"]
        lines.append(f"  bound: {b['max_distinguishable']} of {b['of']} ({b['statement']})")
    for f in s.get("failed", []):
        lines.append(f"  FAILED: {f}")
    if code == EXIT_VERIFICATION:
        lines.append("verification failed")
    print("\n".join(lines), file=sys.stderr)


def main(argv=None) -> int:
    report, code = run(argv)
    if report is None:
        return code
    out = report.to_csv() if report.config.get("format") == "csv" else report.to_json()
    sys.stdout.write(out if out.endswith("\n") else out + "\n")
    _print_summary(report, code)
    return code


if __name__ == "__main__":
    sys.exit(main())
