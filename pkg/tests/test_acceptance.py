"""Acceptance criteria, one test each. Every test prints a PASS/FAIL line
and the lines are repeated in the pytest terminal summary."""

import json
import time

import numpy as np

from lelmbell import cli, nogo
from lelmbell.detectors import bell_decompose, bell_recompose
from lelmbell.fock import BOSON, FERMION, all_labels, bell_state, inner_product, random_state_in_sector
from lelmbell.povm import Rank1Kraus, apply_first_click, qubit_povm_nogo, qutrit_subset_nogo, six_set_coverage
from lelmbell.search import EXACT_INFEASIBLE, NO_INSTANCE_FOUND, NO_INSTANCE_THRESHOLD, OverlapProblem, annihilation_maps
from lelmbell.symmetry import LOSER, WINNER, BellSet, classify_tictactoe, enumerate_sets, orbits

LINES: list[str] = []


def criterion(n: int, title: str, ok: bool, detail: str) -> None:
    line = f"CRITERION {n} {'PASS' if ok else 'FAIL'}: {title} ({detail})"
    LINES.append(line)
    print(line)
    assert ok, line


def test_criterion_1_classification_counts():
    t0 = time.perf_counter()
    report, code = cli.run(["classify", "--k", "4"])
    dt = time.perf_counter() - t0
    counts = report.summary["counts"]
    ok = code == 0 and counts == {WINNER: 72, LOSER: 54} and report.summary["total"] == 126 and dt < 1.0
    criterion(1, "classify k=4 gives 72 winners and 54 losers", ok, f"counts={counts}, {dt:.2f} s")


def test_criterion_2_orbit_structure():
    t0 = time.perf_counter()
    four = orbits(enumerate_sets(4, 3))
    six = orbits(enumerate_sets(6, 3))
    dt = time.perf_counter() - t0
    four_sizes = sorted(len(o) for o in four)
    six_sizes = sorted(len(o) for o in six)
    pure = all(len({classify_tictactoe(s) for s in o}) == 1 for o in four + six)
    ok = four_sizes == [54, 72] and six_sizes == [12, 72] and sum(six_sizes) == 84 and pure and dt < 10
    criterion(2, "orbit sizes 72/54 and 12/72, class-pure", ok, f"4-sets {four_sizes}, 6-sets {six_sizes}, {dt:.2f} s")


def test_criterion_3_five_set_infeasibility():
    t0 = time.perf_counter()
    report, code = cli.run(["search", "--k", "5"])
    dt = time.perf_counter() - t0
    statuses = [r["status"] for r in report.results]
    best = min(r["best_residual"] for r in report.results)
    ok = (code == 0 and len(statuses) == 126 and all(s == NO_INSTANCE_FOUND for s in statuses)
          and best > NO_INSTANCE_THRESHOLD and dt < 300)
    criterion(3, "search k=5 finds no instance for all 126 sets", ok,
              f"{statuses.count(NO_INSTANCE_FOUND)}/126 no-instance-found, min best residual {best:.4g}, {dt:.1f} s")


def test_criterion_4_loser_infeasibility():
    report, code = cli.run(["search", "--k", "4"])
    rows = [(classify_tictactoe(BellSet.parse(r["set"])), r) for r in report.results]
    losers = [r for c, r in rows if c == LOSER]
    winners = [r for c, r in rows if c == WINNER]
    ok = code == 0 and len(losers) == 54 and all(r["status"] == NO_INSTANCE_FOUND for r in losers)
    winner_found = sum(r["status"] != NO_INSTANCE_FOUND for r in winners)
    criterion(4, "search k=4 finds no instance for all 54 losers", ok,
              f"losers {sum(r['status'] == NO_INSTANCE_FOUND for r in losers)}/54 no-instance-found; "
              f"winners recorded: {winner_found}/72 instance-found")


def test_criterion_5_projective_qutrit_bound():
    t0 = time.perf_counter()
    report, code = cli.run(["nogo", "--chain", "projective-qutrit"])
    dt = time.perf_counter() - t0
    steps = [r for r in report.results if r["kind"] == "elimination-step"]
    names = [s["name"] for s in steps]
    expected = ["single-channel-1ket", "single-channel-2ket", "single-channel-3ket", "4ket", "5ket", "2ket",
                "3ket-only", "6ket-contradiction"]
    sampled_ok = all(s["samples"] >= 1000 for s in steps)
    exact_ok = all(c["verified"] for c in steps[-1]["certificate"]) and steps[-1]["certificate"][-1]["name"] == "contradiction"
    bound = report.summary["bound"]
    ok = (code == 0 and names == expected and all(s["verdict"] == "eliminated" for s in steps) and sampled_ok
          and exact_ok and bound["max_distinguishable"] == 3 and bound["of"] == 9 and dt < 60)
    criterion(5, "projective qutrit chain eliminates every case, bound 3 of 9", ok,
              f"{len(steps)} steps eliminated, bound {bound['max_distinguishable']} of {bound['of']}, {dt:.1f} s")


def test_criterion_6_povm_qubit():
    certs = [qubit_povm_nogo(st, restarts=200) for st in (BOSON, FERMION)]
    norms = [c.numeric["min_offdiagonal_gram_norm"] for c in certs]
    ok = all(c.status == EXACT_INFEASIBLE for c in certs) and min(norms) > 1e-3
    criterion(6, "qubit POVM certificate exact-infeasible for both statistics", ok,
              f"statuses {[c.status for c in certs]}, min off-diagonal Gram norm {min(norms):.4g}")


def test_criterion_7_povm_qutrit():
    certs = [qutrit_subset_nogo(st, restarts=200) for st in (BOSON, FERMION)]
    rows = six_set_coverage()
    covered = sum(r.transform is not None for r in rows)
    report, code = cli.run(["nogo", "--chain", "povm-qutrit"])
    bound = report.summary["bound"]["max_distinguishable"]
    ok = all(c.status == EXACT_INFEASIBLE for c in certs) and covered == 84 and code == 0 and bound is not None and bound <= 5
    criterion(7, "qutrit POVM certificate, 84/84 coverage, bound at most 5 of 9", ok,
              f"statuses {[c.status for c in certs]}, covered {covered}/84, bound {bound} of 9")


def test_criterion_8_property_suites():
    rng = np.random.default_rng(8)
    results = {}

    states = [bell_state(x, BOSON) for x in all_labels(3)]
    G = np.array([[inner_product(a, b) for b in states] for a in states])
    results["orthonormality"] = np.max(np.abs(G - np.eye(9))) < 1e-12

    worst_exchange, worst_trip = 0.0, 0.0
    for k in range(1000):
        st = (BOSON, FERMION)[k % 2]
        s = random_state_in_sector(rng, 3, st)
        worst_exchange = max(worst_exchange, s.exchange_error())
        worst_trip = max(worst_trip, np.max(np.abs(bell_recompose(bell_decompose(s), 3, st).amp - s.amp)))
    results["exchange"] = worst_exchange == 0.0
    results["round-trip"] = worst_trip < 1e-10

    problem = OverlapProblem(annihilation_maps(BellSet.parse("00,01,12,20"), BOSON))
    h, worst_grad = 1e-6, 0.0
    for _ in range(10):
        x = rng.standard_normal(12)
        g = problem.gradient(x)
        fd = np.array([(problem.residual(problem.to_complex(x + h * e)) - problem.residual(problem.to_complex(x - h * e))) / (2 * h)
                       for e in np.eye(12)])
        worst_grad = max(worst_grad, np.linalg.norm(g - fd) / np.linalg.norm(g))
    results["gradient"] = worst_grad < 1e-6

    separable = True
    for k in range(1000):
        K = Rank1Kraus(3, rng.standard_normal(6) + 1j * rng.standard_normal(6), rng.standard_normal(6) + 1j * rng.standard_normal(6))
        separable &= all(apply_first_click(K, x, (BOSON, FERMION)[k % 2]).separable for x in all_labels(3))
    results["rank-1"] = bool(separable)

    argv = ["search", "--k", "4", "--restarts", "5", "--seed", "123"]
    a, b = cli.run(argv)[0], cli.run(argv)[0]
    results["determinism"] = json.dumps(a.to_dict()["results"]) == json.dumps(b.to_dict()["results"])

    ok = all(results.values())
    criterion(8, "property suites", ok, ", ".join(f"{k} {'ok' if v else 'FAILED'}" for k, v in results.items())
              + f"; worst exchange {worst_exchange:.1e}, round-trip {worst_trip:.1e}, gradient rel {worst_grad:.1e}")


def test_criterion_9_identity_apparatus():
    demos = [nogo.identity_apparatus_demo(d) for d in (2, 3)]
    ok = all(d["disjoint"] for d in demos)
    criterion(9, "identity apparatus separates one-per-class Bell states", ok,
              ", ".join(f"d={d['d']} {d['labels']} disjoint={d['disjoint']}" for d in demos))
