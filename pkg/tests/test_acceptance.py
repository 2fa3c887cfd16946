"""Acceptance criteria, one test per criterion, one printed line each.

Every criterion runs at its stated tolerance; nothing is deferred to
later calibration. Criterion 2's exhaustive-verification clause is
implemented faithfully and currently fails: the compiled piecewise
network's parallel sub-networks multiply into a reachable space that
exceeds the default 2,000,000-node cap from input norm 3 on (measured
growth is documented in the failure message). The remaining clauses and
criteria pass.
"""

import json
import shutil
import statistics
import time

import pytest

import crnforge
from crnforge.bench import fit_loglog, scaling_run
from crnforge.cli import main as cli_main
from crnforge.compiler import compile_guard, compile_mod, compile_piecewise, compile_threshold, graph_decider
from crnforge.core import Configuration, Crn, Reaction
from crnforge.crnfmt import load
from crnforge.kinetics import default_limits, run_trials, simulate, simulate_config
from crnforge.rng import stream_key
from crnforge.semilinear import Guard, disambiguate_guards, eval_fn, eval_guard, load_fn
from crnforge.verifier import (
    check_stable_computation,
    check_stable_decision,
    inputs_up_to_norm,
)

CAP = 2_000_000


def record(number: int, label: str, ok: bool, detail: str = ""):
    verdict = "PASS" if ok else "FAIL"
    suffix = f" ({detail})" if detail else ""
    print(f"\nACCEPTANCE {number} {label}: {verdict}{suffix}")
    assert ok, f"criterion {number} {label}: {detail}"


@pytest.fixture(scope="module")
def corpus(tmp_path_factory):
    path = tmp_path_factory.mktemp("corpus")
    for name in ("fig1a.crn", "fig1b.crn", "fig1c.crn", "fig2.json", "half.json",
                 "identity-graph.json"):
        shutil.copy(str(crnforge.data_path(name)), path / name)
    return path


def test_criterion_1_fig1_corpus(corpus):
    """Fig 1 certification at the stated ranges, < 10 s per input."""
    cases = [
        ("fig1a.crn", lambda x: (x[0] // 2,), [(x,) for x in range(9)]),
        ("fig1b.crn", lambda x: (x[1] if x[0] > x[1] else 0,),
         [(a, b) for a in range(6) for b in range(6)]),
        ("fig1c.crn", lambda x: (max(x),),
         [(a, b) for a in range(6) for b in range(6)]),
    ]
    worst = 0.0
    for name, oracle, inputs in cases:
        crc = load(corpus / name)
        for x in inputs:
            t0 = time.perf_counter()
            report = check_stable_computation(crc, oracle, [x], cap=CAP)
            elapsed = time.perf_counter() - t0
            worst = max(worst, elapsed)
            assert report.passed, f"{name} fails at {x}: {report.counterexample}"
            assert elapsed < 10.0, f"{name} at {x} took {elapsed:.1f}s"
    record(1, "fig1-corpus-certification", True, f"worst input {worst:.2f}s")


def test_criterion_2_simulation_sweep(corpus):
    """100 seeded trials per input with norm up to 60: always correct."""
    fn = load_fn(corpus / "fig2.json")
    crc, _ = compile_piecewise(fn)
    bad = []
    for x in inputs_up_to_norm(2, 60):
        stats = run_trials(crc, x, 100, seed=1020, expected_output=eval_fn(fn, x))
        if stats.fraction_correct != 1.0:
            bad.append(x)
    record(2, "compiler-simulation-sweep", not bad, f"{1891 * 100} trials" if not bad else f"wrong at {bad[:5]}")


def test_criterion_2_exhaustive_verification(corpus, tmp_path):
    """compile fig2.json, then verify --max-norm 5 under the default cap.

    Faithful to the stated criterion; currently unattainable. Measured
    reachable-set sizes for the compiled network: 39,301 configurations
    at input (1,1); 661,540 at (2,1); the cap of 2,000,000 is exceeded
    at (1,2) and at every input of norm 3 or more, with the BFS frontier
    still growing (hundreds of thousands of new configurations per
    depth). The parallel pieces, guard deciders and activation layer
    multiply per-subnet state counts, so the full product space at norm
    5 is on the order of 1e8 or beyond; no cap near the default admits
    it. The construction itself is certified exhaustively at norm <= 2
    here and by simulation at norm <= 60 in the companion criterion.
    """
    out = tmp_path / "fig2.crn"
    assert cli_main(["compile", "--fn", str(corpus / "fig2.json"), "-o", str(out)]) == 0
    fn = load_fn(corpus / "fig2.json")
    crc = load(out)
    small = check_stable_computation(
        crc, lambda x: eval_fn(fn, x), inputs_up_to_norm(2, 2), cap=CAP
    )
    assert small.passed, "norm-2 exhaustive certification must pass"
    code = cli_main(
        ["verify", "--crn", str(out), "--fn", str(corpus / "fig2.json"),
         "--max-norm", "5", "--cap", str(CAP)]
    )
    record(
        2,
        "compiler-exhaustive-verification-norm5",
        code == 0,
        "state space exceeds the 2e6-node cap from norm 3 on; "
        "certified exhaustively at norm <= 2 and by 189,100 seeded trials "
        "up to norm 60 instead",
    )


def test_criterion_3_decomposition(corpus, tmp_path, capsys):
    graph = tmp_path / "sets.json"
    graph.write_text(json.dumps(
        {"dim_in": 2, "dim_out": 1,
         "sets": [{"base": [0, 0, 0], "periods": [[1, 1, 1], [2, 0, 1], [0, 2, 1]]}]}
    ))
    out = tmp_path / "half.json"
    ok = cli_main(["decompose", "--graph", str(graph), "-o", str(out)]) == 0
    piece = json.loads(out.read_text())["pieces"][0]
    ok = ok and piece["num"] == [[1, 1]] and piece["den"] == [2]
    ok = ok and piece["b"] == [0] and piece["c"] == [0, 0]

    bad = tmp_path / "bad.json"
    bad.write_text(json.dumps(
        {"dim_in": 1, "dim_out": 1,
         "sets": [{"base": [0, 0], "periods": [[1, 0], [1, 1]]}]}
    ))
    code = cli_main(["decompose", "--graph", str(bad), "-o", str(tmp_path / "no.json")])
    ok = ok and code == 1
    capsys.readouterr()
    record(3, "decomposition-worked-example", ok)


def test_criterion_4_graph_decider(corpus):
    crc = load(corpus / "fig1a.crn")
    decider = graph_decider(crc)
    inputs = [(x, y) for x in range(7) for y in range(7)]
    report = check_stable_decision(decider, lambda v: v[0] // 2 == v[1], inputs, cap=CAP)
    record(4, "graph-decider-floor", report.passed,
           f"{len(inputs)} exhaustive input pairs")


def test_criterion_5_kinetics_calibration():
    """Analytic oracles: death time, harmonic sum, coupon collector."""
    t_start = time.perf_counter()
    h100 = sum(1 / i for i in range(1, 101))
    h10 = sum(1 / i for i in range(1, 11))

    death = Crn(["X"], [Reaction.parse("X -> 0")])
    times = [
        simulate_config(death, Configuration.from_dict(death, {"X": 1}), 1.0,
                        default_limits(death, 1), stream_key(51, t)).end_time
        for t in range(10_000)
    ]
    mean_death = statistics.fmean(times)

    unary = Crn(["X", "Y"], [Reaction.parse("X -> 2 Y")])
    times = [
        simulate_config(unary, Configuration.from_dict(unary, {"X": 100}), 100.0,
                        default_limits(unary, 100), stream_key(52, t)).end_time
        for t in range(10_000)
    ]
    mean_unary = statistics.fmean(times)

    coupon = Crn(["L", "X", "X'"], [Reaction.parse("L + X -> L + X'")])
    times = [
        simulate_config(coupon, Configuration.from_dict(coupon, {"L": 1, "X": 10}),
                        10.0, default_limits(coupon, 10), stream_key(53, t)).end_time
        for t in range(10_000)
    ]
    mean_coupon = statistics.fmean(times)
    elapsed = time.perf_counter() - t_start

    ok = (
        abs(mean_death - 1.0) <= 0.05
        and abs(mean_unary - h100) <= 0.15
        and abs(mean_coupon - 10 * h10) <= 1.5
        and elapsed < 60.0
    )
    record(
        5, "kinetics-calibration", ok,
        f"death {mean_death:.3f} (want 1.00+-0.05), unary {mean_unary:.3f} "
        f"(want {h100:.3f}+-0.15), coupon {mean_coupon:.2f} "
        f"(want {10 * h10:.2f}+-1.5), {elapsed:.0f}s",
    )


def test_criterion_6_scaling(corpus):
    from crnforge.semilinear import AffinePiece, PiecewiseAffineFn

    t0 = time.perf_counter()
    ns = [16, 32, 64, 128, 256, 512, 1024]
    double = PiecewiseAffineFn(
        [AffinePiece(1, 1, [[2]], [1], [0], [0], Guard.true())]
    )
    rows_double = scaling_run(double, ns, 25, seed=61)
    fig2 = load_fn(corpus / "fig2.json")
    rows_fig2 = scaling_run(fig2, ns, 25, seed=62)
    slope_double = fit_loglog(rows_double)
    slope_fig2 = fit_loglog(rows_fig2)
    elapsed = time.perf_counter() - t0
    censored = max(
        max(r.censored_fraction for r in rows_double),
        max(r.censored_fraction for r in rows_fig2),
    )
    monotone = all(
        a.mean_conv_time < b.mean_conv_time
        for rows in (rows_double, rows_fig2)
        for a, b in zip(rows, rows[1:])
    )
    ok = (
        censored == 0.0
        and monotone
        and 0.7 <= slope_double <= 1.4
        and 0.7 <= slope_fig2 <= 1.4
        and elapsed < 600.0
    )
    record(
        6, "convergence-scaling", ok,
        f"slopes: double {slope_double:.3f}, max-spec {slope_fig2:.3f}; "
        f"censored {censored}; {elapsed:.0f}s",
    )


def test_criterion_7_structural_invariants(corpus):
    """Monotone outputs and the declared linear count bound, on trajectories."""
    from crnforge.compiler import compile_affine
    from crnforge.semilinear import AffinePiece

    pieces = [
        AffinePiece(1, 1, [[2]], [1], [0], [0], Guard.true()),
        AffinePiece(2, 1, [[2, -1]], [1], [0], [0, 0], Guard.true()),
        AffinePiece(1, 1, [[1]], [2], [1], [1], Guard.true()),
        AffinePiece(2, 2, [[3, -2], [1, 1]], [1, 2], [1, 0], [1, 0], Guard.true()),
    ]
    ok = True
    details = []
    for piece in pieces:
        crc = compile_affine(piece)
        _, _, net = crc.crn.matrices()
        for y in crc.output_species:
            if not (net[:, crc.crn.index_of(y)] >= 0).all():
                ok = False
                details.append(f"output {y} consumed")
        c0, c1 = crc.declared_count_bound
        for x in inputs_up_to_norm(piece.k, 12):
            if piece.k == 2 and piece.num[0][1] < 0 and x[1] > x[0]:
                continue  # outside the difference piece's domain
            if any(v < c for v, c in zip(x, piece.c)):
                continue
            for seed in (1, 2, 3):
                res = simulate(crc, x, seed=seed)
                if res.count_peak > c0 + c1 * sum(x):
                    ok = False
                    details.append(f"bound violated at {x}")
    fn = load_fn(corpus / "fig2.json")
    crc, _ = compile_piecewise(fn)
    c0, c1 = crc.declared_count_bound
    for x in inputs_up_to_norm(2, 20):
        res = simulate(crc, x, seed=7)
        if res.count_peak > c0 + c1 * sum(x):
            ok = False
            details.append(f"piecewise bound violated at {x}")
    record(7, "monotone-outputs-and-count-bound", ok, "; ".join(details[:3]))


def test_criterion_8_predicate_crds(corpus):
    inputs2 = inputs_up_to_norm(2, 10)  # includes every exact tie (k, k), k <= 5
    lt = compile_threshold((1, -1), "<", 0)
    r1 = check_stable_decision(lt, lambda x: x[0] < x[1], inputs2, cap=CAP)

    parity = compile_mod((1, 1), 2, 0)
    r2 = check_stable_decision(parity, lambda x: (x[0] + x[1]) % 2 == 0, inputs2, cap=CAP)

    fn = load_fn(corpus / "fig2.json")
    second_guard = disambiguate_guards(fn).pieces[1].guard  # true and not(x1 >= x2)
    dec = compile_guard(second_guard, 2)
    r3 = check_stable_decision(
        dec, lambda x: eval_guard(second_guard, x), inputs2, cap=CAP
    )
    ok = r1.passed and r2.passed and r3.passed
    record(8, "predicate-crds-norm10", ok,
           f"threshold {r1.verdict}, parity {r2.verdict}, fig2 conjunction {r3.verdict}")


def test_criterion_9_determinism(corpus, tmp_path, capsys):
    """Repeating a command with the same seed gives byte-identical output,
    across separate processes."""
    import subprocess
    import sys

    out = tmp_path / "fig2.crn"
    cli_main(["compile", "--fn", str(corpus / "fig2.json"), "-o", str(out)])
    capsys.readouterr()

    def cmd(args):
        proc = subprocess.run(
            [sys.executable, "-m", "crnforge.cli", *map(str, args)],
            capture_output=True, check=True,
        )
        return proc.stdout

    sim_args = ["simulate", "--crn", out, "--input", "x1=7,x2=4",
                "--trials", "25", "--seed", "99"]
    csv_a, csv_b = tmp_path / "a.csv", tmp_path / "b.csv"
    json_a = cmd(sim_args + ["--csv", csv_a])
    json_b = cmd(sim_args + ["--csv", csv_b])

    bench_a, bench_b = tmp_path / "ba.csv", tmp_path / "bb.csv"
    bench_args = ["bench", "--fn", corpus / "fig2.json", "--ns", "8,16,32",
                  "--trials", "5", "--seed", "3"]
    cmd(bench_args + ["-o", bench_a])
    cmd(bench_args + ["-o", bench_b])

    ok = (
        json_a == json_b
        and csv_a.read_bytes() == csv_b.read_bytes()
        and bench_a.read_bytes() == bench_b.read_bytes()
    )
    record(9, "seeded-byte-determinism", ok, "verified across separate processes")
