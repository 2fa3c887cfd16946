"""Command-line surface tying the pipeline together.

Subcommands: eval, compile, simulate, verify, verify-pred, decompose,
hat, graph-decider, search-crc, bench. Exit codes: 0 success, 1
verification failure (counterexample printed), 2 usage or format
error, 3 cap/limit/unbounded refusals. All outputs are deterministic
under a fixed seed and carry no timestamps.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from pathlib import Path

from . import bench as bench_mod
from . import crnfmt
from .compiler import (
    CompileOptions,
    compile_piecewise,
    compile_search,
    graph_decider,
    search_crc,
)
from .core import Crc, Crd
from .decompose import extract_affine
from .errors import (
    ArityError,
    CapExceededError,
    CrnError,
    FormatError,
    NotAGraphError,
    UnboundedNetworkError,
)
from .kinetics import SimLimits, VolumePolicy, default_limits, run_trials, trial_rows_csv
from .semilinear import (
    PiecewiseAffineFn,
    eval_fn,
    eval_guard,
    graph_sets_to_json,
    guard_from_json,
    hat_transform,
    load_fn,
    load_graph_sets,
    save_fn,
)
from .verifier import DEFAULT_CAP, check_stable_computation, check_stable_decision, inputs_up_to_norm

EXIT_OK = 0
EXIT_VERIFY_FAIL = 1
EXIT_USAGE = 2
EXIT_LIMIT = 3


def _parse_named_vector(text: str, names: list[str], roles: dict[str, str] | None = None) -> list[int]:
    """Parse 'x1=4,x2=2' against role or species names."""
    values: dict[str, int] = {}
    if text.strip():
        for item in text.split(","):
            name, _, raw = item.strip().partition("=")
            if not raw:
                raise FormatError(f"bad input assignment {item.strip()!r}")
            key = name.strip()
            if roles and key in roles:
                key = roles[key]
            if key not in names:
                raise FormatError(f"unknown input {name.strip()!r} (have {names})")
            values[key] = int(raw)
    return [values.get(n, 0) for n in names]


def _load_machine(path: str):
    machine = crnfmt.load(path)
    if not isinstance(machine, (Crc, Crd)):
        raise FormatError(f"{path} declares neither outputs nor voters")
    return machine


def _input_roles(path: str) -> dict[str, str]:
    mpath = crnfmt.manifest_path(path)
    if mpath.exists():
        manifest = json.loads(mpath.read_text())
        return dict(manifest.get("input_roles", {}))
    return {}


def _cmd_eval(args) -> int:
    fn = load_fn(args.fn)
    x = _parse_named_vector(args.input, list(fn.input_names))
    value = eval_fn(fn, x)
    print(" ".join(str(v) for v in value))
    return EXIT_OK


def _cmd_compile(args) -> int:
    fn = load_fn(args.fn)
    opts = CompileOptions(scope_prefix=args.prefix)
    if args.backend == "fast":
        crc, opts = compile_piecewise(fn, opts)
        extra = {
            "backend": "fast",
            "fanout_width": opts.fanout_width,
            "input_roles": dict(zip(fn.input_names, crc.input_species)),
            "output_roles": {f"y{j + 1}": name for j, name in enumerate(crc.output_species)},
        }
    else:
        crc = compile_search(fn, opts)
        extra = {
            "backend": "search",
            "input_roles": dict(zip(fn.input_names, crc.input_species)),
            "output_roles": {f"y{j + 1}": name for j, name in enumerate(crc.output_species)},
        }
    crnfmt.save(args.output, crc, extra)
    print(f"wrote {args.output} ({len(crc.crn.species)} species, {len(crc.crn.reactions)} reactions)")
    return EXIT_OK


def _cmd_simulate(args) -> int:
    machine = _load_machine(args.crn)
    roles = _input_roles(args.crn)
    x = _parse_named_vector(args.input, list(machine.input_species), roles)
    policy = VolumePolicy() if args.volume == "auto" else VolumePolicy.fixed(float(args.volume))
    limits = None
    if args.max_events is not None or args.max_time is not None:
        base = default_limits(machine.crn, sum(x))
        limits = SimLimits(
            max_events=args.max_events if args.max_events is not None else base.max_events,
            max_time=args.max_time if args.max_time is not None else float("inf"),
        )
    expected = None
    if args.fn:
        fn = load_fn(args.fn)
        expected = eval_fn(fn, x)
    stats = run_trials(
        machine, x, args.trials, seed=args.seed, policy=policy, limits=limits,
        expected_output=expected,
    )

    def finite(v):
        return v if v is None or math.isfinite(v) else None

    doc = {
        "input": x,
        "trials": args.trials,
        "seed": args.seed,
        "mean_conv_time": finite(stats.mean_conv_time),
        "median_conv_time": finite(stats.median_conv_time),
        "stddev_conv_time": finite(stats.stddev_conv_time),
        "censored_fraction": stats.censored_fraction,
        "fraction_terminal": stats.fraction_terminal,
        "fraction_correct": stats.fraction_correct,
        "mean_count_peak": stats.mean_count_peak,
        "terminal": stats.fraction_terminal == 1.0,
    }
    if args.trials == 1:
        out = stats.rows[0].output
        doc["output"] = list(out) if isinstance(out, tuple) else out
    print(json.dumps(doc, sort_keys=True))
    if args.csv:
        Path(args.csv).write_text(trial_rows_csv(sum(x), args.seed, stats))
    return EXIT_OK


def _print_report(report, json_path: str | None) -> int:
    sys.stdout.write(report.render_text())
    if json_path:
        Path(json_path).write_text(json.dumps(report.to_json_dict(), indent=2, sort_keys=True) + "\n")
    return EXIT_OK if report.passed else EXIT_VERIFY_FAIL


def _cmd_verify(args) -> int:
    machine = _load_machine(args.crn)
    if not isinstance(machine, Crc):
        raise FormatError("verify needs a computer (.crn with an output section)")
    fn = load_fn(args.fn)
    inputs = inputs_up_to_norm(len(machine.input_species), args.max_norm)
    report = check_stable_computation(
        machine, lambda x: eval_fn(fn, x), inputs, cap=args.cap,
        allow_partial=args.allow_partial,
    )
    return _print_report(report, args.json)


def _cmd_verify_pred(args) -> int:
    machine = _load_machine(args.crd)
    if not isinstance(machine, Crd):
        raise FormatError("verify-pred needs a decider (.crn with a voter section)")
    guard = guard_from_json(json.loads(Path(args.guard).read_text()))
    inputs = inputs_up_to_norm(len(machine.input_species), args.max_norm)
    report = check_stable_decision(
        machine, lambda x: eval_guard(guard, x), inputs, cap=args.cap,
        allow_partial=args.allow_partial,
    )
    return _print_report(report, args.json)


def _cmd_decompose(args) -> int:
    k, l, sets = load_graph_sets(args.graph)
    pieces = [extract_affine(g, k, l) for g in sets.components]
    fn = PiecewiseAffineFn(pieces)
    save_fn(args.output, fn)
    print(f"wrote {args.output} ({len(pieces)} pieces; guards left as true)")
    return EXIT_OK


def _cmd_hat(args) -> int:
    k, l, sets = load_graph_sets(args.graph)
    lifted = hat_transform(sets, k, l)
    Path(args.output).write_text(
        json.dumps(graph_sets_to_json(k, 2 * l, lifted), indent=2) + "\n"
    )
    print(f"wrote {args.output}")
    return EXIT_OK


def _cmd_graph_decider(args) -> int:
    machine = _load_machine(args.crn)
    if not isinstance(machine, Crc):
        raise FormatError("graph-decider needs a computer (.crn with an output section)")
    crd = graph_decider(machine)
    crnfmt.save(args.output, crd, {"derived_from": Path(args.crn).name})
    print(f"wrote {args.output} (inputs {', '.join(crd.input_species)})")
    return EXIT_OK


def _cmd_search_crc(args) -> int:
    machine = _load_machine(args.crd)
    if not isinstance(machine, Crd):
        raise FormatError("search-crc needs a decider (.crn with a voter section)")
    crc = search_crc(machine, args.dim_in, args.dim_out)
    crnfmt.save(args.output, crc, {"backend": "search"})
    print(f"wrote {args.output} (unbounded search computer)")
    return EXIT_OK


def _cmd_bench(args) -> int:
    fn = load_fn(args.fn)
    ns = sorted(int(v) for v in args.ns.split(","))
    rows = bench_mod.scaling_run(fn, ns, args.trials, seed=args.seed)
    Path(args.output).write_text(bench_mod.rows_to_csv(rows))
    for row in rows:
        if row.warning:
            print(f"warning: n={row.n}: {row.warning}", file=sys.stderr)
    if len(rows) >= 3 and all(r.mean_conv_time > 0 for r in rows):
        print(f"log-log slope: {bench_mod.fit_loglog(rows):.4f}")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="crnforge", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("eval", help="evaluate a function spec at a named input")
    p.add_argument("--fn", required=True)
    p.add_argument("--input", required=True, help='e.g. "x1=4,x2=2"')
    p.set_defaults(run=_cmd_eval)

    p = sub.add_parser("compile", help="compile a function spec to a .crn network")
    p.add_argument("--fn", required=True)
    p.add_argument("-o", "--output", required=True)
    p.add_argument("--backend", choices=("fast", "search"), default="fast")
    p.add_argument("--prefix", default="")
    p.set_defaults(run=_cmd_compile)

    p = sub.add_parser("simulate", help="seeded stochastic trials of a machine")
    p.add_argument("--crn", required=True)
    p.add_argument("--input", required=True)
    p.add_argument("--trials", type=int, default=1)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--volume", default="auto")
    p.add_argument("--max-events", type=int, default=None)
    p.add_argument("--max-time", type=float, default=None)
    p.add_argument("--csv", default=None, help="write per-trial rows to this file")
    p.add_argument("--fn", default=None, help="oracle spec for fraction_correct")
    p.set_defaults(run=_cmd_simulate)

    p = sub.add_parser("verify", help="exhaustively certify a compiled computer")
    p.add_argument("--crn", required=True)
    p.add_argument("--fn", required=True)
    p.add_argument("--max-norm", type=int, default=6)
    p.add_argument("--cap", type=int, default=DEFAULT_CAP)
    p.add_argument("--allow-partial", action="store_true")
    p.add_argument("--json", default=None, help="also write the report as JSON")
    p.set_defaults(run=_cmd_verify)

    p = sub.add_parser("verify-pred", help="exhaustively certify a decider")
    p.add_argument("--crd", required=True)
    p.add_argument("--guard", required=True, help="guard formula JSON file")
    p.add_argument("--max-norm", type=int, default=10)
    p.add_argument("--cap", type=int, default=DEFAULT_CAP)
    p.add_argument("--allow-partial", action="store_true")
    p.add_argument("--json", default=None)
    p.set_defaults(run=_cmd_verify_pred)

    p = sub.add_parser("decompose", help="extract affine pieces from linear graph sets")
    p.add_argument("--graph", required=True)
    p.add_argument("-o", "--output", required=True)
    p.set_defaults(run=_cmd_decompose)

    p = sub.add_parser("hat", help="difference encoding of linear graph sets")
    p.add_argument("--graph", required=True)
    p.add_argument("-o", "--output", required=True)
    p.set_defaults(run=_cmd_hat)

    p = sub.add_parser("graph-decider", help="decider for a computer's graph")
    p.add_argument("--crn", required=True)
    p.add_argument("-o", "--output", required=True)
    p.set_defaults(run=_cmd_graph_decider)

    p = sub.add_parser("search-crc", help="search computer from a difference decider")
    p.add_argument("--crd", required=True)
    p.add_argument("--dim-in", type=int, required=True)
    p.add_argument("--dim-out", type=int, required=True)
    p.add_argument("-o", "--output", required=True)
    p.set_defaults(run=_cmd_search_crc)

    p = sub.add_parser("bench", help="convergence-time scaling ladder to CSV")
    p.add_argument("--fn", required=True)
    p.add_argument("--ns", required=True, help="comma-separated input sizes")
    p.add_argument("--trials", type=int, default=25)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("-o", "--output", required=True)
    p.set_defaults(run=_cmd_bench)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.run(args)
    except NotAGraphError as exc:
        print(f"error: {exc}", file=sys.stderr)
        print(f"witness: {exc.witness[0]} vs {exc.witness[1]}", file=sys.stderr)
        return EXIT_VERIFY_FAIL
    except (CapExceededError, UnboundedNetworkError, ArityError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_LIMIT
    except (FormatError, FileNotFoundError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except CrnError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
