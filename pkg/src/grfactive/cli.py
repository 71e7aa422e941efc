"""Command-line interface.

Subcommands: ``select`` (one-shot selection, prints the trace),
``experiment`` (full learning-curve run, emits CSV), ``verify``
(randomized theory checks), ``first-query`` (spectral first survey query
on a singular Laplacian).  Exit codes: 0 success, 1 input error,
2 numerical failure, 3 property-check failure.
"""

from __future__ import annotations

import argparse
import json
import sys

import numpy as np

from .baselines import mig_select, random_select
from .errors import InputError, NumericalError
from .graphs import (
    build_laplacian,
    largest_connected_component,
    load_edge_list,
    load_node_names,
)
from .grf import TestSet
from .harness import ExperimentConfig, emit_results, load_costs, run_experiment
from .selection import (
    Budget,
    Criterion,
    argmin_first_query,
    first_query_survey_singular,
    greedy_select,
)
from .verify import (
    check_aofs,
    check_greedy_ratio,
    check_inverse_nonnegative,
    check_monotone_submodular,
    replay_witness,
    VIOLATION_TOL,
)


def _fmt(x: float) -> str:
    return format(x, ".10g")


def _parse_ids(text: str | None) -> tuple[int, ...] | None:
    if text is None or text == "":
        return None
    try:
        return tuple(int(tok) for tok in text.split(","))
    except ValueError as exc:
        raise InputError(f"bad node-id list {text!r}") from exc


def _load_graph(path: str):
    with open(path, "r", encoding="utf-8") as fh:
        raw = load_edge_list(fh)
    return largest_connected_component(raw)


def _cmd_select(args) -> int:
    graph, mapping = _load_graph(args.graph)
    inv_map = {new: old for old, new in mapping.items()}
    names = None
    if args.names:
        with open(args.names, "r", encoding="utf-8") as fh:
            names = load_node_names(fh)

    if args.delete_node is not None:
        if args.delete_node not in mapping:
            raise InputError(f"node {args.delete_node} is not in the largest component")
        lap = build_laplacian(graph, "delete_node", node=mapping[args.delete_node])
    elif args.no_regularization:
        lap = build_laplacian(graph, "unregularized")
    else:
        lap = build_laplacian(graph, "regularized", sigma=args.sigma)

    def remap(ids):
        if ids is None:
            return None
        missing = [v for v in ids if v not in mapping]
        if missing:
            raise InputError(f"node {missing[0]} is not in the largest component")
        return tuple(sorted(mapping[v] for v in ids))

    test_ids = remap(_parse_ids(args.test))
    pool_ids = remap(_parse_ids(args.pool))
    if pool_ids is None:
        pool_ids = tuple(
            int(v) for v in lap.node_ids if test_ids is None or int(v) not in test_ids
        )
    costs = None
    if args.costs:
        with open(args.costs, "r", encoding="utf-8") as fh:
            raw_costs = load_costs(fh)
        costs = {mapping[v]: c for v, c in raw_costs.items() if v in mapping}
    budget = Budget(limit=args.budget, costs=costs)
    test = TestSet(nodes=test_ids) if test_ids else TestSet.all_unlabeled()

    if args.method in ("v_opt", "sigma_opt"):
        kind = "classification" if args.method == "v_opt" else "survey"
        trace = greedy_select(lap, Criterion(kind=kind, test=test), budget, pool_ids)
    elif args.method == "mig":
        trace = mig_select(
            lap, budget, pool_ids, test=None if test_ids is None else test
        )
    else:
        trace = random_select(pool_ids, budget, args.seed)

    out = sys.stdout
    out.write(f"initial_risk {_fmt(trace.initial_risk)}\n")
    out.write("step node name gain gain_per_cost risk_after\n")
    for k, step in enumerate(trace.steps, start=1):
        orig = inv_map[step.node]
        name = names[orig] if names and orig < len(names) else "-"
        out.write(
            f"{k} {orig} {name} {_fmt(step.marginal_gain)} "
            f"{_fmt(step.gain_per_cost)} {_fmt(step.risk_after)}\n"
        )
    out.write(f"selected {','.join(str(inv_map[v]) for v in trace.selected())}\n")
    return 0


def _cmd_first_query(args) -> int:
    graph, mapping = _load_graph(args.graph)
    inv_map = {new: old for old, new in mapping.items()}
    names = None
    if args.names:
        with open(args.names, "r", encoding="utf-8") as fh:
            names = load_node_names(fh)
    lap = build_laplacian(graph, "unregularized")
    values = first_query_survey_singular(lap)
    best = argmin_first_query(values)
    out = sys.stdout
    out.write("node name survey_risk\n")
    for k, v in enumerate(values):
        orig = inv_map[k]
        name = names[orig] if names and orig < len(names) else "-"
        out.write(f"{orig} {name} {_fmt(v)}\n")
    out.write(f"argmin {inv_map[best]}\n")
    return 0


def _cmd_experiment(args) -> int:
    if args.config:
        with open(args.config, "r", encoding="utf-8") as fh:
            try:
                payload = json.load(fh)
            except json.JSONDecodeError as exc:
                raise InputError(f"config file: {exc}") from exc
        for key in ("methods", "budget_schedule", "test_set"):
            if key in payload and payload[key] is not None:
                payload[key] = tuple(payload[key])
        try:
            config = ExperimentConfig(**payload)
        except TypeError as exc:
            raise InputError(f"config file: {exc}") from exc
    else:
        required = {"graph": args.graph, "labels": args.labels, "budgets": args.budgets}
        missing = [k for k, v in required.items() if not v]
        if missing:
            raise InputError(f"missing --{missing[0]} (or use --config)")
        config = ExperimentConfig(
            graph_path=args.graph,
            labels_path=args.labels,
            budget_schedule=tuple(float(b) for b in args.budgets.split(",")),
            task=args.task,
            costs_path=args.costs,
            methods=tuple(args.methods.split(",")),
            repetitions=args.repetitions,
            base_seed=args.base_seed,
            regularization=None if args.no_regularization else args.sigma,
            delete_node=args.delete_node,
            test_set=_parse_ids(args.test),
            output_path=args.output,
        )
    table = run_experiment(config)
    if config.output_path:
        with open(config.output_path, "w", encoding="utf-8", newline="") as fh:
            emit_results(table, fh)
    else:
        emit_results(table, sys.stdout)
    return 0


def _print_report(report) -> None:
    line = (
        f"property={report.property} trials={report.trials} "
        f"failures={report.failures} worst_violation={_fmt(report.worst_violation)}"
    )
    if report.property.startswith("greedy_ratio"):
        min_ratio = (1.0 - 1.0 / np.e) - report.worst_violation
        line += f" min_ratio={_fmt(min_ratio)}"
    print(line)
    if report.failures and report.witness:
        print("witness:")
        print(report.witness, end="")


def _cmd_verify(args) -> int:
    if args.replay:
        with open(args.replay, "r", encoding="utf-8") as fh:
            name, violation = replay_witness(fh.read())
        print(f"property={name} violation={_fmt(violation)}")
        return 3 if violation > VIOLATION_TOL else 0

    criteria = (
        ("classification", "survey") if args.criterion == "both" else (args.criterion,)
    )
    reports = []
    if args.suite in ("inverse", "all"):
        reports.append(check_inverse_nonnegative(args.trials, args.n_max, args.seed))
    if args.suite in ("monotone-submodular", "all"):
        for kind in criteria:
            reports.append(
                check_monotone_submodular(kind, args.trials, args.n_max, args.seed)
            )
    if args.suite in ("aofs", "all"):
        reports.append(check_aofs(args.trials, args.n_max, args.seed))
    if args.suite in ("greedy-ratio", "all"):
        for kind in criteria:
            reports.append(
                check_greedy_ratio(
                    kind, args.ratio_trials, min(args.n_max, 10), args.k_max, args.seed
                )
            )
    for report in reports:
        _print_report(report)
    return 3 if any(r.failures for r in reports) else 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="grfactive",
        description="Batch active learning and surveying on graph Gaussian "
        "random fields.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_sel = sub.add_parser("select", help="one-shot budgeted selection")
    p_sel.add_argument("--graph", required=True, help="edge-list file")
    p_sel.add_argument(
        "--method",
        default="v_opt",
        choices=("v_opt", "sigma_opt", "mig", "random"),
    )
    p_sel.add_argument("--budget", type=float, required=True)
    p_sel.add_argument("--costs", help="node cost file")
    p_sel.add_argument("--sigma", type=float, default=10.0, help="regularization scale")
    p_sel.add_argument(
        "--no-regularization", action="store_true", help="use the raw Laplacian"
    )
    p_sel.add_argument("--delete-node", type=int, default=None)
    p_sel.add_argument("--test", help="comma-separated test node ids")
    p_sel.add_argument("--pool", help="comma-separated queryable node ids")
    p_sel.add_argument("--seed", type=int, default=0, help="seed for random method")
    p_sel.add_argument("--names", help="node-name sidecar file")
    p_sel.set_defaults(func=_cmd_select)

    p_exp = sub.add_parser("experiment", help="learning-curve experiment, CSV out")
    p_exp.add_argument("--config", help="JSON config file (overrides flags)")
    p_exp.add_argument("--graph")
    p_exp.add_argument("--labels")
    p_exp.add_argument("--task", default="classification", choices=("classification", "survey"))
    p_exp.add_argument("--costs")
    p_exp.add_argument("--methods", default="v_opt,random")
    p_exp.add_argument("--budgets", help="comma-separated ascending checkpoints")
    p_exp.add_argument("--repetitions", type=int, default=1)
    p_exp.add_argument("--base-seed", type=int, default=0)
    p_exp.add_argument("--sigma", type=float, default=10.0)
    p_exp.add_argument("--no-regularization", action="store_true")
    p_exp.add_argument("--delete-node", type=int, default=None)
    p_exp.add_argument("--test", help="comma-separated test node ids")
    p_exp.add_argument("--output", help="CSV path (default stdout)")
    p_exp.set_defaults(func=_cmd_experiment)

    p_ver = sub.add_parser("verify", help="randomized theory checks")
    p_ver.add_argument(
        "--suite",
        default="all",
        choices=("inverse", "monotone-submodular", "aofs", "greedy-ratio", "all"),
    )
    p_ver.add_argument(
        "--criterion", default="both", choices=("classification", "survey", "both")
    )
    p_ver.add_argument("--trials", type=int, default=2000)
    p_ver.add_argument("--ratio-trials", type=int, default=200)
    p_ver.add_argument("--n-max", type=int, default=8)
    p_ver.add_argument("--k-max", type=int, default=3)
    p_ver.add_argument("--seed", type=int, default=0)
    p_ver.add_argument("--replay", help="re-evaluate a witness file")
    p_ver.set_defaults(func=_cmd_verify)

    p_fq = sub.add_parser(
        "first-query", help="spectral first survey query on a singular Laplacian"
    )
    p_fq.add_argument("--graph", required=True)
    p_fq.add_argument("--names")
    p_fq.set_defaults(func=_cmd_first_query)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (InputError, FileNotFoundError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except NumericalError as exc:
        print(f"numerical error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
