"""Experiment runner: selection methods vs. budget on a labeled graph.

Loads a graph, keeps its largest connected component, runs each requested
selection method over repeated seeds, conditions the field on the acquired
labels at every budget checkpoint, and scores the predictions.  Output is
a CSV of per-repetition rows followed by mean/SEM aggregates, suitable for
plotting learning curves.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field
from typing import IO, Iterable, Mapping

import numpy as np

from .baselines import BaselineKind
from .errors import GraphFormatError, InputError
from .graphs import Laplacian, build_laplacian, largest_connected_component, load_edge_list
from .grf import TestSet
from .linalg import spd_solve
from .selection import Budget, Criterion, SelectionTrace, evaluate_risk, greedy_select

KNOWN_METHODS = ("v_opt", "sigma_opt", "mig", "random")


@dataclass(frozen=True)
class ExperimentConfig:
    """Declarative description of one experiment run.

    Node ids (test_set, delete_node) refer to ids in the graph file; they
    are remapped internally after largest-component extraction.  Exactly
    one of ``regularization`` / ``delete_node`` should be set; with
    neither, the raw singular Laplacian is used and selection will fail.
    """

    graph_path: str
    labels_path: str
    budget_schedule: tuple[float, ...]
    task: str = "classification"  # or "survey"
    costs_path: str | None = None
    methods: tuple[str, ...] = ("v_opt", "random")
    repetitions: int = 1
    base_seed: int = 0
    regularization: float | None = 10.0
    delete_node: int | None = None
    test_set: tuple[int, ...] | None = None
    output_path: str | None = None

    def __post_init__(self):
        if self.repetitions < 1:
            raise InputError("repetitions must be at least 1")
        if not self.methods:
            raise InputError("at least one method is required")
        for m in self.methods:
            if m not in KNOWN_METHODS:
                raise InputError(f"unknown method {m!r}")
        sched = tuple(float(b) for b in self.budget_schedule)
        if not sched:
            raise InputError("budget schedule must be nonempty")
        if any(b2 <= b1 for b1, b2 in zip(sched, sched[1:])) or sched[0] <= 0:
            raise InputError("budget checkpoints must be positive and ascending")
        object.__setattr__(self, "budget_schedule", sched)
        if self.task not in ("classification", "survey"):
            raise InputError(f"unknown task {self.task!r}")
        if self.regularization is not None and self.delete_node is not None:
            raise InputError("choose either regularization or delete_node, not both")


@dataclass(frozen=True)
class LabelOracle:
    """Ground-truth labels: class ids or survey values per node."""

    values: Mapping[int, float]

    def value_of(self, node: int) -> float:
        return self.values[int(node)]

    def covers(self, nodes: Iterable[int]) -> list[int]:
        return [int(v) for v in nodes if int(v) not in self.values]


@dataclass(frozen=True)
class ResultRow:
    method: str
    repetition: int
    budget: float
    risk: float
    metric: float


@dataclass(frozen=True)
class AggregateRow:
    method: str
    budget: float
    mean: float
    sem: float


@dataclass(frozen=True)
class ResultTable:
    rows: tuple[ResultRow, ...]
    method_order: tuple[str, ...] = field(default=())

    def aggregates(self) -> list[AggregateRow]:
        """Mean and standard error of the metric per (method, budget)."""
        order: list[tuple[str, float]] = []
        groups: dict[tuple[str, float], list[float]] = {}
        methods = self.method_order or tuple(
            dict.fromkeys(r.method for r in self.rows)
        )
        for r in self.rows:
            key = (r.method, r.budget)
            if key not in groups:
                groups[key] = []
            groups[key].append(r.metric)
        for m in methods:
            for key in sorted(k for k in groups if k[0] == m):
                order.append(key)
        out = []
        for method, budget in order:
            vals = np.asarray(groups[(method, budget)])
            sem = (
                float(vals.std(ddof=1) / np.sqrt(len(vals))) if len(vals) > 1 else 0.0
            )
            out.append(
                AggregateRow(
                    method=method, budget=budget, mean=float(vals.mean()), sem=sem
                )
            )
        return out


def load_labels(source: IO, task: str) -> LabelOracle:
    """Parse ``node_id value`` lines: integer classes or values in [0,1]."""
    values: dict[int, float] = {}
    for lineno, raw in enumerate(source, start=1):
        if isinstance(raw, bytes):
            raw = raw.decode("utf-8")
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        parts = line.split()
        if len(parts) != 2:
            raise GraphFormatError(f"labels line {lineno}: expected 'node value'")
        try:
            node = int(parts[0])
            if task == "classification":
                val = float(int(parts[1]))
                if val < 0:
                    raise ValueError("class ids must be nonnegative")
            else:
                val = float(parts[1])
                if not (0.0 <= val <= 1.0):
                    raise ValueError("survey values must lie in [0,1]")
        except ValueError as exc:
            raise GraphFormatError(f"labels line {lineno}: {exc}") from exc
        if node in values:
            raise GraphFormatError(f"labels line {lineno}: duplicate node {node}")
        values[node] = val
    return LabelOracle(values=values)


def load_costs(source: IO) -> dict[int, float]:
    """Parse ``node_id cost`` lines; unlisted nodes default to cost 1."""
    costs: dict[int, float] = {}
    for lineno, raw in enumerate(source, start=1):
        if isinstance(raw, bytes):
            raw = raw.decode("utf-8")
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        parts = line.split()
        if len(parts) != 2:
            raise GraphFormatError(f"costs line {lineno}: expected 'node cost'")
        try:
            node, cost = int(parts[0]), float(parts[1])
        except ValueError as exc:
            raise GraphFormatError(f"costs line {lineno}: {exc}") from exc
        if not cost > 0.0:
            raise GraphFormatError(f"costs line {lineno}: cost must be positive")
        if node in costs:
            raise GraphFormatError(f"costs line {lineno}: duplicate node {node}")
        costs[node] = cost
    return costs


def score_classification(
    predictions: Mapping[int, float] | Mapping[int, np.ndarray],
    truth: LabelOracle,
    unqueried: Iterable[int],
    class_ids: tuple[int, ...] | None = None,
) -> float:
    """Fraction of unqueried nodes classified correctly.

    Scalar predictions use the binary rule (class 1 iff value >= 0.5);
    vector predictions take the argmax over ``class_ids``, ties to the
    lowest class id.
    """
    nodes = sorted(int(v) for v in unqueried)
    if not nodes:
        return 0.0
    correct = 0
    for v in nodes:
        pred = predictions[v]
        if np.ndim(pred) == 0:
            label = 1 if float(pred) >= 0.5 else 0
        else:
            ids = class_ids if class_ids is not None else tuple(range(len(pred)))
            label = ids[int(np.argmax(pred))]
        if label == int(truth.value_of(v)):
            correct += 1
    return correct / len(nodes)


def score_survey(
    predictions: Mapping[int, float],
    truth: LabelOracle,
    test_set: Iterable[int],
) -> float:
    """Absolute error of the predicted sum over the test nodes."""
    nodes = [int(v) for v in test_set]
    if not nodes:
        return 0.0
    pred_sum = sum(float(predictions[v]) for v in nodes)
    true_sum = sum(truth.value_of(v) for v in nodes)
    return abs(pred_sum - true_sum)


def _harmonic_means(
    lap: Laplacian, labeled: list[int], tag_columns: np.ndarray
) -> tuple[np.ndarray, np.ndarray]:
    """Harmonic extensions of one or more tag columns, one factorization.

    Returns the unlabeled node ids and an (n_unlabeled, n_columns) array of
    posterior means.
    """
    labeled_set = set(labeled)
    unl = np.array([v for v in lap.node_ids if int(v) not in labeled_set])
    unl_pos = lap.positions_of(unl)
    if len(labeled) == 0:
        return unl, np.zeros((len(unl), tag_columns.shape[1]))
    lab_pos = lap.positions_of(labeled)
    l_ul = lap.matrix[np.ix_(unl_pos, lab_pos)]
    l_uu = lap.matrix[np.ix_(unl_pos, unl_pos)]
    means = spd_solve(l_uu, -l_ul @ tag_columns, context="conditioning failed")
    return unl, means


def _run_method(
    method: str,
    lap: Laplacian,
    pool: list[int],
    budget: Budget,
    test: TestSet,
    seed: int,
    tie_priority: np.ndarray,
) -> tuple[SelectionTrace, Criterion]:
    """One selection run to the full budget; returns trace and the
    criterion whose risk the method's rows report."""
    if method == "v_opt":
        crit = Criterion(kind="classification", test=test)
        return greedy_select(lap, crit, budget, pool, tie_priority=tie_priority), crit
    if method == "sigma_opt":
        crit = Criterion(kind="survey", test=test)
        return greedy_select(lap, crit, budget, pool, tie_priority=tie_priority), crit
    if method == "mig":
        crit = Criterion(kind="classification", test=test)
        trace = BaselineKind(kind="mig").select(
            lap,
            budget,
            pool,
            test=None if test.is_all_unlabeled else test,
            tie_priority=tie_priority,
        )
        return trace, crit
    if method == "random":
        crit = Criterion(kind="classification", test=test)
        return BaselineKind(kind="random", seed=seed).select(None, budget, pool), crit
    raise InputError(f"unknown method {method!r}")


def run_experiment(config: ExperimentConfig) -> ResultTable:
    """Run every (method, repetition) and score at each budget checkpoint.

    Each repetition r uses seed ``base_seed + r`` for the random baseline
    and for breaking exact gain ties, so all methods start from the same
    randomness.  Selection runs once to the final checkpoint; earlier
    checkpoints read the prefix of that run.
    """
    with open(config.graph_path, "r", encoding="utf-8") as fh:
        raw_graph = load_edge_list(fh)
    graph, mapping = largest_connected_component(raw_graph)

    with open(config.labels_path, "r", encoding="utf-8") as fh:
        raw_oracle = load_labels(fh, config.task)
    oracle = LabelOracle(
        values={
            new: raw_oracle.values[old]
            for old, new in mapping.items()
            if old in raw_oracle.values
        }
    )

    costs: dict[int, float] | None = None
    if config.costs_path is not None:
        with open(config.costs_path, "r", encoding="utf-8") as fh:
            raw_costs = load_costs(fh)
        costs = {
            new: raw_costs[old]
            for old, new in mapping.items()
            if old in raw_costs
        }

    test_nodes: tuple[int, ...] | None = None
    if config.test_set:
        missing = [v for v in config.test_set if v not in mapping]
        if missing:
            raise InputError(
                f"test node {missing[0]} is not in the largest component"
            )
        test_nodes = tuple(sorted(mapping[v] for v in config.test_set))

    if config.delete_node is not None:
        if config.delete_node not in mapping:
            raise InputError(
                f"delete node {config.delete_node} is not in the largest component"
            )
        lap = build_laplacian(graph, "delete_node", node=mapping[config.delete_node])
    elif config.regularization is not None:
        lap = build_laplacian(graph, "regularized", sigma=config.regularization)
    else:
        lap = build_laplacian(graph, "unregularized")

    test = TestSet(nodes=test_nodes) if test_nodes else TestSet.all_unlabeled()
    pool = [int(v) for v in lap.node_ids if test_nodes is None or int(v) not in test_nodes]

    missing_labels = oracle.covers(lap.node_ids)
    if missing_labels:
        raise InputError(f"label file is missing node {missing_labels[0]}")

    max_budget = config.budget_schedule[-1]
    budget = Budget(limit=max_budget, costs=costs)
    total_cost = sum(budget.cost_of(v) for v in pool)
    if max_budget > total_cost:
        warnings.warn(
            f"budget {max_budget} exceeds total pool cost {total_cost}; "
            "checkpoints are capped at pool exhaustion",
            RuntimeWarning,
            stacklevel=2,
        )

    class_ids: tuple[int, ...] = ()
    if config.task == "classification":
        class_ids = tuple(sorted({int(oracle.value_of(v)) for v in lap.node_ids}))

    rows: list[ResultRow] = []
    for method in config.methods:
        for rep in range(config.repetitions):
            seed = config.base_seed + rep
            tie_priority = np.random.default_rng(seed).permutation(graph.node_count)
            trace, crit = _run_method(
                method, lap, pool, budget, test, seed, tie_priority
            )
            cum = np.cumsum([budget.cost_of(s.node) for s in trace.steps])
            for checkpoint in config.budget_schedule:
                k = int(np.searchsorted(cum, checkpoint, side="right"))
                labeled = [s.node for s in trace.steps[:k]]
                risk = evaluate_risk(lap, labeled, crit)
                metric = _score_checkpoint(
                    config.task, lap, labeled, oracle, test_nodes, class_ids
                )
                rows.append(
                    ResultRow(
                        method=method,
                        repetition=rep,
                        budget=checkpoint,
                        risk=risk,
                        metric=metric,
                    )
                )
    return ResultTable(rows=tuple(rows), method_order=config.methods)


def _score_checkpoint(
    task: str,
    lap: Laplacian,
    labeled: list[int],
    oracle: LabelOracle,
    test_nodes: tuple[int, ...] | None,
    class_ids: tuple[int, ...],
) -> float:
    if task == "classification":
        binary = set(class_ids).issubset({0, 1})
        if binary:
            tags = np.array([[oracle.value_of(v)] for v in labeled])
            unl, means = _harmonic_means(lap, labeled, tags.reshape(len(labeled), 1))
            preds = {int(v): float(means[k, 0]) for k, v in enumerate(unl)}
            return score_classification(preds, oracle, unl)
        cols = np.array(
            [
                [1.0 if int(oracle.value_of(v)) == c else 0.0 for c in class_ids]
                for v in labeled
            ]
        ).reshape(len(labeled), len(class_ids))
        unl, means = _harmonic_means(lap, labeled, cols)
        preds = {int(v): means[k] for k, v in enumerate(unl)}
        return score_classification(preds, oracle, unl, class_ids=class_ids)
    tags = np.array([oracle.value_of(v) for v in labeled]).reshape(len(labeled), 1)
    unl, means = _harmonic_means(lap, labeled, tags)
    preds = {int(v): float(means[k, 0]) for k, v in enumerate(unl)}
    score_over = test_nodes if test_nodes is not None else tuple(int(v) for v in unl)
    return score_survey(preds, oracle, score_over)


def emit_results(table: ResultTable, sink: IO) -> None:
    """Write the CSV: per-repetition rows, then a mean/SEM aggregate block."""

    def fmt(x: float) -> str:
        return format(x, ".10g")

    sink.write("method,repetition,budget,risk,metric\n")
    for r in table.rows:
        sink.write(
            f"{r.method},{r.repetition},{fmt(r.budget)},{fmt(r.risk)},{fmt(r.metric)}\n"
        )
    if table.rows:
        sink.write("method,budget,mean,sem\n")
        for a in table.aggregates():
            sink.write(f"{a.method},{fmt(a.budget)},{fmt(a.mean)},{fmt(a.sem)}\n")
