"""Budgeted greedy query selection under variance-based risk criteria.

Two risks are supported, both computed from the inverse of the unlabeled
Laplacian submatrix: the classification risk is its trace over the test
rows, the survey risk its grand sum.  Labeling one node updates the
conditional covariance by a rank-one downdate, so every candidate's
marginal gain is available from a single column of the current covariance;
the greedy engine below runs on that fast path while ``evaluate_risk``
keeps the direct-inversion route as an independent oracle.

For a singular (unregularized) Laplacian of a connected graph, the first
survey query is still well defined and is computed from one
eigendecomposition instead of per-candidate inverses.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field
from typing import Iterable, Mapping

import numpy as np

from . import kernels
from .errors import InputError, NumericalError
from .graphs import Laplacian
from .grf import TestSet
from .linalg import spd_inverse

#: pivots at or below this are treated as near-deterministic nodes
DIAG_TOL = 1e-12


@dataclass(frozen=True)
class Criterion:
    """Which risk to minimize and over which test set."""

    kind: str  # "classification" | "survey"
    test: TestSet = field(default_factory=TestSet.all_unlabeled)

    def __post_init__(self):
        if self.kind not in ("classification", "survey"):
            raise InputError(f"unknown criterion kind {self.kind!r}")

    @property
    def is_survey(self) -> bool:
        return self.kind == "survey"


@dataclass(frozen=True)
class Budget:
    """Total spending limit and optional per-node costs (default 1.0)."""

    limit: float
    costs: Mapping[int, float] | None = None

    def __post_init__(self):
        if not self.limit > 0.0:
            raise InputError(f"budget limit must be positive, got {self.limit}")
        if self.costs is not None:
            bad = [v for v, c in self.costs.items() if not c > 0.0]
            if bad:
                raise InputError(f"node {bad[0]} has nonpositive cost")

    def cost_of(self, node: int) -> float:
        if self.costs is None:
            return 1.0
        return float(self.costs.get(int(node), 1.0))


@dataclass(frozen=True)
class SelectionStep:
    node: int
    marginal_gain: float
    gain_per_cost: float
    risk_after: float


@dataclass(frozen=True)
class SelectionTrace:
    """Per-step record of a selection run."""

    steps: tuple[SelectionStep, ...]
    initial_risk: float = float("nan")

    def selected(self) -> list[int]:
        return [s.node for s in self.steps]

    def __len__(self) -> int:
        return len(self.steps)


@dataclass(frozen=True)
class SelectionState:
    """Labeled set plus the maintained conditional covariance over the rest."""

    labeled: tuple[int, ...]
    spent: float
    ids: np.ndarray = field(repr=False)
    covariance: np.ndarray = field(repr=False)
    current_risk: float = float("nan")

    @classmethod
    def initial(cls, lap: Laplacian, criterion: Criterion) -> "SelectionState":
        """State before any query: covariance is the full inverse of L."""
        sigma = spd_inverse(
            lap.matrix,
            context="initial covariance requires a nonsingular Laplacian; "
            "regularize or delete a node",
        )
        ids = np.array(lap.node_ids, dtype=np.intp)
        risk = _risk_of(sigma, _test_positions(ids, criterion.test), criterion)
        return cls(labeled=(), spent=0.0, ids=ids, covariance=sigma, current_risk=risk)

    def label(self, node: int, criterion: Criterion, cost: float = 1.0) -> "SelectionState":
        """New state after querying ``node`` (rank-one downdate)."""
        cov, ids = rank_one_downdate(self.covariance, self.ids, node)
        risk = _risk_of(cov, _test_positions(ids, criterion.test), criterion)
        return SelectionState(
            labeled=self.labeled + (int(node),),
            spent=self.spent + cost,
            ids=ids,
            covariance=cov,
            current_risk=risk,
        )


@dataclass(frozen=True)
class MarginalGains:
    """Per-candidate risks after a hypothetical single query.

    ``risks[k]`` is the risk of labeling ``nodes[k]`` next; NaN marks
    candidates flagged as near-deterministic (pivot at or below tolerance).
    """

    nodes: np.ndarray
    risks: np.ndarray


def _test_positions(ids: np.ndarray, test: TestSet) -> np.ndarray | None:
    """Positions of the test nodes within ``ids``; None means all of them."""
    if test.is_all_unlabeled:
        return None
    lookup = {int(v): k for k, v in enumerate(ids)}
    missing = [v for v in test.nodes if v not in lookup]
    if missing:
        raise InputError(f"test node {missing[0]} is not an unlabeled node")
    return np.array([lookup[v] for v in test.nodes], dtype=np.intp)


def _risk_of(sigma: np.ndarray, test_pos: np.ndarray | None, criterion: Criterion) -> float:
    if test_pos is None:
        test_pos = np.arange(sigma.shape[0], dtype=np.intp)
    if criterion.is_survey:
        return float(sigma[np.ix_(test_pos, test_pos)].sum())
    return float(sigma[test_pos, test_pos].sum())


def evaluate_risk(lap: Laplacian, labeled: Iterable[int], criterion: Criterion) -> float:
    """Risk of a labeled set by direct inversion of the unlabeled submatrix.

    This is the reference path: no incremental updates, one Cholesky solve
    per call.  The fast per-candidate path must agree with it.
    """
    labeled_set = {int(v) for v in labeled}
    if not criterion.test.is_all_unlabeled:
        overlap = labeled_set.intersection(criterion.test.nodes)
        if overlap:
            raise InputError(f"test node {min(overlap)} is labeled")
    unl = np.array(
        [v for v in lap.node_ids if int(v) not in labeled_set], dtype=np.intp
    )
    if len(unl) == 0:
        return 0.0
    pos = lap.positions_of(unl)
    inv = spd_inverse(
        lap.matrix[np.ix_(pos, pos)],
        context="risk evaluation requires a nonsingular unlabeled submatrix",
    )
    return _risk_of(inv, _test_positions(unl, criterion.test), criterion)


def rank_one_downdate(
    sigma: np.ndarray, ids, node: int, *, diag_tol: float = DIAG_TOL
) -> tuple[np.ndarray, np.ndarray]:
    """Covariance after conditioning on ``node``, with its row/column removed.

    Subtracting ``col col^T / sigma[v,v]`` from the covariance and dropping
    row/column v equals inverting the Laplacian submatrix with v labeled.
    """
    ids = np.asarray(ids, dtype=np.intp)
    where = np.flatnonzero(ids == int(node))
    if len(where) == 0:
        raise InputError(f"node {node} is not in the covariance id list")
    pos = int(where[0])
    pivot = sigma[pos, pos]
    if not pivot > diag_tol:
        raise NumericalError(
            f"node {node} is near-deterministic (variance {pivot:.3e}); "
            "cannot downdate"
        )
    col = sigma[:, pos]
    out = sigma - np.outer(col, col / pivot)
    keep = np.flatnonzero(ids != int(node))
    return out[np.ix_(keep, keep)], ids[keep]


def fast_marginal_gains(
    state: SelectionState, criterion: Criterion, pool: Iterable[int]
) -> MarginalGains:
    """Risk after each single candidate query, from the current covariance.

    Linear time per candidate: only the candidate's covariance column is
    touched.  Agrees with ``evaluate_risk`` on the augmented labeled set.
    """
    nodes = np.array(sorted({int(v) for v in pool}), dtype=np.intp)
    lookup = {int(v): k for k, v in enumerate(state.ids)}
    missing = [v for v in nodes if int(v) not in lookup]
    if missing:
        raise InputError(f"candidate {missing[0]} is not an unlabeled node")
    cand_pos = np.array([lookup[int(v)] for v in nodes], dtype=np.intp)
    test_pos = _test_positions(state.ids, criterion.test)
    if test_pos is None:
        test_pos = np.arange(len(state.ids), dtype=np.intp)
    elif not criterion.test.is_all_unlabeled:
        bad = set(nodes.tolist()).intersection(criterion.test.nodes)
        if bad:
            raise InputError(f"candidate {min(bad)} is a test node")
    sigma = np.ascontiguousarray(state.covariance, dtype=np.float64)
    base = _risk_of(sigma, None if criterion.test.is_all_unlabeled else test_pos, criterion)
    red = kernels.candidate_reductions(
        sigma, DIAG_TOL, cand_pos, test_pos, criterion.is_survey
    )
    return MarginalGains(nodes=nodes, risks=base - red)


def _pick_candidate(
    nodes: np.ndarray,
    objective: np.ndarray,
    tie_priority: np.ndarray | None,
    tie_tol: float = 0.0,
) -> int:
    """Index of the minimizing candidate; ties go to the lowest node id.

    ``nodes`` must be ascending.  ``tie_priority`` optionally reranks exact
    ties (lower priority value wins).  NaN entries are skipped; returns -1
    when nothing is selectable.
    """
    finite = np.isfinite(objective)
    if not finite.any():
        return -1
    best = np.min(objective[finite])
    if tie_tol > 0.0:
        cut = best + tie_tol * max(1.0, abs(best))
        ties = np.flatnonzero(finite & (objective <= cut))
    else:
        ties = np.flatnonzero(finite & (objective == best))
    if tie_priority is None or len(ties) == 1:
        return int(ties[0])
    ranks = [tie_priority[int(nodes[t])] for t in ties]
    return int(ties[int(np.argmin(ranks))])


def greedy_select(
    lap: Laplacian,
    criterion: Criterion,
    budget: Budget,
    pool: Iterable[int],
    *,
    tie_priority: np.ndarray | None = None,
) -> SelectionTrace:
    """Cost-aware greedy selection minimizing (risk change)/cost per step.

    Runs on the fast path: one candidate sweep over covariance columns and
    one in-place rank-one downdate per step.  Stops when no affordable
    candidate remains.  Ties break to the lowest node id unless
    ``tie_priority`` reranks them.
    """
    pool_ids = sorted({int(v) for v in pool})
    known = {int(v) for v in lap.node_ids}
    for v in pool_ids:
        if v not in known:
            raise InputError(f"pool node {v} is not in the Laplacian")
    if not criterion.test.is_all_unlabeled:
        overlap = set(pool_ids).intersection(criterion.test.nodes)
        if overlap:
            raise InputError(
                f"pool and test set overlap at node {min(overlap)}"
            )
    sigma = spd_inverse(
        lap.matrix,
        context="greedy selection requires a nonsingular Laplacian; "
        "regularize or delete a node",
    )
    sigma = np.ascontiguousarray(sigma, dtype=np.float64)
    ids = np.array(lap.node_ids, dtype=np.intp)
    lookup = {int(v): k for k, v in enumerate(ids)}
    active = np.ones(len(ids), dtype=bool)
    fixed_test = _test_positions(ids, criterion.test)

    risk = _risk_of(
        sigma, fixed_test if fixed_test is not None else None, criterion
    )
    initial_risk = risk
    remaining = list(pool_ids)
    spent = 0.0
    steps: list[SelectionStep] = []
    warned_skip = False

    while True:
        afford = [v for v in remaining if spent + budget.cost_of(v) <= budget.limit]
        if not afford:
            break
        cand_nodes = np.array(afford, dtype=np.intp)
        cand_pos = np.array([lookup[v] for v in afford], dtype=np.intp)
        test_pos = (
            fixed_test if fixed_test is not None else np.flatnonzero(active)
        )
        red = kernels.candidate_reductions(
            sigma, DIAG_TOL, cand_pos, test_pos.astype(np.intp), criterion.is_survey
        )
        costs = np.array([budget.cost_of(v) for v in afford])
        objective = -red / costs  # (risk_after - risk_before) / cost
        if np.isnan(red).any() and not warned_skip:
            warnings.warn(
                "skipping near-deterministic candidate(s) with variance "
                f"<= {DIAG_TOL}",
                RuntimeWarning,
                stacklevel=2,
            )
            warned_skip = True
        k = _pick_candidate(cand_nodes, objective, tie_priority)
        if k < 0:
            break
        node = int(cand_nodes[k])
        pos = int(cand_pos[k])
        gain = float(red[k])
        kernels.downdate(sigma, pos)
        active[pos] = False
        remaining.remove(node)
        spent += costs[k]
        risk -= gain
        steps.append(
            SelectionStep(
                node=node,
                marginal_gain=gain,
                gain_per_cost=gain / float(costs[k]),
                risk_after=risk,
            )
        )
    return SelectionTrace(steps=tuple(steps), initial_risk=initial_risk)


def first_query_survey_singular(
    lap: Laplacian, *, tol: float = 1e-8
) -> np.ndarray:
    """Survey risk of every single-node query on a singular Laplacian.

    One eigendecomposition replaces the per-candidate submatrix inverses:
    with ascending eigenvalues (the first zero) and eigenvector rows r_i,
    the risk of querying node i is ``-N(N-1) - N^2 * a_i`` where
    ``a_i = r_i diag(0, (1+lam_k)/(-lam_k)) r_i^T``.  Values match the
    direct grand sum of the per-node submatrix inverses.

    Requires a connected, singular Laplacian; a nonsingular one should use
    the dense covariance path instead.
    """
    m = lap.matrix
    n = m.shape[0]
    if n < 2:
        raise InputError("first-query evaluation needs at least two nodes")
    if (
        np.any(np.abs(m - m.T) > tol)
        or np.any(m - np.diag(np.diag(m)) > tol)
        or np.any(m.sum(axis=1) < -tol)
    ):
        raise InputError("matrix is not a proper-signed symmetric Laplacian")
    eigvals, q = np.linalg.eigh(0.5 * (m + m.T))
    scale = max(float(eigvals[-1]), 1.0)
    if eigvals[0] > tol * scale:
        raise NumericalError(
            "Laplacian is nonsingular; use the dense covariance path for "
            "the first query"
        )
    if eigvals[1] <= tol * scale:
        raise NumericalError("Laplacian has a repeated zero eigenvalue "
                             "(graph is disconnected)")
    weights = (1.0 + eigvals[1:]) / (-eigvals[1:])
    a = (q[:, 1:] ** 2) @ weights
    return -n * (n - 1) - n * n * a


def argmin_first_query(values: Iterable[float]) -> int:
    """Index of the smallest first-query risk, ties to the lowest index."""
    arr = np.asarray(list(values), dtype=float)
    if arr.size == 0:
        raise InputError("no first-query values to minimize")
    return int(np.argmin(arr))
