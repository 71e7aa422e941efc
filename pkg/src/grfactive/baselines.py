"""Comparison selectors: mutual-information-gain greedy and uniform random.

The MIG selector follows the standard sensor-placement greedy: each step
maximizes, per unit cost, half the log ratio between the candidate's
variance conditioned on the selected set and its variance conditioned on
everything else (minus the test set, when one exists).  Its trace records
the trace-of-covariance risk so curves are comparable with the
variance-minimizing selectors.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable

import numpy as np
import scipy.linalg

from . import kernels
from .errors import InputError
from .graphs import Laplacian
from .grf import TestSet
from .linalg import spd_inverse
from .selection import (
    DIAG_TOL,
    Budget,
    SelectionStep,
    SelectionTrace,
    _pick_candidate,
)

#: relative slack below which MIG gains count as tied (then lowest id wins);
#: symmetric graphs produce mathematically equal gains that differ by
#: rounding, and the tie rule must not depend on that noise
MIG_TIE_TOL = 1e-9


@dataclass(frozen=True)
class BaselineKind:
    """Which comparison selector to run; the seed is recorded so random
    runs are reproducible."""

    kind: str  # "mig" | "random"
    seed: int | None = None

    def __post_init__(self):
        if self.kind not in ("mig", "random"):
            raise InputError(f"unknown baseline {self.kind!r}")
        if self.kind == "random" and self.seed is None:
            raise InputError("random baseline requires a seed")

    def select(
        self,
        lap: Laplacian | None,
        budget: Budget,
        pool: Iterable[int],
        *,
        test: TestSet | None = None,
        tie_priority: np.ndarray | None = None,
    ) -> SelectionTrace:
        if self.kind == "mig":
            if lap is None:
                raise InputError("MIG baseline requires a Laplacian")
            return mig_select(
                lap, budget, pool, test=test, tie_priority=tie_priority
            )
        return random_select(pool, budget, self.seed)


def mig_select(
    lap: Laplacian,
    budget: Budget,
    pool: Iterable[int],
    *,
    test: TestSet | None = None,
    tie_priority: np.ndarray | None = None,
) -> SelectionTrace:
    """Greedy mutual-information-gain selection under a budget.

    Gain of candidate v given selected set S is
    ``0.5 * log( var(v|S) / var(v|rest) )`` with rest the complement of
    S+{v} (test nodes excluded from the complement when a test set is
    given).  Candidates with vanishing conditional variance on either side
    are skipped.
    """
    pool_ids = sorted({int(v) for v in pool})
    known = {int(v) for v in lap.node_ids}
    for v in pool_ids:
        if v not in known:
            raise InputError(f"pool node {v} is not in the Laplacian")
    test_nodes: tuple[int, ...] = ()
    if test is not None and not test.is_all_unlabeled:
        overlap = set(pool_ids).intersection(test.nodes)
        if overlap:
            raise InputError(f"pool and test set overlap at node {min(overlap)}")
        test_nodes = test.nodes

    sigma = spd_inverse(
        lap.matrix,
        context="MIG requires a nonsingular Laplacian (prior covariance)",
    )
    sigma = np.ascontiguousarray(sigma, dtype=np.float64)
    ids = np.array(lap.node_ids, dtype=np.intp)
    lookup = {int(v): k for k, v in enumerate(ids)}
    active = np.ones(len(ids), dtype=bool)
    fixed_test_pos = (
        np.array([lookup[v] for v in test_nodes], dtype=np.intp)
        if test_nodes
        else None
    )

    def v_risk() -> float:
        if fixed_test_pos is not None:
            return float(sigma[fixed_test_pos, fixed_test_pos].sum())
        act = np.flatnonzero(active)
        return float(sigma[act, act].sum())

    initial_risk = v_risk()
    remaining = list(pool_ids)
    labeled: list[int] = []
    spent = 0.0
    steps: list[SelectionStep] = []

    while True:
        afford = [v for v in remaining if spent + budget.cost_of(v) <= budget.limit]
        if not afford:
            break
        cand_nodes = np.array(afford, dtype=np.intp)
        cand_pos = np.array([lookup[v] for v in afford], dtype=np.intp)
        # var(v | selected): diagonal of the downdated covariance
        num = sigma[cand_pos, cand_pos]
        # var(v | everything else): reciprocal Schur complement of the
        # conditioned block S = labeled + test within the original L
        s_nodes = sorted(set(labeled).union(test_nodes))
        l_mat = lap.matrix
        if s_nodes:
            s_pos = np.array([lookup[v] for v in s_nodes], dtype=np.intp)
            l_ss = l_mat[np.ix_(s_pos, s_pos)]
            factor = scipy.linalg.cho_factor(l_ss, lower=True, check_finite=False)
            cross = l_mat[np.ix_(s_pos, cand_pos)]
            solved = scipy.linalg.cho_solve(factor, cross, check_finite=False)
            schur = l_mat[cand_pos, cand_pos] - np.sum(cross * solved, axis=0)
        else:
            schur = l_mat[cand_pos, cand_pos].copy()
        with np.errstate(divide="ignore", invalid="ignore"):
            gains = 0.5 * np.log(num * schur)
        gains[(num <= DIAG_TOL) | (schur <= DIAG_TOL)] = np.nan
        costs = np.array([budget.cost_of(v) for v in afford])
        objective = -gains / costs
        k = _pick_candidate(cand_nodes, objective, tie_priority, tie_tol=MIG_TIE_TOL)
        if k < 0:
            break
        node = int(cand_nodes[k])
        pos = int(cand_pos[k])
        gain = float(gains[k])
        kernels.downdate(sigma, pos)
        active[pos] = False
        remaining.remove(node)
        labeled.append(node)
        spent += costs[k]
        steps.append(
            SelectionStep(
                node=node,
                marginal_gain=gain,
                gain_per_cost=gain / float(costs[k]),
                risk_after=v_risk(),
            )
        )
    return SelectionTrace(steps=tuple(steps), initial_risk=initial_risk)


def random_select(pool: Iterable[int], budget: Budget, seed: int) -> SelectionTrace:
    """Uniform selection without replacement among affordable candidates.

    Deterministic given the seed.  Gains and risks are not defined without
    a model, so those trace fields are NaN.
    """
    rng = np.random.default_rng(seed)
    remaining = sorted({int(v) for v in pool})
    spent = 0.0
    steps: list[SelectionStep] = []
    while True:
        afford = [v for v in remaining if spent + budget.cost_of(v) <= budget.limit]
        if not afford:
            break
        node = afford[int(rng.integers(len(afford)))]
        remaining.remove(node)
        spent += budget.cost_of(node)
        steps.append(
            SelectionStep(
                node=node,
                marginal_gain=float("nan"),
                gain_per_cost=float("nan"),
                risk_after=float("nan"),
            )
        )
    return SelectionTrace(steps=tuple(steps), initial_risk=float("nan"))
