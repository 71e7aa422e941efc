"""Randomized empirical certification of the selection theory.

Each check samples many small random instances and measures how far the
claimed inequality is from holding: nonnegativity of Laplacian inverses,
monotone submodularity of the risk reduction, nonincreasing conditional
correlations (absence of suppressors), and the greedy (1 - 1/e)
approximation ratio against the exhaustive optimum.  A failing instance is
serialized as a replayable witness.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

import numpy as np

from .errors import InputError
from .graphs import WeightedGraph, build_laplacian
from .grf import GrfModel, conditional_correlation
from .linalg import spd_inverse
from .random_graphs import connected_gnp, random_sigma
from .selection import Budget, Criterion, evaluate_risk, greedy_select

#: slack on inequality violations; quantities are order 1-10 on N <= 10
VIOLATION_TOL = 1e-9


@dataclass(frozen=True)
class PropertyReport:
    """Outcome of one randomized property check."""

    property: str
    trials: int
    failures: int
    worst_violation: float
    witness: str = ""

    @property
    def ok(self) -> bool:
        return self.failures == 0

    @staticmethod
    def merge(reports: list["PropertyReport"]) -> "PropertyReport":
        """Combine same-property reports from concurrent runs: counts add,
        the worst violation and the first witness win."""
        if not reports:
            raise InputError("nothing to merge")
        names = {r.property for r in reports}
        if len(names) > 1:
            raise InputError(f"cannot merge different properties {sorted(names)}")
        witness = next((r.witness for r in reports if r.witness), "")
        return PropertyReport(
            property=reports[0].property,
            trials=sum(r.trials for r in reports),
            failures=sum(r.failures for r in reports),
            worst_violation=max(r.worst_violation for r in reports),
            witness=witness,
        )


def _serialize_witness(
    name: str, g: WeightedGraph, sigma: np.ndarray, sets: dict[str, object]
) -> str:
    """Replayable failing instance: edge list plus a one-line set description."""
    parts = []
    for key, val in sets.items():
        if isinstance(val, (list, tuple, np.ndarray)):
            parts.append(f"{key}=" + ",".join(str(int(x)) for x in val))
        else:
            parts.append(f"{key}={int(val)}")
    lines = [
        f"# property: {name}",
        "# sigma: " + " ".join(repr(float(s)) for s in sigma),
        "# sets: " + ";".join(parts),
    ]
    lines += [f"{i} {j} {w!r}" for i, j, w in g.edges]
    return "\n".join(lines) + "\n"


def replay_witness(text: str) -> tuple[str, float]:
    """Re-evaluate a serialized witness; returns (property name, violation)."""
    name = ""
    sigma: np.ndarray | None = None
    sets: dict[str, list[int]] = {}
    edges = []
    max_id = -1
    for raw in text.splitlines():
        line = raw.strip()
        if not line:
            continue
        if line.startswith("# property:"):
            name = line.split(":", 1)[1].strip()
        elif line.startswith("# sigma:"):
            sigma = np.array([float(x) for x in line.split(":", 1)[1].split()])
        elif line.startswith("# sets:"):
            for part in line.split(":", 1)[1].strip().split(";"):
                if not part:
                    continue
                key, _, val = part.partition("=")
                sets[key.strip()] = [int(x) for x in val.split(",") if x != ""]
        elif line.startswith("#"):
            continue
        else:
            i, j, w = line.split()
            edges.append((int(i), int(j), float(w)))
            max_id = max(max_id, int(i), int(j))
    if not name or sigma is None or max_id < 0:
        raise InputError("witness file is missing its header or edges")
    g = WeightedGraph(node_count=max_id + 1, edges=tuple(edges))
    if name == "inverse_nonnegative":
        violation = _eval_inverse_nonnegative(g, sigma)
    elif name.startswith("monotone_submodular_"):
        kind = name.removeprefix("monotone_submodular_")
        violation = _eval_monotone_submodular(
            g, sigma, sets["L1"], sets["L2"], sets["v"][0], kind
        )
    elif name == "aofs":
        violation = _eval_aofs(
            g, sigma, sets["L1"], sets["L2"], sets["i"][0], sets["j"][0]
        )
    elif name.startswith("greedy_ratio_"):
        kind = name.removeprefix("greedy_ratio_")
        violation, _ = _eval_greedy_ratio(g, sigma, sets["k"][0], kind)
    else:
        raise InputError(f"unknown witness property {name!r}")
    return name, violation


def _eval_inverse_nonnegative(g: WeightedGraph, sigma: np.ndarray) -> float:
    lap = build_laplacian(g, "regularized", sigma=sigma)
    inv = spd_inverse(lap.matrix)
    return float(-inv.min())


def _eval_monotone_submodular(
    g: WeightedGraph, sigma, l1, l2, v, kind: str
) -> float:
    lap = build_laplacian(g, "regularized", sigma=sigma)
    crit = Criterion(kind=kind)
    l1 = sorted(int(x) for x in l1)
    l12 = sorted(set(l1).union(int(x) for x in l2))
    r_l1 = evaluate_risk(lap, l1, crit)
    r_l12 = evaluate_risk(lap, l12, crit)
    r_empty = evaluate_risk(lap, [], crit)
    normalized = abs(r_empty - evaluate_risk(lap, [], crit))
    monotone = r_l12 - r_l1
    lhs = r_l1 - evaluate_risk(lap, sorted(l1 + [int(v)]), crit)
    rhs = r_l12 - evaluate_risk(lap, sorted(l12 + [int(v)]), crit)
    submodular = rhs - lhs
    return max(normalized, monotone, submodular)


def _eval_aofs(g: WeightedGraph, sigma, l1, l2, i: int, j: int) -> float:
    lap = build_laplacian(g, "regularized", sigma=sigma)
    model = GrfModel(laplacian=lap)
    l1 = sorted(int(x) for x in l1)
    l12 = sorted(set(l1).union(int(x) for x in l2))

    def corr(labeled):
        mat = conditional_correlation(model, labeled)
        unl = [v for v in range(g.node_count) if v not in set(labeled)]
        pos = {v: k for k, v in enumerate(unl)}
        return float(mat[pos[int(i)], pos[int(j)]])

    c1 = corr(l1)
    c12 = corr(l12)
    return max(c12 - c1, -c12)


def _eval_greedy_ratio(
    g: WeightedGraph, sigma, k: int, kind: str
) -> tuple[float, float]:
    lap = build_laplacian(g, "regularized", sigma=sigma)
    crit = Criterion(kind=kind)
    pool = list(range(g.node_count))
    r_empty = evaluate_risk(lap, [], crit)
    trace = greedy_select(lap, crit, Budget(limit=float(k)), pool)
    gain_greedy = r_empty - evaluate_risk(lap, trace.selected(), crit)
    best_gain = 0.0
    for combo in itertools.combinations(pool, int(k)):
        gain = r_empty - evaluate_risk(lap, list(combo), crit)
        best_gain = max(best_gain, gain)
    ratio = 1.0 if best_gain <= 0.0 else gain_greedy / best_gain
    bound = 1.0 - 1.0 / math.e
    return bound - ratio, ratio


def _sample_instance(rng: np.random.Generator, n_max: int, n_min: int = 2):
    n = int(rng.integers(n_min, n_max + 1))
    g = connected_gnp(rng, n)
    sigma = random_sigma(rng, n)
    return g, sigma


def check_inverse_nonnegative(
    trials: int, n_max: int = 8, seed: int = 0
) -> PropertyReport:
    """Inverses of valid regularized Laplacians are entrywise nonnegative."""
    if trials <= 0:
        raise InputError("trials must be positive")
    rng = np.random.default_rng(seed)
    failures = 0
    worst = -math.inf
    witness = ""
    for _ in range(trials):
        g, sigma = _sample_instance(rng, n_max)
        violation = _eval_inverse_nonnegative(g, sigma)
        worst = max(worst, violation)
        if violation > VIOLATION_TOL:
            failures += 1
            if not witness:
                witness = _serialize_witness("inverse_nonnegative", g, sigma, {})
    return PropertyReport(
        property="inverse_nonnegative",
        trials=trials,
        failures=failures,
        worst_violation=worst,
        witness=witness,
    )


def check_monotone_submodular(
    criterion: str, trials: int, n_max: int = 8, seed: int = 0
) -> PropertyReport:
    """Risk reduction is normalized, monotone, and submodular.

    Samples disjoint labeled sets L1, L2 and an extra node v; checks that
    growing the labeled set never increases risk and that v's marginal
    gain shrinks when L2 is added first.
    """
    if trials <= 0:
        raise InputError("trials must be positive")
    if criterion not in ("classification", "survey"):
        raise InputError(f"unknown criterion {criterion!r}")
    rng = np.random.default_rng(seed)
    name = f"monotone_submodular_{criterion}"
    failures = 0
    worst = -math.inf
    witness = ""
    for _ in range(trials):
        g, sigma = _sample_instance(rng, n_max)
        n = g.node_count
        perm = rng.permutation(n)
        size1 = int(rng.integers(0, n - 1))
        l1 = sorted(int(x) for x in perm[:size1])
        v = int(perm[size1])
        rest = perm[size1 + 1 :]
        size2 = int(rng.integers(0, len(rest) + 1))
        l2 = sorted(int(x) for x in rest[:size2])
        violation = _eval_monotone_submodular(g, sigma, l1, l2, v, criterion)
        worst = max(worst, violation)
        if violation > VIOLATION_TOL:
            failures += 1
            if not witness:
                witness = _serialize_witness(
                    name, g, sigma, {"L1": l1, "L2": l2, "v": v}
                )
    return PropertyReport(
        property=name,
        trials=trials,
        failures=failures,
        worst_violation=worst,
        witness=witness,
    )


def check_aofs(trials: int, n_max: int = 8, seed: int = 0) -> PropertyReport:
    """Conditioning on more nodes never raises pairwise correlations.

    Also checks the correlations stay nonnegative, which together rule out
    suppressor variables in the field.
    """
    if trials <= 0:
        raise InputError("trials must be positive")
    rng = np.random.default_rng(seed)
    failures = 0
    worst = -math.inf
    witness = ""
    for _ in range(trials):
        g, sigma = _sample_instance(rng, max(n_max, 3), n_min=3)
        n = g.node_count
        perm = rng.permutation(n)
        size1 = int(rng.integers(0, n - 2))
        l1 = sorted(int(x) for x in perm[:size1])
        rest_after_l1 = perm[size1:]
        size2 = int(rng.integers(0, len(rest_after_l1) - 2 + 1))
        l2 = sorted(int(x) for x in rest_after_l1[:size2])
        rest = rest_after_l1[size2:]
        i, j = int(rest[0]), int(rest[1])
        violation = _eval_aofs(g, sigma, l1, l2, i, j)
        worst = max(worst, violation)
        if violation > VIOLATION_TOL:
            failures += 1
            if not witness:
                witness = _serialize_witness(
                    "aofs", g, sigma, {"L1": l1, "L2": l2, "i": i, "j": j}
                )
    return PropertyReport(
        property="aofs",
        trials=trials,
        failures=failures,
        worst_violation=worst,
        witness=witness,
    )


def check_greedy_ratio(
    criterion: str,
    trials: int,
    n_max: int = 10,
    k_max: int = 3,
    seed: int = 0,
) -> PropertyReport:
    """Greedy achieves at least (1 - 1/e) of the exhaustive optimal gain.

    Unit costs; the optimum is enumerated over all subsets of size k, so
    keep n_max and k_max small.  The minimum observed ratio is
    ``(1 - 1/e) - worst_violation``.
    """
    if trials <= 0:
        raise InputError("trials must be positive")
    if criterion not in ("classification", "survey"):
        raise InputError(f"unknown criterion {criterion!r}")
    if n_max > 12 or k_max > 4:
        raise InputError("exhaustive enumeration needs n_max <= 12, k_max <= 4")
    rng = np.random.default_rng(seed)
    name = f"greedy_ratio_{criterion}"
    failures = 0
    worst = -math.inf
    witness = ""
    for _ in range(trials):
        g, sigma = _sample_instance(rng, n_max)
        n = g.node_count
        k = int(rng.integers(1, min(k_max, n - 1) + 1)) if n > 1 else 1
        violation, _ = _eval_greedy_ratio(g, sigma, k, criterion)
        worst = max(worst, violation)
        if violation > VIOLATION_TOL:
            failures += 1
            if not witness:
                witness = _serialize_witness(name, g, sigma, {"k": k})
    return PropertyReport(
        property=name,
        trials=trials,
        failures=failures,
        worst_violation=worst,
        witness=witness,
    )
