"""Gaussian random field posteriors on graph Laplacians.

Conditioning the field on labeled nodes gives a Gaussian over the
unlabeled ones whose mean is the harmonic extension of the tags and whose
covariance is ``beta`` times the inverse of the unlabeled Laplacian
submatrix.  Tags in [0,1] produce means in [0,1]; the covariance is
entrywise nonnegative.  All objects here are immutable and the operations
are pure, so they are safe to share across threads.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import InputError, NumericalError
from .graphs import Laplacian
from .linalg import spd_inverse, sym


@dataclass(frozen=True)
class GrfModel:
    """A Laplacian together with the heat parameter beta > 0."""

    laplacian: Laplacian
    beta: float = 1.0

    def __post_init__(self):
        if not self.beta > 0.0:
            raise InputError(f"beta must be positive, got {self.beta}")


@dataclass(frozen=True)
class LabeledSet:
    """Queried nodes and their tags in [0,1]."""

    nodes: tuple[int, ...]
    tags: tuple[float, ...]

    def __post_init__(self):
        nodes = tuple(int(v) for v in self.nodes)
        tags = tuple(float(t) for t in self.tags)
        if len(nodes) != len(set(nodes)):
            raise InputError("labeled nodes must be distinct")
        if len(nodes) != len(tags):
            raise InputError("one tag per labeled node required")
        for t in tags:
            if not (0.0 <= t <= 1.0):
                raise InputError(f"tags must lie in [0,1], got {t}")
        object.__setattr__(self, "nodes", nodes)
        object.__setattr__(self, "tags", tags)

    @classmethod
    def empty(cls) -> "LabeledSet":
        return cls(nodes=(), tags=())


@dataclass(frozen=True)
class TestSet:
    """Nodes whose prediction quality matters; None means all unlabeled."""

    __test__ = False  # not a pytest class, despite the name

    nodes: tuple[int, ...] | None = None

    def __post_init__(self):
        if self.nodes is not None:
            nodes = tuple(sorted(int(v) for v in self.nodes))
            if len(nodes) != len(set(nodes)):
                raise InputError("test nodes must be distinct")
            object.__setattr__(self, "nodes", nodes)

    @classmethod
    def all_unlabeled(cls) -> "TestSet":
        return cls(nodes=None)

    @property
    def is_all_unlabeled(self) -> bool:
        return self.nodes is None


@dataclass(frozen=True)
class GrfPosterior:
    """Gaussian over the unlabeled nodes, in ascending node-id order."""

    unlabeled_nodes: np.ndarray = field(repr=False)
    mean: np.ndarray = field(repr=False)
    covariance: np.ndarray = field(repr=False)

    @property
    def size(self) -> int:
        return len(self.unlabeled_nodes)


def _split_positions(lap: Laplacian, labeled_nodes) -> tuple[np.ndarray, np.ndarray]:
    """Positions of the labeled and unlabeled nodes within the Laplacian."""
    labeled = set(int(v) for v in labeled_nodes)
    known = set(int(v) for v in lap.node_ids)
    missing = labeled - known
    if missing:
        raise InputError(f"labeled node {min(missing)} is not in this Laplacian")
    lab_pos = lap.positions_of(sorted(labeled))
    unl_pos = np.array(
        [k for k, v in enumerate(lap.node_ids) if int(v) not in labeled],
        dtype=np.intp,
    )
    return lab_pos, unl_pos


def condition(model: GrfModel, labeled: LabeledSet) -> GrfPosterior:
    """Posterior over the unlabeled nodes given the labeled tags.

    Mean is the harmonic extension ``-L_uu^{-1} L_ul t``; covariance is
    ``beta * L_uu^{-1}``.  Raises NumericalError when the unlabeled
    submatrix is singular (e.g. an empty labeled set on an unregularized
    Laplacian); regularize or delete a node first.
    """
    lap = model.laplacian
    lab_pos, unl_pos = _split_positions(lap, labeled.nodes)
    unl_ids = lap.node_ids[unl_pos]
    n_u = len(unl_pos)
    if n_u == 0:
        return GrfPosterior(
            unlabeled_nodes=unl_ids, mean=np.zeros(0), covariance=np.zeros((0, 0))
        )
    l_uu = lap.matrix[np.ix_(unl_pos, unl_pos)]
    inv = spd_inverse(
        l_uu,
        context="unlabeled submatrix is singular; regularize the Laplacian "
        "or delete a node",
    )
    if len(lab_pos) == 0:
        mean = np.zeros(n_u)
    else:
        order = np.argsort([int(v) for v in labeled.nodes])
        tags = np.asarray(labeled.tags, dtype=float)[order]
        l_ul = lap.matrix[np.ix_(unl_pos, lab_pos)]
        mean = -inv @ (l_ul @ tags)
    return GrfPosterior(
        unlabeled_nodes=unl_ids, mean=mean, covariance=model.beta * inv
    )


def marginalize(posterior: GrfPosterior, test: TestSet) -> GrfPosterior:
    """Restrict a posterior to the test nodes (row/column selection)."""
    if test.is_all_unlabeled:
        return posterior
    ids = [int(v) for v in posterior.unlabeled_nodes]
    lookup = {v: k for k, v in enumerate(ids)}
    missing = [v for v in test.nodes if v not in lookup]
    if missing:
        raise InputError(f"test node {missing[0]} is not an unlabeled node")
    sel = np.array([lookup[v] for v in test.nodes], dtype=np.intp)
    return GrfPosterior(
        unlabeled_nodes=posterior.unlabeled_nodes[sel],
        mean=posterior.mean[sel],
        covariance=posterior.covariance[np.ix_(sel, sel)],
    )


def conditional_correlation(model: GrfModel, labeled_nodes) -> np.ndarray:
    """Correlation matrix of the unlabeled nodes given the labeled ones.

    Normalizes the conditional covariance to unit diagonal; entries are
    nonnegative for any Laplacian with proper signs.
    """
    lap = model.laplacian
    _, unl_pos = _split_positions(lap, labeled_nodes)
    if len(unl_pos) == 0:
        return np.zeros((0, 0))
    inv = spd_inverse(
        lap.matrix[np.ix_(unl_pos, unl_pos)],
        context="conditional covariance requires a nonsingular submatrix",
    )
    d = np.sqrt(np.diag(inv))
    if np.any(d <= 0.0):
        raise NumericalError("conditional variance vanished; cannot normalize")
    return sym(inv / np.outer(d, d))
