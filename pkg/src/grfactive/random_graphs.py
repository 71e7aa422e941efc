"""Seeded random graph generators for property checks and benchmarks."""

from __future__ import annotations

import numpy as np

from .graphs import WeightedGraph


def connected_gnp(
    rng: np.random.Generator,
    n: int,
    p: float = 0.5,
    weight_range: tuple[float, float] = (0.1, 2.0),
) -> WeightedGraph:
    """Connected Erdos-Renyi graph with uniform random edge weights.

    Rejection-samples the edge set until connected (fast at p = 0.5).
    """
    if n < 1:
        raise ValueError("need at least one node")
    if n == 1:
        return WeightedGraph(node_count=1, edges=())
    lo, hi = weight_range
    while True:
        mask = rng.random((n, n)) < p
        pairs = [(i, j) for i in range(n) for j in range(i + 1, n) if mask[i, j]]
        if not pairs:
            continue
        edges = tuple(
            (i, j, float(rng.uniform(lo, hi))) for i, j in pairs
        )
        g = WeightedGraph(node_count=n, edges=edges)
        if g.is_connected():
            return g


def random_sigma(
    rng: np.random.Generator, n: int, sigma_range: tuple[float, float] = (1.0, 100.0)
) -> np.ndarray:
    """Per-node regularization scales drawn uniformly."""
    return rng.uniform(sigma_range[0], sigma_range[1], size=n)


def stochastic_block_model(
    rng: np.random.Generator,
    block_sizes: list[int],
    p_in: float,
    p_out: float,
) -> tuple[WeightedGraph, np.ndarray]:
    """Unit-weight stochastic block model plus the per-node block labels."""
    n = sum(block_sizes)
    labels = np.concatenate(
        [np.full(size, b, dtype=int) for b, size in enumerate(block_sizes)]
    )
    edges = []
    for i in range(n):
        for j in range(i + 1, n):
            p = p_in if labels[i] == labels[j] else p_out
            if rng.random() < p:
                edges.append((i, j, 1.0))
    return WeightedGraph(node_count=n, edges=tuple(edges)), labels
