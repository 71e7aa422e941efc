"""Weighted graphs and their (regularized) Laplacians.

The similarity structure is an undirected graph with nonnegative edge
weights.  Its Laplacian ``diag(W) - W`` is the precision matrix of the
Gaussian random field; a positive diagonal regularization or the deletion
of one node makes it positive definite.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from typing import IO, Iterable

import numpy as np

from .errors import GraphFormatError, InputError

#: absolute tolerance for sign / row-sum checks on double-precision Laplacians
DEFAULT_TOL = 1e-8
#: smallest eigenvalue above which a Laplacian counts as nonsingular
DEFAULT_EIG_TOL = 1e-10
#: per-node sigma used when regularization is requested without values
DEFAULT_SIGMA = 10.0


@dataclass(frozen=True)
class WeightedGraph:
    """Undirected graph with nonnegative edge weights.

    Each edge is stored once as ``(i, j, w)`` with ``i < j``; the reverse
    direction is implied.  Node ids are dense integers ``0..node_count-1``.
    """

    node_count: int
    edges: tuple[tuple[int, int, float], ...]
    node_names: tuple[str, ...] | None = None

    def __post_init__(self):
        if self.node_count <= 0:
            raise InputError("graph must have at least one node")
        seen: set[tuple[int, int]] = set()
        canonical = []
        for i, j, w in self.edges:
            if i == j:
                raise InputError(f"self-loop at node {i}")
            if not (0 <= i < self.node_count and 0 <= j < self.node_count):
                raise InputError(f"edge ({i},{j}) references a node id out of range")
            if not (w >= 0.0):
                raise InputError(f"edge ({i},{j}) has negative weight {w}")
            key = (min(i, j), max(i, j))
            if key in seen:
                raise InputError(f"duplicate edge ({key[0]},{key[1]})")
            seen.add(key)
            canonical.append((key[0], key[1], float(w)))
        object.__setattr__(self, "edges", tuple(canonical))
        if self.node_names is not None:
            names = tuple(self.node_names)
            if len(names) != self.node_count:
                raise InputError(
                    f"{len(names)} node names for {self.node_count} nodes"
                )
            object.__setattr__(self, "node_names", names)

    def weight_matrix(self) -> np.ndarray:
        """Dense symmetric adjacency matrix W."""
        w = np.zeros((self.node_count, self.node_count))
        for i, j, wij in self.edges:
            w[i, j] = wij
            w[j, i] = wij
        return w

    def neighbors(self) -> list[list[int]]:
        adj: list[list[int]] = [[] for _ in range(self.node_count)]
        for i, j, _ in self.edges:
            adj[i].append(j)
            adj[j].append(i)
        return adj

    def is_connected(self) -> bool:
        return len(connected_components(self)[0]) == self.node_count


@dataclass(frozen=True)
class Laplacian:
    """A graph Laplacian, possibly regularized or with one node deleted.

    ``node_ids[k]`` is the original node id of row/column ``k``; operations
    downstream address nodes by these ids, never by raw row positions.
    """

    matrix: np.ndarray = field(repr=False)
    kind: str  # "unregularized" | "regularized" | "node_deleted"
    node_ids: np.ndarray = field(repr=False)
    regularization: np.ndarray | None = field(default=None, repr=False)
    deleted_node: int | None = None

    @property
    def size(self) -> int:
        return self.matrix.shape[0]

    def positions_of(self, nodes: Iterable[int]) -> np.ndarray:
        """Row/column positions of the given original node ids."""
        lookup = {int(v): k for k, v in enumerate(self.node_ids)}
        try:
            return np.array([lookup[int(v)] for v in nodes], dtype=np.intp)
        except KeyError as exc:
            raise InputError(f"node {exc.args[0]} is not in this Laplacian") from exc


@dataclass(frozen=True)
class ConditionReport:
    """Outcome of the structural checks a Laplacian must satisfy."""

    sign_ok: bool
    symmetric_ok: bool
    connected_ok: bool
    rowsum_ok: bool
    nonsingular_ok: bool
    min_eigenvalue: float

    @property
    def all_ok(self) -> bool:
        return (
            self.sign_ok
            and self.symmetric_ok
            and self.connected_ok
            and self.rowsum_ok
            and self.nonsingular_ok
        )


def load_edge_list(source: IO) -> WeightedGraph:
    """Parse a whitespace-separated edge list ``i j w``.

    Ids are 0-based, weights strictly positive.  Lines starting with ``#``
    and blank lines are skipped.  Duplicate edges (in either direction),
    self-loops, and nonpositive weights are errors naming the line number.
    """
    edges: list[tuple[int, int, float]] = []
    seen: set[tuple[int, int]] = set()
    max_id = -1
    for lineno, raw in enumerate(source, start=1):
        if isinstance(raw, bytes):
            raw = raw.decode("utf-8")
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        parts = line.split()
        if len(parts) != 3:
            raise GraphFormatError(
                f"line {lineno}: expected 'i j w', got {len(parts)} fields"
            )
        try:
            i, j = int(parts[0]), int(parts[1])
            w = float(parts[2])
        except ValueError as exc:
            raise GraphFormatError(f"line {lineno}: {exc}") from exc
        if i < 0 or j < 0:
            raise GraphFormatError(f"line {lineno}: negative node id")
        if i == j:
            raise GraphFormatError(f"line {lineno}: self-loop at node {i}")
        if not w > 0.0:
            raise GraphFormatError(
                f"line {lineno}: weight must be positive, got {parts[2]}"
            )
        key = (min(i, j), max(i, j))
        if key in seen:
            raise GraphFormatError(
                f"line {lineno}: duplicate edge ({key[0]},{key[1]})"
            )
        seen.add(key)
        edges.append((key[0], key[1], w))
        max_id = max(max_id, i, j)
    if max_id < 0:
        raise GraphFormatError("edge list contains no edges")
    return WeightedGraph(node_count=max_id + 1, edges=tuple(edges))


def load_node_names(source: IO) -> tuple[str, ...]:
    """Read the node-name sidecar: line k (0-based) names node k."""
    names = []
    for raw in source:
        if isinstance(raw, bytes):
            raw = raw.decode("utf-8")
        names.append(raw.rstrip("\n"))
    return tuple(names)


def connected_components(g: WeightedGraph) -> list[list[int]]:
    """Connected components as sorted id lists, largest first.

    Ties on size break toward the component containing the lowest node id.
    """
    adj = g.neighbors()
    unseen = set(range(g.node_count))
    components = []
    while unseen:
        root = min(unseen)
        comp = [root]
        unseen.discard(root)
        queue = deque([root])
        while queue:
            u = queue.popleft()
            for v in adj[u]:
                if v in unseen:
                    unseen.discard(v)
                    comp.append(v)
                    queue.append(v)
        components.append(sorted(comp))
    components.sort(key=lambda c: (-len(c), c[0]))
    return components


def largest_connected_component(
    g: WeightedGraph,
) -> tuple[WeightedGraph, dict[int, int]]:
    """Induced subgraph on the largest component plus the old->new id map."""
    comp = connected_components(g)[0]
    mapping = {old: new for new, old in enumerate(comp)}
    keep = set(comp)
    edges = tuple(
        (mapping[i], mapping[j], w) for i, j, w in g.edges if i in keep and j in keep
    )
    names = (
        tuple(g.node_names[old] for old in comp) if g.node_names is not None else None
    )
    sub = WeightedGraph(node_count=len(comp), edges=edges, node_names=names)
    return sub, mapping


def build_laplacian(
    g: WeightedGraph,
    mode: str = "unregularized",
    *,
    sigma: float | np.ndarray | None = None,
    node: int | None = None,
) -> Laplacian:
    """Build ``diag(W) - W`` with the requested modification.

    mode="unregularized"   the plain Laplacian (singular for any graph).
    mode="regularized"     adds ``diag(sigma_i^-2)``; ``sigma`` may be a
                           scalar or per-node array, default 10.0.
    mode="delete_node"     drops the row and column of ``node``; requires a
                           connected graph so the submatrix is nonsingular.
    """
    w = g.weight_matrix()
    lap = np.diag(w.sum(axis=1)) - w
    n = g.node_count
    if mode == "unregularized":
        return Laplacian(matrix=lap, kind="unregularized", node_ids=np.arange(n))
    if mode == "regularized":
        if sigma is None:
            sigma = DEFAULT_SIGMA
        sig = np.broadcast_to(np.asarray(sigma, dtype=float), (n,)).copy()
        if not np.all(sig > 0.0):
            raise InputError("regularization sigma values must be positive")
        lap[np.diag_indices(n)] += sig**-2
        return Laplacian(
            matrix=lap, kind="regularized", node_ids=np.arange(n), regularization=sig
        )
    if mode == "delete_node":
        if node is None or not (0 <= node < n):
            raise InputError(f"delete_node requires a valid node id, got {node}")
        if not g.is_connected():
            raise InputError("delete_node requires a connected graph")
        keep = np.array([v for v in range(n) if v != node], dtype=np.intp)
        return Laplacian(
            matrix=lap[np.ix_(keep, keep)],
            kind="node_deleted",
            node_ids=keep,
            deleted_node=int(node),
        )
    raise InputError(f"unknown Laplacian mode {mode!r}")


def _matrix_connected(m: np.ndarray, tol: float) -> bool:
    """Connectivity of the graph implied by off-diagonal nonzeros."""
    n = m.shape[0]
    if n == 0:
        return False
    if n == 1:
        return True
    seen = np.zeros(n, dtype=bool)
    seen[0] = True
    queue = deque([0])
    while queue:
        u = queue.popleft()
        nbrs = np.flatnonzero(np.abs(m[u]) > tol)
        for v in nbrs:
            if v != u and not seen[v]:
                seen[v] = True
                queue.append(int(v))
    return bool(seen.all())


def validate_conditions(
    lap: Laplacian | np.ndarray,
    tol: float = DEFAULT_TOL,
    eig_tol: float = DEFAULT_EIG_TOL,
) -> ConditionReport:
    """Check the structural conditions a usable Laplacian must satisfy.

    Signs (nonpositive off-diagonal, nonnegative diagonal), symmetry,
    connectivity of the implied graph, nonnegative row sums, and positive
    definiteness via the smallest eigenvalue.  Failures are reported, not
    raised.
    """
    m = lap.matrix if isinstance(lap, Laplacian) else np.asarray(lap, dtype=float)
    n = m.shape[0]
    off = m - np.diag(np.diag(m))
    sign_ok = bool(np.all(off <= tol) and np.all(np.diag(m) >= -tol))
    symmetric_ok = bool(np.all(np.abs(m - m.T) <= tol))
    connected_ok = _matrix_connected(m, tol)
    rowsum_ok = bool(np.all(m.sum(axis=1) >= -tol))
    if n == 0:
        return ConditionReport(sign_ok, symmetric_ok, False, rowsum_ok, False, 0.0)
    min_eig = float(np.linalg.eigvalsh(0.5 * (m + m.T)).min())
    nonsingular_ok = min_eig > eig_tol
    return ConditionReport(
        sign_ok=sign_ok,
        symmetric_ok=symmetric_ok,
        connected_ok=connected_ok,
        rowsum_ok=rowsum_ok,
        nonsingular_ok=nonsingular_ok,
        min_eigenvalue=min_eig,
    )
