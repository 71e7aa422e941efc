import pytest
from hypothesis import strategies as st

from grfactive import WeightedGraph, build_laplacian


@pytest.fixture
def path3():
    return WeightedGraph(3, ((0, 1, 1.0), (1, 2, 1.0)))


@pytest.fixture
def path3_laplacian(path3):
    return build_laplacian(path3)


@pytest.fixture
def star5():
    return WeightedGraph(5, tuple((0, i, 1.0) for i in range(1, 5)))


@pytest.fixture
def cycle4():
    return WeightedGraph(4, ((0, 1, 1.0), (1, 2, 1.0), (2, 3, 1.0), (0, 3, 1.0)))


def random_connected(rng, n, p=0.6):
    """Connected random graph: random spanning tree plus extra edges."""
    edges = {}
    for child in range(1, n):
        parent = int(rng.integers(0, child))
        edges[(parent, child)] = float(rng.uniform(0.1, 2.0))
    for i in range(n):
        for j in range(i + 1, n):
            if (i, j) not in edges and rng.random() < p - 0.5:
                edges[(i, j)] = float(rng.uniform(0.1, 2.0))
    return WeightedGraph(n, tuple((i, j, w) for (i, j), w in sorted(edges.items())))


@st.composite
def connected_graphs(draw, min_nodes=2, max_nodes=8):
    """Hypothesis strategy: connected weighted graph (spanning tree + extras)."""
    n = draw(st.integers(min_nodes, max_nodes))
    weight = st.floats(0.1, 2.0, allow_nan=False, allow_infinity=False)
    edges = {}
    for child in range(1, n):
        parent = draw(st.integers(0, child - 1))
        edges[(parent, child)] = draw(weight)
    extras = draw(
        st.lists(
            st.tuples(st.integers(0, n - 1), st.integers(0, n - 1)),
            max_size=n,
        )
    )
    for i, j in extras:
        if i != j:
            key = (min(i, j), max(i, j))
            if key not in edges:
                edges[key] = draw(weight)
    return WeightedGraph(n, tuple((i, j, w) for (i, j), w in sorted(edges.items())))


@st.composite
def tag_vectors(draw, size):
    return tuple(
        draw(st.floats(0.0, 1.0, allow_nan=False, allow_infinity=False))
        for _ in range(size)
    )
