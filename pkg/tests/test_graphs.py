"""Graph construction: incidence matrices, Laplacians, communication rings."""

import json

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from dcnetsim.graphs import (
    CommunicationGraph,
    NetworkTopology,
    TopologyError,
    canonical_csr,
    communication_incidence,
    incidence_matrix,
    load_topology,
    ring_communication,
    save_topology,
    validate_topology,
    weighted_laplacian,
)
from oracles import dense_incidence, dense_laplacian

CASE9_EDGES = (
    (4, 1), (5, 4), (6, 5), (6, 3), (7, 6), (8, 7), (8, 2), (9, 8), (9, 4),
)


def random_tree(rng, n):
    """Random labelled tree edges, each node wired to an earlier one."""
    edges = []
    for i in range(2, n + 1):
        j = int(rng.integers(1, i))
        edges.append((i, j))
    return tuple(edges)


def test_path_incidence_matches_pinned_matrix():
    top = NetworkTopology(n=3, edges=((2, 1), (3, 2)), generators=())
    b = incidence_matrix(top)
    expected = np.array([[-1.0, 0.0], [1.0, -1.0], [0.0, 1.0]])
    assert np.array_equal(b.toarray(), expected)


def test_single_edge_incidence():
    top = NetworkTopology(n=2, edges=((2, 1),), generators=())
    b = incidence_matrix(top)
    assert np.array_equal(b.toarray(), np.array([[-1.0], [1.0]]))


def test_case9_incidence_column_sums_are_exactly_zero():
    top = NetworkTopology(n=9, edges=CASE9_EDGES, generators=(2, 3))
    b = incidence_matrix(top)
    assert b.shape == (9, 9)
    assert b.nnz == 2 * top.m
    col_sums = np.ones(9) @ b
    assert np.array_equal(col_sums, np.zeros(9))
    dense = b.toarray()
    assert np.array_equal(np.count_nonzero(dense == 1.0, axis=0), np.ones(9, int))
    assert np.array_equal(np.count_nonzero(dense == -1.0, axis=0), np.ones(9, int))


def test_incidence_stores_exactly_2m_entries():
    rng = np.random.default_rng(7)
    for n in (2, 5, 17, 40):
        top = NetworkTopology(n=n, edges=random_tree(rng, n), generators=())
        assert incidence_matrix(top).nnz == 2 * (n - 1)


def test_triangle_laplacian_with_uniform_weight_100():
    top = NetworkTopology(n=3, edges=((2, 1), (3, 1), (3, 2)), generators=())
    b = incidence_matrix(top)
    lap = weighted_laplacian(b, np.full(3, 100.0))
    expected = 100.0 * np.array(
        [[2.0, -1.0, -1.0], [-1.0, 2.0, -1.0], [-1.0, -1.0, 2.0]]
    )
    assert np.allclose(lap.toarray(), expected, rtol=0.0, atol=1e-12)


def test_single_edge_laplacian_weight_one():
    top = NetworkTopology(n=2, edges=((2, 1),), generators=())
    lap = weighted_laplacian(incidence_matrix(top), np.ones(1))
    assert np.array_equal(lap.toarray(), np.array([[1.0, -1.0], [-1.0, 1.0]]))


def test_laplacian_matches_dense_oracle_on_random_trees():
    rng = np.random.default_rng(42)
    for n in (2, 3, 6, 12, 30):
        edges = random_tree(rng, n)
        w = rng.uniform(0.5, 5.0, size=len(edges))
        top = NetworkTopology(n=n, edges=edges, generators=())
        lap = weighted_laplacian(incidence_matrix(top), w).toarray()
        assert np.allclose(lap, dense_laplacian(n, edges, w), rtol=0.0, atol=1e-12)


@settings(max_examples=60, deadline=None)
@given(st.data())
def test_laplacian_properties_on_random_graphs(data):
    n = data.draw(st.integers(min_value=2, max_value=15))
    all_pairs = [(i, j) for i in range(2, n + 1) for j in range(1, i)]
    tree = [(i, int(data.draw(st.integers(1, i - 1), label=f"parent{i}")))
            for i in range(2, n + 1)]
    extra = data.draw(
        st.lists(st.sampled_from(all_pairs), max_size=10, unique=True)
    )
    edges = tuple(dict.fromkeys([*tree, *extra]))
    w = np.array(
        data.draw(
            st.lists(
                st.floats(0.1, 10.0, allow_nan=False),
                min_size=len(edges),
                max_size=len(edges),
            )
        )
    )
    top = NetworkTopology(n=n, edges=edges, generators=())
    b = incidence_matrix(top)
    lap = weighted_laplacian(b, w)
    dense = lap.toarray()
    # symmetric, zero row sums, PSD with a zero eigenvalue
    assert np.allclose(dense, dense.T, rtol=0.0, atol=1e-12)
    assert np.max(np.abs(dense @ np.ones(n))) <= 1e-12 * max(1.0, np.abs(dense).max())
    eig = np.linalg.eigvalsh(dense)
    assert eig[0] >= -1e-10 * max(1.0, eig[-1])
    assert abs(eig[0]) <= 1e-9 * max(1.0, eig[-1])
    assert np.allclose(dense, dense_laplacian(n, edges, w), rtol=0.0, atol=1e-12)


def test_laplacian_rejects_nonpositive_weights():
    top = NetworkTopology(n=3, edges=((2, 1), (3, 2)), generators=())
    b = incidence_matrix(top)
    with pytest.raises(TopologyError, match="edge index 1"):
        weighted_laplacian(b, np.array([1.0, 0.0]))
    with pytest.raises(TopologyError):
        weighted_laplacian(b, np.array([1.0, -2.0]))
    with pytest.raises(TopologyError):
        weighted_laplacian(b, np.array([1.0]))


def test_topology_rejects_self_loops_and_bad_ranges():
    with pytest.raises(TopologyError, match="self-loop"):
        NetworkTopology(n=3, edges=((2, 2),), generators=())
    with pytest.raises(TopologyError, match="out of range"):
        NetworkTopology(n=3, edges=((4, 1),), generators=())
    with pytest.raises(TopologyError, match="out of range"):
        NetworkTopology(n=3, edges=((1, 2),), generators=())  # wrong orientation
    with pytest.raises(TopologyError, match="generator index"):
        NetworkTopology(n=3, edges=((2, 1),), generators=(5,))
    with pytest.raises(TopologyError, match="duplicate edge"):
        NetworkTopology(n=3, edges=((2, 1), (2, 1)), generators=())


def test_validate_topology_flips_orientation_and_merges_duplicates(caplog):
    obj = {
        "name": "tiny",
        "n": 3,
        "edges": [[1, 2], [3, 2], [2, 1]],
        "generators": [3, 1],
    }
    with caplog.at_level("INFO", logger="dcnetsim.graphs"):
        top = validate_topology(obj)
    assert top.edges == ((2, 1), (3, 2))
    assert top.generators == (1, 3)
    assert any("merging duplicate edge" in r.message for r in caplog.records)


def test_validate_topology_warns_on_disconnected_graph(caplog):
    obj = {"name": "split", "n": 4, "edges": [[2, 1]], "generators": []}
    with caplog.at_level("WARNING", logger="dcnetsim.graphs"):
        validate_topology(obj)
    assert any("not connected" in r.message for r in caplog.records)


def test_validate_topology_rejects_malformed_objects():
    with pytest.raises(TopologyError, match="missing required key"):
        validate_topology({"n": 3, "edges": []})
    with pytest.raises(TopologyError, match="non-integer"):
        validate_topology({"n": 3, "edges": [[1.5, 1]], "generators": []})
    with pytest.raises(TopologyError, match="must be a pair"):
        validate_topology({"n": 3, "edges": [[1, 2, 3]], "generators": []})
    with pytest.raises(TopologyError):
        validate_topology({"n": "3", "edges": [], "generators": []})
    with pytest.raises(TopologyError, match="JSON object"):
        validate_topology([1, 2, 3])


def test_topology_round_trips_through_json(tmp_path):
    top = NetworkTopology(n=9, edges=CASE9_EDGES, generators=(2, 3), name="case9")
    path = tmp_path / "case9.json"
    save_topology(top, path)
    again = load_topology(path)
    assert again == top
    # the file itself follows the documented schema
    obj = json.loads(path.read_text())
    assert set(obj) == {"name", "n", "edges", "generators"}
    assert all(i > j for i, j in obj["edges"])


def test_ring_two_generators_gives_single_edge():
    top = NetworkTopology(n=9, edges=CASE9_EDGES, generators=(2, 7))
    com = ring_communication(top, gamma=100.0)
    assert com.edges == ((7, 2),)
    assert np.array_equal(com.weights, np.array([100.0]))


def test_ring_three_generators_closes_the_cycle():
    top = NetworkTopology(n=9, edges=CASE9_EDGES, generators=(1, 4, 9))
    com = ring_communication(top, gamma=100.0)
    assert com.edges == ((4, 1), (9, 4), (9, 1))
    assert np.array_equal(com.weights, np.full(3, 100.0))


def test_ring_without_generators_is_empty_with_zero_laplacian():
    top = NetworkTopology(n=5, edges=((2, 1), (3, 2), (4, 3), (5, 4)), generators=())
    com = ring_communication(top)
    assert com.m_com == 0
    lap = com.laplacian()
    assert lap.shape == (5, 5)
    assert lap.nnz == 0
    assert communication_incidence(com).shape == (5, 0)


def test_ring_single_generator_is_empty():
    top = NetworkTopology(n=4, edges=((2, 1), (3, 2), (4, 3)), generators=(2,))
    assert ring_communication(top).m_com == 0


def test_ring_is_two_regular_for_k_at_least_three():
    rng = np.random.default_rng(3)
    for k in (3, 4, 7, 12):
        n = 2 * k
        gens = tuple(sorted(rng.choice(np.arange(1, n + 1), size=k, replace=False).tolist()))
        top = NetworkTopology(n=n, edges=random_tree(rng, n), generators=gens)
        com = ring_communication(top, gamma=2.5)
        assert com.m_com == k
        deg = np.zeros(n, int)
        for i, j in com.edges:
            deg[i - 1] += 1
            deg[j - 1] += 1
        assert all(deg[g - 1] == 2 for g in gens)
        assert deg.sum() == 2 * k
        # connected single cycle: Laplacian rank over generators is k-1
        lap = com.laplacian().toarray()
        sub = lap[np.ix_([g - 1 for g in gens], [g - 1 for g in gens])]
        assert np.linalg.matrix_rank(sub / 2.5) == k - 1


def test_ring_rejects_nonpositive_gain():
    top = NetworkTopology(n=3, edges=((2, 1), (3, 2)), generators=(1, 2, 3))
    with pytest.raises(TopologyError, match="gain"):
        ring_communication(top, gamma=0.0)


def test_communication_laplacian_matches_dense_oracle():
    top = NetworkTopology(n=9, edges=CASE9_EDGES, generators=(1, 4, 9))
    com = ring_communication(top, gamma=100.0)
    lap = com.laplacian().toarray()
    assert np.allclose(
        lap, dense_laplacian(9, com.edges, com.weights), rtol=0.0, atol=1e-12
    )
    # nodes outside the ring have empty rows
    assert lap.shape == (9, 9)
    for node in (2, 3, 5, 6, 7, 8):
        assert np.count_nonzero(lap[node - 1]) == 0


def test_canonical_csr_cleans_duplicates_and_zeros():
    from scipy import sparse

    coo = sparse.coo_array(
        (np.array([1.0, 2.0, 0.0, -2.0]),
         (np.array([0, 0, 1, 0]), np.array([1, 1, 0, 1]))),
        shape=(2, 2),
    )
    a = canonical_csr(coo)
    assert a.nnz == 1
    assert a.toarray()[0, 1] == 1.0
    assert a.has_canonical_format


def test_communication_graph_validation():
    with pytest.raises(TopologyError, match="self-loop"):
        CommunicationGraph(n=4, edges=((2, 2),), weights=np.ones(1))
    with pytest.raises(TopologyError, match="out of range"):
        CommunicationGraph(n=4, edges=((5, 1),), weights=np.ones(1))
    with pytest.raises(TopologyError, match="strictly positive"):
        CommunicationGraph(n=4, edges=((2, 1),), weights=np.zeros(1))
    with pytest.raises(TopologyError, match="weights"):
        CommunicationGraph(n=4, edges=((2, 1),), weights=np.ones(2))
