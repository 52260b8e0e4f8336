import networkx as nx
import numpy as np
import pytest
from hypothesis import given, settings

from conftest import small_graphs
from rolesim.graph import (
    BlockSpec,
    EdgeListError,
    Graph,
    Partition,
    generate_block_model,
    generate_scale_free,
    k_shell_decomposition,
    parse_edge_list,
    random_block_spec,
    read_graph,
    write_graph,
)


def test_parse_compacts_labels_in_ascending_order():
    g = parse_edge_list("# comment\n10 30\n\n30 20 extra\n")
    assert g.n == 3
    assert g.labels.tolist() == [10, 20, 30]
    assert g.edges() == [(0, 2), (1, 2)]


def test_parse_drops_loops_and_duplicates():
    g = parse_edge_list("1 2\n2 1\n3 3\n2 3\n")
    assert g.num_edges == 2
    assert g.degrees.tolist() == [1, 2, 1]


@pytest.mark.parametrize("text, fragment", [
    ("1 2\n3\n", "line 2"),
    ("1 x\n", "non-integer"),
    ("1 -2\n", "negative"),
    ("# nothing\n", "empty"),
])
def test_parse_errors_name_the_problem(text, fragment):
    with pytest.raises(EdgeListError, match=fragment):
        parse_edge_list(text)


def test_adjacency_is_sorted_csr():
    g = Graph.from_edges(4, [(3, 0), (0, 1), (2, 0)])
    assert g.neighbors(0).tolist() == [1, 2, 3]
    assert g.has_edge(2, 0) and not g.has_edge(1, 2)


def test_round_trip_keeps_isolated_nodes_and_labels(tmp_path):
    g = Graph.from_edges(5, [(0, 1), (1, 2)], labels=[7, 8, 9, 100, 200])
    path = tmp_path / "g.txt"
    write_graph(g, path)
    back = read_graph(path)
    assert back.n == 5
    assert back.edges() == g.edges()
    assert back.labels.tolist() == [7, 8, 9, 100, 200]


def test_read_without_sidecar_parses_raw_labels(tmp_path):
    path = tmp_path / "raw.txt"
    path.write_text("5 9\n9 7\n")
    g = read_graph(path)
    assert g.labels.tolist() == [5, 7, 9]
    assert g.num_edges == 2


def test_neighbor_degrees_sorted():
    g = Graph.from_edges(5, [(0, 1), (0, 2), (2, 3), (2, 4), (1, 2)])
    indptr, vals = g.neighbor_degrees_sorted
    assert vals[indptr[0]:indptr[1]].tolist() == [2, 4]
    assert vals[indptr[2]:indptr[3]].tolist() == [1, 1, 2, 2]


def test_relabel_preserves_structure():
    g = Graph.from_edges(4, [(0, 1), (1, 2), (2, 3)])
    h = g.relabel([3, 2, 1, 0])
    assert h.edges() == [(0, 1), (1, 2), (2, 3)]
    assert h.labels.tolist() == [3, 2, 1, 0]


# --- partitions -------------------------------------------------------------------


def test_partition_from_labels_numbers_by_first_appearance():
    p = Partition.from_labels(["x", "y", "x", "z"])
    assert p.labels.tolist() == [0, 1, 0, 2]
    assert p.k == 3


def test_partition_rejects_gaps():
    with pytest.raises(ValueError):
        Partition(np.array([0, 2, 2]))


def test_partition_refines_and_csv(tmp_path):
    fine = Partition.from_classes(4, [[0, 1]])
    coarse = Partition.from_classes(4, [[0, 1, 2]])
    assert fine.refines(coarse) and not coarse.refines(fine)
    path = tmp_path / "p.csv"
    fine.to_csv(path)
    assert path.read_text().splitlines()[0] == "node,class"
    assert Partition.read_csv(path).as_sets() == fine.as_sets()


# --- generators -----------------------------------------------------------------


@pytest.mark.parametrize("n, m", [(5, 1), (10, 2), (50, 3)])
def test_scale_free_edge_count(n, m):
    g = generate_scale_free(n, m, seed=3)
    assert g.num_edges == m * (m + 1) // 2 + m * (n - m - 1)
    assert g.degrees.min() >= m


def test_scale_free_is_deterministic():
    assert generate_scale_free(100, 2, 7).edges() == generate_scale_free(100, 2, 7).edges()
    assert generate_scale_free(100, 2, 7).edges() != generate_scale_free(100, 2, 8).edges()


@pytest.mark.parametrize("n, m", [(2, 2), (5, 0)])
def test_scale_free_rejects_bad_parameters(n, m):
    with pytest.raises(ValueError):
        generate_scale_free(n, m)


def test_block_model_labels_and_determinism():
    spec = BlockSpec([3, 4], np.array([[1.0, 0.0], [0.0, 1.0]]), seed=1)
    g, blocks = generate_block_model(spec)
    assert blocks.labels.tolist() == [0, 0, 0, 1, 1, 1, 1]
    assert g.num_edges == 3 + 6
    assert generate_block_model(spec)[0].edges() == g.edges()


def test_block_model_density_matches_probabilities():
    sizes = [20, 30]
    P = np.array([[0.3, 0.05], [0.05, 0.6]])
    counts = np.zeros((2, 2))
    seeds = 200
    for seed in range(seeds):
        g, b = generate_block_model(BlockSpec(sizes, P, seed))
        for u, v in g.edges():
            i, j = sorted((b.labels[u], b.labels[v]))
            counts[i, j] += 1
    slots = {(0, 0): 20 * 19 / 2, (1, 1): 30 * 29 / 2, (0, 1): 20 * 30}
    for (i, j), total in slots.items():
        trials = total * seeds
        sigma = np.sqrt(trials * P[i, j] * (1 - P[i, j]))
        assert abs(counts[i, j] - trials * P[i, j]) <= 3 * sigma


@pytest.mark.parametrize("bad", [
    dict(sizes=[2], P=np.array([[1.5]])),
    dict(sizes=[2, 2], P=np.array([[0.1, 0.2], [0.3, 0.1]])),
    dict(sizes=[0], P=np.array([[0.1]])),
    dict(sizes=[2, 2], P=np.array([[0.1]])),
])
def test_block_spec_validation(bad):
    with pytest.raises(ValueError):
        BlockSpec(**bad)


def test_random_block_spec_hits_target_density():
    edges = []
    for seed in range(5):
        spec = random_block_spec(600, 3, 2.0, seed)
        assert sum(spec.sizes) == 600
        g, _ = generate_block_model(spec)
        edges.append(g.num_edges)
    assert abs(np.mean(edges) / 600 - 2.0) < 0.15


# --- K-shells ---------------------------------------------------------------------


@settings(max_examples=150, deadline=None)
@given(small_graphs(max_nodes=12))
def test_k_shell_matches_networkx(g):
    ref = nx.Graph()
    ref.add_nodes_from(range(g.n))
    ref.add_edges_from(g.edges())
    expected = nx.core_number(ref)
    assert k_shell_decomposition(g).tolist() == [expected[v] for v in range(g.n)]


def test_k_shell_on_scale_free_matches_networkx():
    g = generate_scale_free(400, 3, 2)
    ref = nx.Graph(g.edges())
    expected = nx.core_number(ref)
    assert k_shell_decomposition(g).tolist() == [expected[v] for v in range(g.n)]
