import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from conftest import k2
from rolesim.baselines import BaselineConfig, simrank
from rolesim.core import RoleSimConfig, SimilarityMatrix, compute_rolesim
from rolesim.equivalence import automorphism_orbits_bruteforce
from rolesim.evaluate import (
    check_axioms,
    pearson,
    percentile_ranks,
    topk_pairs,
    within_block_avg_rank,
)
from rolesim.graph import BlockSpec, Partition, generate_block_model
from rolesim.iceberg import IcebergTable


def test_percentile_examples():
    assert percentile_ranks([0.2, 0.5, 0.9]).tolist() == pytest.approx([1 / 3, 2 / 3, 1])
    assert percentile_ranks([0.9, 0.2]).tolist() == [1.0, 0.5]
    assert percentile_ranks([4.0] * 5).tolist() == pytest.approx([6 / 10] * 5)
    with pytest.raises(ValueError):
        percentile_ranks([])


@given(st.lists(st.integers(-1000, 1000), min_size=1, max_size=40))
def test_percentile_order_isomorphic(values):
    x = np.array(values, dtype=np.float64)
    assert np.array_equal(percentile_ranks(x), percentile_ranks(x ** 3 + 2 * x + 7))


def test_pearson_examples():
    assert pearson([1, 2, 3], [2, 4, 6]) == pytest.approx(1.0)
    assert pearson([1, 2, 3], [-1, -2, -3]) == pytest.approx(-1.0)
    with pytest.raises(ValueError):
        pearson([1, 1, 1], [1, 2, 3])
    with pytest.raises(ValueError):
        pearson([1, 2], [1, 2, 3])


@settings(max_examples=100)
@given(arrays(np.float64, 12, elements=st.floats(-10, 10)),
       arrays(np.float64, 12, elements=st.floats(-10, 10)),
       st.floats(0.1, 10), st.floats(-5, 5))
def test_pearson_affine_invariance(x, y, a, b):
    if np.ptp(x) < 1e-6 or np.ptp(y) < 1e-6:
        return
    assert pearson(a * x + b, y) == pytest.approx(pearson(x, y), abs=1e-9)
    assert pearson(x, y) == pytest.approx(np.corrcoef(x, y)[0, 1], abs=1e-9)


def test_axioms_pass_on_rolesim_family(family):
    g, _ = family
    orbits = automorphism_orbits_bruteforce(g, max_nodes=14)
    m, _ = compute_rolesim(g, RoleSimConfig(rel_tol=1e-9, max_iters=300))
    rep = check_axioms(m, orbits, tol=1e-9)
    assert rep.all_passed and not rep.skipped


def test_axioms_flag_simrank_on_edge():
    g = k2()
    rep = check_axioms(simrank(g, BaselineConfig(rel_tol=1e-12)), automorphism_orbits_bruteforce(g))
    assert rep.passed("P3") is False
    assert rep.violations["P3"] == pytest.approx(1.0)
    assert not rep.all_passed


def test_axioms_identity_with_singletons():
    rep = check_axioms(np.eye(5), Partition(np.arange(5)))
    assert rep.all_passed


def test_axioms_detect_each_violation():
    s = np.eye(3)
    s[0, 1] = s[1, 0] = 1.0
    s[0, 2], s[2, 0] = 0.9, 0.9
    s[1, 2] = s[2, 1] = 0.2
    rep = check_axioms(s, tol=1e-9)
    # 0 and 1 score 1, so their scores against 2 must match
    assert rep.violations["P4"] == pytest.approx(0.7)
    assert rep.violations["P5"] == pytest.approx(0.7)
    assert rep.skipped == ["P3"]
    bad = np.array([[1.0, 1.2], [0.3, 1.0]])
    rep = check_axioms(bad)
    assert rep.violations["P1"] == pytest.approx(0.2)
    assert rep.violations["P2"] == pytest.approx(0.9)


def test_triangle_check_skipped_for_large_matrices():
    rep = check_axioms(np.eye(201))
    assert rep.violations["P5"] is None and "P5" in rep.skipped
    assert any("SKIP" in line for line in rep.lines())


def test_axiom_report_csv(tmp_path):
    rep = check_axioms(np.eye(3))
    rep.to_csv(tmp_path / "r.csv")
    lines = (tmp_path / "r.csv").read_text().splitlines()
    assert lines[0] == "axiom,name,status,violation,tol" and len(lines) == 6


def test_within_block_perfect_blocks():
    blocks = Partition(np.repeat(np.arange(3), 5))
    s = (blocks.labels[:, None] == blocks.labels[None, :]).astype(float)
    best = within_block_avg_rank(s, blocks).overall
    assert best > 0.5
    rng = np.random.default_rng(0)
    for _ in range(20):
        other = Partition.from_labels(rng.permutation(blocks.labels).tolist())
        assert within_block_avg_rank(s, other).overall <= best + 1e-12


def test_within_block_random_is_about_half():
    rng = np.random.default_rng(1)
    n = 400
    x = rng.random((n, n))
    s = (x + x.T) / 2
    blocks = Partition.from_labels(rng.integers(0, 4, n).tolist())
    assert within_block_avg_rank(s, blocks).overall == pytest.approx(0.5, abs=0.01)


def test_within_block_ignores_singleton_blocks():
    rep = within_block_avg_rank(np.eye(3), Partition(np.array([0, 0, 1])))
    assert set(rep.per_block) == {0}


def test_rolesim_beats_simrank_on_strong_blocks():
    spec = BlockSpec([100, 100, 100], np.array([[0.04, 0.002, 0.01],
                                                [0.002, 0.02, 0.002],
                                                [0.01, 0.002, 0.06]]), seed=4)
    g, blocks = generate_block_model(spec)
    rs = within_block_avg_rank(compute_rolesim(g)[0], blocks).overall
    sr = within_block_avg_rank(simrank(g), blocks).overall
    assert rs > sr


def test_topk_orders_and_breaks_ties():
    s = np.array([[1, 0.5, 0.9, 0.5], [0.5, 1, 0.2, 0.9], [0.9, 0.2, 1, 0.1], [0.5, 0.9, 0.1, 1]])
    assert topk_pairs(SimilarityMatrix(s), 3) == [(0, 2, 0.9), (1, 3, 0.9), (0, 1, 0.5)]
    assert len(topk_pairs(s, 100)) == 6
    with pytest.raises(ValueError):
        topk_pairs(s, 0)


def test_topk_on_table_returns_table_entries_only():
    t = IcebergTable(10, [0, 2, 3], [5, 4, 9], [0.95, 0.99, 0.95])
    assert topk_pairs(t, 5) == [(2, 4, 0.99), (0, 5, 0.95), (3, 9, 0.95)]


def test_topk_family_first_pair_is_an_orbit_pair(family):
    g, idx = family
    orbits = automorphism_orbits_bruteforce(g, max_nodes=14)
    u, v, score = topk_pairs(compute_rolesim(g)[0], 1)[0]
    assert score == 1.0
    assert orbits.labels[u] == orbits.labels[v]
