import pytest

from oracles import diamond_free_dags, random_dags
from rslearn.ci import CountingTester, OracleTester
from rslearn.errors import ConfigError, MissingSepsetError, NoRemovableFoundError
from rslearn.evaluate import score_skeleton
from rslearn.graph import (
    Dag,
    Skeleton,
    clique_number,
    d_separated,
    is_removable,
    true_mb,
    true_vstructures,
)
from rslearn.mb import MbMap, compute_mb
from rslearn.rsl import (
    Auto,
    BoundedClique,
    DiamondFree,
    SepSetMap,
    extract_vstructures,
    find_neighbors_d,
    find_neighbors_omega,
    find_removable_d,
    find_removable_omega,
    learn_auto,
    learn_structure,
    rsl_learn,
)

A, B, C, D = 0, 1, 2, 3


def _mbs(dag):
    return MbMap({v: true_mb(dag, v) for v in range(dag.n)})


class _AlwaysIndependent:
    def __init__(self, n):
        self.n = n

    def test(self, x, y, s=()):
        return True


def _assert_exact(dag, result):
    assert result.skeleton == dag.skeleton(), dag.edges
    for (x, y), s in result.sepsets.items():
        assert d_separated(dag, x, y, s), (dag.edges, x, y, s)
    assert sorted(result.removal_order) == list(range(dag.n))


# ---------------------------------------------------------------------------
# Small examples
# ---------------------------------------------------------------------------

def test_rsl_d_chain(chain3):
    result = learn_structure(OracleTester(chain3), DiamondFree())
    assert result.skeleton.edges == {(0, 1), (1, 2)}
    assert result.sepsets.get(0, 2) == {1}
    assert len(result.sepsets) == 1
    assert not result.fallback_used
    assert result.mb_stats.total_tests == 3


def test_rsl_d_collider_vstructure(collider3):
    result = learn_structure(OracleTester(collider3), DiamondFree())
    assert result.skeleton.edges == {(0, 2), (1, 2)}
    assert result.sepsets.get(0, 1) == frozenset()
    assert extract_vstructures(result.skeleton, result.sepsets) == {(0, 2, 1)}


def test_chain_has_no_vstructure(chain3):
    result = learn_structure(OracleTester(chain3), DiamondFree())
    assert extract_vstructures(result.skeleton, result.sepsets) == set()


def test_left_diamond_removing_source_first_adds_one_edge(diamond_left):
    result = learn_structure(OracleTester(diamond_left), DiamondFree(), order=[A, B, C, D])
    assert result.removal_order[0] == A
    report = score_skeleton(diamond_left.skeleton(), result.skeleton)
    assert result.skeleton.has_edge(B, C)
    assert report.extra_edges == 1
    assert report.missing_edges == 0
    assert report.recall == 1.0
    assert report.precision == pytest.approx(5 / 6)


@pytest.mark.parametrize("first", [B, C, D])
def test_left_diamond_other_first_vertices_recover_skeleton(diamond_left, first):
    order = [first] + [v for v in (A, B, C, D) if v != first]
    result = learn_structure(OracleTester(diamond_left), DiamondFree(), order=order)
    assert result.removal_order[0] == first
    assert result.skeleton == diamond_left.skeleton()


def test_left_diamond_all_vertices_pass_diamond_check(diamond_left):
    tester = OracleTester(diamond_left)
    mbs = _mbs(diamond_left)
    for first in (A, B, C, D):
        ranks = {v: (0 if v == first else 1) for v in range(4)}
        x, fallback = find_removable_d(range(4), tester, mbs, ranks=ranks)
        assert x == first
        assert not fallback


def test_right_diamond_vstructures_with_sink_first(diamond_right):
    result = learn_structure(OracleTester(diamond_right), DiamondFree(), order=[D, A, B, C])
    assert result.removal_order[0] == D
    assert result.skeleton == diamond_right.skeleton()
    assert extract_vstructures(result.skeleton, result.sepsets) == {(B, A, C), (B, D, C)}


def test_single_vertex_and_empty_graph():
    result = rsl_learn(OracleTester(Dag(1)), MbMap({0: ()}), DiamondFree())
    assert result.skeleton.edges == frozenset()
    assert result.removal_order == [0]
    result = rsl_learn(OracleTester(Dag(0)), MbMap(), DiamondFree())
    assert result.skeleton.n == 0
    assert result.removal_order == []


def test_side_information_validation(chain3):
    with pytest.raises(ConfigError):
        BoundedClique(0)
    with pytest.raises(ConfigError):
        rsl_learn(OracleTester(chain3), _mbs(chain3), Auto())


# ---------------------------------------------------------------------------
# Diamond-free subroutines
# ---------------------------------------------------------------------------

def test_find_removable_d_chain(chain3):
    x, fallback = find_removable_d(range(3), OracleTester(chain3), _mbs(chain3))
    assert x in (0, 2)
    assert not fallback


def test_find_removable_d_returns_removable_vertex():
    for dag in diamond_free_dags(40, range(2, 26), 0.82, seed_base=500):
        x, fallback = find_removable_d(range(dag.n), OracleTester(dag), _mbs(dag))
        assert not fallback
        assert is_removable(dag, x), (dag.edges, x)


def test_find_removable_d_falls_back_to_smallest_boundary():
    mbs = MbMap({0: {1, 2}, 1: {0, 2}, 2: {0, 1}})
    flags = {0: True, 1: True, 2: True}
    x, fallback = find_removable_d(range(3), _AlwaysIndependent(3), mbs, flags=flags, ranks={0: 2, 1: 0, 2: 1})
    assert fallback
    assert x == 1
    assert not any(flags.values())


def test_find_neighbors_d_collider(collider3):
    tester = OracleTester(collider3)
    neighbors, sepsets = find_neighbors_d(2, range(3), tester, {0, 1})
    assert neighbors == {0, 1}
    assert sepsets == {}
    neighbors, sepsets = find_neighbors_d(0, range(3), tester, {1, 2})
    assert neighbors == {2}
    assert sepsets == {1: frozenset()}


def test_rsl_d_exact_on_diamond_free_graphs():
    for dag in diamond_free_dags(40, range(5, 26), 0.82, seed_base=600):
        result = learn_structure(OracleTester(dag), DiamondFree())
        _assert_exact(dag, result)
        assert not result.fallback_used


def test_rsl_d_result_independent_of_tie_breaks():
    for dag in diamond_free_dags(5, range(12, 20), 0.82, seed_base=700):
        tester = OracleTester(dag)
        mbs = compute_mb(tester, dag.n)
        skeletons = {rsl_learn(tester, mbs, DiamondFree(), seed=seed).skeleton for seed in range(10)}
        assert skeletons == {dag.skeleton()}


def test_rsl_d_never_misses_edges():
    for dag in random_dags(60, range(4, 13), 0.45, seed_base=800):
        result = learn_structure(OracleTester(dag), DiamondFree())
        assert score_skeleton(dag.skeleton(), result.skeleton).recall == 1.0, dag.edges


def test_learned_vstructures_match_truth():
    for dag in diamond_free_dags(30, range(3, 11), 0.6, seed_base=900):
        result = learn_structure(OracleTester(dag), DiamondFree())
        assert extract_vstructures(result.skeleton, result.sepsets) == true_vstructures(dag)


def test_extract_vstructures_requires_sepsets():
    skeleton = Skeleton(3, frozenset({(0, 2), (1, 2)}))
    with pytest.raises(MissingSepsetError):
        extract_vstructures(skeleton, SepSetMap())


# ---------------------------------------------------------------------------
# Bounded clique number
# ---------------------------------------------------------------------------

def test_find_removable_omega_chain(chain3):
    assert find_removable_omega(range(3), OracleTester(chain3), _mbs(chain3), 2) in (0, 2)


def test_find_removable_omega_m1_needs_empty_boundaries(chain3):
    with pytest.raises(NoRemovableFoundError) as excinfo:
        find_removable_omega(range(3), OracleTester(chain3), _mbs(chain3), 1)
    assert excinfo.value.m == 1
    edgeless = Dag(3)
    assert find_removable_omega(range(3), OracleTester(edgeless), _mbs(edgeless), 1) == 0


def test_find_removable_omega_left_diamond(diamond_left):
    ranks = {B: 0, C: 1, D: 2, A: 3}
    x = find_removable_omega(range(4), OracleTester(diamond_left), _mbs(diamond_left), 3, ranks=ranks)
    assert x == D


def test_find_removable_omega_clears_flags_on_failure(diamond_left):
    ranks = {B: 0, C: 1, D: 2, A: 3}
    flags = {v: True for v in range(4)}
    find_removable_omega(range(4), OracleTester(diamond_left), _mbs(diamond_left), 3, flags=flags, ranks=ranks)
    assert flags == {A: True, B: False, C: False, D: True}


def test_find_neighbors_omega_collider(collider3):
    tester = OracleTester(collider3)
    neighbors, sepsets = find_neighbors_omega(2, range(3), tester, {0, 1}, 2)
    assert neighbors == {0, 1}
    assert sepsets == {}
    neighbors, sepsets = find_neighbors_omega(0, range(3), tester, {1, 2}, 2)
    assert neighbors == {2}
    assert sepsets == {1: frozenset()}


def test_rsl_omega_exact_with_true_clique_bound():
    for dag in random_dags(40, range(3, 16), 0.3, seed_base=1000):
        omega = clique_number(dag)
        for m in (omega, omega + 1):
            result = learn_structure(OracleTester(dag), BoundedClique(m))
            _assert_exact(dag, result)
            assert result.m_used == m


def test_rsl_omega_underestimate_is_detectable():
    seen = 0
    for dag in random_dags(60, range(5, 13), 0.4, seed_base=1100):
        omega = clique_number(dag)
        if omega < 3:
            continue
        seen += 1
        m = omega - 1
        try:
            result = learn_structure(OracleTester(dag), BoundedClique(m))
        except NoRemovableFoundError:
            continue
        assert clique_number(result.skeleton) > m
    assert seen > 10


# ---------------------------------------------------------------------------
# Without side information
# ---------------------------------------------------------------------------

def test_learn_auto_edgeless():
    dag = Dag(3)
    result, m = learn_auto(lambda: OracleTester(dag), 3)
    assert m == 1
    assert result.skeleton.edges == frozenset()
    assert len(result.sepsets) == 3


def test_learn_auto_triangle(triangle3):
    result, m = learn_auto(lambda: OracleTester(triangle3), 3)
    assert m == 3
    assert result.m_used == 3
    assert result.skeleton == triangle3.skeleton()
    assert len(result.attempt_stats) == 3
    assert result.stats.total_tests == sum(a.total_tests for a in result.attempt_stats)
    assert result.mb_stats.total_tests == 3


def test_learn_auto_empty_graph():
    result, m = learn_auto(lambda: OracleTester(Dag(0)), 0)
    assert m == 0
    assert result.skeleton.n == 0


def test_learn_auto_recovers_random_graphs():
    for dag in random_dags(30, range(3, 13), 0.35, seed_base=1200):
        result, m = learn_auto(lambda: OracleTester(dag), dag.n)
        _assert_exact(dag, result)
        assert m <= clique_number(dag)


def test_learn_structure_auto_fills_boundary_stats(diamond_left):
    result = learn_structure(CountingTester(OracleTester(diamond_left)), Auto())
    assert result.skeleton == diamond_left.skeleton()
    assert result.m_used == 3
    assert result.mb_stats.total_tests == 6
