import math

import numpy as np
import pytest
from conftest import make_instance
from hypothesis import given
from hypothesis import strategies as st

from obsplan.geometry import Object, Point2, SensingSpec
from obsplan.harness import brute_force, gen_instance, plan_with_method
from obsplan.instance import Instance, prepare
from obsplan.lower_bound import ClusterGraph, build_cluster_graph, lower_bound, regions_overlap
from obsplan.orders import METHODS

S = SensingSpec()


def test_start_inside_region_zero():
    inst = make_instance([(0, 0, 0), (100, 100, 0)], start=(5, 0))
    g = build_cluster_graph(prepare(inst))
    assert g.dist[0, 1] == 0.0
    assert g.dist[0, 2] > 0.0


def test_back_to_back_far_apart():
    inst = make_instance([(0, 0, 180), (30, 0, 0)])
    g = build_cluster_graph(prepare(inst))
    assert g.dist[1, 2] >= 30 - 2 * S.d_max - 1e-9


def test_facing_each_other_overlap():
    a = Object(Point2(0, 0), 0.0)
    b = Object(Point2(5, 0), math.pi)
    assert regions_overlap(a, b, S, 0.5)
    inst = make_instance([(0, 0, 0), (5, 0, 180)])
    assert build_cluster_graph(prepare(inst)).dist[1, 2] == 0.0


def test_overlap_without_shared_grid_point():
    # Parallel objects side by side: the regions intersect, but the coarse
    # grids need not produce a point inside both.
    a = Object(Point2(0, 0), 0.0)
    b = Object(Point2(0, 3), 0.0)
    assert regions_overlap(a, b, S, 0.5)
    inst = Instance(objects=(a, b), epsilon=1.0)
    assert build_cluster_graph(prepare(inst)).dist[1, 2] == 0.0


def test_far_apart_regions_disjoint():
    assert not regions_overlap(Object(Point2(0, 0)), Object(Point2(25, 0)), S, 0.5)


def test_all_overlapping_with_start_inside():
    inst = make_instance([(0, 0, 0), (10, 0, 180), (5, -5, 90)], start=(5, 0))
    assert lower_bound(prepare(inst)) == 0.0


def test_mst_over_given_graph():
    w = np.array([[0, 10, 12], [10, 0, 5], [12, 5, 0]], dtype=float)
    prep = prepare(gen_instance(2, seed=0))
    assert lower_bound(prep, ClusterGraph(w)) == pytest.approx(15.0)


@given(st.integers(0, 10_000), st.integers(2, 9), st.sampled_from([40.0, 200.0]))
def test_graph_invariants(seed, n, map_size):
    inst = gen_instance(n, map_size=map_size, seed=seed)
    g = build_cluster_graph(prepare(inst))
    assert np.all(np.diag(g.dist) == 0)
    assert np.array_equal(g.dist, g.dist.T)
    assert np.all(g.dist >= 0)
    pos = [inst.start] + [o.position for o in inst.objects]
    for i in range(1, n + 1):
        for j in range(1, n + 1):
            assert g.dist[i, j] <= math.dist(pos[i], pos[j]) + 2 * inst.sensing.d_max + 1e-9


@given(st.integers(0, 10_000), st.integers(2, 7), st.randoms())
def test_lb_permutation_invariant(seed, n, rnd):
    inst = gen_instance(n, map_size=120, seed=seed)
    objs = list(inst.objects)
    rnd.shuffle(objs)
    shuffled = Instance(objects=tuple(objs), sensing=inst.sensing, start=inst.start, epsilon=inst.epsilon)
    assert lower_bound(prepare(shuffled)) == pytest.approx(lower_bound(prepare(inst)), abs=1e-9)


def test_lb_below_every_plan_n5():
    prep = prepare(gen_instance(5, seed=77))
    lb = lower_bound(prep)
    for f in (0.3, 0.6, 0.9):
        q = prep.q_star(f)
        for m in METHODS + ("BRUTE",):
            plan = plan_with_method(prep, m, q)
            if plan.feasible:
                assert lb <= plan.total_length + 1e-9


@given(st.integers(0, 10_000), st.integers(2, 4))
def test_lb_below_brute_optimum_dense(seed, n):
    prep = prepare(gen_instance(n, map_size=40, seed=seed))
    lb = lower_bound(prep)
    plans, _ = brute_force(prep, [prep.quality_band()[0]])
    for plan in plans.values():
        assert plan.feasible
        assert lb <= plan.total_length + 1e-9
