import math

import numpy as np
import pytest
from conftest import make_instance
from hypothesis import assume, given
from hypothesis import strategies as st
from oracles import obs_quality, run_partition_oracle

from obsplan.geometry import DomainError, Object, Point2, SensingSpec, quality
from obsplan.harness import gen_instance
from obsplan.instance import prepare
from obsplan.pareto import (
    EXACT,
    INFEASIBLE,
    ROUNDED,
    InfeasibleAssumption,
    ParetoSet,
    PathLabel,
    close_table,
    dominates,
    dp_solve,
    fill_table,
    insert_pruned,
    pareto_mask,
    path_length,
    reconstruct,
    run_quality,
)

S = SensingSpec()


def L(d, q):
    return PathLabel(d, q)


def test_dominates_examples():
    assert dominates(L(5, 3), L(6, 2.5))
    assert dominates(L(5, 3), L(5, 3))
    assert not dominates(L(5, 2), L(6, 3))
    assert not dominates(L(6, 3), L(5, 2))
    assert dominates(L(5, 3), L(5, 2))
    assert dominates(L(5, 3), L(5 + 1e-12, 3 - 1e-12))


def test_insert_examples():
    s = ParetoSet([L(4, 5), L(6, 8)])
    assert insert_pruned(s, L(5, 9)).pairs() == [(4, 5), (5, 9)]
    assert insert_pruned(ParetoSet([L(4, 5)]), L(4, 5)).pairs() == [(4, 5)]
    s = ParetoSet([L(4, 5), L(6, 8)])
    assert insert_pruned(s, L(5, 6)).pairs() == [(4, 5), (5, 6), (6, 8)]


def _frontier_ok(pairs):
    return all(b[0] > a[0] and b[1] > a[1] for a, b in zip(pairs, pairs[1:]))


def _naive_frontier(labels):
    out = []
    for a in labels:
        if not any(dominates(b, a) and (b.length, b.quality) != (a.length, a.quality) for b in labels):
            if all(abs(a.length - o[0]) > 1e-9 or abs(a.quality - o[1]) > 1e-9 for o in out):
                out.append((a.length, a.quality))
    return sorted(out)


label_list = st.lists(
    st.tuples(st.integers(0, 30), st.integers(0, 30)).map(lambda t: L(float(t[0]), float(t[1]))),
    max_size=60,
)


@given(label_list)
def test_insert_matches_naive_frontier(labels):
    s = ParetoSet()
    for lab in labels:
        insert_pruned(s, lab)
        assert _frontier_ok(s.pairs())
    assert s.pairs() == _naive_frontier(labels)


@given(label_list, st.data())
def test_reinsert_member_is_noop(labels, data):
    s = ParetoSet()
    for lab in labels:
        insert_pruned(s, lab)
    if not s.labels:
        return
    member = data.draw(st.sampled_from(s.labels))
    before = s.pairs()
    assert insert_pruned(s, PathLabel(member.length, member.quality)).pairs() == before


@given(label_list)
def test_bulk_mask_matches_incremental(labels):
    s = ParetoSet()
    for lab in labels:
        insert_pruned(s, lab)
    lengths = np.array([lab.length for lab in labels], dtype=float)
    quals = np.array([lab.quality for lab in labels], dtype=float)
    keep = pareto_mask(lengths, quals)
    assert [(lengths[k], quals[k]) for k in keep] == s.pairs()


def test_run_quality_examples():
    o = Object(Point2(0, 0), 0.0)
    assert run_quality((4, 0), [o], S) == pytest.approx(quality(o, (4, 0), S))
    assert run_quality((12, 0), [o], S) == INFEASIBLE
    a = Object(Point2(0, 0), 0.0)
    b = Object(Point2(8, 0), math.pi)
    p = (4.0, 1.0)
    expected = obs_quality(a, p, S) + obs_quality(b, p, S)
    assert run_quality(p, [a, b], S) == pytest.approx(expected, abs=1e-12)
    assert run_quality((4.0, 30.0), [a, b], S) == INFEASIBLE


def facing_pair():
    return make_instance([(0, 0, 0), (8, 0, 180)], start=(4, -30))


def test_two_facing_objects_single_stop():
    inst = facing_pair()
    prep = prepare(inst)
    q_lo = prep.quality_band()[0]
    plan = dp_solve(prep, [0, 1], q_star=q_lo)
    ref = run_partition_oracle(inst, prep.xy, prep.owner, [0, 1], [q_lo])[q_lo]
    assert plan.feasible
    assert plan.total_length == pytest.approx(ref, abs=1e-9)
    assert len(plan.stops) == 1 and plan.stops[0][1] == [0, 1]


def test_skipping_gives_one_stop_when_all_share_a_point():
    # Three objects around (5, 0): every region contains it, and it is the
    # closest generated point to the start.
    inst = make_instance([(0, 0, 0), (10, 0, 180), (5, 5, 270)], start=(5, -20))
    prep = prepare(inst)
    plan = dp_solve(prep, [0, 1, 2], q_star=prep.quality_band()[0])
    ref = run_partition_oracle(inst, prep.xy, prep.owner, [0, 1, 2], [plan.q_star])[plan.q_star]
    assert plan.total_length == pytest.approx(ref, abs=1e-9)
    assert len(plan.stops) == 1


def _check_plan(prep, plan, q_star):
    inst = prep.instance
    flat = [k for _, objs in plan.stops for k in objs]
    assert flat == list(plan.order_used)
    q = sum(obs_quality(inst.objects[k], p, inst.sensing) for p, objs in plan.stops for k in objs)
    assert q == pytest.approx(plan.total_quality, abs=1e-9)
    assert q >= q_star - 1e-9
    pts = [inst.start] + plan.waypoints + [inst.start]
    assert sum(math.dist(a, b) for a, b in zip(pts, pts[1:])) == pytest.approx(plan.total_length, abs=1e-9)


def test_n3_seeded_matches_oracle():
    inst = gen_instance(3, map_size=200, seed=11)
    prep = prepare(inst)
    qs = [prep.q_star(f) for f in (0.3, 0.6, 0.9)]
    ref = run_partition_oracle(inst, prep.xy, prep.owner, [0, 1, 2], qs)
    for q in qs:
        plan = dp_solve(prep, [0, 1, 2], q)
        assert plan.feasible == (ref[q] is not None)
        if plan.feasible:
            assert plan.total_length == pytest.approx(ref[q], abs=1e-9)
            _check_plan(prep, plan, q)


@given(st.integers(0, 10_000), st.integers(2, 3), st.sampled_from([0.5, 1.0]), st.floats(0.1, 1.0), st.randoms())
def test_dp_equals_oracle_property(seed, n, eps, frac, rnd):
    inst = gen_instance(n, map_size=40, epsilon=eps, seed=seed)
    prep = prepare(inst)
    assume(max(len(ids) for ids in prep.point_ids) <= 40)
    order = list(range(n))
    rnd.shuffle(order)
    q = prep.q_star(frac)
    ref = run_partition_oracle(inst, prep.xy, prep.owner, order, [q])[q]
    plan = dp_solve(prep, order, q, enforce_band=False)
    assert plan.feasible == (ref is not None)
    if ref is not None:
        assert plan.total_length == pytest.approx(ref, abs=1e-9)
        _check_plan(prep, plan, q)


@given(st.integers(0, 10_000), st.floats(0.1, 0.5))
def test_any_point_relaxation_is_no_longer(seed, frac):
    """Letting a run use any generated point can only help; the DP never beats that."""
    inst = gen_instance(3, map_size=40, epsilon=1.0, seed=seed)
    prep = prepare(inst)
    assume(max(len(ids) for ids in prep.point_ids) <= 25)
    q = prep.q_star(frac)
    plan = dp_solve(prep, [0, 1, 2], q, enforce_band=False)
    anyp = run_partition_oracle(inst, prep.xy, prep.owner, [0, 1, 2], [q], owned_only=False)[q]
    if plan.feasible:
        assert anyp is not None and anyp <= plan.total_length + 1e-9


@given(st.integers(0, 10_000), st.integers(3, 6))
def test_length_monotone_in_q_star(seed, n):
    prep = prepare(gen_instance(n, map_size=100, seed=seed))
    table = fill_table(prep, list(range(n)))
    prev = 0.0
    for f in np.linspace(0.1, 1.0, 10):
        plan = close_table(table, prep.q_star(f))
        if not plan.feasible:
            break
        assert plan.total_length >= prev - 1e-9
        prev = plan.total_length


@given(st.integers(0, 10_000), st.integers(2, 6))
def test_table_invariants(seed, n):
    prep = prepare(gen_instance(n, map_size=80, seed=seed))
    order = list(np.random.default_rng(seed).permutation(n))
    table = fill_table(prep, order)
    assert table.pareto_set(0, 0).pairs() == [(0.0, 0.0)]
    for i in range(1, n + 1):
        assert len(table.cells[i]) == len(prep.point_ids[order[i - 1]])
        for k in range(len(table.cells[i])):
            assert _frontier_ok(table.pareto_set(i, k).pairs())
            for lab in table.pareto_set(i, k):
                assert lab.pred_object < i


def test_reconstruct_chain_lengths():
    prep = prepare(gen_instance(4, map_size=100, seed=5))
    table = fill_table(prep, [0, 1, 2, 3])
    for k, cell in enumerate(table.cells[4]):
        for lab in range(len(cell.length)):
            plan = reconstruct(table, k, lab)
            open_len = path_length(prep.start, plan.waypoints) - math.dist(plan.waypoints[-1], prep.start)
            assert open_len == pytest.approx(cell.length[lab], abs=1e-9)
            assert plan.total_quality == pytest.approx(cell.quality[lab], abs=1e-9)


def test_reconstruct_single_stop():
    inst = facing_pair()
    prep = prepare(inst)
    table = fill_table(prep, [0, 1])
    cell_k = next(k for k, c in enumerate(table.cells[2]) if (c.pred_pos == 0).any())
    lab = int(np.flatnonzero(table.cells[2][cell_k].pred_pos == 0)[0])
    plan = reconstruct(table, cell_k, lab)
    assert len(plan.stops) == 1 and plan.stops[0][1] == [0, 1]


def test_path_length_start_only():
    assert path_length((1.0, 2.0), []) == 0.0


def test_invalid_order_and_band():
    prep = prepare(gen_instance(3, seed=1))
    with pytest.raises(DomainError):
        dp_solve(prep, [0, 1, 1])
    with pytest.raises(DomainError):
        dp_solve(prep, [0, 1])
    lo, hi = prep.quality_band()
    with pytest.raises(InfeasibleAssumption):
        dp_solve(prep, [0, 1, 2], q_star=hi * 1.5)
    with pytest.raises(InfeasibleAssumption):
        dp_solve(prep, [0, 1, 2], q_star=lo * 0.5)


def test_infeasible_is_a_result():
    # Run skipping is disabled, and q* equals the top of the band; with
    # weights below one the weighted best cannot reach it.
    inst = make_instance([(0, 0, 0, 0.5), (100, 100, 90, 1.0)])
    prep = prepare(inst)
    hi = prep.quality_band()[1]
    plan = dp_solve(prep, [0, 1], q_star=hi * 0.99)
    assert not plan.feasible
    assert math.isinf(plan.total_length)


def test_rounded_mode_properties():
    for seed in range(8):
        inst = gen_instance(5, map_size=100, seed=seed)
        prep = prepare(inst)
        delta = prep.grid.delta
        order = list(range(5))
        table = fill_table(prep, order, mode=ROUNDED)
        D = max(math.dist(a.position, b.position) for a in inst.objects for b in inst.objects)
        cap = math.ceil(5 * (D + 2 * inst.sensing.d_max) / delta) + 1
        for row in table.cells[1:]:
            for c in row:
                assert len(c.length) <= cap
                mult = c.length / delta
                assert np.allclose(mult, np.round(mult), atol=1e-6)
        exact = fill_table(prep, order, mode=EXACT)
        for f in (0.3, 0.6):
            q = prep.q_star(f)
            a, b = close_table(exact, q), close_table(table, q)
            assert a.feasible == b.feasible
            if a.feasible:
                assert a.objective - 1e-9 <= b.objective <= a.objective + 5 * delta + 1e-9


def test_no_skipping_uses_one_stop_per_object():
    prep = prepare(facing_pair())
    plan = dp_solve(prep, [0, 1], q_star=prep.quality_band()[0], allow_skipping=False)
    assert [objs for _, objs in plan.stops] == [[0], [1]]
