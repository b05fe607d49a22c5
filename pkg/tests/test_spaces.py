import itertools

import pytest
from hypothesis import given, settings, strategies as st

from fasearch.core import BoundSequence, Carrier, ConfigError, UnsupportedCarrier, eval_sequence
from fasearch.spaces import (
    SequenceSkeleton,
    bound_sequence_at,
    closure,
    closure_fixpoint,
    count_expanded,
    elementary_catalog,
    enumerate_assignments,
    enumerate_bound,
    enumerate_structures,
    structure_at,
    total_tables,
)

from helpers import table_space


def brute_closure(space, n):
    """Oracle: evaluate every bound sequence of length <= n directly."""
    m = space.carrier.m
    return {tuple(eval_sequence(space, s, x) for x in range(m)) for s in enumerate_bound(space, n)}


def brute_fixpoint(space, limit=12):
    prev = brute_closure(space, 1)
    for n in range(2, limit):
        cur = brute_closure(space, n)
        if cur == prev:
            return n - 1, cur
        prev = cur
    raise AssertionError("no fixpoint below limit")


def space_with(m_prims, sizes=None, m=3):
    sizes = sizes or [1] * m_prims
    return table_space(
        m, *[(f"f{i}", [0] * (m * k), tuple((j,) for j in range(k))) for i, k in enumerate(sizes)]
    )


class TestEnumeration:
    def test_two_prims_three_long(self):
        assert len(list(enumerate_structures(space_with(2), 3))) == 14

    def test_one_prim(self):
        assert len(list(enumerate_structures(space_with(1), 5))) == 5

    def test_fourth_item(self):
        sp = space_with(3)
        fourth = list(enumerate_structures(sp, 2))[3]
        assert fourth.step_ids == ("f0", "f0")

    def test_canonical_order(self):
        sp = space_with(3)
        got = [s.step_ids for s in enumerate_structures(sp, 3)]
        expect = [p for k in (1, 2, 3) for p in itertools.product(sp.ids, repeat=k)]
        assert got == expect

    @pytest.mark.parametrize("m,n", [(1, 4), (2, 4), (3, 4), (3, 2)])
    def test_completeness(self, m, n):
        sp = space_with(m)
        items = [s.step_ids for s in enumerate_structures(sp, n)]
        assert len(items) == len(set(items)) == count_expanded(sp, n)[0]

    @given(st.integers(1, 3), st.integers(1, 4), st.data())
    @settings(max_examples=40, deadline=None)
    def test_ranges_partition_the_stream(self, m, n, data):
        sp = space_with(m)
        full = list(enumerate_structures(sp, n))
        cuts = sorted(data.draw(st.lists(st.integers(0, len(full)), max_size=4)))
        bounds = [0] + cuts + [len(full)]
        pieces = [s for a, b in zip(bounds, bounds[1:]) for s in enumerate_structures(sp, n, a, b)]
        assert pieces == full
        assert [structure_at(sp, n, i) for i in range(len(full))] == full

    def test_assignments_product(self):
        sp = space_with(2, [2, 3])
        got = list(enumerate_assignments(sp, SequenceSkeleton(("f0", "f1"))))
        assert len(got) == 6
        assert got[1].steps == (("f0", 0), ("f1", 1))

    def test_assignments_degenerate(self):
        sp = space_with(2)
        assert len(list(enumerate_assignments(sp, SequenceSkeleton(("f0", "f1", "f0"))))) == 1

    def test_assignments_odometer(self):
        sp = space_with(1, [2])
        got = list(enumerate_assignments(sp, SequenceSkeleton(("f0", "f0"))))
        assert [tuple(p for _, p in s.steps) for s in got] == [(0, 0), (0, 1), (1, 0), (1, 1)]


class TestCounting:
    def test_degenerate_grid(self):
        assert count_expanded(space_with(2), 3) == (14, 14)

    def test_param_grid(self):
        assert count_expanded(space_with(1, [3]), 2) == (2, 12)

    def test_five_prims_ten_long(self):
        # geometric series (5^11 - 5) / 4, computed independently of the sum
        assert (5**11 - 5) // 4 == 12_207_030
        assert count_expanded(space_with(5), 10)[0] == 12_207_030

    @pytest.mark.parametrize("sizes,n", [([1, 2], 3), ([2, 2, 1], 2), ([3], 3)])
    def test_matches_enumeration(self, sizes, n):
        sp = space_with(len(sizes), sizes)
        structs, bound = count_expanded(sp, n)
        assert bound == sum(1 for _ in enumerate_bound(sp, n))
        assert structs == sum(1 for _ in enumerate_structures(sp, n))

    def test_bound_unranking_is_a_bijection(self):
        sp = space_with(2, [2, 1])
        total = count_expanded(sp, 3)[1]
        got = {bound_sequence_at(sp, i) for i in range(total)}
        assert got == set(enumerate_bound(sp, 3))


class TestClosure:
    def test_three_cycle(self):
        sp = table_space(3, ("inc", (1, 2, 0)))
        assert closure(sp, 3) == {(1, 2, 0), (2, 0, 1), (0, 1, 2)}

    def test_involution(self):
        sp = table_space(2, ("not", (1, 0)))
        assert len(closure(sp, 2)) == 2

    def test_t3_generators_reach_all_maps(self):
        sp = elementary_catalog("t3-generators")
        depth, tables = closure_fixpoint(sp)
        # brute-force oracle fixes the depth at 5
        assert brute_fixpoint(sp) == (5, set(tables))
        assert depth == 5
        assert len(total_tables(tables)) == 27

    def test_t2_generators(self):
        sp = elementary_catalog("t2-generators")
        assert [p.table for p in sp.primitives] == [(1, 0), (0, 0)]
        depth, tables = closure_fixpoint(sp)
        assert len(total_tables(tables)) == 4
        assert brute_fixpoint(sp) == (depth, set(tables))

    @pytest.mark.slow
    def test_t4_generators(self):
        sp = elementary_catalog("t4-generators")
        depth, tables = closure_fixpoint(sp)
        assert len(total_tables(tables)) == 256
        assert brute_fixpoint(sp) == (9, set(tables))

    def test_real_carrier_unsupported(self):
        with pytest.raises(UnsupportedCarrier):
            closure(elementary_catalog("real-basic"), 2)

    def test_partial_tables_kept_apart(self):
        sp = table_space(3, ("inc", (1, 2, 0), ((),), {0}))
        tabs = closure(sp, 3)
        assert (1, 2, None) in tabs
        assert total_tables(tabs) == frozenset()

    @given(st.integers(2, 3), st.lists(st.lists(st.integers(0, 2), min_size=3, max_size=3), min_size=1, max_size=3),
           st.integers(1, 5))
    @settings(max_examples=40, deadline=None)
    def test_sound_and_monotone(self, m, tables, n):
        tables = [[v % m for v in t[:m]] for t in tables]
        sp = table_space(m, *[(f"g{i}", t) for i, t in enumerate(tables)])
        assert closure(sp, n) == brute_closure(sp, n)
        assert closure(sp, n) <= closure(sp, n + 1)


class TestCatalog:
    def test_unknown(self):
        with pytest.raises(ConfigError):
            elementary_catalog("t9")

    def test_real_basic(self):
        sp = elementary_catalog("real-basic")
        assert sp.ids == ("affine", "scale", "sin", "exp", "relu")
        assert not sp.carrier.is_finite

    def test_t3_listing(self):
        sp = elementary_catalog("t3-generators")
        assert [(p.id, p.table) for p in sp.primitives] == [
            ("swap01", (1, 0, 2)), ("cycle", (1, 2, 0)), ("merge10", (0, 0, 2))
        ]


class TestSearchSpace:
    def test_duplicate_ids(self):
        with pytest.raises(ConfigError, match="duplicate"):
            table_space(2, ("f", (0, 1)), ("f", (1, 0)))

    def test_carrier_mismatch(self):
        from fasearch.core import Primitive
        from fasearch.spaces import SearchSpace

        with pytest.raises(ConfigError):
            SearchSpace(Carrier.finite(2), (Primitive("f", Carrier.finite(3), table=(0, 1, 2)),))

    def test_validate(self):
        sp = table_space(2, ("f", (0, 1)))
        with pytest.raises(ConfigError):
            sp.validate(BoundSequence((("f", 1),)))
        with pytest.raises(ConfigError):
            sp.validate(BoundSequence((("g", 0),)))
