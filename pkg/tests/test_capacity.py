import itertools
import math

import pytest
from hypothesis import given, settings, strategies as st

from fasearch.capacity import (
    EmptyCapacity,
    information_capacity,
    information_potential,
    potential_growth,
    trace_tuples,
    vc_dimension,
    vc_report,
)
from fasearch.core import BudgetExceeded, Carrier, ConfigError, ContractViolation, Primitive, UnsupportedCarrier, eval_primitive, eval_sequence
from fasearch.experiments import random_space
from fasearch.io import load_space
from fasearch.spaces import SearchSpace, SequenceSkeleton, elementary_catalog, enumerate_bound, enumerate_structures

from helpers import table_space

sk = lambda *ids: SequenceSkeleton(ids)


def brute_traces(space, n, collapsed=False):
    """Oracle: one explicit walk per (bound sequence, x)."""
    out = set()
    for s in enumerate_bound(space, n):
        for x in space.carrier.values():
            steps, y = [], x
            for pid, p in s.steps:
                y = eval_primitive(space.primitive(pid), p, y)
                if y is None:
                    break
                steps.append((p, y))
            else:
                out.add((x, "Pi", y) if collapsed else (x, tuple(steps)))
    return out


class TestCapacity:
    def test_one_step_two_params(self):
        sp = table_space(3, ("f", (0, 1, 2, 1, 2, 0), ((0,), (1,))))
        r = information_capacity(sp, sk("f"), collapsed=False)
        assert r.cardinality == 18 and r.factor_sizes == (3, 2, 3)

    def test_two_steps_with_restriction(self):
        sp = table_space(3, ("a", (1, 2, 0), ((),), {0}), ("b", (2, 0, 1)))
        r = information_capacity(sp, sk("a", "b"))
        assert r.factor_sizes == (3, 1, 2, 1, 2)
        assert r.cardinality == 12

    @pytest.mark.parametrize("m", [1, 2, 5])
    def test_identity(self, m):
        sp = table_space(m, ("id", tuple(range(m))))
        assert information_capacity(sp, sk("id")).cardinality == m * m

    def test_collapsed(self):
        sp = table_space(3, ("f", (0, 1, 2, 1, 2, 0), ((0,), (1,))), ("g", (0, 0, 1), ((1,),)))
        r = information_capacity(sp, sk("f", "g"), collapsed=True)
        assert r.factor_sizes == (3, 2, 2) and r.collapsed

    def test_empty_image(self):
        sp = table_space(2, ("z", (0, 0), ((),), {0}))
        with pytest.raises(EmptyCapacity):
            information_capacity(sp, sk("z"))

    def test_real_is_sampled(self):
        sp = elementary_catalog("real-basic")
        r = information_capacity(sp, sk("relu"))
        assert r.sampled and r.factor_sizes[0] == 64

    @pytest.mark.parametrize("seed", range(6))
    def test_product_identity_all_skeletons(self, seed):
        import random

        sp = random_space(random.Random(seed), 3, 3, restrict_p=0.0)
        for s in enumerate_structures(sp, 3):
            r = information_capacity(sp, s)
            assert r.cardinality == math.prod(r.factor_sizes)
            assert all(f >= 1 for f in r.factor_sizes)


class TestPotential:
    def test_identity_space(self):
        sp = table_space(3, ("id", (0, 1, 2)))
        assert information_potential(sp, 1) == (3, False)

    def test_collapsed_equal_across_parameter_sets(self):
        # same rule (the parameter does not change the map), different parameter subsets of one Pi
        s1 = table_space(3, ("f", (1, 2, 0, 1, 2, 0), ((0,), (1,))))
        s2 = table_space(3, ("f", (1, 2, 0), ((1,),)))
        assert information_potential(s1, 2, collapsed=True) == information_potential(s2, 2, collapsed=True)
        assert information_potential(s1, 2).cardinality != information_potential(s2, 2).cardinality

    def test_collapsed_split_invariance(self):
        rule = (1, 0, 2)
        s1 = table_space(3, ("f", rule * 2, ((0,), (1,))), ("g", (0, 0, 2) * 2, ((0,), (1,))))
        s2 = table_space(3, ("f", rule, ((0,),)), ("g", (0, 0, 2), ((1,),)))
        for n in (1, 2, 3):
            assert information_potential(s1, n, True) == information_potential(s2, n, True)

    def test_strict_subset(self):
        a = table_space(3, ("inc", (1, 2, 0)))
        b = table_space(3, ("inc", (1, 2, 0)), ("swap01", (1, 0, 2)))
        ua, ub = brute_traces(a, 2), brute_traces(b, 2)
        assert ua < ub
        assert len(ua) == 6
        assert information_potential(a, 2).cardinality == len(ua) < information_potential(b, 2).cardinality == len(ub)

    @given(st.integers(0, 5000), st.integers(1, 3), st.booleans())
    @settings(max_examples=40, deadline=None)
    def test_matches_oracle_and_monotone(self, seed, n, collapsed):
        import random

        rng = random.Random(seed)
        sp = random_space(rng, rng.choice((2, 3)), rng.randint(1, 3))
        got = trace_tuples(sp, n, collapsed)
        assert got == brute_traces(sp, n, collapsed)
        assert got <= trace_tuples(sp, n + 1, collapsed)
        bigger = sp.with_primitive(Primitive("extra", sp.carrier, table=tuple(rng.randrange(sp.carrier.m) for _ in range(sp.carrier.m))))
        assert got <= trace_tuples(bigger, n, collapsed)

    def test_real_sampled(self):
        c = Carrier.real(0.0, 1.0, grid=5)
        sp = SearchSpace(c, (Primitive("r", c, builtin="relu"),))
        assert information_potential(sp, 2) == (10, True)

    def test_budget(self):
        with pytest.raises(BudgetExceeded):
            information_potential(elementary_catalog("t3-generators"), 10, ceiling=1000)


class TestGrowth:
    def test_t3_saturates_with_closure(self):
        g = potential_growth(elementary_catalog("t3-generators"), 6)
        assert g.saturation == 5
        assert list(g.cardinalities) == sorted(g.cardinalities)

    def test_constant(self):
        g = potential_growth(table_space(3, ("k", (1, 1, 1))), 3)
        assert g.saturation == 1

    def test_inc(self):
        g = potential_growth(table_space(3, ("inc", (1, 2, 0))), 3)
        assert g.saturation == 3
        assert g.cardinalities == (3, 6, 9)

    def test_not_reached(self):
        g = potential_growth(table_space(3, ("inc", (1, 2, 0))), 2)
        assert g.saturation is None and g.fixpoint == 3

    def test_real_unsupported(self):
        with pytest.raises(UnsupportedCarrier):
            potential_growth(elementary_catalog("real-basic"), 2)


def brute_vc(labellings, points, max_d):
    """Oracle: largest d with some d-subset whose projections cover all 2^d patterns."""
    best = 0
    for d in range(1, max_d + 1):
        for subset in itertools.combinations(range(len(points)), d):
            if len({tuple(l[i] for i in subset) for l in labellings}) == 2**d:
                best = d
    return best


def check_witness(space, rep):
    d = rep.dimension
    seen = set()
    for pattern, seq in rep.witnesses.items():
        got = tuple(eval_sequence(space, seq, x) for x in rep.points)
        assert got == pattern
        seen.add(got)
    assert len(seen) == 2**d


class TestVC:
    def test_thresholds(self, fixtures):
        sp = load_space(fixtures / "thresholds.json")
        pts = list(range(10))
        labellings = [[int(x >= t) for x in pts] for t in range(10)]
        assert brute_vc(labellings, pts, 3) == 1
        rep = vc_report(sp, 1, pts, 3)
        assert rep.dimension == 1
        check_witness(sp, rep)

    @pytest.mark.parametrize("m", [2, 3, 4])
    def test_full_tables(self, m):
        params = tuple((p,) for p in range(2**m))
        table = tuple((p >> x) & 1 for p in range(2**m) for x in range(m))
        sp = table_space(m, ("dich", table, params))
        rep = vc_report(sp, 1, list(range(m)), m)
        assert rep.dimension == m
        check_witness(sp, rep)

    def test_constant(self):
        sp = table_space(3, ("zero", (0, 0, 0)))
        assert vc_dimension(sp, 2, [0, 1, 2], 2) == 0

    def test_non_binary(self):
        sp = table_space(3, ("inc", (1, 2, 0)))
        with pytest.raises(ContractViolation, match=r"inc\[0\]"):
            vc_dimension(sp, 1, [0, 1, 2], 2)

    def test_too_few_points(self):
        with pytest.raises(ConfigError):
            vc_dimension(table_space(2, ("id", (0, 1))), 1, [0], 2)

    @given(st.integers(0, 3000))
    @settings(max_examples=30, deadline=None)
    def test_matches_oracle_and_log_bound(self, seed):
        import random

        rng = random.Random(seed)
        m = rng.choice((2, 3, 4))
        k = rng.randint(1, 4)
        table = tuple(rng.randrange(2) for _ in range(m * k))
        sp = table_space(m, ("h", table, tuple((j,) for j in range(k))), ("g", tuple(rng.randrange(2) for _ in range(m))))
        pts = list(range(m))
        rep = vc_report(sp, 1, pts, m)
        labellings = [[eval_sequence(sp, s, x) for x in pts] for s in enumerate_bound(sp, 1)]
        assert rep.dimension == brute_vc(labellings, pts, m)
        assert 2**rep.dimension <= rep.dichotomies
        check_witness(sp, rep)
