from collections import Counter

from hypothesis import given, strategies as st

from fasearch.rng import SplitMix64, mix64, sample_without_replacement


def test_reference_stream():
    # published SplitMix64 outputs for seed 0
    r = SplitMix64(0)
    assert [r.next_u64() for _ in range(3)] == [0xE220A8397B1DCDAF, 0x6E789E6AA1B965F4, 0x06C45D188009454F]


def test_counter_based():
    r = SplitMix64(99)
    vals = [r.next_u64() for _ in range(4)]
    assert vals[2] == mix64((99 + 3 * 0x9E3779B97F4A7C15) % 2**64)


def test_below_is_roughly_uniform():
    r = SplitMix64(1)
    counts = Counter(r.below(6) for _ in range(6000))
    assert set(counts) == set(range(6))
    assert all(800 < c < 1200 for c in counts.values())


def test_below_big_population():
    r = SplitMix64(2)
    n = 3 * 2**70 + 5
    assert all(0 <= r.below(n) < n for _ in range(100))


@given(st.integers(0, 2**64 - 1), st.integers(1, 500), st.integers(0, 600))
def test_sampling_without_replacement(seed, pop, k):
    got = sample_without_replacement(seed, pop, k)
    assert got == sorted(set(got))
    assert len(got) == min(pop, k)
    assert all(0 <= v < pop for v in got)
    assert got == sample_without_replacement(seed, pop, k)
