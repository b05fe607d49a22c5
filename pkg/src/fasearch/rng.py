"""SplitMix64: a counter-based 64-bit generator, so draws reproduce across implementations.

Output ``i`` (0-based) for seed ``s`` is ``mix64((s + (i + 1) * 0x9E3779B97F4A7C15) mod 2**64)``.
Integers below ``n`` take ``ceil(bits(n) / 64)`` outputs, most significant first,
keep the low ``bits(n)`` bits and reject values ``>= n``.
"""

from __future__ import annotations

MASK64 = (1 << 64) - 1
GOLDEN = 0x9E3779B97F4A7C15


def mix64(z: int) -> int:
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & MASK64
    return z ^ (z >> 31)


class SplitMix64:
    def __init__(self, seed: int):
        self.seed = seed & MASK64
        self.counter = 0

    def next_u64(self) -> int:
        self.counter += 1
        return mix64((self.seed + self.counter * GOLDEN) & MASK64)

    def below(self, n: int) -> int:
        if n < 1:
            raise ValueError("below() needs n >= 1")
        bits = (n - 1).bit_length()
        if bits == 0:
            return 0
        words = -(-bits // 64)
        while True:
            v = 0
            for _ in range(words):
                v = (v << 64) | self.next_u64()
            v &= (1 << bits) - 1
            if v < n:
                return v

    def random(self) -> float:
        """Uniform float in [0, 1) with 53 random bits."""
        return (self.next_u64() >> 11) * (1.0 / (1 << 53))


def sample_without_replacement(seed: int, population: int, k: int) -> list:
    """``min(k, population)`` distinct integers in ``range(population)``, sorted (Floyd's algorithm)."""
    if k >= population:
        return list(range(population))
    rng = SplitMix64(seed)
    chosen = set()
    for j in range(population - k, population):
        t = rng.below(j + 1)
        chosen.add(j if t in chosen else t)
    return sorted(chosen)
