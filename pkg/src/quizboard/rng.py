"""Deterministic random number generation.

Every game owns exactly one `SplitMix64` instance seeded at creation; no
other randomness enters the engine. The same seed plus the same command
sequence therefore reproduces every dice value and question draw exactly,
on any platform and interpreter version, which is what makes replays and
transcript diffing possible.
"""

from __future__ import annotations

_MASK64 = (1 << 64) - 1
_GAMMA = 0x9E3779B97F4A7C15

# largest multiple of n that fits in 64 bits, per modulus (rejection bound)
_REJECT_BOUND: dict[int, int] = {}


class SplitMix64:
    """SplitMix64: a published 64-bit mixing generator with 64-bit state.

    Small enough to specify exactly (one addition, two xor-multiply mixes)
    and statistically solid for game use. Consecutive integer seeds give
    decorrelated streams, so sweeping seeds 0..N is safe.
    """

    __slots__ = ("state",)

    def __init__(self, seed: int) -> None:
        self.state = seed & _MASK64

    def next_u64(self) -> int:
        self.state = (self.state + _GAMMA) & _MASK64
        z = self.state
        z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
        z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK64
        return z ^ (z >> 31)

    def randrange(self, n: int) -> int:
        """Uniform integer in [0, n), bias-free via rejection sampling."""
        bound = _REJECT_BOUND.get(n)
        if bound is None:
            bound = _REJECT_BOUND[n] = ((1 << 64) // n) * n
        v = self.next_u64()
        while v >= bound:
            v = self.next_u64()
        return v % n

    def randint(self, lo: int, hi: int) -> int:
        """Uniform integer in [lo, hi], both ends inclusive."""
        return lo + self.randrange(hi - lo + 1)

    def choice(self, seq):
        return seq[self.randrange(len(seq))]

    def random(self) -> float:
        """Uniform float in [0, 1) with 53 bits of precision."""
        return (self.next_u64() >> 11) * 1.1102230246251565e-16  # 2**-53

    def clone(self) -> "SplitMix64":
        c = SplitMix64(0)
        c.state = self.state
        return c
