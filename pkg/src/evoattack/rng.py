"""Self-contained, cross-platform deterministic random number generation.

Search reproducibility must not depend on the host platform's RNG, so the
package carries its own generator: a SplitMix64-seeded xoshiro256** stream
with Box-Muller Gaussian draws.  All integer arithmetic is 64-bit wrapping;
the only libm calls are log/sqrt/cos/sin on IEEE doubles, which round
identically on every mainstream platform.

References: Blackman & Vigna, "Scrambled linear pseudorandom number
generators" (xoshiro256**); Steele, Lea & Flood (SplitMix64).
"""

from __future__ import annotations

import math

_MASK64 = (1 << 64) - 1

# 2^64 / phi, the Weyl increment used by SplitMix64 and for decorrelating
# campaign run seeds.
GOLDEN_GAMMA = 0x9E3779B97F4A7C15


def splitmix64(state: int) -> tuple[int, int]:
    """Advance a SplitMix64 state once, returning ``(new_state, output)``."""
    state = (state + GOLDEN_GAMMA) & _MASK64
    z = state
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK64
    return state, z ^ (z >> 31)


def derive_run_seed(master_seed: int, target: int, run_index: int, method_tag: int) -> int:
    """Derive the seed of one campaign run from the campaign master seed.

    Each component is folded in through its own SplitMix64 round (a plain
    XOR of the small integers run_index and method_tag would alias, e.g.
    run 3 of method 1 against run 0 of method 2).  The derivation is pure
    arithmetic, so a manifest listing (master_seed, target, run_index,
    method_tag) pins the run exactly.
    """
    x = (master_seed ^ (target * GOLDEN_GAMMA)) & _MASK64
    _, x = splitmix64(x)
    _, x = splitmix64(x ^ (run_index & _MASK64))
    _, x = splitmix64(x ^ (method_tag & _MASK64))
    return x


def _rotl(x: int, k: int) -> int:
    return ((x << k) | (x >> (64 - k))) & _MASK64


class Xoshiro256StarStar:
    """xoshiro256** stream seeded from a 64-bit integer via SplitMix64."""

    __slots__ = ("_s0", "_s1", "_s2", "_s3", "_spare_normal")

    def __init__(self, seed: int):
        state = seed & _MASK64
        state, self._s0 = splitmix64(state)
        state, self._s1 = splitmix64(state)
        state, self._s2 = splitmix64(state)
        _, self._s3 = splitmix64(state)
        # xoshiro must never be seeded all-zero; SplitMix64 cannot emit four
        # consecutive zeros, so no extra guard is needed.
        self._spare_normal: float | None = None

    def next_u64(self) -> int:
        """Next 64-bit unsigned integer of the stream."""
        s0, s1, s2, s3 = self._s0, self._s1, self._s2, self._s3
        result = (_rotl((s1 * 5) & _MASK64, 7) * 9) & _MASK64
        t = (s1 << 17) & _MASK64
        s2 ^= s0
        s3 ^= s1
        s1 ^= s2
        s0 ^= s3
        s2 ^= t
        self._s0, self._s1, self._s2, self._s3 = s0, s1, s2, _rotl(s3, 45)
        return result

    def random(self) -> float:
        """Uniform double in [0, 1) using the top 53 bits."""
        return (self.next_u64() >> 11) * 2.0**-53

    def below(self, n: int) -> int:
        """Uniform integer in [0, n) without modulo bias (rejection sampling)."""
        if n <= 0:
            raise ValueError("below() requires n >= 1")
        threshold = ((1 << 64) // n) * n
        while True:
            x = self.next_u64()
            if x < threshold:
                return x % n

    def sample_indices(self, n: int, k: int) -> list[int]:
        """k distinct indices drawn uniformly from range(n), partial Fisher-Yates."""
        if not 0 <= k <= n:
            raise ValueError(f"cannot sample {k} distinct indices from {n}")
        pool = list(range(n))
        for i in range(k):
            j = i + self.below(n - i)
            pool[i], pool[j] = pool[j], pool[i]
        return pool[:k]

    def normal(self, mu: float = 0.0, sigma: float = 1.0) -> float:
        """Gaussian draw via Box-Muller; the paired draw is cached."""
        if self._spare_normal is not None:
            z = self._spare_normal
            self._spare_normal = None
        else:
            # u1 in (0, 1] so the log is finite; u2 in [0, 1).
            u1 = ((self.next_u64() >> 11) + 1) * 2.0**-53
            u2 = (self.next_u64() >> 11) * 2.0**-53
            r = math.sqrt(-2.0 * math.log(u1))
            theta = 2.0 * math.pi * u2
            z = r * math.cos(theta)
            self._spare_normal = r * math.sin(theta)
        return mu + sigma * z

    def normals(self, count: int, mu: float = 0.0, sigma: float = 1.0) -> list[float]:
        """List of ``count`` independent Gaussian draws."""
        return [self.normal(mu, sigma) for _ in range(count)]
