"""Per-replicate random substreams.

Every replicate owns a SplitMix64 counter stream whose starting state is a
fixed mixing of ``(seed, replicate)``::

    key   = mix64(seed ^ mix64(replicate + REPLICATE_SALT))
    state_k = key + k * GOLDEN            (mod 2**64), k = 1, 2, ...
    u_k   = ((mix64(state_k) >> 12) + 0.5) * 2**-52

``mix64`` is the SplitMix64 output finalizer. The uniforms lie strictly inside
(0, 1), so inversion sampling never sees ``log(0)``. The compiled kernels in
``froglab._core`` implement the same arithmetic, and both backends consume
exactly one uniform per jump (chain mode) or per level (level/ideal modes),
so outcomes are bit-identical across backends and thread schedules.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterator

MASK64 = (1 << 64) - 1
GOLDEN = 0x9E3779B97F4A7C15
REPLICATE_SALT = 0xD1B54A32D192ED03
_TO_UNIT = 2.0 ** -52


def mix64(z: int) -> int:
    """SplitMix64 finalizer, a bijection on 64-bit words."""
    z &= MASK64
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & MASK64
    return z ^ (z >> 31)


def stream_key(seed: int, replicate: int) -> int:
    if not (0 <= seed <= MASK64 and 0 <= replicate <= MASK64):
        raise ValueError("seed and replicate must be unsigned 64-bit integers")
    return mix64(seed ^ mix64(replicate + REPLICATE_SALT))


def to_unit(z: int) -> float:
    return ((z >> 12) + 0.5) * _TO_UNIT


@dataclass(frozen=True)
class RngStream:
    """Identity of one replicate's substream."""

    seed: int
    replicate: int

    def __post_init__(self):
        stream_key(self.seed, self.replicate)  # range validation

    @property
    def key(self) -> int:
        return stream_key(self.seed, self.replicate)

    def uniforms(self) -> Iterator[float]:
        state = self.key
        while True:
            state = (state + GOLDEN) & MASK64
            yield to_unit(mix64(state))

    def draw(self, count: int) -> list[float]:
        it = self.uniforms()
        return [next(it) for _ in range(count)]
