"""Deterministic counter-based random streams.

Every random number in this package is a pure function of a stream key and
a counter, with no hidden generator state.  A stream is identified by a
64-bit seed plus a tuple of substream indices; drawing ``n`` uniforms from
the same stream always yields the same array.  This is what makes trials
reorderable: work can be chunked, threaded or re-run and the numbers never
move.

The mixing function is the SplitMix64 finaliser applied to
``hash(key) XOR counter``.  Keys are hashed by folding each component in
with one finaliser round, so ``stream.child(i)`` is cheap and collisions
between unrelated substreams are not a practical concern.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

_MASK64 = (1 << 64) - 1
_GOLDEN = 0x9E3779B97F4A7C15
_MULT1 = 0xBF58476D1CE4E5B9
_MULT2 = 0x94D049BB133111EB


def _mix_int(z: int) -> int:
    """One SplitMix64 finaliser round on a Python int (mod 2^64)."""
    z = (z + _GOLDEN) & _MASK64
    z = ((z ^ (z >> 30)) * _MULT1) & _MASK64
    z = ((z ^ (z >> 27)) * _MULT2) & _MASK64
    return z ^ (z >> 31)


def _mix_array(z: np.ndarray) -> np.ndarray:
    """SplitMix64 finaliser, elementwise on a uint64 array."""
    z = z + np.uint64(_GOLDEN)
    z = (z ^ (z >> np.uint64(30))) * np.uint64(_MULT1)
    z = (z ^ (z >> np.uint64(27))) * np.uint64(_MULT2)
    return z ^ (z >> np.uint64(31))


def _hash_key(key: tuple[int, ...]) -> int:
    h = _mix_int(key[0] & _MASK64)
    for part in key[1:]:
        h = _mix_int(h ^ (part & _MASK64))
    return h


def derive_seed(seed: int, *parts: int) -> int:
    """Fold extra indices into a seed, giving an independent 64-bit seed."""
    return _hash_key((seed, *parts))


@dataclass(frozen=True)
class Stream:
    """A stateless random stream addressed by (seed, substream indices)."""

    key: tuple[int, ...]

    def __init__(self, key: int | tuple[int, ...]):
        if isinstance(key, int):
            key = (key,)
        object.__setattr__(self, "key", tuple(key))

    def child(self, index: int) -> "Stream":
        """Substream ``index`` of this stream."""
        return Stream(self.key + (index,))

    def uniforms(self, count: int) -> np.ndarray:
        """``count`` float64 uniforms in [0, 1).  Same call, same numbers."""
        base = np.uint64(_hash_key(self.key))
        ctr = np.arange(count, dtype=np.uint64)
        bits = _mix_array(base ^ ctr)
        return (bits >> np.uint64(11)) * 2.0**-53

    def uniform_block(self, first_child: int, n_children: int, count: int) -> np.ndarray:
        """Uniforms for ``n_children`` consecutive substreams at once.

        Row ``i`` is bit-identical to ``self.child(first_child + i).uniforms(count)``,
        which is what allows trial loops to be vectorised without changing
        any trial's numbers.
        """
        base = np.uint64(_hash_key(self.key))
        kids = base ^ (np.arange(first_child, first_child + n_children, dtype=np.uint64))
        kid_hashes = _mix_array(kids)
        ctr = np.arange(count, dtype=np.uint64)
        bits = _mix_array(kid_hashes[:, None] ^ ctr[None, :])
        return (bits >> np.uint64(11)) * 2.0**-53
