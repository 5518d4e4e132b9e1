"""Portable deterministic random numbers.

Every randomized artifact in the package (initial conditions, sampled
grids, well-posedness probes) draws from the splitmix64 generator below
instead of a platform RNG.  The generator is fully specified by this
file, so a seed written into an echoed config reproduces the same
doubles on any machine.

splitmix64 reference sequence: the state advances by the odd constant
0x9E3779B97F4A7C15 and the output is the finalizer

    z ^= z >> 30; z *= 0xBF58476D1CE4E5B9
    z ^= z >> 27; z *= 0x94D049BB133111EB
    z ^= z >> 31

Doubles are built from the top 53 bits, uniform on [0, 1).
"""

from __future__ import annotations

_MASK = (1 << 64) - 1
_GAMMA = 0x9E3779B97F4A7C15


def _mix(z: int) -> int:
    z &= _MASK
    z ^= z >> 30
    z = (z * 0xBF58476D1CE4E5B9) & _MASK
    z ^= z >> 27
    z = (z * 0x94D049BB133111EB) & _MASK
    z ^= z >> 31
    return z


def derive(seed: int, *keys: int) -> int:
    """Fold integer keys into a seed, giving independent substreams.

    derive(seed, i) and derive(seed, j) differ for i != j, so per-index
    or per-purpose streams never overlap by construction.
    """
    state = _mix(seed & _MASK)
    for key in keys:
        state = _mix((state + _GAMMA + (key & _MASK)) & _MASK)
    return state


class SplitMix64:
    """Stateful stream over the splitmix64 sequence."""

    def __init__(self, seed: int):
        self._state = seed & _MASK

    def next_raw(self) -> int:
        self._state = (self._state + _GAMMA) & _MASK
        return _mix(self._state)

    def uniform01(self) -> float:
        # top 53 bits -> [0, 1) with the usual 2**-53 spacing
        return (self.next_raw() >> 11) * (2.0 ** -53)

    def uniform(self, low: float, high: float) -> float:
        return low + (high - low) * self.uniform01()


def uniform01_at(seed: int, *keys: int) -> float:
    """One uniform [0,1) double addressed by (seed, keys), stateless."""
    return (_mix((derive(seed, *keys) + _GAMMA) & _MASK) >> 11) * (2.0 ** -53)
