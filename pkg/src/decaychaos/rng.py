"""Counter-based SplitMix64 generator.

Output ``k`` (1-based) of a stream seeded with ``s`` is
``mix(s + k * 0x9E3779B97F4A7C15 mod 2**64)``, with ``mix`` the SplitMix64
finalizer (Steele, Lea & Flood 2014; the seeding routine of the xoshiro
family). Because each output depends only on its position, blocks of draws
are produced with vectorized uint64 arithmetic, and the sequence is the same
on every platform and in every language that implements the two formulas.

Conversions to floating point:

* ``random``        ``(x >> 11) * 2**-53``          in [0, 1)
* ``random_oc``     ``((x >> 11) + 1) * 2**-53``    in (0, 1]
* ``standard_normal`` Box-Muller on pairs ``(u1, u2)`` with ``u1`` from
  ``random_oc`` and ``u2`` from ``random``; output order is
  ``r cos(2 pi u2), r sin(2 pi u2)`` for each consecutive pair.
"""
import numpy as np

GOLDEN_GAMMA = 0x9E3779B97F4A7C15
_MASK64 = (1 << 64) - 1
_M1 = np.uint64(0xBF58476D1CE4E5B9)
_M2 = np.uint64(0x94D049BB133111EB)
_TWO_M53 = 2.0 ** -53


def _mix(z):
    with np.errstate(over="ignore"):
        z = (z ^ (z >> np.uint64(30))) * _M1
        z = (z ^ (z >> np.uint64(27))) * _M2
    return z ^ (z >> np.uint64(31))


def splitmix64_scalar(state):
    """Reference single step: returns ``(new_state, output)`` using Python ints."""
    state = (state + GOLDEN_GAMMA) & _MASK64
    z = state
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK64
    return state, z ^ (z >> 31)


def derive_seed(seed, tag):
    """Child seed for an independent sub-stream, keyed by an integer tag."""
    _, out = splitmix64_scalar((int(seed) ^ ((int(tag) * 0xD1B54A32D192ED03) & _MASK64)) & _MASK64)
    return out


class SplitMix64:
    """Seeded stream of uint64 draws; ``position`` counts draws consumed."""

    def __init__(self, seed=0):
        seed = int(seed)
        if not 0 <= seed <= _MASK64:
            raise ValueError(f"seed must be a 64-bit unsigned integer, got {seed}")
        self.seed = seed
        self.position = 0

    def raw(self, n):
        n = int(n)
        k = np.arange(self.position + 1, self.position + n + 1, dtype=np.uint64)
        with np.errstate(over="ignore"):
            z = np.uint64(self.seed) + k * np.uint64(GOLDEN_GAMMA)
        self.position += n
        return _mix(z)

    def random(self, n):
        return (self.raw(n) >> np.uint64(11)).astype(np.float64) * _TWO_M53

    def random_oc(self, n):
        return ((self.raw(n) >> np.uint64(11)).astype(np.float64) + 1.0) * _TWO_M53

    def integers(self, high, n):
        """``n`` draws in ``[0, high)`` by scaling a 53-bit uniform (bias < high / 2**53)."""
        u = self.random(n)
        u *= high
        return np.minimum(u.astype(np.int64), high - 1)

    def standard_normal(self, n):
        n = int(n)
        pairs = (n + 1) // 2
        draws = self.raw(2 * pairs).reshape(pairs, 2) >> np.uint64(11)
        u1 = (draws[:, 0].astype(np.float64) + 1.0) * _TWO_M53
        u2 = draws[:, 1].astype(np.float64) * _TWO_M53
        r = np.sqrt(-2.0 * np.log(u1))
        theta = 2.0 * np.pi * u2
        out = np.empty(2 * pairs)
        out[0::2] = r * np.cos(theta)
        out[1::2] = r * np.sin(theta)
        return out[:n]
