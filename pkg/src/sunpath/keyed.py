"""Seeded keyed bijections.

Used for two jobs that must be deterministic in the seed, invertible, and
evaluable point-wise without materializing the whole map:

* scrambling structural vertex indices into bit-string labels, and
* realizing the random perfect matchings between adjacent leaf layers.

The construction is a balanced Feistel network over ``2**bits`` values whose
round function is a splitmix64-style mixer, restricted to ``range(size)`` by
cycle walking. This is a pseudorandom family, not a uniform draw from the
symmetric group; the substitution is deliberate so that any single oracle
answer costs O(rounds) arithmetic.
"""

from __future__ import annotations

import hashlib

_MASK64 = (1 << 64) - 1
_GOLDEN = 0x9E3779B97F4A7C15


def derive_key(seed: int, *tags: object) -> int:
    """Derive a 64-bit subkey from a master seed and a tag tuple."""
    payload = repr((int(seed),) + tuple(tags)).encode()
    return int.from_bytes(hashlib.sha256(payload).digest()[:8], "big")


def _mix(x: int) -> int:
    x &= _MASK64
    x ^= x >> 30
    x = (x * 0xBF58476D1CE4E5B9) & _MASK64
    x ^= x >> 27
    x = (x * 0x94D049BB133111EB) & _MASK64
    x ^= x >> 31
    return x


class KeyedPermutation:
    """Keyed bijection on ``range(size)``.

    ``forward`` and ``inverse`` are exact inverses of each other for every
    key; two distinct keys give (with overwhelming probability) unrelated
    permutations.
    """

    __slots__ = ("size", "_half_bits", "_half_mask", "_domain", "_round_keys")

    def __init__(self, key: int, size: int, rounds: int = 8):
        if size < 1:
            raise ValueError("permutation domain must be non-empty")
        self.size = size
        bits = max((size - 1).bit_length(), 2)
        if bits % 2:
            bits += 1
        self._half_bits = bits // 2
        self._half_mask = (1 << self._half_bits) - 1
        self._domain = 1 << bits
        self._round_keys = [_mix(key ^ ((r + 1) * _GOLDEN)) for r in range(rounds)]

    def _encrypt_block(self, x: int) -> int:
        left = x >> self._half_bits
        right = x & self._half_mask
        for rk in self._round_keys:
            left, right = right, left ^ (_mix(rk ^ right) & self._half_mask)
        return (left << self._half_bits) | right

    def _decrypt_block(self, x: int) -> int:
        left = x >> self._half_bits
        right = x & self._half_mask
        for rk in reversed(self._round_keys):
            left, right = right ^ (_mix(rk ^ left) & self._half_mask), left
        return (left << self._half_bits) | right

    def forward(self, i: int) -> int:
        if not 0 <= i < self.size:
            raise ValueError(f"index {i} outside range({self.size})")
        x = self._encrypt_block(i)
        while x >= self.size:
            x = self._encrypt_block(x)
        return x

    def inverse(self, i: int) -> int:
        if not 0 <= i < self.size:
            raise ValueError(f"index {i} outside range({self.size})")
        x = self._decrypt_block(i)
        while x >= self.size:
            x = self._decrypt_block(x)
        return x
