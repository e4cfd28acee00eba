"""Pairwise-independent affine hash families over GF(2).

Two constructions are provided:

* ``toeplitz``: ``h(x) = T x ⊕ b`` with ``T`` a ``v × ℓ`` Toeplitz matrix fixed
  by its ``ℓ+v-1`` diagonal bits, so a member is named by ``ℓ+2v-1`` bits;
* ``full-affine``: ``T`` is an arbitrary ``v × ℓ`` matrix (``vℓ+v`` index bits).

Both are pairwise independent. Their members can be enumerated, which is how
the Leftover Hash Lemma distance is computed exactly.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterator

import numpy as np

from .bits import BitLike, as_bits, from_int, parity, to_int

TOEPLITZ = "toeplitz"
FULL_AFFINE = "full-affine"
KINDS = (TOEPLITZ, FULL_AFFINE)
_KIND_CODE = {TOEPLITZ: 0, FULL_AFFINE: 1}

#: Largest member-index width that ``enumerate`` / ``lhl_distance`` will walk.
MAX_ENUM_INDEX_BITS = 18
_CHUNK = 1 << 13


class EnumerationTooLarge(ValueError):
    pass


@dataclass(frozen=True)
class HashFamily:
    in_bits: int
    out_bits: int
    kind: str = TOEPLITZ

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown family kind {self.kind!r}")
        if self.in_bits < 0 or self.out_bits < 0:
            raise ValueError("widths must be non-negative")
        if self.out_bits > self.in_bits:
            raise ValueError(
                f"output width {self.out_bits} exceeds input width {self.in_bits}"
            )

    @property
    def index_bits(self) -> int:
        l, v = self.in_bits, self.out_bits
        if v == 0:
            return 0
        return l + 2 * v - 1 if self.kind == TOEPLITZ else v * l + v

    @property
    def size(self) -> int:
        return 1 << self.index_bits

    def member(self, index: int | BitLike) -> "HashFunction":
        if not isinstance(index, (int, np.integer)):
            index = to_int(as_bits(index, self.index_bits))
        index = int(index)
        if not 0 <= index < self.size:
            raise ValueError(f"index {index} outside a family of size {self.size}")
        return HashFunction(self, index)

    def sample(self, seed: int | np.random.Generator | None) -> "HashFunction":
        """Uniform member, deterministic in ``seed``."""
        rng = np.random.default_rng(seed)
        bits = rng.integers(0, 2, size=self.index_bits)
        return self.member("".join(map(str, bits)))

    def __iter__(self) -> Iterator["HashFunction"]:
        self._check_enumerable()
        return (HashFunction(self, i) for i in range(self.size))

    def _check_enumerable(self) -> None:
        if self.index_bits > MAX_ENUM_INDEX_BITS:
            raise EnumerationTooLarge(
                f"family index width {self.index_bits} exceeds {MAX_ENUM_INDEX_BITS}"
            )

    # -- vectorized evaluation over many members at once --------------------

    def row_masks(self, indices: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        """Matrix rows (as ℓ-bit integer masks) and offsets for each index.

        Returns ``(rows, offsets)`` with ``rows`` of shape ``(len(indices), v)``.
        """
        l, v = self.in_bits, self.out_bits
        idx = np.asarray(indices, dtype=np.int64)
        offsets = idx & ((1 << v) - 1)
        body = idx >> v
        rows = np.zeros((idx.size, v), dtype=np.int64)
        if self.kind == TOEPLITZ:
            n_diag = l + v - 1
            for i in range(v):
                for j in range(l):
                    k = i - j + l - 1
                    bit = (body >> (n_diag - 1 - k)) & 1
                    rows[:, i] |= bit << (l - 1 - j)
        else:
            for i in range(v):
                rows[:, i] = (body >> ((v - 1 - i) * l)) & ((1 << l) - 1)
        return rows, offsets

    def evaluate_many(self, indices: np.ndarray, xs: np.ndarray) -> np.ndarray:
        """Outputs ``h_i(x_j)`` as integers, shape ``(len(indices), len(xs))``."""
        v = self.out_bits
        rows, offsets = self.row_masks(indices)
        xs = np.asarray(xs, dtype=np.int64)
        out = np.zeros((rows.shape[0], xs.size), dtype=np.int64)
        for i in range(v):
            bit = parity(rows[:, i : i + 1] & xs[None, :]).astype(np.int64)
            out |= bit << (v - 1 - i)
        return out ^ offsets[:, None]

    def outputs_table(self) -> np.ndarray:
        """Full table ``[index, x] -> h_index(x)`` for an enumerable family."""
        self._check_enumerable()
        return self.evaluate_many(np.arange(self.size), np.arange(1 << self.in_bits))


@dataclass(frozen=True)
class HashFunction:
    family: HashFamily
    index: int

    @property
    def in_bits(self) -> int:
        return self.family.in_bits

    @property
    def out_bits(self) -> int:
        return self.family.out_bits

    def encode(self) -> str:
        """Canonical bit-encoding of the member, as embedded in registers."""
        return from_int(self.index, self.family.index_bits)

    def matrix(self) -> np.ndarray:
        rows, _ = self.family.row_masks(np.array([self.index]))
        l = self.in_bits
        return np.array(
            [[(int(r) >> (l - 1 - j)) & 1 for j in range(l)] for r in rows[0]], dtype=np.uint8
        ).reshape(self.out_bits, l)

    def offset(self) -> str:
        return from_int(self.index & ((1 << self.out_bits) - 1), self.out_bits)

    def __call__(self, x: BitLike | int) -> str:
        return evaluate(self, x)

    def to_bytes(self) -> bytes:
        return to_wire(self)


def evaluate(h: HashFunction, x: BitLike | int) -> str:
    """``h(x) = T x ⊕ b`` as a ``v``-bit string."""
    if isinstance(x, (int, np.integer)):
        x = from_int(int(x), h.in_bits)
    x = as_bits(x)
    if len(x) != h.in_bits:
        raise ValueError(f"hash expects {h.in_bits} input bits, got {len(x)}")
    out = h.family.evaluate_many(np.array([h.index]), np.array([to_int(x)]))
    return from_int(int(out[0, 0]), h.out_bits)


def to_wire(h: HashFunction) -> bytes:
    """3-byte header ``(ℓ, v, kind)`` then index bits packed MSB-first."""
    fam = h.family
    bits = np.array([int(c) for c in h.encode()], dtype=np.uint8)
    return bytes([fam.in_bits, fam.out_bits, _KIND_CODE[fam.kind]]) + np.packbits(bits).tobytes()


def from_wire(data: bytes) -> HashFunction:
    if len(data) < 3:
        raise ValueError("truncated hash header")
    l, v, code = data[0], data[1], data[2]
    kinds = {c: k for k, c in _KIND_CODE.items()}
    if code not in kinds:
        raise ValueError(f"unknown kind code {code}")
    fam = HashFamily(l, v, kinds[code])
    q = fam.index_bits
    payload = np.frombuffer(data[3:], dtype=np.uint8)
    if len(payload) != math.ceil(q / 8):
        raise ValueError("hash payload length does not match the header")
    bits = np.unpackbits(payload)
    if bits[q:].any():
        raise ValueError("non-zero padding in hash payload")
    return fam.member("".join(map(str, bits[:q])))


def lhl_output_length(min_entropy: float, eps: float) -> int:
    """Output width ``⌊λ − 2 log₂(1/ε)⌋`` (floored, never below 0)."""
    if not 0 < eps <= 1:
        raise ValueError("eps must lie in (0, 1]")
    return max(0, math.floor(min_entropy - 2 * math.log2(1 / eps) + 1e-12))


def lhl_distance(family: HashFamily, dist: np.ndarray) -> float:
    """Exact ``δ((H, H(V)), (H, U_v))`` by enumerating every member.

    ``dist`` is a probability vector over the ``2^ℓ`` inputs.
    """
    family._check_enumerable()
    p = np.asarray(dist, dtype=float)
    if p.shape != (1 << family.in_bits,):
        raise ValueError(f"distribution needs {1 << family.in_bits} entries")
    if abs(p.sum() - 1.0) > 1e-9 or (p < 0).any():
        raise ValueError("input is not a probability distribution")
    support = np.flatnonzero(p > 0)
    weights = p[support]
    n_out = 1 << family.out_bits
    total = 0.0
    for start in range(0, family.size, _CHUNK):
        idx = np.arange(start, min(family.size, start + _CHUNK))
        outs = family.evaluate_many(idx, support)
        flat = (np.arange(idx.size)[:, None] * n_out + outs).reshape(-1)
        hist = np.bincount(flat, weights=np.tile(weights, idx.size), minlength=idx.size * n_out)
        total += np.abs(hist.reshape(idx.size, n_out) - 1.0 / n_out).sum()
    return float(0.5 * total / family.size)


def pair_counts(family: HashFamily, x1: int, x2: int) -> np.ndarray:
    """Counts of ``(h(x1), h(x2))`` over the whole family, shape ``(2^v, 2^v)``."""
    outs = family.outputs_table()[:, [x1, x2]]
    n_out = 1 << family.out_bits
    return np.bincount(outs[:, 0] * n_out + outs[:, 1], minlength=n_out * n_out).reshape(
        n_out, n_out
    )
