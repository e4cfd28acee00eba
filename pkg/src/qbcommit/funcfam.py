"""Small explicit function tables with exact preimage statistics.

These stand in for one-way functions at sizes where everything can be
enumerated: output distribution, heavy sets, entropy buckets and brute-force
inversion are all computed exactly from the truth table.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from pathlib import Path
from typing import Mapping, Sequence

import numpy as np

from .bits import BitLike, as_bits, from_int, to_int
from .hashfam import HashFamily

MAX_FAMILY_BITS = 12
MAX_TABLE_BITS = 22


@dataclass(frozen=True, eq=False)
class FunctionFamilyInstance:
    """Truth table ``f: {0,1}^n -> {0,1}^out_bits`` (``out_bits`` defaults to n)."""

    n: int
    table: np.ndarray
    out_bits: int | None = None
    label: str = ""

    def __post_init__(self):
        if not 0 <= self.n <= MAX_TABLE_BITS:
            raise ValueError(f"input width {self.n} outside [0, {MAX_TABLE_BITS}]")
        if self.out_bits is None:
            object.__setattr__(self, "out_bits", self.n)
        t = np.array(self.table, dtype=np.int64).reshape(-1)
        if t.size != 1 << self.n:
            raise ValueError(f"table has {t.size} entries, expected {1 << self.n}")
        if t.size and (t.min() < 0 or t.max() >= 1 << self.out_bits):
            raise ValueError(f"table values must fit in {self.out_bits} bits")
        t.setflags(write=False)
        object.__setattr__(self, "table", t)

    # -- derived statistics --------------------------------------------------

    @cached_property
    def counts(self) -> np.ndarray:
        """Preimage size of every output, indexed by output integer."""
        c = np.bincount(self.table, minlength=1 << self.out_bits)
        c.setflags(write=False)
        return c

    @cached_property
    def p(self) -> np.ndarray:
        """``Pr[f(U_n) = y]`` for every output ``y``."""
        return self.counts / float(1 << self.n)

    def prob(self, y: BitLike | int) -> Fraction:
        return Fraction(int(self.counts[self._out_index(y)]), 1 << self.n)

    @cached_property
    def range(self) -> np.ndarray:
        return np.flatnonzero(self.counts)

    @cached_property
    def regularity(self) -> int | None:
        """``r`` if every non-empty preimage has size ``2^r``, else None."""
        sizes = set(int(c) for c in self.counts[self.counts > 0])
        if len(sizes) != 1:
            return None
        (size,) = sizes
        return size.bit_length() - 1 if size & (size - 1) == 0 else None

    @property
    def is_regular(self) -> bool:
        return self.regularity is not None

    @property
    def is_permutation(self) -> bool:
        return self.n == self.out_bits and self.regularity == 0

    def __call__(self, x: BitLike | int) -> str:
        if not isinstance(x, (int, np.integer)):
            x = to_int(as_bits(x, self.n))
        return from_int(int(self.table[int(x)]), self.out_bits)

    def preimages(self, y: BitLike | int) -> list[int]:
        return [int(x) for x in np.flatnonzero(self.table == self._out_index(y))]

    def _out_index(self, y: BitLike | int) -> int:
        if isinstance(y, (int, np.integer)):
            return int(y)
        return to_int(as_bits(y, self.out_bits))

    # -- serialization -------------------------------------------------------

    def to_json(self) -> dict:
        data = {"n": self.n, "table": [int(v) for v in self.table]}
        if self.out_bits != self.n:
            data["out_bits"] = self.out_bits
        return data

    @classmethod
    def from_json(cls, data: Mapping | str) -> "FunctionFamilyInstance":
        if isinstance(data, str):
            data = json.loads(data)
        return cls(int(data["n"]), np.array(data["table"]), data.get("out_bits"))

    @classmethod
    def load(cls, path: str | Path) -> "FunctionFamilyInstance":
        return cls.from_json(json.loads(Path(path).read_text()))


# ----------------------------------------------------------------- operations


def heavy_set(f: FunctionFamilyInstance, t: int, delta3: float = 0) -> frozenset[int]:
    """Inputs whose image has probability at least ``2^{-t-Δ₃}``."""
    if not 1 <= t <= max(1, f.n):
        raise ValueError(f"t={t} outside [1, {f.n}]")
    if delta3 < 0:
        raise ValueError("delta3 must be non-negative")
    c = f.counts[f.table]
    if float(delta3).is_integer():
        # exact: c / 2^n >= 2^{-t-Δ₃}  <=>  c * 2^{t+Δ₃} >= 2^n
        heavy = [int(ci) << (t + int(delta3)) >= 1 << f.n for ci in c]
        return frozenset(int(x) for x in np.flatnonzero(heavy))
    return frozenset(int(x) for x in np.flatnonzero(f.p[f.table] >= 2.0 ** (-t - delta3)))


@dataclass(frozen=True)
class EntropyBuckets:
    """Partition of the range by ``2^{-t} <= p(y) < 2^{-t+1}`` for ``t = 1..n``.

    ``p(y) = 1`` has no exact bucket and is placed in ``t = 1``.
    """

    n: int
    bucket_of: dict[int, int]
    mass: dict[int, Fraction]
    t0: int
    gamma: frozenset[int]

    @property
    def gamma_measure(self) -> Fraction:
        return Fraction(len(self.gamma), 1 << self.n)

    def outputs(self, t: int) -> list[int]:
        return sorted(y for y, b in self.bucket_of.items() if b == t)


def bucket_index(count: int, n: int) -> int:
    """Bucket ``t`` of an output with ``count`` preimages among ``2^n`` inputs."""
    return max(1, n - (count.bit_length() - 1))


def entropy_buckets(f: FunctionFamilyInstance) -> EntropyBuckets:
    n = f.n
    if n < 1:
        raise ValueError("buckets need at least one input bit")
    bucket_of = {int(y): bucket_index(int(f.counts[y]), n) for y in f.range}
    mass = {t: Fraction(0) for t in range(1, n + 1)}
    for y, t in bucket_of.items():
        mass[t] += Fraction(int(f.counts[y]), 1 << n)
    t0 = next(t for t in range(1, n + 1) if mass[t] >= Fraction(1, n))
    gamma = frozenset(
        int(x) for x in range(1 << n) if bucket_of[int(f.table[x])] == t0
    )
    return EntropyBuckets(n, bucket_of, mass, t0, gamma)


def brute_force_invert(f: FunctionFamilyInstance, y: BitLike | int) -> frozenset[int]:
    return frozenset(f.preimages(y))


def min_entropy(p: Sequence[float] | np.ndarray) -> float:
    p = np.asarray(p, dtype=float)
    return float(-np.log2(p.max()))


def renyi_entropy(p: Sequence[float] | np.ndarray) -> float:
    """Order-2 Rényi entropy ``-log₂ Σ p²``."""
    p = np.asarray(p, dtype=float)
    return float(-np.log2((p * p).sum()))


# ------------------------------------------------------------------ factories


def make_family(
    kind: str,
    n: int,
    *,
    r: int = 0,
    seed: int | None = 0,
    profile: Sequence[int] | None = None,
    out_bits: int | None = None,
) -> FunctionFamilyInstance:
    """Build a table of the requested shape.

    kind
        ``permutation``; ``regular`` (every image has ``2^r`` preimages);
        ``random`` (uniform table); ``planted-heavy`` (the k-th output gets
        ``profile[k]`` preimages).
    out_bits
        Output width; defaults to ``n``. A compressing regular table may use
        ``out_bits = n - r`` so that it is onto.
    """
    if not 1 <= n <= MAX_FAMILY_BITS:
        raise ValueError(f"n={n} outside [1, {MAX_FAMILY_BITS}]")
    m = n if out_bits is None else out_bits
    if m < 0:
        raise ValueError("out_bits must be non-negative")
    rng = np.random.default_rng(seed)
    size = 1 << n
    if kind == "permutation":
        if m != n:
            raise ValueError("a permutation needs out_bits == n")
        table = rng.permutation(size)
        label = "permutation"
    elif kind == "regular":
        if not 0 <= r <= n or (size >> r) > (1 << m):
            raise ValueError(f"no 2^{r}-regular table from {n} to {m} bits")
        outputs = rng.choice(1 << m, size=size >> r, replace=False)
        table = rng.permutation(np.repeat(outputs, 1 << r))
        label = f"regular({r})"
    elif kind == "random":
        table = rng.integers(0, 1 << m, size=size)
        label = f"random({seed})"
    elif kind == "planted-heavy":
        if profile is None:
            raise ValueError("planted-heavy needs a profile")
        profile = [int(c) for c in profile]
        if sum(profile) != size or min(profile) < 1:
            raise ValueError(f"profile {profile} does not partition {size} inputs")
        if len(profile) > 1 << m:
            raise ValueError("profile has more outputs than the range allows")
        table = np.repeat(np.arange(len(profile)), profile)
        label = "planted-heavy(" + ",".join(map(str, profile)) + ")"
    else:
        raise ValueError(f"unknown family kind {kind!r}")
    return FunctionFamilyInstance(n, table, m, label)


def hashed_function(f: FunctionFamilyInstance, family: HashFamily) -> FunctionFamilyInstance:
    """``f'(h, x) = (h, h(f(x)))`` with the member index as the high bits."""
    if family.in_bits != f.out_bits:
        raise ValueError("hash input width must match the function's output width")
    q, v = family.index_bits, family.out_bits
    outs = family.evaluate_many(np.arange(family.size), f.table)  # [h, x]
    table = (np.arange(family.size)[:, None] << v) | outs
    return FunctionFamilyInstance(q + f.n, table.reshape(-1), q + v, f"hashed({f.label})")


def split_hashed_input(value: int, n: int) -> tuple[int, int]:
    """Inverse of the ``(h, x)`` packing used by :func:`hashed_function`."""
    return value >> n, value & ((1 << n) - 1)
