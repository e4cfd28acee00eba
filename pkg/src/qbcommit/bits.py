"""Bit-string helpers.

Bit-strings are plain ``str`` objects over ``'0'``/``'1'`` with the most
significant bit first, so ``'10'`` is the integer 2.
"""

from __future__ import annotations

from typing import Iterable, Sequence, Union

import numpy as np

BitLike = Union[str, Sequence[int], Iterable[int]]


def as_bits(value: BitLike, width: int | None = None) -> str:
    """Normalize a bit-like value to a ``'0'/'1'`` string.

    Integers need an explicit ``width``.
    """
    if isinstance(value, (int, np.integer)) and not isinstance(value, bool):
        if width is None:
            raise TypeError("integer bit values need an explicit width")
        return from_int(int(value), width)
    if isinstance(value, str):
        bits = value
    else:
        bits = "".join(str(int(b)) for b in value)
    if any(c not in "01" for c in bits):
        raise ValueError(f"not a bit-string: {value!r}")
    if width is not None and len(bits) != width:
        raise ValueError(f"expected {width} bits, got {len(bits)}")
    return bits


def to_int(bits: BitLike) -> int:
    bits = as_bits(bits)
    return int(bits, 2) if bits else 0


def from_int(value: int, width: int) -> str:
    if value < 0 or (width < 64 and value >> width):
        raise ValueError(f"{value} does not fit in {width} bits")
    return format(value, f"0{width}b") if width else ""


def xor(a: BitLike, b: BitLike) -> str:
    a, b = as_bits(a), as_bits(b)
    if len(a) != len(b):
        raise ValueError("xor of bit-strings with different lengths")
    return "".join("1" if x != y else "0" for x, y in zip(a, b))


def all_strings(width: int) -> list[str]:
    return [from_int(i, width) for i in range(1 << width)]


def parity(values: np.ndarray) -> np.ndarray:
    """Elementwise parity of non-negative integer arrays."""
    return (np.bitwise_count(np.asarray(values, dtype=np.uint64)) & 1).astype(np.uint8)


def inner(u: int, v: int) -> int:
    """Binary inner product <u, v> mod 2 of two integers."""
    return (u & v).bit_count() & 1
