"""Paired-hash protocol: two registers ``|h₁, h₁(y)>`` and ``|h₂, h₂(x)>``.

The first register hashes ``y = f(x)`` to ``t - Δ₁`` bits and is measured in
basis ``θ(w₁)``; the second hashes ``x`` to ``n - t - Δ₂`` bits in ``θ(w₂)``.
"""

from __future__ import annotations

import numpy as np

from ..bits import as_bits
from ..funcfam import FunctionFamilyInstance
from ..hashfam import HashFunction
from ..qcore import theta
from .base import _check_bit, random_input
from .messages import (
    Commitment,
    Decommitment,
    PairOpening,
    RegisterCheck,
    RegisterSpec,
    VerificationOutcome,
    run_checks,
)
from .params import ProtocolParams

TAG = "p1"


def pair_registers(
    f: FunctionFamilyInstance,
    params: ProtocolParams,
    w1: int,
    w2: int,
    rng: np.random.Generator,
    x: str | None = None,
    h1: HashFunction | None = None,
    h2: HashFunction | None = None,
    first: str = "first",
    second: str = "second",
) -> tuple[RegisterSpec, RegisterSpec, PairOpening]:
    """Registers and opening of one honest pair; unspecified randomness comes from ``rng``."""
    if f.n != params.n or f.out_bits != params.n:
        raise ValueError("function widths do not match params.n")
    w1, w2 = _check_bit(w1), _check_bit(w2)
    x = random_input(f.n, rng) if x is None else as_bits(x, f.n)
    h1 = params.first_family().sample(rng) if h1 is None else h1
    h2 = params.second_family().sample(rng) if h2 is None else h2
    if h1.family != params.first_family() or h2.family != params.second_family():
        raise ValueError("hash functions come from the wrong families")
    y = f(x)
    r1 = RegisterSpec(first, h1.encode() + h1(y), theta(w1))
    r2 = RegisterSpec(second, h2.encode() + h2(x), theta(w2))
    return r1, r2, PairOpening(w1, h1, y, w2, h2, x, first, second)


def pair_checks(
    f: FunctionFamilyInstance, params: ProtocolParams, op: PairOpening
) -> tuple[RegisterCheck, RegisterCheck]:
    """Bob's two checks: measured ``(h, z)`` must equal ``(h₁, h₁(y))``,
    and ``(h', z')`` must equal ``(h₂, h₂(x))`` with ``y = f(x)``."""
    w1, w2 = _check_bit(op.w1), _check_bit(op.w2)
    if op.h1.family != params.first_family() or op.h2.family != params.second_family():
        raise ValueError("decommitted hash functions come from the wrong families")
    y, x = as_bits(op.y, params.n), as_bits(op.x, params.n)
    first = RegisterCheck(op.first, op.h1.encode() + op.h1(y), theta(w1))
    expected2 = op.h2.encode() + op.h2(x) if f(x) == y else None
    second = RegisterCheck(op.second, expected2, theta(w2))
    return first, second


def p1_commit(
    f: FunctionFamilyInstance,
    params: ProtocolParams,
    w1: int,
    w2: int,
    rng: int | np.random.Generator | None = None,
    **fixed,
) -> tuple[Commitment, Decommitment]:
    r1, r2, op = pair_registers(f, params, w1, w2, np.random.default_rng(rng), **fixed)
    return Commitment.honest(TAG, [r1, r2]), Decommitment(TAG, (op,))


def p1_verify(
    commitment: Commitment,
    decommitment: Decommitment,
    f: FunctionFamilyInstance,
    params: ProtocolParams,
    seed: int | np.random.Generator | None = None,
) -> VerificationOutcome:
    if len(decommitment.openings) != 1 or not isinstance(decommitment.openings[0], PairOpening):
        raise ValueError("p1 decommitment needs exactly one pair opening")
    op = decommitment.openings[0]
    checks = pair_checks(f, params, op)
    prob, marg, flags = run_checks(commitment, checks, seed)
    return VerificationOutcome(all(flags.values()), (op.w1, op.w2), flags, prob, marg)
