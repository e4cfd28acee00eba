"""Parallel compositions of the paired-hash protocol.

* ``p2``: ``m`` independent pairs; the two committed bits are XOR-shared
  across slots.
* ``p3``: a ``p2`` whose two halves commit to the same bit; Bob also checks
  that both halves reveal equal values.
* ``p4``: one ``p3`` per ``t`` in a sweep, the committed bit XOR-shared across
  the sweep.
"""

from __future__ import annotations

from functools import reduce
from operator import xor as _xor
from typing import Sequence

import numpy as np

from ..funcfam import FunctionFamilyInstance
from .base import _check_bit
from .messages import (
    Commitment,
    Decommitment,
    PairOpening,
    RegisterCheck,
    VerificationOutcome,
    run_checks,
)
from .p1 import pair_checks, pair_registers
from .params import ProtocolParams


def xor_shares(bit: int, m: int, rng: np.random.Generator) -> tuple[int, ...]:
    """``m`` bits with XOR ``bit``; the first ``m-1`` are uniform and independent."""
    _check_bit(bit)
    if m < 1:
        raise ValueError("need at least one share")
    return shares_from_head(bit, [int(b) for b in rng.integers(0, 2, size=m - 1)])


def shares_from_head(bit: int, head: Sequence[int]) -> tuple[int, ...]:
    """Complete ``head`` with the one share that makes the XOR equal ``bit``."""
    return tuple(head) + (reduce(_xor, head, bit),)


def xor_all(bits: Sequence[int]) -> int:
    return reduce(_xor, bits, 0)


def _slot_names(prefix: str, i: int) -> tuple[str, str]:
    return f"{prefix}first.{i}", f"{prefix}second.{i}"


def _parallel_pairs(
    f: FunctionFamilyInstance,
    params: ProtocolParams,
    w1: int,
    w2: int,
    rng: np.random.Generator,
    prefix: str = "",
    xs: Sequence[str] | None = None,
) -> tuple[list, list, list[PairOpening]]:
    s1 = xor_shares(w1, params.m, rng)
    s2 = xor_shares(w2, params.m, rng)
    firsts, seconds, openings = [], [], []
    for i in range(params.m):
        a, b = _slot_names(prefix, i)
        x = None if xs is None else xs[i]
        r1, r2, op = pair_registers(f, params, s1[i], s2[i], rng, x=x, first=a, second=b)
        firsts.append(r1)
        seconds.append(r2)
        openings.append(op)
    return firsts, seconds, openings


def _verify_pairs(
    commitment: Commitment,
    openings: Sequence[PairOpening],
    f: FunctionFamilyInstance,
    params: ProtocolParams,
    seed,
) -> tuple[float, dict, dict]:
    checks: list[RegisterCheck] = []
    for op in openings:
        checks.extend(pair_checks(f, params, op))
    return run_checks(commitment, checks, seed)


def _pair_openings(decommitment: Decommitment, m: int) -> list[PairOpening]:
    ops = list(decommitment.openings)
    if len(ops) != m or not all(isinstance(o, PairOpening) for o in ops):
        raise ValueError(f"expected {m} pair openings")
    return ops


# ------------------------------------------------------------------------- p2


def p2_commit(
    f: FunctionFamilyInstance,
    params: ProtocolParams,
    w1: int,
    w2: int,
    rng: int | np.random.Generator | None = None,
    xs: Sequence[str] | None = None,
) -> tuple[Commitment, Decommitment]:
    """Layout: every ``first.i`` register, then every ``second.i`` register."""
    firsts, seconds, ops = _parallel_pairs(f, params, w1, w2, np.random.default_rng(rng), xs=xs)
    return Commitment.honest("p2", firsts + seconds), Decommitment("p2", tuple(ops))


def p2_verify(
    commitment: Commitment,
    decommitment: Decommitment,
    f: FunctionFamilyInstance,
    params: ProtocolParams,
    seed=None,
) -> VerificationOutcome:
    ops = _pair_openings(decommitment, params.m)
    prob, marg, flags = _verify_pairs(commitment, ops, f, params, seed)
    recovered = (xor_all([o.w1 for o in ops]), xor_all([o.w2 for o in ops]))
    return VerificationOutcome(all(flags.values()), recovered, flags, prob, marg)


# ------------------------------------------------------------------------- p3


def p3_commit(
    f: FunctionFamilyInstance,
    params: ProtocolParams,
    w: int,
    rng: int | np.random.Generator | None = None,
    prefix: str = "",
) -> tuple[Commitment, Decommitment]:
    firsts, seconds, ops = _parallel_pairs(f, params, w, w, np.random.default_rng(rng), prefix)
    return Commitment.honest("p3", firsts + seconds), Decommitment("p3", tuple(ops))


def _p3_result(ops, prob, marg, flags) -> VerificationOutcome:
    w_first = xor_all([o.w1 for o in ops])
    w_second = xor_all([o.w2 for o in ops])
    equal = w_first == w_second
    flags = dict(flags)
    flags["equal"] = equal
    marg = dict(marg)
    marg["equal"] = 1.0 if equal else 0.0
    prob = prob if equal else 0.0
    return VerificationOutcome(all(flags.values()), (w_first, w_second), flags, prob, marg)


def p3_verify(
    commitment: Commitment,
    decommitment: Decommitment,
    f: FunctionFamilyInstance,
    params: ProtocolParams,
    seed=None,
) -> VerificationOutcome:
    ops = _pair_openings(decommitment, params.m)
    return _p3_result(ops, *_verify_pairs(commitment, ops, f, params, seed))


# ------------------------------------------------------------------------- p4


def p4_commit(
    f: FunctionFamilyInstance,
    params: ProtocolParams,
    w: int,
    rng: int | np.random.Generator | None = None,
) -> tuple[Commitment, Decommitment]:
    """One ``p3`` per ``t`` in ``params.sweep`` (registers prefixed ``t{t}.``).

    Δ₁ and Δ₂ are clamped per ``t`` so every sub-protocol has valid widths.
    """
    rng = np.random.default_rng(rng)
    sweep = params.sweep
    shares = xor_shares(w, len(sweep), rng)
    registers, openings, groups = [], [], []
    for t, share in zip(sweep, shares):
        sub = params.at_t(t)
        firsts, seconds, ops = _parallel_pairs(f, sub, share, share, rng, f"t{t}.")
        registers += firsts + seconds
        groups.append(tuple(range(len(openings), len(openings) + len(ops))))
        openings += ops
    return Commitment.honest("p4", registers), Decommitment("p4", tuple(openings), tuple(groups))


def p4_verify(
    commitment: Commitment,
    decommitment: Decommitment,
    f: FunctionFamilyInstance,
    params: ProtocolParams,
    seed=None,
) -> VerificationOutcome:
    sweep = params.sweep
    if len(decommitment.groups) != len(sweep):
        raise ValueError(f"expected {len(sweep)} groups in the p4 decommitment")
    checks: list[RegisterCheck] = []
    subs = []
    for t, group in zip(sweep, decommitment.groups):
        sub = params.at_t(t)
        ops = [decommitment.openings[i] for i in group]
        if len(ops) != params.m or not all(isinstance(o, PairOpening) for o in ops):
            raise ValueError(f"group for t={t} needs {params.m} pair openings")
        subs.append((t, ops))
        for op in ops:
            checks.extend(pair_checks(f, sub, op))
    prob, marg, flags = run_checks(commitment, checks, seed)
    flags, marg = dict(flags), dict(marg)
    recovered = []
    for t, ops in subs:
        w_first = xor_all([o.w1 for o in ops])
        w_second = xor_all([o.w2 for o in ops])
        flags[f"t{t}.equal"] = w_first == w_second
        marg[f"t{t}.equal"] = 1.0 if w_first == w_second else 0.0
        if w_first != w_second:
            prob = 0.0
        recovered.append(w_first)
    accepted = all(flags.values())
    return VerificationOutcome(accepted, (xor_all(recovered),), flags, prob, marg)
