"""Single-register protocol: commit to ``w`` by sending ``|f(x)>`` in basis ``θ(w)``."""

from __future__ import annotations

import numpy as np

from ..bits import as_bits, from_int
from ..funcfam import FunctionFamilyInstance
from ..qcore import theta
from .messages import (
    BaseOpening,
    Commitment,
    Decommitment,
    RegisterCheck,
    RegisterSpec,
    VerificationOutcome,
    run_checks,
)

TAG = "base"


def _check_bit(w: int) -> int:
    if w not in (0, 1):
        raise ValueError(f"committed value must be a bit, got {w!r}")
    return int(w)


def random_input(n: int, rng: np.random.Generator) -> str:
    return from_int(int(rng.integers(0, 1 << n)), n)


def base_commit(
    f: FunctionFamilyInstance,
    w: int,
    x: str | None = None,
    rng: int | np.random.Generator | None = None,
) -> tuple[Commitment, Decommitment]:
    w = _check_bit(w)
    rng = np.random.default_rng(rng)
    x = random_input(f.n, rng) if x is None else as_bits(x, f.n)
    com = Commitment.honest(TAG, [RegisterSpec("commit", f(x), theta(w))])
    return com, Decommitment(TAG, (BaseOpening(w, x),))


def base_verify(
    commitment: Commitment,
    decommitment: Decommitment,
    f: FunctionFamilyInstance,
    seed: int | np.random.Generator | None = None,
) -> VerificationOutcome:
    if len(decommitment.openings) != 1 or not isinstance(decommitment.openings[0], BaseOpening):
        raise ValueError("base decommitment needs exactly one (w, x) opening")
    op = decommitment.openings[0]
    w = _check_bit(op.w)
    x = as_bits(op.x, f.n)
    if commitment.layout.width("commit") != f.out_bits:
        raise ValueError("commitment width does not match the function's output width")
    check = RegisterCheck("commit", f(x), theta(w))
    prob, marg, flags = run_checks(commitment, [check], seed)
    return VerificationOutcome(flags["commit"], (w,), flags, prob, marg)
