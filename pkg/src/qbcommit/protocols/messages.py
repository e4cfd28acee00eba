"""Commit and reveal messages, and the acceptance engine shared by all protocols."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Mapping, Sequence

import numpy as np

from ..bits import as_bits
from ..hashfam import HashFunction, from_wire, to_wire
from ..qcore import (
    Basis,
    Projector,
    QuantumRegisterState,
    RegisterLayout,
    Segment,
    encode_basis,
)

ACCEPT_TOL = 1e-9


@dataclass(frozen=True)
class RegisterSpec:
    """Classical description of an honest register: ``|bits>`` in one basis."""

    name: str
    bits: str
    basis: Basis

    def to_json(self) -> dict:
        return {"name": self.name, "bits": self.bits, "basis": self.basis.value}

    @classmethod
    def from_json(cls, d: Mapping) -> "RegisterSpec":
        return cls(d["name"], as_bits(d["bits"]), Basis.of(d["basis"]))


@dataclass(frozen=True, eq=False)
class Commitment:
    """Commit-phase message.

    Honest commitments carry ``registers`` (the per-register classical
    description) and expand to a statevector on demand; cheating ones carry
    an explicit ``state``.
    """

    protocol: str
    layout: RegisterLayout
    registers: tuple[RegisterSpec, ...] | None = None
    state: QuantumRegisterState | None = None

    def __post_init__(self):
        if self.registers is None and self.state is None:
            raise ValueError("a commitment needs registers or a state")
        if self.registers is not None:
            widths = tuple((r.name, len(r.bits)) for r in self.registers)
            if widths != tuple((s.name, s.width) for s in self.layout.segments):
                raise ValueError("register descriptions do not match the layout")
        if self.state is not None:
            if self.state.layout != self.layout:
                raise ValueError("state layout does not match the commitment layout")
            if self.registers is not None and not self._expand().allclose(self.state):
                raise ValueError("classical description does not expand to the stored state")

    @classmethod
    def honest(cls, protocol: str, registers: Sequence[RegisterSpec]) -> "Commitment":
        layout = RegisterLayout(tuple(Segment(r.name, len(r.bits)) for r in registers))
        return cls(protocol, layout, tuple(registers))

    def _expand(self) -> QuantumRegisterState:
        bits = "".join(r.bits for r in self.registers)
        bases = [r.basis for r in self.registers for _ in r.bits]
        return encode_basis(bits, bases, self.layout)

    def statevector(self) -> QuantumRegisterState:
        return self.state if self.state is not None else self._expand()

    def to_json(self) -> dict:
        d: dict = {"protocol": self.protocol, "layout": self.layout.to_json()}
        if self.registers is not None:
            d["registers"] = [r.to_json() for r in self.registers]
        if self.state is not None:
            d["state"] = self.state.to_json()
        return d

    @classmethod
    def from_json(cls, d: Mapping) -> "Commitment":
        regs = d.get("registers")
        return cls(
            d["protocol"],
            RegisterLayout.from_json(d["layout"]),
            tuple(RegisterSpec.from_json(r) for r in regs) if regs is not None else None,
            QuantumRegisterState.from_json(d["state"]) if "state" in d else None,
        )


# -------------------------------------------------------------------- openings


@dataclass(frozen=True)
class BaseOpening:
    w: int
    x: str

    def to_json(self) -> dict:
        return {"kind": "base", "w": self.w, "x": self.x}


@dataclass(frozen=True)
class PairOpening:
    """Openings of one first/second register pair: ``(w₁, h₁, y)`` and ``(w₂, h₂, x)``."""

    w1: int
    h1: HashFunction
    y: str
    w2: int
    h2: HashFunction
    x: str
    first: str = "first"
    second: str = "second"

    def to_json(self) -> dict:
        return {
            "kind": "pair", "w1": self.w1, "h1": to_wire(self.h1).hex(), "y": self.y,
            "w2": self.w2, "h2": to_wire(self.h2).hex(), "x": self.x,
            "first": self.first, "second": self.second,
        }


def opening_from_json(d: Mapping) -> BaseOpening | PairOpening:
    if d["kind"] == "base":
        return BaseOpening(int(d["w"]), as_bits(d["x"]))
    if d["kind"] == "pair":
        return PairOpening(
            int(d["w1"]), from_wire(bytes.fromhex(d["h1"])), as_bits(d["y"]),
            int(d["w2"]), from_wire(bytes.fromhex(d["h2"])), as_bits(d["x"]),
            d["first"], d["second"],
        )
    raise ValueError(f"unknown opening kind {d['kind']!r}")


@dataclass(frozen=True)
class Decommitment:
    """Reveal-phase message: one opening per slot, plus outer share bits if any."""

    protocol: str
    openings: tuple[BaseOpening | PairOpening, ...]
    groups: tuple[tuple[int, ...], ...] = ()

    def to_json(self) -> dict:
        return {
            "protocol": self.protocol,
            "openings": [o.to_json() for o in self.openings],
            "groups": [list(g) for g in self.groups],
        }

    @classmethod
    def from_json(cls, d: Mapping) -> "Decommitment":
        return cls(
            d["protocol"],
            tuple(opening_from_json(o) for o in d["openings"]),
            tuple(tuple(g) for g in d.get("groups", [])),
        )


@dataclass(frozen=True)
class VerificationOutcome:
    accepted: bool
    recovered: tuple[int, ...]
    flags: dict[str, bool]
    probability: float
    register_probabilities: dict[str, float] = field(default_factory=dict)

    def __post_init__(self):
        if self.accepted and not all(self.flags.values()):
            raise ValueError("accepted outcome with a failing sub-check")

    def to_json(self) -> dict:
        return {
            "accepted": self.accepted,
            "recovered": list(self.recovered),
            "flags": dict(self.flags),
            "probability": self.probability,
            "register_probabilities": dict(self.register_probabilities),
        }

    @classmethod
    def from_json(cls, d: Mapping) -> "VerificationOutcome":
        return cls(
            bool(d["accepted"]), tuple(d["recovered"]), dict(d["flags"]),
            float(d["probability"]), dict(d.get("register_probabilities", {})),
        )


# ------------------------------------------------------------ acceptance engine


@dataclass(frozen=True)
class RegisterCheck:
    """Bob accepts a register iff measuring it in ``basis`` yields ``expected``.

    ``expected = None`` marks a check already failed classically.
    """

    name: str
    expected: str | None
    basis: Basis


def _product_probability(spec: RegisterSpec, check: RegisterCheck) -> float:
    if check.expected is None:
        return 0.0
    if len(check.expected) != len(spec.bits):
        raise ValueError(f"register {spec.name!r}: expected width mismatch")
    if spec.basis is not check.basis:
        return 0.5 ** len(spec.bits)
    return 1.0 if spec.bits == check.expected else 0.0


def _pattern_probabilities(
    state: QuantumRegisterState, checks: Sequence[RegisterCheck]
) -> dict[tuple[bool, ...], float]:
    """Joint probabilities of every pass/fail pattern of commuting checks."""
    vecs: dict[tuple[bool, ...], np.ndarray] = {(): state.amplitudes}
    for c in checks:
        width = state.layout.width(c.name)
        nxt: dict[tuple[bool, ...], np.ndarray] = {}
        for pattern, v in vecs.items():
            if c.expected is None:
                passed = np.zeros_like(v)
            else:
                proj = Projector(width, frozenset([c.expected]), (c.basis,) * width, segment=c.name)
                passed = proj.apply_vector(v, state.layout)
            nxt[pattern + (True,)] = passed
            nxt[pattern + (False,)] = v - passed
        vecs = nxt
    return {k: float(np.vdot(v, v).real) / state.norm2 for k, v in vecs.items()}


def run_checks(
    commitment: Commitment,
    checks: Sequence[RegisterCheck],
    seed: int | np.random.Generator | None = None,
) -> tuple[float, dict[str, float], dict[str, bool]]:
    """Acceptance probability of all checks, per-register marginals and verdicts.

    With ``seed=None`` the verdicts are the exact ones (probability 1 within
    tolerance). Otherwise they are sampled from the joint distribution.
    """
    names = [c.name for c in checks]
    if commitment.registers is not None and commitment.state is None:
        by_name = {r.name: r for r in commitment.registers}
        marg = {c.name: _product_probability(by_name[c.name], c) for c in checks}
        joint = float(np.prod(list(marg.values()))) if marg else 1.0
        if seed is None:
            flags = {k: p > 1 - ACCEPT_TOL for k, p in marg.items()}
        else:
            rng = np.random.default_rng(seed)
            flags = {k: bool(rng.random() < p) for k, p in marg.items()}
        return joint, marg, flags
    table = _pattern_probabilities(commitment.statevector(), checks)
    marg = {
        name: sum(p for pat, p in table.items() if pat[i]) for i, name in enumerate(names)
    }
    joint = table[(True,) * len(checks)]
    if seed is None:
        flags = {k: p > 1 - ACCEPT_TOL for k, p in marg.items()}
    else:
        rng = np.random.default_rng(seed)
        patterns = list(table)
        probs = np.clip([table[p] for p in patterns], 0, None)
        pick = patterns[int(rng.choice(len(patterns), p=probs / probs.sum()))]
        flags = dict(zip(names, pick))
    return joint, marg, flags
