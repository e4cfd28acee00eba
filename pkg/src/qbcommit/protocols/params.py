"""Protocol parameters."""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

from ..hashfam import TOEPLITZ, HashFamily


@dataclass(frozen=True)
class ProtocolParams:
    """Sizes shared by the paired-hash protocols.

    ``m`` is the repetition count of the parallel protocol, and ``t_range``
    the sweep of the XOR-shared outer protocol (defaults to ``1..n``).
    ``security`` is a nominal ``s`` used only by :meth:`from_security`.
    """

    n: int
    t: int = 1
    delta1: int = 0
    delta2: int = 0
    m: int = 1
    t_range: tuple[int, ...] | None = None
    hash_kind: str = TOEPLITZ
    delta3: float = 0.0
    security: float | None = None

    def __post_init__(self):
        if self.n < 1:
            raise ValueError("n must be positive")
        if not 1 <= self.t <= self.n:
            raise ValueError(f"t={self.t} outside [1, {self.n}]")
        if not 0 <= self.delta1 <= self.t:
            raise ValueError(f"delta1={self.delta1} outside [0, t={self.t}]")
        if not 0 <= self.delta2 <= self.n - self.t:
            raise ValueError(f"delta2={self.delta2} outside [0, n-t={self.n - self.t}]")
        if self.m < 1:
            raise ValueError("m must be at least 1")
        if self.delta3 < 0:
            raise ValueError("delta3 must be non-negative")
        if self.t_range is not None:
            tr = tuple(int(t) for t in self.t_range)
            if not tr or any(not 1 <= t <= self.n for t in tr) or len(set(tr)) != len(tr):
                raise ValueError(f"bad t_range {self.t_range}")
            object.__setattr__(self, "t_range", tr)

    @property
    def v1(self) -> int:
        return self.t - self.delta1

    @property
    def v2(self) -> int:
        return self.n - self.t - self.delta2

    def first_family(self) -> HashFamily:
        return HashFamily(self.n, self.v1, self.hash_kind)

    def second_family(self) -> HashFamily:
        return HashFamily(self.n, self.v2, self.hash_kind)

    @property
    def slot_width(self) -> int:
        """Qubits in one first+second register pair."""
        return (
            self.first_family().index_bits + self.v1 + self.second_family().index_bits + self.v2
        )

    @property
    def sweep(self) -> tuple[int, ...]:
        return self.t_range if self.t_range is not None else tuple(range(1, self.n + 1))

    def at_t(self, t: int) -> "ProtocolParams":
        """Same parameters at another ``t``, clamping the Δ's into range."""
        return replace(
            self, t=t, delta1=min(self.delta1, t), delta2=min(self.delta2, self.n - t)
        )

    @classmethod
    def from_security(cls, n: int, s: float, t: int = 1, **kw) -> "ProtocolParams":
        """``Δ₁ = Δ₂ = ⌊¼ log₂ s⌋`` and ``Δ₃ = ½ log₂ s``, clamped to the valid range."""
        if s < 1:
            raise ValueError("security parameter s must be at least 1")
        d = math.floor(math.log2(s) / 4)
        return cls(
            n=n, t=t, delta1=min(d, t), delta2=min(d, n - t),
            delta3=math.log2(s) / 2, security=s, **kw,
        )

    def to_json(self) -> dict:
        return {
            "n": self.n, "t": self.t, "delta1": self.delta1, "delta2": self.delta2,
            "m": self.m, "t_range": list(self.t_range) if self.t_range else None,
            "hash_kind": self.hash_kind, "delta3": self.delta3, "security": self.security,
        }

    @classmethod
    def from_json(cls, data: dict) -> "ProtocolParams":
        data = dict(data)
        if data.get("t_range") is not None:
            data["t_range"] = tuple(data["t_range"])
        return cls(**data)
