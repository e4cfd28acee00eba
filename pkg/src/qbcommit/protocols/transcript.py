"""JSON transcripts of a full commit/reveal session."""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path
from typing import Mapping

from .messages import Commitment, Decommitment, VerificationOutcome
from .params import ProtocolParams


@dataclass(frozen=True, eq=False)
class Transcript:
    params: ProtocolParams | None
    commitment: Commitment
    decommitment: Decommitment
    outcome: VerificationOutcome

    def to_json(self) -> dict:
        return {
            "params": self.params.to_json() if self.params is not None else None,
            "commitment": self.commitment.to_json(),
            "decommitment": self.decommitment.to_json(),
            "outcome": self.outcome.to_json(),
        }

    def dumps(self) -> str:
        return json.dumps(self.to_json(), sort_keys=True)

    @classmethod
    def from_json(cls, d: Mapping | str) -> "Transcript":
        if isinstance(d, str):
            d = json.loads(d)
        return cls(
            ProtocolParams.from_json(d["params"]) if d["params"] is not None else None,
            Commitment.from_json(d["commitment"]),
            Decommitment.from_json(d["decommitment"]),
            VerificationOutcome.from_json(d["outcome"]),
        )

    def save(self, path: str | Path) -> None:
        Path(path).write_text(self.dumps())

    @classmethod
    def load(cls, path: str | Path) -> "Transcript":
        return cls.from_json(Path(path).read_text())
