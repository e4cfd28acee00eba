"""Honest parties and verification for the commitment protocols."""

from .base import base_commit, base_verify
from .hiding import hiding_bound, hiding_report, p2_slot_hiding
from .messages import (
    BaseOpening,
    Commitment,
    Decommitment,
    PairOpening,
    RegisterSpec,
    VerificationOutcome,
)
from .p1 import p1_commit, p1_verify
from .parallel import p2_commit, p2_verify, p3_commit, p3_verify, p4_commit, p4_verify, xor_shares
from .params import ProtocolParams
from .transcript import Transcript


__all__ = [
    "BaseOpening", "Commitment", "Decommitment", "PairOpening", "ProtocolParams",
    "RegisterSpec", "Transcript", "VerificationOutcome", "base_commit", "base_verify",
    "hiding_bound", "hiding_report", "p1_commit", "p1_verify", "p2_commit", "p2_verify",
    "p2_slot_hiding", "p3_commit", "p3_verify", "p4_commit", "p4_verify", "xor_shares",
]
