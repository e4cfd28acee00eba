"""Statistical cheating against a single hashed register, and its parallel form.

For a target set ``W_y ⊆ {0,1}^q`` the projectors are
``Π₀ = Σ_{z∈W_y} |z><z|_+`` and ``Π₁ = Σ_{z∈W_y} |z><z|_×``. The best
achievable ``b₀ + b₁`` over all states is ``λ_max(Π₀ + Π₁) = 1 + ‖Π₀Π₁‖``.
``optimal_statistical_cheat`` builds the two-level state that is uniform on
``W_y`` and uniform off it. It reports the measured values next to the
closed forms, which only count the all-zero Fourier coefficient.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from ..qcore import hadamard_matrix, projector_product_norm, projector_sum_max_eig
from .adversary import BindingReport


def _mask(target: Iterable[int], q: int) -> np.ndarray:
    m = np.zeros(1 << q)
    for z in target:
        if not 0 <= z < 1 << q:
            raise ValueError(f"{z} is not a {q}-bit string")
        m[z] = 1.0
    return m


def cheat_projectors(target: Iterable[int], q: int) -> tuple[np.ndarray, np.ndarray]:
    m = _mask(target, q)
    h = hadamard_matrix(q)
    p0 = np.diag(m)
    return p0, h @ p0 @ h


@dataclass(frozen=True)
class CheatResult:
    state: np.ndarray
    a: float
    xi: float
    b0: float
    b1: float
    formula_b0: float
    formula_b1: float

    @property
    def total(self) -> float:
        return self.b0 + self.b1

    @property
    def formula_total(self) -> float:
        return self.formula_b0 + self.formula_b1

    @property
    def report(self) -> BindingReport:
        return BindingReport(self.b0, self.b1)


def closed_form_b1(a: float, xi: float) -> float:
    """``(√(a|W|) + √((1-a)(2^q-|W|)))² / 2^q`` written in ``ξ = |W|/2^q``."""
    return (math.sqrt(a * xi) + math.sqrt((1 - a) * (1 - xi))) ** 2


def closed_form_total(a: float, xi: float) -> float:
    """``1 + (2a-1)ξ + 2√(a(1-a)ξ(1-ξ))``."""
    return 1 + (2 * a - 1) * xi + 2 * math.sqrt(a * (1 - a) * xi * (1 - xi))


def optimal_statistical_cheat(target: Iterable[int], q: int, a: float) -> CheatResult:
    """Two-level cheat state and its measured and closed-form acceptance values.

    Degenerate targets: an empty set gives the uniform state off it
    (``b₀ = 0``); the full set forces ``a = 1``.
    """
    if not 0 <= a <= 1:
        raise ValueError("a must lie in [0, 1]")
    m = _mask(target, q)
    k, size = int(m.sum()), 1 << q
    xi = k / size
    if k == 0:
        a = 0.0
    elif k == size:
        a = 1.0
    alpha = np.where(m > 0, math.sqrt(a / k) if k else 0.0, math.sqrt((1 - a) / (size - k)) if k < size else 0.0)
    b0 = float((np.abs(alpha) ** 2 * m).sum())
    b1 = float(((hadamard_matrix(q) @ alpha) ** 2 * m).sum())
    return CheatResult(alpha, a, xi, b0, b1, a, closed_form_b1(a, xi))


def _quarter_circle_max(mat: np.ndarray) -> float:
    """``max vᵀMv`` over unit ``v`` with non-negative entries (2×2 real symmetric ``M``)."""
    w, v = np.linalg.eigh(mat)
    top = v[:, -1]
    if (top >= -1e-15).all() or (top <= 1e-15).all():
        return float(w[-1])
    return float(max(mat[0, 0], mat[1, 1]))


def explicit_family_optimum(target: Iterable[int], q: int) -> float:
    """``max_a`` of the measured ``b₀ + b₁`` over the two-level family."""
    m = _mask(target, q)
    k, size = int(m.sum()), 1 << q
    if k in (0, size):
        return optimal_statistical_cheat(np.flatnonzero(m), q, 1.0).total
    e_in = m / math.sqrt(k)
    e_out = (1 - m) / math.sqrt(size - k)
    h = hadamard_matrix(q)
    g_in, g_out = (h @ e_in) * m, (h @ e_out) * m
    mat = np.array(
        [[1 + g_in @ g_in, g_in @ g_out], [g_in @ g_out, g_out @ g_out]]
    )
    return _quarter_circle_max(mat)


def closed_form_optimum(xi: float) -> float:
    """``max_a`` of the closed form, found as the top eigenvalue of its quadratic form."""
    c = math.sqrt(xi * (1 - xi))
    return _quarter_circle_max(np.array([[1 + xi, c], [c, 1 - xi]]))


def spectral_optimum(target: Iterable[int], q: int) -> float:
    """``λ_max(Π₀ + Π₁)``: the best ``b₀ + b₁`` over every state."""
    p0, p1 = cheat_projectors(target, q)
    return projector_sum_max_eig(p0, p1)


def spectral_optimum_via_overlap(target: Iterable[int], q: int) -> float:
    """``1 + ‖Π₀Π₁‖``, an independent route to the same optimum (non-empty target)."""
    p0, p1 = cheat_projectors(target, q)
    return 1 + projector_product_norm(p0, p1)


# ------------------------------------------------------------------ parallel


@dataclass(frozen=True, eq=False)
class SlotStrategy:
    """One slot of a product adversary.

    ``share0`` / ``share1`` are the share bits announced for the two
    openings. ``pi0`` / ``pi1`` are the projectors Bob checks in each.
    """

    state: np.ndarray
    pi0: np.ndarray
    pi1: np.ndarray
    share0: int
    share1: int
    unitary: np.ndarray | None = None

    def reveal_state(self) -> np.ndarray:
        return self.state if self.unitary is None else self.unitary @ self.state

    def report(self) -> BindingReport:
        v0 = self.pi0 @ self.state
        v1 = self.pi1 @ self.reveal_state()
        return BindingReport(float(np.vdot(v0, v0).real), float(np.vdot(v1, v1).real))


def honest_slot(bits: int, q: int, share: int) -> SlotStrategy:
    """Honest register ``|bits>_{θ(share)}`` opened with the same share both times."""
    h = hadamard_matrix(q)
    e = np.zeros(1 << q)
    e[bits] = 1.0
    state = h @ e if share else e
    proj = np.outer(state, state)
    return SlotStrategy(state.astype(complex), proj, proj, share, share)


def cheating_slot(target: Iterable[int], q: int, a: float, share0: int = 0) -> SlotStrategy:
    """Two-level cheat opened as ``share0`` and then as its complement."""
    res = optimal_statistical_cheat(target, q, a)
    p_plus, p_times = cheat_projectors(target, q)
    by_share = {0: p_plus, 1: p_times}
    return SlotStrategy(
        res.state.astype(complex), by_share[share0], by_share[1 - share0], share0, 1 - share0
    )


@dataclass(frozen=True)
class DecompositionResult:
    index: int
    overall: BindingReport
    slots: tuple[BindingReport, ...]


def parallel_binding_decompose(slots: Sequence[SlotStrategy]) -> DecompositionResult:
    """Overall acceptance of a product adversary and the slot carrying the cheat.

    The overall values are computed on the full tensor product; the returned
    index maximizes ``b₀ + b₁`` among slots whose share changes between the
    two openings.
    """
    if not slots:
        raise ValueError("no slots")
    if sum(s.share0 for s in slots) % 2 == sum(s.share1 for s in slots) % 2:
        raise ValueError("both openings reveal the same committed bit")

    def kron_all(items):
        out = np.ones((1,) * items[0].ndim, dtype=complex)
        for it in items:
            out = np.kron(out, it)
        return out

    psi = kron_all([s.state for s in slots])
    psi_rev = kron_all([s.reveal_state() for s in slots])
    v0 = kron_all([s.pi0 for s in slots]) @ psi
    v1 = kron_all([s.pi1 for s in slots]) @ psi_rev
    overall = BindingReport(float(np.vdot(v0, v0).real), float(np.vdot(v1, v1).real))
    reports = tuple(s.report() for s in slots)
    candidates = [i for i, s in enumerate(slots) if s.share0 != s.share1]
    j = max(candidates, key=lambda i: reports[i].total)
    return DecompositionResult(j, overall, reports)
