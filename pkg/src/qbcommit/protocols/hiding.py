"""Exact hiding analysis: commitment densities and trace distances.

A register prepared as ``|s>`` in basis ``θ(w)`` and averaged over Alice's
randomness is diagonal in that basis. So the distance of any single
commitment density to the maximally mixed state is a classical total
variation distance, at any size. Distances between densities in different
bases need dense matrices and are only computed up to
``EXACT_PAIRWISE_QUBITS``.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Sequence

import numpy as np

from ..funcfam import FunctionFamilyInstance, entropy_buckets
from ..qcore import DensityOperator, hadamard_matrix, trace_distance
from .parallel import shares_from_head
from .params import ProtocolParams

EXACT_PAIRWISE_QUBITS = 10
SLOT_DENSITY_QUBITS = 12


def input_distribution(f: FunctionFamilyInstance, condition: str = "uniform") -> np.ndarray:
    """Distribution of Alice's ``x``: uniform, or uniform on the bucket set Γ."""
    if condition == "uniform":
        return np.full(1 << f.n, 1.0 / (1 << f.n))
    if condition == "gamma":
        gamma = sorted(entropy_buckets(f).gamma)
        p = np.zeros(1 << f.n)
        p[gamma] = 1.0 / len(gamma)
        return p
    raise ValueError(f"unknown condition {condition!r}")


def tv_to_uniform(p: np.ndarray) -> float:
    p = np.asarray(p, dtype=float).reshape(-1)
    return float(0.5 * np.abs(p - 1.0 / p.size).sum())


def rotate_diagonal(diag: np.ndarray, widths: Sequence[int], diagonal_basis: Sequence[bool]) -> np.ndarray:
    """``B diag(d) B†`` with ``B`` a Hadamard on every register flagged diagonal."""
    b = np.ones((1, 1))
    for k, flag in zip(widths, diagonal_basis):
        b = np.kron(b, hadamard_matrix(k) if flag else np.eye(1 << k))
    return (b * np.asarray(diag, dtype=float)[None, :]) @ b.T


# ---------------------------------------------------------------------- base


def base_density(f: FunctionFamilyInstance, w: int, inputs: np.ndarray | None = None) -> DensityOperator:
    p = input_distribution(f) if inputs is None else np.asarray(inputs, dtype=float)
    out = np.bincount(f.table, weights=p, minlength=1 << f.out_bits)
    return DensityOperator(rotate_diagonal(out, [f.out_bits], [w == 1]))


# ---------------------------------------------------------------------- pairs


def pair_joint_distribution(
    f: FunctionFamilyInstance, params: ProtocolParams, inputs: np.ndarray
) -> np.ndarray:
    """Joint law of the two register labels ``enc(h₁)‖h₁(y)`` and ``enc(h₂)‖h₂(x)``.

    Shape ``(2^{width₁}, 2^{width₂})``; the density in basis ``θ(w₁)⊗θ(w₂)``
    is this table on its diagonal.
    """
    fam1, fam2 = params.first_family(), params.second_family()
    xs = np.arange(1 << f.n)
    a = _label_matrix(fam1, f.table)
    b = _label_matrix(fam2, xs)
    return (a * np.asarray(inputs, dtype=float)[None, :]) @ b.T


def _label_matrix(family, values: np.ndarray) -> np.ndarray:
    """``M[label, x] = Pr_h[enc(h)‖h(value_x) = label]``."""
    outs = family.evaluate_many(np.arange(family.size), values)
    labels = (np.arange(family.size)[:, None] << family.out_bits) | outs
    m = np.zeros((family.size << family.out_bits, len(values)))
    np.add.at(m, (labels, np.broadcast_to(np.arange(len(values)), labels.shape)), 1.0 / family.size)
    return m


def pair_widths(params: ProtocolParams) -> tuple[int, int]:
    fam1, fam2 = params.first_family(), params.second_family()
    return fam1.index_bits + fam1.out_bits, fam2.index_bits + fam2.out_bits


def pair_density(
    f: FunctionFamilyInstance, params: ProtocolParams, w1: int, w2: int, inputs: np.ndarray
) -> DensityOperator:
    widths = pair_widths(params)
    if sum(widths) > SLOT_DENSITY_QUBITS:
        raise ValueError(f"{sum(widths)} qubits exceeds the dense-density cap")
    joint = pair_joint_distribution(f, params, inputs).reshape(-1)
    return DensityOperator(rotate_diagonal(joint, widths, [w1 == 1, w2 == 1]))


def hiding_bound(params: ProtocolParams) -> float:
    return 2.0 ** (-params.delta1 / 2) + 2.0 ** (-params.delta2 / 2)


# -------------------------------------------------------------------- reports


@dataclass
class HidingRow:
    bits: tuple[int, ...]
    distance_to_uniform: float | None
    bound: float | None
    pairwise: dict[tuple[int, ...], float | None] = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        if self.bound is None or self.distance_to_uniform is None:
            return True
        return self.distance_to_uniform <= self.bound + 1e-9


@dataclass
class HidingReport:
    protocol: str
    condition: str
    rows: list[HidingRow]
    max_pairwise: float | None
    pairwise_bound: float | None

    @property
    def passed(self) -> bool:
        ok = all(r.passed for r in self.rows)
        if self.max_pairwise is not None and self.pairwise_bound is not None:
            ok = ok and self.max_pairwise <= self.pairwise_bound + 1e-9
        return ok


def hiding_report(
    protocol: str,
    f: FunctionFamilyInstance,
    params: ProtocolParams | None = None,
    condition: str = "uniform",
) -> HidingReport:
    """Trace distances between commitment densities for every committed value.

    ``base``: rows for ``w ∈ {0, 1}``, pairwise distance only.
    ``p1``: rows for every ``(w₁, w₂)`` with the distance to the maximally
    mixed state and the bound ``2^{-Δ₁/2} + 2^{-Δ₂/2}``; pairwise distances
    when the registers are small enough, else None.
    """
    inputs = input_distribution(f, condition)
    if protocol == "base":
        rho = {w: base_density(f, w, inputs) for w in (0, 1)}
        d = trace_distance(rho[0], rho[1])
        rows = [
            HidingRow((w,), tv_to_uniform(np.diag(rho[0].matrix).real), None, {(1 - w,): d})
            for w in (0, 1)
        ]
        return HidingReport("base", condition, rows, d, None)
    if protocol != "p1":
        raise ValueError("hiding_report supports 'base' and 'p1'; use p2_slot_hiding for p2")
    if params is None:
        raise ValueError("p1 hiding needs params")
    joint = pair_joint_distribution(f, params, inputs)
    dist = tv_to_uniform(joint)
    bound = hiding_bound(params)
    keys = list(itertools.product((0, 1), repeat=2))
    exact = sum(pair_widths(params)) <= EXACT_PAIRWISE_QUBITS
    dens = {k: pair_density(f, params, *k, inputs) for k in keys} if exact else {}
    rows = []
    for k in keys:
        pw = {
            o: (trace_distance(dens[k], dens[o]) if exact else None) for o in keys if o != k
        }
        rows.append(HidingRow(k, dist, bound, pw))
    vals = [v for r in rows for v in r.pairwise.values() if v is not None]
    return HidingReport("p1", condition, rows, max(vals) if vals else None, 2 * bound)


# ------------------------------------------------------- parallel composition


@dataclass
class SlotHidingResult:
    bits: tuple[int, int]
    distance_to_reference: float
    slot_distance: float
    pairwise: dict[tuple[int, int], float]

    @property
    def passed(self) -> bool:
        return self.distance_to_reference <= self.slot_distance + 1e-9 and all(
            d <= 2 * self.slot_distance + 1e-9 for d in self.pairwise.values()
        )


def _slot_densities(f, params, inputs) -> dict[tuple[int, int], np.ndarray]:
    return {
        k: pair_density(f, params, *k, inputs).matrix
        for k in itertools.product((0, 1), repeat=2)
    }


def _share_vectors(bit: int, m: int) -> list[tuple[int, ...]]:
    return [shares_from_head(bit, head) for head in itertools.product((0, 1), repeat=m - 1)]


def p2_slot_hiding(
    f: FunctionFamilyInstance, params: ProtocolParams, gamma_slot: int = 0
) -> list[SlotHidingResult]:
    """Exact parallel-commitment densities when slot ``gamma_slot`` has ``x ∈ Γ``.

    For every ``(w₁, w₂)`` the density averaged over the XOR shares is compared
    with the reference where that slot is replaced by the maximally mixed
    state and every other slot by its share-averaged density. Convexity
    bounds this distance by the single-slot distance to uniform. Slots are
    ordered slot-major here, which leaves trace distances unchanged.
    """
    m = params.m
    if not 0 <= gamma_slot < m:
        raise ValueError("gamma_slot out of range")
    width = sum(pair_widths(params))
    if m * width > SLOT_DENSITY_QUBITS:
        raise ValueError(f"{m * width} qubits exceeds the dense-density cap")
    uniform = _slot_densities(f, params, input_distribution(f, "uniform"))
    heavy_in = input_distribution(f, "gamma")
    heavy = _slot_densities(f, params, heavy_in)
    slot_distance = tv_to_uniform(pair_joint_distribution(f, params, heavy_in))

    def slot(i, s1, s2):
        return (heavy if i == gamma_slot else uniform)[(s1, s2)]

    def kron_all(mats):
        out = np.ones((1, 1))
        for mm in mats:
            out = np.kron(out, mm)
        return out

    dim = 1 << width
    ref = kron_all(
        np.eye(dim) / dim if i == gamma_slot else sum(uniform.values()) / 4 for i in range(m)
    )
    rho = {}
    for w1, w2 in itertools.product((0, 1), repeat=2):
        acc = np.zeros((dim**m, dim**m), dtype=complex)
        s1s, s2s = _share_vectors(w1, m), _share_vectors(w2, m)
        for s1 in s1s:
            for s2 in s2s:
                acc += kron_all(slot(i, s1[i], s2[i]) for i in range(m))
        rho[(w1, w2)] = acc / (len(s1s) * len(s2s))
    results = []
    for k, r in rho.items():
        pw = {o: trace_distance(r, rho[o]) for o in rho if o != k}
        results.append(SlotHidingResult(k, trace_distance(r, ref), slot_distance, pw))
    return results


def lemma2_check(
    probs: Sequence[float], blocks: Sequence[np.ndarray], sigma: np.ndarray
) -> tuple[float, float]:
    """Distance of ``Σ p_x |x><x| ⊗ ρ_x`` from ``Σ p_x |x><x| ⊗ σ``, and ``max_x δ(ρ_x, σ)``."""
    k = len(blocks)
    d = sigma.shape[0]
    rho = np.zeros((k * d, k * d), dtype=complex)
    ref = np.zeros_like(rho)
    for i, (p, b) in enumerate(zip(probs, blocks)):
        rho[i * d:(i + 1) * d, i * d:(i + 1) * d] = p * b
        ref[i * d:(i + 1) * d, i * d:(i + 1) * d] = p * sigma
    return trace_distance(rho, ref), max(trace_distance(b, sigma) for b in blocks)


# -------------------------------------------------------------------- coverage


def coverage_exact(mu: Fraction | float, m: int) -> Fraction | float:
    """``Pr[∃ i ≤ m : x_i ∈ Γ] = 1 - (1 - μ)^m``."""
    return 1 - (1 - mu) ** m


def coverage_enumerated(gamma: Iterable[int], n: int, m: int) -> Fraction:
    """Same probability by enumerating every tuple ``(x_1, …, x_m)``."""
    mask = np.zeros(1 << n, dtype=bool)
    mask[list(gamma)] = True
    if m < 1:
        raise ValueError("m must be at least 1")
    hit = mask
    for _ in range(m - 1):
        hit = np.logical_or.outer(hit, mask)
    return Fraction(int(hit.sum()), 1 << (n * m))


def coverage_lower_bound(mu: float, m: int) -> float:
    return 1.0 - math.exp(-m * mu)


def share_marginals_uniform(m: int) -> bool:
    """Every ``m-1`` shares of either committed bit are jointly uniform."""
    for bit in (0, 1):
        vecs = _share_vectors(bit, m)
        for drop in range(m):
            counts: dict[tuple[int, ...], int] = {}
            for v in vecs:
                key = v[:drop] + v[drop + 1:]
                counts[key] = counts.get(key, 0) + 1
            if len(counts) != 1 << (m - 1) or set(counts.values()) != {1}:
                return False
    return True
