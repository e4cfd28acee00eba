"""Inverting ``f`` with a binding-breaking adversary.

The circuit ``W`` acts on ``open ⊗ commit ⊗ inv`` (with ``keep`` untouched):

1. phase ``(-1)^{<u, c>}`` between ``inv = u`` and ``commit = c``;
2. ``commit ← commit ⊕ f(open)``;
3. ``commit ← commit ⊕ inv``;
4. Hadamard on every commit qubit.

On ``|u>|x>|f(x)>_+`` this yields ``(-1)^{<u,f(x)>} |u>|x>|u>_×``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..bits import parity
from ..funcfam import FunctionFamilyInstance
from ..qcore import check_budget, hadamard_matrix
from .adversary import Adversary, BindingRelation, apply_binding_projector, evaluate_binding


def apply_inverter_circuit(vec: np.ndarray, f: FunctionFamilyInstance, keep: int) -> np.ndarray:
    """Apply ``W`` to a vector over ``(keep, open, commit, inv)``."""
    nc = 1 << f.out_bits
    t = np.asarray(vec, dtype=complex).reshape(1 << keep, 1 << f.n, nc, nc)
    c = np.arange(nc)
    phase = 1.0 - 2.0 * parity(c[:, None] & c[None, :])
    t = t * phase[None, None, :, :]
    idx = c[None, :] ^ f.table[:, None]  # [x, c] -> c ⊕ f(x)
    t = np.take_along_axis(t, np.broadcast_to(idx[None, :, :, None], t.shape), axis=2)
    idx = c[:, None] ^ c[None, :]  # [c, u] -> c ⊕ u
    t = np.take_along_axis(t, np.broadcast_to(idx[None, None, :, :], t.shape), axis=2)
    t = np.einsum("cd,kxdu->kxcu", hadamard_matrix(f.out_bits), t)
    return t.reshape(-1)


def build_inverter_circuit(f: FunctionFamilyInstance, keep: int = 0) -> np.ndarray:
    """Dense ``W`` over ``(keep, open, commit, inv)``; small sizes only."""
    q = keep + f.n + 2 * f.out_bits
    if q > 12:
        raise ValueError(f"dense inverter circuit on {q} qubits is too large")
    dim = 1 << q
    return np.stack([apply_inverter_circuit(np.eye(dim)[:, j], f, keep) for j in range(dim)], axis=1)


def circuit_contract_error(f: FunctionFamilyInstance) -> float:
    """Largest deviation of ``W`` from its contract over all basis inputs ``u, x``."""
    nc = 1 << f.out_bits
    h = hadamard_matrix(f.out_bits)
    worst = 0.0
    for u in range(nc):
        for x in range(1 << f.n):
            fx = int(f.table[x])
            t = np.zeros((1, 1 << f.n, nc, nc), dtype=complex)
            t[0, x, fx, u] = 1.0
            out = apply_inverter_circuit(t, f, 0).reshape(t.shape)
            want = np.zeros_like(t)
            want[0, x, :, u] = (-1) ** bin(u & fx).count("1") * h[:, u]
            worst = max(worst, float(np.abs(out - want).max()))
    return worst


def phi(adv_state: np.ndarray, f: FunctionFamilyInstance, keep: int, u: int) -> np.ndarray:
    """``P^{u}_{×, commit}`` applied to a state over ``(keep, open, commit)``."""
    h = hadamard_matrix(f.out_bits)
    t = np.asarray(adv_state, dtype=complex).reshape(1 << keep, 1 << f.n, 1 << f.out_bits)
    col = h[:, u]
    return (np.einsum("kxc,c->kx", t, col)[:, :, None] * col[None, None, :]).reshape(-1)


def with_input(state: np.ndarray, u: int, n_out: int) -> np.ndarray:
    """``state ⊗ |u>_inv``."""
    e = np.zeros(1 << n_out, dtype=complex)
    e[u] = 1.0
    return np.kron(np.asarray(state, dtype=complex), e)


@dataclass(frozen=True)
class InverterRun:
    y: int
    open_distribution: np.ndarray
    p_inv: float
    p_any_preimage: float


def run_inverter(adv: Adversary, rel: BindingRelation, y: int, postselect: bool = True) -> InverterRun:
    """Prepare ``ψ̃₀`` (projected by ``P₀`` when ``postselect``), load ``y``, apply ``W``
    then ``U``, and measure ``open``.

    ``open_distribution`` holds joint probabilities (it sums to ``b₀`` under
    post-selection). ``p_inv`` is the mass on ``f⁻¹(y) ∩ W`` and
    ``p_any_preimage`` the mass on all of ``f⁻¹(y)``.
    """
    f = rel.f
    check_budget(adv.layout.q_total + f.out_bits)
    start = apply_binding_projector(rel, 0, adv.psi0, adv.keep) if postselect else adv.psi0
    v = apply_inverter_circuit(with_input(start, y, f.out_bits), f, adv.keep)
    v = adv.apply_u(v)
    t = np.abs(v.reshape(1 << adv.keep, 1 << f.n, -1)) ** 2
    dist = t.sum(axis=(0, 2))
    pre = f.table == y
    in_w = np.zeros(1 << f.n, dtype=bool)
    in_w[list(rel.domain)] = True
    return InverterRun(y, dist, float(dist[pre & in_w].sum()), float(dist[pre].sum()))


@dataclass(frozen=True)
class AggregateInversion:
    per_output: dict[int, float]
    uniform: float
    weighted: float
    projector_value: float
    b0: float
    b1: float

    @property
    def lower_bound(self) -> float | None:
        """``(√b₁ - √(1-b₀))²`` when ``b₁ > 1 - b₀``, else None (vacuous)."""
        if self.b1 <= 1 - self.b0:
            return None
        return (np.sqrt(self.b1) - np.sqrt(max(0.0, 1 - self.b0))) ** 2


def projector_sandwich(adv: Adversary, rel: BindingRelation) -> float:
    """``‖P₁ U P₀ ψ̃₀‖²``."""
    v = apply_binding_projector(rel, 0, adv.psi0, adv.keep)
    v = apply_binding_projector(rel, 1, adv.apply_u(v), adv.keep)
    return float(np.vdot(v, v).real)


def aggregate_inversion(adv: Adversary, rel: BindingRelation) -> AggregateInversion:
    """Success of the inverter averaged over its input ``y``.

    ``uniform`` averages over every ``y ∈ {0,1}^{n_out}`` and equals
    ``‖P₁UP₀ψ̃₀‖²`` exactly. ``weighted`` averages with ``Pr[f(U_n) = y]``
    over ``y ∈ f(W)``; the two agree when ``f`` is a permutation.
    """
    f = rel.f
    per = {y: run_inverter(adv, rel, y).p_inv for y in range(1 << f.out_bits)}
    uniform = float(np.mean(list(per.values())))
    weighted = float(sum(f.p[y] * per[y] for y in rel.image))
    rep = evaluate_binding(adv, rel)
    return AggregateInversion(per, uniform, weighted, projector_sandwich(adv, rel), rep.b0, rep.b1)
