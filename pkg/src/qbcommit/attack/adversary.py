"""Cheating committers and their binding values.

An adversary is a commit state over the layout ``(keep, open, commit)`` and
a unitary ``U'`` acting on ``keep ⊗ open`` only; the full reveal-time unitary
is ``U = U' ⊗ I_commit``.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Iterable, Mapping

import numpy as np
from scipy.sparse.linalg import LinearOperator, eigsh

from ..bits import as_bits, from_int, to_int
from ..funcfam import FunctionFamilyInstance
from ..qcore import (
    QuantumRegisterState,
    RegisterLayout,
    check_budget,
    hadamard_matrix,
    haar_unitary,
    is_unitary,
    unitary_from_state,
)


def adversary_layout(keep: int, n_in: int, n_out: int) -> RegisterLayout:
    return RegisterLayout.of(("keep", keep), ("open", n_in), ("commit", n_out))


@dataclass(frozen=True, eq=False)
class BindingRelation:
    """Decommitment domain ``W`` and the induced pairs ``(f(x), x)``."""

    f: FunctionFamilyInstance
    domain: frozenset[int]

    def __post_init__(self):
        dom = frozenset(int(x) for x in self.domain)
        if any(not 0 <= x < 1 << self.f.n for x in dom):
            raise ValueError("domain contains inputs outside {0,1}^n")
        object.__setattr__(self, "domain", dom)

    @classmethod
    def of(cls, f: FunctionFamilyInstance, domain: Iterable[int | str]) -> "BindingRelation":
        return cls(f, frozenset(x if isinstance(x, int) else to_int(x) for x in domain))

    def __contains__(self, pair: tuple[int, int]) -> bool:
        y, x = pair
        return x in self.domain and int(self.f.table[x]) == y

    def pairs(self) -> list[tuple[int, int]]:
        return sorted((int(self.f.table[x]), x) for x in self.domain)

    @property
    def image(self) -> frozenset[int]:
        return frozenset(int(self.f.table[x]) for x in self.domain)

    def mask(self) -> np.ndarray:
        """Boolean ``[x, c]`` table of ``x ∈ W`` and ``c = f(x)``."""
        m = np.zeros((1 << self.f.n, 1 << self.f.out_bits), dtype=bool)
        for x in self.domain:
            m[x, self.f.table[x]] = True
        return m


@dataclass(frozen=True)
class BindingReport:
    b0: float
    b1: float

    def __post_init__(self):
        for v in (self.b0, self.b1):
            if not -1e-9 <= v <= 1 + 1e-9:
                raise ValueError(f"acceptance probability {v} outside [0, 1]")

    @property
    def b(self) -> float:
        return self.b0 + self.b1 - 1

    @property
    def total(self) -> float:
        return self.b0 + self.b1


@dataclass(frozen=True, eq=False)
class Adversary:
    """Commit state ``ψ̃₀ = D₀|0…0>`` plus the open-side unitary ``U'``."""

    layout: RegisterLayout
    psi0: np.ndarray
    u_local: np.ndarray

    def __post_init__(self):
        if self.layout.names != ("keep", "open", "commit"):
            raise ValueError("adversary layout must be (keep, open, commit)")
        check_budget(self.layout.q_total)
        psi = np.array(self.psi0, dtype=complex).reshape(-1)
        if psi.size != self.layout.dim or abs(np.vdot(psi, psi).real - 1) > 1e-9:
            raise ValueError("commit state must be a unit vector over the layout")
        u = np.array(self.u_local, dtype=complex)
        dko = 1 << (self.layout.width("keep") + self.layout.width("open"))
        if u.shape != (dko, dko) or not is_unitary(u):
            raise ValueError("U' must be unitary on keep ⊗ open")
        psi.setflags(write=False)
        u.setflags(write=False)
        object.__setattr__(self, "psi0", psi)
        object.__setattr__(self, "u_local", u)

    @classmethod
    def from_full_unitary(cls, layout: RegisterLayout, psi0: np.ndarray, u: np.ndarray) -> "Adversary":
        """Factor ``U = U' ⊗ I_commit``; rejects unitaries that touch the commit register."""
        dc = 1 << layout.width("commit")
        u = np.asarray(u, dtype=complex)
        local = u.reshape(u.shape[0] // dc, dc, u.shape[1] // dc, dc)[:, 0, :, 0]
        if not np.allclose(np.kron(local, np.eye(dc)), u, atol=1e-12):
            raise ValueError("U acts on the commit register")
        return cls(layout, psi0, local)

    @property
    def keep(self) -> int:
        return self.layout.width("keep")

    @property
    def n_in(self) -> int:
        return self.layout.width("open")

    @property
    def n_out(self) -> int:
        return self.layout.width("commit")

    @property
    def unitary(self) -> np.ndarray:
        return np.kron(self.u_local, np.eye(1 << self.n_out))

    @property
    def d0(self) -> np.ndarray:
        """A preparation unitary with ``D₀|0…0> = ψ̃₀``."""
        return unitary_from_state(self.psi0)

    def state(self) -> QuantumRegisterState:
        return QuantumRegisterState(self.layout, self.psi0)

    def apply_u(self, vec: np.ndarray) -> np.ndarray:
        """``(U' ⊗ I) v`` for a vector over the layout, optionally with trailing registers."""
        dko = self.u_local.shape[0]
        t = np.asarray(vec, dtype=complex).reshape(dko, -1)
        return (self.u_local @ t).reshape(-1)

    def commutes_with_commit(self) -> bool:
        h = hadamard_matrix(self.n_out)
        for u_bits in range(1 << self.n_out):
            p = np.outer(h[:, u_bits], h[:, u_bits])
            full = np.kron(np.eye(self.u_local.shape[0]), p)
            if not np.allclose(self.unitary @ full, full @ self.unitary, atol=1e-10):
                return False
        return True

    def to_json(self, domain: Iterable[int] = ()) -> dict:
        def mat(m):
            return [[[float(z.real), float(z.imag)] for z in row] for row in np.atleast_2d(m)]

        return {
            "layout": self.layout.to_json(),
            "D0": mat(self.d0),
            "U": mat(self.unitary),
            "W": [from_int(x, self.n_in) for x in sorted(domain)],
        }

    @classmethod
    def from_json(cls, d: Mapping | str) -> tuple["Adversary", frozenset[int]]:
        if isinstance(d, str):
            d = json.loads(d)

        def mat(rows):
            return np.array([[complex(re, im) for re, im in row] for row in rows])

        layout = RegisterLayout.from_json(d["layout"])
        d0 = mat(d["D0"])
        adv = cls.from_full_unitary(layout, d0[:, 0], mat(d["U"]))
        return adv, frozenset(to_int(as_bits(x)) for x in d["W"])


# ----------------------------------------------------------------- projectors


def _commit_hadamard(t: np.ndarray) -> np.ndarray:
    """Hadamard on the commit axis of a ``(keep, open, commit, …)`` tensor."""
    h = hadamard_matrix(int(np.log2(t.shape[2])))
    return np.einsum("cd,kxd...->kxc...", h, t)


def apply_binding_projector(rel: BindingRelation, bit: int, vec: np.ndarray, keep: int) -> np.ndarray:
    """``P_bit v`` with ``P_w = Σ_{x∈W} P^x_open ⊗ P^{f(x)}_{θ(w), commit}``.

    Trailing registers after ``commit`` (such as an inverter input) are left alone.
    """
    f = rel.f
    t = np.asarray(vec, dtype=complex).reshape(1 << keep, 1 << f.n, 1 << f.out_bits, -1)
    mask = rel.mask()[None, :, :, None]
    if bit == 0:
        return (t * mask).reshape(-1)
    return _commit_hadamard(_commit_hadamard(t) * mask).reshape(-1)


def binding_projectors(
    f: FunctionFamilyInstance, domain: Iterable[int], keep: int = 0
) -> tuple[np.ndarray, np.ndarray]:
    """Dense ``(P₀, P₁)`` over ``keep ⊗ open ⊗ commit``."""
    rel = BindingRelation.of(f, domain)
    check_budget(keep + f.n + f.out_bits)
    mask = rel.mask().reshape(-1).astype(float)
    p0 = np.diag(mask)
    h = np.kron(np.eye(1 << f.n), hadamard_matrix(f.out_bits))
    p1 = h @ p0 @ h
    eye = np.eye(1 << keep)
    return np.kron(eye, p0), np.kron(eye, p1)


def evaluate_binding(adv: Adversary, rel: BindingRelation) -> BindingReport:
    """``b₀ = ‖P₀ψ̃₀‖²`` and ``b₁ = ‖P₁Uψ̃₀‖²``."""
    if adv.n_in != rel.f.n or adv.n_out != rel.f.out_bits:
        raise ValueError("adversary layout does not match the function widths")
    v0 = apply_binding_projector(rel, 0, adv.psi0, adv.keep)
    v1 = apply_binding_projector(rel, 1, adv.apply_u(adv.psi0), adv.keep)
    return BindingReport(float(np.vdot(v0, v0).real), float(np.vdot(v1, v1).real))


# --------------------------------------------------------------- constructors


def _branch_state(
    rel: BindingRelation, keep: int, bit: int, weights: np.ndarray, rng: np.random.Generator
) -> np.ndarray:
    """``Σ_{x∈W} |α_x>|x>|f(x)>_{θ(bit)}`` with ``‖α_x‖² = weights[x]`` and random directions."""
    f = rel.f
    t = np.zeros((1 << keep, 1 << f.n, 1 << f.out_bits), dtype=complex)
    for x in rel.domain:
        a = rng.standard_normal(1 << keep) + 1j * rng.standard_normal(1 << keep)
        t[:, x, f.table[x]] = a / np.linalg.norm(a) * np.sqrt(weights[x])
    if bit == 1:
        t = _commit_hadamard(t[..., None])[..., 0]
    return t.reshape(-1)


def uhlmann_unitary(psi0: np.ndarray, psi1: np.ndarray, d_commit: int) -> np.ndarray:
    """``U'`` on ``keep ⊗ open`` maximizing ``|<ψ₁|U'⊗I|ψ₀>|``.

    With ``M = tr_commit |ψ₀><ψ₁| = X Σ Y†`` the optimum is ``U' = Y X†``.
    """
    a0 = np.asarray(psi0).reshape(-1, d_commit)
    a1 = np.asarray(psi1).reshape(-1, d_commit)
    x, _, yh = np.linalg.svd(a0 @ a1.conj().T)
    return yh.conj().T @ x.conj().T


def _uniform_range_weights(rel: BindingRelation, rng: np.random.Generator) -> np.ndarray:
    """Weights on ``W`` giving every image ``y`` total mass ``2^{-n_out}``."""
    f = rel.f
    if rel.image != frozenset(range(1 << f.out_bits)):
        raise ValueError("a perfect pair needs f(W) to cover the whole output space")
    w = np.zeros(1 << f.n)
    for y in range(1 << f.out_bits):
        xs = [x for x in rel.domain if f.table[x] == y]
        raw = rng.random(len(xs)) + 0.1
        w[xs] = raw / raw.sum() / (1 << f.out_bits)
    return w


def perfect_adversary(
    rel: BindingRelation, keep: int = 1, seed: int | np.random.Generator | None = 0
) -> tuple[Adversary, np.ndarray]:
    """An adversary opening both ways with certainty, and its target ``ψ₁``.

    Both branches put mass ``2^{-n_out}`` on every image, so their commit
    marginals are maximally mixed and an exact ``U'`` exists.
    """
    rng = np.random.default_rng(seed)
    psi0 = _branch_state(rel, keep, 0, _uniform_range_weights(rel, rng), rng)
    psi1 = _branch_state(rel, keep, 1, _uniform_range_weights(rel, rng), rng)
    u = uhlmann_unitary(psi0, psi1, 1 << rel.f.out_bits)
    layout = adversary_layout(keep, rel.f.n, rel.f.out_bits)
    return Adversary(layout, psi0, u), psi1


def uhlmann_adversary(
    rel: BindingRelation, keep: int = 1, seed: int | np.random.Generator | None = 0
) -> Adversary:
    """Honest-looking ``ψ̃₀`` over ``W`` (so ``b₀ = 1``) with the fidelity-optimal ``U'``
    towards a random ``×``-basis branch."""
    if not rel.domain:
        raise ValueError("empty decommitment domain")
    rng = np.random.default_rng(seed)
    w0 = np.zeros(1 << rel.f.n)
    w1 = np.zeros(1 << rel.f.n)
    dom = sorted(rel.domain)
    w0[dom] = rng.random(len(dom)) + 0.1
    w1[dom] = rng.random(len(dom)) + 0.1
    psi0 = _branch_state(rel, keep, 0, w0 / w0.sum(), rng)
    psi1 = _branch_state(rel, keep, 1, w1 / w1.sum(), rng)
    u = uhlmann_unitary(psi0, psi1, 1 << rel.f.out_bits)
    return Adversary(adversary_layout(keep, rel.f.n, rel.f.out_bits), psi0, u)


def perturbed_adversary(adv: Adversary, strength: float, seed: int | np.random.Generator | None) -> Adversary:
    """Mix random noise into both the commit state and ``U'``."""
    rng = np.random.default_rng(seed)
    noise = rng.standard_normal(adv.psi0.size) + 1j * rng.standard_normal(adv.psi0.size)
    psi = adv.psi0 + strength * noise / np.linalg.norm(noise)
    herm = rng.standard_normal(adv.u_local.shape) + 1j * rng.standard_normal(adv.u_local.shape)
    herm = (herm + herm.conj().T) / 2
    w, v = np.linalg.eigh(herm)
    kick = (v * np.exp(1j * strength * w)) @ v.conj().T
    return Adversary(adv.layout, psi / np.linalg.norm(psi), kick @ adv.u_local)


def random_adversary(
    keep: int, n_in: int, n_out: int, seed: int | np.random.Generator | None
) -> Adversary:
    rng = np.random.default_rng(seed)
    layout = adversary_layout(keep, n_in, n_out)
    psi = rng.standard_normal(layout.dim) + 1j * rng.standard_normal(layout.dim)
    return Adversary(layout, psi / np.linalg.norm(psi), haar_unitary(1 << (keep + n_in), rng))


def honest_superposition(rel: BindingRelation, keep: int = 0) -> Adversary:
    """Uniform superposition of ``|x>|f(x)>_+`` over ``W`` with ``U = I``."""
    f = rel.f
    t = np.zeros((1 << keep, 1 << f.n, 1 << f.out_bits), dtype=complex)
    for x in rel.domain:
        t[0, x, f.table[x]] = 1.0
    t /= np.linalg.norm(t)
    layout = adversary_layout(keep, f.n, f.out_bits)
    return Adversary(layout, t.reshape(-1), np.eye(1 << (keep + f.n)))


def honest_commit_adversary(f: FunctionFamilyInstance, x: int, keep: int = 0) -> Adversary:
    """Honest ``w = 0`` commitment to ``x`` with ``U = I``."""
    return honest_superposition(BindingRelation.of(f, [x]), keep)


def alternating_adversary(
    rel: BindingRelation,
    keep: int = 1,
    rounds: int = 8,
    seed: int | np.random.Generator | None = 0,
) -> Adversary:
    """Locally optimized ``b₀ + b₁`` by alternating two exact steps.

    With ``U'`` fixed, the best commit state is the top eigenvector of
    ``P₀ + U†P₁U``. With the state fixed, the fidelity-optimal ``U'`` towards
    the normalized ``P₁Uψ̃₀`` can only increase ``b₁``.
    """
    adv = uhlmann_adversary(rel, keep, seed)
    dc = 1 << rel.f.out_bits
    dim = adv.layout.dim
    for _ in range(rounds):
        u = adv.u_local

        def matvec(v, u=u):
            v = np.asarray(v, dtype=complex).reshape(-1)
            a = apply_binding_projector(rel, 0, v, keep)
            w = (u @ v.reshape(u.shape[0], -1)).reshape(-1)
            w = apply_binding_projector(rel, 1, w, keep)
            return a + (u.conj().T @ w.reshape(u.shape[0], -1)).reshape(-1)

        op = LinearOperator((dim, dim), matvec=matvec, dtype=complex)
        _, vecs = eigsh(op, k=1, which="LA", v0=adv.psi0)
        psi = vecs[:, 0] / np.linalg.norm(vecs[:, 0])
        target = apply_binding_projector(rel, 1, (u @ psi.reshape(u.shape[0], -1)).reshape(-1), keep)
        if np.linalg.norm(target) < 1e-12:
            adv = Adversary(adv.layout, psi, u)
            break
        adv = Adversary(adv.layout, psi, uhlmann_unitary(psi, target / np.linalg.norm(target), dc))
    return adv
