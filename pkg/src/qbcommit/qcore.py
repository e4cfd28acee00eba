"""Exact dense statevector engine.

Amplitudes are stored big-endian over the layout's segment order, leftmost
qubit most significant. Sub-normalized states are allowed and carry their
squared norm explicitly; nothing is renormalized behind the caller's back.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from enum import Enum
from typing import Iterable, Mapping, Sequence, Union

import numpy as np

from .bits import BitLike, as_bits, from_int, to_int

MAX_QUBITS = 24
NORM_TOL = 1e-9
HERMITIAN_TOL = 1e-10

_H1 = np.array([[1.0, 1.0], [1.0, -1.0]]) / np.sqrt(2.0)


class QubitBudgetError(ValueError):
    pass


class Basis(Enum):
    PLUS = "+"
    TIMES = "x"

    @classmethod
    def of(cls, value: "Basis | str | int") -> "Basis":
        if isinstance(value, Basis):
            return value
        if value in (0, "0", "+", "plus"):
            return cls.PLUS
        if value in (1, "1", "x", "times", "×"):
            return cls.TIMES
        raise ValueError(f"unknown basis {value!r}")


def theta(w: int) -> Basis:
    """Basis selected by a committed bit: 0 -> computational, 1 -> diagonal."""
    if w not in (0, 1):
        raise ValueError(f"theta is defined on bits, got {w!r}")
    return Basis.PLUS if w == 0 else Basis.TIMES


BasisSpec = Union[Basis, str, int, Sequence[Union[Basis, str, int]]]


def _bases(spec: BasisSpec, width: int) -> tuple[Basis, ...]:
    if isinstance(spec, (Basis, str, int)) and not (isinstance(spec, str) and len(spec) > 1):
        return (Basis.of(spec),) * width
    out = tuple(Basis.of(b) for b in spec)
    if len(out) != width:
        raise ValueError(f"{len(out)} bases given for {width} qubits")
    return out


# --------------------------------------------------------------------- layout


@dataclass(frozen=True)
class Segment:
    name: str
    width: int


@dataclass(frozen=True)
class RegisterLayout:
    """Ordered named qubit segments (e.g. keep, open, commit, inv)."""

    segments: tuple[Segment, ...]

    def __post_init__(self):
        names = [s.name for s in self.segments]
        if len(set(names)) != len(names):
            raise ValueError(f"segment names must be unique: {names}")
        for s in self.segments:
            if s.width < 0:
                raise ValueError(f"segment {s.name!r} has negative width")

    @classmethod
    def of(cls, *pairs: tuple[str, int], **widths: int) -> "RegisterLayout":
        items = list(pairs) + list(widths.items())
        return cls(tuple(Segment(n, int(w)) for n, w in items))

    @property
    def q_total(self) -> int:
        return sum(s.width for s in self.segments)

    @property
    def dim(self) -> int:
        return 1 << self.q_total

    @property
    def names(self) -> tuple[str, ...]:
        return tuple(s.name for s in self.segments)

    def width(self, name: str) -> int:
        return self.segments[self._index(name)].width

    def offset(self, name: str) -> int:
        i = self._index(name)
        return sum(s.width for s in self.segments[:i])

    def qubits(self, name: str) -> tuple[int, ...]:
        off = self.offset(name)
        return tuple(range(off, off + self.width(name)))

    def _index(self, name: str) -> int:
        for i, s in enumerate(self.segments):
            if s.name == name:
                return i
        raise KeyError(f"unknown segment {name!r}; layout has {self.names}")

    def __contains__(self, name: str) -> bool:
        return name in self.names

    def concat(self, other: "RegisterLayout") -> "RegisterLayout":
        return RegisterLayout(self.segments + other.segments)

    def sub(self, names: Iterable[str]) -> "RegisterLayout":
        return RegisterLayout(tuple(self.segments[self._index(n)] for n in names))

    def to_json(self) -> list[dict]:
        return [{"name": s.name, "width": s.width} for s in self.segments]

    @classmethod
    def from_json(cls, data: Sequence[Mapping]) -> "RegisterLayout":
        return cls(tuple(Segment(str(d["name"]), int(d["width"])) for d in data))


def check_budget(q: int) -> None:
    if q > MAX_QUBITS:
        raise QubitBudgetError(f"{q} qubits exceeds the budget of {MAX_QUBITS}")


# ---------------------------------------------------------------------- state


@dataclass(frozen=True, eq=False)
class QuantumRegisterState:
    layout: RegisterLayout
    amplitudes: np.ndarray
    norm2: float = field(default=None)  # type: ignore[assignment]

    def __post_init__(self):
        check_budget(self.layout.q_total)
        amps = np.array(self.amplitudes, dtype=complex).reshape(-1)
        if amps.size != self.layout.dim:
            raise ValueError(
                f"{amps.size} amplitudes for a {self.layout.q_total}-qubit layout"
            )
        amps.setflags(write=False)
        object.__setattr__(self, "amplitudes", amps)
        actual = float(np.vdot(amps, amps).real)
        if self.norm2 is None:
            object.__setattr__(self, "norm2", actual)
        elif abs(actual - self.norm2) > NORM_TOL:
            raise ValueError(f"declared norm2 {self.norm2} but amplitudes give {actual}")

    @property
    def q_total(self) -> int:
        return self.layout.q_total

    def tensor(self, other: "QuantumRegisterState") -> "QuantumRegisterState":
        return QuantumRegisterState(
            self.layout.concat(other.layout),
            np.kron(self.amplitudes, other.amplitudes),
        )

    def normalized(self) -> "QuantumRegisterState":
        if self.norm2 <= 0:
            raise ValueError("cannot normalize the zero vector")
        return QuantumRegisterState(self.layout, self.amplitudes / np.sqrt(self.norm2))

    def allclose(self, other: "QuantumRegisterState", atol: float = 1e-10) -> bool:
        return self.layout == other.layout and np.allclose(
            self.amplitudes, other.amplitudes, atol=atol, rtol=0
        )

    def to_json(self) -> dict:
        return {
            "layout": self.layout.to_json(),
            "norm2": self.norm2,
            "amplitudes": [[float(a.real), float(a.imag)] for a in self.amplitudes],
        }

    @classmethod
    def from_json(cls, data: Mapping | str) -> "QuantumRegisterState":
        if isinstance(data, str):
            data = json.loads(data)
        amps = np.array([complex(re, im) for re, im in data["amplitudes"]])
        return cls(RegisterLayout.from_json(data["layout"]), amps, float(data["norm2"]))


def basis_vector(index: int, q: int) -> np.ndarray:
    v = np.zeros(1 << q, dtype=complex)
    v[index] = 1.0
    return v


def encode_basis(
    bits: BitLike,
    basis: BasisSpec,
    layout: RegisterLayout | None = None,
) -> QuantumRegisterState:
    """Product state ``|b_1>_basis ⊗ ... ⊗ |b_q>_basis``.

    ``basis`` may be a single basis or one basis per qubit.
    """
    bits = as_bits(bits)
    if layout is None:
        layout = RegisterLayout.of(("commit", len(bits)))
    if layout.q_total != len(bits):
        raise ValueError(f"{len(bits)} bits for a {layout.q_total}-qubit layout")
    check_budget(len(bits))
    bases = _bases(basis, len(bits))
    vec = basis_vector(to_int(bits), len(bits))
    diag = [i for i, b in enumerate(bases) if b is Basis.TIMES]
    vec = hadamard(vec, len(bits), diag)
    return QuantumRegisterState(layout, vec, 1.0)


# ------------------------------------------------------------- tensor helpers


def apply_1q(vec: np.ndarray, q: int, qubit: int, mat: np.ndarray) -> np.ndarray:
    t = vec.reshape((1 << qubit, 2, 1 << (q - qubit - 1)))
    return np.einsum("ab,ibj->iaj", mat, t).reshape(-1)


def hadamard(vec: np.ndarray, q: int, qubits: Iterable[int]) -> np.ndarray:
    """Apply H to each listed qubit of a length-2^q vector (returns a new array)."""
    out = np.asarray(vec, dtype=complex)
    for k in qubits:
        out = apply_1q(out, q, k, _H1)
    return out


def hadamard_matrix(q: int) -> np.ndarray:
    m = np.ones((1, 1))
    for _ in range(q):
        m = np.kron(m, _H1)
    return m


def _move_front(vec: np.ndarray, q: int, qubits: Sequence[int]) -> tuple[np.ndarray, list[int]]:
    t = vec.reshape((2,) * q) if q else vec.reshape(())
    rest = [k for k in range(q) if k not in qubits]
    order = list(qubits) + rest
    return np.transpose(t, order).reshape(1 << len(qubits), -1), order


def _move_back(mat: np.ndarray, q: int, order: list[int]) -> np.ndarray:
    t = mat.reshape((2,) * q) if q else mat.reshape(())
    return np.transpose(t, np.argsort(order)).reshape(-1)


def apply_unitary(vec: np.ndarray, q: int, qubits: Sequence[int], mat: np.ndarray) -> np.ndarray:
    """Apply a dense operator to the listed qubits (listed order is big-endian)."""
    front, order = _move_front(np.asarray(vec, dtype=complex), q, qubits)
    return _move_back(mat @ front, q, order)


# ----------------------------------------------------------------- projectors


@dataclass(frozen=True, eq=False)
class Projector:
    """Projector on one segment (or the whole register when ``segment`` is None).

    Either ``labels`` + ``bases`` (sum of basis-state projectors) or an explicit
    ``matrix`` on the target qubits.
    """

    width: int
    labels: frozenset[str] | None = None
    bases: tuple[Basis, ...] | None = None
    matrix: np.ndarray | None = None
    segment: str | None = None

    def __post_init__(self):
        if (self.labels is None) == (self.matrix is None):
            raise ValueError("give exactly one of labels or matrix")
        if self.labels is not None:
            object.__setattr__(
                self, "labels", frozenset(as_bits(l, self.width) for l in self.labels)
            )
            object.__setattr__(self, "bases", _bases(self.bases or Basis.PLUS, self.width))
        else:
            m = np.array(self.matrix, dtype=complex)
            if m.shape != (1 << self.width, 1 << self.width):
                raise ValueError("projector matrix has the wrong shape")
            if not np.allclose(m, m.conj().T, atol=HERMITIAN_TOL):
                raise ValueError("projector matrix is not Hermitian")
            if not np.allclose(m @ m, m, atol=HERMITIAN_TOL):
                raise ValueError("projector matrix is not idempotent")
            m.setflags(write=False)
            object.__setattr__(self, "matrix", m)

    @classmethod
    def basis_states(
        cls, labels: Iterable[BitLike] | BitLike, basis: BasisSpec, segment: str | None = None
    ) -> "Projector":
        if isinstance(labels, str):
            labels = [labels]
        labels = [as_bits(l) for l in labels]
        if not labels:
            raise ValueError("use Projector.zero for an empty label set")
        return cls(len(labels[0]), frozenset(labels), _bases(basis, len(labels[0])), segment=segment)

    @classmethod
    def zero(cls, width: int, segment: str | None = None) -> "Projector":
        return cls(width, frozenset(), (Basis.PLUS,) * width, segment=segment)

    @classmethod
    def from_matrix(cls, matrix: np.ndarray, segment: str | None = None) -> "Projector":
        width = int(np.log2(len(matrix)))
        return cls(width, matrix=np.asarray(matrix), segment=segment)

    def dense(self) -> np.ndarray:
        if self.matrix is not None:
            return np.array(self.matrix)
        d = 1 << self.width
        diag = np.zeros(d)
        for l in self.labels:
            diag[to_int(l)] = 1.0
        b = _basis_change(self.bases)
        return b @ np.diag(diag) @ b.conj().T

    def _targets(self, layout: RegisterLayout) -> tuple[int, ...]:
        qubits = layout.qubits(self.segment) if self.segment else tuple(range(layout.q_total))
        if len(qubits) != self.width:
            raise ValueError(
                f"projector of width {self.width} on a target of {len(qubits)} qubits"
            )
        return qubits

    def apply_vector(self, vec: np.ndarray, layout: RegisterLayout) -> np.ndarray:
        q = layout.q_total
        qubits = self._targets(layout)
        if self.matrix is not None:
            return apply_unitary(vec, q, qubits, self.matrix)
        diag = [qubits[i] for i, b in enumerate(self.bases) if b is Basis.TIMES]
        v = hadamard(vec, q, diag)
        front, order = _move_front(v, q, qubits)
        mask = np.zeros(1 << self.width, dtype=bool)
        for l in self.labels:
            mask[to_int(l)] = True
        front = np.where(mask[:, None], front, 0)
        return hadamard(_move_back(front, q, order), q, diag)


def _basis_change(bases: Sequence[Basis]) -> np.ndarray:
    m = np.ones((1, 1))
    for b in bases:
        m = np.kron(m, _H1 if b is Basis.TIMES else np.eye(2))
    return m


def apply_projector(state: QuantumRegisterState, proj: Projector) -> QuantumRegisterState:
    """Return ``Π|ψ>`` unrenormalized; its ``norm2`` is ``<ψ|Π|ψ>``."""
    return QuantumRegisterState(state.layout, proj.apply_vector(state.amplitudes, state.layout))


def basis_family(width: int, basis: BasisSpec, segment: str | None = None) -> dict[str, Projector]:
    """Complete von Neumann family ``{P^x_basis}`` over ``width`` qubits."""
    bases = _bases(basis, width)
    return {
        from_int(i, width): Projector(width, frozenset([from_int(i, width)]), bases, segment=segment)
        for i in range(1 << width)
    }


def check_complete(family: Mapping[str, Projector], layout: RegisterLayout) -> None:
    members = list(family.values())
    if not members:
        raise ValueError("empty measurement family")
    first = members[0]
    same_frame = all(
        p.labels is not None and p.segment == first.segment and p.bases == first.bases
        for p in members
    )
    if same_frame:
        seen: set[str] = set()
        for p in members:
            if seen & p.labels:
                raise ValueError("measurement family members overlap")
            seen |= p.labels
        if len(seen) != 1 << first.width:
            raise ValueError("measurement family is incomplete")
        return
    if any(p.segment != first.segment or p.width != first.width for p in members):
        raise ValueError("family members must target the same qubits")
    total = sum(p.dense() for p in members)
    if not np.allclose(total, np.eye(1 << first.width), atol=NORM_TOL):
        raise ValueError("measurement family does not sum to the identity")


@dataclass(frozen=True, eq=False)
class MeasurementResult:
    outcome: str
    post_state: QuantumRegisterState
    probabilities: dict[str, float]


def measure_projective(
    state: QuantumRegisterState,
    family: Mapping[str, Projector],
    seed: int | np.random.Generator | None = None,
    force: str | None = None,
) -> MeasurementResult:
    """Projective measurement with an exact probability table.

    The outcome is sampled from ``seed`` unless ``force`` names one; the
    post-measurement state is renormalized.
    """
    check_complete(family, state.layout)
    if state.norm2 <= 0:
        raise ValueError("cannot measure the zero vector")
    projected = {k: p.apply_vector(state.amplitudes, state.layout) for k, p in family.items()}
    probs = {k: float(np.vdot(v, v).real) / state.norm2 for k, v in projected.items()}
    labels = list(family)
    if force is not None:
        if probs.get(force, 0.0) <= 0.0:
            raise ValueError(f"outcome {force!r} has zero probability")
        outcome = force
    else:
        rng = np.random.default_rng(seed)
        p = np.clip(np.array([probs[k] for k in labels]), 0, None)
        outcome = labels[int(rng.choice(len(labels), p=p / p.sum()))]
    post = projected[outcome] / np.sqrt(probs[outcome] * state.norm2)
    return MeasurementResult(outcome, QuantumRegisterState(state.layout, post), probs)


def segment_distribution(state: QuantumRegisterState, segment: str, basis: BasisSpec) -> np.ndarray:
    """Outcome probabilities for measuring one segment in ``basis`` (length 2^width)."""
    layout = state.layout
    qubits = layout.qubits(segment)
    bases = _bases(basis, len(qubits))
    diag = [qubits[i] for i, b in enumerate(bases) if b is Basis.TIMES]
    v = hadamard(state.amplitudes, layout.q_total, diag)
    front, _ = _move_front(v, layout.q_total, qubits)
    return (np.abs(front) ** 2).sum(axis=1) / state.norm2


# ------------------------------------------------------------------ densities


@dataclass(frozen=True, eq=False)
class DensityOperator:
    matrix: np.ndarray
    layout: RegisterLayout | None = None

    def __post_init__(self):
        m = np.array(self.matrix, dtype=complex)
        if m.ndim != 2 or m.shape[0] != m.shape[1]:
            raise ValueError("density matrix must be square")
        if self.layout is not None and self.layout.dim != m.shape[0]:
            raise ValueError("layout does not match the density dimension")
        if not np.allclose(m, m.conj().T, atol=HERMITIAN_TOL):
            raise ValueError("density matrix is not Hermitian")
        m = (m + m.conj().T) / 2
        if abs(np.trace(m).real - 1.0) > HERMITIAN_TOL:
            raise ValueError(f"density trace is {np.trace(m).real}, not 1")
        if np.linalg.eigvalsh(m)[0] < -HERMITIAN_TOL:
            raise ValueError("density matrix is not positive semidefinite")
        m.setflags(write=False)
        object.__setattr__(self, "matrix", m)

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    @classmethod
    def from_state(cls, state: QuantumRegisterState) -> "DensityOperator":
        v = state.amplitudes / np.sqrt(state.norm2)
        return cls(np.outer(v, v.conj()), state.layout)

    @classmethod
    def diagonal(cls, probs: Sequence[float], layout: RegisterLayout | None = None) -> "DensityOperator":
        return cls(np.diag(np.asarray(probs, dtype=float)), layout)

    def eigenvalues(self) -> np.ndarray:
        return np.linalg.eigvalsh(self.matrix)


def partial_trace(
    obj: QuantumRegisterState | DensityOperator, keep: Sequence[str]
) -> DensityOperator:
    """Reduced density on the ``keep`` segments (in layout order of ``keep``)."""
    layout = obj.layout
    if layout is None:
        raise ValueError("partial trace needs a layout")
    for name in keep:
        layout.width(name)
    kept_q = [k for name in keep for k in layout.qubits(name)]
    q = layout.q_total
    dk = 1 << len(kept_q)
    if isinstance(obj, QuantumRegisterState):
        front, _ = _move_front(obj.amplitudes, q, kept_q)
        rho = front @ front.conj().T / obj.norm2
    else:
        rest = [k for k in range(q) if k not in kept_q]
        t = obj.matrix.reshape((2,) * (2 * q))
        order = kept_q + rest
        t = np.transpose(t, order + [q + k for k in order])
        t = t.reshape(dk, (1 << q) // dk, dk, (1 << q) // dk)
        rho = np.einsum("ajbj->ab", t)
    return DensityOperator(rho, layout.sub(keep))


def _as_matrix(x: DensityOperator | np.ndarray) -> np.ndarray:
    return x.matrix if isinstance(x, DensityOperator) else np.asarray(x)


def trace_norm_half(a: np.ndarray) -> float:
    """½ Σ|λ| of a Hermitian matrix (symmetrized before diagonalization)."""
    a = np.asarray(a)
    a = (a + a.conj().T) / 2
    return 0.5 * float(np.abs(np.linalg.eigvalsh(a)).sum())


def trace_distance(rho: DensityOperator | np.ndarray, sigma: DensityOperator | np.ndarray) -> float:
    r, s = _as_matrix(rho), _as_matrix(sigma)
    if r.shape != s.shape:
        raise ValueError(f"dimension mismatch: {r.shape} vs {s.shape}")
    return min(1.0, max(0.0, trace_norm_half(r - s)))


def _projector_matrix(p: Projector | np.ndarray) -> np.ndarray:
    m = p.dense() if isinstance(p, Projector) else np.asarray(p, dtype=complex)
    if not np.allclose(m, m.conj().T, atol=HERMITIAN_TOL) or not np.allclose(
        m @ m, m, atol=HERMITIAN_TOL
    ):
        raise ValueError("input is not an orthogonal projector")
    return m


def projector_sum_max_eig(p0: Projector | np.ndarray, p1: Projector | np.ndarray) -> float:
    """Largest eigenvalue of Π₀ + Π₁ (upper bound on b₀ + b₁ for any state)."""
    a, b = _projector_matrix(p0), _projector_matrix(p1)
    if a.shape != b.shape:
        raise ValueError("projectors act on different dimensions")
    return float(np.linalg.eigvalsh((a + b + (a + b).conj().T) / 2)[-1])


def projector_product_norm(p0: Projector | np.ndarray, p1: Projector | np.ndarray) -> float:
    """Operator norm ‖Π₀Π₁‖ (largest singular value)."""
    a, b = _projector_matrix(p0), _projector_matrix(p1)
    return float(np.linalg.norm(a @ b, 2))


def haar_unitary(dim: int, rng: np.random.Generator) -> np.ndarray:
    z = (rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))) / np.sqrt(2)
    q, r = np.linalg.qr(z)
    d = np.diag(r)
    return q * (d / np.abs(d))


def unitary_from_state(psi: np.ndarray) -> np.ndarray:
    """A unitary whose first column is the unit vector ``psi`` (Householder)."""
    psi = np.asarray(psi, dtype=complex)
    psi = psi / np.linalg.norm(psi)
    phase = psi[0] / abs(psi[0]) if abs(psi[0]) > 1e-15 else 1.0
    e0 = np.zeros_like(psi)
    e0[0] = phase
    w = psi - e0
    nw = np.vdot(w, w).real
    if nw < 1e-30:
        refl = np.eye(len(psi), dtype=complex)
    else:
        refl = np.eye(len(psi), dtype=complex) - 2.0 * np.outer(w, w.conj()) / nw
    return refl * phase


def is_unitary(m: np.ndarray, atol: float = 1e-10) -> bool:
    m = np.asarray(m)
    return m.shape[0] == m.shape[1] and np.allclose(m.conj().T @ m, np.eye(len(m)), atol=atol)
