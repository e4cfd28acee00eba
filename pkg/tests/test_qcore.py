import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from qbcommit.qcore import (
    MAX_QUBITS,
    Basis,
    DensityOperator,
    Projector,
    QuantumRegisterState,
    QubitBudgetError,
    RegisterLayout,
    apply_projector,
    basis_family,
    encode_basis,
    hadamard_matrix,
    haar_unitary,
    measure_projective,
    partial_trace,
    projector_product_norm,
    projector_sum_max_eig,
    segment_distribution,
    theta,
    trace_distance,
    unitary_from_state,
    is_unitary,
)

R = 1 / math.sqrt(2)


def test_theta_maps_bits_to_bases():
    assert theta(0) is Basis.PLUS
    assert theta(1) is Basis.TIMES


# ------------------------------------------------------------------ layouts


def test_layout_offsets_and_total():
    lay = RegisterLayout.of(("keep", 1), ("open", 2), ("commit", 3))
    assert lay.q_total == 6
    assert lay.qubits("open") == (1, 2)
    assert lay.qubits("commit") == (3, 4, 5)
    assert RegisterLayout.from_json(lay.to_json()) == lay


def test_layout_rejects_duplicate_names():
    with pytest.raises(ValueError):
        RegisterLayout.of(("a", 1), ("a", 2))


def test_budget_is_enforced():
    with pytest.raises(QubitBudgetError):
        QuantumRegisterState(RegisterLayout.of(("commit", MAX_QUBITS + 1)), np.zeros(1))


# ----------------------------------------------------------------- encoding


def test_encode_one_in_times_basis():
    s = encode_basis("1", Basis.TIMES)
    np.testing.assert_allclose(s.amplitudes, [R, -R], atol=1e-15)


def test_encode_zeros_in_plus_basis():
    np.testing.assert_allclose(encode_basis("00", Basis.PLUS).amplitudes, [1, 0, 0, 0])


def test_encode_two_qubits_times_basis():
    # (|0>-|1>)(|0>+|1>)/2 expanded by hand
    np.testing.assert_allclose(
        encode_basis("10", Basis.TIMES).amplitudes, [0.5, 0.5, -0.5, -0.5], atol=1e-15
    )


@given(st.text("01", min_size=1, max_size=6))
def test_times_encoding_is_hadamard_of_plus_encoding(bits):
    q = len(bits)
    plus = encode_basis(bits, Basis.PLUS).amplitudes
    times = encode_basis(bits, Basis.TIMES).amplitudes
    np.testing.assert_allclose(times, hadamard_matrix(q) @ plus, atol=1e-12)


def test_state_json_round_trip():
    s = encode_basis("101", [Basis.PLUS, Basis.TIMES, Basis.TIMES])
    back = QuantumRegisterState.from_json(s.to_json())
    assert back.allclose(s)
    assert back.norm2 == pytest.approx(1.0)


def test_state_rejects_inconsistent_norm():
    with pytest.raises(ValueError):
        QuantumRegisterState(RegisterLayout.of(("commit", 1)), np.array([1, 0]), norm2=0.5)


# --------------------------------------------------------------- projectors


@pytest.mark.parametrize(
    "bits, label, basis, expected",
    [
        ("0", "0", Basis.PLUS, 1.0),
        ("0", "0", Basis.TIMES, 0.5),
    ],
)
def test_apply_projector_norms(bits, label, basis, expected):
    out = apply_projector(encode_basis(bits, Basis.PLUS), Projector.basis_states(label, basis))
    assert out.norm2 == pytest.approx(expected, abs=1e-12)


def test_projector_on_plus_state():
    plus = encode_basis("0", Basis.TIMES)
    out = apply_projector(plus, Projector.basis_states("1", Basis.PLUS))
    assert out.norm2 == pytest.approx(0.5, abs=1e-12)


def test_projector_leaves_eigenstate_unchanged():
    s = encode_basis("0", Basis.PLUS)
    assert apply_projector(s, Projector.basis_states("0", Basis.PLUS)).allclose(s)


def test_projector_width_mismatch():
    with pytest.raises(ValueError):
        apply_projector(encode_basis("00", Basis.PLUS), Projector.basis_states("0", Basis.PLUS))


def test_matrix_projector_must_be_idempotent():
    with pytest.raises(ValueError):
        Projector.from_matrix(np.array([[1.0, 1.0], [1.0, 1.0]]))


@given(st.integers(1, 4), st.integers(0, 2**32 - 1))
def test_masked_projector_matches_dense(q, seed):
    rng = np.random.default_rng(seed)
    labels = [format(int(i), f"0{q}b") for i in rng.choice(1 << q, size=rng.integers(1, 1 << q) , replace=False)]
    bases = [Basis.TIMES if b else Basis.PLUS for b in rng.integers(0, 2, size=q)]
    p = Projector.basis_states(labels, bases)
    psi = rng.standard_normal(1 << q) + 1j * rng.standard_normal(1 << q)
    lay = RegisterLayout.of(("commit", q))
    np.testing.assert_allclose(p.apply_vector(psi, lay), p.dense() @ psi, atol=1e-12)


# -------------------------------------------------------------- measurement


def test_measure_in_encoding_basis_is_certain():
    res = measure_projective(encode_basis("0", Basis.PLUS), basis_family(1, Basis.PLUS), seed=1)
    assert res.outcome == "0"
    assert res.probabilities["0"] == pytest.approx(1.0)


def test_measure_in_conjugate_basis_is_fair():
    res = measure_projective(encode_basis("0", Basis.PLUS), basis_family(1, Basis.TIMES), seed=1)
    assert res.probabilities["0"] == pytest.approx(0.5)
    assert res.probabilities["1"] == pytest.approx(0.5)


def test_measure_two_qubits_times():
    res = measure_projective(encode_basis("10", Basis.TIMES), basis_family(2, Basis.TIMES), seed=3)
    assert res.outcome == "10"
    assert res.probabilities["10"] == pytest.approx(1.0)


def test_measurement_is_reproducible_from_seed():
    s = encode_basis("000", Basis.TIMES)
    fam = basis_family(3, Basis.PLUS)
    assert measure_projective(s, fam, seed=9).outcome == measure_projective(s, fam, seed=9).outcome


def test_forced_zero_probability_outcome_rejected():
    with pytest.raises(ValueError):
        measure_projective(encode_basis("0", Basis.PLUS), basis_family(1, Basis.PLUS), force="1")


def test_incomplete_family_rejected():
    fam = basis_family(2, Basis.PLUS)
    del fam["11"]
    with pytest.raises(ValueError):
        measure_projective(encode_basis("00", Basis.PLUS), fam)


def test_post_state_is_renormalized():
    res = measure_projective(encode_basis("0", Basis.PLUS), basis_family(1, Basis.TIMES), force="1")
    assert res.post_state.norm2 == pytest.approx(1.0)
    np.testing.assert_allclose(res.post_state.amplitudes, [R, -R], atol=1e-12)


@given(st.integers(0, 2**32 - 1))
def test_segment_distribution_sums_to_one(seed):
    rng = np.random.default_rng(seed)
    lay = RegisterLayout.of(("a", 2), ("b", 2))
    psi = rng.standard_normal(16) + 1j * rng.standard_normal(16)
    s = QuantumRegisterState(lay, psi / np.linalg.norm(psi))
    for basis in (Basis.PLUS, Basis.TIMES):
        assert segment_distribution(s, "b", basis).sum() == pytest.approx(1.0)


# -------------------------------------------------------------- densities


def test_partial_trace_of_product_state():
    psi = encode_basis("1", Basis.TIMES, RegisterLayout.of(("a", 1)))
    phi = encode_basis("0", Basis.PLUS, RegisterLayout.of(("b", 1)))
    rho = partial_trace(psi.tensor(phi), ["a"])
    np.testing.assert_allclose(rho.matrix, np.outer(psi.amplitudes, psi.amplitudes.conj()), atol=1e-12)


def test_partial_trace_of_bell_state_is_maximally_mixed():
    bell = QuantumRegisterState(RegisterLayout.of(("a", 1), ("b", 1)), np.array([R, 0, 0, R]))
    rho = partial_trace(bell, ["a"])
    np.testing.assert_allclose(rho.eigenvalues(), [0.5, 0.5], atol=1e-12)


def test_partial_trace_keeping_everything_is_rank_one():
    s = encode_basis("01", Basis.TIMES, RegisterLayout.of(("a", 1), ("b", 1)))
    rho = partial_trace(s, ["a", "b"])
    assert np.linalg.matrix_rank(rho.matrix, tol=1e-10) == 1


def test_partial_trace_unknown_segment():
    with pytest.raises(KeyError):
        partial_trace(encode_basis("0", Basis.PLUS), ["nope"])


def test_density_rejects_non_psd():
    with pytest.raises(ValueError):
        DensityOperator(np.diag([1.5, -0.5]))


def test_trace_distance_examples():
    zero = np.diag([1.0, 0.0])
    one = np.diag([0.0, 1.0])
    plus = np.full((2, 2), 0.5)
    assert trace_distance(zero, zero) == pytest.approx(0.0, abs=1e-15)
    assert trace_distance(zero, one) == pytest.approx(1.0)
    assert trace_distance(zero, plus) == pytest.approx(R, abs=1e-12)


def test_trace_distance_dimension_mismatch():
    with pytest.raises(ValueError):
        trace_distance(np.eye(2) / 2, np.eye(4) / 4)


def _random_density(rng, d):
    a = rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))
    m = a @ a.conj().T
    return m / np.trace(m).real


@settings(max_examples=50)
@given(st.integers(0, 2**32 - 1))
def test_trace_distance_is_a_metric(seed):
    rng = np.random.default_rng(seed)
    a, b, c = (_random_density(rng, 4) for _ in range(3))
    dab = trace_distance(a, b)
    assert 0 <= dab <= 1
    assert dab == pytest.approx(trace_distance(b, a), abs=1e-12)
    assert dab <= trace_distance(a, c) + trace_distance(c, b) + 1e-12


@given(st.lists(st.floats(0.01, 1.0), min_size=4, max_size=4), st.lists(st.floats(0.01, 1.0), min_size=4, max_size=4))
def test_diagonal_trace_distance_is_variation_distance(p, q):
    p, q = np.array(p) / sum(p), np.array(q) / sum(q)
    assert trace_distance(np.diag(p), np.diag(q)) == pytest.approx(0.5 * np.abs(p - q).sum(), abs=1e-12)


# ----------------------------------------------------------------- spectra


def test_projector_sum_equal_projectors():
    p = Projector.basis_states("01", Basis.PLUS)
    assert projector_sum_max_eig(p, p) == pytest.approx(2.0)


def test_projector_sum_orthogonal_ranges():
    assert projector_sum_max_eig(
        Projector.basis_states("0", Basis.PLUS), Projector.basis_states("1", Basis.PLUS)
    ) == pytest.approx(1.0)


def test_projector_sum_conjugate_pair():
    p0 = Projector.basis_states("00", Basis.PLUS)
    p1 = Projector.basis_states("00", Basis.TIMES)
    assert projector_sum_max_eig(p0, p1) == pytest.approx(1.5)
    assert 1 + projector_product_norm(p0, p1) == pytest.approx(1.5)


def test_projector_sum_rejects_non_projector():
    with pytest.raises(ValueError):
        projector_sum_max_eig(np.eye(2) * 2, np.eye(2))


# ---------------------------------------------------------------- unitaries


@given(st.integers(0, 2**32 - 1), st.integers(1, 16))
def test_unitary_from_state_maps_zero_to_state(seed, d):
    rng = np.random.default_rng(seed)
    psi = rng.standard_normal(d) + 1j * rng.standard_normal(d)
    psi /= np.linalg.norm(psi)
    u = unitary_from_state(psi)
    assert is_unitary(u)
    np.testing.assert_allclose(u[:, 0], psi, atol=1e-12)


def test_haar_unitary_is_unitary():
    assert is_unitary(haar_unitary(8, np.random.default_rng(0)))
