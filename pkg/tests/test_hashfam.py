import itertools
import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from qbcommit.hashfam import (
    FULL_AFFINE,
    TOEPLITZ,
    EnumerationTooLarge,
    HashFamily,
    evaluate,
    from_wire,
    lhl_distance,
    lhl_output_length,
    pair_counts,
    to_wire,
)

KINDS = (TOEPLITZ, FULL_AFFINE)


def _naive_lhl(family, support):
    """Exact distance with Fractions, one member and one input at a time."""
    n_out = 1 << family.out_bits
    total = Fraction(0)
    for h in family:
        counts = [0] * n_out
        for x in support:
            counts[int(h(x), 2)] += 1
        total += sum(abs(Fraction(c, len(support)) - Fraction(1, n_out)) for c in counts)
    return total / 2 / family.size


def test_index_widths():
    assert HashFamily(4, 2, TOEPLITZ).index_bits == 4 + 2 * 2 - 1
    assert HashFamily(4, 2, FULL_AFFINE).index_bits == 4 * 2 + 2
    assert HashFamily(3, 0).index_bits == 0


def test_empty_output_family_has_one_member():
    fam = HashFamily(3, 0)
    assert fam.size == 1
    h = fam.sample(7)
    assert all(h(x) == "" for x in range(8))


def test_output_wider_than_input_rejected():
    with pytest.raises(ValueError):
        HashFamily(2, 3)


def test_sampling_is_deterministic():
    fam = HashFamily(2, 2)
    assert fam.sample(11) == fam.sample(11)


def test_zero_member_maps_to_zero():
    h = HashFamily(4, 3).member(0)
    assert {h(x) for x in range(16)} == {"000"}


def test_identity_toeplitz():
    # diagonal vector 010 puts ones on the main diagonal; offset 00
    h = HashFamily(2, 2, TOEPLITZ).member("01000")
    np.testing.assert_array_equal(h.matrix(), np.eye(2, dtype=np.uint8))
    assert h("10") == "10"


def test_offset_only_member():
    h = HashFamily(3, 2, TOEPLITZ).member("0000" + "11")
    assert h.offset() == "11"
    assert {h(x) for x in range(8)} == {"11"}


def test_width_mismatch():
    with pytest.raises(ValueError):
        evaluate(HashFamily(3, 1).member(0), "0101")


@given(st.integers(1, 6), st.data())
def test_toeplitz_matrices_are_constant_along_diagonals(l, data):
    v = data.draw(st.integers(1, l))
    fam = HashFamily(l, v, TOEPLITZ)
    m = fam.member(data.draw(st.integers(0, fam.size - 1))).matrix()
    for i in range(v - 1):
        for j in range(l - 1):
            assert m[i, j] == m[i + 1, j + 1]


@given(st.sampled_from(KINDS), st.integers(1, 6), st.data())
def test_evaluation_is_affine(kind, l, data):
    v = data.draw(st.integers(0, l))
    fam = HashFamily(l, v, kind)
    h = fam.member(data.draw(st.integers(0, fam.size - 1)))
    x = data.draw(st.integers(0, (1 << l) - 1))
    bits = np.array([int(c) for c in format(x, f"0{l}b")], dtype=np.uint8)
    expected = (h.matrix().astype(int) @ bits) % 2
    got = np.array([int(c) for c in h(x)], dtype=int)
    offset = np.array([int(c) for c in h.offset()], dtype=int)
    np.testing.assert_array_equal(got, expected ^ offset)


@given(st.sampled_from(KINDS), st.integers(1, 6), st.data())
def test_linearity_up_to_offset(kind, l, data):
    v = data.draw(st.integers(1, l))
    fam = HashFamily(l, v, kind)
    h = fam.member(data.draw(st.integers(0, fam.size - 1)))
    x, y = data.draw(st.integers(0, (1 << l) - 1)), data.draw(st.integers(0, (1 << l) - 1))
    b = int(h.offset(), 2)
    assert int(h(x ^ y), 2) ^ b == (int(h(x), 2) ^ b) ^ (int(h(y), 2) ^ b)


@pytest.mark.parametrize("kind", KINDS)
@pytest.mark.parametrize("l, v", [(l, v) for l in range(1, 5) for v in range(1, min(l, 3) + 1)])
def test_pairwise_independence_exhaustive(kind, l, v):
    fam = HashFamily(l, v, kind)
    expected = fam.size >> (2 * v)
    for x1, x2 in itertools.combinations(range(1 << l), 2):
        assert (pair_counts(fam, x1, x2) == expected).all()


def test_pair_frequency_example():
    fam = HashFamily(3, 2, TOEPLITZ)
    counts = pair_counts(fam, 1, 6)
    np.testing.assert_array_equal(counts / fam.size, np.full((4, 4), 2.0**-4))


@given(st.sampled_from(KINDS), st.integers(1, 8), st.data())
def test_wire_round_trip(kind, l, data):
    v = data.draw(st.integers(0, min(l, 4)))
    fam = HashFamily(l, v, kind)
    h = fam.member(data.draw(st.integers(0, fam.size - 1)))
    assert from_wire(to_wire(h)) == h


def test_wire_rejects_bad_payload():
    h = HashFamily(3, 2).member(5)
    wire = to_wire(h)
    with pytest.raises(ValueError):
        from_wire(wire + b"\x00")
    with pytest.raises(ValueError):
        from_wire(wire[:2])


def test_enumeration_limit():
    with pytest.raises(EnumerationTooLarge):
        lhl_distance(HashFamily(10, 5, FULL_AFFINE), np.full(1024, 1 / 1024))


def test_lhl_output_length():
    assert lhl_output_length(6, 0.5) == 4
    assert lhl_output_length(4, 0.25) == 0
    assert lhl_output_length(1, 0.25) == 0


def test_lhl_point_mass_is_far_from_uniform():
    dist = np.zeros(16)
    dist[3] = 1.0
    v = 2
    d = lhl_distance(HashFamily(4, v), dist)
    assert 0.5 - 2.0 ** (-v - 1) <= d <= 1.0


def test_lhl_uniform_source():
    d = lhl_distance(HashFamily(6, 4), np.full(64, 1 / 64))
    assert d <= 0.5


def test_lhl_flat_sixteen_element_source():
    dist = np.zeros(64)
    dist[:16] = 1 / 16
    d = lhl_distance(HashFamily(6, 2), dist)
    assert d == pytest.approx(9 / 128, abs=1e-12)  # frozen from _naive_lhl
    assert d <= 0.5


@pytest.mark.parametrize("kind", KINDS)
def test_vectorized_lhl_matches_naive_enumeration(kind):
    rng = np.random.default_rng(5)
    support = sorted(int(x) for x in rng.choice(16, size=4, replace=False))
    fam = HashFamily(4, 1, kind)
    dist = np.zeros(16)
    dist[support] = 0.25
    assert lhl_distance(fam, dist) == pytest.approx(float(_naive_lhl(fam, support)), abs=1e-12)


@settings(max_examples=40, deadline=None)
@given(st.integers(2, 6), st.data())
def test_leftover_hash_bound_on_random_sources(l, data):
    lam = data.draw(st.integers(0, l))
    eps = data.draw(st.sampled_from([1.0, 0.5, 0.25]))
    if lam - 2 * math.log2(1 / eps) < 0:
        return
    v = lhl_output_length(lam, eps)
    rng = np.random.default_rng(data.draw(st.integers(0, 2**32 - 1)))
    # any distribution with max probability 2^-lam
    size = 1 << l
    p = rng.random(size)
    p = np.minimum(p / p.sum(), 2.0**-lam)
    while p.sum() < 1 - 1e-12:
        room = 2.0**-lam - p
        p = p + room * min(1.0, (1 - p.sum()) / room.sum())
    assert lhl_distance(HashFamily(l, v, TOEPLITZ), p / p.sum()) <= eps + 1e-9
