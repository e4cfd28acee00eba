import itertools
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from qbcommit.funcfam import entropy_buckets, make_family
from qbcommit.protocols import ProtocolParams, hiding_bound, hiding_report, p1_commit, p2_slot_hiding
from qbcommit.protocols.hiding import (
    coverage_enumerated,
    coverage_exact,
    coverage_lower_bound,
    input_distribution,
    lemma2_check,
    pair_density,
    tv_to_uniform,
)
from qbcommit.qcore import trace_distance


def mixed_commitment(f, params, w1, w2):
    """Average of honest commitment projectors over every x, h1 and h2."""
    fam1, fam2 = params.first_family(), params.second_family()
    rho = 0
    for x in range(1 << f.n):
        for a, b in itertools.product(range(fam1.size), range(fam2.size)):
            com, _ = p1_commit(
                f, params, w1, w2, rng=0, x=format(x, f"0{f.n}b"), h1=fam1.member(a), h2=fam2.member(b)
            )
            v = com.statevector().amplitudes
            rho = rho + np.outer(v, v.conj())
    return rho / ((1 << f.n) * fam1.size * fam2.size)


def test_base_permutation_is_perfectly_hiding():
    rep = hiding_report("base", make_family("permutation", 4, seed=0), condition="uniform")
    assert rep.max_pairwise <= 1e-10


def test_base_non_uniform_image_leaks():
    f = make_family("planted-heavy", 2, profile=[3, 1])
    assert hiding_report("base", f, condition="uniform").max_pairwise > 0.1


def test_p1_density_matches_brute_force_mixture():
    f = make_family("regular", 2, r=1, seed=0)
    params = ProtocolParams(2, 1)
    inputs = input_distribution(f, "uniform")
    for w1, w2 in itertools.product((0, 1), repeat=2):
        brute = mixed_commitment(f, params, w1, w2)
        assert trace_distance(brute, pair_density(f, params, w1, w2, inputs).matrix) < 1e-12


def test_p1_frozen_distances():
    f = make_family("regular", 2, r=1, seed=0)
    rep = hiding_report("p1", f, ProtocolParams(2, 1), "uniform")
    # frozen from mixed_commitment above
    for row in rep.rows:
        assert row.distance_to_uniform == pytest.approx(13 / 32, abs=1e-12)
    assert rep.max_pairwise == pytest.approx(0.58742713974898, abs=1e-11)
    assert rep.passed


def test_hiding_bound_formula():
    assert hiding_bound(ProtocolParams(4, 2, 2, 2)) == pytest.approx(1.0)
    assert hiding_bound(ProtocolParams(4, 2, 0, 0)) == pytest.approx(2.0)


@pytest.mark.parametrize("r", [1, 2, 3])
def test_p1_gamma_hiding_regular(r):
    f = make_family("regular", 4, r=r, seed=r)
    t0 = entropy_buckets(f).t0
    for d1 in range(0, min(t0, 3) + 1):
        for d2 in range(0, min(4 - t0, 3) + 1):
            rep = hiding_report("p1", f, ProtocolParams(4, t0, d1, d2), "gamma")
            assert rep.passed, (r, d1, d2)


def test_unknown_protocol():
    with pytest.raises(ValueError):
        hiding_report("p9", make_family("random", 2), ProtocolParams(2))


def test_p2_slot_hiding():
    f = make_family("regular", 3, r=1, seed=0)
    t0 = entropy_buckets(f).t0
    for res in p2_slot_hiding(f, ProtocolParams(3, t0, 1, 1, m=2)):
        assert res.passed


def test_p2_slot_hiding_budget():
    with pytest.raises(ValueError):
        p2_slot_hiding(make_family("random", 4), ProtocolParams(4, 2, m=3))


@settings(max_examples=30)
@given(st.integers(2, 4), st.integers(0, 2**32 - 1))
def test_block_diagonal_distance_bounded_by_worst_block(k, seed):
    rng = np.random.default_rng(seed)
    probs = rng.random(k)
    probs /= probs.sum()

    def density():
        a = rng.standard_normal((2, 2)) + 1j * rng.standard_normal((2, 2))
        m = a @ a.conj().T
        return m / np.trace(m).real

    sigma = density()
    blocks = [density() for _ in range(k)]
    total, worst = lemma2_check(probs, blocks, sigma)
    assert total <= worst + 1e-12


def test_tv_to_uniform():
    assert tv_to_uniform(np.full(4, 0.25)) == pytest.approx(0.0)
    assert tv_to_uniform(np.array([1.0, 0, 0, 0])) == pytest.approx(0.75)


@pytest.mark.parametrize("m", [1, 2, 3, 4])
def test_coverage_enumeration(m):
    f = make_family("planted-heavy", 3, profile=[4, 1, 1, 1, 1])
    b = entropy_buckets(f)
    assert coverage_enumerated(b.gamma, 3, m) == coverage_exact(b.gamma_measure, m)
    assert float(coverage_exact(b.gamma_measure, m)) >= coverage_lower_bound(float(b.gamma_measure), m)


def test_coverage_quarter():
    for m in range(1, 21):
        assert coverage_exact(Fraction(1, 4), m) == 1 - Fraction(3, 4) ** m
