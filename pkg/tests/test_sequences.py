import json
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from orlicz_interp.functions import conjugate, phi1, power
from orlicz_interp.sequences import (
    FiniteSequence,
    dual_norm_oracle,
    luxemburg_norm,
    modular,
)

finite_complex = st.complex_numbers(
    min_magnitude=1e-3, max_magnitude=1e3,
    allow_nan=False, allow_infinity=False)

small_vectors = st.lists(finite_complex, min_size=1, max_size=10)


# -- FiniteSequence structure --------------------------------------------------


def test_zero_entries_are_dropped():
    x = FiniteSequence({1: 0.0, 2: 1.0, 3: 0.0})
    assert x.support_size == 1
    assert x.indices() == [2]


def test_rejects_bad_indices_and_values():
    with pytest.raises(ValueError):
        FiniteSequence({0: 1.0})
    with pytest.raises(ValueError):
        FiniteSequence({2: complex(float("nan"), 0)})


def test_flat_vector_is_l2_unit():
    for n in [1, 4, 1000]:
        assert FiniteSequence.flat(n).lp_norm(2) == pytest.approx(1.0, abs=1e-14)


def test_serialization_round_trip():
    x = FiniteSequence({3: 1 + 2j, 7: -0.25})
    y = FiniteSequence.from_json(x.to_json())
    assert x == y
    assert json.loads(x.to_json()) == [[3, 1.0, 2.0], [7, -0.25, 0.0]]


def test_pointwise_algebra():
    x = FiniteSequence({1: 2.0, 2: 1j})
    u = FiniteSequence({1: 0.5, 2: 2.0, 3: 9.0})
    assert x.multiply(u).entries == {1: 1.0, 2: 2j}
    assert x.sub(x).support_size == 0
    assert x.scale(2.0)[2] == 2j


# -- modular -------------------------------------------------------------------


def test_modular_three_four_five():
    x = FiniteSequence({1: 3.0, 2: 4.0})
    assert modular(power(2), x, 5.0) == pytest.approx(1.0, abs=1e-15)


def test_modular_empty_sum():
    assert modular(power(2), FiniteSequence({}), 2.0) == 0.0


def test_modular_flat_four_under_phi1():
    # four equal entries 1/2; direct summation oracle
    s4 = FiniteSequence.flat(4)
    f = phi1()
    assert modular(f, s4, 1.0) == pytest.approx(4.0 * f.evaluate(0.5),
                                                rel=1e-14)


def test_modular_rejects_nonpositive_rho():
    with pytest.raises(ValueError):
        modular(power(2), FiniteSequence({1: 1.0}), 0.0)


def test_modular_monotone_in_rho():
    x = FiniteSequence.from_values([0.3, 1.5, 0.8])
    f = phi1()
    rhos = np.linspace(0.2, 4.0, 12)
    vals = [modular(f, x, r) for r in rhos]
    assert all(a >= b for a, b in zip(vals, vals[1:]))


# -- Luxemburg norm ------------------------------------------------------------


@pytest.mark.parametrize("p", [1.0, 2.0, 4.0])
def test_norm_recovers_lp(p):
    rng = np.random.default_rng(5)
    for _ in range(5):
        x = FiniteSequence.from_values(
            rng.normal(size=8) + 1j * rng.normal(size=8))
        assert luxemburg_norm(power(p), x) == pytest.approx(
            x.lp_norm(p), rel=1e-10)


def test_norm_of_zero_sequence():
    assert luxemburg_norm(power(2), FiniteSequence({})) == 0.0


def test_norm_of_unit_vector_is_reciprocal_inverse():
    for f in [power(2), phi1()]:
        expected = 1.0 / f.inverse(1.0)
        assert luxemburg_norm(f, FiniteSequence.unit(1)) == pytest.approx(
            expected, rel=1e-12)


def test_unit_vector_norm_is_index_independent():
    f = phi1()
    norms = {luxemburg_norm(f, FiniteSequence.unit(n)) for n in (1, 5, 999)}
    assert max(norms) - min(norms) < 1e-14


@settings(max_examples=30, deadline=None)
@given(values=small_vectors, lam=finite_complex)
def test_norm_homogeneity(values, lam):
    x = FiniteSequence.from_values(values)
    f = phi1()
    a = luxemburg_norm(f, x.scale(lam))
    b = abs(lam) * luxemburg_norm(f, x)
    assert a == pytest.approx(b, rel=1e-10)


@settings(max_examples=30, deadline=None)
@given(values=small_vectors, shrink=st.lists(
    st.floats(min_value=0.0, max_value=1.0), min_size=10, max_size=10))
def test_lattice_monotonicity(values, shrink):
    y = FiniteSequence.from_values(values)
    x = FiniteSequence(
        {n: v * shrink[i % 10] for i, (n, v) in enumerate(y.entries.items())})
    f = phi1()
    assert luxemburg_norm(f, x) <= luxemburg_norm(f, y) * (1 + 1e-9) + 1e-12


@settings(max_examples=25, deadline=None)
@given(a=small_vectors, b=small_vectors)
def test_triangle_inequality(a, b):
    x = FiniteSequence.from_values(a)
    y = FiniteSequence.from_values(b)
    f = phi1()
    lhs = luxemburg_norm(f, x.add(y))
    rhs = luxemburg_norm(f, x) + luxemburg_norm(f, y)
    assert lhs <= rhs * (1 + 1e-9) + 1e-9


def test_modular_at_norm_is_one():
    rng = np.random.default_rng(11)
    f = phi1()
    for _ in range(10):
        m = int(rng.integers(1, 24))
        x = FiniteSequence.from_values(
            rng.normal(size=m) + 1j * rng.normal(size=m))
        rho = luxemburg_norm(f, x)
        assert abs(modular(f, x, rho) - 1.0) <= 1e-6


# -- dual norm oracle ----------------------------------------------------------


def test_dual_oracle_self_dual_l2():
    y = FiniteSequence.from_values([1.0, 2.0, 0.5, 0.1])
    assert dual_norm_oracle(power(2), y) == pytest.approx(
        y.lp_norm(2), rel=1e-3)


def test_dual_oracle_holder_pair():
    y = FiniteSequence.from_values([1.0, 0.7, 0.2])
    assert dual_norm_oracle(power(4), y) == pytest.approx(
        y.lp_norm(4.0 / 3.0), rel=1e-3)


def test_dual_oracle_rejects_large_support():
    y = FiniteSequence.from_values(np.ones(9))
    with pytest.raises(ValueError):
        dual_norm_oracle(power(2), y)


def test_dual_oracle_bracketed_by_conjugate_norm():
    # the dual norm sits between the conjugate Luxemburg norm and twice it
    f = phi1()
    conj = conjugate(f)
    rng = np.random.default_rng(2)
    for _ in range(3):
        m = int(rng.integers(2, 5))
        y = FiniteSequence.from_values(rng.uniform(0.005, 0.02, size=m))
        oracle = dual_norm_oracle(f, y, ball_samples=8)
        base = luxemburg_norm(conj, y)
        assert base <= oracle * (1 + 1e-2)
        assert oracle <= 2.0 * base * (1 + 1e-2)
