import math
import random
from fractions import Fraction as F

import pytest
from hypothesis import given, settings, strategies as st

from virialtrees.series import (
    PowerSeries,
    bell_partial,
    binomial_identity_check,
    falling_factorial,
    format_series,
    gen_binomial,
    identity_suite,
    lagrange_virial,
    perturbed_t1,
    potential_polynomial,
    reversion_oracle,
    rooted_tree_series,
    t1_series,
    tree_series,
)

fractions = st.fractions(min_value=-5, max_value=5, max_denominator=7)


def test_basic_arithmetic():
    z = PowerSeries.z(4)
    assert (z * z).derive() == PowerSeries([0, 2, 0, 0])
    e = PowerSeries([F(1, math.factorial(k)) for k in range(5)])
    assert e.compose(z * z) == PowerSeries([1, 0, 1, 0, F(1, 2)])
    t1 = t1_series(4)
    assert (t1 * t1)[3] == 1
    assert (z + PowerSeries([1, 1])).order == 1


def test_truncation_is_respected():
    a = PowerSeries([1, 2, 3])
    b = PowerSeries([1, 1, 1, 1, 1])
    assert (a * b).order == 2 and (a + b).order == 2
    with pytest.raises(IndexError):
        a[3]
    with pytest.raises(ValueError):
        a.truncate(5)


def test_errors():
    with pytest.raises(ValueError):
        PowerSeries([1, 1]).compose(PowerSeries([1, 1]))
    with pytest.raises(ZeroDivisionError):
        PowerSeries([1, 1]) / PowerSeries([0, 1])
    with pytest.raises(ValueError):
        PowerSeries([2, 1]) ** F(1, 2)
    with pytest.raises(ValueError):
        PowerSeries([1, 1]).exp()


@given(st.lists(fractions, min_size=6, max_size=6), st.lists(fractions, min_size=6, max_size=6))
@settings(max_examples=40)
def test_reciprocal_and_division(a, b):
    a[0] = b[0] = F(1)
    pa, pb = PowerSeries(a), PowerSeries(b)
    assert pa * pa.reciprocal() == PowerSeries.constant(1, 5)
    assert (pa / pb) * pb == pa


@given(st.lists(fractions, min_size=7, max_size=7))
@settings(max_examples=30)
def test_powers_and_exp(a):
    a[0] = F(1)
    p = PowerSeries(a)
    assert p ** 3 == p * p * p
    assert p ** -2 == (p * p).reciprocal()
    half = p ** F(1, 2)
    assert half * half == p
    third = p ** F(-1, 3)
    assert third ** 3 == p.reciprocal()
    q = p - 1
    # exp(q)' = q' exp(q)
    assert q.exp().derive() == q.derive() * q.exp().truncate(5)


def test_integrate_euler():
    p = PowerSeries([3, 1, 2, 5])
    assert p.derive().integrate(3) == p
    assert p.euler() == PowerSeries([0, 1, 4, 15])


def test_scalar_helpers():
    assert gen_binomial(-2, 2) == 3
    assert gen_binomial(F(7, 3), 0) == 1
    assert falling_factorial(-5, 1) == -5
    assert gen_binomial(F(1, 2), 2) == F(-1, 8)
    for n in range(8):
        for k in range(n + 1):
            assert gen_binomial(n, k) == math.comb(n, k)
    with pytest.raises(ValueError):
        falling_factorial(3, -1)


def test_bell_examples():
    assert bell_partial(3, 1, [5, 7, 11]) == 11
    assert bell_partial(3, 2, [1, 1, 1]) == 3
    assert bell_partial(4, 2, [1, 1, 1]) == 7
    # all-ones arguments give Stirling numbers of the second kind
    assert [bell_partial(5, k, [1] * 5) for k in range(1, 6)] == [1, 15, 25, 10, 1]
    with pytest.raises(ValueError):
        bell_partial(3, 0, [1, 1, 1])
    with pytest.raises(ValueError):
        bell_partial(3, 4, [1, 1, 1])
    with pytest.raises(ValueError):
        bell_partial(4, 1, [1, 1])


@given(st.lists(fractions, min_size=8, max_size=8))
@settings(max_examples=15, deadline=None)
def test_bell_generating_identity(xs):
    # sum_{n,k} B_{n,k} t^n/n! u^k = exp(u * sum_j x_j t^j/j!); compare coefficients of u^k
    order = 8
    inner = PowerSeries([0] + [x / math.factorial(j) for j, x in enumerate(xs, 1)])
    power = PowerSeries.constant(1, order)
    for k in range(1, order + 1):
        power = power * inner
        for n in range(k, order + 1):
            assert bell_partial(n, k, xs) == power[n] * math.factorial(n) / math.factorial(k)


def test_potential_examples():
    assert potential_polynomial(1, 3, [2]) == 6
    assert potential_polynomial(2, -1, [1, 1]) == 1


@given(st.lists(fractions, min_size=8, max_size=8), st.fractions(min_value=-3, max_value=3, max_denominator=4))
@settings(max_examples=15, deadline=None)
def test_potential_matches_series_power(xs, r):
    series = PowerSeries([1] + [x / math.factorial(j) for j, x in enumerate(xs, 1)])
    power = series ** r
    for n in range(1, 9):
        assert potential_polynomial(n, r, xs) == power[n] * math.factorial(n)


def _random_b(rng, length):
    return [F(1)] + [F(rng.randint(-30, 30), rng.randint(1, 12)) for _ in range(length - 1)]


def test_lagrange_equals_reversion_random():
    rng = random.Random(20240611)
    for trial in range(200):
        n = 1 + trial % 10
        b = _random_b(rng, n + 1)
        assert lagrange_virial(b, n) == reversion_oracle(b, n), (b, n)


def test_low_order_closed_forms():
    # beta_2 = -b_2 (degree 1) and beta_3 = 6 b_2^2 - 2 b_3 (degree 2 in b_2, 1 in b_3):
    # agreement on a 3 x 2 grid pins the polynomials
    for b2 in (F(-1), F(0), F(5, 3)):
        assert lagrange_virial([1, b2], 1) == -b2 == reversion_oracle([1, b2], 1)
        for b3 in (F(2), F(-7, 4)):
            assert lagrange_virial([1, b2, b3], 2) == 6 * b2 ** 2 - 2 * b3 == reversion_oracle([1, b2, b3], 2)
    assert lagrange_virial([1, -1, 2], 2) == 2


def test_onepoint_and_ideal_gas():
    b = [F((-1) ** (n - 1) * math.factorial(n - 1)) for n in range(1, 9)]
    for n in range(1, 7):
        assert lagrange_virial(b, n) == math.factorial(n) == reversion_oracle(b, n)
    ideal = [1] + [0] * 8
    assert all(lagrange_virial(ideal, n) == 0 == reversion_oracle(ideal, n) for n in range(1, 8))


def test_inversion_input_checks():
    with pytest.raises(ValueError):
        lagrange_virial([2, 1, 1], 1)
    with pytest.raises(ValueError):
        reversion_oracle([1, 1], 2)


def test_tree_series_coefficients():
    assert list(t1_series(4))[1:] == [1, F(1, 2), F(2, 3), F(9, 8)]
    assert rooted_tree_series(3)[3] == F(3, 2)
    assert tree_series(4)[4] == F(2, 3)
    with pytest.raises(ValueError):
        t1_series(0)


def test_identity_suite_order_12():
    results = identity_suite(12)
    assert len(results) == 8
    assert all(r.passed and r.checked_through == 12 for r in results)


def test_identity_suite_order_1():
    assert all(r.passed for r in identity_suite(1))


@pytest.mark.parametrize("degree", [2, 5, 9])
def test_identity_suite_negative_control(degree):
    results = identity_suite(10, perturbed_t1(12, degree))
    by_name = {r.name: r for r in results}
    assert by_name["T1 = 1 - 1/T'"].first_failure == degree
    assert by_name["T1(s e^-s) = 1 - e^-s"].first_failure == degree
    assert all(r.passed for r in results[:4])


def test_binomial_identity():
    assert all(binomial_identity_check(n, m) for n in range(1, 21) for m in range(1, n + 1))
    with pytest.raises(ValueError):
        binomial_identity_check(2, 3)


def test_format_series():
    text = format_series(t1_series(3))
    assert text.splitlines() == ["1 z", "1/2 z^2", "2/3 z^3", "+ O(z^4)"]
