import math
from fractions import Fraction

import mpmath
import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from cubicfields import asymptotics as A



def _truth(f, *args):
    with mpmath.workdps(50):
        return f(*[mpmath.mpf(a.numerator) / a.denominator if isinstance(a, Fraction) else a
                   for a in args])


def test_zeta_examples():
    z2 = A.zeta(2)
    assert abs(float(z2) - math.pi**2 / 6) < 1e-10
    assert z2.contains(_truth(mpmath.zeta, 2))
    z13 = A.zeta(A.THIRD)
    assert z13.value < 0 and z13.bound < 1e-15
    assert z13.contains(_truth(mpmath.zeta, Fraction(1, 3)))
    for s in (1, -1, Fraction(-3, 2)):
        with pytest.raises(ValueError):
            A.zeta(s)


@settings(max_examples=40, deadline=None)
@given(st.fractions(min_value=Fraction(-9, 10), max_value=Fraction(6), max_denominator=50)
       .filter(lambda s: s != 1))
def test_zeta_bound_contains_truth(s):
    z = A.zeta(s, 20)
    assert z.bound < mpmath.mpf(10) ** -18
    assert z.contains(_truth(mpmath.zeta, s))


def test_zeta_two_routes_at_one_third():
    em = A.zeta(A.THIRD)
    ps = A.zeta_partial_sums(A.THIRD)
    assert abs(em.value - ps.value) < 1e-8
    assert abs(em.value - ps.value) <= em.bound + ps.bound
    with pytest.raises(ValueError):
        A.zeta_partial_sums(Fraction(3, 2))


def test_gamma_examples():
    g = A.gamma(Fraction(1, 2))
    with mpmath.workdps(50):
        assert g.contains(mpmath.sqrt(mpmath.pi))
    assert abs(float(A.gamma(5)) - 24) < 1e-12
    # reflection Gamma(1/3) Gamma(2/3) = 2 pi / sqrt 3
    r = A.gamma(Fraction(1, 3)) * A.gamma(Fraction(2, 3))
    assert abs(float(r.value - 2 * mpmath.pi / mpmath.sqrt(3))) < 1e-10
    with pytest.raises(ValueError):
        A.gamma(0)


@settings(max_examples=40, deadline=None)
@given(st.fractions(min_value=Fraction(1, 20), max_value=Fraction(30), max_denominator=60))
def test_gamma_bound_contains_truth(x):
    g = A.gamma(x, 20)
    assert g.contains(_truth(mpmath.gamma, x))
    assert g.bound <= abs(g.value) * mpmath.mpf(10) ** -18


@pytest.mark.parametrize("s", [A.THIRD, Fraction(5, 3), 3, 2])
def test_zeta_doubled_precision(s):
    lo, hi = A.zeta(s, 20), A.zeta(s, 40)
    assert lo.contains(hi.value, hi.bound)
    assert hi.bound < lo.bound


def test_bounded_arithmetic_is_conservative():
    a = A.Bounded(mpmath.mpf("1.5"), mpmath.mpf("0.01"))
    b = A.Bounded(mpmath.mpf("-0.7"), mpmath.mpf("0.02"))
    for op in (lambda x, y: x + y, lambda x, y: x - y, lambda x, y: x * y, lambda x, y: x / y):
        r = op(a, b)
        with mpmath.workdps(50):
            for da in (-a.bound, a.bound):
                for db in (-b.bound, b.bound):
                    assert r.contains(op(a.value + da, b.value + db), 1e-40)
    with pytest.raises(ZeroDivisionError):
        a / A.Bounded(mpmath.mpf(0), mpmath.mpf(1))


def test_containment_independent_of_ambient_precision():
    lo, hi = A.zeta(A.THIRD, 20), A.zeta(A.THIRD, 40)
    with mpmath.workdps(15):
        assert lo.contains(hi.value, hi.bound)
        s = lo + hi
    with mpmath.workdps(50):
        assert s.contains(2 * hi.value, hi.bound)


def test_torsion_partial_products_decrease():
    prev = 1.0
    for P in (10, 100, 1000, 10**4, 10**5):
        v = A.torsion_partial_product(P)
        assert v < prev
        prev = v
    full = A.euler_product_torsion(10**6)
    assert full.value < prev
    # the tail of the plain product is about sum p^-5/3 over p > 1e5
    assert prev - float(full.value) < 3 * A.prime_tail(5 / 3, 10**5)


def test_torsion_product_cutoffs_consistent():
    big = A.euler_product_torsion(10**6)
    for P in (10**4, 10**5):
        small = A.euler_product_torsion(P)
        assert small.contains(big.value, big.bound)
        assert small.bound > big.bound


@pytest.mark.parametrize("k", [3, 5, 7])
def test_hough_product_against_plain_product(k):
    acc = A.hough_product(k, 10**6)
    # the plain truncated product stays within the combined tail bound
    p = A.primes_up_to(10**6)[1:].astype(np.float64)
    u = (p ** (-1 / k) - p ** (-1 + 2 / k) - p ** (-1 + 1 / k) - 1 / p) / (p + 1)
    plain = math.exp(math.fsum(np.log1p(u).tolist()))
    if k == 3:
        assert abs(plain - float(acc.value)) <= float(acc.bound) * 1.0001
    assert A.hough_product(k, 10**5).contains(acc.value, acc.bound)


def test_hough_constants():
    c3 = A.hough_constant(3, 10**6)
    c5 = A.hough_constant(5, 10**6)
    assert c3.value < 0 and c5.value < 0
    assert c3.bound < 1e-4 and c5.bound < 1e-3
    with pytest.raises(ValueError):
        A.hough_constant(4)


def test_formula_models():
    plus, minus = A.formula_model(1), A.formula_model(-1)
    assert abs(plus.A - 1 / (12 * float(mpmath.zeta(3)))) < 1e-15
    assert abs(minus.A / plus.A - 3) < 1e-12
    assert abs(minus.B / plus.B - math.sqrt(3)) < 1e-12
    assert plus.B < 0
    z13, z53, g23 = (float(mpmath.zeta(mpmath.mpf(1) / 3)), float(mpmath.zeta(mpmath.mpf(5) / 3)),
                     float(mpmath.gamma(mpmath.mpf(2) / 3)))
    assert abs(plus.B - 4 * z13 / (5 * g23**3 * z53)) < 1e-12
    t = A.formula_model(-1, "torsion")
    assert abs(t.A - 6 / math.pi**2) < 1e-15
    assert abs(A.formula_model(1, "torsion").A - 4 / math.pi**2) < 1e-15
    r = A.predicted_counts(-1, 1e30) / A.predicted_counts(1, 1e30)
    assert abs(r - 3) < 1e-4
    with pytest.raises(ValueError):
        A.formula_model(1, "quartic")


def test_weighted_main_coefficient():
    assert A.weighted_main_coefficient(1) == pytest.approx(math.pi**2 / 72)
    assert A.weighted_main_coefficient(-1) == pytest.approx(math.pi**2 / 24)


def test_fit_recovers_synthetic_model():
    xs = [1e5, 2e5, 5e5, 1e6, 2e6]
    a, b = 0.0693, -0.1477
    r = A.fit_secondary([(x, a * x + b * x ** (5 / 6)) for x in xs])
    assert abs(r.A - a) < 1e-10 * abs(a) and abs(r.B - b) < 1e-10 * abs(b)


@settings(max_examples=30, deadline=None)
@given(st.floats(0.01, 100), st.floats(-1, 1), st.floats(-1, 1))
def test_fit_scale_equivariance(lam, a, b):
    xs = [1e4, 3e4, 1e5, 4e5]
    grid = [(x, a * x + b * x ** (5 / 6) + (-1) ** i * 3.0) for i, x in enumerate(xs)]
    r1 = A.fit_secondary(grid)
    r2 = A.fit_secondary([(x, lam * c) for x, c in grid])
    assert r2.A == pytest.approx(lam * r1.A, rel=1e-8, abs=1e-12)
    assert r2.B == pytest.approx(lam * r1.B, rel=1e-8, abs=1e-10)


def test_fit_validation():
    with pytest.raises(ValueError):
        A.fit_secondary([(1e5, 10)])
    with pytest.raises(ValueError):
        A.fit_secondary([(1e5, 10), (1e5, 11)])


def test_minkowski():
    assert A.minkowski_bound(1, 0) == 1
    assert A.minkowski_bound(2, 1) == pytest.approx(4 * (math.pi / 4) ** 2)
    assert A.minkowski_bound(3, 1) == pytest.approx(20.25 * (math.pi / 4) ** 2)
    assert 2 < A.minkowski_bound(2, 1) < 3 and 12 < A.minkowski_bound(3, 1) < 23
    # n-th roots climb towards e^2 pi / 4 = 5.803...
    roots = [A.minkowski_bound(n, n // 2) ** (1 / n) for n in (50, 100, 200, 300)]
    assert roots == sorted(roots) and 5.6 < roots[-1] < math.e**2 * math.pi / 4
    with pytest.raises(ValueError):
        A.minkowski_bound(2, 2)


def test_constants_report_shape():
    rep = A.constants_report(20, 10**5)
    names = [n for n, _ in rep]
    assert names[:3] == ["zeta(3)", "zeta(1/3)", "zeta(1/3) partial sums"]
    assert "C_1,3" in names and "C_1,5" in names
    for _, b in rep:
        assert b.bound >= 0 and b.method
