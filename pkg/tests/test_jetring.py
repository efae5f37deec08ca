from fractions import Fraction as F

import pytest
import sympy as sp
from hypothesis import given
from hypothesis import strategies as st

from nctrace.jetring import (
    Backend,
    Jet,
    LaurentJet,
    QComplex,
    binom_jet,
    gamma_ratio_jet,
    residue,
)

z = sp.Symbol("z")
fracs = st.fractions(min_value=-5, max_value=5, max_denominator=6)
polys = st.lists(fracs, min_size=1, max_size=5)


def sympy_coeffs(expr, n):
    ser = sp.series(expr, z, 0, n + 1).removeO()
    return [F(str(sp.Rational(ser.coeff(z, m)))) for m in range(n + 1)]


def test_product_and_truncation():
    a = Jet([1, 1])
    b = Jet([1, -1])
    assert (a * b).coeffs == (1, 0, -1)
    t = Jet([1, 2, 3, 4], order=2)
    assert t.coeffs == (1, 2, 3)
    assert (t * Jet([0, 1])).order == 2


def test_reciprocal_matches_sympy_series():
    f = Jet([F(1), F(1), F(2), F(-1, 3)], order=6)
    got = f.reciprocal().coeffs
    want = sympy_coeffs(1 / (1 + z + 2 * z**2 - sp.Rational(1, 3) * z**3), 6)
    assert list(got) == want


def test_reciprocal_rejects_zero_constant():
    with pytest.raises(ZeroDivisionError):
        Jet([0, 1], order=3).reciprocal()


def test_polynomial_reciprocal_needs_order():
    with pytest.raises(ValueError):
        Jet([1, 1]).reciprocal()


def test_negative_power():
    f = Jet([F(2), F(1)], order=5)
    want = sympy_coeffs((2 + z) ** -3, 5)
    assert list((f**-3).coeffs) == want


def test_substitute_exact_polynomial():
    p = Jet([F(1), F(2), F(3)])  # 1 + 2x + 3x^2
    q = p.substitute(F(-2), F(1, 2))  # p(1/2 - 2z)
    want = sp.expand(1 + 2 * (sp.Rational(1, 2) - 2 * z) + 3 * (sp.Rational(1, 2) - 2 * z) ** 2)
    assert list(q.coeffs) == [F(str(want.coeff(z, m))) for m in range(3)]


def test_binom_jet_values():
    assert binom_jet(2).coeffs == (0, F(-1, 2), F(1, 2))
    for k in range(6):
        want = sp.Poly(sp.expand_func(sp.binomial(z, k)), z).all_coeffs()[::-1]
        assert list(binom_jet(k).coeffs) == [F(str(c)) for c in want]


@pytest.mark.parametrize("k", range(1, 8))
def test_binom_jet_pascal(k):
    # C(a+1, k) = C(a, k) + C(a, k-1)
    lhs = binom_jet(k).substitute(1, 1)
    assert lhs == binom_jet(k) + binom_jet(k - 1)


@pytest.mark.parametrize("m", range(0, 7))
def test_gamma_ratio_is_rising_factorial(m):
    want = sp.Poly(sp.expand(sp.rf(z, m)), z).all_coeffs()[::-1] if m else [1]
    assert list(gamma_ratio_jet(m).coeffs) == [F(str(c)) for c in want]
    # factorization: (z)_{m+1} = (z)_m (z + m)
    assert gamma_ratio_jet(m + 1) == gamma_ratio_jet(m) * Jet([m, 1])


def test_laurent_residues_of_gamma_like_germ():
    # 1/(z (1 + z)) = 1/z - 1 + z - ...
    f = LaurentJet([F(1)], 1, 0, 4) * LaurentJet.from_jet(Jet([1, 1], order=4).reciprocal())
    assert residue(f, 0) == 1
    assert residue(f, -1) == -1
    assert f.coefficient(1) == 1


def test_laurent_reciprocal_and_derivative():
    f = LaurentJet([F(1), F(2), F(3)], 1, 0, 3)  # 1/z + 2 + 3z
    g = f.reciprocal()
    one = (f * g).truncate(2)
    assert one.coefficient(0) == 1 and one.coefficient(1) == 0 and one.coefficient(2) == 0
    d = f.derivative()
    assert d.coefficient(-2) == -1 and d.coefficient(0) == 3


def test_recenter_affine():
    # germ of 1/(w - 1) at w = 1, with w = 2z + 1: 1/(2z) at z = 0
    f = LaurentJet([F(1)], 1, F(1), 3)
    g = f.recenter_affine(F(2), F(1))
    assert g.center == 0
    assert g.coefficient(-1) == F(1, 2)


def test_backend_coerce():
    assert Backend.FLOAT.coerce(F(1, 2)) == 0.5
    x = Backend.EXACT.coerce(F(1, 3))
    assert isinstance(x, QComplex) and x == F(1, 3)
    assert QComplex(1, 2) * QComplex(1, -2) == 5


@given(polys, polys, polys)
def test_ring_axioms(a, b, c):
    A, B, C = (Jet(x, order=6) for x in (a, b, c))
    assert (A * B) * C == A * (B * C)
    assert A * (B + C) == A * B + A * C
    assert A * B == B * A


@given(polys)
def test_inverse_property(a):
    if a[0] == 0:
        a = [F(1)] + a[1:]
    A = Jet(a, order=5)
    assert A * A.reciprocal() == Jet([1], order=5)


@given(polys, fracs)
def test_evaluation_is_a_homomorphism(a, x):
    A, B = Jet(a), Jet(list(reversed(a)))
    assert (A * B)(x) == A(x) * B(x)
    assert (A + B)(x) == A(x) + B(x)
