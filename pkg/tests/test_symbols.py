import math
from fractions import Fraction as F

import numpy as np
import pytest
from conftest import hermitian_function, interior_error, symbol_matrix
from hypothesis import given, settings
from hypothesis import strategies as st

from nctrace.circle import abs_d_diagonal, e, realize
from nctrace.jetring import Jet, binom_jet, is_exact
from nctrace.ncalg import BElement, Generator, algebra_config, delta
from nctrace.symbols import (
    AffineOrder,
    InsufficientTruncation,
    Symbol,
    commute_log,
    commute_power,
    log_ad,
    log_commutator_coefficient,
    log_difference,
    perturbed_power,
    sigma_conj,
    sym_mul,
)

CUT = 160

gens = st.builds(Generator, st.sampled_from("ab"), st.booleans(), st.integers(0, 1))
words = st.lists(gens, min_size=1, max_size=3).map(tuple)
exponents = st.fractions(min_value=-2, max_value=2, max_denominator=4)


def elem(b, a=0, q=0):
    return Symbol.element(b, AffineOrder(a, q))


def test_commuting_a_power_past_an_element():
    b = BElement.gen("a")
    out = commute_power(F(1, 3), elem(b), N=3)
    assert out.coefficient(0) == Jet([b])
    assert out.coefficient(1) == Jet([BElement.gen("a", delta=1) * F(1, 3)])
    assert out.coefficient(2) == Jet([BElement.gen("a", delta=2) * F(-1, 9)])


def test_integer_power_series_terminates_without_truncation():
    b = BElement.gen("a")
    out = commute_power(2, elem(b))
    assert out.N is None
    assert sorted(j for j, _ in out.terms) == [0, 1, 2]


def test_exact_product_of_infinite_series_is_refused():
    with pytest.raises(InsufficientTruncation):
        commute_power(F(1, 2), elem(BElement.gen("a")))


def test_log_commutator_coefficients():
    assert [log_commutator_coefficient(k) for k in range(1, 5)] == [1, F(-1, 2), F(1, 3), F(-1, 4)]
    for k in range(1, 8):
        assert log_commutator_coefficient(k) == F((-1) ** (k - 1), k)


def test_power_expansion_matches_circle_matrices():
    b = e(1) * e(-1, 1) + e(2)
    beta = F(1, 3)
    lam = abs_d_diagonal(CUT)
    direct = (lam**beta)[:, None] * realize(b, CUT).to_dense()
    errs = []
    for N in (3, 7):
        approx = symbol_matrix(commute_power(beta, elem(b), N), CUT)
        errs.append(interior_error(direct, approx, CUT, 40, 80))
    assert errs[1] < 1e-9 < errs[0]


def test_log_expansion_matches_circle_matrices():
    b = e(-1) + e(1, bracket=True)
    lam = abs_d_diagonal(CUT)
    direct = np.log(lam)[:, None] * realize(b, CUT).to_dense()
    approx = symbol_matrix(commute_log(elem(b), 8), CUT)
    assert interior_error(direct, approx, CUT, 40, 80) < 1e-12


def test_sigma_is_conjugation_by_a_power():
    b = e(1)
    z = 0.37
    lam = abs_d_diagonal(CUT)
    direct = (lam**-z)[:, None] * realize(b, CUT).to_dense() * (lam**z)[None, :]
    approx = symbol_matrix(sigma_conj(elem(b), 8), CUT, z)
    assert interior_error(direct, approx, CUT, 40, 80) < 1e-12


def test_perturbed_power_for_a_scalar_is_the_binomial_series():
    c = F(1, 3)
    P = elem(BElement.unit(c))
    out = perturbed_power(P, 5)
    for m in range(5):
        want = binom_jet(m).substitute(-1, 0) * c**m  # C(-z, m) c^m
        got = out.coefficient(m)
        assert got.map(lambda x: x.scalar_part()) == want


def test_perturbed_power_matches_eigen_decomposition():
    P = elem(e(1, c=F(1, 20)) + e(-1, c=F(1, 20)) + BElement.unit(F(1, 10)))
    lam = abs_d_diagonal(CUT)
    M = np.diag(lam) + realize(P.coefficient(0)[0], CUT).to_dense()
    z = 0.5
    direct = hermitian_function(M, lambda w: w**-z)
    errs = [interior_error(direct, symbol_matrix(perturbed_power(P, N), CUT, z), CUT, 40, 60) for N in (2, 4)]
    assert errs[1] < errs[0] / 50
    assert errs[1] < 1e-8


def test_perturbed_power_reports_small_bounds():
    P = elem(e(1))
    with pytest.raises(InsufficientTruncation):
        perturbed_power(P, 5, max_n=2)


def test_log_difference_scalar_is_mercator():
    c = F(1, 4)
    out = log_difference(elem(BElement.unit(c)), 5)
    for i in range(1, 5):
        assert out.coefficient(i)[0].scalar_part() == F((-1) ** (i - 1), i) * c**i


def test_log_difference_matches_eigen_decomposition():
    P = elem(e(1, c=F(1, 20)) + e(-1, c=F(1, 20)) + e(2, 1, c=F(1, 30)) + e(-2, 1, c=F(-1, 30)))
    lam = abs_d_diagonal(CUT)
    M = np.diag(lam) + realize(P.coefficient(0)[0], CUT).to_dense()
    direct = hermitian_function(M, np.log) - np.diag(np.log(lam))
    errs = [interior_error(direct, symbol_matrix(log_difference(P, N, N - 1), CUT), CUT, 40, 60) for N in (2, 5)]
    assert errs[1] < errs[0] / 100
    assert errs[1] < 1e-8
    # remainder of order -5: doubling the modes shrinks it about 32-fold
    far = interior_error(direct, symbol_matrix(log_difference(P, 5, 4), CUT), CUT, 80, 120)
    assert far < errs[1] / 16


def test_log_difference_needs_enough_campbell_hausdorff_terms():
    with pytest.raises(InsufficientTruncation):
        log_difference(elem(e(1)), 6, M_ch=3)


def test_log_ad_of_a_scalar_vanishes():
    assert not log_ad(elem(BElement.unit(2)), 4)


@settings(max_examples=30, deadline=None)
@given(words, exponents, st.integers(1, 5))
def test_power_round_trip(w, beta, N):
    b = elem(BElement.word(w))
    there = commute_power(beta, b, N)
    back = commute_power(-beta, there, N)
    assert back == b.truncate(N)


@settings(max_examples=30, deadline=None)
@given(words, exponents, exponents, st.integers(1, 4))
def test_power_group_law(w, s, t, N):
    b = elem(BElement.word(w))
    assert commute_power(s, commute_power(t, b, N), N) == commute_power(s + t, b, N)


@settings(max_examples=25, deadline=None)
@given(words, words, words, exponents, exponents, st.integers(1, 4))
def test_product_is_associative(w1, w2, w3, a1, a2, N):
    A = elem(BElement.word(w1), a1)
    B = elem(BElement.word(w2), a2)
    C = elem(BElement.word(w3), 0)
    with algebra_config(max_length=12):
        assert sym_mul(sym_mul(A, B, N), C, N) == sym_mul(A, sym_mul(B, C, N), N)


@settings(max_examples=25, deadline=None)
@given(words, st.integers(1, 4))
def test_log_is_derivative_of_power(w, N):
    # log|D| b = d/dbeta (|D|^beta b) at beta = 0; coefficients c'_{0,k}
    b = BElement.word(w)
    out = commute_log(elem(b), N)
    assert out.coefficient(0, 1) == Jet([b])
    for k in range(1, N):
        assert out.coefficient(k, 0) == Jet([delta(b, k) * F((-1) ** (k - 1), k)])


def test_commutation_coefficients_have_factorial_form():
    # c_{beta,k} = beta (beta-1) ... (beta-k+1) / k!
    for k in range(6):
        beta = F(5, 7)
        assert binom_jet(k)(beta) == math.prod(beta - i for i in range(k)) / math.factorial(k)


def test_float_results_do_not_leak_into_exact_products():
    b = elem(BElement.gen("a"))
    commute_power(complex(2), b)  # float backend first
    out = commute_power(2, b)
    assert all(is_exact(c) for fam in out.terms.values() for c in fam[0].terms.values())
