"""
Moving powers of |D| through the algebra
========================================

Powers of |D| do not commute with the algebra, but the commutator rule
|D|^beta b = sum_k C(beta, k) delta^k(b) |D|^{beta-k} puts every product
into right-normal form. Here the expansion is checked against dense
matrices on the circle.
"""

from fractions import Fraction

import numpy as np

from nctrace.circle import abs_d_diagonal, e, realize
from nctrace.ncalg import algebra_config
from nctrace.symbols import (
    Symbol,
    commute_power,
    format_symbol,
    log_difference,
    perturbed_power,
)

C = 120
lam = abs_d_diagonal(C)
b = e(1) * e(-1, 1) + e(2)


def as_matrix(A, z=0.0):
    out = np.zeros((2 * C + 1, 2 * C + 1), dtype=complex)
    alpha = complex(A.order.at(z))
    for (j, l), fam in A.terms.items():
        coeff = fam(z) if fam.degree > 0 else fam[0]
        out += realize(coeff, C).to_dense() * (lam ** (alpha - j) * np.log(lam) ** l)[None, :]
    return out


def interior(X):
    n = np.arange(-C, C + 1)
    return np.max(np.abs(X[:, (np.abs(n) > 30) & (np.abs(n) < 60)]))


beta = Fraction(1, 3)
print(format_symbol(commute_power(beta, Symbol.element(b), 3)))
direct = (lam**beta)[:, None] * realize(b, C).to_dense()
for N in (2, 4, 6, 8):
    # the default bound on delta powers is 8; deeper expansions raise it
    with algebra_config(max_delta=N + 2):
        err = interior(direct - as_matrix(commute_power(beta, Symbol.element(b), N)))
    print(f"|D|^(1/3) b with {N} terms: interior error {err:.2e}")

# (|D| + P)^{-z}: the perturbation expands in delta^k(P).
P = Symbol.element(e(1, c=Fraction(1, 20)) + e(-1, c=Fraction(1, 20)))
M = np.diag(lam) + realize(P.coefficient(0)[0], C).to_dense()
w, V = np.linalg.eigh(M)
for z in (0.5, 1.5):
    exact = (V * w**-z) @ V.conj().T
    for N in (2, 4):
        err = interior(exact - as_matrix(perturbed_power(P, N), z))
        print(f"(|D|+P)^-{z} with {N} terms: interior error {err:.2e}")

# log(|D| + P) - log|D| through the Campbell-Hausdorff series.
exact = (V * np.log(w)) @ V.conj().T - np.diag(np.log(lam))
for N in (2, 3, 5):
    err = interior(exact - as_matrix(log_difference(P, N, N - 1)))
    print(f"log difference with {N} terms: interior error {err:.2e}")
