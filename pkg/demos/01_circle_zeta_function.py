"""
The zeta function of the circle
===============================

On l^2(Z) take |D| = sqrt(1 + n^2). Its zeta function
Tr |D|^{-s} = 1 + 2 sum_{n>=1} (1+n^2)^{-s/2} converges for Re s > 1 and
continues meromorphically with simple poles at odd integers <= 1.
"""

from nctrace.circle import CircleModel, e

model = CircleModel()
unit = ()

# The continuation: a direct head plus Hurwitz-zeta germs for the tail.
for center in (1, 0, -1, -2, -3):
    germ = model.word_trace(unit, center, K=1)
    print(f"s = {center:>2}: residue {complex(germ.coefficient(-1)).real:+.12f}  finite part {complex(germ.coefficient(0)).real:+.12f}")

# An independent route: Euler-Maclaurin on a direct sum, then a contour
# integral for the Laurent coefficients.
for center in (1, -1):
    oracle = model.oracle_laurent(unit, center, K=1)
    print(f"oracle residue at {center}: {oracle[-1].real:+.12f}")

# Words of the algebra act too. e1 shifts modes by one; d(.) is the
# commutator with |D|. A zero-shift word has a diagonal, hence a trace.
word = next(iter((e(-1) * e(1, 1)).terms))
for s in (3.5, 1.2 + 0.5j, -0.4 - 0.3j):
    a = model.word_trace(word, s, K=0).coefficient(0)
    b = model.oracle_trace(word, s)
    print(f"Tr(e-1 d(e1) |D|^-s) at s={s}: {complex(a):.12f}  oracle {b:.12f}")

print("dimension spectrum in [-4, 3]:", model.dimension_spectrum(-4, 3))
