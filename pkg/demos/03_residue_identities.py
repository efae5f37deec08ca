"""
Residue traces and their defects
================================

tau_j(A) is the coefficient of z^{-(j+1)} in Tr(A |D|^{-z}); tau_{-1} is
the finite part. On the circle poles are simple, so tau_0 is a trace and
tau_{-1} is not: changing the weight |D| -> |D| + P, or taking a
commutator, shifts tau_{-1} by tau_0 of a correction term.
"""

from fractions import Fraction

from nctrace.circle import CircleModel, e
from nctrace.ncalg import BElement, algebra_config
from nctrace.symbols import AffineOrder, Symbol, sym_bracket
from nctrace.zetatrace import (
    OrderInDimensionSpectrum,
    canonical_trace,
    commutator_discrepancy_check,
    tau,
    weight_discrepancy_check,
)

model = CircleModel()


def op(b, a):
    return Symbol.element(b, AffineOrder(a, 0))


print("tau_0(|D|^-1) =", tau(0, op(BElement.unit(), -1), model))
print("tau_0(|D|)    =", tau(0, op(BElement.unit(), 1), model))

# Weight change: both sides of the defect formula, and its log form.
A = op(e(1, 1) * e(-1, 1), 1)
P = Symbol.element(e(1, c=Fraction(1, 20)) + e(-1, c=Fraction(1, 20)) + BElement.unit(Fraction(1, 3)))
for form in ("series", "log"):
    r = weight_discrepancy_check(-1, A, P, model, form=form)
    print(f"weight defect ({form}): {complex(r.lhs):.10f} vs {complex(r.rhs):.10f} pass={r.passed}")
r = weight_discrepancy_check(0, A, P, model)
print(f"tau_0 is weight invariant: difference {r.abs_err:.1e}")

# Commutators: tau_{-1}([A, B]) is a sum of higher residues.
with algebra_config(max_delta=68):
    A, B = op(e(1), 2), op(e(-1), -1)
    for form in ("series", "sigma"):
        r = commutator_discrepancy_check(-1, A, B, model, N=60, form=form)
        print(f"commutator defect ({form}): {complex(r.lhs):.10f} vs {complex(r.rhs):.10f}")

    # Off the dimension spectrum the finite part is a genuine trace.
    A, B = op(e(1), Fraction(-1, 2)), op(e(-1), Fraction(-1, 4))
    print("canonical trace of [A, B]:", canonical_trace(sym_bracket(A, B, 60), model))

try:
    canonical_trace(op(BElement.unit(), 1), model)
except OrderInDimensionSpectrum as ex:
    print("gate:", ex)
