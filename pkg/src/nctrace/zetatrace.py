"""Meromorphic traces, residue functionals and the identities they satisfy.

``tr_mer`` assembles the Laurent germ of ``z -> Tr(A(z))`` for a symbol
family of affine order ``a - q z`` from the word traces of a model. The
functionals ``tau(j, A)`` read residues of ``Tr(A |D|^{-z})`` at 0, with
``j = -1`` the finite part. The check functions compare two independent
assemblies of the same quantity and return a :class:`CheckReport`.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Protocol

from .jetring import Jet, LaurentJet, QComplex, is_exact, residue
from .ncalg import BElement
from .symbols import (
    AffineOrder,
    InsufficientTruncation,
    Symbol,
    family_derivative_at_zero,
    log_ad_power,
    log_difference,
    perturbed_power,
    right_power,
    sigma_conj,
    sym_bracket,
    sym_mul,
    weighted_derivative_at_zero,
)

DEFAULT_REL_TOL = 1e-6
DEFAULT_ABS_TOL = 1e-9


class OrderInDimensionSpectrum(ValueError):
    """The canonical trace is undefined on operators whose order lies in -Sd."""


class ModelContractViolation(RuntimeError):
    """Model data breaks its declared assumptions (pole bound, dimension spectrum)."""


class TraceModel(Protocol):
    summability_degree: float
    pole_multiplicity_bound: int

    def word_trace(self, word, center, pole_bound: int | None = None, K: int = 4) -> LaurentJet: ...

    def in_dimension_spectrum(self, x) -> bool: ...

    def dimension_spectrum(self, lo: int, hi: int) -> list: ...


@dataclass
class MeroTrace:
    germ: LaurentJet
    contributing_terms: list = field(default_factory=list)
    dropped_remainder_order: float = -math.inf


@dataclass
class CheckReport:
    check_name: str
    anchor: str
    lhs: object
    rhs: object
    abs_err: float
    rel_err: float
    tolerance: float
    abs_tolerance: float
    passed: bool
    notes: str = ""
    skipped: bool = False

    def to_dict(self):
        return {
            "check_name": self.check_name,
            "anchor": self.anchor,
            "lhs": _jsonable(self.lhs),
            "rhs": _jsonable(self.rhs),
            "abs_err": _float(self.abs_err),
            "rel_err": _float(self.rel_err),
            "tolerance": self.tolerance,
            "abs_tolerance": self.abs_tolerance,
            "pass": self.passed,
            "skipped": self.skipped,
            "notes": self.notes,
        }


def _float(x):
    x = float(x)
    if math.isinf(x) or math.isnan(x):
        return str(x)
    return float(f"{x:.6e}")


def _jsonable(x):
    if x is None:
        return None
    if is_exact(x):
        return str(x)
    z = complex(x)
    return [float(f"{z.real:.15e}"), float(f"{z.imag:.15e}")]


def make_report(
    name,
    lhs,
    rhs,
    tolerance=DEFAULT_REL_TOL,
    abs_tolerance=DEFAULT_ABS_TOL,
    anchor="",
    notes="",
    exact=None,
) -> CheckReport:
    """Compare two scalars. Exact scalars demand equality."""
    if exact is None:
        exact = is_exact(lhs) and is_exact(rhs)
    if exact:
        ok = lhs == rhs
        err = 0.0 if ok else abs(complex(lhs) - complex(rhs))
        scale = max(abs(complex(lhs)), abs(complex(rhs)))
        rel = err / scale if scale else (0.0 if ok else math.inf)
        return CheckReport(name, anchor, lhs, rhs, err, rel, 0.0, 0.0, bool(ok), notes)
    a, b = complex(lhs), complex(rhs)
    err = abs(a - b)
    scale = max(abs(a), abs(b))
    rel = err / scale if scale else (0.0 if err == 0 else math.inf)
    ok = err <= abs_tolerance or rel <= tolerance
    return CheckReport(name, anchor, lhs, rhs, err, rel, tolerance, abs_tolerance, bool(ok), notes)


def skipped_report(name, anchor, reason) -> CheckReport:
    return CheckReport(name, anchor, None, None, 0.0, 0.0, 0.0, 0.0, True, reason, True)


def _default_K(model):
    return model.pole_multiplicity_bound + 4


def _scalar_jet(fam: Jet, word):
    coeffs = []
    for c in fam.coeffs:
        coeffs.append(c.terms.get(word, 0) if isinstance(c, BElement) else (c if word == () else 0))
    return Jet(coeffs, 0, fam.order)


def _at_center(jet: Jet, z0):
    if not z0:
        return jet
    if jet.order is not None:
        raise InsufficientTruncation("a truncated coefficient family can only be expanded at z = 0")
    return jet.substitute(1, z0, z0)


def _check_truncation(A: Symbol, z0, model):
    if A.N is None:
        return
    need = complex(A.order.a).real + model.summability_degree - complex(A.order.q).real * complex(z0).real
    if not A.N > need:
        raise InsufficientTruncation(
            f"symbol truncated at N={A.N}; the remainder trace is analytic near z={z0!r} only for N > {need:g}"
        )


def tr_mer(A: Symbol, z0, model: TraceModel, K: int | None = None) -> MeroTrace:
    """Laurent germ of ``Tr(A(z))`` at ``z0``, assembled word by word."""
    K = _default_K(model) if K is None else K
    q = A.order.q
    if _is_zero(q):
        raise ValueError("tr_mer needs a non-constant affine order (q != 0)")
    _check_truncation(A, z0, model)
    bound = model.pole_multiplicity_bound
    total = LaurentJet.zero(z0, K)
    audit = []
    for (j, l), fam in sorted(A.terms.items()):
        shift = j - A.order.a
        s0 = q * z0 + shift
        words = set()
        for c in fam.coeffs:
            if isinstance(c, BElement):
                words.update(c.terms)
        for word in sorted(words):
            beta = _at_center(_scalar_jet(fam, word), z0)
            if not beta:
                continue
            g = model.word_trace(word, s0, bound, K + l + bound + 1)
            if g.pole_order > bound + 1:
                raise ModelContractViolation(
                    f"word trace pole of order {g.pole_order} exceeds the model bound {bound + 1}"
                )
            for _ in range(l):
                g = -g.derivative()
            g = g.recenter_affine(q, shift)
            g = LaurentJet(g.coeffs, g.pole_order, z0, g.order)
            part = (g * beta).truncate(K)
            audit.append(((j, l, word), part))
            total = total + part
    return MeroTrace(total, audit, A.remainder_order)


def _is_zero(x):
    if is_exact(x):
        return not x
    return abs(complex(x)) < 1e-15


def _weighted(A: Symbol) -> Symbol:
    return right_power(A, AffineOrder(0, 1))


def tau(j: int, A: Symbol, model: TraceModel, K: int | None = None):
    """``Res^{j+1}_0 Tr(A |D|^{-z})``; ``j = -1`` is the finite part."""
    if j < -1:
        raise ValueError("tau needs j >= -1")
    K = max(_default_K(model), j + 2) if K is None else K
    if j >= 0:
        # terms of order below -n have traces holomorphic at 0: no residues
        A = A.truncate(_residue_depth(A, model))
    return residue(tr_mer(_weighted(A), 0, model, K).germ, j)


def _residue_depth(A: Symbol, model):
    return math.floor(complex(A.order.a).real + model.summability_degree) + 1


def residue_theorem_check(
    A: Symbol, j: int, model: TraceModel, tolerance=DEFAULT_REL_TOL, abs_tolerance=DEFAULT_ABS_TOL
) -> CheckReport:
    """``Res^{j+1}_0 Tr(A(z))`` against ``sum_n tau_{j+n}(d^n(A(z)|D|^{qz})|_0)/(q^{j+n+1} n!)``."""
    k = model.pole_multiplicity_bound
    q = A.order.q
    if not complex(q).real > 0:
        raise ValueError("residue theorem check needs q > 0")
    lhs = residue(tr_mer(A, 0, model).germ, j)
    rhs = 0
    for n in range(0, k - j + 1):
        B = weighted_derivative_at_zero(A, n)
        rhs = rhs + tau(j + n, B, model) / (q ** (j + n + 1) * math.factorial(n))
    return make_report(
        f"residue theorem j={j}",
        lhs,
        rhs,
        tolerance,
        abs_tolerance,
        anchor=f"higher residue theorem, j={j}",
    )


def tau_perturbed(j: int, A: Symbol, P: Symbol, model: TraceModel, N: int):
    """``Res^{j+1}_0 Tr(A (|D|+P)^{-z})``."""
    pp = perturbed_power(P, N)
    prod = sym_mul(A, pp, N)
    K = max(_default_K(model), j + 2)
    return residue(tr_mer(prod, 0, model, K).germ, j)


def _perturbation_depth(A: Symbol, model, N):
    need = math.floor(complex(A.order.a).real + model.summability_degree) + 1
    return max(N, need)


def weight_discrepancy_check(
    j: int,
    A: Symbol,
    P: Symbol,
    model: TraceModel,
    N: int = 4,
    form: str = "series",
    tolerance=DEFAULT_REL_TOL,
    abs_tolerance=DEFAULT_ABS_TOL,
    M_ch: int | None = None,
) -> CheckReport:
    """``tau_j^{|D|+P}(A) - tau_j(A)`` against its expansion in higher residues.

    ``form="series"`` uses z-derivatives of ``(|D|+P)^{-z}|D|^z``;
    ``form="log"`` (k = 0, j = -1) uses ``tau_0(A (log|D| - log(|D|+P)))``.
    """
    k = model.pole_multiplicity_bound
    if not -1 <= j <= k:
        raise ValueError(f"weight discrepancy needs -1 <= j <= k={k}")
    N = _perturbation_depth(A, model, N)
    lhs = tau_perturbed(j, A, P, model, N) - tau(j, A, model)
    notes = ""
    if form == "series":
        pp = perturbed_power(P, N)
        rhs = 0
        for n in range(1, k - j + 1):
            W = weighted_derivative_at_zero(pp, n)
            rhs = rhs + tau(j + n, sym_mul(A, W, N), model) / math.factorial(n)
    elif form == "log":
        if k != 0 or j != -1:
            raise ValueError("the logarithmic form applies to k = 0, j = -1")
        ld = log_difference(P, N, max(4, N - 1) if M_ch is None else M_ch)
        rhs = -tau(0, sym_mul(A, ld, N), model)
        notes = "sign: tau_0(A (log|D| - log(|D|+P)))"
    else:
        raise ValueError(f"unknown form {form!r}")
    name = "weight invariance" if j == k else "weight discrepancy"
    return make_report(
        f"{name} j={j} ({form})", lhs, rhs, tolerance, abs_tolerance, anchor=f"{name}, j={j}", notes=notes
    )


def commutator_discrepancy_check(
    j: int,
    A: Symbol,
    B: Symbol,
    model: TraceModel,
    N: int = 8,
    form: str = "series",
    tolerance=DEFAULT_REL_TOL,
    abs_tolerance=DEFAULT_ABS_TOL,
) -> CheckReport:
    """``tau_j([A, B])`` against ``sum_n (-1)^{n+1} tau_{j+n}(A L^n(B))/n!``.

    ``form="sigma"`` obtains ``L^n(B)`` from z-derivatives of
    ``|D|^{-z} B |D|^z`` instead of iterated log-commutators.
    """
    k = model.pole_multiplicity_bound
    if not -1 <= j <= k:
        raise ValueError(f"commutator discrepancy needs -1 <= j <= k={k}")
    lhs = tau(j, sym_bracket(A, B, N), model)
    rhs = 0
    for n in range(1, k - j + 1):
        if form == "series":
            Ln = log_ad_power(B, n, N)
        elif form == "sigma":
            Ln = family_derivative_at_zero(sigma_conj(B, N), n).scale((-1) ** n)
        else:
            raise ValueError(f"unknown form {form!r}")
        rhs = rhs + tau(j + n, sym_mul(A, Ln, N), model) * ((-1) ** (n + 1)) / math.factorial(n)
    name = "commutator trace" if j == k else "commutator discrepancy"
    return make_report(
        f"{name} j={j} ({form})", lhs, rhs, tolerance, abs_tolerance, anchor=f"{name}, j={j}"
    )


def _fmt_order(a):
    if isinstance(a, QComplex) and not a.im:
        return str(a.re)
    if is_exact(a):
        return str(a)
    z = complex(a)
    return f"{z.real:.6g}" if z.imag == 0 else f"{z:.6g}"


def _order_at_zero(A: Symbol):
    return A.order.a


def _gate(A: Symbol, model):
    a = _order_at_zero(A)
    if model.in_dimension_spectrum(-a):
        raise OrderInDimensionSpectrum(f"order {a!r} lies in -Sd; the canonical trace is undefined there")


def canonical_trace(A, model: TraceModel, residue_tol: float = 1e-8):
    """``tau_{-1}(A)`` for an operator (or list of operators) with order outside -Sd."""
    parts = [A] if isinstance(A, Symbol) else list(A)
    for S in parts:
        _gate(S, model)
    total = 0
    for S in parts:
        germ = tr_mer(_weighted(S), 0, model).germ
        for jj in range(0, germ.pole_order):
            r = residue(germ, jj)
            if abs(complex(r)) > residue_tol:
                raise ModelContractViolation(
                    f"trace germ of an order-{S.order.a!r} operator has a pole at 0 (residue {r!r})"
                )
        total = total + residue(germ, -1)
    return total


def canonical_trace_commutator_check(
    A: Symbol, B: Symbol, model: TraceModel, N: int = 60, abs_tolerance: float = 1e-8
) -> CheckReport:
    """``|tau_{-1}([A, B])| <= abs_tolerance`` when ``ord A + ord B`` is outside -Sd."""
    total = A.order.a + B.order.a
    name = f"canonical trace of commutator, order {_fmt_order(total)}"
    if model.in_dimension_spectrum(-total):
        return skipped_report(name, "canonical trace vanishes on commutators", f"order {total} lies in -Sd")
    val = canonical_trace(sym_bracket(A, B, N), model)
    return make_report(
        name, val, 0, 0.0, abs_tolerance, anchor="canonical trace vanishes on commutators"
    )


def canonical_trace_weight_check(
    A: Symbol, P: Symbol, model: TraceModel, N: int = 4, abs_tolerance: float = 1e-8
) -> CheckReport:
    """``tau_{-1}^{|D|+P}(A) = tau_{-1}(A)`` for ``A`` with order outside -Sd."""
    name = f"canonical trace weight invariance, order {_fmt_order(A.order.a)}"
    _gate(A, model)
    N = _perturbation_depth(A, model, N)
    lhs = tau_perturbed(-1, A, P, model, N)
    rhs = canonical_trace(A, model)
    return make_report(name, lhs, rhs, 0.0, abs_tolerance, anchor="canonical trace is weight invariant")

