"""Seeded verification batteries on the circle model.

Every suite is a pure function of its settings and seed, so two runs with
the same configuration produce identical reports.
"""

from __future__ import annotations

import math
import random
from dataclasses import asdict, dataclass, field
from fractions import Fraction

import numpy as np

from .circle import CircleModel, commutator_with_abs_d, e, realize
from .jetring import Backend, Jet, binom_jet, gamma_ratio_jet
from .ncalg import BElement, Generator, algebra_config, delta, family
from .symbols import (
    AffineOrder,
    Symbol,
    commute_log,
    commute_power,
    family_derivative_at_zero,
    log_commutator_coefficient,
    perturbed_power,
)
from .zetatrace import (
    CheckReport,
    OrderInDimensionSpectrum,
    canonical_trace,
    canonical_trace_commutator_check,
    canonical_trace_weight_check,
    commutator_discrepancy_check,
    make_report,
    residue_theorem_check,
    weight_discrepancy_check,
)

SUITES = ("residue-theorem", "weight-discrepancy", "commutator-discrepancy", "canonical-trace", "model")


@dataclass
class Settings:
    # model
    mode_cutoff: int = 512
    asym_order: int = 24
    em_depth: int = 8
    head_cutoff: int = 32
    oracle_cutoff: int = 64
    backend: str = "float"
    # calculus
    N: int = 4
    commutator_N: int = 60
    M_ch: int = 4
    pole_bound: int = 0
    # battery
    seed: int = 20240601
    families: int = 16
    # tolerances
    rel_tol: float = 1e-6
    abs_tol: float = 1e-9
    invariance_tol: float = 1e-8
    oracle_tol: float = 1e-8
    consistency_tol: float = 1e-10
    extra: dict = field(default_factory=dict)

    def model(self) -> CircleModel:
        return CircleModel(
            mode_cutoff=self.mode_cutoff,
            asym_order=self.asym_order,
            em_depth=self.em_depth,
            head_cutoff=self.head_cutoff,
            oracle_cutoff=self.oracle_cutoff,
            backend=Backend(self.backend),
            pole_multiplicity_bound=self.pole_bound,
        )

    def coerce(self, x):
        return Backend(self.backend).coerce(x)

    def to_dict(self):
        d = asdict(self)
        d.pop("extra")
        return d


def _mismatches(x, y):
    """Number of differing coefficients between two symbols (0 means equal)."""
    keys = set(x.terms) | set(y.terms)
    bad = sum(x.terms.get(k) != y.terms.get(k) for k in keys)
    return bad + (x.order != y.order) + (x.N != y.N)


def _random_word(rng, length):
    return tuple(
        Generator(rng.choice("ab"), rng.random() < 0.3, rng.randint(0, 1)) for _ in range(length)
    )


def run_exact_identities(st: Settings, cases: int = 12) -> list[CheckReport]:
    """Exact identities of the symbol calculus, compared by exact equality."""
    rng = random.Random(st.seed)
    anchor = "exact symbolic calculus"
    reports = []

    def exact(name, lhs, rhs):
        reports.append(make_report(name, lhs, rhs, anchor=anchor, exact=True))

    # |D|^{-beta} (|D|^beta b) = b to N terms
    for i in range(cases):
        w = _random_word(rng, rng.randint(1, 3))
        beta = Fraction(rng.randint(-6, 6), rng.randint(1, 4))
        N = rng.randint(1, 5)
        b = Symbol.element(BElement.word(w))
        back = commute_power(-beta, commute_power(beta, b, N), N)
        exact(f"power round trip beta={beta} N={N} [{_wname(w)}]", _mismatches(back, b.truncate(N)), 0)

    # delta^k(xy) = sum_i C(k,i) delta^i(x) delta^{k-i}(y)
    for i in range(cases):
        x = BElement.word(_random_word(rng, rng.randint(1, 2)), Fraction(rng.randint(1, 5), 3))
        y = BElement.word(_random_word(rng, rng.randint(1, 2))) + BElement.unit(Fraction(1, 2))
        k = rng.randint(1, 4)
        rhs = BElement()
        for m in range(k + 1):
            rhs = rhs + math.comb(k, m) * (delta(x, m) * delta(y, k - m))
        diff = delta(x * y, k) - rhs
        exact(f"delta Leibniz k={k} [{x!r} * {y!r}]", len(diff), 0)

    # C(a+1, k) = C(a, k) + C(a, k-1)
    for k in range(1, 9):
        lhs = binom_jet(k).substitute(1, 1)
        rhs = binom_jet(k) + binom_jet(k - 1)
        exact(f"binomial jet recurrence k={k}", int(lhs != rhs), 0)

    # Gamma(z+m+1)/Gamma(z) = (z+m) Gamma(z+m)/Gamma(z)
    for m in range(0, 8):
        lhs = gamma_ratio_jet(m + 1)
        rhs = gamma_ratio_jet(m) * Jet([m, 1])
        exact(f"gamma ratio factorization m={m}", int(lhs != rhs), 0)

    # log|D| b two ways: the log-commutator series, and d/dz of |D|^z b at 0
    for k, want in ((1, Fraction(1)), (2, Fraction(-1, 2)), (3, Fraction(1, 3))):
        exact(f"log commutator coefficient k={k}", log_commutator_coefficient(k), want)
    for i in range(cases // 2):
        w = _random_word(rng, rng.randint(1, 3))
        N = rng.randint(2, 5)
        b = Symbol.element(BElement.word(w))
        series = commute_log(b, N)
        derived = family_derivative_at_zero(commute_power(AffineOrder(0, -1), b, N), 1)
        exact(f"log commutation equals power derivative N={N} [{_wname(w)}]", _mismatches(series, derived), 0)

    # (|D| + P)^{-z} at z = 0 is the identity
    for i in range(cases // 2):
        P = Symbol.element(
            BElement.word(_random_word(rng, 1), Fraction(rng.randint(1, 4), 7)) + BElement.unit(Fraction(1, 5))
        )
        N = rng.randint(2, 5)
        pp = perturbed_power(P, N)
        at0 = Symbol(AffineOrder(0, 0), {key: Jet([fam[0]]) for key, fam in pp.terms.items()}, N)
        exact(f"perturbed power at z=0 is the unit N={N} [{P.coefficient(0)[0]!r}]", _mismatches(at0, Symbol.unit().truncate(N)), 0)
    return reports


def word_pool():
    """Zero-shift elements of length <= 2 (plus one shifted word)."""
    return [
        BElement.unit(),
        e(1) * e(-1, 1),
        e(1, 1) * e(-1),
        e(1, 1) * e(-1, 1),
        e(-1) * e(1, 1),
        e(2) * e(-2, 2),
        e(1, bracket=True) * e(-1),
        e(-1, 1, bracket=True) * e(1, 1),
        e(1, 2) * e(-1),
        e(3),
    ]


def _rand_coeff(rng, st):
    return st.coerce(Fraction(rng.randint(-4, 4) or 1, rng.randint(1, 3)))


def _rand_element(rng, st, pool):
    b = pool[rng.randrange(len(pool))]
    return b * _rand_coeff(rng, st)


def residue_families(st: Settings):
    """At least 12 families over orders {-1/2, 0, 1, 3/2} and slopes {1, 2}."""
    rng = random.Random(st.seed)
    pool = word_pool()
    orders = [Fraction(-1, 2), Fraction(0), Fraction(1), Fraction(3, 2)]
    out = []
    i = 0
    while len(out) < st.families:
        a = orders[i % 4]
        q = 1 + (i // 4) % 2
        i += 1
        terms = {}
        for j in range(rng.randint(1, 2)):
            deg = rng.randint(0, 2)
            coeffs = [_rand_element(rng, st, pool) for _ in range(deg + 1)]
            terms[(j, 0)] = family(*coeffs)
        out.append((f"a={a} q={q} #{len(out)}", Symbol(AffineOrder(st.coerce(a), q), terms)))
    return out


def run_residue_theorem(st: Settings):
    model = st.model()
    k = model.pole_multiplicity_bound
    reports = []
    fams = residue_families(st)
    # constant-family collapse: A(z) = A0 |D|^{-z}
    A0 = Symbol.element(e(1) * e(-1, 1) + BElement.unit(), AffineOrder(1, 1))
    fams.append(("constant family", A0))
    for label, A in fams:
        for j in range(-1, k + 1):
            r = residue_theorem_check(A, j, model, st.rel_tol, st.abs_tol)
            r.check_name = f"{r.check_name} [{label}]"
            reports.append(r)
    return reports


def weight_operators(st: Settings):
    c = st.coerce
    return [
        ("|D|", Symbol.element(BElement.unit(), AffineOrder(c(1), 0))),
        ("d(e1)d(e-1)|D|", Symbol.element(e(1, 1) * e(-1, 1), AffineOrder(c(1), 0))),
        ("([D,e1]e-1 + 1)|D|^2", Symbol.element(e(1, bracket=True) * e(-1) + BElement.unit(), AffineOrder(c(2), 0))),
        ("e1 + d(e-1)", Symbol.element(e(1) + e(-1, 1), AffineOrder(c(0), 0))),
        ("e-1 d(e1) |D|^(-1/2)", Symbol.element(e(-1) * e(1, 1), AffineOrder(c(Fraction(-1, 2)), 0))),
    ]


def perturbations(st: Settings):
    c = st.coerce
    return [
        ("cos/10", Symbol.element(e(1, c=c(Fraction(1, 20))) + e(-1, c=c(Fraction(1, 20))))),
        ("1", Symbol.element(BElement.unit(c(1)))),
        ("mixed", Symbol.element(e(2, c=c(Fraction(1, 10))) + e(-1, 1, c=c(Fraction(1, 5))) + BElement.unit(c(Fraction(1, 3))))),
    ]


def run_weight_discrepancy(st: Settings):
    model = st.model()
    k = model.pole_multiplicity_bound
    reports = []
    for an, A in weight_operators(st):
        for pn, P in perturbations(st):
            for form in ("series", "log") if k == 0 else ("series",):
                r = weight_discrepancy_check(-1, A, P, model, st.N, form, st.rel_tol, st.abs_tol, st.M_ch)
                r.check_name += f" [A={an}, P={pn}]"
                reports.append(r)
            r = weight_discrepancy_check(k, A, P, model, st.N, "series", 0.0, st.invariance_tol)
            r.check_name += f" [A={an}, P={pn}]"
            reports.append(r)
    zero = Symbol.zero()
    r = weight_discrepancy_check(-1, weight_operators(st)[0][1], zero, model, st.N)
    r.check_name += " [P=0]"
    reports.append(r)
    return reports


def commutator_pairs(st: Settings):
    c = st.coerce
    h = Fraction(1, 2)

    def op(b, o):
        return Symbol.element(b, AffineOrder(c(o), 0))

    return [
        ("e1|D|, e-1", op(e(1), 1), op(e(-1), 0)),
        ("e-1, e1|D|", op(e(-1), 0), op(e(1), 1)),
        ("e1|D|^2, e-1|D|^-1", op(e(1), 2), op(e(-1), -1)),
        ("e1|D|^3/2, e-1|D|^-1/2", op(e(1), 3 * h), op(e(-1), -h)),
        ("(e1+e-1)|D|, e1+e-1", op(e(1) + e(-1), 1), op(e(1) + e(-1), 0)),
        ("e1|D|^1/2, d(e-1)|D|^1/2", op(e(1), h), op(e(-1, 1), h)),
        ("A=B", op(e(1) + e(-1), 1), op(e(1) + e(-1), 1)),
        ("B central", op(e(1) * e(-1, 1), 1), op(BElement.unit(), 0)),
    ]


def run_commutator_discrepancy(st: Settings):
    model = st.model()
    k = model.pole_multiplicity_bound
    reports = []
    with algebra_config(max_delta=st.commutator_N + 8):
        for name, A, B in commutator_pairs(st):
            for form in ("series", "sigma"):
                r = commutator_discrepancy_check(-1, A, B, model, st.commutator_N, form, st.rel_tol, st.abs_tol)
                r.check_name += f" [{name}]"
                reports.append(r)
            r = commutator_discrepancy_check(k, A, B, model, st.commutator_N, "series", 0.0, st.invariance_tol)
            r.check_name += f" [{name}]"
            reports.append(r)
    return reports


def canonical_pairs(st: Settings):
    c = st.coerce
    f = Fraction
    return [
        ("e1|D|^-1/2, e-1|D|^-1/4", e(1), f(-1, 2), e(-1), f(-1, 4)),
        ("e2|D|^1/3, e-2|D|^1/3", e(2), f(1, 3), e(-2), f(1, 3)),
        ("e1|D|^-3/2, d(e-1)|D|^-3/2", e(1), f(-3, 2), e(-1, 1), f(-3, 2)),
        ("e1 d(e-1)|D|^1/2, e1|D|^0", e(1) * e(-1, 1), f(1, 2), e(1) + e(-1), f(0)),
        ("d(e1)|D|^3/4, e-1|D|^1/2", e(1, 1), f(3, 4), e(-1), f(1, 2)),
        ("e1|D|^-1, e-1|D|^-2", e(1), f(-1), e(-1), f(-2)),
        ("[D,e1]|D|^-1/3, e-1|D|^-1/3", e(1, bracket=True), f(-1, 3), e(-1), f(-1, 3)),
    ], c


def run_canonical_trace(st: Settings):
    model = st.model()
    reports = []
    pairs, c = canonical_pairs(st)
    with algebra_config(max_delta=st.commutator_N + 8):
        for name, a, oa, b, ob in pairs:
            A = Symbol.element(a, AffineOrder(c(oa), 0))
            B = Symbol.element(b, AffineOrder(c(ob), 0))
            r = canonical_trace_commutator_check(A, B, model, st.commutator_N, st.invariance_tol)
            r.check_name += f" [{name}]"
            reports.append(r)
        # orders summing into -Sd: the check must be skipped
        A = Symbol.element(e(1), AffineOrder(c(Fraction(1, 2)), 0))
        B = Symbol.element(e(-1), AffineOrder(c(Fraction(1, 2)), 0))
        r = canonical_trace_commutator_check(A, B, model, st.commutator_N, st.invariance_tol)
        reports.append(
            make_report(
                "canonical trace gate skips orders in -Sd",
                int(r.skipped),
                1,
                anchor="canonical trace vanishes on commutators",
                notes=r.notes,
            )
        )
    ops = [
        ("|D|^-1/2", BElement.unit(), Fraction(-1, 2)),
        ("e1 d(e-1)|D|^1/2", e(1) * e(-1, 1), Fraction(1, 2)),
        ("d(e1)d(e-1)|D|^3/2", e(1, 1) * e(-1, 1), Fraction(3, 2)),
        ("(1 + e-1 d(e1))|D|^-3", BElement.unit() + e(-1) * e(1, 1), Fraction(-3)),
        ("[D,e1]e-1 |D|^1/3", e(1, bracket=True) * e(-1), Fraction(1, 3)),
    ]
    for on, b, o in ops:
        A = Symbol.element(b, AffineOrder(c(o), 0))
        for pn, P in perturbations(st)[:2]:
            r = canonical_trace_weight_check(A, P, model, st.N, st.invariance_tol)
            r.check_name += f" [A={on}, P={pn}]"
            reports.append(r)
    # the gate rejects an order inside -Sd
    try:
        canonical_trace(Symbol.power(AffineOrder(c(1), 0)), model)
        rejected = 0
        note = "no error raised"
    except OrderInDimensionSpectrum as exc:
        rejected = 1
        note = str(exc)
    reports.append(make_report("canonical trace gate rejects |D|", rejected, 1, anchor="canonical trace domain", notes=note))
    return reports


def model_constants(st: Settings, model=None):
    """Residues at 1 and -1 and the value at 0 of Tr(|D|^{-w}), by both routes."""
    model = model or st.model()
    unit = ()
    out = []
    g1 = model.word_trace(unit, 1, K=1)
    gm1 = model.word_trace(unit, -1, K=1)
    g0 = model.word_trace(unit, 0, K=1)
    o1 = model.oracle_laurent(unit, 1, K=0)
    om1 = model.oracle_laurent(unit, -1, K=0)
    o0 = model.oracle_trace(unit, 0)
    tol = st.oracle_tol
    out.append(make_report("Res_{w=1} Tr|D|^-w (continuation)", g1.coefficient(-1), 2, tol, tol, anchor="circle zeta constants"))
    out.append(make_report("Res_{w=1} Tr|D|^-w (oracle)", o1[-1], 2, tol, tol, anchor="circle zeta constants"))
    out.append(make_report("Res_{w=-1} Tr|D|^-w (continuation)", gm1.coefficient(-1), 1, tol, tol, anchor="circle zeta constants"))
    out.append(make_report("Res_{w=-1} Tr|D|^-w (oracle)", om1[-1], 1, tol, tol, anchor="circle zeta constants"))
    out.append(make_report("Tr|D|^-w at w=0 (continuation)", g0.coefficient(0), 0, tol, tol, anchor="circle zeta constants"))
    out.append(make_report("Tr|D|^-w at w=0 (oracle)", o0, 0, tol, tol, anchor="circle zeta constants"))
    out.append(make_report("finite part at w=1: continuation vs oracle", g1.coefficient(0), o1[0], tol, tol, anchor="circle zeta constants"))
    out.append(make_report("finite part at w=-1: continuation vs oracle", gm1.coefficient(0), om1[0], tol, tol, anchor="circle zeta constants"))
    return out


def model_words():
    words = []
    for b in word_pool():
        for w in b.terms:
            if w not in words:
                words.append(w)
    return words


def sample_points(n=20):
    """Points in the convergence half-plane Re s > 1."""
    pts = []
    for i in range(n):
        re = 1.5 + 0.25 * i
        im = [0.0, 0.5, -1.0, 2.0][i % 4]
        pts.append(complex(re, im))
    return pts


def run_model(st: Settings):
    model = st.model()
    k = model.pole_multiplicity_bound
    reports = list(model_constants(st, model))
    words = [w for w in model_words() if len(w) <= 4]
    # pole simplicity on scanned integer centers
    for w in words:
        worst = 0
        for center in (1, 0, -1, -2, -3):
            worst = max(worst, model.word_trace(w, center, k, K=0).pole_order)
        reports.append(
            make_report(f"pole order <= {k + 1} on centers 1..-3 [{_wname(w)}]", int(worst <= k + 1), 1, anchor="simple dimension spectrum", notes=f"max pole order {worst}")
        )
    # continuation vs oracle on the convergence half-plane
    for i, s in enumerate(sample_points()):
        w = words[i % len(words)]
        lhs = model.word_trace(w, s, k, K=0).coefficient(0)
        rhs = model.oracle_trace(w, s)
        reports.append(make_report(f"word trace vs oracle at s={s} [{_wname(w)}]", lhs, rhs, st.oracle_tol, 1e-14, anchor="model honesty"))
    # delta realized as the commutator with |D|
    C = st.mode_cutoff
    for b in word_pool():
        direct = realize(delta(b), C)
        comm = commutator_with_abs_d(realize(b, C))
        margin = 4
        lo, hi = margin, 2 * C + 1 - margin
        err = 0.0
        for kk in set(direct.bands) | set(comm.bands):
            x = direct.bands.get(kk, np.zeros(2 * C + 1))[lo:hi]
            y = comm.bands.get(kk, np.zeros(2 * C + 1))[lo:hi]
            err = max(err, float(np.max(np.abs(x - y))) if len(x) else 0.0)
        reports.append(make_report(f"delta vs commutator with |D| [{b!r}]", err, 0.0, 0.0, st.consistency_tol, anchor="delta is the commutator with |D|"))
    return reports


def _wname(w):
    from .ncalg import word_str

    return word_str(w)


RUNNERS = {
    "residue-theorem": run_residue_theorem,
    "weight-discrepancy": run_weight_discrepancy,
    "commutator-discrepancy": run_commutator_discrepancy,
    "canonical-trace": run_canonical_trace,
    "model": run_model,
}


def run_suite(name: str, st: Settings) -> list[CheckReport]:
    return RUNNERS[name](st)
