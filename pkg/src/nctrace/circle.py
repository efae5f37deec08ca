"""The circle spectral triple.

Generators ``e{k}`` act on the Fourier basis by ``e_k: |n> -> |n+k>``, ``D`` is
``-i d/dtheta`` (so ``[D, e_k] = k e_k``) and ``|D| = sqrt(1 + n^2)``. A word
with zero net shift is diagonal with entries ``d(n)``. Its zeta trace

    T(s) = sum_n d(n) (1 + n^2)^{-s/2}

is continued by splitting off a head ``|n| <= N0`` and expanding the tail
``e(m) = d(m) + d(-m)`` in powers of ``1/m``; the tail then becomes a finite
sum of Hurwitz zeta values with polynomial coefficients.

An independent oracle sums the series directly, corrects the tail by
Euler-Maclaurin and continues the tail integral through incomplete beta
functions built from a sympy expansion of the diagonal.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache

import mpmath
import numpy as np
import sympy

from .jetring import Backend, LaurentJet, QComplex, _binom_coeffs
from .ncalg import BElement, Generator
from .zetatrace import ModelContractViolation

DPS = 30


class InsufficientDepth(ValueError):
    """Asymptotic or Euler-Maclaurin depth too small for the request."""


def e(k: int, delta: int = 0, bracket: bool = False, c=1) -> BElement:
    """``delta^delta(e_k)`` or ``delta^delta([D, e_k])`` as an algebra element."""
    return BElement.gen(f"e{k}", bracket, delta, c)


def shift_of(g: Generator) -> int:
    if not g.base.startswith("e"):
        raise ValueError(f"circle model has no generator {g.base!r}")
    return int(g.base[1:])


def net_shift(word) -> int:
    return sum(shift_of(g) for g in word)


def _offsets(word):
    """Pairs (generator, shift already applied to its right)."""
    out = []
    acc = 0
    for g in reversed(word):
        out.append((g, acc))
        acc += shift_of(g)
    out.reverse()
    return out


def _lam(n):
    return math.sqrt(1.0 + float(n) * float(n))


def _mp(x):
    if isinstance(x, QComplex):
        return mpmath.mpc(mpmath.mpf(x.re.numerator) / x.re.denominator, mpmath.mpf(x.im.numerator) / x.im.denominator)
    if isinstance(x, Fraction):
        return mpmath.mpf(x.numerator) / x.denominator
    if isinstance(x, int):
        return mpmath.mpf(x)
    return mpmath.mpmathify(x)


def _exact_int(x):
    """Integer value of ``x`` if it is (numerically) an integer."""
    if isinstance(x, QComplex):
        return int(x.re) if x.im == 0 and x.re.denominator == 1 else None
    if isinstance(x, Fraction):
        return int(x) if x.denominator == 1 else None
    if isinstance(x, int):
        return x
    z = complex(x)
    r = round(z.real)
    if abs(z.imag) < 1e-12 and abs(z.real - r) < 1e-12:
        return int(r)
    return None


# banded operators


@dataclass
class BandedOp:
    """Operator on modes ``-cutoff..cutoff``; ``bands[k][n + cutoff]`` maps |n> to |n+k>."""

    cutoff: int
    bands: dict = field(default_factory=dict)

    @property
    def size(self):
        return 2 * self.cutoff + 1

    @classmethod
    def identity(cls, cutoff):
        return cls(cutoff, {0: np.ones(2 * cutoff + 1, dtype=complex)})

    @classmethod
    def diagonal(cls, cutoff, values):
        return cls(cutoff, {0: np.asarray(values, dtype=complex)})

    def _valid(self, k):
        n = np.arange(-self.cutoff, self.cutoff + 1)
        return (n + k >= -self.cutoff) & (n + k <= self.cutoff)

    def __add__(self, other):
        bands = {k: v.copy() for k, v in self.bands.items()}
        for k, v in other.bands.items():
            bands[k] = bands[k] + v if k in bands else v.copy()
        return BandedOp(self.cutoff, bands)

    def __sub__(self, other):
        return self + other.scale(-1)

    def scale(self, c):
        return BandedOp(self.cutoff, {k: v * c for k, v in self.bands.items()})

    def __matmul__(self, other):
        """``self @ other``: apply ``other`` first."""
        out = {}
        C = self.cutoff
        for kb, wb in other.bands.items():
            wb = wb * self._valid(kb)
            for ka, wa in self.bands.items():
                # source n -> n+kb -> n+kb+ka
                w = np.zeros(self.size, dtype=complex)
                lo = max(0, -kb)
                hi = min(self.size, self.size - kb)
                w[lo:hi] = wb[lo:hi] * wa[lo + kb : hi + kb]
                k = ka + kb
                out[k] = out[k] + w if k in out else w
        return BandedOp(C, out)

    def support(self):
        return max((abs(k) for k in self.bands), default=0)

    def to_dense(self):
        M = np.zeros((self.size, self.size), dtype=complex)
        idx = np.arange(self.size)
        for k, w in self.bands.items():
            ok = self._valid(k)
            M[idx[ok] + k, idx[ok]] = w[ok]
        return M

    def diagonal_values(self):
        return self.bands.get(0, np.zeros(self.size, dtype=complex)) * self._valid(0)

    def trace(self):
        return complex(self.diagonal_values().sum())


def abs_d_diagonal(cutoff):
    n = np.arange(-cutoff, cutoff + 1, dtype=float)
    return np.sqrt(1.0 + n * n)


def realize_generator(g: Generator, cutoff: int) -> BandedOp:
    s = shift_of(g)
    n = np.arange(-cutoff, cutoff + 1, dtype=float)
    w = (np.sqrt(1.0 + (n + s) ** 2) - np.sqrt(1.0 + n * n)) ** g.delta
    w = w.astype(complex)
    if g.bracket:
        w = w * s
    return BandedOp(cutoff, {s: w})


def realize(x, cutoff: int = 512) -> BandedOp:
    """Banded matrix of a word (tuple of generators) or of an algebra element."""
    if isinstance(x, BElement):
        out = BandedOp(cutoff, {})
        for w, c in x.items():
            out = out + realize(w, cutoff).scale(complex(c))
        return out
    op = BandedOp.identity(cutoff)
    for g in x:
        op = op @ realize_generator(g, cutoff)
    return op


def commutator_with_abs_d(op: BandedOp) -> BandedOp:
    lam = abs_d_diagonal(op.cutoff)
    out = {}
    for k, w in op.bands.items():
        tgt = np.zeros_like(lam)
        lo = max(0, -k)
        hi = min(op.size, op.size - k)
        tgt[lo:hi] = lam[lo + k : hi + k]
        out[k] = w * (tgt - lam)
    return BandedOp(op.cutoff, out)


# power series in x = 1/m with Fraction coefficients


def _ps_mul(a, b, R):
    out = [Fraction(0)] * (R + 1)
    for i, ai in enumerate(a[: R + 1]):
        if ai:
            for j in range(0, R + 1 - i):
                if j < len(b):
                    out[i + j] += ai * b[j]
    return out


def _ps_sqrt1(f, R):
    """sqrt of a series with constant term 1."""
    g = [Fraction(1)] + [Fraction(0)] * R
    for n in range(1, R + 1):
        acc = f[n] if n < len(f) else Fraction(0)
        for k in range(1, n):
            acc -= g[k] * g[n - k]
        g[n] = acc / 2
    return g


@lru_cache(maxsize=None)
def _L_series(a: int, R: int):
    """``sqrt(1 + 2 a x + (a^2 + 1) x^2)`` to order R."""
    return tuple(_ps_sqrt1([Fraction(1), Fraction(2 * a), Fraction(a * a + 1)], R))


@lru_cache(maxsize=None)
def _difference_series(a: int, b: int, R: int):
    """``(L_a - L_b)/x``, i.e. ``lambda(m+a) - lambda(m+b)`` in powers of 1/m."""
    la = _L_series(a, R + 1)
    lb = _L_series(b, R + 1)
    return tuple(la[i + 1] - lb[i + 1] for i in range(R + 1))


def _branch_series(word, R, sign):
    out = [Fraction(1)] + [Fraction(0)] * R
    for g, c in _offsets(word):
        s = shift_of(g)
        if g.delta:
            f = list(_difference_series(sign * (c + s), sign * c, R))
            p = [Fraction(1)] + [Fraction(0)] * R
            for _ in range(g.delta):
                p = _ps_mul(p, f, R)
            out = _ps_mul(out, p, R)
        if g.bracket:
            out = [v * s for v in out]
    return out


@lru_cache(maxsize=4096)
def diag_asymptotics(word, M: int):
    """Exact coefficients of ``d(m)`` and ``d(-m)`` in powers of ``1/m`` up to ``m^-M``.

    Returns ``(plus, minus)``; ``e(m) = d(m) + d(-m)`` is their sum.
    """
    if net_shift(word) != 0:
        raise ValueError("diagonal asymptotics need a word with zero net shift")
    return tuple(_branch_series(word, M, 1)), tuple(_branch_series(word, M, -1))


def _mp_diag(word, n):
    """``d(n)`` in mpmath precision."""
    val = mpmath.mpf(1)
    for g, c in _offsets(word):
        s = shift_of(g)
        if g.delta:
            val *= (mpmath.sqrt(1 + mpmath.mpf(n + c + s) ** 2) - mpmath.sqrt(1 + mpmath.mpf(n + c) ** 2)) ** g.delta
        if g.bracket:
            val *= s
    return val


@lru_cache(maxsize=None)
def _binom_in_s(i):
    """``C(-s/2, i)`` as a polynomial in s (Fraction coefficients, ascending)."""
    return tuple(c * Fraction(-1, 2) ** m for m, c in enumerate(_binom_coeffs(i)))


def _taylor_shift(poly, s0):
    """Taylor coefficients at ``s0`` of a polynomial given in powers of s."""
    out = []
    for k in range(len(poly)):
        acc = mpmath.mpf(0)
        for m in range(k, len(poly)):
            if poly[m]:
                acc += math.comb(m, k) * _mp(poly[m]) * s0 ** (m - k)
        out.append(acc)
    return out


@lru_cache(maxsize=8192)
def _zeta_germ(t0_key, a: int, K: int):
    """Hurwitz zeta germ at ``t0``: (residue, [taylor_0..taylor_K])."""
    t0, pole = t0_key
    with mpmath.workdps(DPS):
        if pole:
            coeffs = [(-1) ** n * mpmath.stieltjes(n, a) / mpmath.factorial(n) for n in range(K + 1)]
            return 1, tuple(coeffs)
        t = _mp(t0)
        coeffs = [mpmath.zeta(t, a, n) / mpmath.factorial(n) for n in range(K + 1)]
        return 0, tuple(coeffs)


@dataclass
class CircleModel:
    """Trace model of the circle with ``|D| = sqrt(1 + n^2)``."""

    mode_cutoff: int = 512
    asym_order: int = 24
    em_depth: int = 8
    head_cutoff: int = 32
    oracle_cutoff: int = 64
    backend: Backend = Backend.FLOAT

    # declared bound k on pole multiplicity (poles of order <= k + 1)
    pole_multiplicity_bound: int = 0

    summability_degree = 1

    # dimension spectrum

    def in_dimension_spectrum(self, x) -> bool:
        """Poles of word traces sit at integers ``<= 1``."""
        n = _exact_int(x)
        return n is not None and n <= 1

    def dimension_spectrum(self, lo: int, hi: int):
        return [n for n in range(int(math.ceil(lo)), int(math.floor(hi)) + 1) if n <= 1]

    # main continuation

    def _tail_depth(self, s0):
        re = complex(_mp(s0)).real if not isinstance(s0, (int, Fraction)) else float(s0)
        M = max(1, math.ceil(13.5 - re))
        if M > self.asym_order:
            raise InsufficientDepth(
                f"center Re s = {re:g} needs asymptotic order {M}, model has asym_order={self.asym_order}"
            )
        return M

    def word_trace(self, word, center, pole_bound: int | None = None, K: int = 4) -> LaurentJet:
        """Laurent germ of ``s -> Tr(word |D|^{-s})`` at ``center`` through ``(s-center)^K``."""
        word = tuple(word)
        if net_shift(word) != 0:
            return LaurentJet.zero(center, K)
        M = self._tail_depth(center)
        N0 = self.head_cutoff
        with mpmath.workdps(DPS):
            s0 = _mp(center)
            lo = [mpmath.mpf(0)] * (K + 2)  # exponents -1..K
            # head
            for n in range(-N0, N0 + 1):
                d = _mp_diag(word, n)
                if not d:
                    continue
                loglam = mpmath.log(1 + mpmath.mpf(n) ** 2) / 2
                base = d * mpmath.exp(-s0 * loglam)
                term = base
                for k in range(K + 1):
                    lo[k + 1] += term
                    term = term * (-loglam) / (k + 1)
            # tail
            plus, minus = diag_asymptotics(word, M)
            ecoef = [plus[r] + minus[r] for r in range(M + 1)]
            for p in range(M + 1):
                poly = [Fraction(0)] * (p // 2 + 1)
                for i in range(p // 2 + 1):
                    cr = ecoef[p - 2 * i]
                    if cr:
                        for m, b in enumerate(_binom_in_s(i)):
                            poly[m] += cr * b
                if not any(poly):
                    continue
                qs = _taylor_shift(poly, s0)
                t0_int = _exact_int(center)
                pole = t0_int is not None and t0_int + p == 1
                key = (center + p, pole) if not pole else (1, True)
                res, zc = _zeta_germ(_hashable(key), N0 + 1, K)
                for k, qk in enumerate(qs):
                    if k <= K + 1 and res:
                        lo[k] += qk * res
                    for e in range(k, K + 1):
                        lo[e + 1] += qk * zc[e - k]
            coeffs = [complex(v) for v in lo]
        out = LaurentJet(coeffs, 1, center, K)
        bound = self.pole_multiplicity_bound if pole_bound is None else pole_bound
        if out.pole_order > bound + 1:
            raise ModelContractViolation(
                f"pole of order {out.pole_order} at {center!r} exceeds multiplicity bound {bound + 1}"
            )
        return out

    # independent oracle

    def _continuous_diag(self, word):
        offs = [(shift_of(g), c, g.delta, g.bracket) for g, c in _offsets(word)]

        def d(x):
            val = mpmath.mpf(1)
            for s, c, dl, br in offs:
                if dl:
                    val *= (mpmath.sqrt(1 + (x + c + s) ** 2) - mpmath.sqrt(1 + (x + c) ** 2)) ** dl
                if br:
                    val *= s
            return val

        return d

    def oracle_trace(self, word, s, series_order: int = 16):
        """``Tr(word |D|^{-s})`` by direct summation plus an Euler-Maclaurin tail."""
        word = tuple(word)
        if net_shift(word) != 0:
            return 0j
        N1 = self.oracle_cutoff
        with mpmath.workdps(DPS):
            s = _mp(s)
            d = self._continuous_diag(word)

            def g(x):
                return (d(x) + d(-x)) * (1 + x * x) ** (-s / 2)

            total = d(mpmath.mpf(0))
            for m in range(1, N1 + 1):
                total += g(mpmath.mpf(m))
            total += self._oracle_integral(word, g, s, series_order)
            total -= g(mpmath.mpf(N1)) / 2
            ders = mpmath.diffs(g, mpmath.mpf(N1), 2 * self.em_depth - 1)
            ders = list(ders)
            for p in range(1, self.em_depth + 1):
                total -= mpmath.bernoulli(2 * p) / mpmath.factorial(2 * p) * ders[2 * p - 1]
            return complex(total)

    def _oracle_integral(self, word, g, s, R):
        N1 = self.oracle_cutoff
        if mpmath.re(s) > 2.5:
            return mpmath.quad(g, [N1, 2 * N1, mpmath.inf])
        if R + float(mpmath.re(s)) < 8:
            raise InsufficientDepth(
                f"oracle series order {R} too small at Re s = {float(mpmath.re(s)):g}; "
                f"need at least {math.ceil(8 - float(mpmath.re(s)))}"
            )
        coeffs = _sympy_tail_series(word, R)
        tN = mpmath.mpf(1) / (1 + N1 * N1)
        out = mpmath.mpf(0)
        for r, gr in enumerate(coeffs):
            if gr == 0:
                continue
            a = (s + r - 1) / 2
            b = mpmath.mpf(1 - r) / 2
            out += _mp(Fraction(int(gr.p), int(gr.q))) * _incomplete_beta(tN, a, b) / 2
        return out

    def oracle_laurent(self, word, center, K: int = 2, radius: float = 0.5, points: int = 64):
        """Laurent coefficients ``{e: c_e}`` for ``-2 <= e <= K`` by a trapezoid contour."""
        c0 = complex(_mp(center))
        vals = []
        for j in range(points):
            u = radius * complex(math.cos(2 * math.pi * j / points), math.sin(2 * math.pi * j / points))
            vals.append((u, self.oracle_trace(word, c0 + u)))
        out = {}
        for e_ in range(-2, K + 1):
            out[e_] = sum(v * u ** (-e_) for u, v in vals) / points
        return out

    def oracle_perturbed_trace(self, P: BElement, z, cutoff: int | None = None):
        """``Tr((|D| + P)^{-z})`` from the eigenvalues of the truncated matrix."""
        C = self.mode_cutoff if cutoff is None else cutoff
        H = realize(P, C).to_dense() + np.diag(abs_d_diagonal(C))
        H = (H + H.conj().T) / 2
        ev = np.linalg.eigvalsh(H)
        if ev.min() <= 0:
            raise ValueError("|D| + P must be positive")
        return complex(np.sum(np.exp(-complex(z) * np.log(ev))))


def _hashable(key):
    t0, pole = key
    if isinstance(t0, QComplex):
        t0 = t0 if t0.im else t0.re
    return (t0, pole)


def _incomplete_beta(x, a, b, terms: int = 40):
    """``int_0^x u^{a-1} (1-u)^{b-1} du`` by its binomial series (meromorphic in a)."""
    out = mpmath.mpf(0)
    xa = x**a
    for n in range(terms):
        out += mpmath.rf(1 - b, n) / mpmath.factorial(n) * xa * x**n / (a + n)
    return out


@lru_cache(maxsize=256)
def _sympy_tail_series(word, R):
    """Coefficients of ``d(1/t) + d(-1/t)`` in powers of t, via sympy."""
    t = sympy.symbols("t", positive=True)

    def lam_shift(c):
        # sqrt(1 + (1/t + c)^2) = sqrt(t^2 + (1 + c t)^2)/t for t > 0
        return sympy.sqrt(t**2 + (1 + c * t) ** 2) / t

    def branch(sign):
        expr = sympy.Integer(1)
        for g, c in _offsets(word):
            s = shift_of(g)
            if g.delta:
                expr *= (lam_shift(sign * (c + s)) - lam_shift(sign * c)) ** g.delta
            if g.bracket:
                expr *= s
        return expr

    expr = branch(1) + branch(-1)
    ser = sympy.series(expr, t, 0, R + 1).removeO()
    poly = sympy.Poly(sympy.expand(ser), t)
    coeffs = [sympy.Rational(0)] * (R + 1)
    for (deg,), c in poly.terms():
        if deg <= R:
            coeffs[deg] = sympy.Rational(c)
    return tuple(coeffs)
