"""Truncated Taylor jets and Laurent jets in one complex variable.

Two scalar backends are supported. The exact backend works with
:class:`QComplex` (pairs of rationals) and ``Fraction``; the float backend
works with Python ``complex``. Jet arithmetic is duck-typed over the
coefficient ring, so jets whose coefficients are elements of the free
delta-algebra (:mod:`nctrace.ncalg`) reuse the same code.

A jet whose ``order`` is ``None`` is an exact polynomial: nothing has been
truncated. Otherwise ``order`` is the highest exponent whose coefficient is
known.
"""

from __future__ import annotations

import enum
import math
from fractions import Fraction
from functools import lru_cache
from numbers import Rational


class QComplex:
    """Exact complex rational ``re + i*im``."""

    __slots__ = ("re", "im")

    def __init__(self, re=0, im=0):
        self.re = Fraction(re)
        self.im = Fraction(im)

    @staticmethod
    def _lift(x):
        if isinstance(x, QComplex):
            return x
        if isinstance(x, Rational):
            return QComplex(x)
        return None

    def __add__(self, other):
        o = self._lift(other)
        if o is None:
            return complex(self) + other
        return QComplex(self.re + o.re, self.im + o.im)

    __radd__ = __add__

    def __sub__(self, other):
        o = self._lift(other)
        if o is None:
            return complex(self) - other
        return QComplex(self.re - o.re, self.im - o.im)

    def __rsub__(self, other):
        o = self._lift(other)
        if o is None:
            return other - complex(self)
        return QComplex(o.re - self.re, o.im - self.im)

    def __mul__(self, other):
        o = self._lift(other)
        if o is None:
            return NotImplemented if not isinstance(other, (float, complex)) else complex(self) * other
        return QComplex(self.re * o.re - self.im * o.im, self.re * o.im + self.im * o.re)

    __rmul__ = __mul__

    def __truediv__(self, other):
        o = self._lift(other)
        if o is None:
            return complex(self) / other
        den = o.re * o.re + o.im * o.im
        if den == 0:
            raise ZeroDivisionError("exact division by zero")
        return QComplex((self.re * o.re + self.im * o.im) / den, (self.im * o.re - self.re * o.im) / den)

    def __rtruediv__(self, other):
        o = self._lift(other)
        if o is None:
            return other / complex(self)
        return o / self

    def __pow__(self, n):
        if not isinstance(n, int):
            return complex(self) ** n
        if n < 0:
            return QComplex(1) / (self ** (-n))
        out = QComplex(1)
        for _ in range(n):
            out = out * self
        return out

    def __neg__(self):
        return QComplex(-self.re, -self.im)

    def __pos__(self):
        return self

    def __abs__(self):
        return abs(complex(self))

    def __bool__(self):
        return bool(self.re) or bool(self.im)

    def __eq__(self, other):
        o = self._lift(other)
        if o is None:
            try:
                return complex(self) == other
            except TypeError:
                return NotImplemented
        return self.re == o.re and self.im == o.im

    def __hash__(self):
        if self.im == 0:
            return hash(self.re)
        return hash((self.re, self.im))

    def __complex__(self):
        return complex(float(self.re), float(self.im))

    @property
    def real(self):
        return self.re

    @property
    def imag(self):
        return self.im

    def conjugate(self):
        return QComplex(self.re, -self.im)

    def __repr__(self):
        if self.im == 0:
            return str(self.re)
        return f"({self.re}{'+' if self.im >= 0 else '-'}{abs(self.im)}i)"


class Backend(enum.Enum):
    """Scalar backend selected when a model or battery is built."""

    EXACT = "exact"
    FLOAT = "float"

    def coerce(self, x):
        if self is Backend.FLOAT:
            return complex(x)
        if isinstance(x, QComplex):
            return x
        if isinstance(x, str):
            return QComplex(Fraction(x))
        if isinstance(x, complex):
            return QComplex(Fraction(x.real), Fraction(x.imag))
        return QComplex(Fraction(x))


def is_exact(x) -> bool:
    return isinstance(x, (Rational, QComplex))


def real_part(x) -> float:
    if isinstance(x, QComplex):
        return float(x.re)
    return complex(x).real


def _zero_like(c):
    return 0 * c


def _min_order(a, b):
    if a is None:
        return b
    if b is None:
        return a
    return min(a, b)


def _same_center(a, b):
    if a is b:
        return True
    try:
        return a == b
    except TypeError:
        return False


class Jet:
    """Taylor jet ``sum c_m (z - center)^m`` known through exponent ``order``."""

    __slots__ = ("center", "coeffs", "order")

    def __init__(self, coeffs=(), center=0, order=None):
        coeffs = list(coeffs)
        if order is None:
            while coeffs and not coeffs[-1]:
                coeffs.pop()
        else:
            if order < 0:
                raise ValueError("jet order must be >= 0")
            coeffs = coeffs[: order + 1]
            coeffs += [0] * (order + 1 - len(coeffs))
        self.coeffs = tuple(coeffs)
        self.center = center
        self.order = order

    @classmethod
    def constant(cls, c, center=0, order=None):
        return cls((c,), center, order)

    @classmethod
    def variable(cls, center=0, order=None):
        """The jet of ``z`` itself at ``center``."""
        return cls((center, 1), center, order)

    def __len__(self):
        return len(self.coeffs)

    def __getitem__(self, m):
        if m < 0:
            raise IndexError(m)
        if self.order is not None and m > self.order:
            raise IndexError(f"coefficient {m} beyond truncation order {self.order}")
        return self.coeffs[m] if m < len(self.coeffs) else 0

    @property
    def degree(self):
        return len(self.coeffs) - 1

    @property
    def is_polynomial(self):
        return self.order is None

    def __bool__(self):
        return any(bool(c) for c in self.coeffs)

    def __eq__(self, other):
        if isinstance(other, Jet):
            return (
                _same_center(self.center, other.center)
                and self.order == other.order
                and _trim(self.coeffs) == _trim(other.coeffs)
            )
        if self.degree <= 0:
            return self[0] == other if self.coeffs else other == 0
        return False

    def __hash__(self):
        return hash((_trim(self.coeffs), self.order))

    def _check(self, other):
        if not _same_center(self.center, other.center):
            raise ValueError(f"jet centers differ: {self.center!r} vs {other.center!r}")

    def __add__(self, other):
        if not isinstance(other, Jet):
            if isinstance(other, LaurentJet):
                return NotImplemented
            other = Jet.constant(other, self.center)
        self._check(other)
        n = max(len(self.coeffs), len(other.coeffs))
        a = self.coeffs + (0,) * (n - len(self.coeffs))
        b = other.coeffs + (0,) * (n - len(other.coeffs))
        return Jet([x + y for x, y in zip(a, b)], self.center, _min_order(self.order, other.order))

    __radd__ = __add__

    def __neg__(self):
        return Jet([-c for c in self.coeffs], self.center, self.order)

    def __sub__(self, other):
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, LaurentJet):
            return NotImplemented
        if not isinstance(other, Jet):
            return Jet([c * other for c in self.coeffs], self.center, self.order)
        self._check(other)
        order = _min_order(self.order, other.order)
        la, lb = len(self.coeffs), len(other.coeffs)
        if la == 0 or lb == 0:
            return Jet((), self.center, order)
        top = la + lb - 2 if order is None else min(order, la + lb - 2)
        out = []
        for m in range(top + 1):
            acc = None
            for i in range(max(0, m - lb + 1), min(m, la - 1) + 1):
                t = self.coeffs[i] * other.coeffs[m - i]
                acc = t if acc is None else acc + t
            out.append(0 if acc is None else acc)
        return Jet(out, self.center, order)

    def __rmul__(self, other):
        if isinstance(other, (Jet, LaurentJet)):
            return NotImplemented
        return Jet([other * c for c in self.coeffs], self.center, self.order)

    def __truediv__(self, other):
        if isinstance(other, Jet):
            return self * other.reciprocal()
        return Jet([c / other for c in self.coeffs], self.center, self.order)

    def reciprocal(self, order=None):
        """Series inverse. Needs a nonzero constant term."""
        c0 = self[0]
        if not c0:
            raise ZeroDivisionError("jet with zero constant term is not invertible")
        order = _min_order(self.order, order)
        if order is None:
            raise ValueError("inverse of a non-constant polynomial needs a truncation order")
        inv = [1 / c0 if is_exact(c0) else 1.0 / c0]
        for m in range(1, order + 1):
            acc = 0
            for i in range(1, m + 1):
                acc = acc + self[i] * inv[m - i] if i < len(self.coeffs) else acc
            inv.append(-acc * inv[0])
        return Jet(inv, self.center, order)

    def __pow__(self, n):
        if n < 0:
            return self.reciprocal() ** (-n)
        out = Jet.constant(1, self.center, self.order)
        base = self
        while n:
            if n & 1:
                out = out * base
            base = base * base
            n >>= 1
        return out

    def truncate(self, order):
        return Jet(self.coeffs, self.center, _min_order(self.order, order))

    def derivative(self, n=1):
        """``d^n/dz^n``; the truncation order drops by ``n``."""
        if n == 0:
            return self
        if self.order is not None and n > self.order:
            raise ValueError(f"cannot take {n} derivatives of a jet known to order {self.order}")
        out = [math.perm(m, n) * c for m, c in enumerate(self.coeffs) if m >= n]
        return Jet(out, self.center, None if self.order is None else self.order - n)

    def coefficient_derivative(self, n):
        """``n``-th derivative at the center, i.e. ``n! c_n``."""
        return math.factorial(n) * self[n]

    def __call__(self, z):
        """Horner evaluation (exact for polynomials, a truncated sum otherwise)."""
        t = z - self.center
        acc = 0
        for c in reversed(self.coeffs):
            acc = acc * t + c
        return acc

    def substitute(self, slope, intercept, center=0):
        """Jet in ``z`` at ``center`` of ``f(intercept + slope*(z - center))``.

        Exact for polynomials. A truncated jet can only be re-expanded when
        ``intercept`` equals its own center.
        """
        offset = intercept - self.center
        if not offset:
            return Jet([c * slope**m for m, c in enumerate(self.coeffs)], center, self.order)
        if self.order is not None:
            raise ValueError("cannot re-expand a truncated jet away from its center")
        out = [0] * len(self.coeffs)
        for m, c in enumerate(self.coeffs):
            if not c:
                continue
            for i in range(m + 1):
                out[i] = out[i] + c * (math.comb(m, i) * offset ** (m - i) * slope**i)
        return Jet(out, center, None)

    def map(self, fn):
        return Jet([fn(c) for c in self.coeffs], self.center, self.order)

    def __repr__(self):
        tail = "" if self.order is None else f", order={self.order}"
        return f"Jet({list(self.coeffs)!r}, center={self.center!r}{tail})"


def _trim(coeffs):
    coeffs = list(coeffs)
    while coeffs and not coeffs[-1]:
        coeffs.pop()
    return tuple(coeffs)


class LaurentJet:
    """Laurent germ ``sum_{i >= -p} c_i (z - center)^i`` known through ``order``.

    ``coeffs[0]`` is the coefficient of exponent ``-pole_order``. Leading
    zeros are trimmed while the pole order is positive, so ``pole_order`` is
    canonical.
    """

    __slots__ = ("center", "pole_order", "coeffs", "order")

    def __init__(self, coeffs=(), pole_order=0, center=0, order=None):
        coeffs = list(coeffs)
        p = pole_order
        if p < 0:
            coeffs = [0] * (-p) + coeffs
            p = 0
        while p > 0 and coeffs and not coeffs[0]:
            coeffs.pop(0)
            p -= 1
        if not coeffs:
            p = 0
        if order is None:
            while len(coeffs) > p + 1 and not coeffs[-1]:
                coeffs.pop()
        else:
            if order < -p:
                raise ValueError("Laurent jet must be known at least through its leading term")
            n = order + p + 1
            coeffs = coeffs[:n] + [0] * max(0, n - len(coeffs))
        self.coeffs = tuple(coeffs)
        self.pole_order = p
        self.center = center
        self.order = order

    @classmethod
    def from_jet(cls, jet: Jet):
        return cls(jet.coeffs, 0, jet.center, jet.order)

    @classmethod
    def zero(cls, center=0, order=None):
        return cls((), 0, center, order)

    @classmethod
    def monomial(cls, c, exponent, center=0, order=None):
        if exponent < 0:
            return cls([c], -exponent, center, order)
        return cls([0] * exponent + [c], 0, center, order)

    @property
    def valuation(self):
        return -self.pole_order

    def coefficient(self, exponent):
        if self.order is not None and exponent > self.order:
            raise IndexError(f"exponent {exponent} beyond known order {self.order}")
        i = exponent + self.pole_order
        if i < 0 or i >= len(self.coeffs):
            return 0
        return self.coeffs[i]

    __getitem__ = coefficient

    def items(self):
        for i, c in enumerate(self.coeffs):
            yield i - self.pole_order, c

    def __bool__(self):
        return any(bool(c) for c in self.coeffs)

    def _lift(self, other):
        if isinstance(other, LaurentJet):
            return other
        if isinstance(other, Jet):
            return LaurentJet.from_jet(other)
        return LaurentJet([other], 0, self.center, None)

    def _check(self, other):
        if not _same_center(self.center, other.center):
            raise ValueError(f"jet centers differ: {self.center!r} vs {other.center!r}")

    def __add__(self, other):
        other = self._lift(other)
        self._check(other)
        p = max(self.pole_order, other.pole_order)
        order = _min_order(self.order, other.order)
        top = max(e for e in (len(self.coeffs) - self.pole_order, len(other.coeffs) - other.pole_order))
        if order is not None:
            top = min(top, order + 1)
        out = []
        for e in range(-p, top):
            out.append(self._get(e) + other._get(e))
        return LaurentJet(out, p, self.center, order)

    __radd__ = __add__

    def _get(self, e):
        i = e + self.pole_order
        if 0 <= i < len(self.coeffs):
            return self.coeffs[i]
        return 0

    def __neg__(self):
        return LaurentJet([-c for c in self.coeffs], self.pole_order, self.center, self.order)

    def __sub__(self, other):
        return self + (-self._lift(other))

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if not isinstance(other, (LaurentJet, Jet)):
            return LaurentJet([c * other for c in self.coeffs], self.pole_order, self.center, self.order)
        other = self._lift(other)
        self._check(other)
        v1, v2 = self.valuation, other.valuation
        known = []
        if self.order is not None:
            known.append(self.order + v2)
        if other.order is not None:
            known.append(other.order + v1)
        order = min(known) if known else None
        la, lb = len(self.coeffs), len(other.coeffs)
        n = la + lb - 1 if la and lb else 0
        if order is not None:
            n = min(n, order - (v1 + v2) + 1)
        out = []
        for m in range(max(n, 0)):
            acc = 0
            for i in range(max(0, m - lb + 1), min(m, la - 1) + 1):
                acc = acc + self.coeffs[i] * other.coeffs[m - i]
            out.append(acc)
        return LaurentJet(out, -(v1 + v2), self.center, order)

    def __rmul__(self, other):
        if isinstance(other, Jet):
            return LaurentJet.from_jet(other) * self
        return LaurentJet([other * c for c in self.coeffs], self.pole_order, self.center, self.order)

    def __truediv__(self, other):
        if isinstance(other, (LaurentJet, Jet)):
            return self * self._lift(other).reciprocal()
        return LaurentJet([c / other for c in self.coeffs], self.pole_order, self.center, self.order)

    def reciprocal(self):
        lead_exp = None
        for e, c in self.items():
            if c:
                lead_exp = e
                break
        if lead_exp is None:
            raise ZeroDivisionError("Laurent jet is zero")
        if self.order is None:
            raise ValueError("reciprocal of an exact Laurent polynomial needs a truncation order")
        unit = Jet([self._get(e) for e in range(lead_exp, self.order + 1)], self.center, self.order - lead_exp)
        inv = unit.reciprocal()
        return LaurentJet(inv.coeffs, lead_exp, self.center, inv.order - lead_exp)

    def truncate(self, order):
        return LaurentJet(self.coeffs, self.pole_order, self.center, _min_order(self.order, order))

    def derivative(self, n=1):
        """``d^n/dz^n`` acting on every exponent, negative ones included."""
        out = self
        for _ in range(n):
            coeffs = []
            p = out.pole_order + 1
            for e, c in out.items():
                if e == 0:
                    continue
                while len(coeffs) < e - 1 + p:
                    coeffs.append(0)
                coeffs.append(e * c)
            out = LaurentJet(coeffs, p, out.center, None if out.order is None else out.order - 1)
        return out

    def recenter_affine(self, q, s):
        """Re-express the germ in ``z`` where ``w = q*z + s``.

        The new center is ``(center - s)/q`` and the coefficient of
        ``(w - w0)^i`` becomes ``c_i q^i`` times ``(z - z0)^i``.
        """
        if not q:
            raise ValueError("recenter_affine needs a nonzero slope")
        z0 = (self.center - s) / q
        coeffs = []
        for e, c in self.items():
            coeffs.append(c * _int_power(q, e))
        return LaurentJet(coeffs, self.pole_order, z0, self.order)

    def residue(self, j):
        return residue(self, j)

    def finite_part(self):
        return self._get(0)

    def value(self):
        if self.pole_order and any(self.coeffs[: self.pole_order]):
            raise ValueError("germ has a pole at its center")
        return self._get(0)

    def map(self, fn):
        return LaurentJet([fn(c) for c in self.coeffs], self.pole_order, self.center, self.order)

    def __eq__(self, other):
        if not isinstance(other, (LaurentJet, Jet)):
            return NotImplemented
        other = self._lift(other)
        if not _same_center(self.center, other.center) or self.order != other.order:
            return False
        lo = -max(self.pole_order, other.pole_order)
        hi = max(len(self.coeffs) - self.pole_order, len(other.coeffs) - other.pole_order)
        return all(self._get(e) == other._get(e) for e in range(lo, hi))

    __hash__ = None

    def __repr__(self):
        terms = ", ".join(f"{e}: {c!r}" for e, c in self.items())
        tail = "" if self.order is None else f", order={self.order}"
        return f"LaurentJet({{{terms}}}, center={self.center!r}{tail})"


def _int_power(q, e):
    if e >= 0:
        return q**e
    return 1 / (q ** (-e)) if is_exact(q) else q**e


def jet_add(x, y):
    return x + y


def jet_mul(x, y):
    return x * y


def jet_scale(x, c):
    return x * c


@lru_cache(maxsize=None)
def _binom_coeffs(k):
    poly = [Fraction(1)]
    for i in range(k):
        # multiply by (alpha - i)
        nxt = [Fraction(0)] * (len(poly) + 1)
        for m, c in enumerate(poly):
            nxt[m + 1] += c
            nxt[m] -= i * c
        poly = nxt
    f = math.factorial(k)
    return tuple(c / f for c in poly)


def binom_jet(k: int, K: int | None = None) -> Jet:
    """Jet at 0 of ``alpha -> alpha(alpha-1)...(alpha-k+1)/k!`` (exact)."""
    if k < 0:
        raise ValueError("k must be >= 0")
    return Jet(_binom_coeffs(k), 0, K)


@lru_cache(maxsize=None)
def _rising_coeffs(m):
    poly = [Fraction(1)]
    for i in range(m):
        nxt = [Fraction(0)] * (len(poly) + 1)
        for e, c in enumerate(poly):
            nxt[e + 1] += c
            nxt[e] += i * c
        poly = nxt
    return tuple(poly)


def gamma_ratio_jet(m: int, K: int | None = None) -> Jet:
    """``Gamma(z+m)/Gamma(z) = z(z+1)...(z+m-1)`` as an exact polynomial jet."""
    if m < 0:
        raise ValueError("m must be >= 0")
    return Jet(_rising_coeffs(m), 0, K)


def residue(f: LaurentJet, j: int):
    """Coefficient of ``(z - center)^{-(j+1)}``; ``j = -1`` is the finite part."""
    if j < -1:
        raise ValueError("residue index j must be >= -1")
    return f._get(-(j + 1))


def recenter_affine(f: LaurentJet, q, s) -> LaurentJet:
    return f.recenter_affine(q, s)
