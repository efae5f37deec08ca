"""Truncated log-polyhomogeneous symbols.

A :class:`Symbol` stands for the expansion

    sum_{j, l} b_{j,l}(z) |D|^{alpha(z) - j} log^l |D|,      alpha(z) = a - q z,

where each ``b_{j,l}`` is a jet in ``z`` (centered at 0) with coefficients in
the free delta-algebra. ``N`` records truncation: every term with ``j < N`` is
known and the dropped remainder has order ``Re(a) - N``. ``N = None`` marks
an exact finite expansion.

Products are brought to right-normal form with the commutation rule

    f(|D|) b = sum_k delta^k(b) f^{(k)}(|D|) / k!,

applied to ``f(x) = x^beta log^l x``. Its k-th Taylor coefficient is
``sum_i C(l, i) (d/dbeta)^{l-i} c_{beta,k} x^{beta-k} log^i x`` with
``c_{beta,k} = beta(beta-1)...(beta-k+1)/k!``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from numbers import Rational

from .jetring import Jet, QComplex, binom_jet, gamma_ratio_jet, is_exact
from .ncalg import BElement, delta, word_str


class InsufficientTruncation(ValueError):
    """A requested expansion needs more terms than the inputs carry."""


def _as_int(x):
    """Return ``x`` as an int when it is an integer, else None."""
    if isinstance(x, Rational):
        return int(x) if x == int(x) else None
    if isinstance(x, QComplex):
        return int(x.re) if x.im == 0 and x.re.denominator == 1 else None
    x = complex(x)
    r = round(x.real)
    if abs(x.imag) < 1e-12 and abs(x.real - r) < 1e-12:
        return int(r)
    return None


def _is_zero(x):
    if is_exact(x):
        return not x
    return abs(complex(x)) < 1e-15


@dataclass(frozen=True)
class AffineOrder:
    """``alpha(z) = a - q z``."""

    a: object = 0
    q: object = 0

    def __add__(self, other):
        return AffineOrder(self.a + other.a, self.q + other.q)

    def __neg__(self):
        return AffineOrder(-self.a, -self.q)

    def __sub__(self, other):
        return self + (-other)

    def shift(self, m):
        return AffineOrder(self.a + m, self.q)

    def at(self, z):
        return self.a - self.q * z

    @property
    def is_constant(self):
        return _is_zero(self.q)

    def __eq__(self, other):
        if not isinstance(other, AffineOrder):
            return NotImplemented
        return _is_zero(self.a - other.a) and _is_zero(self.q - other.q)

    def __hash__(self):
        return hash((complex(self.a), complex(self.q)))

    def __repr__(self):
        return f"AffineOrder(a={self.a!r}, q={self.q!r})"


def _lift_family(c):
    if isinstance(c, Jet):
        return c
    return Jet((c if isinstance(c, BElement) else BElement._lift(c),), 0, None)


class Symbol:
    """Right-normal expansion with affine order and a truncation tag."""

    __slots__ = ("order", "terms", "N")

    def __init__(self, order: AffineOrder, terms=None, N=None):
        clean = {}
        for key, fam in (terms or {}).items():
            j, l = key
            if j < 0 or l < 0:
                raise ValueError(f"term index {key} must be nonnegative")
            if N is not None and j >= N:
                continue
            fam = _lift_family(fam)
            if fam.center != 0:
                raise ValueError("symbol coefficient families are centered at z = 0")
            if fam:
                clean[(j, l)] = fam
        self.order = order
        self.terms = clean
        self.N = N

    # constructors

    @classmethod
    def zero(cls, order=None, N=None):
        return cls(order or AffineOrder(), {}, N)

    @classmethod
    def unit(cls):
        return cls(AffineOrder(), {(0, 0): BElement.unit()})

    @classmethod
    def element(cls, b, order: AffineOrder | None = None):
        """``b |D|^{alpha}`` for ``b`` in the algebra (or a family jet)."""
        return cls(order or AffineOrder(), {(0, 0): b})

    @classmethod
    def power(cls, order: AffineOrder):
        """``|D|^{alpha(z)}``."""
        return cls(order, {(0, 0): BElement.unit()})

    @classmethod
    def log(cls):
        """``log |D|``."""
        return cls(AffineOrder(), {(0, 1): BElement.unit()})

    # properties

    @property
    def L(self):
        return max((l for _, l in self.terms), default=0)

    @property
    def remainder_order(self):
        """Real part of the order of the dropped remainder (``-inf`` when exact)."""
        if self.N is None:
            return -math.inf
        return complex(self.order.a).real - self.N

    @property
    def log_slack(self):
        """Dropped remainders of log-type symbols lose an epsilon of order."""
        return self.N is not None and self.L > 0

    def __bool__(self):
        return bool(self.terms)

    def __iter__(self):
        return iter(sorted(self.terms.items()))

    def coefficient(self, j, l=0):
        return self.terms.get((j, l))

    def words(self):
        seen = set()
        for fam in self.terms.values():
            for c in fam.coeffs:
                if isinstance(c, BElement):
                    seen.update(c.terms)
        return seen

    # arithmetic

    def _aligned(self, other):
        if not _is_zero(self.order.q - other.order.q):
            raise ValueError("cannot add symbols whose orders have different slopes")
        m = _as_int(self.order.a - other.order.a)
        if m is None:
            raise ValueError(
                f"cannot add symbols of orders {self.order.a!r} and {other.order.a!r}: "
                "difference is not an integer"
            )
        return m

    def __add__(self, other):
        if isinstance(other, (int, Fraction)) and other == 0:
            return self
        if not isinstance(other, Symbol):
            other = Symbol.element(other)
        if not other.terms and other.N is None:
            return self
        if not self.terms and self.N is None:
            return other
        m = self._aligned(other)
        if m < 0:
            return other + self
        # other has order a - m: its j becomes j + m
        out = dict(self.terms)
        for (j, l), fam in other.terms.items():
            key = (j + m, l)
            out[key] = out[key] + fam if key in out else fam
        Ns = [n for n in (self.N, None if other.N is None else other.N + m) if n is not None]
        return Symbol(self.order, out, min(Ns) if Ns else None)

    __radd__ = __add__

    def __neg__(self):
        return Symbol(self.order, {k: -v for k, v in self.terms.items()}, self.N)

    def __sub__(self, other):
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def scale(self, c):
        return Symbol(self.order, {k: v * c for k, v in self.terms.items()}, self.N)

    def __mul__(self, other):
        if isinstance(other, Symbol):
            return sym_mul(self, other)
        return self.scale(other)

    def __rmul__(self, other):
        return Symbol(self.order, {k: other * v for k, v in self.terms.items()}, self.N)

    def truncate(self, N):
        if N is None:
            return self
        N = N if self.N is None else min(N, self.N)
        return Symbol(self.order, self.terms, N)

    def map_families(self, fn):
        return Symbol(self.order, {k: fn(v) for k, v in self.terms.items()}, self.N)

    def __eq__(self, other):
        if not isinstance(other, Symbol):
            return NotImplemented
        if not self.terms and not other.terms:
            return self.N == other.N
        return self.order == other.order and self.N == other.N and self.terms == other.terms

    __hash__ = None

    def __repr__(self):
        return format_symbol(self)


def format_symbol(A: Symbol) -> str:
    """Deterministic text form: ascending j, then l, then word."""
    lines = [f"order a={A.order.a!r} q={A.order.q!r} N={A.N}"]
    for (j, l), fam in sorted(A.terms.items()):
        for m, c in enumerate(fam.coeffs):
            if not c:
                continue
            for w, s in sorted(c.terms.items()):
                lines.append(f"  j={j} l={l} z^{m}: {s!r} {word_str(w)}")
    return "\n".join(lines)


def _min_none(*xs):
    xs = [x for x in xs if x is not None]
    return min(xs) if xs else None


# typed: 2 and 2+0j hash alike, but exact and float backends must not share entries
@lru_cache(maxsize=None, typed=True)
def _commutation_jet(k, m, a0, q):
    """``(d/dbeta)^m c_{beta,k}`` at ``beta = a0 - q z`` as an exact polynomial in z."""
    return binom_jet(k).derivative(m).substitute(-q, a0, 0)


def _finite_series_bound(a0, q, l):
    """Largest k with a nonzero commutation term when the series terminates."""
    if l == 0 and _is_zero(q):
        n = _as_int(a0)
        if n is not None and n >= 0:
            return n
    return None


def sym_mul(A: Symbol, B: Symbol, N=None) -> Symbol:
    """Right-normal form of ``A B``; keeps output terms with ``j < N``."""
    lim = _min_none(A.N, B.N, N)
    order = A.order + B.order
    out = {}
    for (j, l), a in A.terms.items():
        if lim is not None and j >= lim:
            continue
        a0 = A.order.a - j
        q = A.order.q
        finite = _finite_series_bound(a0, q, l)
        for (j2, l2), b in B.terms.items():
            base = j + j2
            if lim is not None and base >= lim:
                continue
            kmax = None if lim is None else lim - 1 - base
            if finite is not None:
                kmax = finite if kmax is None else min(kmax, finite)
            db = b
            k = 0
            while db:
                if kmax is None:
                    if delta(db):
                        raise InsufficientTruncation(
                            "product of exact symbols is an infinite series; pass a truncation N"
                        )
                elif k > kmax:
                    break
                for i in range(l + 1):
                    cj = _commutation_jet(k, l - i, a0, q)
                    if not cj:
                        continue
                    term = a * (db * (cj * math.comb(l, i)))
                    if not term:
                        continue
                    key = (base + k, i + l2)
                    out[key] = out[key] + term if key in out else term
                if kmax is None:
                    break
                db = delta(db)
                k += 1
    return Symbol(order, out, lim)


def normalize(A, N=None) -> Symbol:
    """Right-normal form of a symbol or of a product of factors."""
    if isinstance(A, Symbol):
        return A.truncate(N)
    factors = list(A)
    if not factors:
        return Symbol.unit()
    out = factors[0] if isinstance(factors[0], Symbol) else Symbol.element(factors[0])
    for f in factors[1:]:
        f = f if isinstance(f, Symbol) else Symbol.element(f)
        out = sym_mul(out, f, N)
    return out.truncate(N)


def commute_power(exponent, A: Symbol, N=None) -> Symbol:
    """``|D|^exponent A`` in right-normal form."""
    if not isinstance(exponent, AffineOrder):
        exponent = AffineOrder(exponent, 0)
    return sym_mul(Symbol.power(exponent), A, N)


def commute_log(A: Symbol, N=None) -> Symbol:
    """``log|D| A`` in right-normal form."""
    return sym_mul(Symbol.log(), A, N)


def right_power(A: Symbol, exponent) -> Symbol:
    """``A |D|^exponent``; no commutation is needed."""
    if not isinstance(exponent, AffineOrder):
        exponent = AffineOrder(exponent, 0)
    return Symbol(A.order + exponent, A.terms, A.N)


def right_log(A: Symbol, power: int = 1) -> Symbol:
    return Symbol(A.order, {(j, l + power): v for (j, l), v in A.terms.items()}, A.N)


def log_commutator_coefficient(k: int):
    """``c'_{0,k} = d/dbeta c_{beta,k}`` at ``beta = 0``."""
    return binom_jet(k)[1]


def sym_bracket(A: Symbol, B: Symbol, N=None) -> Symbol:
    return sym_mul(A, B, N) - sym_mul(B, A, N)


def delta_symbol(A: Symbol, k: int = 1) -> Symbol:
    """``delta^k`` applied coefficient-wise (delta commutes with functions of |D|)."""
    return Symbol(A.order, {key: delta(fam, k) for key, fam in A.terms.items()}, A.N)


def log_ad(A: Symbol, N=None) -> Symbol:
    """``L(A) = [log|D|, A]``."""
    return commute_log(A, N) - right_log(A).truncate(_min_none(A.N, N))


def log_ad_power(B: Symbol, n: int, N=None) -> Symbol:
    out = B.truncate(N)
    for _ in range(n):
        out = log_ad(out, N)
    return out


def sigma_conj(B: Symbol, N=None) -> Symbol:
    """``sigma(z)(B) = |D|^{-z} B |D|^{z}`` as a z-family of the same order."""
    return right_power(commute_power(AffineOrder(0, 1), B, N), AffineOrder(0, -1))


def _scalar_family(c):
    return Jet((c,), 0, None)


def perturbed_power(P: Symbol, N: int, max_n=None, max_k=None) -> Symbol:
    """Expansion of ``(|D| + P)^{-z}`` for ``P`` of order 0, to ``N`` terms.

    Each term is ``(-1)^{|k|+n} Gamma(z+|k|+n)/Gamma(z)
    delta^{k_1}(P)...delta^{k_n}(P) |D|^{-z-|k|-n}`` divided by
    ``k_1!...k_n! (k_1+1)(k_1+k_2+2)...(k_1+...+k_n+n)``.
    """
    if not P.order.is_constant or not _is_zero(P.order.a):
        raise ValueError("perturbation must have order 0")
    if N is None or N < 1:
        raise InsufficientTruncation("perturbed_power needs a truncation N >= 1")
    target = AffineOrder(0, 1)
    if not P:
        return Symbol.power(target)
    max_n = N - 1 if max_n is None else max_n
    max_k = max(N - 2, 0) if max_k is None else max_k
    if max_n < N - 1 or max_k < N - 2:
        raise InsufficientTruncation(
            f"bounds max_n={max_n}, max_k={max_k} drop terms above order -{N}; "
            f"need max_n >= {N - 1} and max_k >= {max(N - 2, 0)}"
        )
    dP = [delta_symbol(P, k) for k in range(N)]
    out = {(0, 0): _lift_family(BElement.unit())}

    def visit(prod, ks, S_partial, denom):
        n = len(ks)
        tot = sum(ks)
        m = tot + n
        coef = Fraction((-1) ** m, denom)
        g = gamma_ratio_jet(m)
        for (j, l), fam in prod.terms.items():
            key = (j + m, l)
            if key[0] >= N:
                continue
            term = fam * (g * coef)
            out[key] = out[key] + term if key in out else term
        for k in range(0, N - m - 1):
            if not dP[k]:
                continue
            nprod = sym_mul(prod, dP[k], N - m - 1)
            ndenom = denom * math.factorial(k) * (tot + k + n + 1)
            visit(nprod, ks + (k,), tot + k, ndenom)

    for k in range(0, N - 1):
        if dP[k]:
            visit(dP[k].truncate(N - 1), (k,), k, math.factorial(k) * (k + 1))
    return Symbol(target, out, N)


def _free_log_series(D):
    """Coefficients of ``log(e^X e^Y)`` on words in {X, Y} up to degree D."""
    # T = e^X e^Y - 1 on words (strings over "XY")
    T = {}
    for r in range(D + 1):
        for s in range(D + 1 - r):
            if r + s:
                T["X" * r + "Y" * s] = Fraction(1, math.factorial(r) * math.factorial(s))
    out = {}
    power = {"": Fraction(1)}
    for n in range(1, D + 1):
        nxt = {}
        for w1, c1 in power.items():
            for w2, c2 in T.items():
                if len(w1) + len(w2) <= D:
                    w = w1 + w2
                    nxt[w] = nxt.get(w, 0) + c1 * c2
        power = nxt
        sign = Fraction((-1) ** (n - 1), n)
        for w, c in power.items():
            out[w] = out.get(w, 0) + sign * c
    return {w: c for w, c in out.items() if c}


def log_difference(P: Symbol, N: int, M_ch=None) -> Symbol:
    """``log(|D| + P) - log|D|`` as an order-0 symbol with no log terms.

    Uses ``Y = log(1 + |D|^{-1} P)`` (Mercator series) and the
    Campbell-Hausdorff series of ``log(e^X e^Y)`` with ``X = log|D|`` in
    Dynkin's right-nested form. A degree-d term has order at most ``-d``.
    """
    if N is None or N < 1:
        raise InsufficientTruncation("log_difference needs N >= 1")
    M_ch = 4 if M_ch is None else M_ch
    if M_ch < N - 1:
        raise InsufficientTruncation(
            f"Campbell-Hausdorff depth {M_ch} leaves terms above order -{N}; need M_ch >= {N - 1}"
        )
    zero = Symbol.zero(AffineOrder(), N)
    if not P:
        return zero
    u = sym_mul(Symbol.power(AffineOrder(-1, 0)), P, N)
    Y = zero
    up = None
    for i in range(1, N):
        up = u if up is None else sym_mul(up, u, N)
        Y = Y + up.scale(Fraction((-1) ** (i - 1), i))
    Y = Y.truncate(N)

    D = min(M_ch, N - 1)
    series = _free_log_series(D)
    cache = {}

    def nested(w):
        # right-nested bracket [w0, [w1, ..., [w_{d-2}, w_{d-1}]]]; None means X itself
        if w in cache:
            return cache[w]
        if len(w) == 1:
            val = None if w == "X" else Y
        else:
            inner = nested(w[1:])
            if inner is None:
                val = zero if w[0] == "X" else -log_ad(Y, N)
            elif w[0] == "X":
                val = log_ad(inner, N)
            else:
                val = sym_bracket(Y, inner, N)
        cache[w] = val
        return val

    out = Y
    for d in range(2, D + 1):
        for w, c in series.items():
            if len(w) != d or "Y" not in w:
                continue
            val = nested(w)
            if val:
                out = out + val.scale(c / d)
    return out.truncate(N)


def _family_derivative_coeff(fam: Jet, n: int):
    """``n``-th z-derivative of a family at 0, as an algebra element."""
    if n >= len(fam.coeffs):
        if fam.order is not None and n > fam.order:
            raise InsufficientTruncation(f"family known to z-order {fam.order}, derivative {n} requested")
        return BElement()
    return fam.coeffs[n] * math.factorial(n)


def family_derivative_at_zero(A: Symbol, n: int) -> Symbol:
    """``d^n/dz^n A(z)`` at 0; each ``|D|^{-qz}`` derivative adds a log factor."""
    q = A.order.q
    out = {}
    for (j, l), fam in A.terms.items():
        for m in range(n + 1):
            if m and _is_zero(q):
                break
            c = _family_derivative_coeff(fam, n - m)
            if not c:
                continue
            term = c * (math.comb(n, m) * (-q) ** m)
            key = (j, l + m)
            out[key] = out[key] + term if key in out else term
    return Symbol(AffineOrder(A.order.a, 0), out, A.N)


def weighted_derivative_at_zero(A: Symbol, n: int) -> Symbol:
    """``d^n/dz^n (A(z) |D|^{qz})`` at 0, an order-a symbol."""
    out = {}
    for key, fam in A.terms.items():
        c = _family_derivative_coeff(fam, n)
        if c:
            out[key] = c
    return Symbol(AffineOrder(A.order.a, 0), out, A.N)

