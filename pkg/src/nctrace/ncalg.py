"""The free coefficient algebra generated by delta^n(a) and delta^n([D, a]).

Elements are finite linear combinations of ordered words. No relations of
the underlying algebra are imposed here; a trace model applies them when it
evaluates a word.
"""

from __future__ import annotations

import contextlib
import contextvars
import math
from dataclasses import dataclass, field
from functools import lru_cache

from .jetring import Jet


class AlgebraBoundError(ValueError):
    """A word grew beyond the configured length or delta-power bound."""


@dataclass(frozen=True)
class AlgebraConfig:
    max_length: int = 6
    max_delta: int = 8
    # base ids killed by delta (they commute with |D|)
    central: frozenset = field(default_factory=frozenset)


_CONFIG = contextvars.ContextVar("nctrace_algebra_config", default=AlgebraConfig())


def current_config() -> AlgebraConfig:
    return _CONFIG.get()


@contextlib.contextmanager
def algebra_config(**changes):
    """Temporarily override algebra bounds, e.g. ``algebra_config(max_delta=64)``."""
    cfg = _CONFIG.get()
    kw = {"max_length": cfg.max_length, "max_delta": cfg.max_delta, "central": cfg.central}
    kw.update(changes)
    kw["central"] = frozenset(kw["central"])
    token = _CONFIG.set(AlgebraConfig(**kw))
    try:
        yield _CONFIG.get()
    finally:
        _CONFIG.reset(token)


@dataclass(frozen=True, order=True)
class Generator:
    base: str
    bracket: bool = False
    delta: int = 0

    def raised(self, k: int = 1) -> "Generator":
        return Generator(self.base, self.bracket, self.delta + k)

    def __str__(self):
        core = f"[D,{self.base}]" if self.bracket else self.base
        if self.delta == 0:
            return core
        if self.delta == 1:
            return f"d({core})"
        return f"d^{self.delta}({core})"


Word = tuple  # tuple[Generator, ...]; () is the unit


def word_str(w: Word) -> str:
    return "*".join(str(g) for g in w) if w else "1"


def _check_word(w: Word, cfg: AlgebraConfig):
    if len(w) > cfg.max_length:
        raise AlgebraBoundError(f"word length {len(w)} exceeds max_length={cfg.max_length}")
    for g in w:
        if g.delta > cfg.max_delta:
            raise AlgebraBoundError(f"delta power {g.delta} exceeds max_delta={cfg.max_delta}")


class BElement:
    """Finite map Word -> scalar with noncommutative multiplication."""

    __slots__ = ("terms", "_hash")

    def __init__(self, terms=None):
        clean = {}
        if terms:
            for w, c in terms.items():
                if c:
                    clean[tuple(w)] = c
        self.terms = clean
        self._hash = None

    @classmethod
    def unit(cls, c=1):
        return cls({(): c})

    @classmethod
    def gen(cls, base, bracket=False, delta=0, c=1):
        return cls({(Generator(base, bracket, delta),): c})

    @classmethod
    def word(cls, w, c=1):
        _check_word(tuple(w), current_config())
        return cls({tuple(w): c})

    @staticmethod
    def _lift(x):
        if isinstance(x, BElement):
            return x
        if isinstance(x, Jet):
            return None
        return BElement({(): x}) if x else BElement()

    def __bool__(self):
        return bool(self.terms)

    def __len__(self):
        return len(self.terms)

    def items(self):
        return self.terms.items()

    def __add__(self, other):
        o = self._lift(other)
        if o is None:
            return NotImplemented
        out = dict(self.terms)
        for w, c in o.terms.items():
            out[w] = out[w] + c if w in out else c
        return BElement(out)

    __radd__ = __add__

    def __neg__(self):
        return BElement({w: -c for w, c in self.terms.items()})

    def __sub__(self, other):
        o = self._lift(other)
        if o is None:
            return NotImplemented
        return self + (-o)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, BElement):
            cfg = current_config()
            out = {}
            for w1, c1 in self.terms.items():
                for w2, c2 in other.terms.items():
                    w = w1 + w2
                    if len(w) > cfg.max_length:
                        raise AlgebraBoundError(
                            f"word length {len(w)} exceeds max_length={cfg.max_length}"
                        )
                    c = c1 * c2
                    out[w] = out[w] + c if w in out else c
            return BElement(out)
        if isinstance(other, Jet):
            return NotImplemented
        return BElement({w: c * other for w, c in self.terms.items()})

    def __rmul__(self, other):
        return BElement({w: other * c for w, c in self.terms.items()})

    def __truediv__(self, other):
        return BElement({w: c / other for w, c in self.terms.items()})

    def __eq__(self, other):
        o = self._lift(other) if not isinstance(other, Jet) else None
        if o is None:
            return NotImplemented
        return self.terms == o.terms

    def __hash__(self):
        if self._hash is None:
            self._hash = hash(frozenset(self.terms.items()))
        return self._hash

    def scalar_part(self):
        return self.terms.get((), 0)

    def map_coeffs(self, fn):
        return BElement({w: fn(c) for w, c in self.terms.items()})

    def __repr__(self):
        if not self.terms:
            return "0"
        return " + ".join(f"{c!r}*{word_str(w)}" for w, c in sorted(self.terms.items(), key=lambda t: t[0]))


def b_add(x, y):
    return x + y


def b_mul(x, y):
    return x * y


def b_scale(x, c):
    return x * c


@lru_cache(maxsize=None)
def _compositions(k, m):
    """All tuples of m nonnegative ints summing to k."""
    if m == 0:
        return [()] if k == 0 else []
    if m == 1:
        return [(k,)]
    out = []
    for first in range(k + 1):
        for rest in _compositions(k - first, m - 1):
            out.append((first,) + rest)
    return out


@lru_cache(maxsize=65536)
def _delta_word(w: Word, k: int, central: frozenset, max_delta: int):
    live = [i for i, g in enumerate(w) if g.base not in central]
    if not live:
        return {} if k else {w: 1}
    out = {}
    fk = math.factorial(k)
    for ks in _compositions(k, len(live)):
        top = max(w[i].delta + ki for i, ki in zip(live, ks))
        if top > max_delta:
            raise AlgebraBoundError(f"delta power {top} exceeds max_delta={max_delta}")
        g = list(w)
        coef = fk
        for i, ki in zip(live, ks):
            coef //= math.factorial(ki)
            if ki:
                g[i] = g[i].raised(ki)
        nw = tuple(g)
        out[nw] = out.get(nw, 0) + coef
    return out


def delta(x, k: int = 1):
    """``delta^k`` with the multinomial Leibniz rule; central generators are killed."""
    if k < 0:
        raise ValueError("k must be >= 0")
    if isinstance(x, Jet):
        return x.map(lambda b: delta(b, k))
    x = BElement._lift(x)
    if k == 0:
        return x
    cfg = current_config()
    out = {}
    for w, c in x.terms.items():
        for nw, m in _delta_word(w, k, cfg.central, cfg.max_delta).items():
            t = c * m
            out[nw] = out[nw] + t if nw in out else t
    return BElement(out)


def is_central(x) -> bool:
    """True when delta annihilates every word of ``x``."""
    return not delta(x)


# A BFamily is a Jet whose coefficients are BElements.
BFamily = Jet


def constant_family(b, center=0, order=None) -> Jet:
    return Jet((BElement._lift(b),), center, order)


def family(*coeffs, center=0, order=None) -> Jet:
    """``b_0 + b_1 z + ...`` as a family jet."""
    return Jet([BElement._lift(c) for c in coeffs], center, order)


def family_derivative(b: Jet, n: int) -> Jet:
    if n < 0:
        raise ValueError("n must be >= 0")
    return b.derivative(n)


def family_at_zero(b: Jet):
    """Coefficient 0 of a family jet (its value at the center)."""
    c = b[0]
    return c if isinstance(c, BElement) else BElement._lift(c)
