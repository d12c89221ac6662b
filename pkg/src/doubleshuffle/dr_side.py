"""Graded-side harmonic structures: the y-generator subalgebra, its coproduct,
the rank-one module, and the localization inverting e1.

The subalgebra spanned by 1 and everything ending in e1 is free on the
elements y_n = -e0^(n-1)e1; the harmonic coproduct is the algebra morphism
y_n |-> sum y_i (x) y_{n-i}.  The module quotient by the right ideal of e0
has basis {empty word} + {words ending in e1}, the same index set, which is
what makes the rank-one structure effortless here.

Localized elements are finite alternating products of e0-runs and nonzero
e1-powers.  Every element this package ever localizes is a finite combination,
so the arithmetic below is exact with no degree window at all.
"""

from __future__ import annotations

from fractions import Fraction
from functools import lru_cache

from .ncalg import (
    EMPTY_WORD,
    TruncatedSeries,
    Word,
    word_key,
)

YMonomial = tuple[int, ...]  # entries >= 1; degree is their sum


def y_degree(ym: YMonomial) -> int:
    return sum(ym)


def render_y(ym: YMonomial) -> str:
    if not ym:
        return "1"
    return "*".join(f"y{n}" for n in ym)


@lru_cache(maxsize=None)
def y_expand_monomial(ym: YMonomial) -> Word:
    """The word (-1)^m-free part of y_{n1}...y_{nm}; sign handled separately."""
    out: list[int] = []
    for n in ym:
        out.extend([0] * (n - 1))
        out.append(1)
    return tuple(out)


def y_sign(ym: YMonomial) -> int:
    return (-1) ** len(ym)


class WElement:
    """Finite combination of y-monomials, truncated at a total degree."""

    __slots__ = ("coeffs", "trunc")

    def __init__(self, coeffs: dict, trunc: int):
        self.trunc = trunc
        self.coeffs = {m: c for m, c in coeffs.items() if y_degree(m) <= trunc and c != 0}

    @staticmethod
    def zero(trunc: int) -> "WElement":
        return WElement({}, trunc)

    @staticmethod
    def one(trunc: int) -> "WElement":
        return WElement({(): Fraction(1)}, trunc)

    def __add__(self, other: "WElement") -> "WElement":
        out = dict(self.coeffs)
        for m, c in other.coeffs.items():
            out[m] = out.get(m, 0) + c
        return WElement(out, self.trunc)

    def __sub__(self, other: "WElement") -> "WElement":
        out = dict(self.coeffs)
        for m, c in other.coeffs.items():
            out[m] = out.get(m, 0) - c
        return WElement(out, self.trunc)

    def scale(self, scalar) -> "WElement":
        return WElement({m: c * scalar for m, c in self.coeffs.items()}, self.trunc)

    def __mul__(self, other: "WElement") -> "WElement":
        out: dict = {}
        for m1, c1 in self.coeffs.items():
            room = self.trunc - y_degree(m1)
            for m2, c2 in other.coeffs.items():
                if y_degree(m2) > room:
                    continue
                m = m1 + m2
                out[m] = out.get(m, 0) + c1 * c2
        return WElement(out, self.trunc)

    def __eq__(self, other) -> bool:
        if not isinstance(other, WElement):
            return NotImplemented
        return self.trunc == other.trunc and self.coeffs == other.coeffs

    def __repr__(self) -> str:
        terms = sorted(self.coeffs.items(), key=lambda kv: (y_degree(kv[0]), kv[0]))
        body = " + ".join(
            render_y(m) if c == 1 else f"{c}*{render_y(m)}" for m, c in terms
        )
        return f"WElement({body or '0'}, trunc={self.trunc})"


def w_expand(a: WElement) -> TruncatedSeries:
    out: dict = {}
    for m, c in a.coeffs.items():
        w = y_expand_monomial(m)
        out[w] = out.get(w, 0) + c * y_sign(m)
    return TruncatedSeries(out, a.trunc)


def to_y_basis(a: TruncatedSeries) -> WElement:
    """Inverse of expansion: parse each word as a product of e0^(k-1)e1 blocks.

    Raises if some word is neither empty nor ending in e1 (not in the
    subalgebra).
    """
    out: dict = {}
    for w, c in a.coeffs.items():
        if w and w[-1] != 1:
            raise ValueError(f"word {w} does not lie in k1 + V*e1")
        m = word_to_y_monomial(w)
        out[m] = out.get(m, 0) + c * y_sign(m)
    return WElement(out, a.trunc)


def word_to_y_monomial(w: Word) -> YMonomial:
    indices = []
    run = 0
    for letter in w:
        if letter == 0:
            run += 1
        else:
            indices.append(run + 1)
            run = 0
    if run:
        raise ValueError(f"word {w} ends in e0")
    return tuple(indices)


class WTensor:
    """Tensor square of the y-generator algebra, truncated by total degree."""

    __slots__ = ("coeffs", "trunc")

    def __init__(self, coeffs: dict, trunc: int):
        self.trunc = trunc
        self.coeffs = {
            p: c
            for p, c in coeffs.items()
            if y_degree(p[0]) + y_degree(p[1]) <= trunc and c != 0
        }

    @staticmethod
    def one(trunc: int) -> "WTensor":
        return WTensor({((), ()): Fraction(1)}, trunc)

    @staticmethod
    def of(a: WElement, b: WElement) -> "WTensor":
        out: dict = {}
        for m1, c1 in a.coeffs.items():
            for m2, c2 in b.coeffs.items():
                if y_degree(m1) + y_degree(m2) <= a.trunc:
                    out[(m1, m2)] = out.get((m1, m2), 0) + c1 * c2
        return WTensor(out, a.trunc)

    def __add__(self, other: "WTensor") -> "WTensor":
        out = dict(self.coeffs)
        for p, c in other.coeffs.items():
            out[p] = out.get(p, 0) + c
        return WTensor(out, self.trunc)

    def __sub__(self, other: "WTensor") -> "WTensor":
        out = dict(self.coeffs)
        for p, c in other.coeffs.items():
            out[p] = out.get(p, 0) - c
        return WTensor(out, self.trunc)

    def scale(self, scalar) -> "WTensor":
        return WTensor({p: c * scalar for p, c in self.coeffs.items()}, self.trunc)

    def __mul__(self, other: "WTensor") -> "WTensor":
        out: dict = {}
        for (u1, u2), cu in self.coeffs.items():
            room = self.trunc - y_degree(u1) - y_degree(u2)
            for (v1, v2), cv in other.coeffs.items():
                if y_degree(v1) + y_degree(v2) > room:
                    continue
                p = (u1 + v1, u2 + v2)
                out[p] = out.get(p, 0) + cu * cv
        return WTensor(out, self.trunc)

    def coeff(self, m1: YMonomial, m2: YMonomial):
        return self.coeffs.get((m1, m2), 0)

    def __eq__(self, other) -> bool:
        if not isinstance(other, WTensor):
            return NotImplemented
        return self.trunc == other.trunc and self.coeffs == other.coeffs

    def __repr__(self) -> str:
        terms = sorted(self.coeffs.items())
        body = " + ".join(f"{c}*{render_y(a)}(x){render_y(b)}" for (a, b), c in terms)
        return f"WTensor({body or '0'}, trunc={self.trunc})"


def harmonic_coproduct_w(a: WElement) -> WTensor:
    """Algebra morphism with y_n |-> sum_{i=0..n} y_i (x) y_{n-i} (y_0 = 1)."""
    out = WTensor({}, a.trunc)
    for m, c in a.coeffs.items():
        term = WTensor.one(a.trunc)
        for n in m:
            term = term * _y_letter_coproduct(n, a.trunc)
        out = out + term.scale(c)
    return out


@lru_cache(maxsize=None)
def _y_letter_coproduct(n: int, trunc: int) -> WTensor:
    coeffs = {}
    for i in range(n + 1):
        left: YMonomial = (i,) if i else ()
        right: YMonomial = (n - i,) if n - i else ()
        coeffs[(left, right)] = Fraction(1)
    return WTensor(coeffs, trunc)


# -- module quotient by the right ideal of e0 -------------------------------


class MElement:
    """Class modulo the right ideal generated by e0.

    Basis: the empty word plus all words ending in e1.  The class map simply
    deletes words ending in e0.
    """

    __slots__ = ("coeffs", "trunc")

    def __init__(self, coeffs: dict, trunc: int):
        for w in coeffs:
            if w and w[-1] != 1:
                raise ValueError(f"{w} is not a basis class (ends in e0)")
        self.trunc = trunc
        self.coeffs = {w: c for w, c in coeffs.items() if len(w) <= trunc and c != 0}

    @staticmethod
    def unit(trunc: int) -> "MElement":
        return MElement({EMPTY_WORD: Fraction(1)}, trunc)

    def __add__(self, other: "MElement") -> "MElement":
        out = dict(self.coeffs)
        for w, c in other.coeffs.items():
            out[w] = out.get(w, 0) + c
        return MElement(out, self.trunc)

    def __sub__(self, other: "MElement") -> "MElement":
        out = dict(self.coeffs)
        for w, c in other.coeffs.items():
            out[w] = out.get(w, 0) - c
        return MElement(out, self.trunc)

    def scale(self, scalar) -> "MElement":
        return MElement({w: c * scalar for w, c in self.coeffs.items()}, self.trunc)

    def is_zero(self) -> bool:
        return not self.coeffs

    def __eq__(self, other) -> bool:
        if not isinstance(other, MElement):
            return NotImplemented
        return self.trunc == other.trunc and self.coeffs == other.coeffs

    def __repr__(self) -> str:
        from .ncalg import render_word

        terms = sorted(self.coeffs.items(), key=lambda kv: word_key(kv[0]))
        body = " + ".join(f"{c}*[{render_word(w)}]" for w, c in terms)
        return f"MElement({body or '0'}, trunc={self.trunc})"


def m_class(a: TruncatedSeries) -> MElement:
    out = {w: c for w, c in a.coeffs.items() if not w or w[-1] == 1}
    return MElement(out, a.trunc)


def act_on_m(a: TruncatedSeries, m: MElement) -> MElement:
    lift = TruncatedSeries(dict(m.coeffs), m.trunc)
    return m_class(a * lift)


def w_of_m(m: MElement) -> WElement:
    """The unique subalgebra element acting on the unit class to give m."""
    return to_y_basis(TruncatedSeries(dict(m.coeffs), m.trunc))


def m_of_w(a: WElement) -> MElement:
    return m_class(w_expand(a))


class MTensor:
    """Tensor square of module classes (pairs of class basis words)."""

    __slots__ = ("coeffs", "trunc")

    def __init__(self, coeffs: dict, trunc: int):
        self.trunc = trunc
        self.coeffs = {
            p: c for p, c in coeffs.items() if len(p[0]) + len(p[1]) <= trunc and c != 0
        }

    @staticmethod
    def of(a: MElement, b: MElement) -> "MTensor":
        out: dict = {}
        for u, cu in a.coeffs.items():
            for v, cv in b.coeffs.items():
                if len(u) + len(v) <= a.trunc:
                    out[(u, v)] = out.get((u, v), 0) + cu * cv
        return MTensor(out, a.trunc)

    def __add__(self, other: "MTensor") -> "MTensor":
        out = dict(self.coeffs)
        for p, c in other.coeffs.items():
            out[p] = out.get(p, 0) + c
        return MTensor(out, self.trunc)

    def __sub__(self, other: "MTensor") -> "MTensor":
        out = dict(self.coeffs)
        for p, c in other.coeffs.items():
            out[p] = out.get(p, 0) - c
        return MTensor(out, self.trunc)

    def scale(self, scalar) -> "MTensor":
        return MTensor({p: c * scalar for p, c in self.coeffs.items()}, self.trunc)

    def is_zero(self) -> bool:
        return not self.coeffs

    def __eq__(self, other) -> bool:
        if not isinstance(other, MTensor):
            return NotImplemented
        return self.trunc == other.trunc and self.coeffs == other.coeffs


def w_tensor_to_m_tensor(t: WTensor) -> MTensor:
    out: dict = {}
    for (m1, m2), c in t.coeffs.items():
        u = y_expand_monomial(m1)
        v = y_expand_monomial(m2)
        s = y_sign(m1) * y_sign(m2)
        out[(u, v)] = out.get((u, v), 0) + c * s
    return MTensor(out, t.trunc)


def harmonic_coproduct_m(m: MElement) -> MTensor:
    """Coproduct on classes: lift to the subalgebra, comultiply, act on the unit."""
    return w_tensor_to_m_tensor(harmonic_coproduct_w(w_of_m(m)))


def is_w_grouplike(a: WElement) -> bool:
    if a.coeffs.get((), 0) != 1:
        return False
    return harmonic_coproduct_w(a) == WTensor.of(a, a)


# -- localization at e1 ------------------------------------------------------

# A localized word is an alternating tuple of factors:
#   (0, a) with a >= 1      an e0-run e0^a
#   (1, b) with b != 0      an e1-power e1^b (b may be negative)
LocWord = tuple[tuple[int, int], ...]

LOC_ONE: LocWord = ()


def loc_word_degree(w: LocWord) -> int:
    return sum(e for _, e in w)


def _loc_normalize(factors: list[tuple[int, int]]) -> LocWord:
    """Merge adjacent same-kind factors, dropping vanishing e1-powers."""
    out: list[tuple[int, int]] = []
    for kind, e in factors:
        if e == 0:
            continue
        if out and out[-1][0] == kind:
            merged = out[-1][1] + e
            out.pop()
            if merged != 0:
                out.append((kind, merged))
            else:
                # a cancelled e1-power may expose two adjacent e0-runs
                while len(out) >= 2 and out[-1][0] == out[-2][0]:
                    a = out.pop()
                    b = out.pop()
                    out.append((b[0], a[1] + b[1]))
        else:
            out.append((kind, e))
    # final sweep for safety
    i = 0
    while i + 1 < len(out):
        if out[i][0] == out[i + 1][0]:
            merged = (out[i][0], out[i][1] + out[i + 1][1])
            out[i : i + 2] = [merged] if merged[1] != 0 else []
            i = max(i - 1, 0)
        else:
            i += 1
    return tuple(out)


class LocElement:
    """Finite combination of localized words; exact, no truncation."""

    __slots__ = ("coeffs",)

    def __init__(self, coeffs: dict):
        self.coeffs = {w: c for w, c in coeffs.items() if c != 0}

    @staticmethod
    def zero() -> "LocElement":
        return LocElement({})

    @staticmethod
    def one() -> "LocElement":
        return LocElement({LOC_ONE: Fraction(1)})

    @staticmethod
    def generator(kind: int, exponent: int) -> "LocElement":
        if exponent == 0:
            return LocElement.one()
        return LocElement({((kind, exponent),): Fraction(1)})

    def __add__(self, other: "LocElement") -> "LocElement":
        out = dict(self.coeffs)
        for w, c in other.coeffs.items():
            out[w] = out.get(w, 0) + c
        return LocElement(out)

    def __sub__(self, other: "LocElement") -> "LocElement":
        out = dict(self.coeffs)
        for w, c in other.coeffs.items():
            out[w] = out.get(w, 0) - c
        return LocElement(out)

    def scale(self, scalar) -> "LocElement":
        return LocElement({w: c * scalar for w, c in self.coeffs.items()})

    def __mul__(self, other: "LocElement") -> "LocElement":
        out: dict = {}
        for u, cu in self.coeffs.items():
            for v, cv in other.coeffs.items():
                w = _loc_normalize(list(u) + list(v))
                out[w] = out.get(w, 0) + cu * cv
        return LocElement(out)

    def is_zero(self) -> bool:
        return not self.coeffs

    def __eq__(self, other) -> bool:
        if not isinstance(other, LocElement):
            return NotImplemented
        return self.coeffs == other.coeffs

    def __repr__(self) -> str:
        def rw(w: LocWord) -> str:
            if not w:
                return "1"
            return "".join(
                (f"e0^{e}" if kind == 0 else f"e1^{e}") for kind, e in w
            )

        body = " + ".join(f"{c}*{rw(w)}" for w, c in sorted(self.coeffs.items()))
        return f"LocElement({body or '0'})"


def loc_embed_word(w: Word) -> LocWord:
    factors: list[tuple[int, int]] = []
    for letter in w:
        if factors and factors[-1][0] == letter:
            factors[-1] = (letter, factors[-1][1] + 1)
        else:
            factors.append((letter, 1))
    return tuple(factors)


def loc_embed_series(a: TruncatedSeries) -> LocElement:
    return LocElement({loc_embed_word(w): c for w, c in a.coeffs.items()})


E1_INV = LocElement.generator(1, -1)


# -- localized module quotient ----------------------------------------------


def loc_m_class_word(w: LocWord):
    """None if the word dies in the quotient (ends in an e0-run)."""
    if w and w[-1][0] == 0:
        return None
    return w


class LocMElement:
    """Class in the localized quotient; basis words do not end in an e0-run."""

    __slots__ = ("coeffs",)

    def __init__(self, coeffs: dict):
        self.coeffs = {w: c for w, c in coeffs.items() if c != 0}

    @staticmethod
    def unit() -> "LocMElement":
        return LocMElement({LOC_ONE: Fraction(1)})

    @staticmethod
    def from_loc(a: LocElement) -> "LocMElement":
        out: dict = {}
        for w, c in a.coeffs.items():
            key = loc_m_class_word(w)
            if key is not None:
                out[key] = out.get(key, 0) + c
        return LocMElement(out)

    def __add__(self, other: "LocMElement") -> "LocMElement":
        out = dict(self.coeffs)
        for w, c in other.coeffs.items():
            out[w] = out.get(w, 0) + c
        return LocMElement(out)

    def __sub__(self, other: "LocMElement") -> "LocMElement":
        out = dict(self.coeffs)
        for w, c in other.coeffs.items():
            out[w] = out.get(w, 0) - c
        return LocMElement(out)

    def scale(self, scalar) -> "LocMElement":
        return LocMElement({w: c * scalar for w, c in self.coeffs.items()})

    def is_zero(self) -> bool:
        return not self.coeffs

    def __eq__(self, other) -> bool:
        if not isinstance(other, LocMElement):
            return NotImplemented
        return self.coeffs == other.coeffs


def loc_act_on_m(a: LocElement, m: LocMElement) -> LocMElement:
    lift = LocElement(dict(m.coeffs))
    return LocMElement.from_loc(a * lift)


def m_element_to_loc(m: MElement) -> LocMElement:
    return LocMElement({loc_embed_word(w): c for w, c in m.coeffs.items()})
