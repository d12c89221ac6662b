"""Group-algebra (Betti) objects: the free group on X0, X1, its group algebra,
the Magnus expansion, the filtered subalgebra with its Y-generators, the module
quotient by (X0 - 1), the localization at (X1 - 1), and coordinates for the
completed objects.

Group words are tuples of letters: 1 = X0, -1 = X0^{-1}, 2 = X1, -2 = X1^{-1},
always freely reduced.

The subalgebra spanned by 1 and everything right-divisible by (X1 - 1) is
presented by generators X1^{+-1} and

    Y_n^eps = (X0^eps - 1)^(n-1) X0^eps (1 - X1^eps),   n >= 1, eps in {+,-}.

Its monomial basis consists of sequences of X1-exponent letters and Y-letters
with no two adjacent X1-exponents.  The rewriting into that basis works right
to left through a word, absorbing X0-runs into the leading Y-letter of what
has already been rewritten; the identities that make this terminate are

    X0^m (1 - X1)      = sum_j C(m-1, j) Y_{j+1}^+            (m >= 1)
    X0^-m (1 - X1^-1)  = sum_j C(m-1, j) Y_{j+1}^-            (m >= 1)
    (1 - X1^-1)        = -(1 - X1) X1^-1   and symmetrically.
"""

from __future__ import annotations

from fractions import Fraction
from functools import lru_cache
from math import comb

from .ncalg import (
    EMPTY_WORD,
    TruncatedSeries,
    exp_series,
    inverse_series,
)

# -- free group ---------------------------------------------------------------

X0 = 1
X1 = 2

F2Word = tuple[int, ...]

F2_ONE: F2Word = ()


def group_mul(u: F2Word, v: F2Word) -> F2Word:
    out = list(u)
    for letter in v:
        if out and out[-1] == -letter:
            out.pop()
        else:
            out.append(letter)
    return tuple(out)


def group_inv(u: F2Word) -> F2Word:
    return tuple(-letter for letter in reversed(u))


def group_pow(u: F2Word, n: int) -> F2Word:
    if n < 0:
        return group_pow(group_inv(u), -n)
    out: F2Word = ()
    for _ in range(n):
        out = group_mul(out, u)
    return out


def word_runs(w: F2Word) -> list[tuple[int, int]]:
    """Maximal runs as (generator, signed exponent) pairs, generator in {1, 2}."""
    runs: list[tuple[int, int]] = []
    for letter in w:
        gen = abs(letter)
        sign = 1 if letter > 0 else -1
        if runs and runs[-1][0] == gen:
            runs[-1] = (gen, runs[-1][1] + sign)
        else:
            runs.append((gen, sign))
    return runs


def word_from_runs(runs) -> F2Word:
    out: list[int] = []
    for gen, exp in runs:
        letter = gen if exp > 0 else -gen
        out.extend([letter] * abs(exp))
    return tuple(out)


def render_f2(w: F2Word) -> str:
    if not w:
        return "1"
    name = {1: "X0", 2: "X1"}
    return "*".join(
        f"{name[g]}^{e}" if e != 1 else name[g] for g, e in word_runs(w)
    )


# -- group algebra --------------------------------------------------------------


class GroupAlgebra:
    """Finite rational combination of reduced group words."""

    __slots__ = ("coeffs",)

    def __init__(self, coeffs: dict):
        self.coeffs = {w: c for w, c in coeffs.items() if c != 0}

    @staticmethod
    def zero() -> "GroupAlgebra":
        return GroupAlgebra({})

    @staticmethod
    def one() -> "GroupAlgebra":
        return GroupAlgebra({F2_ONE: Fraction(1)})

    @staticmethod
    def of_word(w: F2Word, coeff=Fraction(1)) -> "GroupAlgebra":
        return GroupAlgebra({w: coeff})

    @staticmethod
    def generator(gen: int, exp: int = 1) -> "GroupAlgebra":
        return GroupAlgebra.of_word(word_from_runs([(gen, exp)]) if exp else F2_ONE)

    def __add__(self, other: "GroupAlgebra") -> "GroupAlgebra":
        out = dict(self.coeffs)
        for w, c in other.coeffs.items():
            out[w] = out.get(w, 0) + c
        return GroupAlgebra(out)

    def __sub__(self, other: "GroupAlgebra") -> "GroupAlgebra":
        out = dict(self.coeffs)
        for w, c in other.coeffs.items():
            out[w] = out.get(w, 0) - c
        return GroupAlgebra(out)

    def __neg__(self) -> "GroupAlgebra":
        return GroupAlgebra({w: -c for w, c in self.coeffs.items()})

    def scale(self, scalar) -> "GroupAlgebra":
        return GroupAlgebra({w: c * scalar for w, c in self.coeffs.items()})

    def __mul__(self, other: "GroupAlgebra") -> "GroupAlgebra":
        out: dict = {}
        for u, cu in self.coeffs.items():
            for v, cv in other.coeffs.items():
                w = group_mul(u, v)
                out[w] = out.get(w, 0) + cu * cv
        return GroupAlgebra(out)

    def augmentation(self):
        return sum(self.coeffs.values(), Fraction(0))

    def is_zero(self) -> bool:
        return not self.coeffs

    def __eq__(self, other) -> bool:
        if not isinstance(other, GroupAlgebra):
            return NotImplemented
        return self.coeffs == other.coeffs

    def __repr__(self) -> str:
        terms = sorted(self.coeffs.items(), key=lambda kv: (len(kv[0]), kv[0]))
        body = " + ".join(f"{c}*{render_f2(w)}" for w, c in terms)
        return f"GroupAlgebra({body or '0'})"


def delta_v_b(a: GroupAlgebra) -> dict:
    """Diagonal coproduct: group elements are group-like.  Returns a
    (word, word) -> coefficient map."""
    return {(w, w): c for w, c in a.coeffs.items()}


# -- Magnus expansion -----------------------------------------------------------


@lru_cache(maxsize=None)
def _letter_series(letter: int, trunc: int) -> TruncatedSeries:
    gen_index = 0 if abs(letter) == X0 else 1
    sign = 1 if letter > 0 else -1
    return exp_series(TruncatedSeries.letter(gen_index, trunc).scale(Fraction(sign)))


def magnus_word(w: F2Word, trunc: int) -> TruncatedSeries:
    out = TruncatedSeries.one(trunc)
    for letter in w:
        out = out * _letter_series(letter, trunc)
    return out


def magnus(a: GroupAlgebra, trunc: int) -> TruncatedSeries:
    out = TruncatedSeries.zero(trunc)
    for w, c in a.coeffs.items():
        out = out + magnus_word(w, trunc).scale(c)
    return out


def filtration_degree(a: GroupAlgebra, max_probe: int = 64) -> int:
    """Order of the Magnus expansion; equals the augmentation-power filtration
    degree for free groups.  Raises on the zero element."""
    if a.is_zero():
        raise ValueError("the zero element has no filtration degree")
    probe = 2
    while probe <= max_probe:
        d = magnus(a, probe).min_degree()
        if d is not None:
            return d
        probe *= 2
    raise RuntimeError(f"Magnus order exceeds probe bound {max_probe}")


# -- the filtered subalgebra in Y-generator coordinates ---------------------------

# Monomial items: ("x", m) an X1-exponent letter (m != 0), or ("Y", n, eps).
YBItem = tuple
YBMonomial = tuple

YB_ONE: YBMonomial = ()
_UNIT = "U"  # transient head token (1 - X1^eps) used only inside the rewriter


def yb_filtration(m: YBMonomial) -> int:
    """Filtration weight of a monomial: the sum of its Y-indices.

    X1-exponent letters are units of the algebra and sit in filtration
    degree 0; counting them would break compatibility of the coproduct with
    the filtration (a coproduct term can merge or cancel X1-letters).
    """
    return sum(item[1] for item in m if item[0] == "Y")


def render_yb(m: YBMonomial) -> str:
    if not m:
        return "1"
    parts = []
    for item in m:
        if item[0] == "x":
            parts.append(f"X1^{item[1]}" if item[1] != 1 else "X1")
        else:
            parts.append(f"Y{item[1]}{'+' if item[2] > 0 else '-'}")
    return " * ".join(parts)


def yb_concat(m1: YBMonomial, m2: YBMonomial) -> YBMonomial:
    if not m1:
        return m2
    if not m2:
        return m1
    if m1[-1][0] == "x" and m2[0][0] == "x":
        merged = m1[-1][1] + m2[0][1]
        if merged == 0:
            return m1[:-1] + m2[1:]
        return m1[:-1] + (("x", merged),) + m2[1:]
    return m1 + m2


class WBElement:
    """Finite combination of Y/X1 monomials."""

    __slots__ = ("coeffs",)

    def __init__(self, coeffs: dict):
        self.coeffs = {m: c for m, c in coeffs.items() if c != 0}

    @staticmethod
    def zero() -> "WBElement":
        return WBElement({})

    @staticmethod
    def one() -> "WBElement":
        return WBElement({YB_ONE: Fraction(1)})

    @staticmethod
    def of(m: YBMonomial, coeff=Fraction(1)) -> "WBElement":
        return WBElement({m: coeff})

    @staticmethod
    def y_letter(n: int, eps: int = 1, coeff=Fraction(1)) -> "WBElement":
        return WBElement({(("Y", n, eps),): coeff})

    @staticmethod
    def x1_letter(m: int, coeff=Fraction(1)) -> "WBElement":
        if m == 0:
            return WBElement({YB_ONE: coeff})
        return WBElement({(("x", m),): coeff})

    def __add__(self, other: "WBElement") -> "WBElement":
        out = dict(self.coeffs)
        for m, c in other.coeffs.items():
            out[m] = out.get(m, 0) + c
        return WBElement(out)

    def __sub__(self, other: "WBElement") -> "WBElement":
        out = dict(self.coeffs)
        for m, c in other.coeffs.items():
            out[m] = out.get(m, 0) - c
        return WBElement(out)

    def scale(self, scalar) -> "WBElement":
        return WBElement({m: c * scalar for m, c in self.coeffs.items()})

    def __mul__(self, other: "WBElement") -> "WBElement":
        out: dict = {}
        for m1, c1 in self.coeffs.items():
            for m2, c2 in other.coeffs.items():
                m = yb_concat(m1, m2)
                out[m] = out.get(m, 0) + c1 * c2
        return WBElement(out)

    def is_zero(self) -> bool:
        return not self.coeffs

    def __eq__(self, other) -> bool:
        if not isinstance(other, WBElement):
            return NotImplemented
        return self.coeffs == other.coeffs

    def __repr__(self) -> str:
        body = " + ".join(f"{c}*{render_yb(m)}" for m, c in sorted(self.coeffs.items(), key=str))
        return f"WBElement({body or '0'})"


@lru_cache(maxsize=None)
def yb_item_expansion(item: YBItem) -> GroupAlgebra:
    if item[0] == "x":
        return GroupAlgebra.generator(X1, item[1])
    _, n, eps = item
    x0 = GroupAlgebra.generator(X0, eps)
    x1 = GroupAlgebra.generator(X1, eps)
    one = GroupAlgebra.one()
    out = x0 * (one - x1)
    base = x0 - one
    for _ in range(n - 1):
        out = base * out
    return out


def wb_expand(a: WBElement) -> GroupAlgebra:
    out = GroupAlgebra.zero()
    for m, c in a.coeffs.items():
        term = GroupAlgebra.one()
        for item in m:
            term = term * yb_item_expansion(item)
        out = out + term.scale(c)
    return out


# -- division by (X1 - 1) on the right -------------------------------------------


class NotInSubalgebra(ValueError):
    """Element is not in k1 + V(X1-1)."""


def divide_right_x1_minus_1(a: GroupAlgebra) -> GroupAlgebra:
    """The unique b with b*(X1-1) = a, or raise.  Greedy elimination of a
    longest word; each step trades a longest word for a strictly shorter one."""
    remainder = dict(a.coeffs)
    quotient: dict = {}

    def add(d, w, c):
        d[w] = d.get(w, 0) + c
        if d[w] == 0:
            del d[w]

    while remainder:
        w = max(remainder, key=lambda u: (len(u), u))
        c = remainder[w]
        if not w:
            raise NotInSubalgebra("constant term obstructs division by (X1-1)")
        if w[-1] == X1:
            v = w[:-1]
            add(quotient, v, c)
            # c*v*(X1-1) = c*w - c*v
            add(remainder, w, -c)
            add(remainder, v, c)
        elif w[-1] == -X1:
            v = w
            add(quotient, v, -c)
            # -c*v*(X1-1) = -c*(w+X1 word) + c*w ; w*X1 is shorter
            add(remainder, w, -c)
            add(remainder, group_mul(w, (X1,)), c)
        else:
            raise NotInSubalgebra(f"word {render_f2(w)} obstructs division by (X1-1)")
    return GroupAlgebra(quotient)


def in_wb(a: GroupAlgebra) -> bool:
    try:
        divide_right_x1_minus_1(a - GroupAlgebra.one().scale(a.augmentation()))
        return True
    except NotInSubalgebra:
        return False


# -- rewriting into Y-generator coordinates ---------------------------------------


def _tail(m: int, eps: int) -> list[tuple[YBMonomial, Fraction]]:
    """X0^m * (1 - X1^eps) as a combination of monomials (m != 0)."""
    out: list[tuple[YBMonomial, Fraction]] = []
    if m > 0:
        if eps > 0:
            for j in range(m):
                out.append(((("Y", j + 1, 1),), Fraction(comb(m - 1, j))))
        else:
            # X0^m (1 - X1^-1) = -(X0^m (1 - X1)) X1^-1
            for j in range(m):
                out.append(((("Y", j + 1, 1), ("x", -1)), Fraction(-comb(m - 1, j))))
    else:
        k = -m
        if eps < 0:
            for j in range(k):
                out.append(((("Y", j + 1, -1),), Fraction(comb(k - 1, j))))
        else:
            # X0^-k (1 - X1) = -(X0^-k (1 - X1^-1)) X1
            for j in range(k):
                out.append(((("Y", j + 1, -1), ("x", 1)), Fraction(-comb(k - 1, j))))
    return out


def _laurent_times_y_head(m: int, head: YBItem) -> list[tuple]:
    """X0^m * Y_n^eps as [(monomial-or-unit-token, coeff)]; tokens are pairs
    (_UNIT, eps) standing for a pending (1 - X1^eps) factor."""
    _, n, eps = head
    # X0^m * (X0^eps - 1)^(n-1) X0^eps, as a Laurent polynomial in X0
    poly: dict = {m: Fraction(1)}
    base = {eps: Fraction(1), 0: Fraction(-1)}
    for _ in range(n - 1):
        nxt: dict = {}
        for d1, c1 in poly.items():
            for d2, c2 in base.items():
                nxt[d1 + d2] = nxt.get(d1 + d2, 0) + c1 * c2
        poly = nxt
    shifted: dict = {}
    for d, c in poly.items():
        shifted[d + eps] = shifted.get(d + eps, 0) + c
    out: list[tuple] = []
    for d, c in shifted.items():
        if c == 0:
            continue
        if d == 0:
            out.append(((_UNIT, eps), c))
        else:
            for mono, c2 in _tail(d, eps):
                out.append((mono, c * c2))
    return out


def _resolve_unit(eps: int, rest: YBMonomial) -> WBElement:
    """(1 - X1^eps) * rest, with rest token-free."""
    plain = WBElement.of(rest)
    shifted = WBElement.of(yb_concat((("x", eps),), rest))
    return plain - shifted


def _rewrite_word_times(w: F2Word, head_token, mono: YBMonomial) -> WBElement:
    """w * (optional pending unit) * mono as a combination of basis monomials.

    `head_token` is None or (_UNIT, eps).  Invariant kept by all callers: when
    `head_token` is None, `mono` is empty only if `w` is empty, and a monomial
    starting with an X1-exponent always continues with a Y-letter.
    """
    if not w:
        if head_token is None:
            return WBElement.of(mono)
        return _resolve_unit(head_token[1], mono)

    runs = word_runs(w)
    gen, exp = runs[-1]
    prefix = word_from_runs(runs[:-1])

    if gen == X1:
        # an X1-run commutes with a pending (1 - X1^eps), so it slides inside
        return _rewrite_word_times(prefix, head_token, yb_concat((("x", exp),), mono))

    # trailing X0-run
    if head_token is not None:
        out = WBElement.zero()
        for piece, c in _tail(exp, head_token[1]):
            out = out + _rewrite_word_times(prefix, None, yb_concat(piece, mono)).scale(c)
        return out

    if mono and mono[0][0] == "Y":
        out = WBElement.zero()
        for piece, c in _laurent_times_y_head(exp, mono[0]):
            if piece and piece[0] == _UNIT:
                out = out + _rewrite_word_times(prefix, piece, mono[1:]).scale(c)
            else:
                out = out + _rewrite_word_times(prefix, None, yb_concat(piece, mono[1:])).scale(c)
        return out

    if mono and mono[0][0] == "x":
        # X0^exp X1^b rest = X0^exp (X1^b - 1) rest + X0^exp rest, where
        # X1^b - 1 = -(1 - X1^sgn) * sum_{i < |b|} X1^(sgn*i)
        b = mono[0][1]
        rest = mono[1:]
        if not rest:
            raise AssertionError("bare X1-exponent monomial cannot follow an X0-run")
        sgn = 1 if b > 0 else -1
        out = WBElement.zero()
        for piece, c in _tail(exp, sgn):
            for i in range(abs(b)):
                mid: YBMonomial = (("x", sgn * i),) if i else YB_ONE
                tail_mono = yb_concat(piece, yb_concat(mid, rest))
                out = out - _rewrite_word_times(prefix, None, tail_mono).scale(c)
        out = out + _rewrite_word_times(prefix + word_from_runs([(gen, exp)]), None, rest)
        return out

    raise AssertionError("monomial invariant violated in the rewriter")


def to_wb_generators(a: GroupAlgebra) -> WBElement:
    """Express an element of k1 + V(X1-1) in the Y/X1 generator basis.

    Raises NotInSubalgebra otherwise.  The expansion of the result is the
    input, exactly; the tests exercise that round trip.
    """
    lam = a.augmentation()
    r = divide_right_x1_minus_1(a - GroupAlgebra.one().scale(lam))
    out = WBElement({YB_ONE: lam})
    for w, c in r.coeffs.items():
        # w * (X1 - 1) = -(w * (1 - X1))
        out = out - _rewrite_word_times(w, (_UNIT, 1), YB_ONE).scale(c)
    return out


# -- harmonic coproduct on the subalgebra ------------------------------------------


class WBTensor:
    __slots__ = ("coeffs",)

    def __init__(self, coeffs: dict):
        self.coeffs = {p: c for p, c in coeffs.items() if c != 0}

    @staticmethod
    def one() -> "WBTensor":
        return WBTensor({(YB_ONE, YB_ONE): Fraction(1)})

    @staticmethod
    def of(a: WBElement, b: WBElement) -> "WBTensor":
        out: dict = {}
        for m1, c1 in a.coeffs.items():
            for m2, c2 in b.coeffs.items():
                out[(m1, m2)] = out.get((m1, m2), 0) + c1 * c2
        return WBTensor(out)

    def __add__(self, other: "WBTensor") -> "WBTensor":
        out = dict(self.coeffs)
        for p, c in other.coeffs.items():
            out[p] = out.get(p, 0) + c
        return WBTensor(out)

    def __sub__(self, other: "WBTensor") -> "WBTensor":
        out = dict(self.coeffs)
        for p, c in other.coeffs.items():
            out[p] = out.get(p, 0) - c
        return WBTensor(out)

    def scale(self, scalar) -> "WBTensor":
        return WBTensor({p: c * scalar for p, c in self.coeffs.items()})

    def __mul__(self, other: "WBTensor") -> "WBTensor":
        out: dict = {}
        for (u1, u2), cu in self.coeffs.items():
            for (v1, v2), cv in other.coeffs.items():
                p = (yb_concat(u1, v1), yb_concat(u2, v2))
                out[p] = out.get(p, 0) + cu * cv
        return WBTensor(out)

    def __eq__(self, other) -> bool:
        if not isinstance(other, WBTensor):
            return NotImplemented
        return self.coeffs == other.coeffs


def delta_wb(a: WBElement) -> WBTensor:
    """Algebra morphism: X1-letters are group-like, Y_k^eps |-> sum Y_i^eps (x) Y_{k-i}^eps."""
    out = WBTensor({})
    for m, c in a.coeffs.items():
        term = WBTensor.one()
        for item in m:
            term = term * _yb_item_coproduct(item)
        out = out + term.scale(c)
    return out


@lru_cache(maxsize=None)
def _yb_item_coproduct(item: YBItem) -> WBTensor:
    if item[0] == "x":
        return WBTensor({((item,), (item,)): Fraction(1)})
    _, n, eps = item
    coeffs = {}
    for i in range(n + 1):
        left: YBMonomial = (("Y", i, eps),) if i else YB_ONE
        right: YBMonomial = (("Y", n - i, eps),) if n - i else YB_ONE
        coeffs[(left, right)] = Fraction(1)
    return WBTensor(coeffs)


def yb_filtration_degree_bound(t: WBTensor) -> int:
    return max((yb_filtration(p[0]) + yb_filtration(p[1]) for p in t.coeffs), default=0)


# -- module quotient by (X0 - 1) ------------------------------------------------


def mb_class_word(w: F2Word) -> F2Word:
    """Strip the trailing X0-run: X0 acts trivially on the unit class."""
    i = len(w)
    while i > 0 and abs(w[i - 1]) == X0:
        i -= 1
    return w[:i]


class MBElement:
    """Class modulo the left module generated by (X0 - 1) on the right.

    Basis: the empty word plus reduced words ending in an X1-letter."""

    __slots__ = ("coeffs",)

    def __init__(self, coeffs: dict):
        for w in coeffs:
            if w and abs(w[-1]) != X1:
                raise ValueError(f"{w} is not a class basis word")
        self.coeffs = {w: c for w, c in coeffs.items() if c != 0}

    @staticmethod
    def unit() -> "MBElement":
        return MBElement({F2_ONE: Fraction(1)})

    def __add__(self, other: "MBElement") -> "MBElement":
        out = dict(self.coeffs)
        for w, c in other.coeffs.items():
            out[w] = out.get(w, 0) + c
        return MBElement(out)

    def __sub__(self, other: "MBElement") -> "MBElement":
        out = dict(self.coeffs)
        for w, c in other.coeffs.items():
            out[w] = out.get(w, 0) - c
        return MBElement(out)

    def scale(self, scalar) -> "MBElement":
        return MBElement({w: c * scalar for w, c in self.coeffs.items()})

    def is_zero(self) -> bool:
        return not self.coeffs

    def __eq__(self, other) -> bool:
        if not isinstance(other, MBElement):
            return NotImplemented
        return self.coeffs == other.coeffs

    def __repr__(self) -> str:
        terms = sorted(self.coeffs.items(), key=lambda kv: (len(kv[0]), kv[0]))
        body = " + ".join(f"{c}*[{render_f2(w)}]" for w, c in terms)
        return f"MBElement({body or '0'})"


def mb_class(a: GroupAlgebra) -> MBElement:
    out: dict = {}
    for w, c in a.coeffs.items():
        key = mb_class_word(w)
        out[key] = out.get(key, 0) + c
    return MBElement(out)


def mb_act(a: GroupAlgebra, m: MBElement) -> MBElement:
    return mb_class(a * GroupAlgebra(dict(m.coeffs)))


def wb_of_mb(m: MBElement) -> WBElement:
    """The subalgebra element whose action on the unit class gives m."""
    out = WBElement.zero()
    for w, c in m.coeffs.items():
        out = out + _wb_lift_word(w).scale(c)
    return out


@lru_cache(maxsize=None)
def _wb_lift_word(w: F2Word) -> WBElement:
    if not w:
        return WBElement.one()
    eps = 1 if w[-1] == X1 else -1
    u = w[:-1]
    # w = u*(X1^eps - 1) + u; the first part is in the subalgebra as written
    part = _rewrite_word_times(u, (_UNIT, eps), YB_ONE).scale(Fraction(-1))
    return part + _wb_lift_word(mb_class_word(u))


class MBTensor:
    __slots__ = ("coeffs",)

    def __init__(self, coeffs: dict):
        self.coeffs = {p: c for p, c in coeffs.items() if c != 0}

    @staticmethod
    def of(a: MBElement, b: MBElement) -> "MBTensor":
        out: dict = {}
        for u, cu in a.coeffs.items():
            for v, cv in b.coeffs.items():
                out[(u, v)] = out.get((u, v), 0) + cu * cv
        return MBTensor(out)

    def __add__(self, other: "MBTensor") -> "MBTensor":
        out = dict(self.coeffs)
        for p, c in other.coeffs.items():
            out[p] = out.get(p, 0) + c
        return MBTensor(out)

    def __sub__(self, other: "MBTensor") -> "MBTensor":
        out = dict(self.coeffs)
        for p, c in other.coeffs.items():
            out[p] = out.get(p, 0) - c
        return MBTensor(out)

    def scale(self, scalar) -> "MBTensor":
        return MBTensor({p: c * scalar for p, c in self.coeffs.items()})

    def is_zero(self) -> bool:
        return not self.coeffs

    def __eq__(self, other) -> bool:
        if not isinstance(other, MBTensor):
            return NotImplemented
        return self.coeffs == other.coeffs


def wb_tensor_to_mb_tensor(t: WBTensor) -> MBTensor:
    out: dict = {}
    for (m1, m2), c in t.coeffs.items():
        a1 = wb_expand(WBElement.of(m1))
        a2 = wb_expand(WBElement.of(m2))
        for u, cu in a1.coeffs.items():
            ku = mb_class_word(u)
            for v, cv in a2.coeffs.items():
                kv = mb_class_word(v)
                out[(ku, kv)] = out.get((ku, kv), 0) + c * cu * cv
    return MBTensor(out)


def delta_mb(m: MBElement) -> MBTensor:
    return wb_tensor_to_mb_tensor(delta_wb(wb_of_mb(m)))


# -- localization at (X1 - 1) -----------------------------------------------------

# A2 = k[X1^{+-1}, (X1-1)^{-1}] with basis {X1^n} U {(X1-1)^{-m}, m >= 1};
# keys ("x", n) and ("d", m).  A1 = k[X0^{+-1}] with basis keys int n.


def _a2_x_times_d(n: int, m: int) -> dict:
    """X1^n * (X1-1)^{-m} in the partial-fraction basis."""
    if n == 0:
        return {("d", m): Fraction(1)}
    if n > 0:
        out: dict = {}
        for j in range(n + 1):
            c = Fraction(comb(n, j))
            if j < m:
                key = ("d", m - j)
                out[key] = out.get(key, 0) + c
            else:
                # (X1-1)^(j-m) expanded in powers of X1
                for i in range(j - m + 1):
                    key = ("x", i)
                    out[key] = out.get(key, 0) + c * comb(j - m, i) * (-1) ** (j - m - i)
        return {k: v for k, v in out.items() if v != 0}
    # n < 0: peel X1^{-1} factors one at a time:
    # X1^{-1}(X1-1)^{-m} = (-1)^m X1^{-1} + sum_i (-1)^(m-i) (X1-1)^{-i}
    out = {("d", m): Fraction(1)}
    for _ in range(-n):
        nxt: dict = {}
        for key, c in out.items():
            if key[0] == "x":
                k2 = ("x", key[1] - 1)
                nxt[k2] = nxt.get(k2, 0) + c
            else:
                mm = key[1]
                k2 = ("x", -1)
                nxt[k2] = nxt.get(k2, 0) + c * Fraction((-1) ** mm)
                for i in range(1, mm + 1):
                    k3 = ("d", i)
                    nxt[k3] = nxt.get(k3, 0) + c * Fraction((-1) ** (mm - i))
        out = {k: v for k, v in nxt.items() if v != 0}
    return out


def a2_mul_basis(k1, k2) -> dict:
    if k1[0] == "x" and k2[0] == "x":
        return {("x", k1[1] + k2[1]): Fraction(1)}
    if k1[0] == "d" and k2[0] == "d":
        return {("d", k1[1] + k2[1]): Fraction(1)}
    if k1[0] == "x":
        return _a2_x_times_d(k1[1], k2[1])
    return _a2_x_times_d(k2[1], k1[1])


# Localized words: alternating factors ("a", n) [X0^n, n != 0] and
# ("b", key) [non-scalar A2 basis element].
LocBWord = tuple

LOCB_ONE: LocBWord = ()


def _locb_words_mul(u: LocBWord, v: LocBWord) -> dict:
    """Product of two normal words as a word -> coefficient map."""
    if not u or not v:
        return {u + v: Fraction(1)}
    lu, fv = u[-1], v[0]
    if lu[0] != fv[0]:
        return {u + v: Fraction(1)}
    out: dict = {}
    if lu[0] == "a":
        n = lu[1] + fv[1]
        if n != 0:
            out[u[:-1] + (("a", n),) + v[1:]] = Fraction(1)
            return out
        for w, c in _locb_words_mul(u[:-1], v[1:]).items():
            out[w] = out.get(w, 0) + c
        return out
    prod = a2_mul_basis(lu[1], fv[1])
    for key, c in prod.items():
        if key == ("x", 0):
            for w, c2 in _locb_words_mul(u[:-1], v[1:]).items():
                out[w] = out.get(w, 0) + c * c2
        else:
            w = u[:-1] + (("b", key),) + v[1:]
            out[w] = out.get(w, 0) + c
    return {k: v2 for k, v2 in out.items() if v2 != 0}


class LocB:
    """Finite combination of localized normal words; exact."""

    __slots__ = ("coeffs",)

    def __init__(self, coeffs: dict):
        self.coeffs = {w: c for w, c in coeffs.items() if c != 0}

    @staticmethod
    def zero() -> "LocB":
        return LocB({})

    @staticmethod
    def one() -> "LocB":
        return LocB({LOCB_ONE: Fraction(1)})

    @staticmethod
    def x0_power(n: int) -> "LocB":
        return LocB({(("a", n),): Fraction(1)}) if n else LocB.one()

    @staticmethod
    def x1_power(n: int) -> "LocB":
        return LocB({(("b", ("x", n)),): Fraction(1)}) if n else LocB.one()

    @staticmethod
    def dpow(m: int) -> "LocB":
        """(X1 - 1)^{-m}."""
        return LocB({(("b", ("d", m)),): Fraction(1)}) if m else LocB.one()

    def __add__(self, other: "LocB") -> "LocB":
        out = dict(self.coeffs)
        for w, c in other.coeffs.items():
            out[w] = out.get(w, 0) + c
        return LocB(out)

    def __sub__(self, other: "LocB") -> "LocB":
        out = dict(self.coeffs)
        for w, c in other.coeffs.items():
            out[w] = out.get(w, 0) - c
        return LocB(out)

    def scale(self, scalar) -> "LocB":
        return LocB({w: c * scalar for w, c in self.coeffs.items()})

    def __mul__(self, other: "LocB") -> "LocB":
        out: dict = {}
        for u, cu in self.coeffs.items():
            for v, cv in other.coeffs.items():
                for w, c in _locb_words_mul(u, v).items():
                    out[w] = out.get(w, 0) + cu * cv * c
        return LocB(out)

    def is_zero(self) -> bool:
        return not self.coeffs

    def __eq__(self, other) -> bool:
        if not isinstance(other, LocB):
            return NotImplemented
        return self.coeffs == other.coeffs

    def __repr__(self) -> str:
        return f"LocB({self.coeffs!r})"


def locb_embed_word(w: F2Word) -> LocBWord:
    factors = []
    for gen, exp in word_runs(w):
        if gen == X0:
            factors.append(("a", exp))
        else:
            factors.append(("b", ("x", exp)))
    return tuple(factors)


def locb_embed(a: GroupAlgebra) -> LocB:
    out: dict = {}
    for w, c in a.coeffs.items():
        k = locb_embed_word(w)
        out[k] = out.get(k, 0) + c
    return LocB(out)


def locb_is_group_algebra(a: LocB) -> bool:
    """True when no inverted (X1-1) factor survives."""
    return all(
        all(f[0] == "a" or f[1][0] == "x" for f in w) for w in a.coeffs
    )


def locb_to_group_algebra(a: LocB) -> GroupAlgebra:
    out: dict = {}
    for w, c in a.coeffs.items():
        runs = []
        for f in w:
            if f[0] == "a":
                runs.append((X0, f[1]))
            elif f[1][0] == "x":
                runs.append((X1, f[1][1]))
            else:
                raise ValueError("element has a true denominator")
        key = word_from_runs(runs)
        out[key] = out.get(key, 0) + c
    return GroupAlgebra(out)


# localized module quotient: drop trailing X0-factors via X0 = 1 on the class


def locb_m_class_word(w: LocBWord) -> LocBWord:
    i = len(w)
    while i > 0 and w[i - 1][0] == "a":
        i -= 1
    return w[:i]


class LocMB:
    __slots__ = ("coeffs",)

    def __init__(self, coeffs: dict):
        self.coeffs = {w: c for w, c in coeffs.items() if c != 0}

    @staticmethod
    def unit() -> "LocMB":
        return LocMB({LOCB_ONE: Fraction(1)})

    @staticmethod
    def from_loc(a: LocB) -> "LocMB":
        out: dict = {}
        for w, c in a.coeffs.items():
            k = locb_m_class_word(w)
            out[k] = out.get(k, 0) + c
        return LocMB(out)

    def __add__(self, other: "LocMB") -> "LocMB":
        out = dict(self.coeffs)
        for w, c in other.coeffs.items():
            out[w] = out.get(w, 0) + c
        return LocMB(out)

    def __sub__(self, other: "LocMB") -> "LocMB":
        out = dict(self.coeffs)
        for w, c in other.coeffs.items():
            out[w] = out.get(w, 0) - c
        return LocMB(out)

    def scale(self, scalar) -> "LocMB":
        return LocMB({w: c * scalar for w, c in self.coeffs.items()})

    def is_zero(self) -> bool:
        return not self.coeffs

    def __eq__(self, other) -> bool:
        if not isinstance(other, LocMB):
            return NotImplemented
        return self.coeffs == other.coeffs


def locb_act_on_m(a: LocB, m: LocMB) -> LocMB:
    return LocMB.from_loc(a * LocB(dict(m.coeffs)))


def mb_element_to_loc(m: MBElement) -> LocMB:
    return LocMB({locb_embed_word(w): c for w, c in m.coeffs.items()})


# -- coordinates for the completed subalgebra --------------------------------------

YHatMonomial = tuple  # tuple of integers n_i >= 1


@lru_cache(maxsize=None)
def yhat_generator_series(n: int, trunc: int) -> TruncatedSeries:
    """Magnus expansion of the Y_n^+ generator; lowest term is -e0^(n-1)e1."""
    return magnus(wb_expand(WBElement.y_letter(n)), trunc)


def yhat_monomial_series(m: YHatMonomial, trunc: int) -> TruncatedSeries:
    out = TruncatedSeries.one(trunc)
    for n in m:
        out = out * yhat_generator_series(n, trunc)
    return out


class YHatSeries:
    """Series in the lifted generators, truncated by total degree."""

    __slots__ = ("coeffs", "trunc")

    def __init__(self, coeffs: dict, trunc: int):
        self.trunc = trunc
        self.coeffs = {m: c for m, c in coeffs.items() if sum(m) <= trunc and c != 0}

    def expand(self) -> TruncatedSeries:
        out = TruncatedSeries.zero(self.trunc)
        for m, c in self.coeffs.items():
            out = out + yhat_monomial_series(m, self.trunc).scale(c)
        return out

    def __add__(self, other: "YHatSeries") -> "YHatSeries":
        out = dict(self.coeffs)
        for m, c in other.coeffs.items():
            out[m] = out.get(m, 0) + c
        return YHatSeries(out, self.trunc)

    def __sub__(self, other: "YHatSeries") -> "YHatSeries":
        out = dict(self.coeffs)
        for m, c in other.coeffs.items():
            out[m] = out.get(m, 0) - c
        return YHatSeries(out, self.trunc)

    def scale(self, scalar) -> "YHatSeries":
        return YHatSeries({m: c * scalar for m, c in self.coeffs.items()}, self.trunc)

    def __eq__(self, other) -> bool:
        if not isinstance(other, YHatSeries):
            return NotImplemented
        return self.trunc == other.trunc and self.coeffs == other.coeffs

    def __repr__(self) -> str:
        body = " + ".join(
            f"{c}*" + ("*".join(f"yh{n}" for n in m) or "1")
            for m, c in sorted(self.coeffs.items())
        )
        return f"YHatSeries({body or '0'}, trunc={self.trunc})"


class NotInCompletedSubalgebra(ValueError):
    pass


def to_yhat_basis(s: TruncatedSeries) -> YHatSeries:
    """Triangular degree-by-degree solve; raises when some homogeneous residual
    fails to lie in the span of words ending in e1."""
    from . import dr_side

    residual = s
    coeffs: dict = {}
    for d in range(0, s.trunc + 1):
        part = residual.degree_part(d)
        if part.is_zero():
            continue
        if d == 0:
            c = part.constant_term()
            coeffs[()] = c
            residual = residual - TruncatedSeries.one(s.trunc).scale(c)
            continue
        try:
            w_elt = dr_side.to_y_basis(part)
        except ValueError as exc:
            raise NotInCompletedSubalgebra(f"residual at degree {d}: {exc}") from None
        for mono, c in w_elt.coeffs.items():
            coeffs[mono] = coeffs.get(mono, 0) + c
            residual = residual - yhat_monomial_series(mono, s.trunc).scale(c)
    if not residual.is_zero():
        raise AssertionError("triangular solve left a residual below its own degree")
    return YHatSeries(coeffs, s.trunc)


def mbhat_reduce(s: TruncatedSeries) -> YHatSeries:
    """Class of a completed series in the module quotient by (X0 - 1), written
    in the lifted-generator coordinates of the completed subalgebra.

    Solves s = expand(u) + r * (exp(e0) - 1) degree by degree.
    """
    from . import dr_side

    trunc = s.trunc
    x0_minus_1 = exp_series(TruncatedSeries.letter(0, trunc)) - TruncatedSeries.one(trunc)
    residual = s
    coeffs: dict = {}
    for d in range(0, trunc + 1):
        part = residual.degree_part(d)
        if part.is_zero():
            continue
        if d == 0:
            c = part.constant_term()
            coeffs[()] = c
            residual = residual - TruncatedSeries.one(trunc).scale(c)
            continue
        sub_coeffs = {w: c for w, c in part.coeffs.items() if w[-1] == 1}
        mod_coeffs = {w[:-1]: c for w, c in part.coeffs.items() if w[-1] == 0}
        if sub_coeffs:
            w_elt = dr_side.to_y_basis(TruncatedSeries(sub_coeffs, trunc))
            for mono, c in w_elt.coeffs.items():
                coeffs[mono] = coeffs.get(mono, 0) + c
                residual = residual - yhat_monomial_series(mono, trunc).scale(c)
        if mod_coeffs:
            r_part = TruncatedSeries(mod_coeffs, trunc)
            residual = residual - r_part * x0_minus_1
    if not residual.is_zero():
        raise AssertionError("module reduction left a residual below its own degree")
    return YHatSeries(coeffs, trunc)


class YHatTensor:
    __slots__ = ("coeffs", "trunc")

    def __init__(self, coeffs: dict, trunc: int):
        self.trunc = trunc
        self.coeffs = {
            p: c for p, c in coeffs.items() if sum(p[0]) + sum(p[1]) <= trunc and c != 0
        }

    @staticmethod
    def one(trunc: int) -> "YHatTensor":
        return YHatTensor({((), ()): Fraction(1)}, trunc)

    @staticmethod
    def of(a: YHatSeries, b: YHatSeries) -> "YHatTensor":
        out: dict = {}
        for m1, c1 in a.coeffs.items():
            for m2, c2 in b.coeffs.items():
                if sum(m1) + sum(m2) <= a.trunc:
                    out[(m1, m2)] = out.get((m1, m2), 0) + c1 * c2
        return YHatTensor(out, a.trunc)

    def __add__(self, other: "YHatTensor") -> "YHatTensor":
        out = dict(self.coeffs)
        for p, c in other.coeffs.items():
            out[p] = out.get(p, 0) + c
        return YHatTensor(out, self.trunc)

    def __sub__(self, other: "YHatTensor") -> "YHatTensor":
        out = dict(self.coeffs)
        for p, c in other.coeffs.items():
            out[p] = out.get(p, 0) - c
        return YHatTensor(out, self.trunc)

    def scale(self, scalar) -> "YHatTensor":
        return YHatTensor({p: c * scalar for p, c in self.coeffs.items()}, self.trunc)

    def __mul__(self, other: "YHatTensor") -> "YHatTensor":
        out: dict = {}
        for (u1, u2), cu in self.coeffs.items():
            room = self.trunc - sum(u1) - sum(u2)
            for (v1, v2), cv in other.coeffs.items():
                if sum(v1) + sum(v2) > room:
                    continue
                p = (u1 + v1, u2 + v2)
                out[p] = out.get(p, 0) + cu * cv
        return YHatTensor(out, self.trunc)

    def is_zero(self) -> bool:
        return not self.coeffs

    def __eq__(self, other) -> bool:
        if not isinstance(other, YHatTensor):
            return NotImplemented
        return self.trunc == other.trunc and self.coeffs == other.coeffs


def yhat_coproduct(a: YHatSeries) -> YHatTensor:
    """The harmonic coproduct in lifted coordinates: yh_n |-> sum yh_i (x) yh_{n-i}."""
    out = YHatTensor({}, a.trunc)
    for m, c in a.coeffs.items():
        term = YHatTensor.one(a.trunc)
        for n in m:
            letter = {}
            for i in range(n + 1):
                left = (i,) if i else ()
                right = (n - i,) if n - i else ()
                letter[(left, right)] = Fraction(1)
            term = term * YHatTensor(letter, a.trunc)
        out = out + term.scale(c)
    return out


def yhat_is_grouplike(a: YHatSeries) -> bool:
    if a.coeffs.get((), 0) != 1:
        return False
    return yhat_coproduct(a) == YHatTensor.of(a, a)
