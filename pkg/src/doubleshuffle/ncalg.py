"""Truncated free associative algebra on the letters e0, e1 over exact rationals.

Words are tuples over {0, 1} (0 renders as ``e0``, 1 as ``e1``).  A series is a
sparse map from words to scalars together with a truncation degree; absent
words have coefficient zero.  All values are immutable after construction and
every operation is a pure function, so everything here is safe to share
between threads.

Scalars are `fractions.Fraction` throughout the exact layers.  The same
containers are reused with arbitrary-precision floats by the numerical layer;
nothing below ever rounds on its own.
"""

from __future__ import annotations

from fractions import Fraction
from itertools import combinations

Word = tuple[int, ...]

EMPTY_WORD: Word = ()
E0: Word = (0,)
E1: Word = (1,)


def word_degree(w: Word) -> int:
    return len(w)


def render_word(w: Word) -> str:
    if not w:
        return "1"
    return "".join("e0" if x == 0 else "e1" for x in w)


def word_key(w: Word):
    """Length-lexicographic sort key; makes all renderings canonical."""
    return (len(w), w)


class TruncationMismatch(ValueError):
    """Binary operation between series of different truncation degrees."""


def _check_trunc(a, b):
    if a.trunc != b.trunc:
        raise TruncationMismatch(f"truncation degrees differ: {a.trunc} != {b.trunc}")


class TruncatedSeries:
    """Noncommutative series truncated at a fixed total degree.

    Truncation degrees are value-level data: mixing two different degrees in
    one operation raises instead of coercing, since a mismatch signals a logic
    bug in a diagram check.
    """

    __slots__ = ("coeffs", "trunc")

    def __init__(self, coeffs: dict, trunc: int):
        if trunc < 0:
            raise ValueError("truncation degree must be >= 0")
        self.trunc = trunc
        self.coeffs = {w: c for w, c in coeffs.items() if len(w) <= trunc and c != 0}

    # -- constructors -------------------------------------------------

    @staticmethod
    def zero(trunc: int) -> "TruncatedSeries":
        return TruncatedSeries({}, trunc)

    @staticmethod
    def one(trunc: int) -> "TruncatedSeries":
        return TruncatedSeries({EMPTY_WORD: Fraction(1)}, trunc)

    @staticmethod
    def unit_word(w: Word, trunc: int, coeff=Fraction(1)) -> "TruncatedSeries":
        return TruncatedSeries({w: coeff}, trunc)

    @staticmethod
    def letter(i: int, trunc: int) -> "TruncatedSeries":
        return TruncatedSeries({(i,): Fraction(1)}, trunc)

    # -- linear structure ---------------------------------------------

    def __add__(self, other: "TruncatedSeries") -> "TruncatedSeries":
        _check_trunc(self, other)
        out = dict(self.coeffs)
        for w, c in other.coeffs.items():
            out[w] = out.get(w, 0) + c
        return TruncatedSeries(out, self.trunc)

    def __sub__(self, other: "TruncatedSeries") -> "TruncatedSeries":
        _check_trunc(self, other)
        out = dict(self.coeffs)
        for w, c in other.coeffs.items():
            out[w] = out.get(w, 0) - c
        return TruncatedSeries(out, self.trunc)

    def __neg__(self) -> "TruncatedSeries":
        return TruncatedSeries({w: -c for w, c in self.coeffs.items()}, self.trunc)

    def scale(self, scalar) -> "TruncatedSeries":
        return TruncatedSeries({w: c * scalar for w, c in self.coeffs.items()}, self.trunc)

    # -- products ------------------------------------------------------

    def __mul__(self, other: "TruncatedSeries") -> "TruncatedSeries":
        """Concatenation product; degrees above the truncation are dropped."""
        _check_trunc(self, other)
        out: dict = {}
        for u, cu in self.coeffs.items():
            room = self.trunc - len(u)
            for v, cv in other.coeffs.items():
                if len(v) > room:
                    continue
                w = u + v
                out[w] = out.get(w, 0) + cu * cv
        return TruncatedSeries(out, self.trunc)

    def shuffle(self, other: "TruncatedSeries") -> "TruncatedSeries":
        _check_trunc(self, other)
        out: dict = {}
        for u, cu in self.coeffs.items():
            room = self.trunc - len(u)
            for v, cv in other.coeffs.items():
                if len(v) > room:
                    continue
                c = cu * cv
                for w, mult in shuffle_words(u, v).items():
                    out[w] = out.get(w, 0) + c * mult
        return TruncatedSeries(out, self.trunc)

    # -- queries --------------------------------------------------------

    def coeff(self, w: Word):
        if len(w) > self.trunc:
            raise ValueError(f"word {render_word(w)} exceeds truncation degree {self.trunc}")
        return self.coeffs.get(w, 0)

    def constant_term(self):
        return self.coeffs.get(EMPTY_WORD, 0)

    def degree_part(self, d: int) -> "TruncatedSeries":
        return TruncatedSeries({w: c for w, c in self.coeffs.items() if len(w) == d}, self.trunc)

    def min_degree(self):
        """Lowest degree with a nonzero coefficient, or None for the zero series."""
        if not self.coeffs:
            return None
        return min(len(w) for w in self.coeffs)

    def is_zero(self) -> bool:
        return not self.coeffs

    def restrict(self, trunc: int) -> "TruncatedSeries":
        if trunc > self.trunc:
            raise ValueError("cannot raise a truncation degree")
        return TruncatedSeries(self.coeffs, trunc)

    def __eq__(self, other) -> bool:
        if not isinstance(other, TruncatedSeries):
            return NotImplemented
        return self.trunc == other.trunc and self.coeffs == other.coeffs

    def __hash__(self):
        return hash((self.trunc, frozenset(self.coeffs.items())))

    def __repr__(self) -> str:
        return f"TruncatedSeries({render_series(self)!r}, trunc={self.trunc})"


def shuffle_words(u: Word, v: Word) -> dict:
    """Shuffle product of two words as a word -> multiplicity map.

    Enumerates the positions of u inside the merged word; v fills the rest in
    order.  This is also the brute-force oracle used by the tests.
    """
    n, m = len(u), len(v)
    out: dict = {}
    for positions in combinations(range(n + m), n):
        w = [None] * (n + m)
        for i, p in enumerate(positions):
            w[p] = u[i]
        it = iter(v)
        for p in range(n + m):
            if w[p] is None:
                w[p] = next(it)
        t = tuple(w)
        out[t] = out.get(t, 0) + 1
    return out


def concat_mul(a: TruncatedSeries, b: TruncatedSeries) -> TruncatedSeries:
    return a * b


def shuffle_mul(a: TruncatedSeries, b: TruncatedSeries) -> TruncatedSeries:
    return a.shuffle(b)


# -- tensor square ------------------------------------------------------


class TensorSeries:
    """Element of the tensor square, truncated by total degree."""

    __slots__ = ("coeffs", "trunc")

    def __init__(self, coeffs: dict, trunc: int):
        self.trunc = trunc
        self.coeffs = {
            p: c for p, c in coeffs.items() if len(p[0]) + len(p[1]) <= trunc and c != 0
        }

    @staticmethod
    def zero(trunc: int) -> "TensorSeries":
        return TensorSeries({}, trunc)

    @staticmethod
    def one(trunc: int) -> "TensorSeries":
        return TensorSeries({(EMPTY_WORD, EMPTY_WORD): Fraction(1)}, trunc)

    @staticmethod
    def of(a: TruncatedSeries, b: TruncatedSeries) -> "TensorSeries":
        _check_trunc(a, b)
        out: dict = {}
        for u, cu in a.coeffs.items():
            for v, cv in b.coeffs.items():
                if len(u) + len(v) <= a.trunc:
                    out[(u, v)] = out.get((u, v), 0) + cu * cv
        return TensorSeries(out, a.trunc)

    def __add__(self, other: "TensorSeries") -> "TensorSeries":
        _check_trunc(self, other)
        out = dict(self.coeffs)
        for p, c in other.coeffs.items():
            out[p] = out.get(p, 0) + c
        return TensorSeries(out, self.trunc)

    def __sub__(self, other: "TensorSeries") -> "TensorSeries":
        _check_trunc(self, other)
        out = dict(self.coeffs)
        for p, c in other.coeffs.items():
            out[p] = out.get(p, 0) - c
        return TensorSeries(out, self.trunc)

    def __neg__(self) -> "TensorSeries":
        return TensorSeries({p: -c for p, c in self.coeffs.items()}, self.trunc)

    def scale(self, scalar) -> "TensorSeries":
        return TensorSeries({p: c * scalar for p, c in self.coeffs.items()}, self.trunc)

    def __mul__(self, other: "TensorSeries") -> "TensorSeries":
        _check_trunc(self, other)
        out: dict = {}
        for (u1, u2), cu in self.coeffs.items():
            room = self.trunc - len(u1) - len(u2)
            for (v1, v2), cv in other.coeffs.items():
                if len(v1) + len(v2) > room:
                    continue
                p = (u1 + v1, u2 + v2)
                out[p] = out.get(p, 0) + cu * cv
        return TensorSeries(out, self.trunc)

    def coeff(self, u: Word, v: Word):
        return self.coeffs.get((u, v), 0)

    def is_zero(self) -> bool:
        return not self.coeffs

    def __eq__(self, other) -> bool:
        if not isinstance(other, TensorSeries):
            return NotImplemented
        return self.trunc == other.trunc and self.coeffs == other.coeffs

    def __repr__(self) -> str:
        terms = sorted(self.coeffs.items(), key=lambda kv: (word_key(kv[0][0]), word_key(kv[0][1])))
        body = " + ".join(f"{c}*{render_word(u)}(x){render_word(v)}" for (u, v), c in terms)
        return f"TensorSeries({body or '0'}, trunc={self.trunc})"


def primitive_coproduct(a: TruncatedSeries) -> TensorSeries:
    """The algebra morphism with e_i |-> e_i(x)1 + 1(x)e_i (both letters primitive).

    On a word this is the unshuffle: the sum over all ways of splitting the
    letters into two complementary subsequences.
    """
    out: dict = {}
    for w, c in a.coeffs.items():
        n = len(w)
        for k in range(n + 1):
            for positions in combinations(range(n), k):
                left = tuple(w[p] for p in positions)
                rest = tuple(w[p] for p in range(n) if p not in set(positions))
                key = (left, rest)
                out[key] = out.get(key, 0) + c
    return TensorSeries(out, a.trunc)


def is_grouplike(a: TruncatedSeries) -> bool:
    """True iff the constant term is 1 and Delta(a) = a(x)a up to the truncation."""
    if a.constant_term() != 1:
        return False
    return primitive_coproduct(a) == TensorSeries.of(a, a)


def is_primitive(a: TruncatedSeries) -> bool:
    if a.constant_term() != 0:
        return False
    one = TruncatedSeries.one(a.trunc)
    expected = TensorSeries.of(a, one) + TensorSeries.of(one, a)
    return primitive_coproduct(a) == expected


# -- exp / log / inverse -------------------------------------------------


def exp_series(a: TruncatedSeries) -> TruncatedSeries:
    if a.constant_term() != 0:
        raise ValueError("exp needs a zero constant term")
    out = TruncatedSeries.one(a.trunc)
    power = TruncatedSeries.one(a.trunc)
    fact = 1
    for k in range(1, a.trunc + 1):
        power = power * a
        fact *= k
        if power.is_zero():
            break
        out = out + power.scale(Fraction(1, fact))
    return out


def log_series(a: TruncatedSeries) -> TruncatedSeries:
    if a.constant_term() != 1:
        raise ValueError("log needs constant term 1")
    x = a - TruncatedSeries.one(a.trunc)
    out = TruncatedSeries.zero(a.trunc)
    power = TruncatedSeries.one(a.trunc)
    for k in range(1, a.trunc + 1):
        power = power * x
        if power.is_zero():
            break
        out = out + power.scale(Fraction((-1) ** (k + 1), k))
    return out


def inverse_series(a: TruncatedSeries) -> TruncatedSeries:
    """Multiplicative inverse; requires an invertible constant term."""
    c0 = a.constant_term()
    if c0 == 0:
        raise ValueError("inverse needs an invertible constant term")
    inv_c0 = Fraction(1) / c0 if isinstance(c0, (Fraction, int)) else 1 / c0
    x = TruncatedSeries.one(a.trunc) - a.scale(inv_c0)
    out = TruncatedSeries.one(a.trunc)
    power = TruncatedSeries.one(a.trunc)
    for _ in range(a.trunc):
        power = power * x
        if power.is_zero():
            break
        out = out + power
    return out.scale(inv_c0)


def apply_endomorphism(a: TruncatedSeries, image0, image1):
    """Algebra-morphism image of `a`, given images of e0, e1 in any algebra.

    The target must support +, * and .scale; the unit is inferred from the
    images via `image0.one_like()`-free logic: the caller passes series-like
    objects living at the same truncation.
    """
    images = (image0, image1)
    cache: dict = {}

    def word_image(w: Word):
        if w in cache:
            return cache[w]
        if not w:
            raise KeyError
        if len(w) == 1:
            val = images[w[0]]
        else:
            val = word_image(w[:-1]) * images[w[-1]]
        cache[w] = val
        return val

    unit = None
    out = None
    for w, c in a.coeffs.items():
        if not w:
            if unit is None:
                unit = _unit_like(image0)
            term = unit.scale(c)
        else:
            term = word_image(w).scale(c)
        out = term if out is None else out + term
    if out is None:
        return _unit_like(image0).scale(0)
    return out


def _unit_like(model):
    """Unit of the algebra `model` lives in (series, tensor square, or braid layer)."""
    if isinstance(model, TruncatedSeries):
        return TruncatedSeries.one(model.trunc)
    if isinstance(model, TensorSeries):
        return TensorSeries.one(model.trunc)
    one = getattr(model, "one_like", None)
    if one is not None:
        return one()
    raise TypeError(f"no unit known for {type(model)!r}")


# -- univariate series ----------------------------------------------------


class UnivariateSeries:
    """Power series in one variable t, truncated at t^trunc."""

    __slots__ = ("coeffs", "trunc")

    def __init__(self, coeffs: dict, trunc: int):
        self.trunc = trunc
        self.coeffs = {n: c for n, c in coeffs.items() if n <= trunc and c != 0}

    @staticmethod
    def zero(trunc: int) -> "UnivariateSeries":
        return UnivariateSeries({}, trunc)

    @staticmethod
    def one(trunc: int) -> "UnivariateSeries":
        return UnivariateSeries({0: Fraction(1)}, trunc)

    def __add__(self, other: "UnivariateSeries") -> "UnivariateSeries":
        _check_trunc(self, other)
        out = dict(self.coeffs)
        for n, c in other.coeffs.items():
            out[n] = out.get(n, 0) + c
        return UnivariateSeries(out, self.trunc)

    def __sub__(self, other: "UnivariateSeries") -> "UnivariateSeries":
        return self + other.scale(-1)

    def scale(self, scalar) -> "UnivariateSeries":
        return UnivariateSeries({n: c * scalar for n, c in self.coeffs.items()}, self.trunc)

    def __mul__(self, other: "UnivariateSeries") -> "UnivariateSeries":
        _check_trunc(self, other)
        out: dict = {}
        for n, cn in self.coeffs.items():
            for m, cm in other.coeffs.items():
                if n + m <= self.trunc:
                    out[n + m] = out.get(n + m, 0) + cn * cm
        return UnivariateSeries(out, self.trunc)

    def exp(self) -> "UnivariateSeries":
        if self.coeffs.get(0, 0) != 0:
            raise ValueError("exp needs a zero constant term")
        out = UnivariateSeries.one(self.trunc)
        power = UnivariateSeries.one(self.trunc)
        fact = 1
        for k in range(1, self.trunc + 1):
            power = power * self
            fact *= k
            if not power.coeffs:
                break
            out = out + power.scale(Fraction(1, fact))
        return out

    def inverse(self) -> "UnivariateSeries":
        c0 = self.coeffs.get(0, 0)
        if c0 == 0:
            raise ValueError("inverse needs an invertible constant term")
        inv_c0 = Fraction(1) / c0 if isinstance(c0, (Fraction, int)) else 1 / c0
        x = UnivariateSeries.one(self.trunc) - self.scale(inv_c0)
        out = UnivariateSeries.one(self.trunc)
        power = UnivariateSeries.one(self.trunc)
        for _ in range(self.trunc):
            power = power * x
            if not power.coeffs:
                break
            out = out + power
        return out.scale(inv_c0)

    def substitute_e1(self, scalar) -> TruncatedSeries:
        """Evaluate at t = scalar*e1, producing a series in the two-letter algebra."""
        out = {}
        for n, c in self.coeffs.items():
            out[(1,) * n] = c * scalar**n
        return TruncatedSeries(out, self.trunc)

    def coeff(self, n: int):
        return self.coeffs.get(n, 0)

    def __eq__(self, other) -> bool:
        if not isinstance(other, UnivariateSeries):
            return NotImplemented
        return self.trunc == other.trunc and self.coeffs == other.coeffs

    def __repr__(self) -> str:
        body = " + ".join(f"{c}*t^{n}" for n, c in sorted(self.coeffs.items()))
        return f"UnivariateSeries({body or '0'}, trunc={self.trunc})"


def gamma_series(g: TruncatedSeries) -> UnivariateSeries:
    """exp(sum_{n>=1} (-1)^(n+1) (g|e0^(n-1)e1) t^n / n), truncated like g."""
    expo: dict = {}
    for n in range(1, g.trunc + 1):
        c = g.coeffs.get((0,) * (n - 1) + (1,), 0)
        if c != 0:
            expo[n] = c * Fraction((-1) ** (n + 1), n)
    return UnivariateSeries(expo, g.trunc).exp()


# -- regularization --------------------------------------------------------


def is_admissible(w: Word) -> bool:
    return len(w) >= 2 and w[0] == 0 and w[-1] == 1


def reg_word(w: Word) -> TruncatedSeries:
    """Regularization of an admissible word, as the literal three-step composite.

    Step 1 includes the word in the algebra; step 2 applies the morphism
    e_i |-> e_i(x)1 - 1(x)alpha_i into the algebra extended by two commuting
    bookkeeping letters; step 3 maps v(x)alpha_0^a*alpha_1^b to e1^b*v*e0^a.
    The bookkeeping letters never survive into the output.
    """
    if not is_admissible(w):
        raise ValueError(f"word {render_word(w)} is not admissible (must start e0, end e1)")
    n = len(w)
    # intermediate state: map (kept subword, (a, b)) -> coefficient
    state: dict = {(EMPTY_WORD, (0, 0)): Fraction(1)}
    for letter in w:
        nxt: dict = {}
        for (v, (a, b)), c in state.items():
            # keep the letter inside the word factor
            key = (v + (letter,), (a, b))
            nxt[key] = nxt.get(key, 0) + c
            # or send it to the commuting letters with a sign
            ab = (a + 1, b) if letter == 0 else (a, b + 1)
            key = (v, ab)
            nxt[key] = nxt.get(key, 0) - c
        state = nxt
    out: dict = {}
    for (v, (a, b)), c in state.items():
        word = (1,) * b + v + (0,) * a
        out[word] = out.get(word, 0) + c
    return TruncatedSeries(out, n)


# -- rendering -------------------------------------------------------------


def render_scalar(c) -> str:
    return str(c)


def render_series(a: TruncatedSeries) -> str:
    if not a.coeffs:
        return "0"
    parts = []
    for w in sorted(a.coeffs, key=word_key):
        c = a.coeffs[w]
        if not w:
            parts.append(render_scalar(c))
        elif c == 1:
            parts.append(render_word(w))
        else:
            parts.append(f"{render_scalar(c)}*{render_word(w)}")
    return " + ".join(parts)
