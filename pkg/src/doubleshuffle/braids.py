"""Braid/moduli layer.

Two parallel realizations of the genus-zero five-point structures:

* the graded one: the enveloping algebra of the five-point braid Lie algebra
  as a PBW smash product (free algebra on the three kernel generators of the
  point-erasing map, twisted by the free algebra on the two base generators),
  guarded by an independent relation-quotient oracle;

* the group one: the fundamental group of the five-point moduli space combed
  as (free on three kernel loops) x| (free on two base loops), with the
  conjugation table derived from the faithful Artin representation of the
  braid group on five strands and the sphere relation eliminating the fourth
  kernel loop.

Both action tables are derived at run time, cross-validated against each
other (the group table's Magnus shadow must reproduce the Lie table), and can
be written to / diffed against a versioned fixture file.

Conventions (recorded in the fixture header): points are labeled 1..5; the
base copy is generated by the braids of points (2,3) and (1,2), the images of
the two four-point generators under doubling of the fourth point; the kernel
is generated by the loops of point 5 around points 1, 2, 3.
"""

from __future__ import annotations

from fractions import Fraction
from functools import lru_cache
from itertools import permutations, product as iproduct

from .ncalg import (
    EMPTY_WORD,
    TensorSeries,
    TruncatedSeries,
    Word,
)
from . import dr_side
from . import betti_side
from .betti_side import (
    F2Word,
    GroupAlgebra,
    LocB,
    LOCB_ONE,
    MBElement,
    WBElement,
    locb_embed_word,
    locb_m_class_word,
    _locb_words_mul,
    mb_class,
    word_from_runs,
)

# ---------------------------------------------------------------------------
# free-group words on n letters (letters are +-1..+-n)
# ---------------------------------------------------------------------------


def fg_mul(*words):
    out: list[int] = []
    for w in words:
        for letter in w:
            if out and out[-1] == -letter:
                out.pop()
            else:
                out.append(letter)
    return tuple(out)


def fg_inv(w):
    return tuple(-x for x in reversed(w))


# ---------------------------------------------------------------------------
# Artin automorphisms of the free group on five letters (the derivation oracle)
# ---------------------------------------------------------------------------


class FreeAut:
    """Automorphism of the free group on 5 generators, by generator images."""

    __slots__ = ("images",)

    def __init__(self, images):
        self.images = tuple(images)

    @staticmethod
    def identity() -> "FreeAut":
        return FreeAut([(i,) for i in range(1, 6)])

    def apply(self, w):
        out = ()
        for letter in w:
            img = self.images[abs(letter) - 1]
            out = fg_mul(out, img if letter > 0 else fg_inv(img))
        return out

    def compose(self, other: "FreeAut") -> "FreeAut":
        """self after other: (self . other)(x) = self(other(x))."""
        return FreeAut([self.apply(img) for img in other.images])

    def __eq__(self, other) -> bool:
        return self.images == other.images

    def __hash__(self):
        return hash(self.images)


@lru_cache(maxsize=None)
def artin_generator(i: int, sign: int) -> FreeAut:
    """sigma_i: x_i -> x_i x_{i+1} x_i^{-1}, x_{i+1} -> x_i (1 <= i <= 4)."""
    images = [(k,) for k in range(1, 6)]
    if sign > 0:
        images[i - 1] = (i, i + 1, -i)
        images[i] = (i,)
    else:
        images[i - 1] = (i + 1,)
        images[i] = (-(i + 1), i, i + 1)
    return FreeAut(images)


def braid_aut(word) -> FreeAut:
    """Automorphism of a braid word; composition follows the word order."""
    out = FreeAut.identity()
    for i, sign in word:
        out = out.compose(artin_generator(i, sign))
    return out


def xij_braid_word(i: int, j: int):
    """x_ij = sigma_{j-1} ... sigma_{i+1} sigma_i^2 sigma_{i+1}^{-1} ... sigma_{j-1}^{-1}."""
    down = [(t, 1) for t in range(j - 1, i, -1)]
    up = [(t, -1) for t in range(i + 1, j)]
    return down + [(i, 1), (i, 1)] + up


@lru_cache(maxsize=None)
def xij_aut(i: int, j: int) -> FreeAut:
    return braid_aut(tuple(xij_braid_word(i, j)))


def _kernel_aut(letter: int) -> FreeAut:
    a = xij_aut(abs(letter), 5)
    if letter > 0:
        return a
    return braid_aut(tuple((t, -s) for t, s in reversed(xij_braid_word(abs(letter), 5))))


@lru_cache(maxsize=None)
def _kernel_word_aut(w) -> FreeAut:
    out = FreeAut.identity()
    for letter in w:
        out = out.compose(_kernel_aut(letter))
    return out


def _conjugation_target(base_braid, kernel_gen: int) -> FreeAut:
    v = braid_aut(tuple(base_braid))
    v_inv = braid_aut(tuple((t, -s) for t, s in reversed(base_braid)))
    return v.compose(_kernel_aut(kernel_gen)).compose(v_inv)


def _search_conjugator(target: FreeAut, kernel_gen: int, max_len: int = 4):
    """Find a word U over the four kernel loops with U x U^{-1} = target, where
    x is the given kernel generator.  Faithfulness of the Artin representation
    makes the equality of automorphisms an equality in the braid group."""
    letters = [1, 2, 3, 4, -1, -2, -3, -4]
    x5_image = target.apply((5,))
    frontier = [()]
    for _ in range(max_len + 1):
        nxt = []
        for u in frontier:
            a_u = _kernel_word_aut(u)
            a_u_inv = _kernel_word_aut(fg_inv(u))
            cand = a_u.compose(_kernel_aut(kernel_gen)).compose(a_u_inv)
            if cand.apply((5,)) == x5_image and cand == target:
                return fg_mul(u, (kernel_gen,), fg_inv(u))
            for letter in letters:
                if not u or u[-1] != -letter:
                    nxt.append(u + (letter,))
        frontier = nxt
    raise RuntimeError("conjugator search exhausted (convention mismatch?)")


# ---------------------------------------------------------------------------
# derived fixtures: sphere relation, conjugation table, Lie action table
# ---------------------------------------------------------------------------

BASE_BRAIDS = {
    1: [(2, 1), (2, 1)],  # braid of points (2,3): the image of X0
    2: [(1, 1), (1, 1)],  # braid of points (1,2): the image of X1
}


@lru_cache(maxsize=None)
def sphere_order():
    """The ordering of the four kernel loops whose product commutes with the
    whole base; that product is the boundary loop, trivial on the sphere."""
    sigmas = [braid_aut(((i, 1),)) for i in (1, 2, 3)]
    found = []
    for perm in permutations((1, 2, 3, 4)):
        z = _kernel_word_aut(perm)
        if all(s.compose(z) == z.compose(s) for s in sigmas):
            found.append(perm)
    if not found:
        raise RuntimeError("no boundary ordering commutes with the base braids")
    return sorted(found)[0]


@lru_cache(maxsize=None)
def _y4_elimination():
    """y4 as a word in y1..y3 from the sphere relation."""
    order = sphere_order()
    pos = order.index(4)
    before = tuple(order[:pos])
    after = tuple(order[pos + 1 :])
    return fg_mul(fg_inv(before), fg_inv(after))


def _eliminate_y4(w):
    out = ()
    y4 = _y4_elimination()
    for letter in w:
        if abs(letter) == 4:
            out = fg_mul(out, y4 if letter > 0 else fg_inv(y4))
        else:
            out = fg_mul(out, (letter,))
    return out


@lru_cache(maxsize=None)
def alpha_table():
    """Conjugation of the base letters on the three kernel generators, as
    reduced words over the kernel letters.  Keys: (base letter in {+-1, +-2},
    kernel generator in {1, 2, 3})."""
    table = {}
    for base_letter in (1, 2, -1, -2):
        braid = BASE_BRAIDS[abs(base_letter)]
        if base_letter < 0:
            braid = [(t, -s) for t, s in reversed(braid)]
        for k in (1, 2, 3):
            target = _conjugation_target(braid, k)
            table[(base_letter, k)] = _eliminate_y4(_search_conjugator(target, k))
    return table


def alpha_letter(base_letter: int, kernel_letter: int):
    img = alpha_table()[(base_letter, abs(kernel_letter))]
    return img if kernel_letter > 0 else fg_inv(img)


def alpha_apply(base_word: F2Word, kernel_word) -> tuple:
    """Conjugation action of a base word; the first letter acts last."""
    out = kernel_word
    for b in reversed(base_word):
        out = fg_mul(*[alpha_letter(b, letter) for letter in out]) if out else ()
    return out


# ---------------------------------------------------------------------------
# relation-quotient oracle for the five-point braid Lie algebra
# ---------------------------------------------------------------------------

P5_GENS = [(i, j) for i in range(1, 6) for j in range(i + 1, 6)]  # 10 pairs
P5_INDEX = {g: n for n, g in enumerate(P5_GENS)}


def _sum_relation_rows():
    rows = []
    for i in range(1, 6):
        row = {}
        for j in range(1, 6):
            if j != i:
                g = (min(i, j), max(i, j))
                row[(P5_INDEX[g],)] = Fraction(1)
        rows.append(row)
    return rows


def _comm_relation_rows():
    rows = []
    for a in range(10):
        for b in range(a + 1, 10):
            ga, gb = P5_GENS[a], P5_GENS[b]
            if set(ga) & set(gb):
                continue
            rows.append({(a, b): Fraction(1), (b, a): Fraction(-1)})
    return rows


class _Rref:
    """Sparse row echelon structure with back-substitution style reduction."""

    def __init__(self):
        self.pivots = {}  # column -> reduced row (dict col -> coeff, pivot coeff 1)

    def reduce(self, row: dict) -> dict:
        row = dict(row)
        while True:
            hits = sorted(c for c in row if c in self.pivots)
            if not hits:
                return row
            for col in hits:
                if col not in row:
                    continue
                c = row.pop(col)
                for k, v in self.pivots[col].items():
                    if k == col:
                        continue
                    row[k] = row.get(k, 0) - c * v
                    if row[k] == 0:
                        del row[k]

    def insert(self, row: dict) -> bool:
        row = self.reduce(row)
        if not row:
            return False
        col = min(row)
        inv = Fraction(1) / row[col]
        row = {k: v * inv for k, v in row.items()}
        for other in self.pivots.values():
            if col in other:
                c = other[col]
                for k, v in row.items():
                    other[k] = other.get(k, 0) - c * v
                    if other[k] == 0:
                        del other[k]
        self.pivots[col] = row
        return True


@lru_cache(maxsize=None)
def _oracle_rref(degree: int) -> _Rref:
    if degree > 4:
        raise ValueError("oracle degree capped at 4 (cost guard)")
    rref = _Rref()
    monos_by_deg = {d: list(iproduct(range(10), repeat=d)) for d in range(degree)}
    for rel in _sum_relation_rows():
        rel_deg = 1
        for a in range(0, degree - rel_deg + 1):
            b = degree - rel_deg - a
            for u in monos_by_deg.get(a, [()]):
                for v in monos_by_deg.get(b, [()]):
                    rref.insert({u + key + v: c for key, c in rel.items()})
    for rel in _comm_relation_rows():
        rel_deg = 2
        if degree < rel_deg:
            continue
        for a in range(0, degree - rel_deg + 1):
            b = degree - rel_deg - a
            for u in monos_by_deg.get(a, [()]):
                for v in monos_by_deg.get(b, [()]):
                    rref.insert({u + key + v: c for key, c in rel.items()})
    return rref


def up5_oracle_reduce(element: dict, degree: int) -> dict:
    """Normal form of a homogeneous degree-`degree` element of the free algebra
    on the ten generators, modulo the relation ideal.  Keys are tuples of
    generator indices into P5_GENS."""
    return _oracle_rref(degree).reduce(element)


def oracle_quotient_dim(degree: int) -> int:
    total = 10**degree
    return total - len(_oracle_rref(degree).pivots)


# labels of the five PBW letters inside the oracle's generator set
KERNEL_ORACLE = [P5_INDEX[(1, 5)], P5_INDEX[(2, 5)], P5_INDEX[(3, 5)]]
BASE_ORACLE = [P5_INDEX[(2, 3)], P5_INDEX[(1, 2)]]  # base letter 0, base letter 1


@lru_cache(maxsize=None)
def degree_one_table() -> dict:
    """Every generator expressed over the five-letter basis (three kernel, two
    base), solved from the degree-one relations with the basis columns kept
    free by the pivot order."""
    basis = KERNEL_ORACLE + BASE_ORACLE

    def key(idx):
        return (1, idx) if idx in basis else (0, idx)

    rref = _Rref()
    for rel in _sum_relation_rows():
        rref.insert({key(mono[0]): c for mono, c in rel.items()})
    out = {}
    for n, g in enumerate(P5_GENS):
        reduced = rref.reduce({key(n): Fraction(1)})
        expr = {}
        for (tier, idx), c in reduced.items():
            if tier != 1:
                raise RuntimeError("degree-one quotient has an unexpected basis element")
            expr[idx] = expr.get(idx, 0) + c
        out[g] = expr
    return out


@lru_cache(maxsize=None)
def p5_action_table() -> dict:
    """Bracket of each base letter with each kernel letter, as a combination of
    kernel words of length two; solved through the relation-quotient oracle."""
    rref = _oracle_rref(2)
    kernel_products = {}
    for i in range(3):
        for j in range(3):
            key = (KERNEL_ORACLE[i], KERNEL_ORACLE[j])
            kernel_products[(i, j)] = rref.reduce({key: Fraction(1)})
    table = {}
    for b, b_idx in enumerate(BASE_ORACLE):
        for k, k_idx in enumerate(KERNEL_ORACLE):
            target = rref.reduce(
                {(b_idx, k_idx): Fraction(1), (k_idx, b_idx): Fraction(-1)}
            )
            combo = _solve_in_span(target, kernel_products)
            table[(b, k)] = {kw: c for kw, c in combo.items() if c != 0}
    return table


def _solve_in_span(target: dict, vectors: dict) -> dict:
    """Write `target` as a combination of the given vectors (exact solve).

    Augments each vector with a marker column sorting after every real column,
    so that reduction of the target leaves exactly the sought coefficients."""
    aug = _Rref()
    markers = {}
    for n, (tag, vec) in enumerate(sorted(vectors.items())):
        row = {(0, key): c for key, c in vec.items()}
        row[(1, n)] = Fraction(1)  # marker column, sorts after all real columns
        aug.insert(row)
        markers[(1, n)] = tag
    residual = aug.reduce({(0, key): c for key, c in target.items()})
    combo = {}
    for key, c in list(residual.items()):
        if key in markers:
            combo[markers[key]] = -c
            del residual[key]
    if residual:
        raise RuntimeError("target is not in the span of the kernel products")
    return combo


# ---------------------------------------------------------------------------
# the enveloping algebra as a PBW smash product
# ---------------------------------------------------------------------------
# basis: (kernel word over {0,1,2}, base word over {0,1}); kernel letter k is
# the loop generator of point k+1 around point 5; base letter 0 is the
# (2,3)-braid class, base letter 1 the (1,2)-braid class.


@lru_cache(maxsize=None)
def _derivation_on_kernel_letter(b: int, k: int) -> tuple:
    table = p5_action_table()[(b, k)]
    return tuple(sorted(table.items()))


def _derivation_on_kernel_word(b: int, kw: tuple) -> dict:
    out: dict = {}
    for pos in range(len(kw)):
        for piece, c in _derivation_on_kernel_letter(b, kw[pos]):
            word = kw[:pos] + piece + kw[pos + 1 :]
            out[word] = out.get(word, 0) + c
    return out


@lru_cache(maxsize=None)
def _base_word_times_kernel_word(bw: tuple, kw: tuple) -> tuple:
    """bw * kw in the smash product, as ((kernel, base) -> coeff) items."""
    if not bw or not kw:
        return (((kw, bw), Fraction(1)),)
    head, last = bw[:-1], bw[-1]
    out: dict = {}
    # last * kw = kw * last + derivation(kw)
    for (k2, b2), c in _base_word_times_kernel_word(head, kw):
        key = (k2, b2 + (last,))
        out[key] = out.get(key, 0) + c
    for word, c in _derivation_on_kernel_word(last, kw).items():
        for (k2, b2), c2 in _base_word_times_kernel_word(head, word):
            key = (k2, b2)
            out[key] = out.get(key, 0) + c * c2
    return tuple(out.items())


class UP5Element:
    """Element of the enveloping algebra in PBW smash coordinates."""

    __slots__ = ("coeffs", "trunc")

    def __init__(self, coeffs: dict, trunc: int):
        self.trunc = trunc
        self.coeffs = {
            kb: c for kb, c in coeffs.items() if len(kb[0]) + len(kb[1]) <= trunc and c != 0
        }

    @staticmethod
    def zero(trunc: int) -> "UP5Element":
        return UP5Element({}, trunc)

    @staticmethod
    def one(trunc: int) -> "UP5Element":
        return UP5Element({((), ()): Fraction(1)}, trunc)

    @staticmethod
    def kernel_letter(k: int, trunc: int) -> "UP5Element":
        return UP5Element({(((k,), ())): Fraction(1)}, trunc)

    @staticmethod
    def base_letter(b: int, trunc: int) -> "UP5Element":
        return UP5Element({(((), (b,))): Fraction(1)}, trunc)

    def one_like(self) -> "UP5Element":
        return UP5Element.one(self.trunc)

    def __add__(self, other: "UP5Element") -> "UP5Element":
        if self.trunc != other.trunc:
            raise ValueError("truncation mismatch")
        out = dict(self.coeffs)
        for kb, c in other.coeffs.items():
            out[kb] = out.get(kb, 0) + c
        return UP5Element(out, self.trunc)

    def __sub__(self, other: "UP5Element") -> "UP5Element":
        return self + other.scale(-1)

    def scale(self, scalar) -> "UP5Element":
        return UP5Element({kb: c * scalar for kb, c in self.coeffs.items()}, self.trunc)

    def __mul__(self, other: "UP5Element") -> "UP5Element":
        if self.trunc != other.trunc:
            raise ValueError("truncation mismatch")
        out: dict = {}
        for (k1, b1), c1 in self.coeffs.items():
            d1 = len(k1) + len(b1)
            for (k2, b2), c2 in other.coeffs.items():
                if d1 + len(k2) + len(b2) > self.trunc:
                    continue
                c = c1 * c2
                for (km, bm), cm in _base_word_times_kernel_word(b1, k2):
                    key = (k1 + km, bm + b2)
                    out[key] = out.get(key, 0) + c * cm
        return UP5Element(out, self.trunc)

    def degree_part(self, d: int) -> "UP5Element":
        return UP5Element(
            {kb: c for kb, c in self.coeffs.items() if len(kb[0]) + len(kb[1]) == d},
            self.trunc,
        )

    def restrict(self, trunc: int) -> "UP5Element":
        return UP5Element(self.coeffs, trunc)

    def is_zero(self) -> bool:
        return not self.coeffs

    def __eq__(self, other) -> bool:
        if not isinstance(other, UP5Element):
            return NotImplemented
        return self.trunc == other.trunc and self.coeffs == other.coeffs

    def __repr__(self) -> str:
        names_k = ["e15", "e25", "e35"]
        names_b = ["e23", "e12"]

        def mono(kb):
            k, b = kb
            parts = [names_k[x] for x in k] + [names_b[x] for x in b]
            return ".".join(parts) or "1"

        terms = sorted(self.coeffs.items(), key=lambda kv: (len(kv[0][0]) + len(kv[0][1]), kv[0]))
        return "UP5(" + (" + ".join(f"{c}*{mono(kb)}" for kb, c in terms) or "0") + ")"


def up5_mul(a: UP5Element, b: UP5Element) -> UP5Element:
    return a * b


def up5_generator(pair: tuple, trunc: int) -> UP5Element:
    """Any e_ij as an element in PBW coordinates, via the degree-one table."""
    expr = degree_one_table()[pair]
    out: dict = {}
    for idx, c in expr.items():
        if idx in KERNEL_ORACLE:
            out[(((KERNEL_ORACLE.index(idx),), ()))] = c
        else:
            out[(((), (BASE_ORACLE.index(idx),)))] = c
    return UP5Element(out, trunc)


def up5_to_oracle(a: UP5Element) -> dict:
    """Image in the free algebra on the ten generators (for oracle checks)."""
    out: dict = {}
    for (k, b), c in a.coeffs.items():
        key = tuple(KERNEL_ORACLE[x] for x in k) + tuple(BASE_ORACLE[x] for x in b)
        out[key] = out.get(key, 0) + c
    return out


def oracle_nf_of_up5(a: UP5Element, degree: int) -> dict:
    part = up5_to_oracle(a.degree_part(degree))
    return up5_oracle_reduce(part, degree) if part else {}


# ---------------------------------------------------------------------------
# Lie-side morphisms
# ---------------------------------------------------------------------------


def ell(a: TruncatedSeries) -> UP5Element:
    """Doubling of the fourth point: the two letters map to the base letters."""
    return UP5Element({((), w): c for w, c in a.coeffs.items()}, a.trunc)


@lru_cache(maxsize=None)
def _p4_reduction() -> dict:
    """Reduction of the six four-point generators to the free pair, from the
    four-point sum relations: returns (i,j) -> {0: c0, 1: c1} with 0, 1 the
    letters e23-like and e12-like."""
    gens = [(i, j) for i in range(1, 5) for j in range(i + 1, 5)]
    index = {g: n for n, g in enumerate(gens)}
    rref = _Rref()
    # order columns so the free pair (1,2),(2,3) reduces last
    pref = {index[(1, 3)]: 0, index[(1, 4)]: 1, index[(2, 4)]: 2, index[(3, 4)]: 3,
            index[(1, 2)]: 4, index[(2, 3)]: 5}

    def rekey(row):
        return {(pref[k],): v for k, v in row.items()}

    for i in range(1, 5):
        row = {}
        for j in range(1, 5):
            if j != i:
                g = (min(i, j), max(i, j))
                row[index[g]] = Fraction(1)
        rref.insert(rekey(row))
    out = {}
    for g, n in index.items():
        reduced = rref.reduce({(pref[n],): Fraction(1)})
        expr = {0: Fraction(0), 1: Fraction(0)}
        for key, c in reduced.items():
            if key[0] == 5:  # (2,3)
                expr[0] += c
            elif key[0] == 4:  # (1,2)
                expr[1] += c
            else:
                raise RuntimeError("four-point reduction failed")
        out[g] = {k: v for k, v in expr.items() if v != 0}
    return out


@lru_cache(maxsize=None)
def pr_letter_images(i: int) -> dict:
    """Images of the five PBW letters under erasing of point i (i in {1,2,5}),
    as maps {letter: {0: c, 1: c}} into the two-letter algebra.

    The surviving fifth point inherits the erased label; this is the labeling
    under which the erasing maps kill the five-point sum relations (checked by
    the fixture validation tests)."""
    if i == 5:
        return {("k", 0): {}, ("k", 1): {}, ("k", 2): {}, ("b", 0): {0: Fraction(1)}, ("b", 1): {1: Fraction(1)}}
    reduction = _p4_reduction()
    out = {}
    pairs = {("k", 0): (1, 5), ("k", 1): (2, 5), ("k", 2): (3, 5), ("b", 0): (2, 3), ("b", 1): (1, 2)}
    for tag, (a, b) in pairs.items():
        if i in (a, b):
            out[tag] = {}
            continue
        a2 = i if a == 5 else a
        b2 = i if b == 5 else b
        out[tag] = dict(reduction[(min(a2, b2), max(a2, b2))])
    return out


def _letter_series(images: dict, trunc: int) -> TruncatedSeries:
    return TruncatedSeries({(k,): c for k, c in images.items()}, trunc)


def pr_series(a: UP5Element, i: int) -> TruncatedSeries:
    """Point-erasing morphism into the two-letter algebra."""
    table = pr_letter_images(i)
    out = TruncatedSeries.zero(a.trunc)
    cache: dict = {}

    def mono_image(kb):
        if kb in cache:
            return cache[kb]
        k, b = kb
        val = TruncatedSeries.one(a.trunc)
        for x in k:
            val = val * _letter_series(table[("k", x)], a.trunc)
        for x in b:
            val = val * _letter_series(table[("b", x)], a.trunc)
        cache[kb] = val
        return val

    for kb, c in a.coeffs.items():
        out = out + mono_image(kb).scale(c)
    return out


def pr12(a: UP5Element) -> TensorSeries:
    """(erase-1 (x) erase-2) after the diagonal; an algebra morphism whose
    letter images are pr1(letter) (x) 1 + 1 (x) pr2(letter)."""
    t1 = pr_letter_images(1)
    t2 = pr_letter_images(2)
    out = TensorSeries.zero(a.trunc)
    cache: dict = {}

    def letter_tensor(tag):
        left = _letter_series(t1[tag], a.trunc)
        right = _letter_series(t2[tag], a.trunc)
        return TensorSeries.of(left, TruncatedSeries.one(a.trunc)) + TensorSeries.of(
            TruncatedSeries.one(a.trunc), right
        )

    def mono_image(kb):
        if kb in cache:
            return cache[kb]
        k, b = kb
        val = TensorSeries.one(a.trunc)
        for x in k:
            val = val * letter_tensor(("k", x))
        for x in b:
            val = val * letter_tensor(("b", x))
        cache[kb] = val
        return val

    for kb, c in a.coeffs.items():
        out = out + mono_image(kb).scale(c)
    return out


# ---------------------------------------------------------------------------
# 3x3 matrices over any of the workbench rings
# ---------------------------------------------------------------------------


class Matrix3:
    __slots__ = ("rows",)

    def __init__(self, rows):
        self.rows = [list(r) for r in rows]

    @staticmethod
    def identity(one, zero) -> "Matrix3":
        return Matrix3(
            [[one if i == j else zero for j in range(3)] for i in range(3)]
        )

    def __mul__(self, other: "Matrix3") -> "Matrix3":
        out = []
        for i in range(3):
            row = []
            for j in range(3):
                acc = None
                for k in range(3):
                    term = self.rows[i][k] * other.rows[k][j]
                    acc = term if acc is None else acc + term
                row.append(acc)
            out.append(row)
        return Matrix3(out)

    def __add__(self, other: "Matrix3") -> "Matrix3":
        return Matrix3(
            [[self.rows[i][j] + other.rows[i][j] for j in range(3)] for i in range(3)]
        )

    def map(self, f) -> "Matrix3":
        return Matrix3([[f(x) for x in row] for row in self.rows])

    def __eq__(self, other) -> bool:
        return self.rows == other.rows


# ---------------------------------------------------------------------------
# the matrix morphism on the graded side
# ---------------------------------------------------------------------------


@lru_cache(maxsize=None)
def _varpi_kernel_letter(k: int, trunc: int) -> Matrix3:
    rows = []
    for i in range(3):
        row = [UP5Element.zero(trunc) for _ in range(3)]
        row[k] = UP5Element.kernel_letter(i, trunc)
        rows.append(row)
    return Matrix3(rows)


@lru_cache(maxsize=None)
def _varpi_base_letter(b: int, trunc: int) -> Matrix3:
    rows = []
    for i in range(3):
        row = [UP5Element.zero(trunc) for _ in range(3)]
        row[i] = row[i] + UP5Element.base_letter(b, trunc)
        # e_i5 * base = base * e_i5 + [e_i5, base]; the bracket re-factors on
        # the right through the last letter of each kernel word
        for piece, c in _derivation_on_kernel_letter(b, i):
            j = piece[-1]
            head = piece[:-1]
            row[j] = row[j] - UP5Element({(head, ()): c}, trunc)
        rows.append(row)
    return Matrix3(rows)


def varpi(a: UP5Element) -> Matrix3:
    """The unique matrix with e_i5 * a = sum_j varpi(a)_ij * e_j5, computed
    multiplicatively from the letter matrices."""
    zero = UP5Element.zero(a.trunc)
    total = Matrix3([[zero] * 3 for _ in range(3)])
    cache: dict = {}

    def mono_matrix(kb):
        if kb in cache:
            return cache[kb]
        k, b = kb
        m = Matrix3.identity(UP5Element.one(a.trunc), zero)
        for x in k:
            m = m * _varpi_kernel_letter(x, a.trunc)
        for x in b:
            m = m * _varpi_base_letter(x, a.trunc)
        cache[kb] = m
        return m

    for kb, c in a.coeffs.items():
        total = total + mono_matrix(kb).map(lambda e: e.scale(c))
    return total


def varpi_identity_residual(a: UP5Element) -> list:
    """The three residuals e_i5*a - sum_j varpi(a)_ij*e_j5 (all must vanish)."""
    lifted = a.restrict(a.trunc + 1)
    m = varpi(a)
    out = []
    for i in range(3):
        lhs = UP5Element.kernel_letter(i, lifted.trunc) * lifted
        rhs = UP5Element.zero(lifted.trunc)
        for j in range(3):
            rhs = rhs + m.rows[i][j].restrict(lifted.trunc) * UP5Element.kernel_letter(
                j, lifted.trunc
            )
        out.append(lhs - rhs)
    return out


# ---------------------------------------------------------------------------
# the five-point mapping class group, combed
# ---------------------------------------------------------------------------

P5Element = tuple  # (kernel word over +-{1,2,3}, base word over +-{1,2})

P5_ONE: P5Element = ((), ())


def p5_mul(g: P5Element, h: P5Element) -> P5Element:
    (w1, v1), (w2, v2) = g, h
    return (fg_mul(w1, alpha_apply(v1, w2)), fg_mul(v1, v2))


def p5_inv(g: P5Element) -> P5Element:
    w, v = g
    vi = fg_inv(v)
    return (alpha_apply(vi, fg_inv(w)), vi)


def p5_of_kernel(w) -> P5Element:
    return (tuple(w), ())


def p5_of_base(v) -> P5Element:
    return ((), tuple(v))


class P5Algebra:
    """Finite combination of combed group elements."""

    __slots__ = ("coeffs",)

    def __init__(self, coeffs: dict):
        self.coeffs = {g: c for g, c in coeffs.items() if c != 0}

    @staticmethod
    def zero() -> "P5Algebra":
        return P5Algebra({})

    @staticmethod
    def one() -> "P5Algebra":
        return P5Algebra({P5_ONE: Fraction(1)})

    @staticmethod
    def of(g: P5Element, coeff=Fraction(1)) -> "P5Algebra":
        return P5Algebra({g: coeff})

    def __add__(self, other: "P5Algebra") -> "P5Algebra":
        out = dict(self.coeffs)
        for g, c in other.coeffs.items():
            out[g] = out.get(g, 0) + c
        return P5Algebra(out)

    def __sub__(self, other: "P5Algebra") -> "P5Algebra":
        return self + other.scale(-1)

    def scale(self, scalar) -> "P5Algebra":
        return P5Algebra({g: c * scalar for g, c in self.coeffs.items()})

    def __mul__(self, other: "P5Algebra") -> "P5Algebra":
        out: dict = {}
        for g, cg in self.coeffs.items():
            for h, ch in other.coeffs.items():
                k = p5_mul(g, h)
                out[k] = out.get(k, 0) + cg * ch
        return P5Algebra(out)

    def is_zero(self) -> bool:
        return not self.coeffs

    def __eq__(self, other) -> bool:
        if not isinstance(other, P5Algebra):
            return NotImplemented
        return self.coeffs == other.coeffs


def ell_b(a: GroupAlgebra) -> P5Algebra:
    """Doubling on the group side: base words embed unchanged."""
    return P5Algebra({p5_of_base(w): c for w, c in a.coeffs.items()})


# images of the five group generators under erasing point i, as base-group words
@lru_cache(maxsize=None)
def pr_b_letter_images(i: int) -> dict:
    if i == 5:
        return {("k", 1): (), ("k", 2): (), ("k", 3): (), ("b", 1): (1,), ("b", 2): (2,)}
    # The surviving fifth point inherits the erased label, matching the graded
    # side.  Word-level values are pinned by two requirements that the tests
    # re-verify: equivariance with the conjugation action (the maps must be
    # group morphisms on the combed model) and commutativity of the diagram
    # checkers.  Those requirements have a unique solution over short
    # conjugator corrections; the only entry differing from the naive curve
    # relabeling is the third kernel loop under erasing of point 2, whose
    # rotated curve wraps past the first point and picks up an X1-conjugation.
    if i == 1:
        return {
            ("k", 1): (),
            ("k", 2): (2,),          # X1
            ("k", 3): (-2, -1),      # X1^-1 X0^-1
            ("b", 1): (1,),          # X0
            ("b", 2): (),
        }
    if i == 2:
        return {
            ("k", 1): (2,),          # X1
            ("k", 2): (),
            ("k", 3): (-2, 1, 2),    # X1^-1 X0 X1
            ("b", 1): (),
            ("b", 2): (),
        }
    raise ValueError("point-erasing tables exist for i in {1, 2, 5} only")


def pr_b_element(g: P5Element, i: int) -> F2Word:
    table = pr_b_letter_images(i)
    w, v = g
    out: F2Word = ()
    for letter in w:
        img = table[("k", abs(letter))]
        out = betti_side.group_mul(out, img if letter > 0 else betti_side.group_inv(img))
    for letter in v:
        img = table[("b", abs(letter))]
        out = betti_side.group_mul(out, img if letter > 0 else betti_side.group_inv(img))
    return out


def pr_b(a: P5Algebra, i: int) -> GroupAlgebra:
    out: dict = {}
    for g, c in a.coeffs.items():
        w = pr_b_element(g, i)
        out[w] = out.get(w, 0) + c
    return GroupAlgebra(out)


class GATensor:
    """Pairs of group words with rational coefficients."""

    __slots__ = ("coeffs",)

    def __init__(self, coeffs: dict):
        self.coeffs = {p: c for p, c in coeffs.items() if c != 0}

    @staticmethod
    def zero() -> "GATensor":
        return GATensor({})

    @staticmethod
    def one() -> "GATensor":
        return GATensor({((), ()): Fraction(1)})

    @staticmethod
    def of(a: GroupAlgebra, b: GroupAlgebra) -> "GATensor":
        out: dict = {}
        for u, cu in a.coeffs.items():
            for v, cv in b.coeffs.items():
                out[(u, v)] = out.get((u, v), 0) + cu * cv
        return GATensor(out)

    def __add__(self, other: "GATensor") -> "GATensor":
        out = dict(self.coeffs)
        for p, c in other.coeffs.items():
            out[p] = out.get(p, 0) + c
        return GATensor(out)

    def __sub__(self, other: "GATensor") -> "GATensor":
        return self + other.scale(-1)

    def scale(self, scalar) -> "GATensor":
        return GATensor({p: c * scalar for p, c in self.coeffs.items()})

    def __mul__(self, other: "GATensor") -> "GATensor":
        out: dict = {}
        for (u1, u2), cu in self.coeffs.items():
            for (v1, v2), cv in other.coeffs.items():
                p = (betti_side.group_mul(u1, v1), betti_side.group_mul(u2, v2))
                out[p] = out.get(p, 0) + cu * cv
        return GATensor(out)

    def is_zero(self) -> bool:
        return not self.coeffs

    def __eq__(self, other) -> bool:
        if not isinstance(other, GATensor):
            return NotImplemented
        return self.coeffs == other.coeffs


def pr12_b(a: P5Algebra) -> GATensor:
    """Group-diagonal then (erase-1 (x) erase-2), extended linearly."""
    out: dict = {}
    for g, c in a.coeffs.items():
        key = (pr_b_element(g, 1), pr_b_element(g, 2))
        out[key] = out.get(key, 0) + c
    return GATensor(out)


def varpi_b(a: P5Algebra) -> Matrix3:
    """The unique matrix with (x_i5 - 1) a = sum_j varpi_b(a)_ij (x_j5 - 1)."""
    zero = P5Algebra.zero()
    total = Matrix3([[zero] * 3 for _ in range(3)])
    for g, c in a.coeffs.items():
        m = _varpi_b_element(g)
        total = total + m.map(lambda e: e.scale(c))
    return total


@lru_cache(maxsize=None)
def _varpi_b_element(g: P5Element) -> Matrix3:
    w, v = g
    g_alg = P5Algebra.of(g)
    rows = []
    for i in (1, 2, 3):
        # (x_i5 - 1) g = g ((g^-1 x_i5 g) - 1); the conjugate stays in the kernel
        conj = alpha_apply(fg_inv(v), fg_mul(fg_inv(w), (i,), w))
        row = [P5Algebra.zero() for _ in range(3)]
        prefix = ()
        for letter in conj:
            j = abs(letter)
            if letter > 0:
                coeff = P5Algebra.of(p5_of_kernel(prefix))
            else:
                coeff = P5Algebra.of(p5_of_kernel(fg_mul(prefix, (letter,)))).scale(-1)
            row[j - 1] = row[j - 1] + coeff
            prefix = fg_mul(prefix, (letter,))
        rows.append([g_alg * entry for entry in row])
    return Matrix3(rows)


def varpi_b_identity_residual(a: P5Algebra) -> list:
    m = varpi_b(a)
    out = []
    for i in (1, 2, 3):
        xi = P5Algebra.of(p5_of_kernel((i,))) - P5Algebra.one()
        lhs = xi * a
        rhs = P5Algebra.zero()
        for j in (1, 2, 3):
            xj = P5Algebra.of(p5_of_kernel((j,))) - P5Algebra.one()
            rhs = rhs + m.rows[i - 1][j - 1] * xj
        out.append(lhs - rhs)
    return out


# ---------------------------------------------------------------------------
# Magnus shadows (letters to exponentials, used by the validation tests)
# ---------------------------------------------------------------------------


@lru_cache(maxsize=None)
def _exp_letter(kind: str, index: int, sign: int, trunc: int) -> UP5Element:
    if kind == "k":
        letter = UP5Element.kernel_letter(index, trunc)
    else:
        letter = UP5Element.base_letter(index, trunc)
    letter = letter.scale(Fraction(sign))
    out = UP5Element.one(trunc)
    power = UP5Element.one(trunc)
    fact = 1
    for n in range(1, trunc + 1):
        power = power * letter
        fact *= n
        if power.is_zero():
            break
        out = out + power.scale(Fraction(1, fact))
    return out


def kernel_magnus(w, trunc: int) -> UP5Element:
    """Magnus expansion of a kernel word (free group on the three loops)."""
    out = UP5Element.one(trunc)
    for letter in w:
        out = out * _exp_letter("k", abs(letter) - 1, 1 if letter > 0 else -1, trunc)
    return out


def p5_magnus(a: P5Algebra, trunc: int) -> UP5Element:
    """Per-element exponential coordinates of combed group elements.

    A filtration-respecting linear map used to read off symbols; it is not an
    algebra morphism (the completed comparison isomorphisms of the group and
    graded sides require an associator twist)."""
    out = UP5Element.zero(trunc)
    for (w, v), c in a.coeffs.items():
        term = kernel_magnus(w, trunc)
        for letter in v:
            term = term * _exp_letter("b", abs(letter) - 1, 1 if letter > 0 else -1, trunc)
        out = out + term.scale(c)
    return out


def derivation_on_kernel_word(b: int, kw: tuple) -> dict:
    return _derivation_on_kernel_word(b, kw)


# ---------------------------------------------------------------------------
# localized tensor squares and the row/column vectors
# ---------------------------------------------------------------------------


class LocDRTensor:
    """Tensor square of the localization inverting e1 (graded side)."""

    __slots__ = ("coeffs",)

    def __init__(self, coeffs: dict):
        self.coeffs = {p: c for p, c in coeffs.items() if c != 0}

    @staticmethod
    def zero() -> "LocDRTensor":
        return LocDRTensor({})

    @staticmethod
    def of(a: dr_side.LocElement, b: dr_side.LocElement) -> "LocDRTensor":
        out: dict = {}
        for u, cu in a.coeffs.items():
            for v, cv in b.coeffs.items():
                out[(u, v)] = out.get((u, v), 0) + cu * cv
        return LocDRTensor(out)

    def __add__(self, other):
        out = dict(self.coeffs)
        for p, c in other.coeffs.items():
            out[p] = out.get(p, 0) + c
        return LocDRTensor(out)

    def __sub__(self, other):
        return self + other.scale(-1)

    def scale(self, scalar):
        return LocDRTensor({p: c * scalar for p, c in self.coeffs.items()})

    def __mul__(self, other):
        out: dict = {}
        for (u1, u2), cu in self.coeffs.items():
            for (v1, v2), cv in other.coeffs.items():
                p = (
                    dr_side._loc_normalize(list(u1) + list(v1)),
                    dr_side._loc_normalize(list(u2) + list(v2)),
                )
                out[p] = out.get(p, 0) + cu * cv
        return LocDRTensor(out)

    def is_zero(self) -> bool:
        return not self.coeffs

    def __eq__(self, other) -> bool:
        if not isinstance(other, LocDRTensor):
            return NotImplemented
        return self.coeffs == other.coeffs


def loc_dr_tensor_of_series(t: TensorSeries) -> LocDRTensor:
    out: dict = {}
    for (u, v), c in t.coeffs.items():
        key = (dr_side.loc_embed_word(u), dr_side.loc_embed_word(v))
        out[key] = out.get(key, 0) + c
    return LocDRTensor(out)


class LocMDRTensor:
    """Tensor square of the localized module classes on the graded side."""

    __slots__ = ("coeffs",)

    def __init__(self, coeffs: dict):
        self.coeffs = {p: c for p, c in coeffs.items() if c != 0}

    @staticmethod
    def act(t: LocDRTensor, m: "LocMDRTensor") -> "LocMDRTensor":
        out: dict = {}
        for (u1, u2), cu in t.coeffs.items():
            for (m1, m2), cm in m.coeffs.items():
                w1 = dr_side.loc_m_class_word(dr_side._loc_normalize(list(u1) + list(m1)))
                if w1 is None:
                    continue
                w2 = dr_side.loc_m_class_word(dr_side._loc_normalize(list(u2) + list(m2)))
                if w2 is None:
                    continue
                out[(w1, w2)] = out.get((w1, w2), 0) + cu * cm
        return LocMDRTensor(out)

    @staticmethod
    def unit() -> "LocMDRTensor":
        return LocMDRTensor({((), ()): Fraction(1)})

    def __add__(self, other):
        out = dict(self.coeffs)
        for p, c in other.coeffs.items():
            out[p] = out.get(p, 0) + c
        return LocMDRTensor(out)

    def __sub__(self, other):
        return self + other.scale(-1)

    def scale(self, scalar):
        return LocMDRTensor({p: c * scalar for p, c in self.coeffs.items()})

    def is_zero(self) -> bool:
        return not self.coeffs

    def __eq__(self, other) -> bool:
        if not isinstance(other, LocMDRTensor):
            return NotImplemented
        return self.coeffs == other.coeffs


class LocBTensor:
    """Tensor square of the localization inverting (X1 - 1) (group side)."""

    __slots__ = ("coeffs",)

    def __init__(self, coeffs: dict):
        self.coeffs = {p: c for p, c in coeffs.items() if c != 0}

    @staticmethod
    def of(a: LocB, b: LocB) -> "LocBTensor":
        out: dict = {}
        for u, cu in a.coeffs.items():
            for v, cv in b.coeffs.items():
                out[(u, v)] = out.get((u, v), 0) + cu * cv
        return LocBTensor(out)

    def __add__(self, other):
        out = dict(self.coeffs)
        for p, c in other.coeffs.items():
            out[p] = out.get(p, 0) + c
        return LocBTensor(out)

    def __sub__(self, other):
        return self + other.scale(-1)

    def scale(self, scalar):
        return LocBTensor({p: c * scalar for p, c in self.coeffs.items()})

    def __mul__(self, other):
        out: dict = {}
        for (u1, u2), cu in self.coeffs.items():
            for (v1, v2), cv in other.coeffs.items():
                for w1, c1 in _locb_words_mul(u1, v1).items():
                    for w2, c2 in _locb_words_mul(u2, v2).items():
                        p = (w1, w2)
                        out[p] = out.get(p, 0) + cu * cv * c1 * c2
        return LocBTensor(out)

    def is_zero(self) -> bool:
        return not self.coeffs

    def __eq__(self, other) -> bool:
        if not isinstance(other, LocBTensor):
            return NotImplemented
        return self.coeffs == other.coeffs


def locb_tensor_of_ga(t: GATensor) -> LocBTensor:
    out: dict = {}
    for (u, v), c in t.coeffs.items():
        key = (locb_embed_word(u), locb_embed_word(v))
        out[key] = out.get(key, 0) + c
    return LocBTensor(out)


class LocMBTensor:
    __slots__ = ("coeffs",)

    def __init__(self, coeffs: dict):
        self.coeffs = {p: c for p, c in coeffs.items() if c != 0}

    @staticmethod
    def unit() -> "LocMBTensor":
        return LocMBTensor({(LOCB_ONE, LOCB_ONE): Fraction(1)})

    @staticmethod
    def act(t: LocBTensor, m: "LocMBTensor") -> "LocMBTensor":
        out: dict = {}
        for (u1, u2), cu in t.coeffs.items():
            for (m1, m2), cm in m.coeffs.items():
                for w1, c1 in _locb_words_mul(u1, m1).items():
                    k1 = locb_m_class_word(w1)
                    for w2, c2 in _locb_words_mul(u2, m2).items():
                        k2 = locb_m_class_word(w2)
                        out[(k1, k2)] = out.get((k1, k2), 0) + cu * cm * c1 * c2
        return LocMBTensor(out)

    def __add__(self, other):
        out = dict(self.coeffs)
        for p, c in other.coeffs.items():
            out[p] = out.get(p, 0) + c
        return LocMBTensor(out)

    def __sub__(self, other):
        return self + other.scale(-1)

    def scale(self, scalar):
        return LocMBTensor({p: c * scalar for p, c in self.coeffs.items()})

    def is_zero(self) -> bool:
        return not self.coeffs

    def __eq__(self, other) -> bool:
        if not isinstance(other, LocMBTensor):
            return NotImplemented
        return self.coeffs == other.coeffs


def _loc_dr(word_pairs) -> LocDRTensor:
    return LocDRTensor({p: Fraction(1) for p in word_pairs})


def make_row_col(side: str, which: str):
    """The constant row/column vectors of the four diagram statements."""
    if side == "DR":
        e1 = ((1, 1),)
        e1i = ((1, -1),)
        if which == "row1":
            return [
                LocDRTensor({((), e1i): Fraction(1)}),
                LocDRTensor({(e1i, ()): Fraction(-1)}),
                LocDRTensor.zero(),
            ]
        if which == "col1":
            return [
                LocDRTensor({(e1, e1): Fraction(1)}),
                LocDRTensor({(e1, e1): Fraction(-1)}),
                LocDRTensor.zero(),
            ]
        if which == "col0":
            return [
                LocMDRTensor({}),
                LocMDRTensor({((e1), ()): Fraction(-1)}),
                LocMDRTensor({((e1), ()): Fraction(1)}),
            ]
    if side == "B":
        one = LocB.one()
        d1 = LocB.dpow(1)
        x1 = LocB.x1_power(1)
        x1i = LocB.x1_power(-1)
        if which == "row1":
            inv_1_minus_x1inv = one + d1  # (1 - X1^-1)^-1 = 1 + (X1-1)^-1
            inv_1_minus_x1 = d1.scale(Fraction(-1))  # (1 - X1)^-1
            # Second slot of the middle entry carries an X1 factor: it is what
            # makes the displayed matrix of the doubled generator factor as
            # col*row and makes row*col0 the unit class (both checked in the
            # tests); without it neither identity holds.
            return [
                LocBTensor.of(one, inv_1_minus_x1inv),
                LocBTensor.of(inv_1_minus_x1, x1),
                LocBTensor({}),
            ]
        if which == "col1":
            x1m1 = x1 - one
            x1im1 = x1i - one
            return [
                LocBTensor.of(x1m1, x1m1),
                LocBTensor.of(x1m1, x1im1),
                LocBTensor({}),
            ]
        if which == "col0":
            w_x1 = locb_embed_word((betti_side.X1,))
            w_x1i = locb_embed_word((-betti_side.X1,))
            return [
                LocMBTensor({}),
                # ((1 - X1) (x) X1^-1) . unit
                LocMBTensor({(LOCB_ONE, w_x1i): Fraction(1), (w_x1, w_x1i): Fraction(-1)}),
                # ((1 - X1^-1) (x) X1^-1) . unit
                LocMBTensor({(LOCB_ONE, w_x1i): Fraction(1), (w_x1i, w_x1i): Fraction(-1)}),
            ]
    raise ValueError(f"unknown row/col {side}/{which}")


# ---------------------------------------------------------------------------
# the four diagram checkers
# ---------------------------------------------------------------------------


def rho_dr(a: TruncatedSeries) -> Matrix3:
    return varpi(ell(a)).map(pr12)


def rho_b(a: GroupAlgebra) -> Matrix3:
    return varpi_b(ell_b(a)).map(pr12_b)


def _row_matrix_col(row, matrix: Matrix3, col, act=None):
    """row . matrix . col with ring rows and ring-or-module columns."""
    total = None
    for i in range(3):
        for j in range(3):
            term_ring = row[i] * matrix.rows[i][j]
            term = (act(term_ring, col[j]) if act else term_ring * col[j])
            total = term if total is None else total + term
    return total


def check_prop(which: str, a) -> dict:
    """Evaluate both paths of one of the four diagram statements.

    which in {"2.1", "2.2", "2.3", "2.4"}; `a` is a group-algebra element for
    the first two and a truncated series for the last two.  Returns a report
    with both sides and the verdict; the comparison is exact.
    """
    if which == "2.3":
        row = make_row_col("DR", "row1")
        col = make_row_col("DR", "col1")
        m = rho_dr(a).map(loc_dr_tensor_of_series)
        rhs = _row_matrix_col(row, m, col)
        e1 = TruncatedSeries.letter(1, a.trunc + 1)
        lifted = TruncatedSeries(a.coeffs, a.trunc + 1)  # polynomial input, lift is exact
        w_elt = dr_side.to_y_basis(lifted * e1)
        lhs_t = dr_side.harmonic_coproduct_w(w_elt)
        lhs = _w_tensor_to_loc(lhs_t)
    elif which == "2.4":
        row = make_row_col("DR", "row1")
        col = make_row_col("DR", "col0")
        m = rho_dr(a).map(loc_dr_tensor_of_series)
        rhs = _row_matrix_col(row, m, col, act=LocMDRTensor.act)
        lhs_t = dr_side.harmonic_coproduct_m(dr_side.m_class(a))
        lhs = _m_tensor_to_loc(lhs_t)
    elif which == "2.1":
        row = make_row_col("B", "row1")
        col = make_row_col("B", "col1")
        m = rho_b(a).map(locb_tensor_of_ga)
        rhs = _row_matrix_col(row, m, col)
        x1m1 = GroupAlgebra.generator(betti_side.X1) - GroupAlgebra.one()
        w_elt = betti_side.to_wb_generators(a * x1m1)
        lhs = _wb_tensor_to_locb(betti_side.delta_wb(w_elt))
    elif which == "2.2":
        row = make_row_col("B", "row1")
        col = make_row_col("B", "col0")
        m = rho_b(a).map(locb_tensor_of_ga)
        rhs = _row_matrix_col(row, m, col, act=LocMBTensor.act)
        lhs_t = betti_side.delta_mb(mb_class(a))
        lhs = _mb_tensor_to_loc(lhs_t)
    else:
        raise ValueError(f"unknown diagram {which!r}")
    diff = lhs - rhs
    return {"which": which, "lhs": lhs, "rhs": rhs, "equal": diff.is_zero()}


def _w_tensor_to_loc(t: dr_side.WTensor) -> LocDRTensor:
    out: dict = {}
    for (m1, m2), c in t.coeffs.items():
        u = dr_side.loc_embed_word(dr_side.y_expand_monomial(m1))
        v = dr_side.loc_embed_word(dr_side.y_expand_monomial(m2))
        s = dr_side.y_sign(m1) * dr_side.y_sign(m2)
        out[(u, v)] = out.get((u, v), 0) + c * s
    return LocDRTensor(out)


def _m_tensor_to_loc(t: dr_side.MTensor) -> LocMDRTensor:
    out: dict = {}
    for (u, v), c in t.coeffs.items():
        key = (dr_side.loc_embed_word(u), dr_side.loc_embed_word(v))
        out[key] = out.get(key, 0) + c
    return LocMDRTensor(out)


def _wb_tensor_to_locb(t) -> LocBTensor:
    out = LocBTensor({})
    for (m1, m2), c in t.coeffs.items():
        a1 = betti_side.wb_expand(WBElement.of(m1))
        a2 = betti_side.wb_expand(WBElement.of(m2))
        out = out + LocBTensor.of(betti_side.locb_embed(a1), betti_side.locb_embed(a2)).scale(c)
    return out


def _mb_tensor_to_loc(t) -> LocMBTensor:
    out: dict = {}
    for (u, v), c in t.coeffs.items():
        key = (locb_embed_word(u), locb_embed_word(v))
        out[key] = out.get(key, 0) + c
    return LocMBTensor(out)


# ---------------------------------------------------------------------------
# fixture file
# ---------------------------------------------------------------------------

FIXTURE_VERSION = "braid_fixtures.v1"


def _render_fg(w) -> str:
    if not w:
        return "1"
    return ".".join((f"x{abs(l)}5" if l > 0 else f"x{abs(l)}5^-1") for l in w)


def render_fixtures() -> str:
    """The derived tables in the versioned text format."""
    lines = [
        FIXTURE_VERSION,
        "# five-point moduli group fixtures, derived from the Artin representation",
        "# labeling: kernel loops x15 x25 x35 (point 5 around points 1..3);",
        "# base letters b1 = braid(2,3) [image of X0], b2 = braid(1,2) [image of X1];",
        "# the boundary ordering below is the product trivialized on the sphere.",
        "sphere-order " + " ".join(f"x{k}5" for k in sphere_order()),
    ]
    base_names = {1: "b1", 2: "b2", -1: "b1^-1", -2: "b2^-1"}
    for (b, k), w in sorted(alpha_table().items()):
        lines.append(f"alpha {base_names[b]} x{k}5 -> {_render_fg(w)}")
    kernel_names = ["e15", "e25", "e35"]
    base_lie = ["e23", "e12"]
    for (b, k), combo in sorted(p5_action_table().items()):
        terms = " ".join(
            f"{'+' if c > 0 else '-'}{abs(c)}*{'.'.join(kernel_names[x] for x in w)}"
            for w, c in sorted(combo.items())
        )
        lines.append(f"action {base_lie[b]} {kernel_names[k]} -> {terms}")
    return "\n".join(lines) + "\n"


def write_fixtures(path) -> None:
    with open(path, "w") as fh:
        fh.write(render_fixtures())


def fixtures_match(path) -> bool:
    try:
        with open(path) as fh:
            return fh.read() == render_fixtures()
    except FileNotFoundError:
        return False
