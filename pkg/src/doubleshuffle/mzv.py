"""Numerical multizeta evaluation and the floating-point side of the checks.

Evaluation strategy: a nested sum zeta(k1,...,km) equals the iterated
integral of the word e0^(k1-1) e1 ... e0^(km-1) e1.  Splitting the
integration simplex at 1/2 turns it into a finite sum of products of
one-variable power series evaluated at 1/2 (the second half is pulled back
through t -> 1-t, which reverses the word and swaps the letters).  Every one
of those series has coefficients in [0, 1], so truncating at order M leaves a
tail of at most 2^(1-M): the advertised error bounds are computed, never
guessed.  Partial sums are exact rationals; rounding happens once at the end.

Scalars here are arbitrary-precision floats (mpmath); the exact layers of the
package never see them.
"""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

from mpmath import mp, mpf

from .ncalg import (
    TruncatedSeries,
    Word,
    gamma_series,
    inverse_series,
    is_admissible,
    primitive_coproduct,
    reg_word,
    render_word,
    TensorSeries,
)
from . import dr_side

Composition = tuple[int, ...]


def is_admissible_composition(c: Composition) -> bool:
    return len(c) >= 1 and all(k >= 1 for k in c) and c[0] >= 2


def weight(c: Composition) -> int:
    return sum(c)


def word_of_composition(c: Composition) -> Word:
    """e0^(k1-1) e1 ... e0^(km-1) e1; forced by the coefficient conditions
    on the KZ series (the depth-one value of weight two must sit on e0e1)."""
    out: list[int] = []
    for k in c:
        out.extend([0] * (k - 1))
        out.append(1)
    return tuple(out)


def composition_of_word(w: Word) -> Composition:
    if not is_admissible(w):
        raise ValueError(f"{render_word(w)} is not admissible")
    out = []
    run = 0
    for letter in w:
        if letter == 0:
            run += 1
        else:
            out.append(run + 1)
            run = 0
    return tuple(out)


# -- quasi-shuffle (stuffle) --------------------------------------------------


def stuffle(u: Composition, v: Composition) -> dict:
    """Quasi-shuffle product of index compositions, as a composition -> int map."""
    out: dict = {}
    _stuffle_into(u, v, (), 1, out)
    return out


def _stuffle_into(u, v, prefix, mult, out):
    if not u:
        key = prefix + v
        out[key] = out.get(key, 0) + mult
        return
    if not v:
        key = prefix + u
        out[key] = out.get(key, 0) + mult
        return
    _stuffle_into(u[1:], v, prefix + (u[0],), mult, out)
    _stuffle_into(u, v[1:], prefix + (v[0],), mult, out)
    _stuffle_into(u[1:], v[1:], prefix + (u[0] + v[0],), mult, out)


# -- certified evaluation -----------------------------------------------------


@dataclass(frozen=True)
class BigFloat:
    """An arbitrary-precision value with its precision and a computed error bound."""

    value: object  # mpmath mpf
    error: object  # mpmath mpf, rigorous bound on |true - value|
    prec: int

    def __float__(self):
        return float(self.value)


def _series_coeffs_at_half(word: Word, order: int) -> list[Fraction]:
    """Coefficients a_0..a_order of the iterated-integral series for `word`.

    Reading the word from its last letter: each e0 divides the n-th
    coefficient by n, each e1 replaces a_n by (a_0+...+a_(n-1))/n.  By
    induction every a_n lies in [0, 1].
    """
    coeffs = [Fraction(0)] * (order + 1)
    coeffs[0] = Fraction(1)
    for letter in reversed(word):
        if letter == 0:
            coeffs = [Fraction(0)] + [coeffs[n] / n for n in range(1, order + 1)]
        else:
            partial = Fraction(0)
            out = [Fraction(0)] * (order + 1)
            for n in range(1, order + 1):
                partial += coeffs[n - 1]
                out[n] = partial / n
            coeffs = out
    return coeffs


def _eval_at_half(word: Word, order: int) -> Fraction:
    coeffs = _series_coeffs_at_half(word, order)
    half = Fraction(1, 2)
    acc = Fraction(0)
    power = Fraction(1)
    for a in coeffs:
        acc += a * power
        power *= half
    return acc


def _dual(word: Word) -> Word:
    return tuple(1 - x for x in reversed(word))


def zeta_word(w: Word, prec: int = 128) -> BigFloat:
    """Multizeta value of an admissible word with a certified error bound."""
    if not is_admissible(w):
        raise ValueError(f"{render_word(w)} is not admissible")
    n = len(w)
    order = prec + 16
    total = Fraction(0)
    for j in range(n + 1):
        left = _eval_at_half(_dual(w[:j]), order)
        right = _eval_at_half(w[j:], order)
        total += left * right
    # Each factor is exact up to a tail of at most 2^-order, and is itself <= 2;
    # (A+dA)(B+dB) deviates by at most 2*2^-order*2 + 2^-2order < 5*2^-order.
    tail = Fraction(5 * (n + 1), 2**order)
    with mp.workprec(prec):
        value = mpf(total.numerator) / mpf(total.denominator)
        err = mpf(tail.numerator) / mpf(tail.denominator) + abs(value) * mpf(2) ** (-prec + 2)
    return BigFloat(value=value, error=err, prec=prec)


def zeta(c: Composition, prec: int = 128) -> BigFloat:
    if not is_admissible_composition(c):
        raise ValueError(f"composition {c} is not admissible (needs k1 >= 2)")
    if weight(c) > 6:
        raise ValueError("weight above the desk-scale guard (6)")
    return zeta_word(word_of_composition(c), prec)


def zeta_direct(c: Composition, cutoff: int = 2000) -> tuple:
    """Brute-force nested summation with an explicit tail bound (test oracle)."""
    if not is_admissible_composition(c):
        raise ValueError(f"composition {c} is not admissible")
    depth = len(c)

    @lru_cache(maxsize=None)
    def inner(level: int, below: int) -> float:
        # sum over n_level > ... > n_depth >= 1 with n_level < below
        if level > depth:
            return 1.0
        k = c[level - 1]
        acc = 0.0
        for n in range(level_min(level), below):
            acc += inner(level + 1, n) / float(n) ** k
        return acc

    def level_min(level: int) -> int:
        return depth - level + 1

    value = 0.0
    for n1 in range(depth, cutoff + 1):
        value += inner(2, n1) / float(n1) ** c[0]
    # tail: inner sums are bounded by (1 + ln n)^(depth-1)
    log_term = (1.0 + math.log(cutoff)) ** (depth - 1)
    k1 = c[0]
    tail = log_term * (cutoff ** (1 - k1) / (k1 - 1) + cutoff ** (-k1))
    return value, tail


# -- residuals of the product identities --------------------------------------


def harmonic_residual(a: int, b: int, prec: int = 128) -> BigFloat:
    """|zeta(a)zeta(b) - zeta(a+b) - zeta(a,b) - zeta(b,a)| for a, b > 1."""
    if a <= 1 or b <= 1:
        raise ValueError("both arguments must be > 1")
    za = zeta((a,), prec)
    zb = zeta((b,), prec)
    with mp.workprec(prec):
        lhs = za.value * zb.value
        rhs = zeta((a + b,), prec).value + zeta((a, b), prec).value + zeta((b, a), prec).value
        return BigFloat(value=abs(lhs - rhs), error=_residual_budget(prec), prec=prec)


def shuffle_residual(a: int, b: int, prec: int = 128) -> BigFloat:
    """Residual of the integral-shuffle decomposition of zeta(a)zeta(b).

    zeta(a)zeta(b) = sum_{i+j=a+b} (C(i-1, a-1) + C(i-1, b-1)) zeta(i, j);
    the binomials vanish for i = 1, so every term on the right is admissible.
    """
    if a <= 1 or b <= 1:
        raise ValueError("both arguments must be > 1")
    with mp.workprec(prec):
        lhs = zeta((a,), prec).value * zeta((b,), prec).value
        rhs = mpf(0)
        for i in range(2, a + b):
            j = a + b - i
            coeff = math.comb(i - 1, a - 1) + math.comb(i - 1, b - 1)
            if coeff:
                rhs += coeff * zeta((i, j), prec).value
        return BigFloat(value=abs(lhs - rhs), error=_residual_budget(prec), prec=prec)


def _residual_budget(prec: int):
    with mp.workprec(prec):
        return mpf(2) ** (-prec + 8)


# -- the KZ generating series -------------------------------------------------


def admissible_words(max_weight: int) -> list:
    out = []
    for d in range(2, max_weight + 1):
        for k in range(2 ** (d - 2)):
            mid = tuple((k >> i) & 1 for i in range(d - 2))
            out.append((0,) + mid + (1,))
    return out


def phi_kz(max_weight: int, prec: int = 128, zeta_shift: dict | None = None) -> TruncatedSeries:
    """Generating series of the multizeta values through the given weight:
    sum over admissible words of (-1)^(depth) * zeta(word) * regularized word.

    `zeta_shift` perturbs named compositions (used by the negative controls).
    """
    if max_weight > 6:
        raise ValueError("weight above the desk-scale guard (6)")
    coeffs: dict = {}
    with mp.workprec(prec):
        for w in admissible_words(max_weight):
            depth = sum(w)
            z = zeta_word(w, prec).value
            if zeta_shift:
                c = composition_of_word(w)
                if c in zeta_shift:
                    z = z + mpf(zeta_shift[c])
            sign = (-1) ** depth
            for u, r in reg_word(w).coeffs.items():
                val = sign * z * r
                coeffs[u] = coeffs.get(u, mpf(0)) + val
    return TruncatedSeries(coeffs, max_weight)


def numeric_dmr_check(max_weight: int = 4, prec: int = 128, zeta_shift: dict | None = None) -> dict:
    """Run the double shuffle membership pipeline on the KZ series with float
    scalars; reports the largest residual of each condition."""
    if max_weight > 5:
        raise ValueError("weight above the desk-scale guard (5)")
    phi = phi_kz(max_weight, prec, zeta_shift)
    with mp.workprec(prec):
        pi = mp.pi
        res: dict = {}
        res["coeff_e0"] = abs(phi.coeff((0,)))
        res["coeff_e1"] = abs(phi.coeff((1,)))
        res["coeff_e0e1"] = abs(phi.coeff((0, 1)) + pi**2 / 6)

        delta = primitive_coproduct(phi)
        square = TensorSeries.of(phi, phi)
        res["grouplike_V"] = _max_abs((delta - square).coeffs.values())

        gamma = gamma_series(phi)
        corrected = inverse_series(gamma.substitute_e1(-1)) * phi
        m_part = TruncatedSeries(
            {w: c for w, c in corrected.coeffs.items() if not w or w[-1] == 1},
            corrected.trunc,
        )
        w_elt = dr_side.to_y_basis(m_part)
        dw = dr_side.harmonic_coproduct_w(w_elt)
        sq = dr_side.WTensor.of(w_elt, w_elt)
        res["grouplike_M"] = _max_abs((dw - sq).coeffs.values())

        ok = all(v < mpf(10) ** (-8) for v in res.values())
    return {"residuals": res, "pass": bool(ok), "max_weight": max_weight, "prec": prec}


def _max_abs(values):
    out = mpf(0)
    for v in values:
        a = abs(v)
        if a > out:
            out = a
    return out


# -- exports -------------------------------------------------------------------


def zeta_table_csv(max_weight: int, prec: int = 128) -> str:
    """CSV rows: composition, weight, value, error bound."""
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["composition", "weight", "value", "error_bound"])
    with mp.workprec(prec):
        for w in admissible_words(max_weight):
            c = composition_of_word(w)
            z = zeta_word(w, prec)
            writer.writerow(
                [",".join(map(str, c)), weight(c), mp.nstr(z.value, 30), mp.nstr(z.error, 5)]
            )
    return buf.getvalue()


def residual_report_json(report: dict) -> str:
    out = {
        "schema": "report.v1",
        "pass": report["pass"],
        "max_weight": report["max_weight"],
        "prec": report["prec"],
        "residuals": {k: mp.nstr(v, 8) for k, v in sorted(report["residuals"].items())},
    }
    return json.dumps(out, indent=2, sort_keys=True)
