"""Shared test utilities (oracles that deliberately avoid library code paths)."""

from fractions import Fraction

from flagpoisson.rootdata import WeylElt, weyl_mul


def enumerate_reduced_words(w):
    """All reduced words of w by recursive descent-stripping."""
    if w.is_identity():
        return [()]
    out = []
    for i in w.left_descents():
        rest = weyl_mul(WeylElt.simple(w.rank, i), w)
        out.extend([(i,) + tail for tail in enumerate_reduced_words(rest)])
    return out


def frac_mat(rows):
    return [[Fraction(x) for x in row] for row in rows]


def naive_det(rows):
    """Leibniz determinant, used as an oracle for small matrices."""
    n = len(rows)
    if n == 1:
        return rows[0][0]
    total = 0
    for j in range(n):
        sub = [row[:j] + row[j + 1 :] for row in rows[1:]]
        term = rows[0][j] * naive_det(sub)
        total = total + (term if j % 2 == 0 else -term)
    return total
