"""Configuration cells of flag sequences and their charts.

A point of the arity-``n`` flag configuration space is an equivalence class
``[g_1, ..., g_n]`` of group tuples, two tuples being equivalent when they
differ by the twisted right action of the upper Borel on each slot.  Every
class has a unique canonical representative ``(c_1, ..., c_n)`` with each
``c_i`` in the canonical section of its chamber position; equality of points
is equality of canonical forms, which keeps all downstream structure maps
exactly decidable.

Charts provided here:

* Bott-Samelson coordinates ``z`` (one per letter of a chosen reduced word
  per slot), polynomial both ways;
* the toric chart ``eps`` built from products of negative one-parameter
  elements, with its inverse-parameter solution as an explicit monomial in
  prefix minors ``phi``;
* the open locus where the slot product admits a lower-upper factorization,
  carrying the torus-valued map ``tau`` used by the leaf classification.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Sequence, Tuple, Union

from .errors import (
    NotInBigCell,
    NotInOpenLeaf,
    NotInZeroChart,
    OutsideToricChart,
    WrongCell,
    ZeroParameter,
)
from .groupcore import (
    GroupElt,
    TorusElt,
    bruhat_factor_neg,
    bruhat_factor_pos,
    gauss_decompose,
    in_cell_section,
    is_invertible_scalar,
    is_zero_scalar,
    one_param,
    principal_minor,
    sbar,
    wbar,
)
from .rootdata import WeylElt, cartan_matrix

__all__ = [
    "FnPoint",
    "TFnPoint",
    "BSChart",
    "canonicalize_Fn",
    "canonicalize_TFn",
    "canonicalize_neg",
    "tits_distance",
    "bs_param",
    "bs_coords",
    "lusztig_chart",
    "phi",
    "phi_all",
    "phi_minor_form",
    "invert_lusztig",
    "in_Owe",
    "tau",
    "in_zero_chart",
    "varsigma_factor",
    "t_dot",
    "torus_act",
    "fn_product",
]


# ------------------------------------------------------------------- points


@dataclass(frozen=True, eq=False)
class FnPoint:
    """Canonical form of a point of the arity-n flag configuration space."""

    w: Tuple[WeylElt, ...]
    c: Tuple[GroupElt, ...]

    def __post_init__(self):
        if len(self.w) != len(self.c):
            raise ValueError("cell word and representative tuple length differ")

    @property
    def n(self) -> int:
        return len(self.w)

    @property
    def rank(self) -> int:
        return self.c[0].rank

    def cell_product(self) -> WeylElt:
        out = WeylElt.identity(self.w[0].rank)
        for wi in self.w:
            out = out * wi
        return out

    def validate(self) -> None:
        for wi, ci in zip(self.w, self.c):
            if not in_cell_section(ci, wi):
                raise WrongCell(wi, None)

    def __eq__(self, other):
        if not isinstance(other, FnPoint):
            return NotImplemented
        return self.w == other.w and all(a == b for a, b in zip(self.c, other.c))

    def __repr__(self):
        return f"FnPoint(w={[w.word for w in self.w]})"


@dataclass(frozen=True, eq=False)
class TFnPoint:
    """Canonical form of a point of the decorated (framed) configuration
    space: a canonical cell tuple together with the residual upper-triangular
    factor on the last slot."""

    w: Tuple[WeylElt, ...]
    c: Tuple[GroupElt, ...]
    b: GroupElt

    def __post_init__(self):
        if len(self.w) != len(self.c):
            raise ValueError("cell word and representative tuple length differ")

    @property
    def n(self) -> int:
        return len(self.w)

    @property
    def rank(self) -> int:
        return self.b.rank

    def forget(self) -> FnPoint:
        return FnPoint(self.w, self.c)

    def product(self) -> GroupElt:
        out = self.c[0]
        for ci in self.c[1:]:
            out = out @ ci
        return out @ self.b

    def __eq__(self, other):
        if not isinstance(other, TFnPoint):
            return NotImplemented
        return (
            self.w == other.w
            and all(a == b for a, b in zip(self.c, other.c))
            and self.b == other.b
        )

    def __repr__(self):
        return f"TFnPoint(w={[w.word for w in self.w]})"


def canonicalize_Fn(gs: Sequence[GroupElt]) -> FnPoint:
    """Canonical form of ``[g_1, ..., g_n]``: iterated factorization with the
    upper-triangular factor carried into the next slot."""
    return canonicalize_TFn(gs).forget()


def canonicalize_TFn(gs: Sequence[GroupElt]) -> TFnPoint:
    """Canonical form in the decorated space, keeping the final carry."""
    if not gs:
        raise ValueError("empty tuple")
    ws = []
    cs = []
    carry = None
    for g in gs:
        m = g if carry is None else carry @ g
        f = bruhat_factor_pos(m)
        ws.append(f.u)
        cs.append(f.c)
        carry = f.b
    return TFnPoint(tuple(ws), tuple(cs), carry)


def canonicalize_neg(
    gs: Sequence[GroupElt],
) -> Tuple[GroupElt, Tuple[WeylElt, ...], Tuple[GroupElt, ...]]:
    """Mirror canonical form with the lower-triangular factor carried to the
    left: returns (b_minus, cells, (c_1, ..., c_n)) with
    g_1 ... g_n = b_minus * c_1 * ... * c_n and each c_i canonical."""
    if not gs:
        raise ValueError("empty tuple")
    cs = []
    ws = []
    carry = None
    for g in reversed(gs):
        m = g if carry is None else g @ carry
        bm, v, c = bruhat_factor_neg(m)
        cs.append(c)
        ws.append(v)
        carry = bm
    cs.reverse()
    ws.reverse()
    return carry, tuple(ws), tuple(cs)


def fn_product(p: Union[FnPoint, TFnPoint]) -> GroupElt:
    out = p.c[0]
    for ci in p.c[1:]:
        out = out @ ci
    return out


def tits_distance(f1, f2) -> WeylElt:
    """Relative chamber position of two flags, each given by a group
    representative or an arity-1 canonical point."""
    g1 = f1.c[0] if isinstance(f1, FnPoint) else f1
    g2 = f2.c[0] if isinstance(f2, FnPoint) else f2
    from .groupcore import bruhat_cell

    return bruhat_cell(g1.inverse() @ g2)


# ------------------------------------------------------------------- charts


@dataclass(frozen=True)
class BSChart:
    """A choice of reduced word for each slot of a cell, concatenated.

    ``letters`` is the concatenation; ``boundaries[i]`` is the number of
    letters in slots 1..i+1, so slot blocks are
    letters[boundaries[i-1]:boundaries[i]].
    """

    rank: int
    w: Tuple[WeylElt, ...]
    words: Tuple[Tuple[int, ...], ...]

    def __post_init__(self):
        if len(self.w) != len(self.words):
            raise ValueError("one word per slot required")
        for wi, word in zip(self.w, self.words):
            if len(word) != wi.length or WeylElt.from_word(self.rank, word) != wi:
                raise ValueError(f"{word} is not a reduced word of {wi.perm}")

    @staticmethod
    def for_cell(w: Sequence[WeylElt], words=None) -> "BSChart":
        w = tuple(w)
        rank = w[0].rank
        if words is None:
            words = tuple(wi.word for wi in w)
        return BSChart(rank, w, tuple(tuple(b) for b in words))

    @property
    def letters(self) -> Tuple[int, ...]:
        return tuple(a for word in self.words for a in word)

    @property
    def boundaries(self) -> Tuple[int, ...]:
        out = []
        acc = 0
        for word in self.words:
            acc += len(word)
            out.append(acc)
        return tuple(out)

    @property
    def dim(self) -> int:
        return sum(len(word) for word in self.words)

    def block_of(self, j: int) -> int:
        """1-based slot index containing the 1-based letter position j."""
        for i, bnd in enumerate(self.boundaries):
            if j <= bnd:
                return i + 1
        raise IndexError(j)


def bs_param(chart: BSChart, z: Sequence) -> FnPoint:
    """The point with the given Bott-Samelson coordinates: per slot, the
    product of one x-factor and one reflection per letter."""
    if len(z) != chart.dim:
        raise ValueError("coordinate count mismatch")
    rank = chart.rank
    cs = []
    pos = 0
    for word in chart.words:
        c = GroupElt.identity(rank + 1)
        for beta in word:
            c = c @ one_param(rank, +1, beta, z[pos]) @ sbar(rank, beta)
            pos += 1
        cs.append(c)
    return FnPoint(chart.w, tuple(cs))


def bs_coords(p: FnPoint, chart: BSChart):
    """Unique coordinates with bs_param(chart, z) == p, found by peeling one
    letter at a time from the left of each slot."""
    if p.w != chart.w:
        raise WrongCell(chart.w, p.w)
    rank = chart.rank
    zs = []
    for ci, u, word in zip(p.c, p.w, chart.words):
        c = ci
        for beta in word:
            k = beta
            q = u.inverse()(k + 1)
            den = c.rows[k][q - 1]
            z = c.rows[k - 1][q - 1] / den
            c = sbar(rank, beta).inverse() @ one_param(rank, +1, beta, -z) @ c
            u = WeylElt.simple(rank, beta) * u
            zs.append(z)
    return tuple(zs)


def lusztig_chart(chart: BSChart, eps: Sequence) -> FnPoint:
    """The point with the given toric coordinates: per slot, a product of
    negative one-parameter elements, then canonicalized."""
    if len(eps) != chart.dim:
        raise ValueError("coordinate count mismatch")
    for idx, e in enumerate(eps):
        if not is_invertible_scalar(e):
            raise ZeroParameter(idx + 1)
    rank = chart.rank
    ms = []
    pos = 0
    for word in chart.words:
        m = GroupElt.identity(rank + 1)
        for beta in word:
            m = m @ one_param(rank, -1, beta, eps[pos])
            pos += 1
        ms.append(m)
    p = canonicalize_Fn(ms)
    assert p.w == chart.w, "toric point left its cell"
    return p


def _bs_prefix_products(chart: BSChart, z):
    """Running products of (x-factor * reflection) along the concatenation."""
    rank = chart.rank
    out = []
    acc = GroupElt.identity(rank + 1)
    for j, beta in enumerate(chart.letters):
        acc = acc @ one_param(rank, +1, beta, z[j]) @ sbar(rank, beta)
        out.append(acc)
    return out


def phi_all(chart: BSChart, p: FnPoint):
    """All prefix minors: the j-th value is the principal minor, at the
    fundamental weight of letter j, of the length-j prefix of the
    Bott-Samelson product."""
    z = bs_coords(p, chart)
    prefixes = _bs_prefix_products(chart, z)
    return tuple(
        principal_minor(beta, prefixes[j]) for j, beta in enumerate(chart.letters)
    )


def phi(chart: BSChart, j: int, p: FnPoint):
    """Single prefix minor, 1-based letter index."""
    return phi_all(chart, p)[j - 1]


def phi_minor_form(chart: BSChart, j: int, p: FnPoint):
    """The same function computed without Bott-Samelson coordinates, as a
    twisted minor of the partial slot products: restore the unipotent part
    of the block containing j, and twist by the block's letter prefix."""
    i = chart.block_of(j)
    bnd = chart.boundaries
    start = bnd[i - 2] if i >= 2 else 0
    beta_j = chart.letters[j - 1]
    rank = chart.rank
    acc = GroupElt.identity(rank + 1)
    for k in range(i - 1):
        acc = acc @ p.c[k]
    acc = acc @ p.c[i - 1] @ wbar(p.w[i - 1]).inverse()
    vprefix = WeylElt.identity(rank)
    for beta in chart.letters[start : j]:
        vprefix = vprefix * WeylElt.simple(rank, beta)
    return principal_minor(beta_j, acc @ wbar(vprefix))


def _r_exponent(letters: Tuple[int, ...], cartan, i: int, j: int) -> int:
    """Exponent of the i-th prefix minor in the monomial for the j-th toric
    coordinate (1-based i < j): zero if the letter of i reappears strictly
    between i and j; else a Cartan pairing, or -1 on letter repetition."""
    ai = letters[i - 1]
    aj = letters[j - 1]
    if ai in letters[i : j - 1]:
        return 0
    if ai != aj:
        return -cartan[ai - 1][aj - 1]
    return -1


def invert_lusztig(chart: BSChart, p: FnPoint):
    """Toric coordinates of p as explicit monomials in the prefix minors."""
    phis = phi_all(chart, p)
    zero_idx = [j + 1 for j, v in enumerate(phis) if is_zero_scalar(v)]
    if zero_idx:
        raise OutsideToricChart(zero_idx)
    letters = chart.letters
    cartan = cartan_matrix(chart.rank)
    eps = []
    for j in range(1, chart.dim + 1):
        val = 1 / phis[j - 1]
        for i in range(1, j):
            r = _r_exponent(letters, cartan, i, j)
            if r:
                val = val * phis[i - 1] ** r
        eps.append(val)
    return tuple(eps)


# ----------------------------------------------------- open loci and tau map


def in_Owe(p: Union[FnPoint, TFnPoint]) -> bool:
    """Whether the slot product admits a lower-triangular times upper
    factorization (all leading principal minors invertible)."""
    try:
        gauss_decompose(fn_product(p))
    except NotInBigCell:
        return False
    return True


def tau(p: Union[FnPoint, TFnPoint]) -> TorusElt:
    """Torus part of the slot product; defined on the open locus above.

    For non-default slot representatives, multiply by the torus offset from
    ``t_dot`` (the representative dependence is an overall torus factor).
    """
    try:
        return gauss_decompose(fn_product(p))[1]
    except NotInBigCell as e:
        raise NotInOpenLeaf(
            f"slot product has vanishing leading minor {e.alpha}"
        ) from e


def in_zero_chart(p: FnPoint) -> bool:
    try:
        varsigma_factor(p)
    except NotInZeroChart:
        return False
    return True


def varsigma_factor(p: FnPoint) -> Tuple[GroupElt, ...]:
    """Lower-unipotent slot factors ``m_i`` determined by requiring every
    prefix product m_1...m_i to be the lower factor of c_1...c_i."""
    ms = []
    prev = GroupElt.identity(p.c[0].size)
    acc = None
    for i, ci in enumerate(p.c):
        acc = ci if acc is None else acc @ ci
        try:
            lower, _, _ = gauss_decompose(acc)
        except NotInBigCell as e:
            raise NotInZeroChart(i + 1) from e
        ms.append(prev.inverse() @ lower)
        prev = lower
    return tuple(ms)


def t_dot(rank: int, pairs: Sequence[Tuple[WeylElt, TorusElt]]) -> TorusElt:
    """Torus element relating a product of dotted representatives to the
    product of default ones: prod(wbar_i t_i) = prod(wbar_i) * t_dot."""
    n = rank + 1
    P = GroupElt.identity(n)
    Q = GroupElt.identity(n)
    for w, t in pairs:
        P = P @ wbar(w) @ t.to_matrix()
        Q = Q @ wbar(w)
    return TorusElt.from_matrix(Q.inverse() @ P)


def torus_act(h: TorusElt, p: FnPoint) -> FnPoint:
    """Torus action: left translation on the first slot, recanonicalized."""
    gs = (h.to_matrix() @ p.c[0],) + tuple(p.c[1:])
    return canonicalize_Fn(gs)


def torus_act_tfn(h: TorusElt, p: TFnPoint) -> TFnPoint:
    gs = list(p.c)
    gs[-1] = gs[-1] @ p.b
    gs[0] = h.to_matrix() @ gs[0]
    return canonicalize_TFn(gs)
