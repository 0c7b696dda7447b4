"""The configuration groupoid over flag tuples and its equivalent models.

An arrow is a point of the even-arity decorated configuration space whose
slot product is lower triangular.  Source and target read off the two halves
of the slot tuple; composition splices two arrows along a shared middle flag
and refactors.  Three other descriptions of the same groupoid are
implemented and cross-checked against each other:

* a flag-tuple model: ``2n - 1`` flags plus a lower-triangular decoration;
* an open-locus model: an ordinary (undecorated) configuration point in the
  big-cell locus together with a torus element;
* a double-coset model: two section tuples tied by one matrix equation
  ``c_1...c_n b = b_minus c'_1...c'_n``.

The conversion maps between the models, the mixed-arity pairing space with
its two-sided factorizations, and the splice/embedding maps used to identify
double cosets with arrow sets are all here.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence, Tuple

from .cells import (
    FnPoint,
    TFnPoint,
    canonicalize_Fn,
    canonicalize_TFn,
    canonicalize_neg,
    fn_product,
)
from .errors import ConstraintViolated, NotComposable, WrongCell
from .groupcore import (
    GroupElt,
    TorusElt,
    g_geq0,
    gauss_decompose,
    in_cell_section,
    torus_conjugate,
    wbar,
)
from .rootdata import WeylElt

# ----------------------------------------------------------- representative
# A representative choice decorates the canonical signed-permutation
# representative of each slot's cell with a torus element; the twisted
# section of a cell w is (canonical section of w) * t.


@dataclass(frozen=True)
class CellRep:
    """One torus-twisted representative per slot: slot i uses wbar(w_i)*t_i."""

    w: Tuple[WeylElt, ...]
    t: Tuple[TorusElt, ...]

    def __post_init__(self):
        if len(self.w) != len(self.t):
            raise ValueError("cell and torus tuples differ in length")

    @staticmethod
    def default(ws: Sequence[WeylElt]) -> "CellRep":
        ws = tuple(ws)
        return CellRep(ws, tuple(TorusElt.one(w.rank) for w in ws))

    @property
    def n(self) -> int:
        return len(self.w)

    @property
    def rank(self) -> int:
        return self.w[0].rank

    def matrix(self, i: int) -> GroupElt:
        """The chosen representative of slot i (0-based) as a matrix."""
        return wbar(self.w[i]) @ self.t[i].to_matrix()

    def left_torus_shift(self, t: TorusElt) -> "CellRep":
        """Another choice whose representative product is t times this one's.

        Only the first slot's torus element changes: conjugate t across the
        first cell and absorb.
        """
        t0 = torus_conjugate(t, self.w[0]) * self.t[0]
        return CellRep(self.w, (t0,) + self.t[1:])

    def offset(self) -> TorusElt:
        """Torus element h with prod(reps) = prod(defaults) * h."""
        from .cells import t_dot

        return t_dot(self.rank, list(zip(self.w, self.t)))


def in_twisted_section(c: GroupElt, w: WeylElt, t: TorusElt) -> bool:
    """Membership in the torus-twisted section of the cell of w."""
    return in_cell_section(c @ t.to_matrix().inverse(), w)


def adapt_slots(
    p, rep: CellRep
) -> Tuple[Tuple[GroupElt, ...], TorusElt]:
    """Rewrite a canonical point's slots in the twisted sections of ``rep``.

    Returns (twisted slot tuple, residual torus h).  The rewritten tuple
    represents the same configuration point; for a decorated point the
    residual enters the decoration as b -> h^{-1} b.
    """
    if tuple(p.w) != tuple(rep.w):
        raise WrongCell(rep.w, tuple(p.w))
    h = TorusElt.one(rep.rank)
    out = []
    for ci, wi, ti in zip(p.c, rep.w, rep.t):
        h_next = torus_conjugate(h, wi) * ti
        out.append(h.to_matrix().inverse() @ ci @ h_next.to_matrix())
        h = h_next
    return tuple(out), h


def adapt_tfn(p: TFnPoint, rep: CellRep) -> Tuple[Tuple[GroupElt, ...], GroupElt]:
    """Twisted-section slots plus the corrected decoration of a decorated point."""
    cs, h = adapt_slots(p, rep)
    return cs, h.to_matrix().inverse() @ p.b


# ------------------------------------------------- mirrored decorated space


@dataclass(frozen=True, eq=False)
class NegPoint:
    """Canonical form of a point of the mirrored decorated configuration
    space: the residual factor is lower triangular and sits to the *left* of
    the first slot, i.e. the class of (b_minus*c_1, c_2, ..., c_n)."""

    b_minus: GroupElt
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
        return self.b_minus.rank

    def product(self) -> GroupElt:
        out = self.b_minus
        for ci in self.c:
            out = out @ ci
        return out

    def __eq__(self, other):
        if not isinstance(other, NegPoint):
            return NotImplemented
        return (
            self.w == other.w
            and self.b_minus == other.b_minus
            and all(a == b for a, b in zip(self.c, other.c))
        )

    def __repr__(self):
        return f"NegPoint(w={[w.word for w in self.w]})"


def neg_point(gs: Sequence[GroupElt]) -> NegPoint:
    bm, ws, cs = canonicalize_neg(gs)
    return NegPoint(bm, ws, cs)


def adapt_neg(y: NegPoint, rep: CellRep) -> Tuple[GroupElt, Tuple[GroupElt, ...]]:
    """Rewrite a mirrored point's slots in the twisted sections of ``rep``.

    Returns (corrected left factor, twisted slot tuple); the junction torus
    elements are solved backwards from the last slot and the residue is
    absorbed on the left.
    """
    if tuple(y.w) != tuple(rep.w):
        raise WrongCell(rep.w, tuple(y.w))
    n = y.n
    a = TorusElt.one(rep.rank)  # a_n = e
    junctions = [None] * (n + 1)
    junctions[n] = a
    for i in range(n, 0, -1):  # solve a_{i-1} from a_i
        a = torus_conjugate(a * rep.t[i - 1].inverse(), rep.w[i - 1].inverse())
        junctions[i - 1] = a
    out = []
    for i in range(1, n + 1):
        out.append(
            junctions[i - 1].to_matrix().inverse()
            @ y.c[i - 1]
            @ junctions[i].to_matrix()
        )
    return y.b_minus @ junctions[0].to_matrix(), tuple(out)


# ------------------------------------------------------------------- arrows


@dataclass(frozen=True, eq=False)
class GammaArrow:
    """An arrow: even-arity decorated configuration point whose slot product
    (including the decoration) is lower triangular.  The product is cached."""

    point: TFnPoint
    b_minus: GroupElt

    @property
    def n(self) -> int:
        return self.point.n // 2

    @property
    def rank(self) -> int:
        return self.point.rank

    @property
    def w(self) -> Tuple[WeylElt, ...]:
        return self.point.w

    @staticmethod
    def from_tfn(point: TFnPoint) -> "GammaArrow":
        if point.n % 2 != 0:
            raise ValueError("arrows need an even number of slots")
        bm = point.product()
        if not bm.is_lower_triangular():
            raise ConstraintViolated("slot product is not lower triangular")
        return GammaArrow(point, bm)

    def __eq__(self, other):
        if not isinstance(other, GammaArrow):
            return NotImplemented
        return self.point == other.point

    def __repr__(self):
        return f"GammaArrow(n={self.n}, w={[w.word for w in self.point.w]})"


def gamma_arrow(gs: Sequence[GroupElt]) -> GammaArrow:
    """Canonicalize an even-length representative tuple into an arrow."""
    return GammaArrow.from_tfn(canonicalize_TFn(gs))


def _reps(p: TFnPoint) -> list:
    """Slot representatives with the decoration folded into the last slot."""
    gs = list(p.c)
    gs[-1] = gs[-1] @ p.b
    return gs


def source(g: GammaArrow) -> FnPoint:
    return FnPoint(g.point.w[: g.n], g.point.c[: g.n])


def target(g: GammaArrow) -> FnPoint:
    gs = _reps(g.point)
    rev = [x.inverse() for x in reversed(gs[g.n :])]
    return canonicalize_Fn(rev)


def unit(f: FnPoint) -> GammaArrow:
    gs = list(f.c) + [x.inverse() for x in reversed(f.c)]
    return gamma_arrow(gs)


def inverse(g: GammaArrow) -> GammaArrow:
    gs = _reps(g.point)
    return gamma_arrow([x.inverse() for x in reversed(gs)])


def is_composable(g1: GammaArrow, g2: GammaArrow) -> bool:
    return target(g1) == source(g2)


def multiply(g1: GammaArrow, g2: GammaArrow) -> GammaArrow:
    """Composition: splice along the shared middle flag tuple.

    The middle block (second half of the first arrow followed by the first
    half plus one slot of the second) collapses to a single slot.
    """
    t1, s2 = target(g1), source(g2)
    if not t1 == s2:
        raise NotComposable(t1, s2)
    n = g1.n
    a = _reps(g1.point)
    b = _reps(g2.point)
    mid = a[n]
    for x in a[n + 1 :]:
        mid = mid @ x
    for x in b[: n + 1]:
        mid = mid @ x
    return gamma_arrow(a[:n] + [mid] + b[n + 1 :])


def gamma_cell_type(g: GammaArrow) -> Tuple[Tuple[WeylElt, ...], Tuple[WeylElt, ...]]:
    """The pair (u, v): first-half cells, and reversed inverses of the
    second-half cells (so the second half lies over the cells of v
    reversed-and-inverted)."""
    u = g.point.w[: g.n]
    v = tuple(x.inverse() for x in reversed(g.point.w[g.n :]))
    return u, v


def in_diagonal_type(g: GammaArrow) -> bool:
    """Whether the arrow lies over a single cell tuple u on both halves."""
    u, v = gamma_cell_type(g)
    return u == v


# ------------------------------------------------------- flag-tuple model


@dataclass(frozen=True, eq=False)
class C2nArrow:
    """2n-1 flags (canonical single-slot points) plus a lower-triangular
    matrix representing its coset of the upper unipotent subgroup."""

    flags: Tuple[FnPoint, ...]
    b_minus: GroupElt

    def __post_init__(self):
        if len(self.flags) % 2 != 1:
            raise ValueError("flag models of arrows have an odd flag count")

    @property
    def n(self) -> int:
        return (len(self.flags) + 1) // 2

    def __eq__(self, other):
        if not isinstance(other, C2nArrow):
            return NotImplemented
        return self.flags == other.flags and self.b_minus == other.b_minus


def flag_point(g: GroupElt) -> FnPoint:
    return canonicalize_Fn((g,))


def to_C2n(g: GammaArrow) -> C2nArrow:
    """Prefix products of the slot representatives, as flags; the full
    product is the decoration."""
    gs = _reps(g.point)
    flags = []
    acc = None
    for x in gs[:-1]:
        acc = x if acc is None else acc @ x
        flags.append(flag_point(acc))
    return C2nArrow(tuple(flags), g.b_minus)


def from_C2n(a: C2nArrow) -> GammaArrow:
    reps = [f.c[0] for f in a.flags]
    gs = [reps[0]]
    for prev, cur in zip(reps, reps[1:]):
        gs.append(prev.inverse() @ cur)
    gs.append(reps[-1].inverse() @ a.b_minus)
    return gamma_arrow(gs)


def c2n_source(a: C2nArrow) -> Tuple[FnPoint, ...]:
    return a.flags[: a.n]


def c2n_target(a: C2nArrow) -> Tuple[FnPoint, ...]:
    binv = a.b_minus.inverse()
    n = a.n
    return tuple(
        flag_point(binv @ a.flags[2 * n - 2 - i].c[0]) for i in range(n)
    )


def c2n_unit(flags: Sequence[FnPoint]) -> C2nArrow:
    flags = tuple(flags)
    rank = flags[0].rank
    return C2nArrow(
        flags + tuple(reversed(flags[:-1])), GroupElt.identity(rank + 1)
    )


def c2n_inverse(a: C2nArrow) -> C2nArrow:
    binv = a.b_minus.inverse()
    flags = tuple(flag_point(binv @ f.c[0]) for f in reversed(a.flags))
    return C2nArrow(flags, binv)


def c2n_multiply(a1: C2nArrow, a2: C2nArrow) -> C2nArrow:
    t1, s2 = c2n_target(a1), c2n_source(a2)
    if not t1 == s2:
        raise NotComposable(t1, s2)
    n = a1.n
    back = tuple(
        flag_point(a1.b_minus @ a2.flags[i].c[0]) for i in range(n, 2 * n - 1)
    )
    return C2nArrow(a1.flags[:n] + back, a1.b_minus @ a2.b_minus)


# ------------------------------------------------------- open-locus model


@dataclass(frozen=True, eq=False)
class FoTArrow:
    """A big-cell-locus configuration point paired with a torus element."""

    p: FnPoint
    t: TorusElt

    def __post_init__(self):
        from .cells import in_Owe

        if not in_Owe(self.p):
            raise ConstraintViolated(
                "slot product is outside the big-cell locus"
            )

    @property
    def n(self) -> int:
        return self.p.n

    def __eq__(self, other):
        if not isinstance(other, FoTArrow):
            return NotImplemented
        return self.p == other.p and self.t == other.t


def j_map(g: GammaArrow) -> FoTArrow:
    """Forget the decoration, keep the torus part of the cached product."""
    return FoTArrow(g.point.forget(), gauss_decompose(g.b_minus)[1])


def j_inv(p: FnPoint, t: TorusElt) -> TFnPoint:
    """Reconstruct the decorated point: the decoration is the inverse of the
    upper Gauss part of the slot product times the torus element.  Defined
    on the big-cell locus (any arity)."""
    geq = g_geq0(fn_product(p))
    return TFnPoint(p.w, p.c, geq.inverse() @ t.to_matrix())


def gamma_from_fot(a: FoTArrow) -> GammaArrow:
    return GammaArrow.from_tfn(j_inv(a.p, a.t))


def fot_source(a: FoTArrow) -> FnPoint:
    n = a.n // 2
    return FnPoint(a.p.w[:n], a.p.c[:n])


def fot_target(a: FoTArrow) -> FnPoint:
    n = a.n // 2
    geq = g_geq0(fn_product(a.p))
    first = a.t.to_matrix().inverse() @ geq @ a.p.c[-1].inverse()
    rest = [a.p.c[i].inverse() for i in range(2 * n - 2, n - 1, -1)]
    return canonicalize_Fn([first] + rest)


def fot_unit(f: FnPoint) -> FoTArrow:
    gs = list(f.c) + [x.inverse() for x in reversed(f.c)]
    return FoTArrow(canonicalize_Fn(gs), TorusElt.one(f.rank))


def fot_inverse(a: FoTArrow) -> FoTArrow:
    n = a.n // 2
    geq = g_geq0(fn_product(a.p))
    first = a.t.to_matrix().inverse() @ geq @ a.p.c[-1].inverse()
    rest = [a.p.c[i].inverse() for i in range(2 * n - 2, -1, -1)]
    return FoTArrow(canonicalize_Fn([first] + rest), a.t.inverse())


def fot_multiply(a1: FoTArrow, a2: FoTArrow) -> FoTArrow:
    t1, s2 = fot_target(a1), fot_source(a2)
    if not t1 == s2:
        raise NotComposable(t1, s2)
    n = a1.n // 2
    geq = g_geq0(fn_product(a1.p))
    mid = a1.p.c[n]
    for x in a1.p.c[n + 1 :]:
        mid = mid @ x
    # The splice factor [prod]_{>=0}^{-1} t is the decoration the torus
    # component stands for; on undecorated canonical slots the torus part
    # must be reinstated explicitly.
    mid = mid @ geq.inverse() @ a1.t.to_matrix()
    for x in a2.p.c[: n + 1]:
        mid = mid @ x
    gs = list(a1.p.c[:n]) + [mid] + list(a2.p.c[n + 1 :])
    return FoTArrow(canonicalize_Fn(gs), a1.t * a2.t)


# ------------------------------------------------------ double-coset model


@dataclass(frozen=True, eq=False)
class GdbuArrow:
    """Two twisted-section tuples tied by c_1...c_n b = b_minus c'_1...c'_n."""

    rep: CellRep
    c: Tuple[GroupElt, ...]
    b: GroupElt
    b_minus: GroupElt
    cprime: Tuple[GroupElt, ...]

    def __post_init__(self):
        if not self.b.is_upper_triangular():
            raise ConstraintViolated("b must be upper triangular")
        if not self.b_minus.is_lower_triangular():
            raise ConstraintViolated("b_minus must be lower triangular")
        for side in (self.c, self.cprime):
            if len(side) != self.rep.n:
                raise ConstraintViolated("slot count differs from cell data")
            for ci, wi, ti in zip(side, self.rep.w, self.rep.t):
                if not in_twisted_section(ci, wi, ti):
                    raise WrongCell(wi, None)
        lhs = _tuple_product(self.c) @ self.b
        rhs = self.b_minus @ _tuple_product(self.cprime)
        if not lhs == rhs:
            raise ConstraintViolated(
                "defining equation c...c b = b_minus c'...c' fails"
            )

    @property
    def n(self) -> int:
        return self.rep.n

    def __eq__(self, other):
        if not isinstance(other, GdbuArrow):
            return NotImplemented
        return (
            self.rep == other.rep
            and all(a == b for a, b in zip(self.c, other.c))
            and self.b == other.b
            and self.b_minus == other.b_minus
            and all(a == b for a, b in zip(self.cprime, other.cprime))
        )


def _tuple_product(gs: Sequence[GroupElt]) -> GroupElt:
    out = gs[0]
    for g in gs[1:]:
        out = out @ g
    return out


def gdbu_source(a: GdbuArrow) -> FnPoint:
    return canonicalize_Fn(a.c)


def gdbu_target(a: GdbuArrow) -> FnPoint:
    return canonicalize_Fn(a.cprime)


def gdbu_unit(rep: CellRep, f: FnPoint) -> GdbuArrow:
    cs, _ = adapt_slots(f, rep)
    eye = GroupElt.identity(rep.rank + 1)
    return GdbuArrow(rep, cs, eye, eye, cs)


def gdbu_inverse(a: GdbuArrow) -> GdbuArrow:
    return GdbuArrow(
        a.rep, a.cprime, a.b.inverse(), a.b_minus.inverse(), a.c
    )


def gdbu_multiply(a1: GdbuArrow, a2: GdbuArrow) -> GdbuArrow:
    if a1.rep != a2.rep:
        raise NotComposable(a1.rep, a2.rep)
    if not all(x == y for x, y in zip(a1.cprime, a2.c)):
        raise NotComposable(a1.cprime, a2.c)
    return GdbuArrow(
        a1.rep, a1.c, a1.b @ a2.b, a1.b_minus @ a2.b_minus, a2.cprime
    )


def iso_I(rep: CellRep, a: GdbuArrow) -> GammaArrow:
    """Identify a double-coset arrow with a configuration arrow:
    [c_1, ..., c_{n-1}, c_n b, (c'_n)^{-1}, ..., (c'_1)^{-1}]."""
    gs = list(a.c)
    gs[-1] = gs[-1] @ a.b
    gs += [x.inverse() for x in reversed(a.cprime)]
    return gamma_arrow(gs)


def iso_I_inv(g: GammaArrow, rep: CellRep) -> GdbuArrow:
    """Unpack an arrow over a diagonal cell type into the double-coset model.

    The two section tuples are read off source and target; the triangular
    factors then come from the cached product and the defining equation.
    """
    u, v = gamma_cell_type(g)
    if u != v:
        raise WrongCell(u, v)
    if u != tuple(rep.w):
        raise WrongCell(tuple(rep.w), u)
    cs, _ = adapt_slots(source(g), rep)
    cps, _ = adapt_slots(target(g), rep)
    b = _tuple_product(cs).inverse() @ g.b_minus @ _tuple_product(cps)
    return GdbuArrow(rep, cs, b, g.b_minus, cps)


# ------------------------------------------------- two-sided factorizations


@dataclass(frozen=True, eq=False)
class GmnPoint:
    """A matrix presented two ways: an upper-decorated configuration point of
    arity m and a mirrored (lower-decorated) one of arity n, with equal
    products."""

    x: TFnPoint
    y: NegPoint

    def __post_init__(self):
        if not self.x.product() == self.y.product():
            raise ConstraintViolated("the two factorizations have different products")

    @property
    def m(self) -> int:
        return self.x.n

    @property
    def n(self) -> int:
        return self.y.n

    def __eq__(self, other):
        if not isinstance(other, GmnPoint):
            return NotImplemented
        return self.x == other.x and self.y == other.y


def gmn_point(gs: Sequence[GroupElt], ks: Sequence[GroupElt]) -> GmnPoint:
    return GmnPoint(canonicalize_TFn(gs), neg_point(ks))


def gmn_classify(pt: GmnPoint) -> Tuple[Tuple[WeylElt, ...], Tuple[WeylElt, ...]]:
    """The pair of cell tuples indexing the torus leaf through the point."""
    if not pt.x.product() == pt.y.product():
        raise ConstraintViolated("the two factorizations have different products")
    return pt.x.w, pt.y.w


def gmn_right_twist(pt: GmnPoint, t: TorusElt) -> GmnPoint:
    """Right-translate both factorizations by a torus element (last slots)."""
    tm = t.to_matrix()
    x = TFnPoint(pt.x.w, pt.x.c, pt.x.b @ tm)
    ks = [pt.y.b_minus @ pt.y.c[0]] + list(pt.y.c[1:])
    ks[-1] = ks[-1] @ tm
    return GmnPoint(x, neg_point(ks))


def gdbu_to_gmn(a: GdbuArrow) -> GmnPoint:
    """Split the defining equation into its two sides."""
    gs = list(a.c)
    gs[-1] = gs[-1] @ a.b
    ks = [a.b_minus @ a.cprime[0]] + list(a.cprime[1:])
    return gmn_point(gs, ks)


def gmn_to_gdbu(rep: CellRep, pt: GmnPoint) -> GdbuArrow:
    """Rebuild the double-coset arrow from the two factorizations (requires
    equal arities and a diagonal cell type matching ``rep``)."""
    if pt.m != pt.n:
        raise WrongCell(pt.x.w, pt.y.w)
    cs, b = adapt_tfn(pt.x, rep)
    bm, cps = adapt_neg(pt.y, rep)
    return GdbuArrow(rep, cs, b, bm, cps)


def iso_E(rep: CellRep, pt: GmnPoint) -> GammaArrow:
    """Identify a diagonal-type two-sided factorization with an arrow."""
    return iso_I(rep, gmn_to_gdbu(rep, pt))


def iso_E_inv(rep: CellRep, g: GammaArrow) -> GmnPoint:
    return gdbu_to_gmn(iso_I_inv(g, rep))


def piecewise_E(m: int, rep: CellRep, x: TFnPoint, y: NegPoint) -> TFnPoint:
    """Splice an arity-m decorated point with the reversed inverses of the
    mirrored point's twisted slots into one arity-(m+n) decorated point."""
    if x.n != m:
        raise WrongCell(m, x.n)
    _, cs = adapt_neg(y, rep)
    gs = list(x.c)
    gs[-1] = gs[-1] @ x.b
    gs += [c.inverse() for c in reversed(cs)]
    return canonicalize_TFn(gs)


def piecewise_E_inv(m: int, rep: CellRep, p: TFnPoint) -> GmnPoint:
    """Undo the splice: the last n slots are re-expressed as reversed
    inverses of twisted sections, pinning the split; both factorizations are
    then read off.  Requires a lower-triangular total product."""
    n = p.n - m
    if n != rep.n or n < 1:
        raise WrongCell(rep.w, p.w[m:])
    expect = tuple(w.inverse() for w in reversed(rep.w))
    if p.w[m:] != expect:
        raise WrongCell(expect, p.w[m:])
    total = p.product()
    if not total.is_lower_triangular():
        raise ConstraintViolated("total product is not lower triangular")
    tail = list(p.c[m:])
    tail[-1] = tail[-1] @ p.b
    flipped = canonicalize_TFn([x.inverse() for x in reversed(tail)])
    if flipped.w != tuple(rep.w):
        raise WrongCell(tuple(rep.w), flipped.w)
    cs, bhat = adapt_tfn(flipped, rep)
    bstar = bhat.inverse()
    x = TFnPoint(p.w[:m], p.c[:m], bstar)
    ks = [total @ cs[0]] + list(cs[1:])
    return GmnPoint(x, neg_point(ks))


def tfn_embed(x: TFnPoint, v: WeylElt, tv: TorusElt) -> Tuple[FnPoint, TorusElt]:
    """Append the inverse of the chosen representative of v as an extra slot
    and keep the torus part of the mirrored factorization of the product.

    Requires the product of x to factor as (lower triangular) * (twisted
    section of v).
    """
    from .groupcore import bruhat_factor_neg

    total = x.product()
    bm, vv, c = bruhat_factor_neg(total)
    if vv != v:
        raise WrongCell(v, vv)
    d = torus_conjugate(tv, v.inverse())
    bm = bm @ d.to_matrix().inverse()
    vdot = wbar(v) @ tv.to_matrix()
    gs = list(x.c)
    gs[-1] = gs[-1] @ x.b
    gs.append(vdot.inverse())
    return canonicalize_Fn(gs), gauss_decompose(bm)[1]
