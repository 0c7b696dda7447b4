"""Leaf classification: torus cosets, level-set invariants, membership tests.

Everything here is exact.  The subtori that organize the leaf decomposition
of each model are described by the integer weight vectors (characters) that
vanish on them, so coset membership and coset equality reduce to evaluating
finitely many monomials at rational torus elements.  Square roots, where a
construction genuinely needs them, are componentwise rational square roots
and fail loudly (NoRationalSqrt) when they do not exist; with the standard
cell representatives no roots are needed at all.

The classifying data is always a pair of cosets:

* a "level" coset recording a quadratic combination of residue torus parts
  modulo the image torus of ``a -> a * (a^{-1} conjugated by w)``, and
* a "residual" coset recording a single torus part modulo the subtorus on
  which all fundamental weights outside the cell support are trivial.

Two points lie on one leaf exactly when both cosets agree.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from typing import List, Optional, Sequence, Tuple, Union

from .cells import FnPoint, TFnPoint, fn_product, tau
from .errors import CellMismatch, NoRationalSqrt
from .groupcore import (
    GroupElt,
    TorusElt,
    bruhat_factor_neg,
    gauss_decompose,
    rational_sqrt,
    torus_conjugate,
    wbar,
)
from .groupoids import (
    CellRep,
    FoTArrow,
    GammaArrow,
    GdbuArrow,
    GmnPoint,
    adapt_neg,
    adapt_tfn,
    gamma_cell_type,
    in_diagonal_type,
    iso_I_inv,
)
from .rootdata import WeylElt, act_on_weight, fixed_character_lattice, supp_sets

__all__ = [
    "TorusCoset",
    "LeafDescriptor",
    "weight_annihilator",
    "paired_annihilator",
    "fixed_coset",
    "in_Tw",
    "in_Ttilde",
    "in_Tuv",
    "two_torsion_subgroup",
    "stab_member",
    "tleaf_of",
    "mu",
    "delta",
    "same_leaf",
    "leaf_dim",
    "sigma_member",
    "cover_fiber",
    "beta",
    "lambda_member",
    "lambda_uu_member",
    "suu_member",
    "mirror_torus",
    "mirror_rep",
    "chi",
    "suv_member",
    "suv_translate_equal",
    "tfn_leaf_cosets",
    "tfn_leaf_member",
    "tfn_leaf_dim",
    "xw_image_member",
    "yw_image_member",
    "owe_leaf",
    "gamma_leaf",
    "gmn_leaf",
    "tfn_leaf",
]


def _weyl_product(rank: int, ws: Sequence[WeylElt]) -> WeylElt:
    out = WeylElt.identity(rank)
    for w in ws:
        out = out * w
    return out


# ---------------------------------------------------------------------------
# subtorus descriptions and cosets


def weight_annihilator(rank: int, alphas: Sequence[int]) -> Tuple[Tuple[int, ...], ...]:
    """Characters cutting out the subtorus where the fundamental weight of
    every listed simple index evaluates to 1."""
    return tuple(
        tuple(1 if i == a - 1 else 0 for i in range(rank)) for a in sorted(alphas)
    )


def paired_annihilator(u: WeylElt, v: WeylElt) -> Tuple[Tuple[int, ...], ...]:
    """Characters cutting out {(a^{-1} conj u) * (a conj v)}.

    That image torus is the v-translate of the image torus of u v^{-1}, so
    its annihilator is the fixed-character lattice of u v^{-1} pulled back
    through the inverse v-action on weights.
    """
    return tuple(
        act_on_weight(v.inverse(), chi)
        for chi in fixed_character_lattice(u * v.inverse())
    )


@dataclass(frozen=True, eq=False)
class TorusCoset:
    """A coset rep * S, where S is the subtorus annihilated by ``ann``.

    Membership and equality are decided by evaluating the annihilator
    characters only, so different representatives of one coset compare
    equal.  Cosets with differently presented annihilators are never equal;
    all constructors in this module produce one canonical presentation per
    subtorus, which is what makes the comparison sound.
    """

    rep: TorusElt
    ann: Tuple[Tuple[int, ...], ...]

    def contains(self, t: TorusElt) -> bool:
        shift = t * self.rep.inverse()
        return all(shift.char(chi) == 1 for chi in self.ann)

    def translate(self, h: TorusElt) -> "TorusCoset":
        return TorusCoset(h * self.rep, self.ann)

    def __eq__(self, other):
        if not isinstance(other, TorusCoset):
            return NotImplemented
        return self.ann == other.ann and self.contains(other.rep)

    def __repr__(self):
        return f"TorusCoset(rep={self.rep!r}, codim={len(self.ann)})"


def fixed_coset(rep: TorusElt, w: WeylElt) -> TorusCoset:
    """Coset modulo the image torus of ``a -> a * (a^{-1} conjugated by w)``,
    which is cut out exactly by the w-fixed characters."""
    return TorusCoset(rep, fixed_character_lattice(w))


def in_Tw(t: TorusElt, w: WeylElt) -> bool:
    """Membership in {a * (a^{-1} conjugated by w) : a in T}."""
    return all(t.char(chi) == 1 for chi in fixed_character_lattice(w))


def in_Ttilde(t: TorusElt, ws: Sequence[WeylElt]) -> bool:
    """Membership in the subtorus trivial on every fundamental weight fixed by
    all letters of the cell tuple (the complement of the joint support)."""
    _, supp0 = supp_sets(ws)
    return all(t.vals[a - 1] == 1 for a in supp0)


def in_Tuv(t: TorusElt, u: WeylElt, v: WeylElt) -> bool:
    """Membership in {(a^{-1} conj u) * (a conj v)} via conjugation pullback:
    t lies in the pair torus iff its inverse-v conjugate lies in the image
    torus of u v^{-1}."""
    return in_Tw(torus_conjugate(t, v.inverse()), u * v.inverse())


def two_torsion_subgroup(rank: int, alphas: Sequence[int]) -> Tuple[TorusElt, ...]:
    """All products of simple coroot values at -1 over the listed indices
    (2^len distinct elements, each of square one)."""
    out = []
    for signs in itertools.product((1, -1), repeat=len(alphas)):
        t = TorusElt.one(rank)
        for a, s in zip(sorted(alphas), signs):
            if s == -1:
                t = t * TorusElt.coroot(rank, a, -1)
        out.append(t)
    return tuple(out)


def stab_member(h: TorusElt, ws: Sequence[WeylElt]) -> bool:
    """Torus twists preserving every leaf over the cell tuple: h trivial
    outside the support with h^2 in the image torus of the total product."""
    return in_Ttilde(h, ws) and in_Tw(h * h, _weyl_product(h.rank, ws))


# ---------------------------------------------------------------------------
# torus-leaf labels


def tleaf_of(point: Union[GammaArrow, FoTArrow, GmnPoint, TFnPoint, FnPoint]):
    """Cell label of the torus-leaf containing the point.

    Arrow spaces and open-cell torus bundles are labeled by their slot cell
    tuple; two-sided models by the pair of cell tuples; a decorated
    configuration point by its cell tuple together with the lower Bruhat
    cell of its total slot product.
    """
    if isinstance(point, GammaArrow):
        return tuple(point.point.w)
    if isinstance(point, FoTArrow):
        return tuple(point.p.w)
    if isinstance(point, GmnPoint):
        return (tuple(point.x.w), tuple(point.y.w))
    if isinstance(point, TFnPoint):
        _, vcell, _ = bruhat_factor_neg(point.product())
        return (tuple(point.w), vcell)
    if isinstance(point, FnPoint):
        return tuple(point.w)
    raise TypeError(f"no torus-leaf label for {type(point).__name__}")


# ---------------------------------------------------------------------------
# leaves of the decorated open cell


def mu(p: FnPoint, t: TorusElt, rep: CellRep) -> TorusCoset:
    """Quadratic classifying coset of a decorated open-cell point.

    The value is t^{-2} times the torus part of the slot product shifted by
    the representative offset, taken modulo the image torus of the total
    cell.  Off the open locus the torus part does not exist and
    NotInOpenLeaf is raised.
    """
    if tuple(p.w) != tuple(rep.w):
        raise CellMismatch(tuple(p.w), tuple(rep.w))
    val = (t ** (-2)) * rep.offset() * tau(p)
    return fixed_coset(val, _weyl_product(t.rank, rep.w))


def delta(t: TorusElt, ws: Sequence[WeylElt]) -> TorusCoset:
    """Residual classifying coset: the decoration modulo the subtorus trivial
    outside the joint support of the cell tuple."""
    _, supp0 = supp_sets(ws)
    return TorusCoset(t, weight_annihilator(t.rank, supp0))


def same_leaf(pt1, pt2, rep: CellRep) -> bool:
    """Whether two decorated open-cell points lie on one leaf: equal quadratic
    cosets and equal residual cosets."""
    p1, t1 = pt1
    p2, t2 = pt2
    if tuple(p1.w) != tuple(p2.w):
        raise CellMismatch(tuple(p1.w), tuple(p2.w))
    if tuple(p1.w) != tuple(rep.w):
        raise CellMismatch(tuple(p1.w), tuple(rep.w))
    if mu(p1, t1, rep) != mu(p2, t2, rep):
        return False
    return delta(t1, rep.w) == delta(t2, rep.w)


def leaf_dim(ws: Sequence[WeylElt]) -> int:
    """Dimension of any leaf over the given cell tuple: total length plus the
    number of characters moved by the total product."""
    rank = ws[0].rank
    total = _weyl_product(rank, ws)
    moved = rank - len(fixed_character_lattice(total))
    return sum(w.length for w in ws) + moved


def sigma_member(p: FnPoint, t: TorusElt, rep: CellRep) -> bool:
    """Membership in the distinguished square-root leaf of the decorated open
    cell: the quadratic value lands in the image torus of the total product
    and the decoration lies in the root-offset residual coset.

    For representatives whose offset is not a componentwise rational square
    this raises NoRationalSqrt; with the standard representative the offset
    is trivial and no root is taken.
    """
    if tuple(p.w) != tuple(rep.w):
        raise CellMismatch(tuple(p.w), tuple(rep.w))
    val = (t ** (-2)) * rep.offset() * tau(p)
    if not in_Tw(val, _weyl_product(t.rank, rep.w)):
        return False
    return in_Ttilde(t * rep.offset().sqrt().inverse(), rep.w)


def cover_fiber(p: FnPoint, tprime: TorusElt, rep: CellRep) -> List[TorusElt]:
    """All decorations t with (p, t) in the square-root leaf whose quadratic
    value is exactly ``tprime``.

    A level value outside the image torus of the total product admits no
    solutions at all, and neither does one whose support-complement
    coordinates disagree with those of tau(p); both cases return the empty
    list.  Otherwise solving t^2 = offset * tau(p) / tprime inside the
    root-offset-shifted support block gives exactly 2^{|supp|} solutions
    forming one orbit of the support two-torsion subgroup.  A support
    coordinate that is not a rational square raises NoRationalSqrt with the
    witness index.
    """
    if tuple(p.w) != tuple(rep.w):
        raise CellMismatch(tuple(p.w), tuple(rep.w))
    rank = tprime.rank
    if not in_Tw(tprime, _weyl_product(rank, rep.w)):
        return []
    target = tprime.inverse() * tau(p)
    supp, supp0 = supp_sets(rep.w)
    for a in supp0:
        if target.vals[a - 1] != 1:
            return []
    roots = {}
    for a in supp:
        r = rational_sqrt(target.vals[a - 1])
        if r is None:
            raise NoRationalSqrt(a, target.vals[a - 1])
        roots[a] = r
    base = rep.offset().sqrt()
    supp_list = sorted(supp)
    out = []
    for signs in itertools.product((1, -1), repeat=len(supp_list)):
        vals = [Fraction(1)] * rank
        for a, sg in zip(supp_list, signs):
            vals[a - 1] = sg * roots[a]
        out.append(base * TorusElt(rank, tuple(vals)))
    return out


# ---------------------------------------------------------------------------
# leaves of the arrow space


def beta(g: GammaArrow, rep: CellRep) -> Tuple[TorusCoset, TorusCoset]:
    """Classifying coset pair of an arrow.

    The level part is the torus part of the representative-adapted residue
    times the torus part of the lower-triangular total, modulo the image
    torus of the full cell product; the residual part is the total's torus
    part modulo the support subtorus.
    """
    if tuple(g.point.w) != tuple(rep.w):
        raise CellMismatch(tuple(g.point.w), tuple(rep.w))
    _, b = adapt_tfn(g.point, rep)
    b0 = gauss_decompose(b)[1]
    bm0 = gauss_decompose(g.b_minus)[1]
    rank = b0.rank
    _, supp0 = supp_sets(rep.w)
    return (
        fixed_coset(b0 * bm0, _weyl_product(rank, rep.w)),
        TorusCoset(bm0, weight_annihilator(rank, supp0)),
    )


def lambda_member(g: GammaArrow, rep: CellRep) -> bool:
    """Membership in the distinguished arrow leaf: trivial level coset and
    residual coset equal to that of the offset's componentwise root."""
    first, second = beta(g, rep)
    if not first.contains(TorusElt.one(first.rep.rank)):
        return False
    return second.contains(rep.offset().sqrt())


def lambda_uu_member(g: GammaArrow, rep: Optional[CellRep] = None) -> bool:
    """Wide sub-groupoid leaf membership for diagonal-type arrows.

    Evaluated in the double-coset coordinates of the given representative
    choice for the first-half cell tuple (standard representatives by
    default): the residue torus part must be trivial outside the support,
    and must cancel the conjugated torus part of the negative factor
    exactly.
    """
    if not in_diagonal_type(g):
        u_ws, v_ws = gamma_cell_type(g)
        raise CellMismatch(u_ws, v_ws, "arrow cell is not of diagonal type")
    u_ws, _ = gamma_cell_type(g)
    if rep is None:
        rep = CellRep.default(u_ws)
    a = iso_I_inv(g, rep)
    return suu_member(a)


def suu_member(a: GdbuArrow) -> bool:
    """Leaf-through-representatives membership in double-coset coordinates:
    [b]_0 trivial outside the support and [b]_0 * [b_-]_0^u = e.  Contains
    every unit arrow."""
    b0 = gauss_decompose(a.b)[1]
    bm0 = gauss_decompose(a.b_minus)[1]
    u = _weyl_product(b0.rank, a.rep.w)
    if b0 * torus_conjugate(bm0, u) != TorusElt.one(b0.rank):
        return False
    return in_Ttilde(b0, a.rep.w)


# ---------------------------------------------------------------------------
# leaves of the two-sided models


def mirror_torus(v: WeylElt) -> TorusElt:
    """Torus offset between the standard representative of v and the inverse
    of the standard representative of v^{-1}; always of square one."""
    return TorusElt.from_matrix(wbar(v).inverse() @ wbar(v.inverse()).inverse())


def mirror_rep(ws: Sequence[WeylElt]) -> CellRep:
    """Representative tuple normalizing each slot through the inverse of the
    standard representative of the inverse letter (the adapted normalization
    for negative-side factorizations)."""
    return CellRep(tuple(ws), tuple(mirror_torus(w) for w in ws))


def chi(pt: GmnPoint) -> Tuple[TorusCoset, TorusCoset]:
    """Classifying coset pair of a two-sided decorated point.

    The negative half is re-normalized through mirror representatives before
    its torus part is read off; the level coset multiplies the positive
    residue torus part by the total-cell conjugate of that torus part,
    modulo the pair image torus; the residual coset is the positive residue
    torus part modulo the joint support subtorus.
    """
    u_ws = tuple(pt.x.w)
    v_ws = tuple(pt.y.w)
    b0 = gauss_decompose(pt.x.b)[1]
    rank = b0.rank
    u = _weyl_product(rank, u_ws)
    v = _weyl_product(rank, v_ws)
    bm, _ = adapt_neg(pt.y, mirror_rep(v_ws))
    bm0 = gauss_decompose(bm)[1]
    _, supp0 = supp_sets(u_ws + v_ws)
    return (
        TorusCoset(b0 * torus_conjugate(bm0, v), paired_annihilator(u, v)),
        TorusCoset(b0, weight_annihilator(rank, supp0)),
    )


def suv_member(pt: GmnPoint) -> bool:
    """Membership in the base leaf of the two-sided model: both classifying
    cosets are trivial."""
    first, second = chi(pt)
    one = TorusElt.one(first.rep.rank)
    return first.contains(one) and second.contains(one)


def suv_translate_equal(
    a1: TorusElt, a2: TorusElt, u_ws: Sequence[WeylElt], v_ws: Sequence[WeylElt]
) -> bool:
    """When two torus translates of the base leaf coincide: the ratio is
    trivial outside the joint support and its square lies in the image torus
    of the product ratio of the total cells."""
    s = a1.inverse() * a2
    if not in_Ttilde(s, tuple(u_ws) + tuple(v_ws)):
        return False
    u = _weyl_product(s.rank, u_ws)
    v = _weyl_product(s.rank, v_ws)
    return in_Tw(s * s, u * v.inverse())


# ---------------------------------------------------------------------------
# leaves of the decorated configuration space


def tfn_leaf_cosets(x: TFnPoint, v: WeylElt) -> Tuple[TorusCoset, TorusCoset]:
    """Classifying coset pair of a decorated configuration point whose total
    slot product lies in the prescribed lower Bruhat cell.

    The torus part of the mirror-normalized negative factor is read off as
    the triangular torus part of (total product) * (standard representative
    of v^{-1}) without computing the negative factorization slotwise.
    """
    total = x.product()
    _, vcell, _ = bruhat_factor_neg(total)
    if vcell != v:
        raise CellMismatch(v, vcell, "total slot product is in a different lower cell")
    b0 = gauss_decompose(x.b)[1]
    rank = b0.rank
    m0 = gauss_decompose(total @ wbar(v.inverse()))[1]
    u_ws = tuple(x.w)
    u = _weyl_product(rank, u_ws)
    _, supp0 = supp_sets(u_ws + (v,))
    return (
        TorusCoset(b0 * torus_conjugate(m0, v), paired_annihilator(u, v)),
        TorusCoset(b0, weight_annihilator(rank, supp0)),
    )


def tfn_leaf_member(x: TFnPoint, u_ws: Sequence[WeylElt], v: WeylElt) -> bool:
    """Membership in the base leaf over the (cell tuple, lower cell) label."""
    if tuple(x.w) != tuple(u_ws):
        raise CellMismatch(tuple(x.w), tuple(u_ws))
    first, second = tfn_leaf_cosets(x, v)
    one = TorusElt.one(first.rep.rank)
    return first.contains(one) and second.contains(one)


def tfn_leaf_dim(u_ws: Sequence[WeylElt], v: WeylElt) -> int:
    """Leaf dimension over the (cell tuple, lower cell) label: both lengths
    plus the number of characters moved by the cell ratio."""
    rank = v.rank
    u = _weyl_product(rank, u_ws)
    moved = rank - len(fixed_character_lattice(u * v.inverse()))
    return sum(w.length for w in u_ws) + v.length + moved


# ---------------------------------------------------------------------------
# image descriptions of the classifying map


def xw_image_member(a: TorusElt, aprime: TorusElt, rep: CellRep) -> bool:
    """Product-form image test: a * aprime^2 lies in the offset-shifted
    support subtorus."""
    val = a * (aprime ** 2) * rep.offset().inverse()
    return in_Ttilde(val, rep.w)


def yw_image_member(a: TorusElt, aprime: TorusElt, rep: CellRep) -> bool:
    """Quotient-form image test: a^{-1} * aprime^2 against the same shifted
    subtorus.  Kept separate from the product form so the two candidate
    image descriptions can be compared side by side."""
    val = a.inverse() * (aprime ** 2) * rep.offset().inverse()
    return in_Ttilde(val, rep.w)


# ---------------------------------------------------------------------------
# leaf descriptors


@dataclass(frozen=True, eq=False)
class LeafDescriptor:
    """Which leaf a point sits on: model kind, cell label, and the two
    classifying cosets.  Two descriptors compare equal exactly when they
    name the same leaf of the same model."""

    kind: str
    label: tuple
    level: TorusCoset
    residual: TorusCoset

    def __eq__(self, other):
        if not isinstance(other, LeafDescriptor):
            return NotImplemented
        return (
            self.kind == other.kind
            and self.label == other.label
            and self.level == other.level
            and self.residual == other.residual
        )


def owe_leaf(p: FnPoint, t: TorusElt, rep: CellRep) -> LeafDescriptor:
    return LeafDescriptor("OweT", tuple(rep.w), mu(p, t, rep), delta(t, rep.w))


def gamma_leaf(g: GammaArrow, rep: CellRep) -> LeafDescriptor:
    first, second = beta(g, rep)
    return LeafDescriptor("Gamma", tuple(rep.w), first, second)


def gmn_leaf(pt: GmnPoint) -> LeafDescriptor:
    first, second = chi(pt)
    return LeafDescriptor("Gmn", (tuple(pt.x.w), tuple(pt.y.w)), first, second)


def tfn_leaf(x: TFnPoint, v: WeylElt) -> LeafDescriptor:
    first, second = tfn_leaf_cosets(x, v)
    return LeafDescriptor("TFn", (tuple(x.w), v), first, second)
