"""Seeded random generation of exact sample data.

Everything takes an explicit ``random.Random`` so that suites are
reproducible; rationals are drawn with numerator and denominator bounded by
20 in absolute value.
"""

from __future__ import annotations

import random
from fractions import Fraction
from typing import Optional

from .groupcore import GroupElt, TorusElt, mat_identity, one_param
from .rootdata import WeylElt

__all__ = [
    "rand_rat",
    "rand_torus",
    "rand_unipotent_upper",
    "rand_unipotent_lower",
    "rand_upper",
    "rand_lower",
    "rand_group",
    "rand_weyl",
]


def rand_rat(rng: random.Random, nonzero: bool = False, bound: int = 20) -> Fraction:
    while True:
        x = Fraction(rng.randint(-bound, bound), rng.randint(1, bound))
        if x != 0 or not nonzero:
            return x


def rand_torus(rng: random.Random, rank: int, bound: int = 8) -> TorusElt:
    return TorusElt(
        rank, tuple(rand_rat(rng, nonzero=True, bound=bound) for _ in range(rank))
    )


def rand_unipotent_upper(rng: random.Random, rank: int, bound: int = 6) -> GroupElt:
    n = rank + 1
    rows = mat_identity(n)
    for i in range(n):
        for j in range(i + 1, n):
            rows[i][j] = rand_rat(rng, bound=bound)
    return GroupElt(rows, check=False)


def rand_unipotent_lower(rng: random.Random, rank: int, bound: int = 6) -> GroupElt:
    n = rank + 1
    rows = mat_identity(n)
    for i in range(n):
        for j in range(i):
            rows[i][j] = rand_rat(rng, bound=bound)
    return GroupElt(rows, check=False)


def rand_upper(rng: random.Random, rank: int) -> GroupElt:
    """Random upper triangular element with determinant one."""
    return rand_torus(rng, rank).to_matrix() @ rand_unipotent_upper(rng, rank)


def rand_lower(rng: random.Random, rank: int) -> GroupElt:
    return rand_torus(rng, rank).to_matrix() @ rand_unipotent_lower(rng, rank)


def rand_group(rng: random.Random, rank: int, steps: Optional[int] = None) -> GroupElt:
    """A generic group element: a random word in root one-parameter elements
    and a torus factor.  Generic for sampling purposes; callers needing a
    specific stratum should reject and redraw."""
    if steps is None:
        steps = 2 * rank + 3
    g = rand_torus(rng, rank).to_matrix()
    for _ in range(steps):
        sign = rng.choice((+1, -1))
        alpha = rng.randint(1, rank)
        g = g @ one_param(rank, sign, alpha, rand_rat(rng, bound=6))
    return g


def rand_weyl(rng: random.Random, rank: int) -> WeylElt:
    perm = list(range(1, rank + 2))
    rng.shuffle(perm)
    return WeylElt(rank, tuple(perm))


# --------------------------------------------------- configuration sampling
# These build on the cell/groupoid layers; imported lazily at module level is
# fine because those layers never import this module back.


def rand_section(rng: random.Random, w: WeylElt) -> GroupElt:
    """A random canonical-section element of the cell of w."""
    from .groupcore import bruhat_factor_pos, wbar

    g = rand_unipotent_upper(rng, w.rank) @ wbar(w)
    return bruhat_factor_pos(g).c


def rand_fn_point(rng: random.Random, rank: int, n: int):
    """A random configuration point (random cells)."""
    from .cells import canonicalize_Fn

    return canonicalize_Fn([rand_group(rng, rank) for _ in range(n)])


def rand_fn_point_in(rng: random.Random, ws) -> "object":
    """A random configuration point with prescribed slot cells."""
    from .cells import FnPoint

    ws = tuple(ws)
    return FnPoint(ws, tuple(rand_section(rng, w) for w in ws))


def rand_arrow(rng: random.Random, rank: int, n: int):
    """A random arrow of the arity-2n groupoid: choose all but the last slot
    freely and one lower-triangular product, then solve for the last slot."""
    from .groupoids import gamma_arrow

    gs = [rand_group(rng, rank) for _ in range(2 * n - 1)]
    prod = gs[0]
    for g in gs[1:]:
        prod = prod @ g
    gs.append(prod.inverse() @ rand_lower(rng, rank))
    return gamma_arrow(gs)


def rand_arrow_with_source(rng: random.Random, f) -> "object":
    """A random arrow whose source is the given configuration point."""
    from .groupoids import gamma_arrow, source

    n = f.n
    rank = f.rank
    gs = list(f.c) + [rand_group(rng, rank) for _ in range(n - 1)]
    prod = gs[0]
    for g in gs[1:]:
        prod = prod @ g
    gs.append(prod.inverse() @ rand_lower(rng, rank))
    arrow = gamma_arrow(gs)
    assert source(arrow) == f
    return arrow


def rand_composable_pair(rng: random.Random, rank: int, n: int):
    g1 = rand_arrow(rng, rank, n)
    from .groupoids import target

    g2 = rand_arrow_with_source(rng, target(g1))
    return g1, g2


def complete_double_coset(rng: random.Random, cprod: GroupElt, cpprod: GroupElt):
    """Solve c...c * b = b_minus * c'...c' for (b, b_minus) given the two
    section products: move the second flag onto the first by a lower
    unipotent element (possible when both products are Gauss-decomposable),
    with a random torus in the middle for genericity.

    Returns (b, b_minus) or None when a Gauss factor does not exist.
    """
    from .errors import NotInBigCell
    from .groupcore import gauss_decompose

    try:
        m1 = gauss_decompose(cprod)[0]
        m2 = gauss_decompose(cpprod)[0]
    except NotInBigCell:
        return None
    a = rand_torus(rng, cprod.rank, bound=5)
    b_minus = m1 @ a.to_matrix() @ m2.inverse()
    b = cprod.inverse() @ b_minus @ cpprod
    if not b.is_upper_triangular():
        return None
    return b, b_minus


def rand_gdbu(rng: random.Random, rep) -> "object":
    """A random double-coset arrow over the twisted sections of ``rep``."""
    from .groupoids import GdbuArrow, _tuple_product, adapt_slots
    from .cells import FnPoint

    while True:
        cs = tuple(rand_section(rng, w) for w in rep.w)
        cps = tuple(rand_section(rng, w) for w in rep.w)
        cs, _ = adapt_slots(FnPoint(rep.w, cs), rep)
        cps, _ = adapt_slots(FnPoint(rep.w, cps), rep)
        got = complete_double_coset(rng, _tuple_product(cs), _tuple_product(cps))
        if got is not None:
            b, bm = got
            return GdbuArrow(rep, cs, b, bm, cps)


def rand_gmn(rng: random.Random, u_ws, v_ws) -> "object":
    """A random two-sided-factorization point over cells (u, v)."""
    from .cells import TFnPoint
    from .groupoids import GmnPoint, NegPoint, _tuple_product

    u_ws = tuple(u_ws)
    v_ws = tuple(v_ws)
    while True:
        cs = tuple(rand_section(rng, w) for w in u_ws)
        ds = tuple(rand_section(rng, w) for w in v_ws)
        got = complete_double_coset(rng, _tuple_product(cs), _tuple_product(ds))
        if got is not None:
            b, bm = got
            return GmnPoint(
                TFnPoint(u_ws, cs, b), NegPoint(bm, v_ws, ds)
            )


# ------------------------------------------- distinguished-leaf members


def _gauss_solve(rows, rhs):
    """Exact Gaussian elimination; None when the system is singular."""
    k = len(rows)
    aug = [list(r) + [b] for r, b in zip(rows, rhs)]
    for col in range(k):
        piv = next((r for r in range(col, k) if aug[r][col] != 0), None)
        if piv is None:
            return None
        aug[col], aug[piv] = aug[piv], aug[col]
        pv = aug[col][col]
        aug[col] = [v / pv for v in aug[col]]
        for r in range(k):
            if r != col and aug[r][col] != 0:
                f = aug[r][col]
                aug[r] = [v - f * w for v, w in zip(aug[r], aug[col])]
    return [aug[r][k] for r in range(k)]


def _solve_upper_conjugate(cbar: GroupElt, diag) -> Optional[GroupElt]:
    """The unique upper-triangular x with the given diagonal making
    cbar @ x @ cbar^{-1} lower triangular, or None when the linear system
    for the strict upper entries is singular."""
    n = cbar.size
    idx = [(i, j) for i in range(n) for j in range(i + 1, n)]
    cinv = cbar.inverse()
    rows = []
    rhs = []
    for a, bcol in idx:
        rows.append([cbar[a, i] * cinv[j, bcol] for (i, j) in idx])
        rhs.append(-sum(cbar[a, i] * diag[i] * cinv[i, bcol] for i in range(n)))
    sol = _gauss_solve(rows, rhs)
    if sol is None:
        return None
    out = mat_identity(n)
    for i in range(n):
        out[i][i] = diag[i]
    for (i, j), v in zip(idx, sol):
        out[i][j] = v
    return GroupElt(out, check=False)


def rand_suu_member(rng: random.Random, rep, sections=None) -> "object":
    """A random non-unit member of the distinguished wide-subgroupoid leaf,
    in double-coset coordinates over ``rep``.

    Construction: over fixed twisted sections (drawn at random unless
    prescribed), upper-triangular residues b conjugating into B_- form a
    linear space sliced by the diagonal, and the two triangular factors of
    the slice share their torus part exactly.  Drawing the diagonal as a
    square t = r^2 makes the obstruction t * (t conjugated by the total)
    the exact square of r * (r conjugated), so the right translation by its
    inverse is rational and lands the residue on r * (r^{-1} conjugated),
    which lies in the image torus and so inside the support subtorus.  The
    output is validated against both membership conditions.
    """
    from .groupcore import gauss_decompose, torus_conjugate
    from .groupoids import (
        adapt_slots,
        gdbu_to_gmn,
        gmn_right_twist,
        gmn_to_gdbu,
        GdbuArrow,
        _tuple_product,
    )
    from .cells import FnPoint
    from .rootdata import WeylElt as _W, supp_sets

    rank = rep.rank
    n = rank + 1
    total = _W.identity(rank)
    for w in rep.w:
        total = total * w
    _, supp0 = supp_sets(rep.w)
    while True:
        if sections is None:
            cs = tuple(rand_section(rng, w) for w in rep.w)
            cs, _ = adapt_slots(FnPoint(rep.w, cs), rep)
        else:
            cs = tuple(sections)
        cbar = _tuple_product(cs)
        r = rand_torus(rng, rank, bound=4)
        t = r * r
        vals = t.vals
        diag = [vals[0]] + [vals[i + 1] / vals[i] for i in range(rank - 1)]
        prod = Fraction(1)
        for d in diag:
            prod *= d
        diag.append(1 / prod)
        x = _solve_upper_conjugate(cbar, diag)
        if x is None:
            if sections is not None:
                continue  # re-draw the diagonal; the sections are pinned
            continue
        if all(x[i, j] == 0 for i in range(n) for j in range(i + 1, n)):
            continue  # diagonal solution: would give a pure torus twist
        ell = cbar @ x @ cbar.inverse()
        if not ell.is_lower_triangular():
            continue
        raw = GdbuArrow(rep, cs, x, ell, cs)
        y = (r * torus_conjugate(r, total)).inverse()
        member = gmn_to_gdbu(rep, gmn_right_twist(gdbu_to_gmn(raw), y))
        b0 = gauss_decompose(member.b)[1]
        bm0 = gauss_decompose(member.b_minus)[1]
        one = TorusElt.one(rank)
        assert b0 * torus_conjugate(bm0, total) == one, (
            "shared-torus-part identity violated"
        )
        assert all(b0.vals[a - 1] == 1 for a in supp0), (
            "residue escaped the support subtorus"
        )
        return member


def rand_suu_composable_pair(rng: random.Random, rep):
    """Two distinguished-leaf members whose double-coset sections match
    head-to-tail, so their groupoid product is defined."""
    a1 = rand_suu_member(rng, rep)
    a2 = rand_suu_member(rng, rep, sections=a1.cprime)
    return a1, a2
