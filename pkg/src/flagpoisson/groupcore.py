"""Exact matrix computations in SL(r+1): scalars, group elements, factorizations.

Scalars are either rationals or jets (truncated polynomials of total degree
<= 2 in finitely many formal directions, with coefficients in any scalar
ring, so jets nest).  All algorithms divide only by scalars whose constant
part is nonzero, which makes every chart formula in this package evaluable
on first/second order perturbations of a rational base point.

The factorization engine is a pair of echelon routines:

* ``bruhat_factor_pos``: column operations from the right (upper-triangular
  group) produce the unique representative whose column pivots are a signed
  permutation matrix with zeros below and to the right of each pivot;
* ``bruhat_factor_neg``: the mirror image with row operations from the left
  (lower-triangular group).

Both run unchanged on jet matrices, where they compute the canonical chart
formulas of the stratum of the base point, extended to a neighborhood.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import isqrt
from typing import Optional, Sequence, Tuple, Union

from .errors import NoRationalSqrt, NotInBigCell, WrongCell
from .rootdata import WeylElt, act_on_weight

Rat = Fraction

__all__ = [
    "Jet",
    "GroupElt",
    "TorusElt",
    "BruhatFactorization",
    "one_param",
    "sbar",
    "wbar",
    "sl2_identity_check",
    "principal_minor",
    "generalized_minor",
    "gauss_decompose",
    "bruhat_cell",
    "bruhat_factor_pos",
    "bruhat_factor_neg",
    "torus_conjugate",
]


# ----------------------------------------------------------------- scalars


def is_zero_scalar(x) -> bool:
    if isinstance(x, Jet):
        return not x.coeffs
    return x == 0


def is_invertible_scalar(x) -> bool:
    """Invertible in the scalar ring: nonzero rational / jet with invertible constant."""
    while isinstance(x, Jet):
        x = x.coeffs.get((), 0)
    return x != 0


def inv_scalar(x):
    if isinstance(x, Jet):
        return x.inverse()
    return Fraction(1, 1) / Fraction(x)


class Jet:
    """Polynomial in ``nvars`` formal directions truncated at total degree ``order``.

    ``coeffs`` maps sorted index tuples (monomials) to coefficients.  The
    empty tuple is the constant term.  Coefficients may be ints, Fractions,
    or Jets of a *different* algebra (nesting); jets of the same ``(nvars,
    order)`` signature combine coefficientwise.  Division requires the
    constant term to be invertible.
    """

    __slots__ = ("nvars", "order", "coeffs")

    def __init__(self, nvars: int, order: int, coeffs=None):
        self.nvars = nvars
        self.order = order
        self.coeffs = {}
        if coeffs:
            for mon, c in coeffs.items():
                if not is_zero_scalar(c):
                    self.coeffs[mon] = c

    # -- construction

    @staticmethod
    def const(nvars: int, order: int, value) -> "Jet":
        return Jet(nvars, order, {(): value})

    @staticmethod
    def variable(nvars: int, order: int, i: int, base=0) -> "Jet":
        """base + epsilon_i."""
        return Jet(nvars, order, {(): base, (i,): 1})

    # -- views

    def coeff(self, mon: Tuple[int, ...]):
        return self.coeffs.get(tuple(sorted(mon)), 0)

    @property
    def constant(self):
        return self.coeffs.get((), 0)

    def linear_part(self) -> Tuple:
        """Coefficients of epsilon_0 .. epsilon_{nvars-1}."""
        return tuple(self.coeffs.get((i,), 0) for i in range(self.nvars))

    # -- ring operations

    def _coerce(self, other) -> Optional["Jet"]:
        if isinstance(other, Jet):
            if other.nvars == self.nvars and other.order == self.order:
                return other
            raise TypeError("cannot mix jets from different algebras")
        return Jet.const(self.nvars, self.order, other)

    def __add__(self, other):
        o = self._coerce(other)
        out = dict(self.coeffs)
        for mon, c in o.coeffs.items():
            out[mon] = out.get(mon, 0) + c
        return Jet(self.nvars, self.order, out)

    __radd__ = __add__

    def __neg__(self):
        return Jet(self.nvars, self.order, {m: -c for m, c in self.coeffs.items()})

    def __sub__(self, other):
        return self + (-self._coerce(other))

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if not isinstance(other, Jet):
            if is_zero_scalar(other):
                return Jet(self.nvars, self.order, {})
            return Jet(
                self.nvars, self.order, {m: c * other for m, c in self.coeffs.items()}
            )
        o = self._coerce(other)
        out = {}
        order = self.order
        for m1, c1 in self.coeffs.items():
            for m2, c2 in o.coeffs.items():
                if len(m1) + len(m2) > order:
                    continue
                mon = tuple(sorted(m1 + m2))
                prod = c1 * c2
                out[mon] = out.get(mon, 0) + prod
        return Jet(self.nvars, self.order, out)

    __rmul__ = __mul__

    def inverse(self) -> "Jet":
        c0 = self.constant
        if not is_invertible_scalar(c0):
            raise ZeroDivisionError("jet has no inverse: constant term not invertible")
        inv0 = inv_scalar(c0) if isinstance(c0, Jet) else Fraction(1, 1) / Fraction(c0)
        # nested scalars stay wrapped as constants of this algebra, so the
        # geometric series below never mixes two jet algebras
        inv0 = Jet.const(self.nvars, self.order, inv0)
        # self * inv0 = 1 + n with n nilpotent; invert by the finite geometric series
        n = self * inv0 - 1
        acc = Jet.const(self.nvars, self.order, 1)
        term = Jet.const(self.nvars, self.order, 1)
        for _ in range(self.order):
            term = term * (-1) * n
            acc = acc + term
        return acc * inv0

    def __truediv__(self, other):
        if isinstance(other, Jet):
            return self * other.inverse()
        return self * (Fraction(1, 1) / Fraction(other))

    def __rtruediv__(self, other):
        return self.inverse() * other

    def __pow__(self, k: int):
        if k < 0:
            return self.inverse() ** (-k)
        result = Jet.const(self.nvars, self.order, 1)
        for _ in range(k):
            result = result * self
        return result

    def __eq__(self, other):
        if isinstance(other, Jet):
            if other.nvars != self.nvars or other.order != self.order:
                return NotImplemented
            keys = set(self.coeffs) | set(other.coeffs)
            return all(
                is_zero_scalar(self.coeffs.get(k, 0) - other.coeffs.get(k, 0))
                for k in keys
            )
        # compare against a scalar
        if not is_zero_scalar(self.coeffs.get((), 0) - other):
            return False
        return all(is_zero_scalar(c) for m, c in self.coeffs.items() if m != ())

    __hash__ = None  # jets are mutable-ish dict holders; never hash them

    def __repr__(self):
        if not self.coeffs:
            return "Jet(0)"
        parts = []
        for mon in sorted(self.coeffs, key=lambda m: (len(m), m)):
            c = self.coeffs[mon]
            name = "".join(f"e{i}" for i in mon) or "1"
            parts.append(f"{c}*{name}")
        return "Jet(" + " + ".join(parts) + ")"


# ------------------------------------------------------------ raw matrices
#
# The echelon/Gauss engines work on plain lists of lists of scalars so that
# jet-valued charts reuse the same code paths.  GroupElt wraps the results.


def mat_identity(n: int):
    return [[Fraction(1) if i == j else Fraction(0) for j in range(n)] for i in range(n)]


def mat_mul(A, B):
    n = len(A)
    m = len(B[0])
    k = len(B)
    return [
        [sum((A[i][t] * B[t][j] for t in range(k)), start=0) for j in range(m)]
        for i in range(n)
    ]


def mat_det(rows):
    """Determinant by minor expansion with memoization on column subsets.

    Division-free, so valid for jet entries (which have zero divisors).
    """
    n = len(rows)
    if n == 1:
        return rows[0][0]
    memo = {}

    def rec(cols):
        r = n - len(cols)
        if len(cols) == 1:
            return rows[r][cols[0]]
        if cols in memo:
            return memo[cols]
        total = None
        sign = 1
        for idx, c in enumerate(cols):
            term = rows[r][c] * rec(cols[:idx] + cols[idx + 1 :])
            if sign < 0:
                term = -term
            total = term if total is None else total + term
            sign = -sign
        memo[cols] = total
        return total

    return rec(tuple(range(n)))


def mat_inverse(rows):
    """Inverse of a square matrix over the scalar ring.

    Triangular matrices are inverted by substitution (the common case
    here); otherwise adjugate over determinant.
    """
    n = len(rows)
    lower = all(is_zero_scalar(rows[i][j]) for i in range(n) for j in range(i + 1, n))
    upper = all(is_zero_scalar(rows[i][j]) for j in range(n) for i in range(j + 1, n))
    if lower or upper:
        # solve rows @ X = I by substitution, filling X in pivot order
        X = [[Fraction(0)] * n for _ in range(n)]
        idxs = list(range(n - 1, -1, -1)) if upper else list(range(n))
        for col in range(n):
            for i in idxs:
                s = Fraction(1) if i == col else Fraction(0)
                if upper:
                    acc = sum(
                        (rows[i][j] * X[j][col] for j in range(i + 1, n)), start=0
                    )
                else:
                    acc = sum((rows[i][j] * X[j][col] for j in range(i)), start=0)
                X[i][col] = (s - acc) / rows[i][i]
        return X
    det = mat_det(rows)
    inv_det = inv_scalar(det)
    out = [[None] * n for _ in range(n)]
    for i in range(n):
        for j in range(n):
            sub = [
                [rows[a][b] for b in range(n) if b != i] for a in range(n) if a != j
            ]
            cof = mat_det(sub) if n > 1 else Fraction(1)
            if (i + j) % 2:
                cof = -cof
            out[i][j] = cof * inv_det
    return out


def _lower_left_rank(rows, i0, j1):
    """Rank of the submatrix rows i0.. x cols ..j1 (0-based, j1 exclusive)."""
    sub = [[Fraction(x) for x in row[:j1]] for row in rows[i0:]]
    rank = 0
    col = 0
    nr = len(sub)
    while rank < nr and col < j1:
        piv = next((i for i in range(rank, nr) if sub[i][col] != 0), None)
        if piv is None:
            col += 1
            continue
        sub[rank], sub[piv] = sub[piv], sub[rank]
        for i in range(rank + 1, nr):
            if sub[i][col] != 0:
                f = sub[i][col] / sub[rank][col]
                sub[i] = [a - f * b for a, b in zip(sub[i], sub[rank])]
        rank += 1
        col += 1
    return rank


# ------------------------------------------------------------- group types


class GroupElt:
    """An element of SL(size) over the scalar ring; immutable.

    Every construction checks det == 1 exactly, including jet entries (a
    curve of group elements has unit determinant as a jet identity).
    """

    __slots__ = ("rows",)

    def __init__(self, rows, check: bool = True):
        rows = tuple(tuple(_ratify(x) for x in row) for row in rows)
        object.__setattr__(self, "rows", rows)
        n = len(rows)
        if any(len(r) != n for r in rows):
            raise ValueError("matrix must be square")
        if check:
            d = mat_det([list(r) for r in rows])
            if not is_zero_scalar(d - 1):
                raise ValueError(f"determinant is not 1: {d}")

    @property
    def size(self) -> int:
        return len(self.rows)

    @property
    def rank(self) -> int:
        return self.size - 1

    @staticmethod
    def identity(size: int) -> "GroupElt":
        return GroupElt(mat_identity(size), check=False)

    def __getitem__(self, ij):
        i, j = ij
        return self.rows[i][j]

    def __matmul__(self, other: "GroupElt") -> "GroupElt":
        if self.size != other.size:
            raise ValueError("size mismatch")
        return GroupElt(mat_mul(self.rows, other.rows), check=False)

    def inverse(self) -> "GroupElt":
        return GroupElt(mat_inverse([list(r) for r in self.rows]), check=False)

    def __eq__(self, other):
        if not isinstance(other, GroupElt):
            return NotImplemented
        if self.size != other.size:
            return False
        return all(
            is_zero_scalar(self.rows[i][j] - other.rows[i][j])
            for i in range(self.size)
            for j in range(self.size)
        )

    # -- membership predicates

    def is_upper_triangular(self) -> bool:
        return all(
            is_zero_scalar(self.rows[i][j])
            for j in range(self.size)
            for i in range(j + 1, self.size)
        )

    def is_lower_triangular(self) -> bool:
        return all(
            is_zero_scalar(self.rows[i][j])
            for i in range(self.size)
            for j in range(i + 1, self.size)
        )

    def is_diagonal(self) -> bool:
        return self.is_upper_triangular() and self.is_lower_triangular()

    def is_upper_unitriangular(self) -> bool:
        return self.is_upper_triangular() and all(
            is_zero_scalar(self.rows[i][i] - 1) for i in range(self.size)
        )

    def is_lower_unitriangular(self) -> bool:
        return self.is_lower_triangular() and all(
            is_zero_scalar(self.rows[i][i] - 1) for i in range(self.size)
        )

    def __repr__(self):
        body = "; ".join(
            " ".join(str(x) for x in row) for row in self.rows
        )
        return f"GroupElt[{body}]"


def _ratify(x):
    if isinstance(x, int):
        return Fraction(x)
    return x


@dataclass(frozen=True)
class TorusElt:
    """Diagonal torus element, stored by its fundamental-weight values.

    ``vals[i]`` is the value of the (i+1)-th fundamental-weight character,
    i.e. the product of the first i+1 diagonal entries.  This makes the
    evaluation of any weight a monomial in the stored values.
    """

    rank: int
    vals: Tuple

    def __post_init__(self):
        if len(self.vals) != self.rank:
            raise ValueError("wrong number of character values")
        if not all(is_invertible_scalar(v) for v in self.vals):
            raise ValueError("torus character values must be invertible")
        object.__setattr__(
            self, "vals", tuple(_ratify(v) for v in self.vals)
        )

    @staticmethod
    def one(rank: int) -> "TorusElt":
        return TorusElt(rank, tuple(Fraction(1) for _ in range(rank)))

    @staticmethod
    def coroot(rank: int, alpha: int, z) -> "TorusElt":
        """The one-parameter coroot subgroup through alpha, evaluated at z."""
        if not 1 <= alpha <= rank:
            raise ValueError("bad simple index")
        return TorusElt(
            rank, tuple(z if i == alpha - 1 else Fraction(1) for i in range(rank))
        )

    @staticmethod
    def from_matrix(g: GroupElt) -> "TorusElt":
        if not g.is_diagonal():
            raise ValueError("not diagonal")
        vals = []
        acc = None
        for i in range(g.rank):
            acc = g.rows[i][i] if acc is None else acc * g.rows[i][i]
            vals.append(acc)
        return TorusElt(g.rank, tuple(vals))

    def diag_entries(self) -> Tuple:
        out = []
        prev = Fraction(1)
        for i in range(self.rank):
            out.append(self.vals[i] / prev)
            prev = self.vals[i]
        out.append(inv_scalar(self.vals[-1]) if self.rank else Fraction(1))
        return tuple(out)

    def to_matrix(self) -> GroupElt:
        d = self.diag_entries()
        n = self.rank + 1
        return GroupElt(
            [[d[i] if i == j else Fraction(0) for j in range(n)] for i in range(n)],
            check=False,
        )

    def char(self, weight: Sequence[int]):
        """Evaluate the character with the given fundamental-weight coordinates."""
        out = Fraction(1)
        for v, k in zip(self.vals, weight):
            if k:
                out = out * (v ** k if k > 0 else inv_scalar(v) ** (-k))
        return out

    def __mul__(self, other: "TorusElt") -> "TorusElt":
        return TorusElt(self.rank, tuple(a * b for a, b in zip(self.vals, other.vals)))

    def inverse(self) -> "TorusElt":
        return TorusElt(self.rank, tuple(inv_scalar(v) for v in self.vals))

    def __pow__(self, k: int) -> "TorusElt":
        t = TorusElt.one(self.rank)
        base = self if k >= 0 else self.inverse()
        for _ in range(abs(k)):
            t = t * base
        return t

    def __eq__(self, other):
        if not isinstance(other, TorusElt):
            return NotImplemented
        return self.rank == other.rank and all(
            is_zero_scalar(a - b) for a, b in zip(self.vals, other.vals)
        )

    def sqrt(self) -> "TorusElt":
        """The positive componentwise rational square root, when it exists."""
        out = []
        for i, v in enumerate(self.vals):
            r = rational_sqrt(v)
            if r is None:
                raise NoRationalSqrt(i + 1, v)
            out.append(r)
        return TorusElt(self.rank, tuple(out))


def rational_sqrt(x) -> Optional[Fraction]:
    x = Fraction(x)
    if x < 0:
        return None
    if x == 0:
        return Fraction(0)
    a, b = x.numerator, x.denominator
    ra, rb = isqrt(a), isqrt(b)
    if ra * ra == a and rb * rb == b:
        return Fraction(ra, rb)
    return None


def torus_conjugate(t: TorusElt, w: WeylElt) -> TorusElt:
    """The conjugate torus element, evaluating on weight m as t does on w(m)."""
    r = t.rank
    vals = []
    for a in range(1, r + 1):
        e = [0] * r
        e[a - 1] = 1
        vals.append(t.char(act_on_weight(w, e)))
    return TorusElt(r, tuple(vals))


# ----------------------------------------------------- standard generators


def one_param(rank: int, sign: int, alpha: int, z) -> GroupElt:
    """Root one-parameter element: identity plus z in the (alpha, alpha+1)
    slot for sign +1, or the transposed slot for sign -1."""
    if sign not in (+1, -1):
        raise ValueError("sign must be +1 or -1")
    if not 1 <= alpha <= rank:
        raise ValueError("bad simple index")
    n = rank + 1
    rows = mat_identity(n)
    if sign > 0:
        rows[alpha - 1][alpha] = z
    else:
        rows[alpha][alpha - 1] = z
    return GroupElt(rows, check=False)


def sbar(rank: int, alpha: int) -> GroupElt:
    one = Fraction(1)
    return (
        one_param(rank, +1, alpha, -one)
        @ one_param(rank, -1, alpha, one)
        @ one_param(rank, +1, alpha, -one)
    )


_WBAR_CACHE: dict = {}


def wbar(w: WeylElt) -> GroupElt:
    """The canonical unipotent-built representative of w, via any reduced word.

    The result does not depend on the chosen reduced word; we use the cached
    canonical one.
    """
    key = (w.rank, w.perm)
    got = _WBAR_CACHE.get(key)
    if got is None:
        got = GroupElt.identity(w.rank + 1)
        for i in w.word:
            got = got @ sbar(w.rank, i)
        _WBAR_CACHE[key] = got
    return got


def sl2_identity_check(rank: int, alpha: int, z) -> bool:
    """Rank-one factorization identity relating the two root directions:
    the negative one-parameter element at z equals
    x(1/z) * sbar * coroot(z) * x(1/z)."""
    if is_zero_scalar(z):
        raise ZeroDivisionError("z must be nonzero")
    zi = inv_scalar(z)
    lhs = one_param(rank, -1, alpha, z)
    rhs = (
        one_param(rank, +1, alpha, zi)
        @ sbar(rank, alpha)
        @ TorusElt.coroot(rank, alpha, z).to_matrix()
        @ one_param(rank, +1, alpha, zi)
    )
    return lhs == rhs


# ------------------------------------------------------------------ minors


def principal_minor(alpha: int, g: GroupElt):
    """Upper-left alpha x alpha minor (the fundamental-weight minor)."""
    if not 1 <= alpha <= g.size:
        raise ValueError("bad minor index")
    sub = [list(g.rows[i][:alpha]) for i in range(alpha)]
    return mat_det(sub)


def generalized_minor(u: WeylElt, v: WeylElt, alpha: int, g: GroupElt):
    """Minor twisted by a pair of Weyl chamber positions."""
    m = wbar(u).inverse() @ g @ wbar(v)
    return principal_minor(alpha, m)


# ----------------------------------------------------------- factorization


def gauss_decompose(g: GroupElt) -> Tuple[GroupElt, TorusElt, GroupElt]:
    """Triangular factorization g = n_minus * t * n_plus.

    Raises NotInBigCell(alpha) with the 1-based index of the first vanishing
    leading principal minor when the factorization does not exist.
    """
    n = g.size
    M = [list(row) for row in g.rows]
    L = mat_identity(n)
    pivots = []
    for k in range(n):
        piv = M[k][k]
        if not is_invertible_scalar(piv):
            raise NotInBigCell(k + 1)
        pivots.append(piv)
        for i in range(k + 1, n):
            if not is_zero_scalar(M[i][k]):
                f = M[i][k] / piv
                L[i][k] = f
                M[i] = [a - f * b for a, b in zip(M[i], M[k])]
    taus = []
    acc = None
    for k in range(n - 1):
        acc = pivots[k] if acc is None else acc * pivots[k]
        taus.append(acc)
    U = [[M[i][j] / pivots[i] for j in range(n)] for i in range(n)]
    return (
        GroupElt(L, check=False),
        TorusElt(n - 1, tuple(taus)),
        GroupElt(U, check=False),
    )


def g_zero(g: GroupElt) -> TorusElt:
    return gauss_decompose(g)[1]


def g_geq0(g: GroupElt) -> GroupElt:
    _, t, np = gauss_decompose(g)
    return t.to_matrix() @ np


def bruhat_cell(g: GroupElt) -> WeylElt:
    """Weyl chamber position of g, from ranks of lower-left submatrices.

    The image of column j is the row where the rank of the lower-left
    submatrix family jumps.
    """
    n = g.size
    rows = g.rows
    r = [[0] * (n + 1) for _ in range(n + 2)]
    for i in range(n, 0, -1):
        for j in range(1, n + 1):
            r[i][j] = _lower_left_rank(rows, i - 1, j)
    perm = [0] * n
    for j in range(1, n + 1):
        for i in range(1, n + 1):
            jump = r[i][j] - r[i + 1][j] - r[i][j - 1] + r[i + 1][j - 1]
            if jump == 1:
                perm[j - 1] = i
                break
        else:
            raise ValueError("no rank jump found; matrix is singular?")
    return WeylElt(n - 1, tuple(perm))


@dataclass(frozen=True)
class BruhatFactorization:
    """g = c * b with c in the canonical cell section and b upper triangular."""

    u: WeylElt
    c: GroupElt
    b: GroupElt


def _echelon_pos(M):
    """Column echelon under right multiplication by upper triangular matrices.

    Returns (pivot_rows, C) where C has, in column j, an invertible pivot at
    row pivot_rows[j], zeros at the pivot rows of earlier columns, and (for
    exact on-stratum input) zeros below each pivot.  Pivots are not yet
    normalized.  M is consumed.
    """
    n = len(M)
    pivot_rows = []
    for j in range(n):
        for k in range(j):
            p = pivot_rows[k]
            val = M[p][j]
            if not is_zero_scalar(val):
                f = val / M[p][k]
                for i in range(n):
                    M[i][j] = M[i][j] - f * M[i][k]
        piv = None
        for i in range(n - 1, -1, -1):
            if is_invertible_scalar(M[i][j]) and i not in pivot_rows:
                piv = i
                break
        if piv is None:
            raise ValueError("singular matrix in echelon")
        pivot_rows.append(piv)
    return pivot_rows, M


def bruhat_factor_pos(g: GroupElt) -> BruhatFactorization:
    """Factor g = c * b with b upper triangular and c the canonical section
    element of the chamber position of g (signed pivots, zeros below and
    right of pivots)."""
    n = g.size
    M = [list(row) for row in g.rows]
    pivot_rows, M = _echelon_pos(M)
    u = WeylElt(n - 1, tuple(p + 1 for p in pivot_rows))
    ub = wbar(u)
    for j, p in enumerate(pivot_rows):
        target = ub.rows[p][j]
        s = target / M[p][j]
        for i in range(n):
            M[i][j] = M[i][j] * s
    c = GroupElt(M, check=False)
    b = c.inverse() @ g
    return BruhatFactorization(u, c, b)


def bruhat_factor_neg(g: GroupElt) -> Tuple[GroupElt, WeylElt, GroupElt]:
    """Factor g = b_minus * c with b_minus lower triangular and c the
    canonical section element (rightmost-pivot echelon by row operations
    from above)."""
    n = g.size
    M = [list(row) for row in g.rows]
    pivot_cols = []
    for i in range(n):
        for k in range(i):
            q = pivot_cols[k]
            val = M[i][q]
            if not is_zero_scalar(val):
                f = val / M[k][q]
                M[i] = [a - f * b for a, b in zip(M[i], M[k])]
        piv = None
        for j in range(n - 1, -1, -1):
            if is_invertible_scalar(M[i][j]) and j not in pivot_cols:
                piv = j
                break
        if piv is None:
            raise ValueError("singular matrix in echelon")
        pivot_cols.append(piv)
    # v sends pivot column to its row index
    perm = [0] * n
    for i, q in enumerate(pivot_cols):
        perm[q] = i + 1
    v = WeylElt(n - 1, tuple(perm))
    vb = wbar(v)
    for i, q in enumerate(pivot_cols):
        target = vb.rows[i][q]
        s = target / M[i][q]
        M[i] = [a * s for a in M[i]]
    c = GroupElt(M, check=False)
    bm = g @ c.inverse()
    return bm, v, c


def in_cell_section(c: GroupElt, w: WeylElt) -> bool:
    """Membership in the canonical section of the w chamber position: both
    twisted triangularity conditions."""
    wb = wbar(w)
    return (c @ wb.inverse()).is_upper_unitriangular() and (
        wb.inverse() @ c
    ).is_lower_unitriangular()


def require_cell(g: GroupElt, w: WeylElt) -> None:
    actual = bruhat_cell(g)
    if actual != w:
        raise WrongCell(w, actual)
