"""Combinatorics of the type-A root system.

Weyl group elements are stored as permutations of ``{1, ..., rank+1}``
together with a cached canonical reduced word (the lexicographically
smallest one).  Weights live in the fundamental-weight basis, so a weight is
a length-``rank`` integer vector and the Weyl action is computed by passing
through the permutation realization.

The only linear algebra done here is over the integers: saturated kernels of
integer matrices, used to describe subtori of the maximal torus by the
sublattice of characters annihilating them.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Iterable, Iterator, Sequence, Tuple

__all__ = [
    "cartan_matrix",
    "WeylElt",
    "weyl_mul",
    "act_on_weight",
    "supp_sets",
    "fixed_character_lattice",
    "integer_kernel",
    "weight_matrix",
]


def cartan_matrix(rank: int) -> Tuple[Tuple[int, ...], ...]:
    """Cartan matrix of type A_rank: 2 on the diagonal, -1 next to it."""
    return tuple(
        tuple(2 if i == j else (-1 if abs(i - j) == 1 else 0) for j in range(rank))
        for i in range(rank)
    )


# Canonical reduced words, keyed by (rank, perm).  WeylElt is a frozen
# dataclass, so the cache lives at module level.
_WORD_CACHE: dict = {}


@dataclass(frozen=True)
class WeylElt:
    """A Weyl group element of type A_rank, i.e. a permutation of 1..rank+1.

    ``perm[i-1]`` is the image of ``i``.  Composition is composition of
    functions: ``(u * v)(i) = u(v(i))``, matching multiplication of the
    associated permutation matrices.
    """

    rank: int
    perm: Tuple[int, ...]

    def __post_init__(self):
        n = self.rank + 1
        if sorted(self.perm) != list(range(1, n + 1)):
            raise ValueError(f"not a permutation of 1..{n}: {self.perm}")

    # -- constructors ---------------------------------------------------

    @staticmethod
    def identity(rank: int) -> "WeylElt":
        return WeylElt(rank, tuple(range(1, rank + 2)))

    @staticmethod
    def simple(rank: int, i: int) -> "WeylElt":
        """The simple reflection s_i (1-based), the transposition (i, i+1)."""
        if not 1 <= i <= rank:
            raise ValueError(f"simple root index {i} out of range 1..{rank}")
        p = list(range(1, rank + 2))
        p[i - 1], p[i] = p[i], p[i - 1]
        return WeylElt(rank, tuple(p))

    @staticmethod
    def from_word(rank: int, word: Iterable[int]) -> "WeylElt":
        w = WeylElt.identity(rank)
        for i in word:
            w = weyl_mul(w, WeylElt.simple(rank, i))
        return w

    @staticmethod
    def longest(rank: int) -> "WeylElt":
        return WeylElt(rank, tuple(range(rank + 1, 0, -1)))

    # -- basic structure -------------------------------------------------

    def __call__(self, i: int) -> int:
        return self.perm[i - 1]

    @property
    def length(self) -> int:
        """Coxeter length = number of inversions of the permutation."""
        p = self.perm
        n = len(p)
        return sum(1 for i in range(n) for j in range(i + 1, n) if p[i] > p[j])

    def inverse(self) -> "WeylElt":
        inv = [0] * (self.rank + 1)
        for i, v in enumerate(self.perm):
            inv[v - 1] = i + 1
        return WeylElt(self.rank, tuple(inv))

    def is_identity(self) -> bool:
        return all(self.perm[i] == i + 1 for i in range(self.rank + 1))

    def left_descents(self) -> Tuple[int, ...]:
        """Indices i with length(s_i * w) < length(w)."""
        inv = self.inverse().perm
        return tuple(i for i in range(1, self.rank + 1) if inv[i - 1] > inv[i])

    @property
    def word(self) -> Tuple[int, ...]:
        """The lexicographically smallest reduced word, cached.

        Greedy: repeatedly strip the smallest left descent.  (A reduced word
        can start with i exactly when i is a left descent, so picking the
        smallest available first letter at every step yields the lex-min
        word.)
        """
        key = (self.rank, self.perm)
        cached = _WORD_CACHE.get(key)
        if cached is not None:
            return cached
        word = []
        w = self
        while True:
            ds = w.left_descents()
            if not ds:
                break
            i = ds[0]
            word.append(i)
            w = weyl_mul(WeylElt.simple(self.rank, i), w)
        result = tuple(word)
        _WORD_CACHE[key] = result
        return result

    def __mul__(self, other: "WeylElt") -> "WeylElt":
        return weyl_mul(self, other)

    def __repr__(self):
        if self.is_identity():
            return f"W{self.rank}(e)"
        return f"W{self.rank}({''.join(str(i) for i in self.word)})"


def weyl_mul(u: WeylElt, v: WeylElt) -> WeylElt:
    """Product u*v acting as u(v(x))."""
    if u.rank != v.rank:
        raise ValueError("rank mismatch")
    return WeylElt(u.rank, tuple(u.perm[v.perm[i] - 1] for i in range(u.rank + 1)))


def all_weyl(rank: int) -> Iterator[WeylElt]:
    """All elements of the Weyl group of type A_rank (size (rank+1)!)."""
    for p in itertools.permutations(range(1, rank + 2)):
        yield WeylElt(rank, p)


# -- weight lattice ------------------------------------------------------


def act_on_weight(w: WeylElt, weight: Sequence[int]) -> Tuple[int, ...]:
    """Apply w to a weight in fundamental-weight coordinates.

    Route: expand into the permutation (epsilon) basis of the diagonal
    character group modulo the determinant character, permute, convert back.
    """
    r = w.rank
    if len(weight) != r:
        raise ValueError(f"weight must have length {r}")
    # partial-sum expansion: coefficient of eps_j is sum of weight[j-1:]
    a = [sum(weight[j:]) for j in range(r)] + [0]
    b = [0] * (r + 1)
    for j in range(r + 1):
        b[w.perm[j] - 1] = a[j]
    return tuple(b[i] - b[i + 1] for i in range(r))


def weight_matrix(w: WeylElt) -> Tuple[Tuple[int, ...], ...]:
    """Matrix of the w-action on the weight lattice; column i is w(omega_i)."""
    r = w.rank
    cols = []
    for i in range(r):
        e = [0] * r
        e[i] = 1
        cols.append(act_on_weight(w, e))
    return tuple(tuple(cols[j][i] for j in range(r)) for i in range(r))


def supp_sets(ws) -> Tuple[Tuple[int, ...], Tuple[int, ...]]:
    """Support data of a sequence of Weyl elements (or a single one).

    Returns ``(supp, supp0)``: the sorted union of reduced-word letters of
    all entries and its complement in ``1..rank``.  ``supp0`` consists of
    exactly those simple indices whose fundamental weight every entry fixes.
    """
    if isinstance(ws, WeylElt):
        ws = (ws,)
    ws = tuple(ws)
    if not ws:
        raise ValueError("empty sequence")
    rank = ws[0].rank
    used = set()
    for w in ws:
        if w.rank != rank:
            raise ValueError("mixed ranks")
        used.update(w.word)
    supp = tuple(sorted(used))
    supp0 = tuple(i for i in range(1, rank + 1) if i not in used)
    return supp, supp0


# -- integer linear algebra ----------------------------------------------


def integer_kernel(mat: Sequence[Sequence[int]]) -> Tuple[Tuple[int, ...], ...]:
    """Basis of the saturated kernel {x in Z^n : mat @ x = 0}.

    Unimodular column reduction (Hermite-style): sweep the rows top to
    bottom, each time using gcd steps to concentrate the row's support in
    one active column, which is then retired.  The never-retired columns of
    the accumulated unimodular matrix form a basis of the kernel; since they
    extend to a basis of Z^n, the kernel is saturated.
    """
    m = len(mat)
    n = len(mat[0]) if m else 0
    A = [list(row) for row in mat]
    U = [[1 if i == j else 0 for j in range(n)] for i in range(n)]

    def colop(j, k, q):  # col_j -= q * col_k
        for i in range(m):
            A[i][j] -= q * A[i][k]
        for i in range(n):
            U[i][j] -= q * U[i][k]

    def colswap(j, k):
        if j == k:
            return
        for i in range(m):
            A[i][j], A[i][k] = A[i][k], A[i][j]
        for i in range(n):
            U[i][j], U[i][k] = U[i][k], U[i][j]

    lead = 0
    for row in range(m):
        if lead >= n:
            break
        while True:
            nz = [j for j in range(lead, n) if A[row][j] != 0]
            if not nz:
                break
            p = min(nz, key=lambda j: abs(A[row][j]))
            colswap(lead, p)
            for j in range(lead + 1, n):
                q = A[row][j] // A[row][lead]
                if q:
                    colop(j, lead, q)
            if all(A[row][j] == 0 for j in range(lead + 1, n)):
                lead += 1
                break
    return tuple(tuple(U[i][j] for i in range(n)) for j in range(lead, n))


def fixed_character_lattice(w: WeylElt) -> Tuple[Tuple[int, ...], ...]:
    """Basis of the w-fixed characters: ker(M_w - 1) on the weight lattice.

    This lattice annihilates the subtorus {a * (a^{-1} conjugated by w)},
    so membership in that subtorus is tested by evaluating these characters.
    """
    r = w.rank
    M = weight_matrix(w)
    A = [[M[i][j] - (1 if i == j else 0) for j in range(r)] for i in range(r)]
    return integer_kernel(A)
