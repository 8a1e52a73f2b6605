"""Hochschild chain and cochain complexes with bimodule coefficients.

``C_n(A, M) = M (x) A^{(x) n}`` with basis tuples ``(m, a_1, ..., a_n)`` enumerated
lexicographically, coefficient index most significant.  ``d_n`` maps
``C_{n+1} -> C_n``; ``d_{-1}`` is zero.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Dict, List, Mapping, Optional, Sequence, Tuple

from ..algebras import AlgebraPresentation, Bimodule, regular_bimodule
from ..errors import IndexOutOfRange, ResourceBound
from ..exactlinalg import ONE, ZERO, Q, SparseMatrix, Vector, rank

DEFAULT_RESOURCE_LIMIT = 5_000_000


@dataclass(frozen=True)
class ChainSpaceIndex:
    """Mixed-radix enumeration of ``C_n(A, M)``."""

    algebra_dim: int
    module_dim: int
    degree: int

    @property
    def dim(self) -> int:
        return self.module_dim * self.algebra_dim ** self.degree

    def index(self, t: Sequence[int]) -> int:
        D = self.algebra_dim
        idx = t[0]
        for a in t[1:]:
            idx = idx * D + a
        return idx

    def decode(self, idx: int) -> Tuple[int, ...]:
        D = self.algebra_dim
        out = []
        for _ in range(self.degree):
            idx, r = divmod(idx, D)
            out.append(r)
        out.append(idx)
        return tuple(reversed(out))

    def tuples(self):
        return itertools.product(range(self.module_dim), *[range(self.algebra_dim)] * self.degree)


def check_resource(n_elements: int, limit: Optional[int]) -> None:
    if limit is None:
        limit = DEFAULT_RESOURCE_LIMIT
    if n_elements > limit:
        raise ResourceBound(f"chain space with {n_elements} basis tensors exceeds limit {limit}")


def _radix_weights(D: int, n: int) -> List[int]:
    """Weights of positions 0..n in a tuple of length n+1 (position 0 most significant)."""
    return [D ** (n - p) for p in range(n + 1)]


def face_map(A: AlgebraPresentation, M: Bimodule, n: int, i: int) -> SparseMatrix:
    """Matrix of the ``i``-th face ``C_{n+1} -> C_n``."""
    if not 0 <= i <= n + 1:
        raise IndexOutOfRange(f"face index {i} outside 0..{n + 1}")
    return _faces_matrix(A, M, n, {i: ONE})


def boundary(A: AlgebraPresentation, M: Bimodule, n: int) -> SparseMatrix:
    """``d_n = sum_j (-1)^j face_j`` from ``C_{n+1}`` to ``C_n``."""
    if n < 0:
        return SparseMatrix.zeros(0, M.dim)
    return _faces_matrix(A, M, n, {j: (ONE if j % 2 == 0 else -ONE) for j in range(n + 2)})


def _faces_matrix(A: AlgebraPresentation, M: Bimodule, n: int, signs: Mapping[int, Q]) -> SparseMatrix:
    D = A.dim
    src = ChainSpaceIndex(D, M.dim, n + 1)
    tgt = ChainSpaceIndex(D, M.dim, n)
    w = _radix_weights(D, n)  # target weights for positions 0..n
    right = [m.columns() for m in M.right]  # right[a][m] = m.a
    left = [m.columns() for m in M.left]    # left[a][m] = a.m
    P = A.products
    cols = []
    for t in src.tuples():
        col: Vector = {}

        def put(k: int, c) -> None:
            s = col.get(k, ZERO) + c
            if s:
                col[k] = s
            else:
                del col[k]

        m = t[0]
        a = t[1:]
        for j, sgn in signs.items():
            if j == 0:
                rest = 0
                for p in range(1, n + 1):
                    rest += a[p] * w[p]
                for k, c in right[a[0]][m].items():
                    put(k * w[0] + rest, sgn * c)
            elif j == n + 1:
                rest = 0
                for p in range(1, n + 1):
                    rest += a[p - 1] * w[p]
                for k, c in left[a[n]][m].items():
                    put(k * w[0] + rest, sgn * c)
            else:
                # merge a_j a_{j+1} (1-based), landing at target position j
                base = m * w[0]
                for p in range(1, j):
                    base += a[p - 1] * w[p]
                for p in range(j + 1, n + 1):
                    base += a[p] * w[p]
                for k, c in P[a[j - 1]][a[j]].items():
                    put(base + k * w[j], sgn * c)
        cols.append(col)
    return SparseMatrix(tgt.dim, src.dim, cols, _trusted=True)


class HochschildComplex:
    """Lazily built boundary matrices and ranks of ``C_*(A, M)``."""

    def __init__(self, A: AlgebraPresentation, M: Optional[Bimodule] = None,
                 resource_limit: Optional[int] = None):
        self.A = A
        self.M = M if M is not None else regular_bimodule(A)
        self.resource_limit = resource_limit
        self._d: Dict[int, SparseMatrix] = {}
        self._rank: Dict[int, int] = {}

    def space(self, n: int) -> ChainSpaceIndex:
        return ChainSpaceIndex(self.A.dim, self.M.dim, n)

    def dim(self, n: int) -> int:
        return self.space(n).dim if n >= 0 else 0

    def d(self, n: int) -> SparseMatrix:
        if n < 0:
            return SparseMatrix.zeros(0, self.dim(0))
        if n not in self._d:
            check_resource(self.dim(n + 1), self.resource_limit)
            self._d[n] = boundary(self.A, self.M, n)
        return self._d[n]

    def rank_d(self, n: int) -> int:
        if n < 0:
            return 0
        if n not in self._rank:
            self._rank[n] = rank(self.d(n))
        return self._rank[n]


@dataclass
class DegreeData:
    degree: int
    dim: int
    rank_in: int    # rank d_n (image in C_n)
    rank_out: int   # rank d_{n-1}
    betti: int


@dataclass
class HomologyReport:
    kind: str
    degrees: List[DegreeData] = field(default_factory=list)
    verdicts: Dict[str, bool] = field(default_factory=dict)
    norms: Dict[str, Q] = field(default_factory=dict)
    notes: List[str] = field(default_factory=list)

    @property
    def betti_numbers(self) -> List[int]:
        return [d.betti for d in self.degrees]

    def as_dict(self) -> dict:
        from ..exactlinalg import rational_str
        return {
            "kind": self.kind,
            "betti": self.betti_numbers,
            "degrees": [
                {"degree": d.degree, "dim": d.dim, "rank_d_n": d.rank_in,
                 "rank_d_n_minus_1": d.rank_out, "betti": d.betti}
                for d in self.degrees
            ],
            "verdicts": {k: ("PASS" if v else "FAIL") for k, v in sorted(self.verdicts.items())},
            "norms": {k: rational_str(v) for k, v in sorted(self.norms.items())},
            "notes": list(self.notes),
        }


def betti(A: AlgebraPresentation, M: Optional[Bimodule] = None, max_degree: int = 2,
          resource_limit: Optional[int] = None, complex: Optional[HochschildComplex] = None) -> HomologyReport:
    """Exact Betti numbers of ``H_n(A, M)`` for ``n = 0..max_degree``."""
    cx = complex if complex is not None else HochschildComplex(A, M, resource_limit)
    check_resource(cx.dim(max_degree + 1), resource_limit)
    report = HomologyReport("homology")
    for n in range(max_degree + 1):
        r_in, r_out = cx.rank_d(n), cx.rank_d(n - 1)
        b = cx.dim(n) - r_in - r_out
        report.degrees.append(DegreeData(n, cx.dim(n), r_in, r_out, b))
    report.verdicts["betti_nonnegative"] = all(d.betti >= 0 for d in report.degrees)
    return report


# ---------------------------------------------------------------------------
# cochains


def coboundary(A: AlgebraPresentation, X: Bimodule, n: int) -> SparseMatrix:
    """``delta^n : C^n(A, X) -> C^{n+1}(A, X)`` with ``C^n = Hom(A^{(x) n}, X)``.

    Coordinates of a cochain are indexed like chains: ``(x, a_1..a_n)`` is the
    coefficient of ``e_x`` in ``phi(a_1, ..., a_n)``.
    """
    D = A.dim
    src = ChainSpaceIndex(D, X.dim, n)
    tgt = ChainSpaceIndex(D, X.dim, n + 1)
    left = [m.columns() for m in X.left]
    right = [m.columns() for m in X.right]
    # preimages of the product: k -> [(p, q, coeff)] with b_p b_q having coeff at b_k
    pre: List[List[Tuple[int, int, Q]]] = [[] for _ in range(D)]
    for p in range(D):
        for q in range(D):
            for k, c in A.products[p][q].items():
                pre[k].append((p, q, c))
    cols = []
    for t in src.tuples():
        x, c = t[0], t[1:]
        col: Vector = {}

        def put(tup, v) -> None:
            k = tgt.index(tup)
            s = col.get(k, ZERO) + v
            if s:
                col[k] = s
            else:
                del col[k]

        for a in range(D):
            for y, v in left[a][x].items():
                put((y, a) + c, v)
        for i in range(1, n + 1):
            sgn = ONE if i % 2 == 0 else -ONE
            for p, q, v in pre[c[i - 1]]:
                put((x,) + c[:i - 1] + (p, q) + c[i:], sgn * v)
        sgn = ONE if (n + 1) % 2 == 0 else -ONE
        for a in range(D):
            for y, v in right[a][x].items():
                put((y,) + c + (a,), sgn * v)
        cols.append(col)
    return SparseMatrix(tgt.dim, src.dim, cols, _trusted=True)


def cohomology_betti(A: AlgebraPresentation, X: Bimodule, max_degree: int = 2,
                     resource_limit: Optional[int] = None) -> HomologyReport:
    """Betti numbers of ``H^n(A, X)``, ``n = 0..max_degree``.

    With ``X = dual_bimodule(M)`` this is the transposed chain complex of ``(A, M)``.
    """
    check_resource(X.dim * A.dim ** (max_degree + 1), resource_limit)
    ranks = {-1: 0}
    for n in range(max_degree + 1):
        ranks[n] = rank(coboundary(A, X, n))
    report = HomologyReport("cohomology")
    for n in range(max_degree + 1):
        dim = X.dim * A.dim ** n
        b = dim - ranks[n] - ranks[n - 1]
        report.degrees.append(DegreeData(n, dim, ranks[n], ranks[n - 1], b))
    report.verdicts["betti_nonnegative"] = all(d.betti >= 0 for d in report.degrees)
    return report
