"""K-normalised chains, relative homology and diagonals of contractible algebras."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Dict, Iterator, Optional, Tuple

from ..algebras import AlgebraPresentation, Bimodule, regular_bimodule
from ..diagrams import ConvolutionAlgebra
from ..exactlinalg import (ONE, ZERO, ColumnReducer, SparseMatrix, SubspaceBasis, Vector, _iadd,
                           solve_particular)
from .chains import ChainSpaceIndex, DegreeData, HochschildComplex, HomologyReport, check_resource
from .splitting import ConvolutionComplex


@dataclass(frozen=True)
class KAction:
    """Action of an algebra ``K`` (one matrix per basis element ``c``) on ``A`` and on ``M``.

    ``alg_left[c]`` is ``a -> c a``, ``alg_right[c]`` is ``a -> a c``; likewise on ``M``.
    """

    k_dim: int
    alg_left: Tuple[SparseMatrix, ...]
    alg_right: Tuple[SparseMatrix, ...]
    mod_left: Tuple[SparseMatrix, ...]
    mod_right: Tuple[SparseMatrix, ...]


def shape_K_action(C: ConvolutionAlgebra) -> KAction:
    """The symmetric action of the shape semigroup algebra on ``C`` and on itself as coefficients."""
    mats = tuple(C.shape_action_matrix(e) for e in C.shape.elements)
    return KAction(len(mats), mats, mats, mats, mats)


def scalar_K_action(A: AlgebraPresentation, M: Optional[Bimodule] = None) -> KAction:
    """``K = Q`` acting by scalars."""
    m = M.dim if M is not None else A.dim
    ia, im = (SparseMatrix.identity(A.dim),), (SparseMatrix.identity(m),)
    return KAction(1, ia, ia, im, im)


def normalizing_generators(A: AlgebraPresentation, M: Bimodule, K: KAction, n: int) -> Iterator[Vector]:
    """The three spanning families of ``N_n(K)`` over all basis choices."""
    D = A.dim
    sp = ChainSpaceIndex(D, M.dim, n)
    for c in range(K.k_dim):
        al = K.alg_left[c].columns()
        ar = K.alg_right[c].columns()
        ml = K.mod_left[c].columns()
        mr = K.mod_right[c].columns()
        for t in sp.tuples():
            x, a = t[0], t[1:]
            if n == 0:
                v: Vector = {}
                _iadd(v, mr[x], ONE)
                _iadd(v, ml[x], -ONE)
                if v:
                    yield v
                continue
            # x c (x) a_1 ... - x (x) c a_1 ...
            yield _diff([(0, mr[x]), ], [(1, al[a[0]])], t, sp)
            for j in range(1, n):
                yield _diff([(j, ar[a[j - 1]])], [(j + 1, al[a[j]])], t, sp)
            # ... (x) a_n c - c x (x) a_1 ...
            yield _diff([(n, ar[a[n - 1]])], [(0, ml[x])], t, sp)


def _diff(first, second, t, sp: ChainSpaceIndex) -> Vector:
    out: Vector = {}
    for sign, subs in ((ONE, first), (-ONE, second)):
        (pos, vec), = subs
        lst = list(t)
        for k, c in vec.items():
            lst[pos] = k
            idx = sp.index(lst)
            s = out.get(idx, ZERO) + sign * c
            if s:
                out[idx] = s
            else:
                del out[idx]
    return out


def normalized_subspace(A: AlgebraPresentation, M: Optional[Bimodule], K: KAction, n: int,
                        resource_limit: Optional[int] = None) -> SubspaceBasis:
    """Echelon basis of the subspace ``N_n(K)`` of ``C_n(A, M)``."""
    M = M if M is not None else regular_bimodule(A)
    check_resource(M.dim * A.dim ** n, resource_limit)
    return SubspaceBasis(M.dim * A.dim ** n, list(normalizing_generators(A, M, K, n)))


def _normalizer_reducer(A, M, K, n) -> ColumnReducer:
    red = ColumnReducer(M.dim * A.dim ** n)
    for v in normalizing_generators(A, M, K, n):
        if v:
            red.add(v)
    return red


def relative_betti(A: AlgebraPresentation, M: Optional[Bimodule], K: KAction, max_degree: int = 2,
                   resource_limit: Optional[int] = None) -> HomologyReport:
    """Betti numbers of the quotient complex ``C_n / N_n(K)``."""
    cx = HochschildComplex(A, M, resource_limit)
    M = cx.M
    check_resource(cx.dim(max_degree + 1), resource_limit)
    dimN: Dict[int, int] = {}
    rank_bar: Dict[int, int] = {-1: 0}
    for n in range(max_degree + 1):
        red = _normalizer_reducer(A, M, K, n)
        dimN[n] = red.rank
        for col in cx.d(n).columns():
            if col:
                red.add(col)
        rank_bar[n] = red.rank - dimN[n]
    report = HomologyReport("relative_homology")
    for n in range(max_degree + 1):
        qdim = cx.dim(n) - dimN[n]
        b = qdim - rank_bar[n] - rank_bar[n - 1]
        report.degrees.append(DegreeData(n, qdim, rank_bar[n], rank_bar[n - 1], b))
    report.verdicts["betti_nonnegative"] = all(d.betti >= 0 for d in report.degrees)
    return report


def boundary_preserves_normalized(A: AlgebraPresentation, M: Optional[Bimodule], K: KAction, n: int) -> bool:
    """``d_{n-1}(N_n) is contained in N_{n-1}``."""
    M = M if M is not None else regular_bimodule(A)
    cx = HochschildComplex(A, M)
    lower = _normalizer_reducer(A, M, K, n - 1)
    d = cx.d(n - 1)
    return all(lower.contains(d.apply(v)) for v in normalizing_generators(A, M, K, n))


def mu_normalises_check(C: ConvolutionAlgebra, n: int) -> bool:
    """Every basis image of ``id - mu_n`` lies in ``N_n`` for the shape action."""
    cc = ConvolutionComplex(C)
    red = _normalizer_reducer(C.algebra, regular_bimodule(C.algebra), shape_K_action(C), n)
    return all(red.contains(cc.pi(n, {j: ONE})) for j in range(cc.dim(n)))


# ---------------------------------------------------------------------------
# diagonals


def _diagonal_system(K: AlgebraPresentation) -> Tuple[SparseMatrix, Vector]:
    k = K.dim
    P = K.products
    nrows = k ** 3 + 2 * k * k
    left_off = k ** 3
    right_off = k ** 3 + k * k
    cols = []
    for i in range(k):
        for j in range(k):
            col: Vector = {}
            for x in range(k):
                base = x * k * k
                for q, c in P[x][i].items():
                    _iadd(col, {base + q * k + j: c}, ONE)
                for q, c in P[j][x].items():
                    _iadd(col, {base + i * k + q: c}, -ONE)
                for m, c in P[i][j].items():
                    for r, c2 in P[x][m].items():
                        _iadd(col, {left_off + x * k + r: c * c2}, ONE)
                    for r, c2 in P[m][x].items():
                        _iadd(col, {right_off + x * k + r: c * c2}, ONE)
            cols.append(col)
    rhs: Vector = {}
    for x in range(k):
        rhs[left_off + x * k + x] = ONE
        rhs[right_off + x * k + x] = ONE
    return SparseMatrix(nrows, k * k, cols, _trusted=True), rhs


def find_diagonal(K: AlgebraPresentation) -> Optional[Vector]:
    """A diagonal ``Delta`` in ``K (x) K`` (index ``i*dim + j`` for ``b_i (x) b_j``), or ``None``.

    Solves ``x Delta = Delta x`` and ``x pi(Delta) = x = pi(Delta) x`` for every
    basis element ``x``.
    """
    M, rhs = _diagonal_system(K)
    return solve_particular(M, rhs)


def verify_diagonal(K: AlgebraPresentation, delta: Vector) -> Dict[str, bool]:
    """Check both defining conditions of a diagonal independently of the solver."""
    k = K.dim
    central = True
    identity = True
    pi_delta: Vector = {}
    for idx, c in delta.items():
        i, j = divmod(idx, k)
        _iadd(pi_delta, K.products[i][j], c)
    for x in range(k):
        xd: Vector = {}
        dx: Vector = {}
        for idx, c in delta.items():
            i, j = divmod(idx, k)
            for q, c2 in K.products[x][i].items():
                _iadd(xd, {q * k + j: c * c2}, ONE)
            for q, c2 in K.products[j][x].items():
                _iadd(dx, {i * k + q: c * c2}, ONE)
        central &= xd == dx
        identity &= K.mul({x: ONE}, pi_delta) == {x: ONE} == K.mul(pi_delta, {x: ONE})
    return {"central": central, "product_is_identity": identity}


def product_of_diagonal(K: AlgebraPresentation, delta: Vector) -> Vector:
    out: Vector = {}
    for idx, c in delta.items():
        i, j = divmod(idx, K.dim)
        _iadd(out, K.products[i][j], c)
    return out
