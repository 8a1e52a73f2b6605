"""Finite-dimensional associative algebras over Q with a distinguished basis.

Structure constants are stored as ``products[i][j]``, the sparse coordinate
vector of ``b_i * b_j``.  Units are optional and never assumed downstream.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Mapping, Optional, Sequence, Tuple

from .errors import DimensionMismatch, InvalidDiagram
from .exactlinalg import (
    ONE,
    Q,
    SparseMatrix,
    Vector,
    l1_operator_norm,
    solve_particular,
    to_rational,
)
from .semigroups import FiniteSemigroup

Products = Tuple[Tuple[Vector, ...], ...]


def _freeze_vec(v: Mapping[int, object]) -> Vector:
    return {int(k): to_rational(a) for k, a in v.items() if to_rational(a)}


class AlgebraPresentation:
    """Associative algebra on basis ``b_0..b_{dim-1}``."""

    def __init__(self, basis_labels: Sequence[str], products: Sequence[Sequence[Mapping[int, object]]],
                 unit: Optional[Mapping[int, object]] = None, *, check: bool = True,
                 find_unit: bool = True):
        self.basis_labels: Tuple[str, ...] = tuple(str(x) for x in basis_labels)
        d = len(self.basis_labels)
        if len(products) != d or any(len(row) != d for row in products):
            raise DimensionMismatch("structure constants must be a dim x dim array of vectors")
        self.products: Products = tuple(tuple(_freeze_vec(v) for v in row) for row in products)
        for row in self.products:
            for v in row:
                if any(not 0 <= k < d for k in v):
                    raise DimensionMismatch("structure constant index out of range")
        if check:
            bad = self.associativity_violation()
            if bad is not None:
                raise InvalidDiagram(f"structure constants not associative at basis triple {bad}")
        if unit is not None:
            unit = _freeze_vec(unit)
            if not self.is_unit(unit):
                raise InvalidDiagram("declared unit is not a two-sided identity")
        elif find_unit:
            unit = self.solve_unit()
        self.unit: Optional[Vector] = unit
        self._key = None

    @property
    def dim(self) -> int:
        return len(self.basis_labels)

    def __repr__(self) -> str:
        return f"AlgebraPresentation(dim={self.dim}, unital={self.unit is not None})"

    def key(self):
        """Hashable content key (labels excluded)."""
        if self._key is None:
            self._key = tuple(tuple(tuple(sorted(v.items())) for v in row) for row in self.products)
        return self._key

    def __eq__(self, other) -> bool:
        return isinstance(other, AlgebraPresentation) and self.key() == other.key()

    def __hash__(self):
        return hash(self.key())

    # arithmetic
    def mul(self, u: Mapping[int, Q], v: Mapping[int, Q]) -> Vector:
        out: Vector = {}
        P = self.products
        for i, a in u.items():
            Pi = P[i]
            for j, b in v.items():
                ab = a * b
                for k, c in Pi[j].items():
                    s = out.get(k, 0) + ab * c
                    if s:
                        out[k] = s
                    else:
                        out.pop(k, None)
        return out

    def left_matrix(self, u: Mapping[int, Q]) -> SparseMatrix:
        """Matrix of ``x -> u x``."""
        return SparseMatrix(self.dim, self.dim, [self.mul(u, {j: ONE}) for j in range(self.dim)], _trusted=True)

    def right_matrix(self, u: Mapping[int, Q]) -> SparseMatrix:
        """Matrix of ``x -> x u``."""
        return SparseMatrix(self.dim, self.dim, [self.mul({j: ONE}, u) for j in range(self.dim)], _trusted=True)

    def associativity_violation(self) -> Optional[Tuple[int, int, int]]:
        d = self.dim
        for i in range(d):
            for j in range(d):
                ij = self.products[i][j]
                for k in range(d):
                    if self.mul(ij, {k: ONE}) != self.mul({i: ONE}, self.products[j][k]):
                        return (i, j, k)
        return None

    def is_unit(self, u: Mapping[int, Q]) -> bool:
        return all(self.mul(u, {x: ONE}) == {x: ONE} == self.mul({x: ONE}, u) for x in range(self.dim))

    def solve_unit(self) -> Optional[Vector]:
        """Two-sided identity found by solving ``u b_x = b_x = b_x u``."""
        d = self.dim
        if d == 0:
            return {}
        # unknown u_k; equations indexed by (side, x, coordinate)
        cols = []
        for k in range(d):
            col = {}
            for x in range(d):
                for c, v in self.products[k][x].items():
                    col[(0 * d + x) * d + c] = v
                for c, v in self.products[x][k].items():
                    col[(1 * d + x) * d + c] = v
            cols.append(col)
        M = SparseMatrix(2 * d * d, d, cols, _trusted=True)
        rhs = {}
        for x in range(d):
            rhs[x * d + x] = ONE
            rhs[(d + x) * d + x] = ONE
        u = solve_particular(M, rhs)
        if u is None or not self.is_unit(u):
            return None
        return u

    def is_commutative(self) -> bool:
        d = self.dim
        return all(self.products[i][j] == self.products[j][i] for i in range(d) for j in range(i + 1, d))

    def commutator_space_dim(self) -> int:
        """Dimension of span{ab - ba}."""
        from .exactlinalg import rank
        d = self.dim
        cols = []
        for i in range(d):
            for j in range(i + 1, d):
                v = dict(self.products[i][j])
                for k, c in self.products[j][i].items():
                    s = v.get(k, 0) - c
                    if s:
                        v[k] = s
                    else:
                        v.pop(k, None)
                if v:
                    cols.append(v)
        if not cols:
            return 0
        return rank(SparseMatrix(d, len(cols), cols, _trusted=True))


def scalar_algebra(label: str = "1") -> AlgebraPresentation:
    """The one-dimensional algebra Q."""
    return AlgebraPresentation([label], [[{0: 1}]], unit={0: 1})


def semigroup_algebra(S: FiniteSemigroup) -> AlgebraPresentation:
    """Q[S] with ``e_x e_y = e_{xy}``.

    The unit is ``e_1`` when ``S`` is a monoid; otherwise it is looked for by a
    linear solve (finite semilattice algebras are unital without an identity
    element, e.g. ``e_{1} + e_{2} - e_{1,2}`` for two generators).
    """
    S = getattr(S, "underlying", S)
    n = len(S)
    products = [[{S.table[x][y]: ONE} for y in range(n)] for x in range(n)]
    e = S.identity()
    if e is not None:
        return AlgebraPresentation(S.labels, products, unit={e: ONE}, check=False)
    return AlgebraPresentation(S.labels, products, check=False)


@dataclass(frozen=True)
class HomVerdict:
    multiplicative: bool
    unital: Optional[bool]
    norm: Q
    contractive: bool
    failure: Optional[Tuple[int, int]] = None

    @property
    def ok(self) -> bool:
        return self.multiplicative


@dataclass(frozen=True)
class AlgebraHom:
    source: AlgebraPresentation
    target: AlgebraPresentation
    matrix: SparseMatrix

    def __post_init__(self):
        if self.matrix.shape != (self.target.dim, self.source.dim):
            raise DimensionMismatch(
                f"matrix shape {self.matrix.shape} does not match {self.target.dim} x {self.source.dim}")

    def apply(self, v: Mapping[int, Q]) -> Vector:
        return self.matrix.apply(v)

    @property
    def contractive(self) -> bool:
        return l1_operator_norm(self.matrix) <= 1


def validate_hom(h: AlgebraHom) -> HomVerdict:
    """Multiplicativity on all basis pairs, unitality when both units exist, and the l1 norm."""
    A, B, M = h.source, h.target, h.matrix
    if M.shape != (B.dim, A.dim):
        raise DimensionMismatch("homomorphism matrix has the wrong shape")
    failure = None
    cols = M.columns()
    for i in range(A.dim):
        for j in range(A.dim):
            if M.apply(A.products[i][j]) != B.mul(cols[i], cols[j]):
                failure = (i, j)
                break
        if failure:
            break
    unital = None
    if A.unit is not None and B.unit is not None:
        unital = M.apply(A.unit) == B.unit
    norm = l1_operator_norm(M)
    return HomVerdict(failure is None, unital, norm, norm <= 1, failure)


def identity_hom(A: AlgebraPresentation) -> AlgebraHom:
    return AlgebraHom(A, A, SparseMatrix.identity(A.dim))


def semigroup_hom_matrix(source: FiniteSemigroup, target: FiniteSemigroup, mapping: Sequence[int]) -> SparseMatrix:
    """Matrix of the algebra map ``e_x -> e_{mapping[x]}``."""
    return SparseMatrix(len(target), len(source), [{mapping[x]: ONE} for x in range(len(source))], _trusted=True)


# ---------------------------------------------------------------------------
# bimodules


@dataclass(frozen=True)
class Bimodule:
    """Bimodule of dimension ``dim`` over an algebra; actions given per basis element.

    ``left[i]`` is the matrix of ``m -> b_i m`` and ``right[i]`` of ``m -> m b_i``.
    """

    algebra: AlgebraPresentation
    dim: int
    left: Tuple[SparseMatrix, ...]
    right: Tuple[SparseMatrix, ...]
    labels: Tuple[str, ...] = field(default=())

    def left_action(self, a: Mapping[int, Q]) -> SparseMatrix:
        return _combine(self.dim, self.left, a)

    def right_action(self, a: Mapping[int, Q]) -> SparseMatrix:
        return _combine(self.dim, self.right, a)

    def basis_labels(self) -> Tuple[str, ...]:
        return self.labels or tuple(f"m{i}" for i in range(self.dim))

    def axiom_violation(self) -> Optional[str]:
        A = self.algebra
        if len(self.left) != A.dim or len(self.right) != A.dim:
            return "one action matrix per algebra basis element is required"
        for mats in (self.left, self.right):
            for m in mats:
                if m.shape != (self.dim, self.dim):
                    return "action matrix has the wrong shape"
        for i in range(A.dim):
            for j in range(A.dim):
                prod = A.products[i][j]
                if self.left_action(prod) != self.left[i] @ self.left[j]:
                    return f"left action not multiplicative at ({i}, {j})"
                if self.right_action(prod) != self.right[j] @ self.right[i]:
                    return f"right action not multiplicative at ({i}, {j})"
                if self.left[i] @ self.right[j] != self.right[j] @ self.left[i]:
                    return f"actions do not commute at ({i}, {j})"
        return None

    def validate(self) -> "Bimodule":
        msg = self.axiom_violation()
        if msg:
            raise InvalidDiagram(msg)
        return self


def _combine(dim: int, mats: Sequence[SparseMatrix], a: Mapping[int, Q]) -> SparseMatrix:
    out = SparseMatrix.zeros(dim, dim)
    for i, c in a.items():
        out = out + mats[i].scale(c)
    return out


def regular_bimodule(A: AlgebraPresentation) -> Bimodule:
    left = tuple(A.left_matrix({i: ONE}) for i in range(A.dim))
    right = tuple(A.right_matrix({i: ONE}) for i in range(A.dim))
    return Bimodule(A, A.dim, left, right, A.basis_labels)


def dual_bimodule(M: Bimodule) -> Bimodule:
    """Dual module: left action is the transpose of the right action and vice versa."""
    return Bimodule(M.algebra, M.dim,
                    tuple(r.transpose() for r in M.right),
                    tuple(l.transpose() for l in M.left),
                    tuple(f"{x}'" for x in M.basis_labels()))


def character_bimodule(A: AlgebraPresentation, values: Sequence[object]) -> Bimodule:
    """One-dimensional symmetric bimodule ``a.x = x.a = chi(a) x`` for a character chi."""
    vals = [to_rational(v) for v in values]
    if len(vals) != A.dim:
        raise DimensionMismatch("one character value per basis element")
    for i in range(A.dim):
        for j in range(A.dim):
            lhs = sum((c * vals[k] for k, c in A.products[i][j].items()), Q(0))
            if lhs != vals[i] * vals[j]:
                raise InvalidDiagram(f"values are not multiplicative at ({i}, {j})")
    mats = tuple(SparseMatrix(1, 1, [{0: v} if v else {}], _trusted=True) for v in vals)
    return Bimodule(A, 1, mats, mats, ("x",))


def symmetric_bimodule_check(M: Bimodule) -> bool:
    return all(l == r for l, r in zip(M.left, M.right))
