"""Semilattice diagrams of algebras and their convolution algebras.

The global basis of a convolution algebra lists blocks in the shape's element
order and, inside a block, the local basis in presentation order.  Every
matrix built downstream relies on this ordering.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Dict, List, Mapping, Optional, Sequence, Tuple

from .algebras import (
    AlgebraHom,
    AlgebraPresentation,
    scalar_algebra,
    semigroup_algebra,
    semigroup_hom_matrix,
    validate_hom,
)
from .errors import InvalidDiagram, NotAGroup
from .exactlinalg import ONE, ZERO, Q, SparseMatrix, Vector
from .semigroups import (
    DecompositionData,
    FiniteSemilattice,
    chain_semilattice,
    semilattice_hom_check,
)


class SemilatticeDiagram:
    """Shape ``L``, an algebra per element and transitions ``phi[(f, e)]`` for ``f <= e``."""

    def __init__(self, shape: FiniteSemilattice, algebras: Sequence[AlgebraPresentation],
                 transitions: Mapping[Tuple[int, int], SparseMatrix], *, check: bool = True):
        self.shape = shape
        self.algebras: Tuple[AlgebraPresentation, ...] = tuple(algebras)
        self.transitions: Dict[Tuple[int, int], SparseMatrix] = dict(transitions)
        self._key = None
        if check:
            self.validate()

    def phi(self, f: int, e: int) -> SparseMatrix:
        return self.transitions[(f, e)]

    def validate(self) -> None:
        L = self.shape
        if len(self.algebras) != len(L):
            raise InvalidDiagram("one algebra per shape element is required")
        lab = L.labels
        for f, e in L.comparable_pairs():
            if (f, e) not in self.transitions:
                raise InvalidDiagram(f"missing transition {lab[f]}<{lab[e]}")
        for (f, e), m in self.transitions.items():
            if not L.leq(f, e):
                raise InvalidDiagram(f"transition {lab[f]}<{lab[e]} given but {lab[f]} is not below {lab[e]}")
            if m.shape != (self.algebras[f].dim, self.algebras[e].dim):
                raise InvalidDiagram(f"transition {lab[f]}<{lab[e]} has shape {m.shape}")
        for e in L.elements:
            if self.transitions[(e, e)] != SparseMatrix.identity(self.algebras[e].dim):
                raise InvalidDiagram(f"transition at {lab[e]} is not the identity")
        for (f, e), m in self.transitions.items():
            v = validate_hom(AlgebraHom(self.algebras[e], self.algebras[f], m))
            if not v.multiplicative:
                raise InvalidDiagram(f"transition {lab[f]}<{lab[e]} is not multiplicative")
        for g, f in L.comparable_pairs():
            for e in L.elements:
                if L.leq(f, e) and self.transitions[(g, f)] @ self.transitions[(f, e)] != self.transitions[(g, e)]:
                    raise InvalidDiagram(
                        f"transitions do not compose along {lab[e]} >= {lab[f]} >= {lab[g]}")

    def key(self):
        """Content key: shape table, fibre structure constants and transitions."""
        if self._key is None:
            self._key = (
                self.shape.table,
                tuple(A.key() for A in self.algebras),
                tuple(sorted((fe, m.key()) for fe, m in self.transitions.items())),
            )
        return self._key

    def contractivity(self) -> Dict[Tuple[int, int], Q]:
        from .exactlinalg import l1_operator_norm
        return {fe: l1_operator_norm(m) for fe, m in self.transitions.items()}

    def __repr__(self) -> str:
        dims = [A.dim for A in self.algebras]
        return f"SemilatticeDiagram(shape={list(self.shape.labels)}, dims={dims})"


@dataclass
class ConvolutionAlgebra:
    diagram: SemilatticeDiagram
    algebra: AlgebraPresentation
    offsets: Tuple[int, ...]
    block_of: Tuple[Tuple[int, int], ...]  # global index -> (shape element, local index)

    @property
    def dim(self) -> int:
        return self.algebra.dim

    @property
    def shape(self) -> FiniteSemilattice:
        return self.diagram.shape

    def base(self, g: int) -> int:
        return self.block_of[g][0]

    def inclusion(self, e: int) -> SparseMatrix:
        """Matrix of the block inclusion of ``A_e``."""
        off = self.offsets[e]
        d = self.diagram.algebras[e].dim
        return SparseMatrix(self.dim, d, [{off + i: ONE} for i in range(d)], _trusted=True)

    def include(self, e: int, v: Mapping[int, Q]) -> Vector:
        off = self.offsets[e]
        return {off + i: a for i, a in v.items()}

    def block_range(self, e: int) -> range:
        return range(self.offsets[e], self.offsets[e] + self.diagram.algebras[e].dim)

    def shape_action(self, e: int, v: Mapping[int, Q]) -> Vector:
        """``e . v`` for the symmetric l1(L)-action, extended linearly."""
        out: Vector = {}
        D = self.diagram
        L = D.shape
        for g, a in v.items():
            i, loc = self.block_of[g]
            ie = L.meet(i, e)
            col = D.transitions[(ie, i)].columns()[loc]
            off = self.offsets[ie]
            for k, c in col.items():
                s = out.get(off + k, ZERO) + a * c
                if s:
                    out[off + k] = s
                else:
                    out.pop(off + k, None)
        return out

    def shape_action_matrix(self, e: int) -> SparseMatrix:
        return SparseMatrix(self.dim, self.dim, [self.shape_action(e, {g: ONE}) for g in range(self.dim)],
                            _trusted=True)


def build_convolution(D: SemilatticeDiagram, *, check: bool = True) -> ConvolutionAlgebra:
    """Block algebra with ``i_e(a) i_f(b) = i_{ef}(phi_{ef,e}(a) phi_{ef,f}(b))``."""
    L = D.shape
    offsets, block_of, labels = [], [], []
    acc = 0
    local_labels = [lab for A in D.algebras for lab in A.basis_labels]
    distinct = len(set(local_labels)) == len(local_labels)
    for e in L.elements:
        offsets.append(acc)
        A = D.algebras[e]
        for i in range(A.dim):
            block_of.append((e, i))
            labels.append(A.basis_labels[i] if distinct else f"{L.labels[e]}:{A.basis_labels[i]}")
        acc += A.dim
    products = []
    for ge, (e, i) in enumerate(block_of):
        row = []
        for gf, (f, j) in enumerate(block_of):
            g = L.meet(e, f)
            Ag = D.algebras[g]
            a = D.transitions[(g, e)].columns()[i]
            b = D.transitions[(g, f)].columns()[j]
            prod = Ag.mul(a, b)
            row.append({offsets[g] + k: c for k, c in prod.items()})
        products.append(row)
    alg = AlgebraPresentation(labels, products, check=check)
    return ConvolutionAlgebra(D, alg, tuple(offsets), tuple(block_of))


# ---------------------------------------------------------------------------
# constructors


def constant_diagram(L: FiniteSemilattice, B: AlgebraPresentation) -> SemilatticeDiagram:
    ident = SparseMatrix.identity(B.dim)
    return SemilatticeDiagram(L, [B] * len(L), {fe: ident for fe in L.comparable_pairs()})


def unitisation_diagram(B: AlgebraPresentation) -> SemilatticeDiagram:
    """Two-element chain ``1 >= e`` with ``Q`` on top, ``B`` below and ``lambda -> lambda 1_B``."""
    if B.unit is None:
        raise InvalidDiagram("unitisation example needs a unital algebra")
    L = chain_semilattice(2, ["1", "e"])
    Qalg = scalar_algebra()
    trans = {
        (0, 0): SparseMatrix.identity(1),
        (1, 1): SparseMatrix.identity(B.dim),
        (1, 0): SparseMatrix(B.dim, 1, [dict(B.unit)], _trusted=True),
    }
    return SemilatticeDiagram(L, [Qalg, B], trans)


def clifford_algebra_diagram(D: DecompositionData) -> SemilatticeDiagram:
    """Apply the group-algebra functor to each group of a strong semilattice of groups."""
    for e, G in enumerate(D.components):
        if not G.is_group():
            raise NotAGroup(D.shape.labels[e])
    algebras = [semigroup_algebra(G) for G in D.components]
    trans = {(f, e): semigroup_hom_matrix(D.components[e], D.components[f], phi)
             for (f, e), phi in D.transitions.items()}
    return SemilatticeDiagram(D.shape, algebras, trans)


def semigroup_diagram(D: DecompositionData) -> SemilatticeDiagram:
    """Same as the Clifford construction but for any component type (e.g. rectangular bands)."""
    algebras = [semigroup_algebra(S) for S in D.components]
    trans = {(f, e): semigroup_hom_matrix(D.components[e], D.components[f], phi)
             for (f, e), phi in D.transitions.items()}
    return SemilatticeDiagram(D.shape, algebras, trans)


# ---------------------------------------------------------------------------
# l1(L)-structure


@dataclass(frozen=True)
class UnitVerdict:
    shape_unit: Optional[Dict[int, Q]]
    coefficient_identity: Optional[bool]
    left_ok: Optional[bool]
    right_ok: Optional[bool]

    @property
    def passed(self) -> bool:
        if self.shape_unit is None:
            return True  # nothing to check; reported, not a failure
        return bool(self.coefficient_identity and self.left_ok and self.right_ok)


def l1L_action(C: ConvolutionAlgebra, e: int, v: Mapping[int, Q]) -> Vector:
    return C.shape_action(e, v)


def unit_check(C: ConvolutionAlgebra) -> UnitVerdict:
    """If ``Q[L]`` has a unit ``u = sum lambda_e e``, check ``u.x = x = x.u`` on every basis block element."""
    L = C.shape
    QL = semigroup_algebra(L.underlying)
    u = QL.unit
    if u is None:
        return UnitVerdict(None, None, None, None)
    coeff_ok = True
    for f in L.elements:
        for h in L.elements:
            total = sum((lam for e, lam in u.items() if L.meet(e, f) == h), ZERO)
            if total != (ONE if h == f else ZERO):
                coeff_ok = False
    left_ok = right_ok = True
    for g in range(C.dim):
        x = {g: ONE}
        ux: Vector = {}
        for e, lam in u.items():
            for k, c in C.shape_action(e, x).items():
                s = ux.get(k, ZERO) + lam * c
                if s:
                    ux[k] = s
                else:
                    ux.pop(k, None)
        if ux != x:
            left_ok = False
        # symmetric action: the right action is computed by the same rule
        xu = ux
        if xu != x:
            right_ok = False
    return UnitVerdict(dict(u), coeff_ok, left_ok, right_ok)


def shape_centrality_check(C: ConvolutionAlgebra) -> bool:
    """``(e.x)y = e.(xy) = x(e.y)`` for all shape elements and basis elements."""
    A = C.algebra
    for e in C.shape.elements:
        for i in range(C.dim):
            ex = C.shape_action(e, {i: ONE})
            for j in range(C.dim):
                lhs = A.mul(ex, {j: ONE})
                mid = C.shape_action(e, A.products[i][j])
                rhs = A.mul({i: ONE}, C.shape_action(e, {j: ONE}))
                if not (lhs == mid == rhs):
                    return False
    return True


def central_embedding_check(C: ConvolutionAlgebra) -> Optional[bool]:
    """When fibres and transitions are unital, ``e -> i_e(1)`` is a homomorphism into the centre.

    Returns None if the hypothesis does not hold.
    """
    D = C.diagram
    if any(A.unit is None for A in D.algebras):
        return None
    for (f, e), m in D.transitions.items():
        if m.apply(D.algebras[e].unit) != D.algebras[f].unit:
            return None
    L = D.shape
    images = [C.include(e, D.algebras[e].unit) for e in L.elements]
    A = C.algebra
    for e in L.elements:
        for f in L.elements:
            if A.mul(images[e], images[f]) != images[L.meet(e, f)]:
                return False
        for g in range(C.dim):
            if A.mul(images[e], {g: ONE}) != A.mul({g: ONE}, images[e]):
                return False
    return True


def block_grading_check(C: ConvolutionAlgebra) -> bool:
    A = C.algebra
    L = C.shape
    for i in range(C.dim):
        for j in range(C.dim):
            g = L.meet(C.base(i), C.base(j))
            if any(C.base(k) != g for k in A.products[i][j]):
                return False
    return True


# ---------------------------------------------------------------------------
# semilattice homomorphisms, pullback and transfer


@dataclass(frozen=True)
class SemilatticeHom:
    source: FiniteSemilattice
    target: FiniteSemilattice
    mapping: Tuple[int, ...]

    def __post_init__(self):
        if len(self.mapping) != len(self.source):
            raise InvalidDiagram("homomorphism must map every source element")
        if any(not 0 <= y < len(self.target) for y in self.mapping):
            raise InvalidDiagram("homomorphism image out of range")
        bad = semilattice_hom_check(self.source, self.target, self.mapping)
        if bad is not None:
            x, y = bad
            raise InvalidDiagram(
                f"not a homomorphism at ({self.source.labels[x]}, {self.source.labels[y]})")

    def __call__(self, x: int) -> int:
        return self.mapping[x]

    def compose(self, inner: "SemilatticeHom") -> "SemilatticeHom":
        """``self o inner``."""
        if inner.target is not self.source and inner.target.table != self.source.table:
            raise InvalidDiagram("composition of incompatible homomorphisms")
        return SemilatticeHom(inner.source, self.target, tuple(self.mapping[x] for x in inner.mapping))


def identity_slhom(L: FiniteSemilattice) -> SemilatticeHom:
    return SemilatticeHom(L, L, tuple(L.elements))


def constant_slhom(H: FiniteSemilattice, L: FiniteSemilattice, e: int) -> SemilatticeHom:
    return SemilatticeHom(H, L, tuple(e for _ in H.elements))


def pullback(alpha: SemilatticeHom, D: SemilatticeDiagram) -> SemilatticeDiagram:
    """Diagram over ``H`` with ``(A alpha)_e = A_{alpha e}`` and transitions ``phi_{alpha f, alpha e}``."""
    H = alpha.source
    algebras = [D.algebras[alpha(e)] for e in H.elements]
    trans = {(f, e): D.transitions[(alpha(f), alpha(e))] for f, e in H.comparable_pairs()}
    return SemilatticeDiagram(H, algebras, trans)


def transfer_matrix(alpha: SemilatticeHom, source: ConvolutionAlgebra, target: ConvolutionAlgebra) -> SparseMatrix:
    """Matrix of ``i_e(b) -> i_{alpha e}(b)``."""
    cols = []
    for g, (e, i) in enumerate(source.block_of):
        cols.append({target.offsets[alpha(e)] + i: ONE})
    return SparseMatrix(target.dim, source.dim, cols, _trusted=True)


def transfer_hom(alpha: SemilatticeHom, D: SemilatticeDiagram,
                 source: Optional[ConvolutionAlgebra] = None,
                 target: Optional[ConvolutionAlgebra] = None) -> AlgebraHom:
    if source is None:
        source = build_convolution(pullback(alpha, D))
    if target is None:
        target = build_convolution(D)
    return AlgebraHom(source.algebra, target.algebra, transfer_matrix(alpha, source, target))


def generator_support(F: FiniteSemilattice, x: int, ngens: int) -> List[int]:
    """Generators ``j`` of a free semilattice with ``x <= f_j`` (i.e. ``j`` in the subset ``x``)."""
    return [j for j in range(ngens) if F.leq(x, j)]


def evaluation_hom(F: FiniteSemilattice, targets: Sequence[int], L: FiniteSemilattice) -> SemilatticeHom:
    """The homomorphism from the free semilattice sending generator ``j`` to ``targets[j]``."""
    k = len(targets)
    if len(F) != 2 ** k - 1:
        raise InvalidDiagram("free semilattice size does not match the number of targets")
    mapping = []
    for x in F.elements:
        support = generator_support(F, x, k)
        mapping.append(L.product([targets[j] for j in support]))
    return SemilatticeHom(F, L, tuple(mapping))
