import itertools

import pytest

from semihoch.algebras import scalar_algebra, semigroup_algebra, validate_hom
from semihoch.diagrams import (SemilatticeDiagram, SemilatticeHom, block_grading_check, build_convolution,
                               central_embedding_check, clifford_algebra_diagram, constant_diagram,
                               constant_slhom, evaluation_hom, identity_slhom, l1L_action, pullback,
                               shape_centrality_check, transfer_hom, unit_check, unitisation_diagram)
from semihoch.errors import InvalidDiagram, NotAGroup
from semihoch.exactlinalg import ONE, Q, SparseMatrix
from semihoch.library import constant_clifford, fixture, diagram_fixture_names
from semihoch.semigroups import (DecompositionData, assemble_strong_semilattice, chain_semilattice, cyclic_group,
                                 diamond_semilattice, free_semilattice, rectangular_band, symmetric_group_3,
                                 trivial_group)


def test_trivial_shape_gives_the_fibre():
    B = semigroup_algebra(symmetric_group_3())
    C = build_convolution(constant_diagram(chain_semilattice(1), B))
    assert C.algebra.products == B.products


def test_unitisation_product():
    B = semigroup_algebra(cyclic_group(2))
    C = build_convolution(unitisation_diagram(B))
    assert C.dim == 3
    A = C.algebra
    # (lambda, b)(mu, c) = (lambda mu, lambda c + mu b + bc), basis: top 1, then e_1, e_g
    def pair(lam, b):
        return {k: v for k, v in {0: Q(lam), 1: Q(b[0]), 2: Q(b[1])}.items() if v}
    for lam, mu, b, c in [(2, 3, (1, 5), (0, 7)), (1, -1, (2, 0), (3, 4)), (0, 1, (1, 1), (1, -1))]:
        bc = (b[0] * c[0] + b[1] * c[1], b[0] * c[1] + b[1] * c[0])
        expected = pair(lam * mu, tuple(lam * c[i] + mu * b[i] + bc[i] for i in range(2)))
        assert A.mul(pair(lam, b), pair(mu, c)) == expected
    assert A.unit == {0: ONE}


def test_constant_diagram_is_tensor_product():
    L = free_semilattice(2)
    B = semigroup_algebra(cyclic_group(2))
    C = build_convolution(constant_diagram(L, B))
    QL = semigroup_algebra(L.underlying)
    for (e, i), (f, j) in itertools.product(itertools.product(L.elements, range(2)), repeat=2):
        k = next(iter(B.products[i][j]))
        assert C.algebra.products[e * 2 + i][f * 2 + j] == {L.meet(e, f) * 2 + k: ONE}
    assert C.dim == QL.dim * B.dim


def test_clifford_diagram_matches_assembled_semigroup():
    for name in ["chain2-Z2", "chain2-S3-over-Z2", "diamond-Z2-mixed", "free2-Z2", "chain3-Z3"]:
        inst = fixture(name)
        C = build_convolution(clifford_algebra_diagram(inst.decomposition))
        S = assemble_strong_semilattice(inst.decomposition)
        assert C.algebra.products == semigroup_algebra(S).products, name


def test_trivial_groups_give_semilattice_algebra():
    L = diamond_semilattice()
    C = build_convolution(clifford_algebra_diagram(constant_clifford(L, trivial_group())))
    assert C.algebra.products == semigroup_algebra(L.underlying).products


def test_clifford_diagram_rejects_non_groups():
    L = chain_semilattice(1)
    R = rectangular_band(1, 2)
    with pytest.raises(NotAGroup):
        clifford_algebra_diagram(DecompositionData(L, (R,), {(0, 0): (0, 1)}))


def test_diagram_validation():
    L = chain_semilattice(2)
    B = semigroup_algebra(cyclic_group(2))
    bad = SparseMatrix.from_dense([[1, 0], [0, 2]])
    with pytest.raises(InvalidDiagram):
        SemilatticeDiagram(L, [B, B], {(0, 0): SparseMatrix.identity(2), (1, 1): SparseMatrix.identity(2),
                                       (1, 0): bad})
    with pytest.raises(InvalidDiagram):
        SemilatticeDiagram(L, [B, B], {(0, 0): SparseMatrix.identity(2), (1, 0): SparseMatrix.identity(2)})


def test_shape_action_examples():
    B = semigroup_algebra(cyclic_group(2))
    C = build_convolution(unitisation_diagram(B))
    # e acting on the top scalar lands on the unit of B
    assert l1L_action(C, 1, {0: Q(3)}) == {1: Q(3)}
    for g in range(C.dim):
        e = C.base(g)
        assert l1L_action(C, e, {g: ONE}) == {g: ONE}
        assert l1L_action(C, 0, {g: ONE}) == {g: ONE}


@pytest.mark.parametrize("name", diagram_fixture_names())
def test_fixture_structure_checks(name):
    C = build_convolution(fixture(name).diagram)
    assert block_grading_check(C)
    assert shape_centrality_check(C)
    assert unit_check(C).passed
    assert central_embedding_check(C) in (True, None)
    assert sum(A.dim for A in C.diagram.algebras) == C.dim
    for (f, e), v in C.diagram.contractivity().items():
        assert v <= 1


def test_unit_check_free2_derived_unit():
    C = build_convolution(constant_diagram(free_semilattice(2), scalar_algebra()))
    v = unit_check(C)
    assert v.shape_unit == {0: ONE, 1: ONE, 2: -ONE}
    assert v.passed and v.coefficient_identity


def test_unit_check_free3_inclusion_exclusion():
    F = free_semilattice(3)
    v = unit_check(build_convolution(constant_diagram(F, scalar_algebra())))
    sizes = [lab.count(",") + 1 for lab in F.labels]
    assert v.shape_unit == {x: Q((-1) ** (sizes[x] + 1)) for x in F.elements}
    assert v.passed


def test_pullback_examples():
    D = fixture("chain3-Z3").diagram
    L = D.shape
    same = pullback(identity_slhom(L), D)
    assert same.key() == D.key()
    H = free_semilattice(2)
    const = pullback(constant_slhom(H, L, 1), D)
    assert all(A is D.algebras[1] for A in const.algebras)
    ev = evaluation_hom(H, (0, 2), L)
    P = pullback(ev, D)
    assert [A.dim for A in P.algebras] == [3, 3, 3]
    assert ev.mapping == (0, 2, 2)


def test_evaluation_hom_examples():
    L = chain_semilattice(2)
    assert evaluation_hom(free_semilattice(1), (1,), L).mapping == (1,)
    F = free_semilattice(3)
    assert evaluation_hom(F, (1, 1, 1), L).mapping == (1,) * 7
    assert evaluation_hom(free_semilattice(2), (0, 1), L).mapping == (0, 1, 1)


def test_slhom_rejects_non_homomorphism():
    L = diamond_semilattice()
    with pytest.raises(InvalidDiagram):
        SemilatticeHom(L, L, (0, 1, 2, 0))


def test_transfer_identity_and_constant():
    D = fixture("chain2-Z2").diagram
    t = transfer_hom(identity_slhom(D.shape), D)
    assert t.matrix == SparseMatrix.identity(4)
    c = transfer_hom(constant_slhom(D.shape, D.shape, 1), D)
    v = validate_hom(c)
    assert v.multiplicative and v.norm == 1
    assert c.matrix.apply({0: ONE}) == {2: ONE} and c.matrix.apply({3: ONE}) == {3: ONE}


def test_transfer_functorial_on_three_chain():
    L = chain_semilattice(3)
    D = fixture("chain3-Q").diagram
    beta = SemilatticeHom(L, L, (0, 0, 1))
    alpha = SemilatticeHom(L, L, (1, 2, 2))
    ab = alpha.compose(beta)
    lhs = transfer_hom(ab, D).matrix
    rhs = transfer_hom(alpha, D).matrix @ transfer_hom(beta, pullback(alpha, D)).matrix
    assert lhs == rhs
    for h in (alpha, beta, ab):
        assert validate_hom(transfer_hom(h, D)).multiplicative


def test_evaluation_hom_from_larger_free_semilattice():
    L = diamond_semilattice()
    ev = evaluation_hom(free_semilattice(3), (1, 2, 0), L)
    assert ev.mapping[6] == L.product([1, 2, 0]) == 3
