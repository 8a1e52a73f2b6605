import itertools

import pytest
from hypothesis import given, settings, strategies as st

from semihoch.algebras import (AlgebraHom, AlgebraPresentation, Bimodule, character_bimodule, dual_bimodule,
                               identity_hom, regular_bimodule, scalar_algebra, semigroup_algebra,
                               semigroup_hom_matrix, symmetric_bimodule_check, validate_hom)
from semihoch.errors import DimensionMismatch, InvalidDiagram
from semihoch.exactlinalg import ONE, Q, SparseMatrix
from semihoch.semigroups import (cyclic_group, free_semilattice, rectangular_band, symmetric_group_3,
                                 trivial_group)

from oracles import commutator_quotient_dim, semigroup_products


def test_trivial_group_algebra_is_scalars():
    A = semigroup_algebra(trivial_group())
    assert A.dim == 1 and A.unit == {0: ONE}


def test_z2_structure_constants_match_table():
    G = cyclic_group(2)
    A = semigroup_algebra(G)
    for i, j in itertools.product(range(2), repeat=2):
        assert A.products[i][j] == {G.table[i][j]: ONE}


def test_free_semilattice_unit_by_inclusion_exclusion():
    A = semigroup_algebra(free_semilattice(2))
    assert A.unit == {0: ONE, 1: ONE, 2: -ONE}
    F3 = free_semilattice(3)
    u = semigroup_algebra(F3).unit
    sizes = [lab.count(",") + 1 for lab in F3.labels]
    assert u == {x: Q((-1) ** (sizes[x] + 1)) for x in F3.elements}


def test_rectangular_band_algebra_has_no_unit():
    assert semigroup_algebra(rectangular_band(2, 2)).unit is None


def test_nonassociative_structure_constants_rejected():
    with pytest.raises(InvalidDiagram):
        AlgebraPresentation(["a", "b"], [[{1: 1}, {}], [{}, {0: 1}]])
    with pytest.raises(DimensionMismatch):
        AlgebraPresentation(["a"], [[{3: 1}]])


def test_identity_hom_valid():
    A = semigroup_algebra(symmetric_group_3())
    v = validate_hom(identity_hom(A))
    assert v.multiplicative and v.unital and v.norm == 1


def test_zero_hom_multiplicative_not_unital():
    A = semigroup_algebra(cyclic_group(2))
    v = validate_hom(AlgebraHom(A, A, SparseMatrix.zeros(2, 2)))
    assert v.multiplicative and v.unital is False


def test_scalar_into_group_algebra_unit_map():
    Qa = scalar_algebra()
    B = semigroup_algebra(cyclic_group(2))
    v = validate_hom(AlgebraHom(Qa, B, SparseMatrix(2, 1, [B.unit])))
    assert v.multiplicative and v.unital and v.norm == 1 and v.contractive


def test_non_multiplicative_map_detected():
    B = semigroup_algebra(cyclic_group(2))
    v = validate_hom(AlgebraHom(B, B, SparseMatrix.from_dense([[1, 0], [0, 2]])))
    assert not v.multiplicative and v.failure is not None and not v.contractive


def test_hom_dimension_mismatch():
    with pytest.raises(DimensionMismatch):
        AlgebraHom(scalar_algebra(), semigroup_algebra(cyclic_group(2)), SparseMatrix.zeros(1, 1))


def test_sign_map_is_an_algebra_hom():
    S3 = symmetric_group_3()
    Z2 = cyclic_group(2)
    sign = []
    for lab in S3.labels:
        p = [int(c) for c in lab]
        sign.append(sum(p[i] > p[j] for i in range(3) for j in range(i + 1, 3)) % 2)
    h = AlgebraHom(semigroup_algebra(S3), semigroup_algebra(Z2), semigroup_hom_matrix(S3, Z2, sign))
    assert validate_hom(h).multiplicative


def test_regular_and_dual_bimodules():
    Qa = scalar_algebra()
    R = regular_bimodule(Qa)
    assert R.dim == 1 and R.left[0] == SparseMatrix.identity(1)
    D = dual_bimodule(R)
    assert D.left == R.left and D.right == R.right
    B = semigroup_algebra(cyclic_group(2))
    Dual = dual_bimodule(regular_bimodule(B))
    assert Dual.axiom_violation() is None


@pytest.mark.parametrize("G", [cyclic_group(3), symmetric_group_3(), rectangular_band(2, 2)],
                         ids=["Z3", "S3", "rect2x2"])
def test_bimodule_axioms_and_reflexivity(G):
    A = semigroup_algebra(G)
    M = regular_bimodule(A)
    assert M.axiom_violation() is None
    DD = dual_bimodule(dual_bimodule(M))
    assert DD.left == M.left and DD.right == M.right
    assert dual_bimodule(M).axiom_violation() is None


def test_symmetric_check():
    assert symmetric_bimodule_check(regular_bimodule(semigroup_algebra(cyclic_group(3))))
    assert not symmetric_bimodule_check(regular_bimodule(semigroup_algebra(symmetric_group_3())))
    A = scalar_algebra()
    assert symmetric_bimodule_check(Bimodule(A, 0, (SparseMatrix.zeros(0, 0),), (SparseMatrix.zeros(0, 0),)))


def test_augmentation_character():
    A = semigroup_algebra(cyclic_group(2))
    M = character_bimodule(A, [1, 1])
    assert symmetric_bimodule_check(M) and M.axiom_violation() is None
    with pytest.raises(InvalidDiagram):
        character_bimodule(A, [1, 2])


@pytest.mark.parametrize("G", [trivial_group(), cyclic_group(2), cyclic_group(3), symmetric_group_3(),
                               rectangular_band(2, 3)], ids=["1", "Z2", "Z3", "S3", "rect2x3"])
def test_commutator_quotient_matches_oracle(G):
    A = semigroup_algebra(G)
    assert A.dim - A.commutator_space_dim() == commutator_quotient_dim(semigroup_products(G.table), G.order)


@settings(max_examples=30, deadline=None)
@given(st.integers(min_value=1, max_value=6))
def test_semigroup_algebra_basis_products_are_basis_vectors(n):
    A = semigroup_algebra(cyclic_group(n))
    for row in A.products:
        for v in row:
            assert len(v) == 1 and list(v.values()) == [ONE]
    assert A.is_commutative()
