
import pytest

from semihoch.algebras import scalar_algebra, semigroup_algebra
from semihoch.diagrams import (SemilatticeHom, build_convolution, constant_diagram, constant_slhom,
                               identity_slhom, pullback)
from semihoch.errors import HypothesisFailure, IndexOutOfRange, NotRectangular, ResourceBound
from semihoch.exactlinalg import ONE, SparseMatrix, l1_operator_norm
from semihoch.homology import (ConvolutionComplex, HochschildComplex, SplittingEngine,
                               combine_homotopy, condition_T, diag_subcomplex_betti, disintegration_check,
                               homotopy_identity, mu_projection, pi_projection, rect_band_check,
                               rect_band_homotopy, sigma_family, solve_homotopy, splitting_conditions,
                               transfer_chain)
from semihoch.library import fixture
from semihoch.semigroups import (chain_semilattice, cyclic_group, free_semilattice, left_zero_band,
                                 rectangular_band)


def conv(name):
    return build_convolution(fixture(name).diagram)


def test_mu_fixes_single_block_tensors():
    C = conv("chain2-Z2")
    cc = ConvolutionComplex(C)
    sp = cc.space(1)
    for idx, t in enumerate(sp.tuples()):
        blocks = {C.base(g) for g in t}
        if len(blocks) == 1:
            assert cc.mu_column(1, idx) == {idx: ONE}


def test_mu_moves_mixed_tensor_to_product_block():
    C = conv("unitisation-Z2")
    cc = ConvolutionComplex(C)
    sp = cc.space(1)
    # (top scalar) (x) e_g  ->  e_1 (x) e_g in the lower block
    assert cc.mu_column(1, sp.index((0, 2))) == {sp.index((1, 2)): ONE}


@pytest.mark.parametrize("name", ["chain2-Z2", "diamond-Z2-mixed", "unitisation-Z2"])
def test_mu_is_idempotent_chain_map(name):
    C = conv(name)
    cc = ConvolutionComplex(C)
    for n in range(3):
        mu = mu_projection(C, n)
        assert mu @ mu == mu
        assert pi_projection(C, n) == SparseMatrix.identity(cc.dim(n)) - mu
    for n in range(2):
        assert cc.d(n) @ cc.mu_matrix(n + 1) == cc.mu_matrix(n) @ cc.d(n)


def test_diagonal_betti_examples():
    assert diag_subcomplex_betti(build_convolution(constant_diagram(chain_semilattice(3), scalar_algebra()))) \
        == [3, 0, 0]
    assert diag_subcomplex_betti(conv("chain2-Z2")) == [4, 0, 0]
    S3 = conv("point-S3")
    assert diag_subcomplex_betti(S3, 1) == [3, 0]


@pytest.mark.parametrize("name", ["point-Q", "free2-Q", "chain2-Z2"])
def test_disintegration_examples(name):
    rep = disintegration_check(conv(name))
    assert rep.verdicts["disintegration"]
    assert rep.betti_numbers == rep.diagonal_betti


def test_free2_disintegration_values():
    assert disintegration_check(conv("free2-Q")).betti_numbers == [3, 0, 0]


def test_solve_homotopy_zero_target():
    cx = HochschildComplex(semigroup_algebra(cyclic_group(2)))
    bnd = {n: cx.d(n) for n in range(3)}
    s = solve_homotopy(bnd, SparseMatrix.zeros(cx.dim(1), cx.dim(1)), None, 1)
    assert s is not None and s.is_zero()


def test_solve_homotopy_free2_pi():
    C = conv("free2-Q")
    cc = ConvolutionComplex(C)
    bnd = {n: cc.d(n) for n in range(-1, 3)}
    s = {0: solve_homotopy(bnd, cc.pi_matrix(0), None, 0)}
    for n in (1, 2):
        s[n] = solve_homotopy(bnd, cc.pi_matrix(n), s[n - 1], n)
        assert s[n] is not None
        assert homotopy_identity(bnd, s, cc.pi_matrix(n), n)


def test_solve_homotopy_inconsistent():
    # id is not null-homotopic on Q: H_0 = Q survives
    cx = HochschildComplex(scalar_algebra())
    bnd = {n: cx.d(n) for n in range(2)}
    assert solve_homotopy(bnd, SparseMatrix.identity(1), None, 0) is None


def free2_pieces(top=1):
    C = conv("free2-Q")
    cc = ConvolutionComplex(C)
    bnd = {k: cc.d(k) for k in range(-1, top + 2)}
    mus = {k: cc.mu_matrix(k) for k in range(top + 2)}
    pis = {k: cc.pi_matrix(k) for k in range(top + 2)}
    s = {0: solve_homotopy(bnd, pis[0], None, 0)}
    for k in range(1, top + 1):
        s[k] = solve_homotopy(bnd, pis[k], s[k - 1], k)
    return bnd, mus, pis, s


def test_combine_with_identity_gives_zero():
    bnd, mus, pis, s = free2_pieces()
    ids = {k: SparseMatrix.identity(m.nrows) for k, m in mus.items()}
    out = combine_homotopy(bnd, ids, mus, s, [0, 1])
    assert all(m.is_zero() for m in out.values())


def test_combine_with_alpha_and_norm_bound():
    bnd, mus, pis, s = free2_pieces()
    out = combine_homotopy(bnd, mus, mus, s, [0, 1])
    for k in (0, 1):
        assert out[k] == pis[k + 1] @ s[k]
        assert l1_operator_norm(out[k]) <= (1 + l1_operator_norm(mus[k + 1])) * l1_operator_norm(s[k])


def test_combine_rejects_non_chain_map():
    bnd, mus, pis, s = free2_pieces()
    bad = dict(mus)
    bad[1] = SparseMatrix.zeros(mus[1].nrows, mus[1].ncols)
    with pytest.raises(HypothesisFailure):
        combine_homotopy(bnd, bad, mus, s, [0, 1])


SIGMA_FAST = ["point-Q", "chain2-Q", "chain3-Q", "diamond-Q", "free2-Q", "free3-Q"]
SIGMA_SLOW = ["chain2-Z2", "chain2-Z2-over-1", "free2-Z2", "diamond-Z2-mixed", "free3-Z2", "unitisation-Z2",
              "chain2-Z3-over-1", "chain3-Z3"]


def check_sigma(name, top=2):
    C = conv(name)
    engine = SplittingEngine()
    sig = sigma_family(C, top, engine=engine)
    verdicts = splitting_conditions(C, sig, list(range(top + 1)), engine.instance(C.diagram, C).cc)
    assert all(verdicts.values()), {k: v for k, v in verdicts.items() if not v}
    assert sig[0].is_zero()
    return sig


@pytest.mark.parametrize("name", SIGMA_FAST)
def test_sigma_family_fast(name):
    check_sigma(name)


@pytest.mark.slow
@pytest.mark.parametrize("name", SIGMA_SLOW)
def test_sigma_family_slow(name):
    check_sigma(name)


def test_sigma_s3_over_z2_degree_one():
    # degree 2 would need a free fibre of 42^4 tensors, beyond the default limit
    check_sigma("chain2-S3-over-Z2", 1)


def test_sigma_singleton_shape_is_zero():
    sig = check_sigma("point-S3", 1)
    assert all(s.is_zero() for s in sig)


@pytest.mark.parametrize("name", ["chain2-Q", "free2-Q", "chain2-Z2"])
def test_direct_solve_oracle(name):
    C = conv(name)
    sig = sigma_family(C, 2, direct=True)
    verdicts = splitting_conditions(C, sig, [0, 1, 2])
    assert all(v for k, v in verdicts.items() if k.startswith("homotopy_identity"))


def test_fibre_resource_limit():
    C = conv("chain2-Z2")
    engine = SplittingEngine(fibre_limit=10)
    with pytest.raises(ResourceBound):
        engine.sigma_family(C, 2)


def test_condition_T_on_chain():
    D = fixture("chain3-Q").diagram
    L = D.shape
    engine = SplittingEngine()
    for alpha in (identity_slhom(L), constant_slhom(L, L, 2), SemilatticeHom(L, L, (0, 0, 1))):
        for n in range(3):
            assert condition_T(alpha, D, n, engine)


def test_transfer_chain_identity_and_functoriality():
    D = fixture("chain3-Q").diagram
    L = D.shape
    assert transfer_chain(identity_slhom(L), D, 2) == SparseMatrix.identity(27)
    a = SemilatticeHom(L, L, (1, 2, 2))
    b = SemilatticeHom(L, L, (0, 0, 1))
    Da = pullback(a, D)
    lhs = transfer_chain(a.compose(b), D, 1)
    assert lhs == transfer_chain(a, D, 1) @ transfer_chain(b, Da, 1)


def test_transfer_naturality_square_collapse():
    D = fixture("chain2-Z2").diagram
    L = D.shape
    alpha = constant_slhom(L, L, 1)
    CH = build_convolution(pullback(alpha, D))
    CL = build_convolution(D)
    src, tgt = ConvolutionComplex(CH), ConvolutionComplex(CL)
    for n in range(3):
        t = transfer_chain(alpha, D, n, CH, CL)
        assert t @ src.mu_matrix(n) == tgt.mu_matrix(n) @ t
        if n < 2:
            assert t @ src.d(n) == tgt.d(n) @ transfer_chain(alpha, D, n + 1, CH, CL)


def test_rect_band_left_zero():
    R = left_zero_band(2)
    out = rect_band_check(R, 0, 1)
    assert out["rect_band_identity_1"]
    assert out["degree_0_equals_id_minus_point"]


def test_rect_band_one_element():
    R = rectangular_band(1, 1)
    s = rect_band_homotopy(R, 0, 1)
    assert s.column(0) == {0: ONE}
    assert all(rect_band_check(R, 0, 3).values())


@pytest.mark.parametrize("rc", [(2, 2), (1, 3), (3, 1), (3, 3)])
def test_rect_band_identity(rc):
    R = rectangular_band(*rc)
    top = 3 if R.order <= 4 else 2
    for z in range(R.order):
        out = rect_band_check(R, z, top)
        assert all(out.values())
        for n in range(top + 1):
            assert l1_operator_norm(rect_band_homotopy(R, z, n)) == 1


def test_rect_band_degree_zero_is_not_identity():
    R = rectangular_band(2, 1)
    cx = HochschildComplex(semigroup_algebra(R))
    assert cx.d(0) @ rect_band_homotopy(R, 0, 0) != SparseMatrix.identity(2)


def test_rect_band_errors():
    with pytest.raises(NotRectangular):
        rect_band_homotopy(cyclic_group(2), 0, 1)
    with pytest.raises(NotRectangular):
        rect_band_homotopy(free_semilattice(2).underlying, 0, 1)
    with pytest.raises(IndexOutOfRange):
        rect_band_homotopy(rectangular_band(2, 2), 7, 1)
