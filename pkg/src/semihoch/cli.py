"""Command-line front end.

    semihoch validate INSTANCE...
    semihoch homology INSTANCE... [--max-degree N]
    semihoch cohomology INSTANCE... [--coefficients dual|regular|augmentation]
    semihoch decompose INSTANCE...
    semihoch diagonal INSTANCE...
    semihoch verify SUITE|all INSTANCE...

An INSTANCE is a path to a JSON instance file or the name of a shipped
fixture; ``@fixtures`` expands to the whole fixture library.  Exit status is 0
when every check passes, 1 when any check fails and 2 on input errors.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import os
import sys
import time
from dataclasses import dataclass
from pathlib import Path
from typing import Callable, Dict, List, Optional, Sequence, Tuple

from . import __version__
from .algebras import (character_bimodule, dual_bimodule, regular_bimodule, semigroup_algebra,
                       symmetric_bimodule_check, validate_hom)
from .diagrams import (ConvolutionAlgebra, SemilatticeHom, block_grading_check, build_convolution,
                       central_embedding_check, constant_slhom, identity_slhom, l1L_action, pullback,
                       shape_centrality_check, transfer_hom, unit_check)
from .errors import ResourceBound, SchemaError, SemihochError, ValidationError
from .exactlinalg import ONE, kernel_basis, l1_operator_norm, rank, rational_str
from .homology import (ConvolutionComplex, SplittingEngine, betti, boundary, cohomology_betti, combine_homotopy,
                       condition_T, disintegration_check, face_map, find_diagonal, homotopy_identity,
                       mu_normalises_check, mu_projection, normalized_subspace, product_of_diagonal,
                       rect_band_check, rect_band_homotopy, relative_betti, scalar_K_action, shape_K_action,
                       sigma_norms, solve_homotopy, splitting_conditions, transfer_chain, verify_diagonal)
from .homology.relative import boundary_preserves_normalized
from .instances import InstanceFile, parse_instance
from .semigroups import (BandClass, as_semilattice, assemble_strong_semilattice, band_class,
                         decompose_strong_semilattice, is_clifford, is_rectangular_band,
                         relabel_by_embedding)

SUITES = ("mu-chain-map", "disintegration", "sigma", "rect-band", "unit", "relative", "transfer",
          "normalised", "engine")
COMMANDS = ("validate", "homology", "cohomology", "decompose", "diagonal", "verify")
CACHE_ENV = "SEMIHOCH_CACHE"

EXIT_PASS, EXIT_FAIL, EXIT_INPUT = 0, 1, 2


@dataclass
class RunConfig:
    max_degree: int = 2
    suites: Tuple[str, ...] = ()
    resource_limit: Optional[int] = None
    out: Optional[str] = None
    cache_dir: Optional[str] = None
    direct_solve: bool = False
    coefficients: str = "dual"

    def __post_init__(self):
        if self.max_degree < 0:
            raise ValueError("max_degree must be non-negative")

    def key_fields(self) -> dict:
        return {"max_degree": self.max_degree, "suites": list(self.suites), "direct_solve": self.direct_solve,
                "coefficients": self.coefficients, "resource_limit": self.resource_limit}


class Result:
    """Mathematical content of one command on one instance."""

    def __init__(self):
        self.verdicts: Dict[str, bool] = {}
        self.data: Dict[str, object] = {}
        self.notes: List[str] = []

    def check(self, name: str, ok) -> bool:
        self.verdicts[name] = bool(ok)
        return bool(ok)

    def merge(self, prefix: str, other: "Result") -> None:
        for k, v in other.verdicts.items():
            self.verdicts[f"{prefix}/{k}"] = v
        if other.data:
            self.data[prefix] = other.data
        self.notes.extend(f"{prefix}: {n}" for n in other.notes)

    def as_dict(self) -> dict:
        return {
            "verdicts": {k: ("PASS" if v else "FAIL") for k, v in sorted(self.verdicts.items())},
            "data": self.data,
            "notes": list(self.notes),
        }


def _q(x) -> str:
    return rational_str(x)


# ---------------------------------------------------------------------------
# instance access


def load_instance(ref: str) -> InstanceFile:
    p = Path(ref)
    if p.is_file():
        return parse_instance(p.read_text(encoding="utf-8"), source=str(p))
    from .library import fixture_library
    lib = fixture_library()
    if ref in lib:
        return lib[ref]
    raise SchemaError("$", f"no such instance file or fixture: {ref}")


def expand_refs(refs: Sequence[str]) -> List[str]:
    out: List[str] = []
    for r in refs:
        if r == "@fixtures":
            from .library import fixture_library
            out.extend(fixture_library())
        else:
            out.append(r)
    return out


def _convolution(inst: InstanceFile) -> Optional[ConvolutionAlgebra]:
    if inst.diagram is None:
        return None
    return build_convolution(inst.diagram)


def _algebra(inst: InstanceFile):
    if inst.semigroup is not None:
        return semigroup_algebra(inst.semigroup)
    return build_convolution(inst.diagram).algebra


# ---------------------------------------------------------------------------
# commands


def cmd_validate(inst: InstanceFile, cfg: RunConfig) -> Result:
    r = Result()
    r.data["kind"] = inst.kind
    r.check("schema", True)
    if inst.semigroup is not None:
        S = inst.semigroup
        r.data["order"] = S.order
        r.data["band_class"] = band_class(S).value
        r.data["clifford"] = is_clifford(S)
        r.data["commutative"] = S.is_commutative()
        r.data["semilattice"] = as_semilattice(S) is not None
    if inst.diagram is not None:
        D = inst.diagram
        C = build_convolution(D)
        r.data["shape"] = list(D.shape.labels)
        r.data["fibre_dims"] = [A.dim for A in D.algebras]
        r.data["algebra_dim"] = C.dim
        r.check("diagram_valid", True)
        r.check("block_grading", block_grading_check(C))
        r.check("shape_action_central", shape_centrality_check(C))
        norms = D.contractivity()
        r.data["transition_norms"] = {f"{D.shape.labels[f]}<{D.shape.labels[e]}": _q(v)
                                      for (f, e), v in sorted(norms.items()) if f != e}
        r.data["contractive"] = all(v <= ONE for v in norms.values())
        emb = central_embedding_check(C)
        if emb is None:
            r.notes.append("fibres or transitions not unital; central embedding of the shape not checked")
        else:
            r.check("shape_embeds_centrally", emb)
    return r


def cmd_homology(inst: InstanceFile, cfg: RunConfig) -> Result:
    r = Result()
    A = _algebra(inst)
    rep = betti(A, None, cfg.max_degree, cfg.resource_limit)
    r.data.update(rep.as_dict())
    del r.data["verdicts"], r.data["norms"], r.data["notes"]
    r.check("betti_nonnegative", rep.verdicts["betti_nonnegative"])
    return r


def cmd_cohomology(inst: InstanceFile, cfg: RunConfig) -> Result:
    r = Result()
    A = _algebra(inst)
    reg = regular_bimodule(A)
    if cfg.coefficients == "dual":
        X = dual_bimodule(reg)
    elif cfg.coefficients == "regular":
        X = reg
    elif cfg.coefficients == "augmentation":
        if inst.semigroup is None:
            raise ValidationError("augmentation coefficients need a semigroup instance")
        X = character_bimodule(A, [1] * A.dim)
    else:
        raise ValidationError(f"unknown coefficients {cfg.coefficients!r}")
    r.data["coefficients"] = cfg.coefficients
    r.data["symmetric_coefficients"] = symmetric_bimodule_check(X)
    rep = cohomology_betti(A, X, cfg.max_degree, cfg.resource_limit)
    r.data["betti"] = rep.betti_numbers
    r.data["degrees"] = rep.as_dict()["degrees"]
    r.check("betti_nonnegative", rep.verdicts["betti_nonnegative"])
    if cfg.coefficients == "dual":
        hom = betti(A, None, cfg.max_degree, cfg.resource_limit)
        r.check("dual_matches_homology", hom.betti_numbers == rep.betti_numbers)
    return r


def cmd_decompose(inst: InstanceFile, cfg: RunConfig) -> Result:
    r = Result()
    S = inst.semigroup
    if S is None:
        r.notes.append("diagram instance; nothing to decompose")
        return r
    r.data["band_class"] = band_class(S).value
    r.data["clifford"] = is_clifford(S)
    dec = decompose_strong_semilattice(S)
    if dec is None:
        r.data["decomposable"] = False
        r.notes.append("neither Clifford nor a normal band")
        return r
    r.data["decomposable"] = True
    L = dec.shape
    r.data["shape"] = list(L.labels)
    r.data["shape_table"] = [list(row) for row in L.table]
    r.data["components"] = {L.labels[e]: [S.labels[x] for x in dec.embedding[e]] for e in L.elements}
    r.data["transitions"] = {
        f"{L.labels[f]}<{L.labels[e]}": [S.labels[dec.embedding[f][v]] for v in phi]
        for (f, e), phi in sorted(dec.transitions.items()) if f != e}
    T = assemble_strong_semilattice(dec)
    order = relabel_by_embedding(S, dec)
    same = all(order[T.table[i][j]] == S.table[order[i]][order[j]]
               for i in range(len(order)) for j in range(len(order)))
    r.check("reassembles_identically", same)
    return r


def cmd_diagonal(inst: InstanceFile, cfg: RunConfig) -> Result:
    r = Result()
    if inst.diagram is not None and inst.kind in ("clifford", "semilattice-diagram"):
        L = inst.diagram.shape
        K = semigroup_algebra(L.underlying)
        r.data["algebra"] = "shape semigroup algebra"
    else:
        K = semigroup_algebra(inst.semigroup)
        r.data["algebra"] = "semigroup algebra"
    delta = find_diagonal(K)
    if delta is None:
        r.data["diagonal"] = None
        r.notes.append("no diagonal: the algebra is not contractible")
        return r
    labels = K.basis_labels
    r.data["diagonal"] = {f"{labels[i // K.dim]}|{labels[i % K.dim]}": _q(c) for i, c in sorted(delta.items())}
    r.data["product_of_diagonal"] = {labels[i]: _q(c) for i, c in sorted(product_of_diagonal(K, delta).items())}
    for k, v in verify_diagonal(K, delta).items():
        r.check(k, v)
    if K.unit is None:
        r.notes.append("the algebra has no unit although a diagonal was found")
    return r


# ---------------------------------------------------------------------------
# verification suites


def _needs_diagram(inst: InstanceFile, r: Result) -> Optional[ConvolutionAlgebra]:
    C = _convolution(inst)
    if C is None:
        r.data["applicable"] = False
        r.notes.append("no strong-semilattice structure; suite not applicable")
    return C


def suite_mu_chain_map(inst: InstanceFile, cfg: RunConfig) -> Result:
    r = Result()
    C = _needs_diagram(inst, r)
    if C is None:
        return r
    cc = ConvolutionComplex(C, cfg.resource_limit)
    M = regular_bimodule(C.algebra)
    mus = {n: cc.mu_matrix(n) for n in range(cfg.max_degree + 1)}
    for n in range(cfg.max_degree + 1):
        mu = mus[n]
        r.check(f"mu_idempotent_{n}", mu @ mu == mu)
        diag = cc.diagonal_indices(n)
        fixed = all(mu.column(j) == {j: ONE} for j in diag)
        r.check(f"mu_image_is_diagonal_{n}", fixed and rank(mu) == len(diag))
        if n == 0:
            r.check("mu_projection_matches_engine_0", mu_projection(C, 0) == mu)
    for n in range(cfg.max_degree):
        dn = cc.d(n)
        r.check(f"mu_chain_map_{n}", mus[n] @ dn == dn @ mus[n + 1])
        faces_ok = all(mus[n] @ face_map(C.algebra, M, n, i) == face_map(C.algebra, M, n, i) @ mus[n + 1]
                       for i in range(n + 2))
        r.check(f"mu_commutes_with_faces_{n}", faces_ok)
        pi_n, pi_n1 = cc.pi_matrix(n), cc.pi_matrix(n + 1)
        r.check(f"pi_chain_map_{n}", pi_n @ dn == dn @ pi_n1)
    return r


def suite_disintegration(inst: InstanceFile, cfg: RunConfig) -> Result:
    r = Result()
    C = _needs_diagram(inst, r)
    if C is None:
        return r
    rep = disintegration_check(C, cfg.max_degree, cfg.resource_limit)
    r.data["betti_full"] = rep.betti_numbers
    r.data["betti_diagonal"] = rep.diagonal_betti
    r.check("disintegration", rep.verdicts["disintegration"])
    return r


def _slhoms(L) -> List[Tuple[str, SemilatticeHom]]:
    """Identity, the constant maps and the maps ``x -> x e``: all endomorphisms of ``L``."""
    out = [("id", identity_slhom(L))]
    for e in L.elements:
        out.append((f"const_{L.labels[e]}", constant_slhom(L, L, e)))
    for e in L.elements:
        m = SemilatticeHom(L, L, tuple(L.meet(x, e) for x in L.elements))
        if all(m.mapping != h.mapping for _, h in out):
            out.append((f"meet_{L.labels[e]}", m))
    return out


def suite_sigma(inst: InstanceFile, cfg: RunConfig) -> Result:
    r = Result()
    C = _needs_diagram(inst, r)
    if C is None:
        return r
    engine = SplittingEngine(direct=cfg.direct_solve, resource_limit=cfg.resource_limit)
    r.data["mode"] = "direct-solve" if cfg.direct_solve else "free-fibre construction"
    sig = engine.sigma_family(C, cfg.max_degree)
    cc = engine.instance(C.diagram, C).cc
    for k, v in splitting_conditions(C, sig, list(range(cfg.max_degree + 1)), cc).items():
        r.check(k, v)
    r.check("sigma_0_zero", sig[0].is_zero())
    r.data["norms"] = {k: _q(v) for k, v in sigma_norms(sig).items()}
    # uniformity square for a few endomorphisms of the shape
    for name, alpha in _slhoms(C.shape)[:3]:
        for n in range(cfg.max_degree + 1):
            r.check(f"condition_T_{name}_{n}", condition_T(alpha, C.diagram, n, engine))
    # free-semilattice fibres met on the way: cross-check the solved homotopy
    checked = 0
    for fib in list(engine._instances.values()):
        if fib.cc.conv is C or checked >= 2:
            continue
        checked += 1
        fcc = fib.cc
        top = min(cfg.max_degree, 1)
        bnd = {k: fcc.d(k) for k in range(-1, top + 1)}
        s = {k: fib.s_matrix(k) for k in range(top + 1)}
        pis = {k: fcc.pi_matrix(k) for k in range(top + 2)}
        for k in range(top + 1):
            r.check(f"fibre{checked}_free_homotopy_{k}", homotopy_identity(bnd, s, pis[k], k))
            solved = solve_homotopy(bnd, pis[k], s.get(k - 1), k)
            r.check(f"fibre{checked}_solve_homotopy_{k}",
                    solved is not None and homotopy_identity(bnd, {**s, k: solved}, pis[k], k))
        mus = {k: fcc.mu_matrix(k) for k in range(top + 2)}
        combined = combine_homotopy(bnd, mus, mus, s, list(range(top + 1)))
        r.check(f"fibre{checked}_combined_homotopy", all(
            combined[k] == pis[k + 1] @ s[k] for k in combined))
        for k in combined:
            bound = (1 + l1_operator_norm(mus[k + 1])) * l1_operator_norm(s[k])
            r.check(f"fibre{checked}_combined_norm_bound_{k}", l1_operator_norm(combined[k]) <= bound)
    r.data["engine"] = {"instances": engine.stats["instances"], "psi_columns": engine.stats["psi"]}
    return r


def suite_rect_band(inst: InstanceFile, cfg: RunConfig) -> Result:
    r = Result()
    S = inst.semigroup
    top = max(3, cfg.max_degree)
    if S is None or band_class(S) not in (BandClass.RECTANGULAR_BAND, BandClass.NORMAL_BAND,
                                          BandClass.SEMILATTICE):
        r.data["applicable"] = False
        r.notes.append("not a normal band; suite not applicable")
        return r
    if is_rectangular_band(S):
        for z in sorted({0, S.order - 1}):
            for k, v in rect_band_check(S, z, top).items():
                r.check(f"z={S.labels[z]}/{k}", v)
            r.check(f"z={S.labels[z]}/contractive",
                    all(l1_operator_norm(rect_band_homotopy(S, z, n)) == ONE for n in range(top + 1)))
        r.notes.append("degree 0: d_0 s_0 = id - (x -> z); the identity is asserted for n >= 1")
        return r
    dec = decompose_strong_semilattice(S)
    r.check("decomposes", dec is not None)
    if dec is None:
        return r
    order = relabel_by_embedding(S, dec)
    T = assemble_strong_semilattice(dec)
    r.check("reassembles_identically", all(order[T.table[i][j]] == S.table[order[i]][order[j]]
                                           for i in range(S.order) for j in range(S.order)))
    for e, comp in enumerate(dec.components):
        for k, v in rect_band_check(comp, 0, min(top, 2)).items():
            r.check(f"component_{dec.shape.labels[e]}/{k}", v)
    rep = betti(semigroup_algebra(S), None, cfg.max_degree, cfg.resource_limit)
    r.data["betti"] = rep.betti_numbers
    r.check("simplicially_trivial", all(b == 0 for b in rep.betti_numbers[1:]))
    return r


def suite_unit(inst: InstanceFile, cfg: RunConfig) -> Result:
    r = Result()
    C = _needs_diagram(inst, r)
    if C is None:
        return r
    v = unit_check(C)
    L = C.shape
    if v.shape_unit is None:
        r.notes.append("shape algebra has no unit")
    else:
        r.data["shape_unit"] = {L.labels[e]: _q(c) for e, c in sorted(v.shape_unit.items())}
        r.check("unit_coefficients", v.coefficient_identity)
        r.check("unit_acts_left", v.left_ok)
        r.check("unit_acts_right", v.right_ok)
    ok = True
    for e in L.elements:
        for g in range(C.dim):
            out = l1L_action(C, e, {g: ONE})
            target = L.meet(e, C.base(g))
            ok &= all(C.base(k) == target for k in out)
    r.check("shape_action_lands_in_meet_block", ok)
    return r


def suite_relative(inst: InstanceFile, cfg: RunConfig) -> Result:
    r = Result()
    C = _needs_diagram(inst, r)
    if C is None:
        return r
    K = semigroup_algebra(C.shape.underlying)
    delta = find_diagonal(K)
    r.data["shape_algebra_contractible"] = delta is not None
    full = betti(C.algebra, None, cfg.max_degree, cfg.resource_limit).betti_numbers
    rel = relative_betti(C.algebra, None, shape_K_action(C), cfg.max_degree, cfg.resource_limit).betti_numbers
    r.data["betti"] = full
    r.data["relative_betti"] = rel
    if delta is not None:
        for k, v in verify_diagonal(K, delta).items():
            r.check(f"diagonal_{k}", v)
        r.check("relative_equals_absolute", rel == full)
    else:
        r.notes.append("shape algebra not contractible; relative and absolute Betti numbers reported only")
    low = min(cfg.max_degree, 1)
    scal = relative_betti(C.algebra, None, scalar_K_action(C.algebra), low, cfg.resource_limit).betti_numbers
    r.check("scalar_relative_equals_absolute", scal == full[:low + 1])
    return r


def suite_transfer(inst: InstanceFile, cfg: RunConfig) -> Result:
    r = Result()
    C = _needs_diagram(inst, r)
    if C is None:
        return r
    D = C.diagram
    homs = _slhoms(D.shape)
    r.data["homomorphisms"] = [name for name, _ in homs]
    convs = {}

    def conv_of(diag):
        key = diag.key()
        if key not in convs:
            convs[key] = build_convolution(diag)
        return convs[key]

    for name, alpha in homs:
        Da = pullback(alpha, D)
        Ca = conv_of(Da)
        verdict = validate_hom(transfer_hom(alpha, D, Ca, C))
        r.check(f"{name}/algebra_hom", verdict.multiplicative)
        src, tgt = ConvolutionComplex(Ca, cfg.resource_limit), ConvolutionComplex(C, cfg.resource_limit)
        tr = {n: transfer_chain(alpha, D, n, Ca, C) for n in range(cfg.max_degree + 1)}
        if name == "id":
            r.check("id/identity", all(t == type(t).identity(t.nrows) for t in tr.values()))
        for n in range(cfg.max_degree):
            r.check(f"{name}/chain_map_{n}", tr[n] @ src.d(n) == tgt.d(n) @ tr[n + 1])
        for n in range(cfg.max_degree + 1):
            r.check(f"{name}/mu_natural_{n}", tr[n] @ src.mu_matrix(n) == tgt.mu_matrix(n) @ tr[n])
    pairs = [(a, b) for a in homs[:3] for b in homs[:3]]
    for (na, a), (nb, b) in pairs:
        Da = pullback(a, D)
        ab = a.compose(b)
        Cab = conv_of(pullback(ab, D))
        Ca = conv_of(Da)
        for n in range(min(cfg.max_degree, 1) + 1):
            lhs = transfer_chain(ab, D, n, Cab, C)
            rhs = transfer_chain(a, D, n, Ca, C) @ transfer_chain(b, Da, n, Cab, Ca)
            r.check(f"functorial_{na}*{nb}_{n}", lhs == rhs)
    return r


def suite_normalised(inst: InstanceFile, cfg: RunConfig) -> Result:
    r = Result()
    C = _needs_diagram(inst, r)
    if C is None:
        return r
    K = shape_K_action(C)
    dims = []
    for n in range(cfg.max_degree + 1):
        dims.append(normalized_subspace(C.algebra, None, K, n, cfg.resource_limit).dim)
        r.check(f"pi_lands_in_normalised_{n}", mu_normalises_check(C, n))
        if n >= 1:
            r.check(f"boundary_preserves_normalised_{n}", boundary_preserves_normalized(C.algebra, None, K, n))
    r.data["normalised_dims"] = dims
    return r


def suite_engine(inst: InstanceFile, cfg: RunConfig) -> Result:
    r = Result()
    A = _algebra(inst)
    M = regular_bimodule(A)
    top = cfg.max_degree
    ds = {n: boundary(A, M, n) for n in range(top + 1)}
    for n in range(1, top + 1):
        r.check(f"boundary_squares_to_zero_{n}", (ds[n - 1] @ ds[n]).is_zero())
    for n in range(min(top, 1) + 1):
        kb = kernel_basis(ds[n])
        r.check(f"rank_nullity_{n}", kb.dim + rank(ds[n]) == ds[n].ncols)
        if inst.semigroup is not None:
            r.check(f"faces_contractive_{n}",
                    all(l1_operator_norm(face_map(A, M, n, i)) <= ONE for i in range(n + 2)))
    hom = betti(A, M, top, cfg.resource_limit)
    coh = cohomology_betti(A, dual_bimodule(M), top, cfg.resource_limit)
    r.data["betti"] = hom.betti_numbers
    r.check("betti_nonnegative", hom.verdicts["betti_nonnegative"])
    r.check("cohomology_of_dual_matches", coh.betti_numbers == hom.betti_numbers)
    S = inst.semigroup
    if S is not None and S.is_commutative() and is_clifford(S):
        # commutative Clifford: cohomology with symmetric coefficients vanishes above degree 0
        for name, X in (("regular", M), ("augmentation", character_bimodule(A, [1] * A.dim))):
            r.check(f"{name}_coefficients_symmetric", symmetric_bimodule_check(X))
            vals = cohomology_betti(A, X, top, cfg.resource_limit).betti_numbers
            r.data[f"cohomology_{name}"] = vals
            r.check(f"cohomology_{name}_vanishes", all(b == 0 for b in vals[1:]))
    return r


SUITE_FUNCS: Dict[str, Callable[[InstanceFile, RunConfig], Result]] = {
    "mu-chain-map": suite_mu_chain_map,
    "disintegration": suite_disintegration,
    "sigma": suite_sigma,
    "rect-band": suite_rect_band,
    "unit": suite_unit,
    "relative": suite_relative,
    "transfer": suite_transfer,
    "normalised": suite_normalised,
    "engine": suite_engine,
}


def cmd_verify(inst: InstanceFile, cfg: RunConfig) -> Result:
    r = Result()
    suites = cfg.suites or SUITES
    if "all" in suites:
        suites = SUITES
    r.merge("validate", cmd_validate(inst, cfg))
    if inst.semigroup is not None:
        r.merge("decompose", cmd_decompose(inst, cfg))
    skipped = {}
    for name in suites:
        try:
            r.merge(name, SUITE_FUNCS[name](inst, cfg))
        except ResourceBound as exc:
            skipped[name] = str(exc)
            r.notes.append(f"{name}: skipped, {exc}")
    if skipped:
        r.data["skipped_suites"] = skipped
    return r


COMMAND_FUNCS = {
    "validate": cmd_validate,
    "homology": cmd_homology,
    "cohomology": cmd_cohomology,
    "decompose": cmd_decompose,
    "diagonal": cmd_diagonal,
    "verify": cmd_verify,
}


# ---------------------------------------------------------------------------
# cache and report


def cache_key(inst: InstanceFile, command: str, cfg: RunConfig) -> str:
    doc = {"instance": inst.content_hash(), "command": command, "config": cfg.key_fields(),
           "version": __version__}
    return hashlib.sha256(json.dumps(doc, sort_keys=True).encode("utf-8")).hexdigest()


def _cache_dir(cfg: RunConfig) -> Optional[Path]:
    d = cfg.cache_dir or os.environ.get(CACHE_ENV)
    return Path(d) if d else None


def run_instance(inst: InstanceFile, command: str, cfg: RunConfig) -> Tuple[dict, bool]:
    """Result document for one instance and whether it came from the cache."""
    cdir = _cache_dir(cfg)
    path = None
    if cdir is not None:
        path = cdir / f"{cache_key(inst, command, cfg)}.json"
        if path.is_file():
            return json.loads(path.read_text(encoding="utf-8")), True
    try:
        res = COMMAND_FUNCS[command](inst, cfg)
        doc = res.as_dict()
        doc["status"] = "FAIL" if not all(res.verdicts.values()) else "PASS"
    except ResourceBound as exc:
        doc = {"verdicts": {}, "data": {}, "notes": [str(exc)], "status": "ERROR"}
    except SemihochError as exc:
        doc = {"verdicts": {}, "data": {}, "notes": [f"{type(exc).__name__}: {exc}"], "status": "FAIL"}
    if path is not None and doc["status"] != "ERROR":
        path.parent.mkdir(parents=True, exist_ok=True)
        tmp = path.with_suffix(".tmp")
        tmp.write_text(json.dumps(doc, sort_keys=True, indent=1), encoding="utf-8")
        os.replace(tmp, path)
    return doc, False


def run(command: str, refs: Sequence[str], cfg: RunConfig, stream=None) -> Tuple[dict, int]:
    """Run ``command`` over the instances; returns the report and the exit code."""
    stream = stream if stream is not None else sys.stdout
    t0 = time.perf_counter()
    report = {
        "tool": "semihoch",
        "version": __version__,
        "command": command,
        "config": cfg.key_fields(),
        "instances": [],
    }
    timings = {"instances": {}}
    code = EXIT_PASS
    for ref in expand_refs(refs):
        t = time.perf_counter()
        try:
            inst = load_instance(ref)
        except (SchemaError, ValidationError) as exc:
            report["instances"].append({"name": ref, "status": "INPUT_ERROR", "error": str(exc)})
            print(f"{ref}: input error: {exc}", file=stream)
            code = EXIT_INPUT
            continue
        doc, hit = run_instance(inst, command, cfg)
        entry = {"name": inst.name or ref, "kind": inst.kind, "content_hash": inst.content_hash()}
        entry.update(doc)
        report["instances"].append(entry)
        timings["instances"][entry["name"]] = {"seconds": round(time.perf_counter() - t, 6),
                                               "cache": "hit" if hit else "miss"}
        _print_entry(entry, stream)
        if doc["status"] == "ERROR":
            code = EXIT_INPUT
        elif doc["status"] == "FAIL" and code == EXIT_PASS:
            code = EXIT_FAIL
    statuses = [e["status"] for e in report["instances"]]
    report["summary"] = {s: statuses.count(s) for s in sorted(set(statuses))}
    report["exit_code"] = code
    timings["total_seconds"] = round(time.perf_counter() - t0, 6)
    report["timings"] = timings
    return report, code


def _print_entry(entry: dict, stream) -> None:
    verdicts = entry.get("verdicts", {})
    npass = sum(1 for v in verdicts.values() if v == "PASS")
    line = f"{entry['name']:28s} {entry['status']:5s} {npass}/{len(verdicts)} checks"
    data = entry.get("data", {})
    if "betti" in data:
        line += f"  betti={data['betti']}"
    print(line, file=stream)
    for suite, sub in data.items():
        if isinstance(sub, dict):
            for k, v in sub.items():
                if k.startswith("betti"):
                    print(f"    {suite} {k}={v}", file=stream)
    for k, v in verdicts.items():
        if v != "PASS":
            print(f"    FAIL {k}", file=stream)
    for n in entry.get("notes", []):
        print(f"    note: {n}", file=stream)


def report_json(report: dict) -> str:
    return json.dumps(report, sort_keys=True, indent=2) + "\n"


def strip_timings(report: dict) -> dict:
    return {k: v for k, v in report.items() if k != "timings"}


# ---------------------------------------------------------------------------
# argument parsing


def _parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--max-degree", type=int, default=2, metavar="N")
    common.add_argument("--suite", action="append", default=[], metavar="NAME",
                        help="verification suite (repeatable)")
    common.add_argument("--out", metavar="PATH", help="write the JSON report here ('-' for stdout)")
    common.add_argument("--cache", metavar="DIR", help=f"result cache directory (default ${CACHE_ENV})")
    common.add_argument("--resource-limit", type=int, metavar="N",
                        help="largest chain space (number of basis tensors) to enumerate")
    common.add_argument("--direct-solve", action="store_true",
                        help="build splitting homotopies by direct solve instead of free fibres")
    common.add_argument("--coefficients", default="dual", choices=("dual", "regular", "augmentation"))
    p = argparse.ArgumentParser(prog="semihoch", description="Exact Hochschild homology of "
                                "semilattice-graded convolution algebras.")
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = p.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        sp = sub.add_parser(name, parents=[common])
        if name == "verify":
            sp.add_argument("target", metavar="SUITE", help="suite name or 'all'")
        sp.add_argument("instances", nargs="+", metavar="INSTANCE")
    return p


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = _parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_INPUT if exc.code else EXIT_PASS
    suites = list(args.suite)
    if args.command == "verify":
        suites.insert(0, args.target)
    for s in suites:
        if s != "all" and s not in SUITE_FUNCS:
            print(f"unknown suite {s!r}; choose from {', '.join(SUITES)} or all", file=sys.stderr)
            return EXIT_INPUT
    if args.max_degree < 0:
        print("--max-degree must be non-negative", file=sys.stderr)
        return EXIT_INPUT
    if "all" in suites:
        suites = list(SUITES)
    cfg = RunConfig(max_degree=args.max_degree, suites=tuple(dict.fromkeys(suites)),
                    resource_limit=args.resource_limit, out=args.out, cache_dir=args.cache,
                    direct_solve=args.direct_solve, coefficients=args.coefficients)
    report, code = run(args.command, args.instances, cfg)
    if cfg.out == "-":
        sys.stdout.write(report_json(report))
    elif cfg.out:
        Path(cfg.out).write_text(report_json(report), encoding="utf-8")
    return code


if __name__ == "__main__":
    sys.exit(main())
