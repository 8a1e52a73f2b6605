import io
import json
import sys

import pytest

from semihoch import cli
from semihoch.cli import RunConfig, main, report_json, run, strip_timings
from semihoch.errors import SchemaError, ValidationError
from semihoch.instances import parse_instance
from semihoch.library import diagram_fixture_names, fixture_dir, fixture_library, load_fixture_file
from semihoch.semigroups import assemble_strong_semilattice

CLIFFORD_Z2 = {
    "kind": "clifford",
    "name": "z2-chain",
    "semilattice": {"elements": ["1", "e"], "table": [[0, 1], [1, 1]]},
    "groups": {"1": [[0, 1], [1, 0]], "e": [[0, 1], [1, 0]]},
    "homs": {"e<1": [0, 1]},
}


def test_minimal_semigroup():
    inst = parse_instance('{"kind": "semigroup", "elements": ["e"], "table": [[0]]}')
    assert inst.semigroup.order == 1


def test_clifford_instance_assembles():
    inst = parse_instance(json.dumps(CLIFFORD_Z2))
    assert assemble_strong_semilattice(inst.decomposition).order == 4
    assert inst.diagram is not None and sum(A.dim for A in inst.diagram.algebras) == 4


def test_malformed_transition_key():
    doc = dict(CLIFFORD_Z2, homs={"ab": [0, 1]})
    with pytest.raises(SchemaError) as info:
        parse_instance(json.dumps(doc))
    assert info.value.path.startswith("$")


def test_schema_error_paths():
    with pytest.raises(SchemaError) as info:
        parse_instance('{"kind": "semigroup", "elements": ["a"], "table": [["x"]]}')
    assert info.value.path == "$.table[0][0]"
    with pytest.raises(SchemaError) as info:
        parse_instance('{"kind": "widget"}')
    assert info.value.path == "$.kind"
    with pytest.raises(SchemaError):
        parse_instance("not json")


def test_invariant_violations_are_validation_errors():
    with pytest.raises(ValidationError):
        parse_instance('{"kind": "semigroup", "elements": ["a", "b"], "table": [[0, 1], [0, 0]]}')
    doc = dict(CLIFFORD_Z2, homs={"e<1": [1, 0]})
    with pytest.raises(ValidationError):
        parse_instance(json.dumps(doc))


def test_diagram_instance_with_rationals():
    doc = {
        "kind": "semilattice-diagram",
        "semilattice": {"elements": ["1", "e"], "table": [[0, 1], [1, 1]]},
        "algebras": {
            "1": {"dim": 1, "structure_constants": [[0, 0, 0, "1/1"]]},
            "e": {"dim": 2, "basis": ["u", "g"],
                  "structure_constants": [[0, 0, 0, 1], [0, 1, 1, 1], [1, 0, 1, 1], [1, 1, 0, 1]]},
        },
        "transitions": {"e<1": [["1"], [0]]},
    }
    inst = parse_instance(json.dumps(doc))
    assert [A.dim for A in inst.diagram.algebras] == [1, 2]


def test_fixture_files_match_library():
    lib = fixture_library()
    assert len(diagram_fixture_names()) >= 10
    for name, inst in lib.items():
        assert load_fixture_file(name).content_hash() == inst.content_hash()
    assert sorted(p.stem for p in fixture_dir().glob("*.json")) == sorted(lib)


def run_quiet(command, refs, **kw):
    return run(command, refs, RunConfig(**kw), stream=io.StringIO())


def test_homology_command_free2():
    report, code = run_quiet("homology", ["free2-Q"])
    assert code == 0
    assert report["instances"][0]["data"]["betti"] == [3, 0, 0]


def test_verify_all_singleton_exit_zero():
    assert main(["verify", "all", "point-Q"]) == 0


def test_verify_disintegration_prints_both_vectors(capsys):
    assert main(["verify", "disintegration", "chain2-Z2"]) == 0
    out = capsys.readouterr().out
    assert "PASS" in out
    assert "betti_full=[4, 0, 0]" in out and "betti_diagonal=[4, 0, 0]" in out
    report, _ = run_quiet("verify", ["chain2-Z2"], suites=("disintegration",))
    data = report["instances"][0]["data"]["disintegration"]
    assert data["betti_full"] == data["betti_diagonal"] == [4, 0, 0]


def test_exit_codes(tmp_path, capsys):
    bad = tmp_path / "bad.json"
    bad.write_text('{"kind": "semigroup", "elements": ["a"], "table": [[3]]}')
    assert main(["validate", str(bad)]) == 2
    assert main(["validate", "no-such-fixture"]) == 2
    assert main(["verify", "no-such-suite", "point-Q"]) == 2
    assert main(["homology", "point-Q", "--max-degree", "-1"]) == 2
    assert main(["homology", "group-S3", "--resource-limit", "10"]) == 2
    assert main(["diagonal", "semilattice-free2"]) == 0


def test_missing_diagonal_is_reported_not_failed():
    report, code = run_quiet("diagonal", ["rect-2x2"])
    assert code == 0
    assert report["instances"][0]["data"]["diagonal"] is None


def test_reports_are_byte_stable_cold_and_warm(tmp_path):
    refs = ["chain2-Q", "rect-2x2", "group-Z2"]
    cfg = dict(max_degree=1, suites=tuple(cli.SUITES), cache_dir=str(tmp_path / "cache"))
    cold, c1 = run_quiet("verify", refs, **cfg)
    warm, c2 = run_quiet("verify", refs, **cfg)
    plain, c3 = run_quiet("verify", refs, max_degree=1, suites=tuple(cli.SUITES))
    assert c1 == c2 == c3 == 0
    assert all(v["cache"] == "miss" for v in cold["timings"]["instances"].values())
    assert all(v["cache"] == "hit" for v in warm["timings"]["instances"].values())
    texts = {report_json(strip_timings(r)) for r in (cold, warm, plain)}
    assert len(texts) == 1


def test_report_has_no_floats():
    report, _ = run_quiet("verify", ["unitisation-Z2"], max_degree=1, suites=("sigma", "unit"))

    def walk(x):
        if isinstance(x, float):
            raise AssertionError(x)
        if isinstance(x, dict):
            for v in x.values():
                walk(v)
        elif isinstance(x, list):
            for v in x:
                walk(v)

    walk(strip_timings(report))


def test_out_file_and_cache_env(tmp_path, monkeypatch):
    monkeypatch.setenv(cli.CACHE_ENV, str(tmp_path / "c"))
    out = tmp_path / "r.json"
    assert main(["cohomology", "chain2-Z2-semigroup", "--coefficients", "augmentation", "--out", str(out)]) == 0
    doc = json.loads(out.read_text())
    assert doc["instances"][0]["data"]["betti"][1:] == [0, 0]
    assert any((tmp_path / "c").iterdir())


SPEC_OPERATIONS = [
    "rank", "kernel_basis", "solve_particular", "l1_operator_norm",
    "validate_semigroup", "as_semilattice", "free_semilattice", "band_class", "assemble_strong_semilattice",
    "decompose_strong_semilattice",
    "semigroup_algebra", "validate_hom", "regular_bimodule", "dual_bimodule", "symmetric_bimodule_check",
    "build_convolution", "clifford_algebra_diagram", "l1L_action", "unit_check", "pullback", "transfer_hom",
    "evaluation_hom",
    "face_map", "boundary", "betti", "mu_projection", "diag_subcomplex_betti", "disintegration_check",
    "normalized_subspace", "relative_betti", "find_diagonal", "solve_homotopy", "combine_homotopy",
    "sigma_family", "transfer_chain", "rect_band_homotopy", "cohomology_betti",
    "parse_instance", "run",
]

COVERAGE_SUBSET = ["point-Q", "chain2-Q", "free2-Q", "chain2-Z2", "rect-2x2", "normal-band-6",
                   "chain2-Z2-semigroup"]


def test_verify_all_covers_every_operation():
    called = set()

    def prof(frame, event, arg):
        if event == "call" and frame.f_globals.get("__name__", "").startswith("semihoch"):
            called.add(frame.f_code.co_name)

    refs = [str(fixture_dir() / f"{n}.json") for n in COVERAGE_SUBSET]
    kinds = {fixture_library()[n].kind for n in COVERAGE_SUBSET}
    assert {"clifford", "band", "semilattice-diagram", "semigroup"} <= kinds
    sys.setprofile(prof)
    try:
        report, code = run("verify", refs, RunConfig(max_degree=1, suites=tuple(cli.SUITES)),
                           stream=io.StringIO())
    finally:
        sys.setprofile(None)
    assert code == 0, report["summary"]
    missing = [op for op in SPEC_OPERATIONS if op not in called]
    assert not missing
