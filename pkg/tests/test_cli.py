import json
from pathlib import Path

import pytest
from click.testing import CliRunner

from poissonkit.checks import Options, run_checks
from poissonkit.cli import main
from poissonkit.manifest import FIXTURES, ManifestError, fixture_text, load_fixture

GOLDEN = Path(__file__).parent / "golden"


def invoke(*args):
    return CliRunner().invoke(main, [str(a) for a in args])


def test_gstar_manifest_passes():
    r = invoke("run", "gstar")
    assert r.exit_code == 0, r.output
    assert "FAIL" not in r.output


def test_subcommand_filters_by_kind():
    r = invoke("check", "jacobi", "gstar")
    assert r.exit_code == 0
    assert r.output.count("\n") == 1 and "jacobi-gstar" in r.output


def test_non_poisson_bivector_exits_1_with_witness(tmp_path):
    out = tmp_path / "r.json"
    r = invoke("check", "jacobi", "cyclic", "--json", out)
    assert r.exit_code == 1
    rec = json.loads(out.read_text())["checks"][0]
    assert rec["verdict"] == "FAIL"
    assert len(rec["witness"]["schouten"]["point"]) == 3
    assert rec["witness"]["jacobiator_magnitude_at_witness"] > 1e-6


def test_perturbed_so3_manifest_exits_0():
    # the z^2 perturbation is still Poisson
    assert invoke("check", "jacobi", "so3-perturbed").exit_code == 0


def test_unknown_coordinate_exits_2(tmp_path):
    bad = tmp_path / "bad.toml"
    bad.write_text('[charts.c]\ncoords = ["x", "y"]\n[bivectors.p]\nchart = "c"\nterms = [{ indices = ["x", "y"], coeff = "x*w" }]\n')
    r = invoke("run", bad)
    assert r.exit_code == 2
    assert "'w'" in r.output


@pytest.mark.parametrize(
    "text",
    [
        "not toml [",
        '[bivectors.p]\nchart = "missing"\n',
        '[charts.c]\ncoords = ["x"]\n[[checks]]\nkind = "nonsense"\n',
        '[charts.c]\ncoords = ["x"]\n[[checks]]\nname = "no kind"\n',
    ],
)
def test_malformed_manifests_exit_2(tmp_path, text):
    f = tmp_path / "m.toml"
    f.write_text(text)
    assert invoke("run", f).exit_code == 2


def test_missing_file_exits_2():
    assert invoke("run", "/nonexistent/manifest.toml").exit_code == 2


def test_subcommand_without_applicable_checks_exits_2():
    assert invoke("reduce", "so3").exit_code == 2


def test_default_checks_synthesized(tmp_path):
    f = tmp_path / "m.toml"
    f.write_text(fixture_text("gstar").split("[[checks]]")[0])
    r = invoke("check", "multiplicative", f)
    assert r.exit_code == 0 and "multiplicative-Gstar" in r.output
    assert invoke("dual", f).exit_code == 0


def test_error_verdict_exits_2(tmp_path):
    f = tmp_path / "m.toml"
    f.write_text(fixture_text("so3") + '\n[[checks]]\nkind = "casimir"\nname = "bad"\nbivector = "pi_so3"\nfunction = "x + w"\nstart = [0, 1, 0]\n')
    r = invoke("run", f)
    assert r.exit_code == 2
    assert "ERROR" in r.output


def test_warn_only_fails_with_strict(tmp_path):
    # exp(a/2)^2 = exp(a) is outside the normal form, so the Jacobi tensor is only sampled to zero
    f = tmp_path / "w.toml"
    f.write_text(
        '[charts.c]\ncoords = ["a", "b", "c"]\n'
        '[bivectors.p]\nchart = "c"\nterms = [\n'
        '  { indices = ["a", "b"], coeff = "exp(a/2)^2 - exp(a) + c" },\n'
        '  { indices = ["b", "c"], coeff = "a" },\n'
        '  { indices = ["c", "a"], coeff = "b" },\n]\n'
        '[[checks]]\nkind = "jacobi"\nbivector = "p"\n'
    )
    r = invoke("run", f)
    assert "WARN" in r.output and r.exit_code == 0
    assert invoke("run", f, "--strict").exit_code == 1


@pytest.mark.parametrize("name", ["gstar", "so3", "gstar-case3"])
def test_golden_reports(tmp_path, name):
    out = tmp_path / "r.json"
    invoke("run", name, "--json", out)
    assert out.read_bytes() == (GOLDEN / f"{name}.json").read_bytes()


def test_reports_byte_identical_across_runs_and_parallel(tmp_path):
    for name in FIXTURES:
        blobs = []
        for extra in ([], [], ["--parallel"]):
            out = tmp_path / f"{name}-{len(blobs)}.json"
            invoke("run", name, "--json", out, *extra)
            blobs.append(out.read_bytes())
        assert blobs[0] == blobs[1] == blobs[2], name


def test_report_schema():
    rep = run_checks(load_fixture("gstar"), Options()).as_json()
    assert set(rep) == {"version", "seed", "checks"}
    assert rep["version"] == 1 and rep["seed"] == 42
    for c in rep["checks"]:
        assert set(c) == {"name", "verdict", "witness", "millis"}
        assert c["millis"] == 0


def test_seed_changes_sampled_witness(tmp_path):
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    invoke("check", "jacobi", "cyclic", "--json", a, "--seed", 1)
    invoke("check", "jacobi", "cyclic", "--json", b, "--seed", 2)
    assert json.loads(a.read_text())["seed"] == 1
    assert a.read_bytes() != b.read_bytes()


def test_every_subcommand_runs():
    cases = [
        (["check", "cocycle", "gstar"], 0),
        (["check", "action", "gstar"], 0),
        (["check", "moment", "gstar"], 0),
        (["check", "poisson-map", "gstar"], 0),
        (["dual", "gstar"], 0),
        (["dressing", "gstar"], 0),
        (["reduce", "product"], 0),
        (["leaf", "scan", "so3"], 0),
    ]
    for args, code in cases:
        r = invoke(*args)
        assert r.exit_code == code, (args, r.output)


def test_fixtures_load():
    for name in FIXTURES:
        assert load_fixture(name).checks
    with pytest.raises(ManifestError):
        load_fixture("nope")


def test_timing_flag_records_millis(tmp_path):
    out = tmp_path / "r.json"
    invoke("run", "so3", "--json", out, "--timing")
    checks = json.loads(out.read_text())["checks"]
    assert all(isinstance(c["millis"], int) and c["millis"] >= 0 for c in checks)
    assert any(c["millis"] > 0 for c in checks)
