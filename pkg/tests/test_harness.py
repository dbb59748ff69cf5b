import json
import subprocess
import sys

import pytest
from hypothesis import given
from hypothesis import strategies as st

from elliptica import cli
from elliptica.fock import KINDS, Y, Y1, FockState
from elliptica.harness import (SUITES, ConfigError, HarnessConfig, parse_config, resolve_threads, run_suite,
                               sample_states, suite_cases)


def test_count_one_prepends_vacua():
    got = sample_states(7, 1, 2, 3)
    assert len(got) == 3
    assert got[:2] == [FockState.vacuum(0), FockState.vacuum(1)]


def test_sampling_is_deterministic():
    assert sample_states(11, 20, 3, 4) == sample_states(11, 20, 3, 4)
    assert sample_states(11, 20, 3, 4) != sample_states(12, 20, 3, 4)


@given(seed=st.integers(0, 2**64 - 1), degree=st.integers(1, 4), window=st.integers(1, 5))
def test_sample_bounds(seed, degree, window):
    for s in sample_states(seed, 5, degree, window)[2:]:
        assert len(s) == 1
        (mono, _), c = next(iter(s.terms.items()))
        assert 1 <= sum(e for _, e in mono) <= degree
        assert all(abs(n) <= window for (_, n), _ in mono)
        assert all(n <= -1 for (k, n), _ in mono if k in (Y, Y1))
        assert c.is_constant() and c.constant_value() in {-3, -2, -1, 1, 2, 3}


def test_sample_sectors_restrict_variables():
    for s in sample_states(3, 10, 3, 2, ("x", "x1"), vcomps=(0,))[2:]:
        assert all(KINDS[k] in ("x", "x1") for k, _ in s.support_vars())


def test_sample_rejects_zero_count():
    with pytest.raises(ValueError):
        sample_states(0, 0, 1, 1)


def test_parse_config_fields():
    cfg = parse_config("""
        # comment
        seed = 42
        window = 2
        window.heisenberg = 5
        degree.realize = 1
        variant = mixed
        r = 0
        chi0 = 3/2
        split_level = yes
        phi.t^0 = 1
    """)
    assert cfg.seed == 42 and cfg.window("jacobi") == 2 and cfg.window("heisenberg") == 5
    assert cfg.degree_for("realize") == 1 and cfg.degree_for("heisenberg") == 3
    assert cfg.module_params().chi0.constant_value() == 1.5
    assert cfg.split_level and dict(cfg.phi) == {"t^0": "1"}


@pytest.mark.parametrize("text, fragment", [
    ("seed = 1\nwindow = x", "<config>:2: field 'window': invalid integer 'x'"),
    ("seed = 1\n\nbogus = 3", "<config>:3: unknown key 'bogus'"),
    ("r = 3", "<config>:1: field 'r'"),
    ("window.nosuch = 2", "<config>:1: unknown suite 'nosuch'"),
    ("chi0 = 1/0", "<config>:1: field 'chi0'"),
    ("just text", "<config>:1: expected key = value"),
    ("count = 0", "<config>:1: field 'count'"),
])
def test_parse_config_errors(text, fragment):
    with pytest.raises(ConfigError) as exc:
        parse_config(text)
    assert fragment in str(exc.value)


def test_default_variant_follows_r():
    assert HarnessConfig(r=0).variant == "mixed"
    assert HarnessConfig(r=1).variant == "original"
    assert HarnessConfig(r=0, heis_variant="original").variant == "original"


def test_threads_env_override(monkeypatch):
    monkeypatch.setenv("ELLIPTICA_THREADS", "3")
    assert resolve_threads(HarnessConfig(threads=1)) == 3
    monkeypatch.setenv("ELLIPTICA_THREADS", "zero")
    with pytest.raises(ConfigError):
        resolve_threads(HarnessConfig())


def test_twodim_document():
    doc = run_suite("twodim", HarnessConfig())
    assert doc.ok
    case = next(c for c in doc.cases if c["case"] == "constraints")
    assert case["got"]["determinant_p2q3_minus_p3q2"] == "1/35"
    assert "1/35" in doc.dumps()


def test_grading_w4_passes():
    assert run_suite("grading", HarnessConfig(windows=(("grading", 4),))).ok


def test_report_only_suites_never_fail():
    doc = run_suite("jacobi", HarnessConfig(constants_source="paper", windows=(("jacobi", 1),)))
    assert doc.ok and doc.summary["report_only"] == 2
    assert all(c["verdict"] == "report" for c in doc.cases)


def test_unknown_suite():
    with pytest.raises(ConfigError):
        run_suite("nosuch", HarnessConfig())
    with pytest.raises(ConfigError):
        suite_cases("nosuch", HarnessConfig())


@pytest.mark.parametrize("suite", ["pollaczek", "twodim", "borel", "jk-compare"])
def test_byte_identical_across_runs_and_widths(suite):
    cfg = HarnessConfig(seed=5, windows=(("*", 2),))
    first = run_suite(suite, cfg, threads=1).dumps()
    assert run_suite(suite, cfg, threads=1).dumps() == first
    assert run_suite(suite, cfg, threads=2).dumps() == first


def test_document_has_no_thread_field():
    a = run_suite("twodim", HarnessConfig(threads=1)).dumps()
    b = run_suite("twodim", HarnessConfig(threads=4), threads=1).dumps()
    assert a == b


def test_case_records_have_required_fields():
    doc = run_suite("pollaczek", HarnessConfig()).to_json()
    assert doc["tool"] == "elliptica" and doc["version"]
    for c in doc["cases"]:
        assert set(c) == {"case", "asserted", "inputs", "expected", "got", "verdict"}
    assert set(doc["certificates"]) == {"crosscheck", "gf_ode", "spotcheck"}


def test_suite_catalogue():
    assert set(SUITES) == {"pollaczek", "cocycle", "jacobi", "grading", "borel", "heisenberg", "twodim",
                           "realize", "calibrate", "jk", "jk-compare"}


def test_cli_summary_is_last_line(capsys):
    code = cli.main(["twodim"])
    out = capsys.readouterr().out.rstrip("\n").split("\n")
    assert code == 0
    assert out[-1].startswith("SUMMARY suite=twodim") and out[-1].endswith("status=ok")
    doc = json.loads("\n".join(out[:-1]))
    assert doc["summary"]["failed"] == 0


def test_cli_algebra_check_and_json_file(tmp_path, capsys):
    out = tmp_path / "r.json"
    code = cli.main(["algebra", "--check", "borel", "--window", "2", "--json", str(out)])
    assert code == 0
    assert json.loads(out.read_text())["suite"] == "borel"
    assert capsys.readouterr().out.splitlines()[-1].startswith("SUMMARY suite=borel")


def test_cli_pollaczek_table(capsys):
    assert cli.main(["pollaczek", "--kmax", "4", "--ode-order", "3"]) == 0
    text = capsys.readouterr().out.rsplit("SUMMARY", 1)[0]
    rows = next(c for c in json.loads(text)["cases"] if c["case"] == "crosscheck")["got"]["printed_parameters"]["rows"]
    assert [r["k"] for r in rows] == [0, 1, 2, 3, 4]
    assert set(rows[0]) == {"k", "p", "q", "oracle_p", "oracle_q", "agree"}


def test_cli_jk_phi_file(tmp_path, capsys):
    phi = tmp_path / "phi.json"
    phi.write_text(json.dumps({"t^0": "1", "u t^-1": "2/3"}))
    assert cli.main(["jk", "--compare", "--window", "1", "--human"]) == 0
    assert "PASS   compare" in capsys.readouterr().out
    cfg = cli.build_config(cli.build_parser().parse_args(["jk", "--phi", str(phi)]), "jk")
    assert dict(cfg.phi) == {"t^0": "1", "u t^-1": "2/3"}


def test_cli_config_error_exit_code(tmp_path, capsys):
    bad = tmp_path / "c.cfg"
    bad.write_text("seed = 1\nwindow = -\n")
    assert cli.main(["twodim", "--config", str(bad)]) == 2
    captured = capsys.readouterr()
    assert f"{bad}:2: field 'window'" in captured.err
    assert captured.out.splitlines()[-1] == "SUMMARY suite=twodim status=error"


def test_cli_usage_errors():
    with pytest.raises(SystemExit):
        cli.main(["algebra"])
    with pytest.raises(SystemExit):
        cli.main(["twodim", "--check", "jacobi"])


def test_cli_failing_assertion_exits_one(capsys):
    code = cli.main(["realize", "--r", "0", "--window", "1", "--count", "1", "--human"])
    lines = capsys.readouterr().out.splitlines()
    # the e-sector relations of the r = 0 mixed module are not scalar for symbolic chi0
    assert code == 1 and lines[-1].endswith("status=fail")
    assert "FAIL   relation:e,e" in lines


def test_console_script_entry_point():
    proc = subprocess.run([sys.executable, "-m", "elliptica.cli", "twodim", "--human"], capture_output=True,
                          text=True, check=False)
    assert proc.returncode == 0
    assert proc.stdout.splitlines()[-1].startswith("SUMMARY")
