"""CLI: space grammar, commands, formats, exit codes, determinism."""

import json
import subprocess
import sys

import numpy as np
import pytest

from calabi_lab.cli import SpaceParseError, main, parse_space
from calabi_lab.model_spaces import SpaceDescriptor
from calabi_lab.report import validate_report


def test_parse_space_grammar():
    d = parse_space("chsc:n=3,c=1")
    assert d == SpaceDescriptor("chsc", n=3, c=1.0)
    assert parse_space("quadric:n=4").variant == "quadric"
    assert parse_space("flat:k=2").n == 2
    assert parse_space("random:n=3,seed=9").seed == 9
    assert parse_space("randomke:n=2,seed=1").variant == "random_ke"
    prod = parse_space("product:[chsc:n=1,c=2;flat:k=1]")
    assert prod.variant == "product"
    assert prod.complex_dim == 2
    nested = parse_space("product:[product:[chsc:n=1;chsc:n=1];flat:k=1]")
    assert nested.complex_dim == 3


@pytest.mark.parametrize("bad", [
    "bogus:n=1",
    "chsc:n=zero",
    "chsc:n",
    "product:chsc:n=1",
    "quadric:n=1",
    "",
])
def test_parse_space_errors(bad):
    with pytest.raises((SpaceParseError, ValueError)):
        parse_space(bad)


def test_parse_space_error_reports_position():
    with pytest.raises(SpaceParseError) as err:
        parse_space("bogus:n=1")
    assert "position" in str(err.value)


def run_cli(args, tmp_path=None):
    return main(args)


def test_spectrum_command_chsc(tmp_path, capsys):
    out = tmp_path / "spec.json"
    code = main(["spectrum", "--space", "chsc:n=3,c=1", "--format", "json",
                 "--out", str(out)])
    assert code == 0
    env = json.loads(out.read_text())
    assert validate_report(env) == []
    vals = env["records"][0]["values"]["eigenvalues"]
    np.testing.assert_allclose(vals, 1.0, atol=1e-12)


def test_spectrum_command_quadric_flags(tmp_path):
    out = tmp_path / "spec.json"
    assert main(["spectrum", "--space", "quadric:n=4", "--format", "json",
                 "--out", str(out)]) == 0
    env = json.loads(out.read_text())
    ladder = {r["values"]["k"]: r["values"] for r in env["records"][1:]}
    # n/2-nonnegative but not n/2-positive (exact zero partial sum)
    assert abs(ladder[2.0]["partial_sum"]) < 1e-10


def test_spectrum_flat_zero(tmp_path):
    out = tmp_path / "spec.json"
    assert main(["spectrum", "--space", "flat:k=2", "--format", "json",
                 "--out", str(out)]) == 0
    env = json.loads(out.read_text())
    assert all(v == 0.0 for v in env["records"][0]["values"]["eigenvalues"])


def test_thresholds_command(tmp_path):
    out = tmp_path / "thr.json"
    assert main(["thresholds", "--n", "6", "--format", "json", "--out", str(out)]) == 0
    env = json.loads(out.read_text())
    rows = {(r["values"]["p"], r["values"]["q"]): r["values"]
            for r in env["records"] if r["name"].startswith("threshold")}
    assert rows[(1, 1)]["upsilon"] == 3.0
    assert rows[(1, 1)]["upsilon_exact"] == {"num": 3, "den": 1}
    assert rows[(6, 0)]["gamma"] == {"num": 35, "den": 6}


def test_certify_command_chsc_and_quadric(tmp_path):
    out = tmp_path / "cert.json"
    assert main(["certify", "--space", "chsc:n=3,c=1", "--mode", "calabi",
                 "--format", "json", "--out", str(out)]) == 0
    env = json.loads(out.read_text())
    assert env["records"][0]["values"]["summary_certified"] is True

    assert main(["certify", "--space", "quadric:n=4", "--mode", "calabi",
                 "--format", "json", "--out", str(out)]) == 0
    env = json.loads(out.read_text())
    summary = env["records"][0]["values"]
    assert summary["summary_certified"] is False
    verdicts = {(r["values"]["p"], r["values"]["q"]): r["values"]["status"]
                for r in env["records"][1:]}
    assert verdicts[(1, 1)] == "parallel-only"


def test_certify_ke_command(tmp_path):
    out = tmp_path / "cert.json"
    assert main(["certify", "--space", "randomke:n=3,seed=4", "--mode", "ke",
                 "--format", "json", "--out", str(out)]) == 0
    env = json.loads(out.read_text())
    assert env["records"][0]["values"]["mode"] == "ke"


def test_certify_ke_refuses_non_einstein(tmp_path, capsys):
    code = main(["certify", "--space", "product:[chsc:n=1,c=1;chsc:n=1,c=2]",
                 "--mode", "ke"])
    assert code == 2
    assert "Einstein" in capsys.readouterr().err


def test_usage_error_exit_code(capsys):
    assert main(["spectrum", "--space", "bogus:n=1"]) == 2
    with pytest.raises(SystemExit) as exc:
        main(["nonsense"])
    assert exc.value.code == 2


def test_file_input_calabi(tmp_path):
    m = 3
    h = np.array([[2.0, 0.5 + 0.25j, 0.0],
                  [0.5 - 0.25j, 1.0, 0.1j],
                  [0.0, -0.1j, 1.5]])
    tri = [[h[i, j].real, h[i, j].imag] for i in range(m) for j in range(i, m)]
    path = tmp_path / "cal.json"
    path.write_text(json.dumps({"kind": "calabi", "n": 2, "hermitian": tri}))
    out = tmp_path / "spec.json"
    assert main(["spectrum", "--space", f"file:{path}", "--format", "json",
                 "--out", str(out)]) == 0
    env = json.loads(out.read_text())
    np.testing.assert_allclose(env["records"][0]["values"]["eigenvalues"],
                               np.linalg.eigvalsh(h), atol=1e-10)


def test_file_input_components(tmp_path):
    # constant holomorphic sectional curvature written out sparsely
    from calabi_lab.model_spaces import chsc

    t = chsc(2, 1.0)
    d = 4
    entries = []
    for i in range(d):
        for j in range(i + 1, d):
            for k in range(d):
                for l in range(k + 1, d):
                    v = t.components[i, j, k, l]
                    if abs(v) > 1e-14:
                        entries.append([i + 1, j + 1, k + 1, l + 1, float(v)])
    path = tmp_path / "comp.json"
    path.write_text(json.dumps({"kind": "components", "n": 2, "entries": entries}))
    out = tmp_path / "spec.json"
    assert main(["spectrum", "--space", f"file:{path}", "--format", "json",
                 "--out", str(out)]) == 0
    env = json.loads(out.read_text())
    np.testing.assert_allclose(env["records"][0]["values"]["eigenvalues"], 1.0,
                               atol=1e-10)


def test_file_input_bad_schema(tmp_path, capsys):
    path = tmp_path / "bad.json"
    path.write_text(json.dumps({"kind": "calabi", "n": 2, "hermitian": [[1.0, 0.0]]}))
    assert main(["spectrum", "--space", f"file:{path}"]) == 2
    path.write_text(json.dumps({"kind": "wrong", "n": 2}))
    assert main(["spectrum", "--space", f"file:{path}"]) == 2


def test_csv_format_columns(tmp_path):
    out = tmp_path / "t.csv"
    assert main(["thresholds", "--n", "2", "--format", "csv", "--out", str(out)]) == 0
    header = out.read_text().splitlines()[0]
    assert header == "name,anchor,status,residual,value"


def test_verify_small_and_exit_codes(tmp_path):
    out = tmp_path / "v.json"
    code = main(["verify", "--n", "2", "--trials", "5", "--seed", "3",
                 "--format", "json", "--out", str(out)])
    assert code == 0
    env = json.loads(out.read_text())
    assert env["passed"] is True
    assert validate_report(env) == []
    # the injected sign bug must make the suite fail loudly
    code = main(["verify", "--n", "2", "--trials", "5", "--seed", "3",
                 "--inject-sign-bug", "--format", "json", "--out", str(out)])
    assert code == 1
    env = json.loads(out.read_text())
    failing = {r["name"] for r in env["records"] if r["status"] == "fail"}
    assert "curvature_term_via_calabi" in failing


def test_verify_json_byte_determinism_across_processes(tmp_path):
    """Identical config gives byte-identical json even across interpreter
    processes with different hash seeds."""
    outputs = []
    for seed in ("0", "7"):
        proc = subprocess.run(
            [sys.executable, "-m", "calabi_lab.cli", "verify", "--n", "2",
             "--trials", "8", "--seed", "11", "--format", "json"],
            capture_output=True, text=True,
            env={"PYTHONHASHSEED": seed, "PATH": "/usr/bin:/bin:/usr/local/bin"},
        )
        assert proc.returncode == 0, proc.stderr
        outputs.append(proc.stdout)
    assert outputs[0] == outputs[1]


def test_shipped_schema_files_parse():
    import importlib.resources as res

    for name in ("report.schema.json", "input.schema.json"):
        payload = json.loads(
            res.files("calabi_lab").joinpath("schemas", name).read_text())
        assert "$schema" in payload


def test_threshold_and_certify_filters(tmp_path):
    out = tmp_path / "f.json"
    assert main(["thresholds", "--n", "4", "--p", "1", "--q", "1",
                 "--format", "json", "--out", str(out)]) == 0
    env = json.loads(out.read_text())
    rows = [r for r in env["records"] if r["name"].startswith("threshold")]
    assert len(rows) == 1 and rows[0]["values"]["upsilon"] == 2.0

    assert main(["certify", "--space", "quadric:n=4", "--p", "2", "--q", "2",
                 "--format", "json", "--out", str(out)]) == 0
    env = json.loads(out.read_text())
    verdicts = [r for r in env["records"] if r["name"].startswith("verdict")]
    assert len(verdicts) == 1
    assert verdicts[0]["values"]["status"] == "parallel-only"


def test_verify_tol_scale(tmp_path):
    out = tmp_path / "v.json"
    # an absurdly small tolerance scale must fail the suite
    code = main(["verify", "--n", "2", "--trials", "5", "--seed", "3",
                 "--tol-scale", "1e-20", "--format", "json", "--out", str(out)])
    assert code == 1
    env = json.loads(out.read_text())
    assert env["passed"] is False
