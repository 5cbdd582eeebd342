import json

import pytest

from toricstab.cli import main


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr().out
    return code, out


def test_invariants_catalog_cp2(capsys):
    code, out = run(capsys, "invariants", "--catalog", "cp2", "--family", "cscK")
    assert code == 0
    doc = json.loads(out)
    assert abs(doc["s_hat"] - 6.0) < 1e-10
    assert set(doc) >= {"s_hat", "futaki", "gram", "chi", "a",
                        "backend_discrepancy"}


def test_soliton_matches_oracle(capsys):
    code, out = run(capsys, "soliton", "--catalog", "bl1cp2-reflexive")
    assert code == 0
    doc = json.loads(out)
    assert doc["converged"] and doc["normalization_consistent"]
    assert abs(doc["xi"][0] - doc["oracle_xi"][0]) < 1e-8


def test_validate_reports_diagnostics(tmp_path, capsys):
    bad = {"dim": 2, "facets": [{"normal": [1, 0], "offset": "0"},
                                {"normal": [0, 1], "offset": "0"},
                                {"normal": [-1, -2], "offset": "2"}]}
    path = tmp_path / "bad.json"
    path.write_text(json.dumps(bad))
    code, out = run(capsys, "validate", "--polytope", str(path))
    assert code == 0
    doc = json.loads(out)
    assert not doc["valid"]
    code, _ = run(capsys, "validate", "--polytope", str(path), "--strict")
    assert code == 4


def test_testconfig_df_product_equals_futaki(capsys):
    code, out = run(capsys, "testconfig", "df", "--catalog", "bl1cp2",
                    "--beta", "1,1")
    assert code == 0
    df_val = json.loads(out)["df"]
    code, out = run(capsys, "futaki", "--catalog", "bl1cp2", "--beta", "1,1")
    fut = json.loads(out)["futaki_beta"]
    assert abs(df_val - fut) < 1e-10


def test_testconfig_file_input(tmp_path, capsys):
    tc = {"pieces": [{"gradient": ["0", "0"], "constant": "0"},
                     {"gradient": ["1", "1"], "constant": "-1/2"}]}
    path = tmp_path / "tc.json"
    path.write_text(json.dumps(tc))
    code, out = run(capsys, "testconfig", "destabilize", "--catalog", "cp2",
                    "--tc", str(path))
    assert code == 0
    doc = json.loads(out)
    assert not doc["product"]
    assert doc["chow_T"] > 0


def test_blowup_expand_with_csv(capsys):
    code, out = run(capsys, "blowup-expand", "--catalog", "cp2", "--vertex",
                    "1", "--quantity", "volume", "--csv", "expansion")
    assert code == 0
    lines = out.strip().splitlines()
    assert lines[0] == "eps,exact,predicted"
    assert len(lines) == 9


def test_blowup_expand_eps_flags(capsys):
    code, out = run(capsys, "blowup-expand", "--catalog", "cp1xcp1",
                    "--vertex", "0", "--quantity", "volume",
                    "--eps-max", "1/4", "--eps-points", "6")
    assert code == 0
    doc = json.loads(out)
    assert len(doc["eps"]) == 6
    assert doc["eps"][0] == pytest.approx(1 / 16)


def test_report_determinism(capsys):
    args = ("report", "--catalog", "cp2", "--family", "soliton", "--xi",
            "0.2,0.1", "--sample", "2", "--seed", "3")
    code1, out1 = run(capsys, *args)
    code2, out2 = run(capsys, *args)
    assert code1 == code2 == 0
    assert out1 == out2
    doc = json.loads(out1)
    assert doc["verdict"].startswith("relatively weighted K-semistable")
    assert "sign_convention" in doc


def test_parse_errors_exit_2(capsys):
    code, _ = run(capsys, "invariants", "--catalog", "no-such-polytope")
    assert code == 2
    code, _ = run(capsys, "invariants", "--polytope", "/nonexistent.json")
    assert code == 2


def test_precondition_errors_exit_3(capsys):
    # soliton on a non-reflexive polytope is a precondition violation
    code, _ = run(capsys, "soliton", "--catalog", "cp2")
    assert code == 3


def test_out_file(tmp_path, capsys):
    target = tmp_path / "report.json"
    code, out = run(capsys, "futaki", "--catalog", "cp2", "--beta", "1,0",
                    "--out", str(target))
    assert code == 0 and out == ""
    doc = json.loads(target.read_text())
    assert abs(doc["futaki_beta"]) < 1e-10
    assert set(doc) >= {"s_hat", "futaki", "gram", "chi", "a",
                        "backend_discrepancy"}


def test_verdict_flags_violations():
    from toricstab.report import verdict_line
    ok = verdict_line({}, [{"df_T": 0.5}, {"df_T": 1e-12}])
    assert ok.startswith("relatively weighted K-semistable")
    bad = verdict_line({}, [{"df_T": 0.5}, {"df_T": -1e-3}])
    assert bad.startswith("violation found")


def test_selftest_exit_codes(monkeypatch, capsys):
    from toricstab import acceptance, cli

    def fake_pass(rule):
        return [acceptance.AcceptanceResult("stub", True, "ok")]

    def fake_fail(rule):
        return [acceptance.AcceptanceResult("stub", False, "broken")]

    monkeypatch.setattr(cli.acceptance, "run_all", fake_pass)
    assert main(["selftest"]) == 0
    assert "PASS" in capsys.readouterr().out
    monkeypatch.setattr(cli.acceptance, "run_all", fake_fail)
    assert main(["selftest"]) == 4
    assert "FAIL" in capsys.readouterr().out


def test_report_with_expansions(tmp_path, capsys):
    tc = {"pieces": [{"gradient": ["0", "0"], "constant": "0"},
                     {"gradient": ["1", "1"], "constant": "-1/2"}]}
    path = tmp_path / "tc.json"
    path.write_text(json.dumps(tc))
    code, out = run(capsys, "report", "--catalog", "cp2", "--tc", str(path),
                    "--expand-vertex", "1")
    assert code == 0
    doc = json.loads(out)
    assert len(doc["expansions"]) == 3
    assert all(e["passed"] for e in doc["expansions"])
    assert doc["test_configurations"][0]["df"] > 0


def test_invariants_gram_csv(capsys):
    code, out = run(capsys, "invariants", "--catalog", "cp1xcp1",
                    "--csv", "gram")
    assert code == 0
    rows = [r.split(",") for r in out.strip().splitlines()]
    assert len(rows) == 2 and len(rows[0]) == 2
    assert float(rows[0][0]) == pytest.approx(1 / 12)
