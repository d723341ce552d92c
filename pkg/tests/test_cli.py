import json

import pytest

from parahoric.cli import main


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def test_slopes_gsp4_siegel_example(capsys):
    code, out, _ = run(
        capsys, "slopes", "--group", "GSp4", "--Q", "siegel",
        "--weight", "k1=5,k2=2", "--vals", "1",
    )
    assert code == 0
    assert "noncritical" in out
    assert "3" in out  # h_crit = k2 + 1


def test_slopes_gl3_borel_json(capsys):
    code, out, _ = run(
        capsys, "slopes", "--group", "GL3", "--Q", "borel",
        "--weight", "2,1,0", "--vals", "0,0", "--format", "json",
    )
    assert code == 0
    payload = json.loads(out)
    assert payload["noncritical"] is True
    assert [s["h_crit"] for s in payload["steps"]] == [2, 2]
    assert payload["precision"] == "exact"


def test_slopes_failing_verdict_exits_one(capsys):
    code, out, _ = run(
        capsys, "slopes", "--group", "GL2", "--Q", "borel",
        "--weight", "3,0", "--vals", "4",
    )
    assert code == 1
    assert "critical" in out


def test_slopes_missing_vals_is_usage_error():
    with pytest.raises(SystemExit) as exc:
        main(["slopes", "--group", "GL3", "--Q", "borel", "--weight", "2,1,0"])
    assert exc.value.code == 2


def test_slopes_bad_weight_is_usage_error(capsys):
    code, _, err = run(
        capsys, "slopes", "--group", "GL3", "--Q", "borel",
        "--weight", "0,1,0", "--vals", "0,0",
    )
    assert code == 2
    assert "dominant" in err


def test_bgg_check_example(capsys):
    code, out, _ = run(
        capsys, "bgg-check", "--group", "GL2", "--k", "3", "--d", "8",
        "--format", "json",
    )
    assert code == 0
    payload = json.loads(out)
    assert payload["dim_kernel"] == 4
    assert payload["pass"] is True


def test_lift_ordinary_example(capsys):
    code, out, _ = run(
        capsys, "lift", "--N", "11", "--p", "3", "--k", "0", "--M", "6",
        "--eigenvalue-choice", "ordinary",
    )
    assert code == 0
    payload = json.loads(out)
    assert payload["converged"] is True
    assert payload["specialization_check"] is True
    ev = payload["eigenvalue"]
    assert (ev["value"] ** 2 + ev["value"] + 3) % 3 ** ev["precision"] == 0
    assert payload["stabilization"]["norm"] == 3  # v(norm) = k + 1


def test_lift_critical_choice_rejected(capsys):
    code, out, _ = run(
        capsys, "lift", "--N", "11", "--p", "3", "--k", "0", "--M", "6",
        "--eigenvalue-choice", "slope:1",
    )
    assert code == 1
    payload = json.loads(out)
    assert payload["converged"] is False
    assert "noncritical" in payload["error"]


def test_lift_env_precision(capsys, monkeypatch):
    monkeypatch.setenv("PARAHORIC_PRECISION", "5")
    code, out, _ = run(capsys, "lift", "--N", "11", "--p", "3", "--k", "0")
    assert code == 0
    assert json.loads(out)["M"] == 5


def test_charpoly_csv_deterministic(capsys):
    args = ("charpoly", "--N", "11", "--p", "3", "--k", "0", "--M", "6",
            "--xdeg", "6")
    code1, out1, _ = run(capsys, *args)
    code2, out2, _ = run(capsys, *args)
    assert code1 == code2 == 0
    assert out1 == out2
    lines = out1.strip().splitlines()
    assert lines[0] == "record,index,value,precision,certified"
    assert any(line.startswith("slope,") for line in lines)


def test_charpoly_requires_weight_choice():
    with pytest.raises(SystemExit) as exc:
        main(["charpoly", "--N", "11", "--p", "3", "--M", "6"])
    assert exc.value.code == 2


def test_charpoly_family_layers(capsys):
    code, out, _ = run(
        capsys, "charpoly", "--N", "11", "--p", "3", "--disc-center", "0",
        "--M", "5", "--xdeg", "4", "--T", "2",
    )
    assert code == 0
    assert "1.1" in out  # w-layer coefficient rows present


def test_catalog_lists_builtins(capsys):
    code, out, _ = run(capsys, "catalog", "--format", "json")
    assert code == 0
    payload = json.loads(out)
    names = [g["name"] for g in payload["groups"]]
    assert "GL2" in names and "GSp4" in names
    assert "custom_schema" in payload


def test_custom_group_json_file(tmp_path, capsys):
    f = tmp_path / "datum.json"
    f.write_text(json.dumps({
        "name": "A1-doubled", "rank": 1,
        "simple_roots": [[2]], "coroots": [[1]],
    }))
    code, out, _ = run(
        capsys, "slopes", "--group", str(f), "--Q", "borel",
        "--weight", "3", "--vals", "2", "--format", "json",
    )
    assert code == 0
    payload = json.loads(out)
    assert payload["steps"][0]["h_crit"] == 8
