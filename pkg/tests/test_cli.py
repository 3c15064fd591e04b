import json

import pytest

from dashift.cli import run


@pytest.fixture
def scen(tmp_path):
    def make(name, *params):
        path = tmp_path / f"{name}.json"
        args = ["scenario", name, "-o", str(path)]
        for p in params:
            args += ["--param", p]
        assert run(args) == 0
        return str(path)

    return make


def test_eci_on_cmnist(scen, tmp_path):
    c = scen("cmnist_latent")
    out = tmp_path / "eci.json"
    assert run(["eci", "--scenario", c, "--rep", "phi_xz", "-o", str(out)]) == 0
    doc = json.loads(out.read_text())
    assert doc["result"]["holds"] is False
    assert doc["result"]["max_gap"] == pytest.approx(5 / 28, abs=1e-11)
    meta = doc["meta"]
    assert meta["scenario"] == "cmnist_latent" and meta["schema_version"] == 1
    assert {"tool_version", "log_base", "extension"} <= set(meta)


def test_decompose_json_infinity(scen, tmp_path):
    q = scen("quadrants_v1")
    out = tmp_path / "d.json"
    assert run(["decompose", "--scenario", q, "--rep", "phi1", "-o", str(out)]) == 0
    doc = json.loads(out.read_text())
    terms = {t["term"]: t["value"] for t in doc["result"]["terms"]}
    assert terms["kl_term"] == "inf" and terms["target_risk"] == "inf"


def test_decompose_base_two(scen, tmp_path):
    a = scen("axis_target")
    out = tmp_path / "d.json"
    assert run(["decompose", "--scenario", a, "--rep", "phi1", "--base", "2", "-o", str(out)]) == 0
    doc = json.loads(out.read_text())
    assert doc["meta"]["log_base"] == "2"
    terms = {t["term"]: t["value"] for t in doc["result"]["terms"]}
    assert terms["sing_term"] == 1.0


def test_custom_extension_file(scen, tmp_path):
    a = scen("axis_target")
    ext = tmp_path / "ext.json"
    ext.write_text(json.dumps({"x1:zero": [0.25, 0.75]}))
    out = tmp_path / "d.json"
    assert run(["decompose", "--scenario", a, "--rep", "phi1", "--ext", f"file:{ext}", "-o", str(out)]) == 0
    assert json.loads(out.read_text())["meta"]["extension"] == "custom"


def test_invalid_mass_exit_two(scen, tmp_path, capsys):
    q = scen("quadrants_v1")
    d = json.loads(open(q).read())
    d["environments"][0]["atoms"][0][2] = 0.7
    bad = tmp_path / "bad.json"
    bad.write_text(json.dumps(d))
    assert run(["decompose", "--scenario", str(bad), "--rep", "phi1"]) == 2
    assert "'s'" in capsys.readouterr().err


def test_unknown_field_exit_two(scen, tmp_path):
    q = scen("quadrants_v1")
    d = json.loads(open(q).read())
    d["surprise"] = True
    bad = tmp_path / "bad.json"
    bad.write_text(json.dumps(d))
    assert run(["eci", "--scenario", str(bad), "--rep", "phi1"]) == 2


def test_usage_errors_exit_one(scen):
    q = scen("quadrants_v1")
    with pytest.raises(SystemExit) as exc:
        run(["nonsense"])
    assert exc.value.code == 1
    assert run(["decompose", "--scenario", q, "--rep", "missing"]) == 1
    assert run(["irm", "--scenario", q, "--class", "thresholds", "--loss", "hinge"]) == 1


def test_multisource_matrix_csv(scen, capsys):
    c = scen("cmnist_latent")
    assert run(["multisource", "--scenario", c, "--rep", "phi_x", "--matrix"]) == 0
    lines = capsys.readouterr().out.strip().splitlines()
    assert lines[0] == "e,e2,bayes_div,kl,cov_shift,total"
    assert len(lines) == 5


def test_irm_and_equivalence(scen, tmp_path):
    c = scen("cmnist_latent")
    out = tmp_path / "irm.json"
    assert run(["irm", "--scenario", c, "--class", "full", "--loss", "zero-one", "--equivalence", "-o", str(out)]) == 0
    res = json.loads(out.read_text())["result"]
    assert all(o["target_risk"] == 0.9 for o in res["optima"])
    assert res["equivalence"]["a2_satisfied"] is True
    assert res["equivalence"]["inequivalence_witnessed"] is True


def test_hdiv_and_dann(scen, capsys):
    q = scen("quadrants_v1")
    assert run(["hdiv", "--scenario", q, "--class", "thresholds"]) == 0
    assert run(["hdiv", "--scenario", scen("cmnist_latent"), "--class", "label_maps", "--multi"]) == 0
    assert run(["dann", "--scenario", q, "--class", "dann", "--format", "csv"]) == 0
    out = capsys.readouterr().out
    assert "hypothesis,representation,source_risk,d_tv,target_risk" in out


def test_fairness_groups(scen):
    q = scen("quadrants_v1")
    assert run(["fairness", "--scenario", q, "--rep", "phi2", "--groups", "x2:neg;x2:pos"]) == 0


def test_scenario_roundtrip(scen, tmp_path):
    p = scen("memorize_line", "eps=0.1")
    assert json.loads(open(p).read())["manifest"]["eps"] == 0.1
    assert run(["scenario", "memorize_line", "--param", "eps=0.9"]) == 2


def test_json_output_deterministic(scen, tmp_path):
    c = scen("cmnist_latent")
    outs = []
    for i in range(2):
        out = tmp_path / f"m{i}.json"
        run(["multisource", "--scenario", c, "--rep", "phi_xz", "-o", str(out)])
        outs.append(out.read_bytes())
    assert outs[0] == outs[1]


def test_verify_small(tmp_path):
    out = tmp_path / "v.json"
    assert run(["verify", "--suite", "thm1", "--seeds", "0..49", "-o", str(out)]) == 0
    doc = json.loads(out.read_text())
    assert doc["result"]["passed"] is True
    assert run(["verify", "--seeds", "5..1"]) == 1
