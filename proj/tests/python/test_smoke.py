import json
import os
import subprocess

import numpy as np
import pytest

import skillcompass as sc


def test_normalize_skill():
    assert sc.normalize_skill("  Adobe   Photoshop ") == "adobe photoshop"
    with pytest.raises(sc.SkillCompassError):
        sc.normalize_skill("   ")


def test_parse_profiles_collapses_case_duplicates():
    text = "worker_id,country,wage,earned,skills\nw1,US,30,1200,python|Python\nw2,DE,0,100,python\n"
    profiles, rejected = sc.parse_profiles(text)
    assert len(profiles) == 1
    assert profiles[0]["skills"] == ["python"]
    assert rejected[0]["row"] == 2
    assert rejected[0]["reason"] == "NonPositiveWage"


def test_fit_ols_matches_lstsq():
    rng = np.random.default_rng(7)
    x = np.column_stack([np.ones(60), rng.normal(size=(60, 3))])
    y = x @ np.array([2.0, -1.0, 0.5, 3.0]) + rng.normal(scale=0.3, size=60)
    fit = sc.fit_ols(x, y)
    beta = np.array([c["beta"] for c in fit["coefficients"]])
    ref, *_ = np.linalg.lstsq(x, y, rcond=None)
    assert np.allclose(beta, ref, rtol=1e-10, atol=1e-12)
    assert np.max(np.abs(x.T @ fit["residuals"])) < 1e-6 * np.linalg.norm(y)


def test_louvain_two_cliques():
    edges = [(b * 10 + i, b * 10 + j, 1) for b in range(2) for i in range(10) for j in range(i + 1, 10)]
    out = sc.louvain(20, edges)
    assert len(set(out["assignment"])) == 2
    assert out["modularity"] == pytest.approx(0.5, abs=1e-12)
    assert sc.modularity(20, edges, [0] * 20) == pytest.approx(0.0, abs=1e-12)


@pytest.fixture(scope="module")
def model(tmp_path_factory):
    csv_text, truth = sc.simulate({"seed": 5, "n_workers": 4000})
    path = tmp_path_factory.mktemp("sim") / "profiles.csv"
    path.write_text(csv_text)
    return sc.Model.from_profiles(path, seed=42)


def test_model_queries(model):
    assert model.domain_count == 7
    skills = model.skills()
    assert skills[0]["degree"] >= skills[-1]["degree"]
    assert any(s["key"] == "python" for s in model.skills(prefix="py"))
    grid = model.grid()
    assert {c["domain"] for c in grid["cells"]} >= {"ALL"}
    w = model.what_if(["D2 Skill 01", "D2 Skill 02"], "Java")
    assert w["candidate"] == "java" and "caveat" in w
    recs = model.recommend(["D2 Skill 01"], alpha=1.0)
    deltas = [r["delta"] for r in recs["recommendations"]]
    assert deltas == sorted(deltas, reverse=True)
    with pytest.raises(ValueError):
        model.what_if(["no such skill"], "Java")
    with pytest.raises(ValueError):
        model.what_if(["Java"], "java")


def test_artifact_round_trip(model):
    text = model.dumps()
    again = sc.Model.loads(text)
    assert again.dumps() == text
    tampered = json.loads(text)
    tampered["fit"]["r2"] = 0.5
    with pytest.raises(sc.SkillCompassError):
        sc.Model.loads(json.dumps(tampered))


def test_cli_whatif_matches_module(model, tmp_path):
    cli = os.environ.get("SKILLCOMPASS_CLI")
    if not cli:
        pytest.skip("CLI path not provided")
    path = tmp_path / "model.json"
    model.save(path)
    out = subprocess.run([cli, "whatif", "--artifact", str(path), "--bundle", "D3 Skill 04|D3 Skill 05",
                          "--candidate", "Java", "--json"], check=True, capture_output=True, text=True)
    assert json.loads(out.stdout) == model.what_if(["D3 Skill 04", "D3 Skill 05"], "Java")
