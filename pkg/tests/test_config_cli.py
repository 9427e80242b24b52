import json
import math

import numpy as np
import pytest

from defmatch.cli import main
from defmatch.config import load_settings, parse_config, settings_from_mapping
from defmatch.image import crop, load_pgm, save_pgm
from defmatch.testimage import RECOVERY_RECT, SURFACE_RECT, make_test_image


# ---------------------------------------------------------------------------
# config files


def test_parse_config_basics():
    raw = parse_config(
        """
        # comment line
        sigma_ab = 1.5
        tau = 0.2   # trailing comment
        simplex.max_iters = 500
        """
    )
    assert raw == {"sigma_ab": "1.5", "tau": "0.2", "simplex.max_iters": "500"}


def test_settings_from_mapping():
    s = settings_from_mapping(
        {
            "sigma_ab": "1.5",
            "w": "0.1",
            "sigma_s": "2.0",
            "b": "0.25",
            "phibar": "0.1",
            "tau": "0.2",
            "coverage_floor": "0.3",
            "match_threshold": "0.4",
            "simplex.reflection": "1.0",
            "simplex.expansion": "2.5",
            "simplex.max_iters": "500",
            "simplex.restarts": "1",
            "simplex.f_tol": "1e-10",
            "simplex.init_steps": "0.1,0.1,0.05,0.05,1,1,0.01,0.01,0.05,0.05,1,1",
        }
    )
    assert s.hyper.sigma_ab == 1.5
    assert s.hyper.w_num == 0.1
    assert s.simplex.expansion == 2.5
    assert s.simplex.max_iters == 500
    assert s.simplex.restarts == 1
    assert len(s.simplex.init_steps) == 12
    assert s.coverage_floor == 0.3
    assert s.match_threshold == 0.4


def test_unknown_key_rejected():
    with pytest.raises(ValueError, match="unknown config key"):
        settings_from_mapping({"sigma": "1.0"})
    with pytest.raises(ValueError, match="unknown config key"):
        settings_from_mapping({"simplex.bogus": "1.0"})


def test_malformed_lines_rejected():
    with pytest.raises(ValueError):
        parse_config("just words\n")
    with pytest.raises(ValueError):
        parse_config("tau =\n")
    with pytest.raises(ValueError):
        parse_config("tau = 1\ntau = 2\n")


def test_invalid_hyper_rejected_before_use():
    with pytest.raises(ValueError):
        settings_from_mapping({"sigma_s": "0"})


def test_load_settings_defaults():
    s = load_settings(None)
    assert s.hyper.tau == 0.1
    assert s.simplex.max_iters == 2000
    assert s.coverage_floor == 0.25


def test_load_settings_file(tmp_path):
    path = tmp_path / "run.cfg"
    path.write_text("tau = 0.25\nsigma_s = 6\n")
    s = load_settings(path)
    assert s.hyper.tau == 0.25
    assert s.hyper.sigma_s == 6.0


# ---------------------------------------------------------------------------
# CLI


@pytest.fixture(scope="module")
def scene_pgm(tmp_path_factory):
    root = tmp_path_factory.mktemp("cli")
    img = make_test_image()
    scene = root / "scene.pgm"
    save_pgm(img, scene)
    tmpl = root / "tmpl.pgm"
    save_pgm(crop(img, SURFACE_RECT), tmpl)
    rich = root / "rich.pgm"
    save_pgm(crop(img, RECOVERY_RECT), rich)
    return scene, tmpl, rich


def test_cli_testimage_roundtrip(tmp_path):
    out = tmp_path / "scene.pgm"
    assert main(["testimage", str(out)]) == 0
    img = load_pgm(out)
    assert img.width == 256 and img.height == 256


def test_cli_synth_deterministic_bytes(scene_pgm, tmp_path):
    scene, _, _ = scene_pgm
    r1 = tmp_path / "r1.json"
    r2 = tmp_path / "r2.json"
    assert main(["synth", str(scene), "--seed", "7", "--out", str(r1)]) == 0
    assert main(["synth", str(scene), "--seed", "7", "--out", str(r2)]) == 0
    assert r1.read_bytes() == r2.read_bytes()
    doc = json.loads(r1.read_text())
    assert doc["seed"] == 7
    assert set(doc) == {"seed", "rect", "actual", "estimated", "absolute_deviation", "match"}
    assert doc["match"]["decision"] in ("matched", "not-matched")


def test_cli_synth_explicit_xi_and_rect(scene_pgm, tmp_path):
    scene, _, _ = scene_pgm
    out = tmp_path / "rep.json"
    code = main([
        "synth", str(scene),
        "--rect", "88,88,80,80",
        "--xi", "theta=0.05,s_x=1.02",
        "--out", str(out),
    ])
    assert code == 0
    doc = json.loads(out.read_text())
    assert doc["rect"] == [88, 88, 80, 80]
    assert doc["actual"]["theta"] == 0.05
    assert doc["actual"]["s_x"] == 1.02
    assert doc["absolute_deviation"]["theta"] < 1.0


def test_cli_surface_csv(scene_pgm, tmp_path):
    scene, tmpl, _ = scene_pgm
    out = tmp_path / "grid.csv"
    code = main([
        "surface", str(scene), str(tmpl),
        "--params", "s_x,s_y", "--range", "0.8,1.2", "--samples", "5",
        "--kind", "raw", "--place", "160,32", "--out", str(out),
    ])
    assert code == 0
    lines = out.read_text().strip().splitlines()
    assert lines[0].startswith("s_x,")
    assert lines[1].startswith("s_y,")
    assert len(lines) == 2 + 5
    values = np.array([[float(t) for t in ln.split(",")] for ln in lines[2:]])
    assert values.max() == 1.0


def test_cli_match_report(scene_pgm, tmp_path):
    scene, _, rich = scene_pgm
    out = tmp_path / "match.json"
    code = main(["match", str(scene), str(rich), "--stride", "2", "--out", str(out)])
    assert code == 0
    doc = json.loads(out.read_text())
    assert doc["decision"] == "matched"
    # the stride-2 grid need not contain the exact origin
    assert abs(doc["placement"][0] - RECOVERY_RECT.x0) <= 1
    assert abs(doc["placement"][1] - RECOVERY_RECT.y0) <= 1
    assert abs(doc["params"]["s_x"] - 1.0) < 0.05
    assert doc["objective"]["iterations"] > 0


def test_cli_priors_check_exit_code(capsys):
    assert main(["priors-check", "--samples", "5000"]) == 0
    out = capsys.readouterr().out
    assert out.endswith("OK\n")


def test_cli_config_plumbs_through(scene_pgm, tmp_path):
    scene, _, _ = scene_pgm
    cfg = tmp_path / "fast.cfg"
    cfg.write_text("simplex.max_iters = 40\nsimplex.init_steps = "
                   "0.05,0.05,0.035,0.035,1,1,0.005,0.005,0.05,0.05,1,1\n")
    out = tmp_path / "rep.json"
    code = main(["synth", str(scene), "--rect", "88,88,80,80", "--seed", "1",
                 "--config", str(cfg), "--out", str(out)])
    assert code == 0


def test_cli_rejects_bad_config(scene_pgm, tmp_path):
    scene, _, _ = scene_pgm
    cfg = tmp_path / "bad.cfg"
    cfg.write_text("sigma_s = 0\n")
    with pytest.raises(ValueError):
        main(["priors-check", "--config", str(cfg)])
