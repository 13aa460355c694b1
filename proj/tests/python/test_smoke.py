import json
import os
import pathlib
import subprocess

import pytest

import oscillab

CONFIGS = pathlib.Path(__file__).resolve().parents[2] / "configs"


def test_matched_shear_values():
    law = oscillab.matched_shear(0.5, 2.0)
    assert law(0.5) == pytest.approx(3.5, abs=1e-12)
    assert law(1.0) == pytest.approx(5.5, abs=1e-12)
    assert oscillab.matching_residual(law, "shear", 0.5, 2.0) <= 1e-12
    back = oscillab.Law.from_json(law.to_json())
    assert back.hash() == law.hash()


def test_roots_and_series():
    plus, minus = oscillab.amplitude_roots(1.0, 1.0, 10.0)
    assert plus + minus == pytest.approx(-100.0)
    assert plus * minus == pytest.approx(100.0)
    assert abs(plus - oscillab.slow_root_series(1.0, 1.0, 10.0)) < 1e-3


def test_columns():
    xi = [i * 0.01 for i in range(301)]
    tp = oscillab.two_point_column(0.5, 1.0, 2.0, xi)
    assert oscillab.column_spread(xi, tp) == pytest.approx(0.25)
    assert oscillab.column_distance(xi, tp, tp) == 0.0


def test_frozen_phase_separation():
    xi = [-2.0 + 4.0 * i / 800 for i in range(801)]
    F0 = [min(max(x + 0.5, 0.0), 1.0) for x in xi]
    r = oscillab.frozen_kinetics(xi, F0, oscillab.cubic(), 0.0, 20.0)
    assert r["distance_to_limit"] <= 0.01
    assert r["weights"][0] == pytest.approx(0.5)


def test_run_and_validate(tmp_path):
    plan = oscillab.validate(str(CONFIGS / "modes-roots.toml"))
    assert len(plan) == 4
    res = oscillab.run(str(CONFIGS / "modes-roots.toml"), out=str(tmp_path))
    assert res["all_passed"]
    manifest = json.loads((pathlib.Path(res["dir"]) / "manifest.json").read_text())
    assert manifest["name"] == "modes-roots"


def test_bad_config_raises(tmp_path):
    bad = tmp_path / "bad.toml"
    bad.write_text('kind = "direct"\nmode = "shear"\n')
    with pytest.raises(ValueError):
        oscillab.validate(str(bad))


@pytest.mark.skipif("OSCILLAB_CLI" not in os.environ, reason="CLI path not provided")
def test_cli_exit_codes(tmp_path):
    cli = os.environ["OSCILLAB_CLI"]
    ok = subprocess.run([cli, "validate", str(CONFIGS / "law-cubic.toml")], capture_output=True)
    assert ok.returncode == 0
    bad = tmp_path / "bad.toml"
    bad.write_text('kind = "direct"\nmode = "shear"\n')
    r = subprocess.run([cli, "validate", str(bad)], capture_output=True)
    assert r.returncode == 2
