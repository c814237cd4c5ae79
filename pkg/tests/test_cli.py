import json

import numpy as np
import pytest
from click.testing import CliRunner
from numpy.testing import assert_allclose

from slabscat.amp2d import ScatteringConfig2D, amplitude_2d
from slabscat.cli import load_config, main, validate_config
from slabscat.dyson1d import constant_slab_1d, scattering_1d, transfer_matrix_1d
from slabscat.numerics import DomainError
from slabscat.profiles import gaussian_slab_2d

PRESETS = ("fig3", "fig4", "fig6", "fig7", "fig8")


def _invoke(*args):
    return CliRunner().invoke(main, list(args))


def test_presets_all_validate():
    for name in PRESETS:
        result = _invoke("validate", "--preset", name)
        assert result.exit_code == 0, result.output
        report = json.loads(result.output)
        assert report == {"valid": True, "violations": []}


def test_config_source_exclusivity_and_unknown_preset(tmp_path):
    assert _invoke("run").exit_code == 2
    assert _invoke("run", "--preset", "fig4", "--config", "x.json").exit_code == 2
    assert _invoke("run", "--preset", "fig99").exit_code == 2
    with pytest.raises(DomainError):
        load_config(None, None)


def test_validation_collects_every_violation(tmp_path):
    cfg = {
        "command": "amp2d",
        "profile": {"catalog": "gaussian2d", "z": 1.0},  # L missing
        "physics": {
            "k": -2.0,
            "ell": 0.1,
            "theta0": np.pi / 2,
            "thetas": [],
        },
        "output": {"path": "", "format": "xml"},
    }
    _, violations = validate_config(cfg)
    text = "\n".join(violations)
    for fragment in (
        "profile.L",
        "physics.k",
        "theta0",
        "thetas",
        "output.path",
        "output.format",
    ):
        assert fragment in text, f"missing complaint about {fragment}: {violations}"
    path = tmp_path / "bad.json"
    path.write_text(json.dumps(cfg))
    result = _invoke("run", "--config", str(path))
    assert result.exit_code == 2

    _, empty_grid = validate_config(
        {
            "command": "sweep",
            "domain": "2d",
            "profile": {"catalog": "gaussian2d", "z": 1.0, "L": 1.0},
            "physics": {
                "variable": "kl",
                "grid": {"start": 0.2, "stop": 0.1, "count": 5},
                "ell": 1.0,
                "theta": 0.5,
                "theta0": 0.1,
            },
            "output": {"path": "x.csv"},
        }
    )
    assert any("start exceeds stop" in v for v in empty_grid)


def test_fig4_run_is_deterministic_and_exact(tmp_path):
    out1, out2 = tmp_path / "a.csv", tmp_path / "b.csv"
    for out in (out1, out2):
        result = _invoke("run", "--preset", "fig4", "--out", str(out))
        assert result.exit_code == 0, result.output
    assert out1.read_bytes() == out2.read_bytes()
    header = json.loads(out1.read_text().splitlines()[0][2:])
    assert header["feasible"] is True
    assert_allclose(header["ell_c"], 2.0 + np.sqrt(7.0), rtol=1e-12)
    data = np.loadtxt(str(out1), delimiter=",", skiprows=2)
    assert data.shape == (81, 3)
    assert np.all(data[:, 1:] >= 0.0)


def test_sweep_2d_exact_rows_stop_at_the_support_edge(tmp_path):
    cfg = {
        "command": "sweep",
        "domain": "2d",
        "profile": {"catalog": "ex1", "z": 0.1, "alpha": 500.0, "L": 0.01},
        "physics": {
            "variable": "kl",
            "grid": [0.4, 0.5, 0.6],
            "ell": 0.001,
            "theta": np.pi / 3,
            "theta0": 4 * np.pi / 3,
            "methods": ["order2", "exact"],
        },
        "output": {"path": str(tmp_path / "s.csv"), "format": "csv"},
    }
    path = tmp_path / "cfg.json"
    path.write_text(json.dumps(cfg))
    result = _invoke("run", "--config", str(path))
    assert result.exit_code == 0, result.output
    lines = (tmp_path / "s.csv").read_text().splitlines()
    assert lines[0] == "kl,re_f,im_f,abs2_f,order,method"
    methods = [line.split(",")[-1] for line in lines[1:]]
    # exact is valid for k <= alpha, i.e. kl <= 0.5 here: 2 + 2 + 1 rows
    assert methods == ["order2", "exact", "order2", "exact", "order2"]


def test_amp2d_json_rows_match_the_api(tmp_path):
    thetas = [0.4, 2.8]
    cfg = {
        "command": "amp2d",
        "profile": {"catalog": "gaussian2d", "z": [0.3, 0.05], "L": 1.2},
        "physics": {"k": 1.1, "ell": 0.05, "theta0": 2.5, "thetas": thetas},
        "output": {"path": str(tmp_path / "a.json"), "format": "json"},
    }
    path = tmp_path / "cfg.json"
    path.write_text(json.dumps(cfg))
    result = _invoke("run", "--config", str(path))
    assert result.exit_code == 0, result.output
    payload = json.loads((tmp_path / "a.json").read_text())
    assert payload["columns"][0] == "theta"
    rows = payload["rows"]
    assert len(rows) == 4  # two angles x orders 1, 2
    prof = gaussian_slab_2d(0.3 + 0.05j, 1.2)
    config = ScatteringConfig2D(k=1.1, ell=0.05, theta0=2.5)
    expect = amplitude_2d(prof, config, 0.4, order=2).truncated
    row = rows[1]
    assert row[4] == 2 and row[5] == "order2"
    assert_allclose(row[1] + 1j * row[2], expect, rtol=1e-12)


def test_kernels_check_passes_then_fails_on_absurd_tol(tmp_path):
    cfg = {
        "command": "kernels-check",
        "profile": {"catalog": "gaussian2d", "z": 0.3, "L": 1.2},
        "physics": {"k": 1.1, "ell": 0.05, "theta0": 2.5, "thetas": [0.4]},
        "output": {"path": str(tmp_path / "k.csv"), "format": "csv"},
    }
    path = tmp_path / "cfg.json"
    path.write_text(json.dumps(cfg))
    result = _invoke("run", "--config", str(path))
    assert result.exit_code == 0, result.output
    assert "max deviation" in result.output
    result = _invoke("run", "--config", str(path), "--tol", "1e-16")
    assert result.exit_code == 3


def test_dyson1d_rows_match_the_api(tmp_path):
    cfg = {
        "command": "dyson1d",
        "profile": {"catalog": "uniform1d", "n": 1.5},
        "physics": {"kls": [0.1, 0.2], "ell": 1.0},
        "output": {"path": str(tmp_path / "d.csv"), "format": "csv"},
    }
    path = tmp_path / "cfg.json"
    path.write_text(json.dumps(cfg))
    result = _invoke("run", "--config", str(path))
    assert result.exit_code == 0, result.output
    lines = (tmp_path / "d.csv").read_text().splitlines()
    assert [line.split(",")[-1] for line in lines[1:]] == [
        "R_left", "R_right", "T", "R_left", "R_right", "T",
    ]
    r_left, _, _ = scattering_1d(transfer_matrix_1d(constant_slab_1d(1.5), 0.1, 1.0))
    got = lines[1].split(",")
    assert_allclose(float(got[1]) + 1j * float(got[2]), r_left, rtol=1e-15)


def test_threads_do_not_change_bytes(tmp_path):
    cfg = {
        "command": "sweep",
        "domain": "3d",
        "profile": {"catalog": "gaussian3d", "z": 10.0},
        "physics": {
            "variable": "theta",
            "grid": {"start": 0.0, "stop": np.pi, "count": 8},
            "ell": 1.0,
            "kl": 0.2,
            "theta0": 0.0,
            "kL_values": [1.0],
            "orders": [2],
        },
        "output": {"path": str(tmp_path / "t1.csv"), "format": "csv"},
    }
    path = tmp_path / "cfg.json"
    path.write_text(json.dumps(cfg))
    assert _invoke("run", "--config", str(path)).exit_code == 0
    assert (
        _invoke("run", "--config", str(path), "--threads", "4",
                "--out", str(tmp_path / "t4.csv")).exit_code == 0
    )
    assert (tmp_path / "t1.csv").read_bytes() == (tmp_path / "t4.csv").read_bytes()
