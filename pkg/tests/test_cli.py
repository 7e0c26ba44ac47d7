import json
import math
import os

import numpy as np
import pytest

from srq.cli import (
    EXIT_CONFIG,
    EXIT_IO,
    EXIT_OK,
    EXIT_SOLVER,
    EXIT_VERIFY_FAIL,
    SchemaError,
    main,
    parse_config,
    read_csv,
)
from srq.dynamics import steady_state
from srq.model import ChainParams, build_liouvillian

MINIMAL = {
    "system": {"n_qubits": 2, "j": 1.5, "gamma": 1.0},
    "run": {"mode": "steady"},
    "output": {"path": "steady.csv"},
}


def write_config(tmp_path, cfg, name="job.json"):
    path = tmp_path / name
    path.write_text(json.dumps(cfg))
    return str(path)


def test_parse_config_applies_defaults():
    cfg = parse_config(json.dumps(MINIMAL))
    assert cfg.system.detuning == (0.0, 0.0)
    assert cfg.system.nbar == 0.0
    assert cfg.system.rabi == (1.0, 1.0)
    assert cfg.mode == "steady"
    assert cfg.out_format == "csv"
    assert cfg.plot is False


def test_parse_config_rejects_wrong_gamma_length():
    bad = json.loads(json.dumps(MINIMAL))
    bad["system"]["gamma"] = [1.0, 1.0, 1.0]
    with pytest.raises(SchemaError, match="system.gamma"):
        parse_config(json.dumps(bad))


def test_parse_config_rejects_negative_nbar():
    bad = json.loads(json.dumps(MINIMAL))
    bad["system"]["nbar"] = -0.2
    with pytest.raises(SchemaError, match="nbar"):
        parse_config(json.dumps(bad))


def test_parse_config_rejects_unknown_keys():
    bad = json.loads(json.dumps(MINIMAL))
    bad["system"]["voltage"] = 3.0
    with pytest.raises(SchemaError):
        parse_config(json.dumps(bad))


def test_parse_config_rejects_nonpositive_drive():
    bad = json.loads(json.dumps(MINIMAL))
    bad["system"]["rabi"] = [0.0, 1.0]
    with pytest.raises(SchemaError, match="rabi"):
        parse_config(json.dumps(bad))


def test_parse_config_normalizes_to_first_drive_amplitude():
    cfg = json.loads(json.dumps(MINIMAL))
    cfg["system"]["rabi"] = 2.0
    cfg["system"]["gamma"] = 3.0
    parsed = parse_config(json.dumps(cfg))
    assert parsed.system.rabi == (1.0, 1.0)
    assert parsed.system.gamma == (1.5, 1.5)
    assert parsed.system.coupling == 0.75


def test_set_overrides():
    cfg = parse_config(json.dumps(MINIMAL), ["system.gamma=2.0", "run.mode=steady"])
    assert cfg.system.gamma == (2.0, 2.0)
    with pytest.raises(SchemaError):
        parse_config(json.dumps(MINIMAL), ["no_equals_sign"])


def test_steady_job_roundtrip(tmp_path):
    out = str(tmp_path / "steady.csv")
    config = write_config(tmp_path, MINIMAL)
    assert main(["steady", "--config", config, "--out", out]) == EXIT_OK

    header, rows = read_csv(out)
    assert header == ["row", "col", "real", "imag"]
    rho = np.zeros((4, 4), dtype=complex)
    for i, j, re, im in rows:
        rho[int(i), int(j)] = re + 1j * im
    params = ChainParams.uniform(2, rabi=1.0, coupling=1.5, gamma=1.0)
    expected = steady_state(build_liouvillian(params))
    assert np.max(np.abs(rho - expected)) < 1e-16  # 17 significant digits round-trip


def test_reproducible_runs_are_byte_identical(tmp_path):
    config = write_config(tmp_path, MINIMAL)
    out1, out2 = str(tmp_path / "a.csv"), str(tmp_path / "b.csv")
    assert main(["steady", "--config", config, "--out", out1, "--reproducible"]) == EXIT_OK
    assert main(["steady", "--config", config, "--out", out2, "--reproducible"]) == EXIT_OK
    assert open(out1, "rb").read() == open(out2, "rb").read()


def test_metadata_header_lines(tmp_path):
    out = str(tmp_path / "steady.csv")
    config = write_config(tmp_path, MINIMAL)
    main(["steady", "--config", config, "--out", out])
    lines = open(out).read().splitlines()
    assert lines[0].startswith("# srq ")
    assert any(line.startswith("# created:") for line in lines)
    assert any(line.startswith("# config:") for line in lines)


def test_verify_job_passes(tmp_path):
    cfg = {
        "system": {"n_qubits": 2, "j": 1.5, "gamma": 1.0},
        "run": {"mode": "verify", "grid": {"min": 0.05, "max": 4.0, "points": 50}},
        "output": {"path": str(tmp_path / "verify.csv")},
    }
    config = write_config(tmp_path, cfg)
    assert main(["verify", "--config", config]) == EXIT_OK
    header, rows = read_csv(str(tmp_path / "verify.csv"))
    assert header == ["r", "max_abs_deviation"]
    assert len(rows) == 50
    assert all(row[1] < 1e-9 for row in rows)


def test_verify_job_fails_with_impossible_tolerance(tmp_path):
    cfg = {
        "system": {"n_qubits": 2, "j": 1.5, "gamma": 1.0},
        "run": {"mode": "verify", "grid": {"min": 0.5, "max": 2.0, "points": 5},
                "tol": 1e-18},
        "output": {"path": str(tmp_path / "verify.csv")},
    }
    config = write_config(tmp_path, cfg)
    assert main(["verify", "--config", config]) == EXIT_VERIFY_FAIL


def test_sweep_job_reproduces_information_measures(tmp_path):
    cfg = {
        "system": {"n_qubits": 2, "j": 1.5, "gamma": 1.0},
        "run": {
            "mode": "sweep",
            "parameter": "gamma_all",
            "grid": {"min": 0.05, "max": 4.0, "points": 40},
            "measures": ["eof:1:2", "mutual_information:1:2", "classical_proxy:1:2"],
        },
        "output": {"path": str(tmp_path / "sweep.csv")},
    }
    config = write_config(tmp_path, cfg)
    assert main(["sweep", "--config", config]) == EXIT_OK
    header, rows = read_csv(str(tmp_path / "sweep.csv"))
    assert header == ["gamma_all", "eof:1:2", "mutual_information:1:2",
                      "classical_proxy:1:2"]
    for gamma, eof, mi, proxy in rows:
        if gamma < 1.0 / 3.0:
            assert eof == 0.0
        assert abs(proxy - (mi - eof)) < 1e-12


def test_evolve_job_with_noise_family(tmp_path):
    cfg = {
        "system": {"n_qubits": 2, "j": 1.5, "gamma": 1.0},
        "run": {
            "mode": "evolve",
            "t_max": 25.0,
            "points": 6,
            "measures": ["eof:1:2"],
            "family": {"parameter": "gamma_all", "values": [0.15, 2.0]},
        },
        "output": {"path": str(tmp_path / "evolve.csv")},
    }
    config = write_config(tmp_path, cfg)
    assert main(["evolve", "--config", config]) == EXIT_OK
    header, rows = read_csv(str(tmp_path / "evolve.csv"))
    assert header == ["gamma_all", "t", "eof:1:2"]
    finals = {row[0]: row[2] for row in rows if row[1] == 25.0}
    assert finals[2.0] > 0.0          # strong noise ends entangled
    assert finals[0.15] < 1e-6        # weak noise ends separable


def test_enhance_job(tmp_path):
    cfg = {
        "system": {"n_qubits": 2, "j": 1.5, "gamma": 1.0, "nbar": 0.01},
        "run": {"mode": "enhance", "n_list": [1, 2],
                "gamma": {"min": 0.05, "max": 3.0}, "tol": 0.001},
        "output": {"path": str(tmp_path / "enhance.csv")},
    }
    config = write_config(tmp_path, cfg)
    assert main(["enhance", "--config", config]) == EXIT_OK
    header, rows = read_csv(str(tmp_path / "enhance.csv"))
    assert header == ["n_qubits", "peak_gamma", "peak_value", "interior"]
    assert rows[0][0] == 1.0 and abs(rows[0][2]) < 1e-12
    assert rows[1][0] == 2.0 and rows[1][2] > 0.3


def test_failed_sweep_points_are_marked(tmp_path):
    cfg = {
        "system": {"n_qubits": 2, "j": 1.5, "gamma": 1.0},
        "run": {
            "mode": "sweep",
            "parameter": "gamma_all",
            "grid": {"values": [0.0, 0.5, 1.0]},
            "measures": ["signal_x"],
        },
        "output": {"path": str(tmp_path / "sweep.csv")},
    }
    config = write_config(tmp_path, cfg)
    assert main(["sweep", "--config", config]) == EXIT_OK
    text = open(str(tmp_path / "sweep.csv")).read()
    assert "# failed at 0: NonUniqueSteadyState" in text
    header, rows = read_csv(str(tmp_path / "sweep.csv"))
    assert math.isnan(rows[0][1])
    assert not math.isnan(rows[1][1])


def test_exit_code_for_missing_config(tmp_path):
    assert main(["steady", "--config", str(tmp_path / "nope.json")]) == EXIT_IO


def test_exit_code_for_mode_mismatch(tmp_path):
    config = write_config(tmp_path, MINIMAL)
    assert main(["sweep", "--config", config]) == EXIT_CONFIG


def test_exit_code_for_schema_error(tmp_path):
    bad = json.loads(json.dumps(MINIMAL))
    bad["system"]["gamma"] = [1.0]
    config = write_config(tmp_path, bad)
    assert main(["steady", "--config", config]) == EXIT_CONFIG


def test_exit_code_for_solver_error(tmp_path):
    bad = json.loads(json.dumps(MINIMAL))
    bad["system"]["gamma"] = 0.0
    config = write_config(tmp_path, bad)
    assert main(["steady", "--config", config]) == EXIT_SOLVER


def test_plot_flag_renders_figures(tmp_path):
    config = write_config(tmp_path, MINIMAL)
    out = str(tmp_path / "steady.csv")
    assert main(["steady", "--config", config, "--out", out, "--plot"]) == EXIT_OK
    png = str(tmp_path / "steady.png")
    assert os.path.exists(png) and os.path.getsize(png) > 0

    sweep_cfg = {
        "system": {"n_qubits": 2, "j": 1.5, "gamma": 1.0},
        "run": {"mode": "sweep", "parameter": "gamma_all",
                "grid": {"min": 0.2, "max": 2.0, "points": 5},
                "measures": ["signal_x", "eof:1:2"]},
        "output": {"path": str(tmp_path / "sweep.csv"), "plot": True},
    }
    config = write_config(tmp_path, sweep_cfg, "sweep.json")
    assert main(["sweep", "--config", config]) == EXIT_OK
    assert os.path.getsize(str(tmp_path / "sweep.png")) > 0


def test_shipped_configs_parse():
    here = os.path.dirname(__file__)
    configs = os.path.join(here, os.pardir, "configs")
    names = sorted(os.listdir(configs))
    assert len(names) >= 8
    for name in names:
        text = open(os.path.join(configs, name)).read()
        cfg = parse_config(text)
        assert cfg.mode in ("steady", "evolve", "sweep", "verify", "enhance")
