import json
import subprocess
import sys

import pytest

from lurgme.cli import run_cli
from lurgme.states import state_to_dict, w_state


@pytest.fixture
def w3_files(tmp_path):
    state = tmp_path / "w3.json"
    state.write_text(json.dumps(state_to_dict(w_state(3))))
    obs = tmp_path / "obs.json"
    obs.write_text(json.dumps({"pattern": "pauli", "signs": [[1, 1, 1], [1, 1, 1], [-1, -1, 1]]}))
    return state, obs


def test_partitions(capsys):
    assert run_cli(["partitions", "--n", "4"]) == 0
    lines = capsys.readouterr().out.split()
    assert lines == ["1|234", "12|34", "13|24", "123|4", "14|23", "124|3", "134|2"]


def test_fullsep(capsys):
    assert run_cli(["fullsep", "--n", "6"]) == 0
    assert capsys.readouterr().out.strip() == "0.0229007633588"


def test_demo_stdout(capsys):
    assert run_cli(["demo", "w3", "--grid", "3"]) == 0
    out = capsys.readouterr().out.splitlines()
    assert out[0] == "q,f,f_total,min_bound,argmin_partition"
    assert [line.split(",")[1] for line in out[1:]] == ["1.29576708774", "0.0387188031499", "-1.77777777778"]


def test_demo_to_file(tmp_path, capsys):
    out = tmp_path / "w3.csv"
    assert run_cli(["demo", "w3", "--grid", "11", "--out", str(out)]) == 0
    assert capsys.readouterr().out == ""
    assert len(out.read_text().splitlines()) == 12


def test_evaluate_json(w3_files, tmp_path, capsys):
    state, obs = w3_files
    ref = tmp_path / "ref.json"
    ref.write_text(state.read_text())
    code = run_cli(["evaluate", "--state", str(state), "--observables", str(obs),
                    "--bounds", "family-min", "--reference", str(ref)])
    assert code == 0
    report = json.loads(capsys.readouterr().out)
    assert report["verdict"] == "Detected"
    assert report["f"] == pytest.approx(-16 / 9, abs=1e-9)
    assert report["argmin_partition"] == "1|23"


def test_evaluate_zero_bounds(w3_files, capsys):
    state, obs = w3_files
    assert run_cli(["evaluate", "--state", str(state), "--observables", str(obs)]) == 0
    assert json.loads(capsys.readouterr().out)["verdict"] == "Inconclusive"


def test_unsound_bound_exit_code(w3_files, tmp_path, capsys):
    state, obs = w3_files
    const = tmp_path / "u.json"
    const.write_text(json.dumps({"default": 50}))
    code = run_cli(["evaluate", "--state", str(state), "--observables", str(obs), "--bounds", f"constant:{const}"])
    assert code == 3
    assert "error" in capsys.readouterr().err


def test_threshold_config_with_unsound_bound_reports_q(tmp_path, capsys):
    cfg = tmp_path / "c.json"
    cfg.write_text(json.dumps({
        "state": {"family": "w", "n": 3},
        "observables": {"pattern": "pauli", "signs": [[1, 1, 1]] * 3},
        "bounds": {"constant": {"default": 50}},
    }))
    assert run_cli(["threshold", "--config", str(cfg)]) == 3
    assert "at q=0.0" in capsys.readouterr().err


@pytest.mark.parametrize("argv", [
    ["evaluate", "--state", "missing.json", "--observables", "missing.json"],
    ["demo", "nope"],
    ["partitions"],
    ["sweep", "--config", "missing.json"],
])
def test_input_errors_exit_2(argv, capsys):
    assert run_cli(argv) == 2


def test_invalid_state_exit_2(tmp_path, w3_files, capsys):
    _, obs = w3_files
    bad = tmp_path / "bad.json"
    bad.write_text(json.dumps({"dims": [2], "matrix": [[2, 0], [0, 0], [0, 0], [-1, 0]]}))
    assert run_cli(["evaluate", "--state", str(bad), "--observables", str(obs)]) == 2
    assert "error" in capsys.readouterr().err


def test_threshold_demo(capsys):
    assert run_cli(["threshold", "--demo", "w3"]) == 0
    result = json.loads(capsys.readouterr().out)
    assert result["q_star"] == pytest.approx(0.51246, abs=1e-5)


def test_threshold_without_sign_change_exit_2(capsys):
    assert run_cli(["threshold", "--demo", "qutrit3"]) == 2
    assert "does not change sign" in capsys.readouterr().err


def test_sweep_config(tmp_path, capsys):
    cfg = tmp_path / "c.json"
    cfg.write_text(json.dumps({
        "state": {"family": "w", "n": 3},
        "observables": {"pattern": "pauli", "signs": [[1, 1, 1], [1, 1, 1], [-1, -1, 1]]},
        "grid": 5,
    }))
    assert run_cli(["sweep", "--config", str(cfg)]) == 0
    rows = capsys.readouterr().out.splitlines()
    assert len(rows) == 6
    assert float(rows[-1].split(",")[1]) == pytest.approx(-16 / 9, abs=1e-9)


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "lurgme.cli", "partitions", "--n", "3"],
                          capture_output=True, text=True)
    assert proc.returncode == 0
    assert proc.stdout.split() == ["1|23", "12|3", "13|2"]
