import json
import subprocess
import sys

import numpy as np
import pytest

from psistat import gaussian_min_state, make_grid
from psistat.cli import bundled_fixture, main
from psistat.io import (
    read_charfunc_csv,
    read_sample,
    read_state_csv,
    write_sample,
    write_state_csv,
)
from psistat.states import hermite_state


def run_json(capsys, *argv):
    code = main(list(argv))
    captured = capsys.readouterr()
    assert code == 0, captured.err
    return json.loads(captured.out)


def run_code(capsys, *argv):
    code = main(list(argv))
    return code, capsys.readouterr().err


class TestAnalyze:
    def test_bundled_fixture(self, capsys):
        rep = run_json(capsys, "analyze")
        res = rep["results"]
        assert res["product"] == pytest.approx(0.25, abs=1e-9)
        assert res["heisenberg"] and res["robertson"]
        assert res["norm_x"] == pytest.approx(1, abs=1e-12)
        assert res["norm_p"] == pytest.approx(1, abs=1e-12)
        assert set(rep) == {"command", "config", "results", "seed", "version", "wall_time"}

    def test_dump_state_round_trip(self, capsys, tmp_path):
        dump = tmp_path / "state.csv"
        run_json(capsys, "analyze", "--dump-state", str(dump))
        a = read_state_csv(bundled_fixture())
        b = read_state_csv(dump)
        assert np.max(np.abs(a.amplitudes - b.amplitudes)) < 1e-14

    def test_momentum_input(self, capsys, tmp_path):
        from psistat import to_momentum
        g = make_grid(512, 20.0)
        path = tmp_path / "p.csv"
        write_state_csv(path, to_momentum(gaussian_min_state(g, 0.5, 1.0, 0.7)))
        res = run_json(capsys, "analyze", "--input", str(path))["results"]
        assert res["moments"]["mean_p"] == pytest.approx(1.0, abs=1e-9)
        assert res["product"] == pytest.approx(0.25, abs=1e-9)

    def test_csv_output(self, capsys):
        assert main(["analyze", "--format", "csv"]) == 0
        lines = capsys.readouterr().out.splitlines()
        assert lines[0] == "x,density,phase,p,momentum_density"
        assert len(lines) == 1 + read_state_csv(bundled_fixture()).grid.n_points


class TestOtherCommands:
    def test_charfunc(self, capsys, tmp_path):
        rep = run_json(capsys, "charfunc")
        res = rep["results"]
        assert res["coordinate_route_difference"] < 1e-10
        assert res["validity"]["is_valid"]
        np.testing.assert_allclose(res["moments"], res["quadrature_moments"], atol=1e-4)
        out = tmp_path / "f.csv"
        assert main(["charfunc", "--format", "csv", "--out", str(out)]) == 0
        f = read_charfunc_csv(out)
        assert f.at_zero() == pytest.approx(1, abs=1e-12)

    def test_uncertainty_random(self, capsys):
        res = run_json(capsys, "uncertainty", "--random", "20", "--seed", "3")["results"]
        assert res["heisenberg_satisfied"] == 20 == res["robertson_satisfied"]
        assert res["min_product"] >= 0.25

    def test_uncertainty_needs_input(self, capsys):
        code, err = run_code(capsys, "uncertainty")
        assert code == 2 and "cli.ConfigParse" in err

    def test_cramer_rao(self, capsys):
        res = run_json(capsys, "cramer-rao", "--n", "50", "--replications", "200",
                       "--seed", "1")["results"]
        assert res["satisfied"]
        assert res["fisher"][0][0] == pytest.approx(50)

    def test_fit_root(self, capsys, tmp_path):
        g = make_grid(4096, 24.0)
        from psistat.estimation import sample_from_state
        sample = sample_from_state(hermite_state(g, [0.8, 0.6]), 2000, 1)
        path = tmp_path / "sample.txt"
        write_sample(path, sample, comment="two component draw")
        assert np.array_equal(read_sample(path).values, sample.values)
        res = run_json(capsys, "fit-root", "--input", str(path))["results"]
        assert res["converged"]
        assert abs(res["coeffs"][0] - 0.6) < 4 * res["standard_errors"][0]

    def test_finite(self, capsys, tmp_path):
        spec = {
            "state": [[1, 0], [1, 0]],
            "hamiltonian": [[[0, 0], [0, 0]], [[0, 0], [1, 0]]],
            "t": float(np.pi),
            "other": [[1, 0], [-1, 0]],
        }
        path = tmp_path / "finite.json"
        path.write_text(json.dumps(spec))
        res = run_json(capsys, "finite", "--input", str(path))["results"]
        assert res["fidelity_with_other"] == pytest.approx(1, abs=1e-14)
        assert res["fidelity_with_initial"] == pytest.approx(0, abs=1e-14)

    def test_finite_schmidt(self, capsys, tmp_path):
        path = tmp_path / "bell.json"
        path.write_text(json.dumps({"state": [[1, 0], [0, 0], [0, 0], [1, 0]],
                                    "bipartition": [2, 2]}))
        res = run_json(capsys, "finite", "--input", str(path))["results"]
        assert res["schmidt"]["rank"] == 2


class TestConfigAndExitCodes:
    def test_config_file_with_override(self, capsys, tmp_path):
        cfg = tmp_path / "cfg.json"
        cfg.write_text(json.dumps({"command": "cramer-rao", "n": 40, "replications": 150,
                                   "seed": 5, "sigma": 2.0}))
        rep = run_json(capsys, "cramer-rao", "--config", str(cfg), "--n", "80")
        assert rep["config"]["n"] == 80
        assert rep["config"]["sigma"] == 2.0 and rep["seed"] == 5
        assert rep["results"]["fisher"][0][0] == pytest.approx(20)

    @pytest.mark.parametrize("argv", [
        ["analyze", "--grid", "1000,20"],
        ["analyze", "--seed", "-1"],
        ["cramer-rao", "--n", "ten"],
        ["cramer-rao", "--replications", "50"],
    ])
    def test_config_errors(self, capsys, argv):
        code, err = run_code(capsys, *argv)
        assert code == 2 and "psistat: error [" in err

    def test_unknown_config_key(self, capsys, tmp_path):
        cfg = tmp_path / "cfg.json"
        cfg.write_text(json.dumps({"colour": "blue"}))
        code, err = run_code(capsys, "analyze", "--config", str(cfg))
        assert code == 2 and "colour" in err

    def test_argparse_errors_are_config_errors(self, capsys):
        with pytest.raises(SystemExit) as info:
            main(["nonsense"])
        assert info.value.code == 2

    def test_missing_input(self, capsys, tmp_path):
        code, err = run_code(capsys, "analyze", "--input", str(tmp_path / "missing.csv"))
        assert code == 3 and "cli.InputFileNotFound" in err

    def test_malformed_state(self, capsys, tmp_path):
        path = tmp_path / "bad.csv"
        path.write_text("x,re,im\n0,1\n")
        code, err = run_code(capsys, "analyze", "--input", str(path))
        assert code == 3

    def test_sample_out_of_support(self, capsys, tmp_path):
        path = tmp_path / "sample.txt"
        write_sample(path, np.concatenate([np.linspace(-0.9, 0.9, 40), [1.5]]))
        code, err = run_code(capsys, "fit-root", "--input", str(path), "--basis", "legendre")
        assert code == 3 and "SampleOutOfSupport" in err

    def test_numerical_error(self, capsys, tmp_path):
        path = tmp_path / "sample.txt"
        write_sample(path, np.concatenate([np.linspace(-2, 2, 40), [60.0]]))
        code, err = run_code(capsys, "fit-root", "--input", str(path))
        assert code == 4 and "DegenerateDensity" in err

    def test_dimension_mismatch(self, capsys, tmp_path):
        path = tmp_path / "finite.json"
        path.write_text(json.dumps({"state": [[1, 0], [0, 0]],
                                    "other": [[1, 0], [0, 0], [0, 0]]}))
        code, err = run_code(capsys, "finite", "--input", str(path))
        assert code == 3 and "finite_hilbert.DimMismatch" in err


def test_module_entry_point_deterministic(tmp_path):
    outputs = []
    for _ in range(2):
        proc = subprocess.run(
            [sys.executable, "-m", "psistat.cli", "uncertainty", "--random", "5",
             "--seed", "11"],
            capture_output=True, text=True, cwd=tmp_path, check=True)
        rep = json.loads(proc.stdout)
        rep.pop("wall_time")
        outputs.append(rep)
    assert outputs[0] == outputs[1]
