import json
from pathlib import Path

import pytest
from click.testing import CliRunner

from stabci.cli import main

FIXTURES = Path(__file__).parent.parent / "fixtures"


@pytest.fixture
def runner():
    return CliRunner()


def invoke(runner, args, **env):
    return runner.invoke(main, args, env=env or None, catch_exceptions=False)


class TestSci:
    def test_full_on_h2(self, runner, tmp_path):
        out = tmp_path / "r.json"
        res = invoke(runner, [
            "sci", "full", "--hamiltonian", str(FIXTURES / "h2_3.00.json"),
            "--out", str(out),
        ])
        assert res.exit_code == 0, res.output
        doc = json.loads(out.read_text())
        assert doc["method"] == "full"
        assert doc["amplitudes"] == {"0011": 2**-0.5, "1100": -(2**-0.5)}
        assert doc["trace"] == [{"pauli": "X1X2X3X4", "l": 1}]
        manifest = json.loads((tmp_path / "r.json.manifest.json").read_text())
        assert manifest["command"] == "sci full"
        assert manifest["inputs"][0]["sha256"]

    def test_adaptive_runs(self, runner, tmp_path):
        out = tmp_path / "r.json"
        res = invoke(runner, [
            "sci", "adaptive", "--hamiltonian", str(FIXTURES / "h4_3.00.json"),
            "--out", str(out), "--beam", "2",
        ])
        assert res.exit_code == 0, res.output
        assert json.loads(out.read_text())["method"] == "adaptive"

    def test_reproducible_bytes(self, runner, tmp_path):
        a, b = tmp_path / "a.json", tmp_path / "b.json"
        for out in (a, b):
            res = invoke(runner, [
                "sci", "full", "--hamiltonian", str(FIXTURES / "h2_2.00.json"),
                "--out", str(out),
            ])
            assert res.exit_code == 0
        assert a.read_bytes() == b.read_bytes()

    def test_missing_file_is_input_error(self, runner, tmp_path):
        res = runner.invoke(main, [
            "sci", "full", "--hamiltonian", "nope.json",
            "--out", str(tmp_path / "x.json"),
        ])
        assert res.exit_code == 2

    def test_fixtures_env_fallback(self, runner, tmp_path):
        out = tmp_path / "r.json"
        res = runner.invoke(main, [
            "sci", "full", "--hamiltonian", "h2_3.00.json", "--out", str(out),
        ], env={"STABCI_FIXTURES": str(FIXTURES)})
        assert res.exit_code == 0, res.output


class TestRefine:
    def test_adds_generalized_fields(self, runner, tmp_path):
        out = tmp_path / "r.json"
        res = invoke(runner, [
            "refine", "--hamiltonian", str(FIXTURES / "h2_0.75.json"),
            "--out", str(out),
        ])
        assert res.exit_code == 0, res.output
        doc = json.loads(out.read_text())
        assert doc["refined"] is True
        assert doc["energy_generalized"] <= doc["energy"] + 1e-12
        assert "theta_star" in doc


class TestCode:
    def test_build_from_search(self, runner, tmp_path):
        out = tmp_path / "code.json"
        res = invoke(runner, [
            "code", "build", "--hamiltonian", str(FIXTURES / "h2_3.00.json"),
            "--out", str(out),
        ])
        assert res.exit_code == 0, res.output
        doc = json.loads(out.read_text())
        assert doc["n"] == 4
        assert doc["distance_report"]["passed"] is True
        assert sorted(doc["stabilizers"]) == sorted(["-Z1Z3", "-Z2Z4", "-X1X2X3X4"])

    def test_build_from_result_file(self, runner, tmp_path):
        result = tmp_path / "r.json"
        invoke(runner, [
            "sci", "full", "--hamiltonian", str(FIXTURES / "h4_3.00.json"),
            "--out", str(result),
        ])
        out = tmp_path / "code.json"
        res = invoke(runner, [
            "code", "build", "--hamiltonian", str(FIXTURES / "h4_3.00.json"),
            "--result", str(result), "--out", str(out),
        ])
        assert res.exit_code == 0, res.output
        assert json.loads(out.read_text())["n"] == 8


class TestNoise:
    def test_sweep_csv(self, runner, tmp_path):
        out = tmp_path / "sweep.csv"
        res = invoke(runner, [
            "noise", "run", "--hamiltonian", str(FIXTURES / "h2_3.00.json"),
            "--out", str(out), "--trajectories", "50",
            "--p-depol", "0.0", "--p-depol", "0.02", "--seed", "5",
        ])
        assert res.exit_code == 0, res.output
        lines = out.read_text().strip().splitlines()
        assert lines[0] == "p_depol,p_bitflip,n_traj,n_kept,discard_rate,mean_overlap,stderr,mode,seed"
        assert len(lines) == 1 + 2 * 2  # two p values x two modes
        zero_rows = [l for l in lines[1:] if l.startswith("0,")]
        for row in zero_rows:
            cols = row.split(",")
            assert cols[3] == "50" and float(cols[5]) == 1.0

    def test_hf_only_state_is_input_error(self, runner, tmp_path):
        res = runner.invoke(main, [
            "noise", "run", "--hamiltonian", str(FIXTURES / "h2_0.75.json"),
            "--out", str(tmp_path / "x.csv"), "--trajectories", "10",
        ])
        assert res.exit_code == 2


class TestPes:
    def test_scan_over_h2_grid(self, runner, tmp_path):
        grid = tmp_path / "grid"
        grid.mkdir()
        for name in ["h2_0.75.json", "h2_2.00.json", "h2_3.00.json"]:
            (grid / name).write_text((FIXTURES / name).read_text())
        out = tmp_path / "pes.csv"
        res = invoke(runner, ["pes", "scan", "--hamiltonian-dir", str(grid),
                              "--out", str(out)])
        assert res.exit_code == 0, res.output
        lines = out.read_text().strip().splitlines()
        assert lines[0] == "bond_length,E_HF,E_stab,E_gen,E_FCI"
        assert len(lines) == 4
        for line in lines[1:]:
            _, e_hf, e_stab, e_gen, e_fci = line.split(",")
            assert float(e_fci) <= float(e_gen) + 1e-9
            assert float(e_gen) <= float(e_stab) + 1e-9
            assert float(e_stab) <= float(e_hf) + 1e-9

    def test_empty_dir_is_input_error(self, runner, tmp_path):
        res = runner.invoke(main, [
            "pes", "scan", "--hamiltonian-dir", str(tmp_path),
            "--out", str(tmp_path / "pes.csv"),
        ])
        assert res.exit_code == 2


class TestOracle:
    def test_ground(self, runner, tmp_path):
        out = tmp_path / "oracle.json"
        res = invoke(runner, [
            "oracle", "ground", "--hamiltonian", str(FIXTURES / "h2_3.00.json"),
            "--out", str(out),
        ])
        assert res.exit_code == 0, res.output
        doc = json.loads(out.read_text())
        fixture = json.loads((FIXTURES / "h2_3.00.json").read_text())
        assert abs(doc["energy"] - fixture["fci_energy"]) < 1e-6
        assert doc["residual"] <= 1e-8

    def test_qubit_cap_is_resource_error(self, runner, tmp_path):
        res = runner.invoke(main, [
            "oracle", "ground", "--hamiltonian", str(FIXTURES / "lih_3.00.json"),
            "--max-qubits", "8",
        ])
        assert res.exit_code == 3
