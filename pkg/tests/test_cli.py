import json
import os
import subprocess
import sys

import numpy as np
import pytest

from hqcqp import cli, driver, oracle
from hqcqp import io as pio
from hqcqp.generator import GeneratorSpec, random_feasible_problem
from hqcqp.problem import HqcqpProblem, reduce_problem
from hqcqp.search import SearchConfig


def _write_problem(tmp_path, t, ps, name="prob.json"):
    prob = HqcqpProblem(np.asarray(t, dtype=complex), tuple(np.asarray(p, dtype=complex) for p in ps))
    path = tmp_path / name
    pio.save_problem(prob, path)
    return path


class TestSolveCommand:
    def test_diagonal_chain(self, tmp_path, capsys):
        path = _write_problem(tmp_path, 4.0 * np.eye(2), [np.diag([-4.0, -8.0])])
        code = cli.main(["solve", str(path)])
        out = json.loads(capsys.readouterr().out)
        assert code == 0
        assert out["p_star"] == pytest.approx(0.5, rel=1e-9)
        assert out["c_star"] == pytest.approx(-2.0, rel=1e-9)
        assert out["case_tag"] == "one_constraint"
        assert out["binding"] == [0]

    def test_two_constraint_known_optimum(self, tmp_path, capsys):
        path = _write_problem(
            tmp_path, np.eye(2), [np.diag([-2.0, -1.0]), np.diag([-1.0, -2.0])]
        )
        code = cli.main(["solve", str(path)])
        out = json.loads(capsys.readouterr().out)
        assert code == 0
        assert out["p_star"] == pytest.approx(2.0 / 3.0, abs=1e-4)

    def test_infeasible_exit_code(self, tmp_path, capsys):
        path = _write_problem(tmp_path, np.eye(2), [np.diag([1.0, 2.0])])
        code = cli.main(["solve", str(path)])
        captured = capsys.readouterr()
        assert code == 2
        assert "infeasible: c* >= 0" in captured.err
        assert captured.out == ""

    def test_malformed_json_exit_code(self, tmp_path, capsys):
        path = tmp_path / "bad.json"
        path.write_text('{"version": 1,\n  broken\n}')
        code = cli.main(["solve", str(path)])
        captured = capsys.readouterr()
        assert code == 1
        assert "line 2" in captured.err

    def test_csv_trace_mode(self, tmp_path, capsys):
        path = _write_problem(
            tmp_path, np.eye(2), [np.diag([-2.0, -1.0]), np.diag([-1.0, -2.0])]
        )
        code = cli.main(["solve", str(path), "--csv-trace"])
        out = capsys.readouterr().out
        assert code == 0
        lines = out.strip().split("\n")
        assert lines[0] == "iteration,incumbent_c"
        rows = [line.split(",") for line in lines[1:]]
        incumbents = [float(v) for _, v in rows]
        assert all(b >= a for a, b in zip(incumbents, incumbents[1:]))
        assert incumbents[-1] == pytest.approx(-1.5, abs=1e-4)

    def test_threshold_flag(self, tmp_path, capsys):
        path = _write_problem(
            tmp_path, np.eye(2), [np.diag([-2.0, -1.0]), np.diag([-1.0, -2.0])]
        )
        code = cli.main(["solve", str(path), "--threshold", "1e-2", "--csv-trace"])
        out = capsys.readouterr().out
        assert code == 0
        assert len(out.strip().split("\n")) < 15  # coarser threshold, fewer steps


class TestGenerateCommand:
    def test_writes_valid_feasible_files(self, tmp_path, capsys):
        out_dir = tmp_path / "batch"
        code = cli.main([
            "generate", "--dim", "9", "--constraints", "2", "--count", "5",
            "--seed", "3", "--out-dir", str(out_dir),
        ])
        assert code == 0
        files = sorted(os.listdir(out_dir))
        assert files == [f"problem_{k}.json" for k in range(5)]
        for name in files:
            prob = pio.load_problem(out_dir / name)
            assert prob.dim == 9
            assert prob.num_constraints == 2

    def test_fixed_seed_byte_identical(self, tmp_path):
        outs = []
        for sub in ("a", "b"):
            out_dir = tmp_path / sub
            cli.main([
                "generate", "--dim", "4", "--constraints", "3", "--count", "2",
                "--seed", "7", "--out-dir", str(out_dir),
            ])
            outs.append([
                (out_dir / f"problem_{k}.json").read_bytes() for k in range(2)
            ])
        assert outs[0] == outs[1]

    def test_dim_two_with_three_constraints_rejected(self, tmp_path, capsys):
        code = cli.main([
            "generate", "--dim", "2", "--constraints", "3",
            "--out-dir", str(tmp_path),
        ])
        assert code == 1
        assert "dimension" in capsys.readouterr().err


class TestBenchCommand:
    def test_small_batch_report(self, tmp_path, capsys):
        out = tmp_path / "report.csv"
        code = cli.main([
            "bench", "--dims", "4", "--constraints", "2", "--count", "4",
            "--seed", "1", "--oracle-samples", "2000", "--out", str(out),
        ])
        assert code == 0
        lines = out.read_text().strip().split("\n")
        assert lines[0] == "dim,m,iteration,avg_rel_err,n_instances,skipped"
        rows = [line.split(",") for line in lines[1:]]
        assert all(row[0] == "4" and row[1] == "2" for row in rows)
        assert all(int(row[4]) == 4 for row in rows)
        errs = [float(row[3]) for row in rows]
        assert errs[-1] <= 0.05  # converged by the final iteration

    def test_empty_batch_header_only(self, tmp_path, capsys):
        code = cli.main([
            "bench", "--dims", "4", "--constraints", "2", "--count", "0",
        ])
        captured = capsys.readouterr()
        assert code == 0
        assert captured.out.strip() == "dim,m,iteration,avg_rel_err,n_instances,skipped"

    def test_jobs_do_not_change_rows(self):
        cfg = SearchConfig(oracle_samples=2000, oracle_restarts=3)
        rows1, _ = cli.run_bench([4], [2], 3, 11, cfg, jobs=1)
        rows2, _ = cli.run_bench([4], [2], 3, 11, cfg, jobs=3)
        assert rows1 == rows2

    def test_known_optimum_instance_final_error(self):
        # a solved symmetric-diagonal instance agrees with the oracle to 1e-3
        prob = HqcqpProblem(
            np.eye(2, dtype=complex),
            (np.diag([-2.0, -1.0]).astype(complex), np.diag([-1.0, -2.0]).astype(complex)),
        )
        cfg = SearchConfig(oracle_samples=20000, oracle_restarts=6)
        sol = driver.solve(prob, cfg)
        est = oracle.oracle_cstar(reduce_problem(prob).C, cfg)
        p_oracle = -1.0 / est.c_hat
        eps_final = abs(sol.p_star - p_oracle) / p_oracle
        assert eps_final <= 1e-3


class TestRangeCommand:
    def test_diagonal_pair_inside_rectangle(self, tmp_path, capsys):
        path = _write_problem(
            tmp_path, np.eye(2), [np.diag([-2.0, 3.0]), np.diag([1.0, 4.0])]
        )
        code = cli.main(["range", str(path), "--count", "500", "--seed", "2"])
        out = capsys.readouterr().out
        assert code == 0
        lines = out.strip().split("\n")
        assert lines[0] == "c1,c2,tag"
        tags = [line.rsplit(",", 1)[1] for line in lines[1:]]
        assert tags.count("leftmost") == 1
        assert tags.count("bottommost") == 1
        for line in lines[1:]:
            c1, c2, _ = line.split(",")
            assert -2.0 - 1e-9 <= float(c1) <= 3.0 + 1e-9
            assert 1.0 - 1e-9 <= float(c2) <= 4.0 + 1e-9

    def test_single_constraint_rejected(self, tmp_path, capsys):
        path = _write_problem(tmp_path, np.eye(2), [np.diag([-1.0, 1.0])])
        code = cli.main(["range", str(path)])
        assert code == 1
        assert "m >= 2" in capsys.readouterr().err


def test_console_entry_point_smoke(tmp_path):
    # one real subprocess run on the numpy backend to keep startup light
    prob_path = _write_problem(tmp_path, 4.0 * np.eye(2), [np.diag([-4.0, -8.0])])
    env = dict(os.environ, HQCQP_BACKEND="numpy")
    proc = subprocess.run(
        [sys.executable, "-m", "hqcqp.cli", "solve", str(prob_path)],
        capture_output=True,
        text=True,
        env=env,
        timeout=120,
    )
    assert proc.returncode == 0
    assert json.loads(proc.stdout)["p_star"] == pytest.approx(0.5, rel=1e-9)


def test_unknown_command_exits_one(capsys):
    assert cli.main(["frobnicate"]) == 1


class TestSeedEnvOverride:
    def test_env_sets_default_seed(self, monkeypatch):
        monkeypatch.setenv("HQCQP_SEED", "0x2A")
        assert cli.default_seed() == 42
        monkeypatch.setenv("HQCQP_SEED", "7")
        assert cli.default_seed() == 7

    def test_bad_env_falls_back(self, monkeypatch, capsys):
        monkeypatch.setenv("HQCQP_SEED", "nonsense")
        assert cli.default_seed() == oracle.DEFAULT_SEED

    def test_env_changes_generated_files(self, tmp_path, monkeypatch):
        outs = []
        for sub, seed in (("a", "5"), ("b", "5"), ("c", "6")):
            monkeypatch.setenv("HQCQP_SEED", seed)
            out_dir = tmp_path / sub
            code = cli.main([
                "generate", "--dim", "3", "--constraints", "1",
                "--out-dir", str(out_dir),
            ])
            assert code == 0
            outs.append((out_dir / "problem_0.json").read_bytes())
        assert outs[0] == outs[1]
        assert outs[0] != outs[2]
