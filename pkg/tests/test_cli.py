import csv
import subprocess
import sys

import numpy as np
import pytest

from reflectfbm.cli import main
from reflectfbm.paths import DiscretePath, UniformGrid, read_path_csv, write_path_csv


def files(d):
    return {p.name: p.read_bytes() for p in sorted(d.iterdir())}


def rows(path):
    with open(path) as fh:
        return list(csv.reader(fh))


@pytest.fixture
def cfg(tmp_path):
    p = tmp_path / "run.cfg"
    p.write_text("n_steps = 64\nn_paths = 6\n# comment\nfamily = tanh\n")
    return p


def test_fbm(tmp_path, cfg):
    assert main(["fbm", "--config", str(cfg), "--out", str(tmp_path / "o"), "--count", "2", "--method", "levinson"]) == 0
    out = tmp_path / "o"
    assert {"fbm_0000.csv", "fbm_0001.csv", "regularity.csv"} <= set(files(out))
    w = read_path_csv(out / "fbm_0000.csv")
    assert w.grid.n_steps == 64 and w.values[0, 0] == 0
    assert rows(out / "regularity.csv")[0] == ["i", "seed", "lambda", "holder_value", "estimated_exponent", "eta_proxy"]


def test_young(tmp_path):
    out = tmp_path / "y"
    assert main(["young", "--out", str(out), "--n-smooth", "2", "--n-fbm", "2"]) == 0
    r = rows(out / "young.csv")
    assert r[0] == ["pair_id", "window", "integral", "bound", "beta", "defect_rate"]
    assert len(r) == 1 + 4 * 5 * 3


def test_skorokhod_with_input(tmp_path):
    grid = UniformGrid(0.0, 1.0, 4)
    write_path_csv(tmp_path / "z.csv", DiscretePath(grid, [1.0, -0.5, 0.5, -2.0, 0.0]))
    assert main(["skorokhod", "--input", str(tmp_path / "z.csv"), "--out", str(tmp_path)]) == 0
    r = rows(tmp_path / "skorokhod.csv")
    assert r[0] == ["t", "z_1", "x_1", "y_1"]
    data = np.array(r[1:], dtype=float)
    assert np.array_equal(data[:, 3], [0, 0.5, 0.5, 2.0, 2.0])
    assert np.array_equal(data[:, 2], [1.0, 0, 1.0, 0, 2.0])


def test_counterexample(tmp_path):
    assert main(["counterexample", "--out", str(tmp_path), "--t1", "0.25", "--t2", "0.5", "--lam", "0.5", "--n-steps", "8"]) == 0
    (head, row) = rows(tmp_path / "counterexample.csv")
    assert head == ["t1", "t2", "t", "lambda", "norm_ydiff", "norm_zdiff", "ratio"]
    assert float(row[4]) == pytest.approx(2.0, rel=1e-12)
    assert float(row[5]) == pytest.approx(2.0, rel=1e-12)


@pytest.mark.parametrize("method", ["direct", "picard"])
def test_solve(tmp_path, cfg, method):
    out = tmp_path / method
    assert main(["solve", "--config", str(cfg), "--out", str(out), "--method", method]) == 0
    r = rows(out / "solution.csv")
    assert r[0] == ["t", "x_1", "y_1", "z_1"] and len(r) == 66
    names = [row[0] for row in rows(out / "ledger.csv")[1:]]
    for key in ("K0", "M1", "T1", "M2", "M3", "c_gl", "C_d"):
        assert key in names
    assert (out / "config.txt").exists()


def test_solve_methods_agree(tmp_path, cfg):
    for m in ("direct", "picard"):
        main(["solve", "--config", str(cfg), "--out", str(tmp_path / m), "--method", m])
    a = np.array(rows(tmp_path / "direct" / "solution.csv")[1:], dtype=float)
    b = np.array(rows(tmp_path / "picard" / "solution.csv")[1:], dtype=float)
    assert np.max(np.abs(a - b)) <= 1e-9


def test_solve_with_driver_csv(tmp_path):
    grid = UniformGrid(0.0, 1.0, 8)
    write_path_csv(tmp_path / "g.csv", DiscretePath(grid, np.zeros(9)))
    cfg = tmp_path / "c.cfg"
    cfg.write_text("family = constant\ndrift_a = -1\nx0 = 0.5\n")
    assert main(["solve", "--config", str(cfg), "--driver", str(tmp_path / "g.csv"), "--out", str(tmp_path)]) == 0
    data = np.array(rows(tmp_path / "solution.csv")[1:], dtype=float)
    assert np.allclose(data[:, 1], np.maximum(0.5 - data[:, 0], 0), atol=1e-12)


def test_mc(tmp_path, cfg):
    assert main(["mc", "--config", str(cfg), "--out", str(tmp_path)]) == 0
    assert rows(tmp_path / "moments.csv")[0] == ["p", "estimate", "stderr", "n"]
    assert len(rows(tmp_path / "paths.csv")) == 7


def test_exit_code_validation(tmp_path, capsys):
    bad = tmp_path / "bad.cfg"
    bad.write_text("gamma = 0.6\nlambda0 = 0.65\n")
    assert main(["mc", "--config", str(bad), "--out", str(tmp_path)]) == 1
    assert "λ₀ < γ" in capsys.readouterr().err
    assert main(["counterexample", "--t1", "0.6", "--t2", "0.5", "--out", str(tmp_path)]) == 1
    bad.write_text("n_steps = lots\n")
    assert main(["solve", "--config", str(bad), "--out", str(tmp_path)]) == 1


def test_exit_code_runtime(tmp_path):
    cfg = tmp_path / "c.cfg"
    cfg.write_text("n_steps = 64\nsolver = picard\nmax_iters = 1\n")
    assert main(["solve", "--config", str(cfg), "--out", str(tmp_path)]) == 2
    assert main(["mc", "--config", str(cfg), "--out", str(tmp_path)]) == 2
    assert main(["skorokhod", "--input", str(tmp_path / "missing.csv"), "--out", str(tmp_path)]) == 2


def test_seed_flag_changes_output(tmp_path, cfg):
    main(["fbm", "--config", str(cfg), "--seed", "1", "--out", str(tmp_path / "a")])
    main(["fbm", "--config", str(cfg), "--seed", "2", "--out", str(tmp_path / "b")])
    assert files(tmp_path / "a")["fbm_0000.csv"] != files(tmp_path / "b")["fbm_0000.csv"]


def test_module_entry_point(tmp_path):
    res = subprocess.run([sys.executable, "-m", "reflectfbm", "counterexample", "--out", str(tmp_path)],
                         capture_output=True, text=True)
    assert res.returncode == 0, res.stderr
    res = subprocess.run([sys.executable, "-m", "reflectfbm", "solve", "--lam"], capture_output=True, text=True)
    assert res.returncode == 1
    res = subprocess.run([sys.executable, "-m", "reflectfbm", "nope"], capture_output=True, text=True)
    assert res.returncode == 1 and "invalid choice" in res.stderr
