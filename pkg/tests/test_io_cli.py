import json

import numpy as np
import pytest

from phg.cli import EXIT_DATA, EXIT_NUMERIC, EXIT_OK, EXIT_USAGE, main
from phg.errors import ParseError, ShapeError
from phg.evaluation import PointBatch, evaluate_batch
from phg.io import (dump_eval, dump_points, dump_track_results, parse_eval, parse_points,
                    parse_track_results)
from phg.system import dump_system, parse_system
from phg.tracker import track_batch

from conftest import example_system, line_system


@pytest.fixture
def files(tmp_path):
    def write(name, text):
        p = tmp_path / name
        p.write_text(text, encoding="utf-8")
        return str(p)
    return write


def test_points_affine_and_homogeneous():
    b = parse_points('{"tau0": -1, "points": [[[2, 0]], [[1, 0], [3, 1]]]}', 1)
    assert np.array_equal(b.y, [[2, 1], [1, 3 + 1j]])
    assert np.all(b.tau == -1)


def test_points_errors():
    with pytest.raises(ShapeError):
        parse_points('{"tau0": 0, "points": [[[1, 0], [1, 0], [1, 0]]]}', 1)
    with pytest.raises(ParseError):
        parse_points('{"tau0": 1, "points": []}', 1)
    with pytest.raises(ParseError):
        parse_points('{"points": [[["a", 0]]]}', 1)
    with pytest.raises(ParseError):
        parse_points('[1, 2]', 1)


def test_points_round_trip():
    y = np.array([[1 + 2j, -0.5], [3j, 1e-300]])
    b = parse_points(dump_points(y, -4.5), 1)
    assert np.array_equal(b.y, y) and b.tau[0] == -4.5


def test_eval_round_trip(example_tables):
    jac = evaluate_batch(PointBatch(np.array([[1, 1], [2 + 1j, 1]]), -0.3), example_tables)
    back, dev = parse_eval(dump_eval(jac, 1e-15))
    assert np.array_equal(back.data, jac.data) and dev == 1e-15


def test_track_results_round_trip(line_tables):
    y = np.array([np.exp(-3.0), 1.0])
    res = track_batch(PointBatch(y[None], -3.0), line_tables)
    back = parse_track_results(dump_track_results(res))
    assert [r.to_dict() for r in back] == [r.to_dict() for r in res]


def test_cli_gen_counts(tmp_path, capsys):
    out = tmp_path / "c.json"
    assert main(["gen", "cyclic", "--n", "14", "--out", str(out)]) == EXIT_OK
    assert "m=184 N=15" in capsys.readouterr().out
    assert parse_system(out.read_text()).m == 184
    assert main(["gen", "chandra", "--n", "24", "--out", str(out)]) == EXIT_OK
    assert "m=324 N=25" in capsys.readouterr().out


def test_cli_gen_random_deterministic(tmp_path):
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    for f in (a, b):
        assert main(["gen", "random", "--n", "3", "--m", "10", "--seed", "7", "--out", str(f)]) == 0
    assert a.read_bytes() == b.read_bytes()


def test_cli_gen_usage_errors(tmp_path):
    assert main(["gen", "random", "--n", "3"]) == EXIT_USAGE
    assert main(["gen", "spiral", "--n", "3"]) == EXIT_USAGE
    assert main(["frobnicate"]) == EXIT_USAGE
    assert main(["eval", "--system", "x.json"]) == EXIT_USAGE
    assert main(["gen", "cyclic", "--n", "5", "--backend", "gpu"]) == EXIT_USAGE


def test_cli_eval_example(files, tmp_path, capsys):
    sysf = files("s.json", dump_system(example_system()))
    pts = files("p.json", '{"tau0": 0, "points": [[[1, 0], [1, 0]]]}')
    out = tmp_path / "e.json"
    assert main(["eval", "--system", sysf, "--points", pts, "--out", str(out),
                 "--check-oracle"]) == EXIT_OK
    doc = json.loads(out.read_text())
    assert doc["blocks"][0] == [[[2, 0], [3, 0], [8, 0], [5, 0]]]
    assert doc["oracle_max_rel_dev"] <= 1e-11


def test_cli_eval_oracle_many_points(files, tmp_path, capsys):
    sysf = tmp_path / "r.json"
    ptsf = tmp_path / "p.json"
    assert main(["gen", "random", "--n", "3", "--m", "12", "--seed", "2", "--out", str(sysf)]) == 0
    rng = np.random.default_rng(0)
    y = np.exp(rng.uniform(-1, 1, (100, 4)) + 1j * rng.uniform(-3, 3, (100, 4)))
    ptsf.write_text(dump_points(y, -0.5))
    assert main(["eval", "--system", str(sysf), "--points", str(ptsf), "--check-oracle",
                 "--out", str(tmp_path / "e.json"), "--batch-size", "7"]) == EXIT_OK
    dev = json.loads((tmp_path / "e.json").read_text())["oracle_max_rel_dev"]
    assert dev <= 1e-11


def test_cli_eval_zero_coordinate(files, capsys):
    sysf = files("s.json", dump_system(example_system()))
    pts = files("p.json", '{"tau0": 0, "points": [[[1, 0]], [[0, 0], [1, 0]]]}')
    assert main(["eval", "--system", sysf, "--points", pts]) == EXIT_DATA
    err = capsys.readouterr().err
    assert "ZeroCoordinate" in err and "point 1" in err


def test_cli_data_errors(files, capsys):
    sysf = files("s.json", dump_system(example_system()))
    bad = files("bad.json", '{"n": 1, "support": [[1], [1]], "coefficients": [[[2,0],[3,0]]], '
                            '"lifting": [1, 2]}')
    pts = files("p.json", '{"tau0": 0, "points": [[[1, 0], [1, 0], [1, 0]]]}')
    assert main(["eval", "--system", bad, "--points", pts]) == EXIT_DATA
    assert "DuplicateMonomial" in capsys.readouterr().err
    assert main(["eval", "--system", sysf, "--points", pts]) == EXIT_DATA
    assert "ShapeError" in capsys.readouterr().err
    assert main(["eval", "--system", sysf + ".missing", "--points", pts]) == EXIT_DATA
    assert main(["eval", "--system", files("junk.json", "{"), "--points", pts]) == EXIT_DATA
    assert "line 1" in capsys.readouterr().err


def test_cli_track_closed_form(files, tmp_path, capsys):
    sysf = files("s.json", dump_system(line_system()))
    pts = files("p.json", dump_points(np.array([[np.exp(-2.0), 1.0]]), -2.0))
    out = tmp_path / "t.jsonl"
    assert main(["track", "--system", sysf, "--points", pts, "--out", str(out)]) == EXIT_OK
    assert "1 paths, Converged=1" in capsys.readouterr().out
    (r,) = parse_track_results(out.read_text())
    assert r.residual <= 1e-8 and abs(r.x[0] - 1) <= 1e-8


def test_cli_track_benchmark_protocol(files, capsys):
    sysf = files("s.json", dump_system(line_system()))
    pts = files("p.json", dump_points(np.array([[np.exp(-2.0), 1.0]]), -2.0))
    assert main(["track", "--system", sysf, "--points", pts, "--fixed-steps", "100",
                 "--newton-iters", "1"]) == EXIT_OK
    lines = capsys.readouterr().out.splitlines()
    assert json.loads(lines[0])["steps_taken"] == 100


def test_cli_track_empty(files, capsys):
    sysf = files("s.json", dump_system(line_system()))
    pts = files("p.json", '{"tau0": -1, "points": []}')
    assert main(["track", "--system", sysf, "--points", pts]) == EXIT_OK
    assert "0 paths" in capsys.readouterr().err


def test_cli_track_start_invalid(files, capsys):
    sysf = files("s.json", dump_system(line_system()))
    pts = files("p.json", '{"tau0": -1, "points": [[[0.3, 0]]]}')
    assert main(["track", "--system", sysf, "--points", pts]) == EXIT_DATA
    assert "StartPointInvalid" in capsys.readouterr().err
    assert main(["track", "--system", sysf, "--points", pts, "--skip-start-check"]) == EXIT_OK


def test_cli_track_all_failed(files, capsys):
    sysf = files("s.json", dump_system(line_system()))
    pts = files("p.json", '{"tau0": -1, "points": [[[0, 0], [1, 0]]]}')
    assert main(["track", "--system", sysf, "--points", pts, "--skip-start-check"]) == EXIT_NUMERIC


def test_cli_gen_then_track_random(tmp_path, capsys):
    s, p, t = (str(tmp_path / f) for f in ("s.json", "p.json", "t.jsonl"))
    assert main(["gen", "random", "--n", "2", "--m", "10", "--seed", "3", "--num-points", "4",
                 "--points-out", p, "--out", s]) == 0
    assert main(["track", "--system", s, "--points", p, "--out", t]) == 0
    res = parse_track_results(open(t).read())
    assert len(res) == 4 and all(r.status.value == "Converged" for r in res)


def test_cli_bench(files, tmp_path, capsys):
    sysf = tmp_path / "c.json"
    assert main(["gen", "cyclic", "--n", "5", "--out", str(sysf)]) == 0
    out = tmp_path / "b.csv"
    assert main(["bench", "--system", str(sysf), "--point-counts", "4,8", "--repetitions", "2",
                 "--fixed-steps", "5", "--out", str(out)]) == EXIT_OK
    lines = out.read_text().splitlines()
    assert lines[0] == "points,mean_seconds,std_seconds,per_point_us,backend"
    assert [l.split(",")[0] for l in lines[1:]] == ["4", "8"]
    assert main(["bench", "--system", str(sysf), "--repetitions", "0"]) == EXIT_USAGE
