import json
import subprocess
import sys

import numpy as np
import pytest

from modsig import report
from modsig.cli import main
from support import benchmark_graph


@pytest.fixture
def files(tmp_path):
    def write(name, text):
        p = tmp_path / name
        p.write_text(text)
        return str(p)
    return write


@pytest.fixture
def path_inputs(files):
    return {
        "graph": files("path.txt", "# path\n0 1\n1 2\n"),
        "a": files("a.txt", "0 1\n1 2\n2 1\n"),
        "b": files("b.txt", "0 1\n1 1\n2 2\n"),
        "one": files("one.txt", "0 7\n1 7\n2 7\n"),
    }


def test_analyze_path(path_inputs, tmp_path, capsys):
    out = tmp_path / "r.json"
    code = main(["analyze", "--graph", path_inputs["graph"], "--labels", path_inputs["a"],
                 "--json-out", str(out)])
    assert code == 0
    rep = json.loads(out.read_text())
    assert rep["q_n"] == -0.5
    assert rep["mu_n"] == pytest.approx(-1 / 6, rel=1e-11)
    assert rep["condition_flags"] == {"eta_le_half": False, "epsilon_le_1_over_8e": False}
    assert rep["inputs"]["n"] == 3 and rep["inputs"]["K"] == 2
    assert len(rep["inputs"]["graph"]["sha256"]) == 64
    assert rep["p_upper"] + rep["p_lower"] == pytest.approx(1.0)
    text = capsys.readouterr().out
    assert "-0.5" in text and "eta<=1/2: False" in text


def test_analyze_json_round_trip(path_inputs, tmp_path):
    out = tmp_path / "r.json"
    main(["analyze", "--graph", path_inputs["graph"], "--labels", path_inputs["a"],
          "--json-out", str(out)])
    text = out.read_text()
    assert report.dumps(json.loads(text)) == text


def test_analyze_degenerate(path_inputs, capsys):
    code = main(["analyze", "--graph", path_inputs["graph"], "--labels", path_inputs["one"]])
    assert code == 2
    assert "single-community partition: test undefined" in capsys.readouterr().err


def test_analyze_missing_file(path_inputs, tmp_path, capsys):
    code = main(["analyze", "--graph", str(tmp_path / "nope.txt"), "--labels", path_inputs["a"]])
    assert code == 1
    assert "error" in capsys.readouterr().err


def test_parse_error_has_line(files, path_inputs, capsys):
    bad = files("bad.txt", "0 1\n1 x\n")
    assert main(["analyze", "--graph", bad, "--labels", path_inputs["a"]]) == 1
    assert "bad.txt:2" in capsys.readouterr().err


def test_probs_length_mismatch(path_inputs, capsys):
    code = main(["analyze", "--graph", path_inputs["graph"], "--labels", path_inputs["a"],
                 "--probs", "0.2,0.3,0.5"])
    assert code == 1


@pytest.fixture
def bench_inputs(files):
    g = benchmark_graph()
    edges = "\n".join(f"{u} {v}" for u, v in g.edges.tolist())
    labels = "\n".join(f"{i} {i % 4}" for i in range(g.n))
    return files("bench.txt", edges + "\n"), files("bench_labels.txt", labels + "\n")


def test_simulate_byte_identical(bench_inputs, tmp_path):
    graph, labels = bench_inputs
    outs = []
    for run in range(2):
        csv, js = tmp_path / f"t{run}.csv", tmp_path / f"s{run}.json"
        code = main(["simulate", "--graph", graph, "--labels", labels, "--replicates", "100000",
                     "--seed", "42", "--csv-out", str(csv), "--json-out", str(js)])
        assert code == 0
        outs.append((csv.read_bytes(), js.read_bytes()))
    assert outs[0] == outs[1]
    header = outs[0][0].decode().splitlines()[0]
    assert header.startswith("x,scale,empirical_tail,gaussian_tail,ratio,std_err")


def test_simulate_probs_override_and_flags(path_inputs, tmp_path):
    js, csv = tmp_path / "s.json", tmp_path / "t.csv"
    code = main(["simulate", "--graph", path_inputs["graph"], "--labels", path_inputs["a"],
                 "--probs", "0.5,0.5", "--replicates", "2000", "--x-grid", "0.001,1,5",
                 "--json-out", str(js), "--csv-out", str(csv)])
    assert code == 0
    s = json.loads(js.read_text())
    assert s["probs"] == [0.5, 0.5]
    rows = [line.split(",") for line in csv.read_text().splitlines()[1:]]
    flags = {(r[0], r[1]): r[-1] for r in rows}
    cap = s["valid_x_range"]
    assert flags[("1.0", "delta")] == str(1.0 <= cap)
    assert flags[("5.0", "sigma")] == "False"


def test_simulate_probs_only(path_inputs):
    assert main(["simulate", "--graph", path_inputs["graph"], "--probs", "0.3,0.7",
                 "--replicates", "100"]) == 0
    assert main(["simulate", "--graph", path_inputs["graph"], "--replicates", "100"]) == 1


def test_simulate_budget(path_inputs, capsys):
    code = main(["simulate", "--graph", path_inputs["graph"], "--labels", path_inputs["a"],
                 "--replicates", "1000", "--budget", "10"])
    assert code == 1
    assert "budget" in capsys.readouterr().err


def test_validate_small_is_exact(path_inputs, tmp_path, capsys):
    js = tmp_path / "v.json"
    code = main(["validate", "--graph", path_inputs["graph"], "--labels", path_inputs["a"],
                 "--json-out", str(js)])
    assert code == 0
    checks = json.loads(js.read_text())["checks"]
    modes = {c["name"]: c["mode"] for c in checks}
    assert modes["null variance (enumeration)"] == "exact"
    assert modes["quadratic characteristic mean one"] == "exact"
    assert all(c["passed"] for c in checks)
    assert "FAIL" not in capsys.readouterr().out


def test_validate_larger_uses_mc(bench_inputs):
    graph, labels = bench_inputs
    assert main(["validate", "--graph", graph, "--labels", labels]) == 0


def test_validate_corrupted_labels(files, path_inputs, capsys):
    bad = files("bad_labels.txt", "0 1\n1 -3\n2 1\n")
    assert main(["validate", "--graph", path_inputs["graph"], "--labels", bad]) == 1
    assert "out of range" in capsys.readouterr().err


def test_compare(path_inputs, tmp_path, capsys):
    js = tmp_path / "c.json"
    code = main(["compare", "--graph", path_inputs["graph"], "--labels", path_inputs["a"],
                 "--labels-b", path_inputs["b"], "--json-out", str(js)])
    assert code == 0
    rep = json.loads(js.read_text())
    assert not rep["partial"]
    assert rep["z_sigma_difference"] == pytest.approx(rep["a"]["z_sigma"] - rep["b"]["z_sigma"])
    assert "no joint inference" in rep["note"]
    code = main(["compare", "--graph", path_inputs["graph"], "--labels", path_inputs["a"],
                 "--labels-b", path_inputs["a"], "--json-out", str(js)])
    assert json.loads(js.read_text())["z_sigma_difference"] == 0.0


def test_compare_partial(path_inputs, tmp_path, capsys):
    js = tmp_path / "c.json"
    code = main(["compare", "--graph", path_inputs["graph"], "--labels", path_inputs["a"],
                 "--labels-b", path_inputs["one"], "--json-out", str(js)])
    assert code == 0
    rep = json.loads(js.read_text())
    assert rep["partial"] and rep["b"]["degenerate"]
    assert rep["z_sigma_difference"] is None
    assert "partial" in capsys.readouterr().out


def test_module_entry_point(path_inputs):
    r = subprocess.run([sys.executable, "-m", "modsig", "analyze", "--graph", path_inputs["graph"],
                        "--labels", path_inputs["a"]], capture_output=True, text=True)
    assert r.returncode == 0
    assert "q_n" in r.stdout or "Q_n" in r.stdout


def test_dumps_stable_under_float_noise():
    a = report.dumps({"x": 0.1 + 0.2, "y": np.float64(1 / 3), "z": [1, True, None]})
    assert a == report.dumps(json.loads(a))
    assert '"x": 0.3' in a
