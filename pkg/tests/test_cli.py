import csv
import json
import subprocess
import sys
import xml.etree.ElementTree as ET

import pytest

from gwplace.cli import main
from gwplace.graph import load_solution


def run(*args):
    return main([str(a) for a in args])


def write(path, text):
    path.write_text(text)
    return path


def test_generate(tmp_path):
    out = tmp_path / "t.csv"
    assert run("generate", "--nodes", 1000, "--width", 5000, "--height", 7500, "--seed", 1, "--out", out) == 0
    rows = out.read_text().splitlines()
    assert rows[0] == "id,x,y" and len(rows) == 1001
    first = out.read_bytes()
    assert run("generate", "--nodes", 1000, "--width", 5000, "--height", 7500, "--seed", 1, "--out", out) == 0
    assert out.read_bytes() == first


def test_generate_missing_nodes(tmp_path, capsys):
    with pytest.raises(SystemExit) as e:
        run("generate", "--width", 5000, "--height", 7500, "--out", tmp_path / "t.csv")
    assert e.value.code == 1
    assert "--nodes" in capsys.readouterr().err


def test_module_entry_point(tmp_path):
    out = tmp_path / "t.csv"
    proc = subprocess.run(
        [sys.executable, "-m", "gwplace", "generate", "--nodes", "3", "--width", "1", "--height", "1", "--out", out],
        capture_output=True, text=True,
    )
    assert proc.returncode == 0, proc.stderr
    proc = subprocess.run([sys.executable, "-m", "gwplace", "solve"], capture_output=True, text=True)
    assert proc.returncode == 1


def test_solve_edgeless(tmp_path, capsys):
    topo = write(tmp_path / "t.csv", "id,x,y\n0,0,0\n1,1e6,0\n2,0,1e6\n3,1e6,1e6\n")
    out = tmp_path / "s.json"
    assert run("solve", "--topology", topo, "--out", out, "--k", 1) == 0
    assert load_solution(out).gateways == {0, 1, 2, 3}
    assert "gateways=4" in capsys.readouterr().out


def test_solve_colocated(tmp_path):
    topo = write(tmp_path / "t.csv", "id,x,y\n" + "".join(f"{i},10,10\n" for i in range(5)))
    out = tmp_path / "s.json"
    assert run("solve", "--topology", topo, "--out", out, "--capacity", 1) == 0
    sol = load_solution(out)
    assert len(sol.gateways) == 1 and len(sol.connections) == 4


def test_solve_then_validate_k3(tmp_path, capsys):
    topo = tmp_path / "t.csv"
    run("generate", "--nodes", 150, "--width", 3000, "--height", 3000, "--seed", 4, "--out", topo)
    sol = tmp_path / "s.json"
    graph = tmp_path / "g.csv"
    assert run("solve", "--topology", topo, "--out", sol, "--k", 3, "--seed", 8, "--graph-out", graph) == 0
    assert graph.read_text().startswith("u,v,sf,cost\n")
    capsys.readouterr()
    assert run("validate", "--topology", topo, "--solution", sol, "--k", 3, "--seed", 8, "--json") == 0
    assert json.loads(capsys.readouterr().out)["feasible"] is True
    # the same connections cannot satisfy k=4
    code = run("validate", "--topology", topo, "--solution", sol, "--k", 4, "--seed", 8)
    assert code == 2
    assert "under-dominated" in capsys.readouterr().out


def test_solve_is_byte_deterministic(tmp_path):
    topo = tmp_path / "t.csv"
    run("generate", "--nodes", 200, "--width", 4000, "--height", 4000, "--seed", 2, "--out", topo)
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    run("solve", "--topology", topo, "--out", a, "--k", 2, "--seed", 5)
    run("solve", "--topology", topo, "--out", b, "--k", 2, "--seed", 5)
    assert a.read_bytes() == b.read_bytes()


def test_solve_with_config_and_overrides(tmp_path):
    topo = tmp_path / "t.csv"
    run("generate", "--nodes", 80, "--width", 3000, "--height", 3000, "--seed", 2, "--out", topo)
    cfg = write(tmp_path / "r.cfg", "# radio\ngamma = 3.0\nshadowing_sigma_db = 0\ncapacity = 1/2\n")
    out = tmp_path / "s.json"
    assert run("solve", "--topology", topo, "--out", out, "--config", cfg) == 0
    assert run("solve", "--topology", topo, "--out", out, "--config", cfg, "--gamma", 4.0) == 0
    assert run("solve", "--topology", topo, "--out", out, "--gamma", -1) == 1


def test_missing_topology_is_io_error(tmp_path):
    assert run("solve", "--topology", tmp_path / "nope.csv", "--out", tmp_path / "s.json") == 3


def test_malformed_topology_is_usage_error(tmp_path, capsys):
    topo = write(tmp_path / "t.csv", "id,x,y\n0,0,0\n1,abc,5\n")
    assert run("solve", "--topology", topo, "--out", tmp_path / "s.json") == 1
    assert "line 3" in capsys.readouterr().err


def test_bench_one_cell(tmp_path, capsys):
    out_csv, out_json = tmp_path / "r.csv", tmp_path / "r.json"
    args = ["bench", "--nodes", 100, "--areas", "2000x3000", "--reps", 2, "--seed", 3,
            "--out-csv", out_csv, "--out-json", out_json]
    assert run(*args) == 0
    rows = list(csv.DictReader(out_csv.open()))
    assert len(rows) == 2
    assert len(json.loads(out_json.read_text())["cells"]) == 1
    first = [{k: v for k, v in r.items() if k != "time_s"} for r in rows]
    assert run(*args) == 0
    again = [{k: v for k, v in r.items() if k != "time_s"} for r in csv.DictReader(out_csv.open())]
    assert first == again


def test_bench_invalid_grid(tmp_path):
    assert run("bench", "--out-csv", tmp_path / "r.csv") == 1
    with pytest.raises(SystemExit) as e:
        run("bench", "--nodes", 10, "--areas", "0x5", "--out-csv", tmp_path / "r.csv")
    assert e.value.code == 1


def test_bench_published_preset_expands():
    import argparse

    from gwplace.cli import _grid, build_parser

    args = build_parser().parse_args(["bench", "--preset", "published", "--out-csv", "x.csv"])
    grid = _grid(args)
    assert grid.node_counts == [1000, 2500, 5000, 10000, 20000]
    assert [w for w, _ in grid.areas] == [5000, 10000, 15000, 20000]
    assert grid.k_values == [1, 2, 3] and grid.repetitions == 30
    assert isinstance(args, argparse.Namespace)


def test_plot(tmp_path):
    topo = write(tmp_path / "t.csv", "id,x,y\n0,0,0\n1,100,0\n2,50,80\n")
    sol = tmp_path / "s.json"
    run("solve", "--topology", topo, "--out", sol)
    svg, hist = tmp_path / "m.svg", tmp_path / "h.svg"
    assert run("plot", "--topology", topo, "--solution", sol, "--out", svg, "--hist-out", hist) == 0
    ns = "{http://www.w3.org/2000/svg}"
    root = ET.parse(svg).getroot()
    circles = [e for e in root.iter(ns + "circle")]
    links = [e for e in root.iter(ns + "line") if e.get("class") == "link"]
    assert len(circles) == 3 and len(links) == 2
    assert all(e.get("data-sf") == "7" for e in links)
    ET.parse(hist)


def test_plot_mismatch(tmp_path, capsys):
    topo = write(tmp_path / "t.csv", "id,x,y\n0,0,0\n")
    sol = write(tmp_path / "s.json", '{"gateways": [0, 7], "connections": []}')
    assert run("plot", "--topology", topo, "--solution", sol, "--out", tmp_path / "m.svg") == 1
    assert "gateway 7" in capsys.readouterr().err
