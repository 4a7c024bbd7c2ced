import csv
import json
import subprocess
import sys

import pytest

from obsplan.cli import main
from obsplan.harness import CSV_COLUMNS
from obsplan.ilp import build_model, tour_assignment
from obsplan.instance import Instance, prepare


@pytest.fixture
def inst_path(tmp_path):
    path = tmp_path / "inst.json"
    assert main(["gen", "--n", "5", "--map", "200", "--seed", "7", "--out", str(path)]) == 0
    return path


def test_gen_writes_instance(inst_path):
    data = json.loads(inst_path.read_text())
    assert set(data) >= {"map_size", "start", "epsilon", "sensing", "objects", "seed"}
    assert len(data["objects"]) == 5 and data["seed"] == 7
    assert data["sensing"]["theta_deg"] == pytest.approx(30.0)
    assert all(0 <= o["facing_deg"] < 360 for o in data["objects"])


def test_plan_end_to_end(inst_path, tmp_path):
    out = tmp_path / "plan.json"
    assert main(["plan", "--in", str(inst_path), "--method", "gtsp", "--qstar", "0.7", "--out", str(out)]) == 0
    plan = json.loads(out.read_text())
    assert plan["feasible"] is True and plan["method"] == "GTSP"
    prep = prepare(Instance.load(inst_path))
    assert plan["q_star"] == pytest.approx(prep.q_star(0.7))
    assert sorted(k for s in plan["stops"] for k in s["observes"]) == list(range(5))


def test_plan_deterministic(inst_path, tmp_path):
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    for p in (a, b):
        main(["plan", "--in", str(inst_path), "--method", "RS", "--seed", "3", "--out", str(p)])
    assert a.read_bytes() == b.read_bytes()


def test_rounded_flag(inst_path, tmp_path):
    out = tmp_path / "plan.json"
    assert main(["plan", "--in", str(inst_path), "--rounded", "--out", str(out)]) == 0
    assert json.loads(out.read_text())["feasible"]


def test_brute_and_bound(tmp_path):
    path = tmp_path / "i.json"
    main(["gen", "--n", "4", "--seed", "2", "--out", str(path)])
    out, lb_out = tmp_path / "b.json", tmp_path / "lb.json"
    assert main(["brute", "--in", str(path), "--qstar", "0.5", "--out", str(out)]) == 0
    assert main(["bound", "--in", str(path), "--out", str(lb_out)]) == 0
    brute = json.loads(out.read_text())
    lb = json.loads(lb_out.read_text())["lower_bound_m"]
    assert brute["method"] == "BRUTE" and lb <= brute["total_length_m"] + 1e-9


def test_points_dump(inst_path, tmp_path):
    out = tmp_path / "pts.json"
    assert main(["points", "--in", str(inst_path), "--out", str(out)]) == 0
    data = json.loads(out.read_text())
    counts = {}
    for p in data["points"]:
        counts[p["object"]] = counts.get(p["object"], 0) + 1
    assert len(counts) == 5 and len(set(counts.values())) == 1


def test_bench_csv_schema(tmp_path):
    out, summ = tmp_path / "r.csv", tmp_path / "s.txt"
    argv = ["bench", "--n", "3,4", "--cases", "2", "--dmax", "10", "--qstar", "0.3,0.5,0.7,0.9", "--out", str(out)]
    assert main(argv + ["--summary", str(summ)]) == 0
    with open(out) as fh:
        reader = csv.DictReader(fh)
        assert reader.fieldnames == CSV_COLUMNS
        rows = list(reader)
    assert {r["n"] for r in rows} == {"3", "4"}
    assert {r["q_star_frac"] for r in rows} == {"0.3", "0.5", "0.7", "0.9"}
    assert "BRUTE" in {r["method"] for r in rows}
    assert summ.read_text().strip()


def test_lp_export_and_validate(tmp_path):
    path = tmp_path / "i.json"
    main(["gen", "--n", "2", "--map", "50", "--epsilon", "1.0", "--seed", "1", "--out", str(path)])
    lp = tmp_path / "m.lp"
    assert main(["lp-export", "--in", str(path), "--qstar", "0.3", "--out", str(lp)]) == 0
    assert "Subject To" in lp.read_text()
    prep = prepare(Instance.load(path))
    model = build_model(prep, prep.q_star(0.3))
    best = [(0, 0)] + [(z, int(model.zone_quality[z].argmax())) for z in (1, 2)]
    sol = tmp_path / "sol.json"
    sol.write_text(json.dumps(tour_assignment(model, best)))
    rep = tmp_path / "rep.json"
    assert main(["validate", "--in", str(path), "--qstar", "0.3", "--solution", str(sol), "--out", str(rep)]) == 0
    assert json.loads(rep.read_text())["ok"] is True
    lines = tmp_path / "sol.txt"
    lines.write_text("\n".join(f"{k} {v}" for k, v in tour_assignment(model, best).items()))
    assert main(["validate", "--in", str(path), "--qstar", "0.3", "--solution", str(lines), "--out", str(rep)]) == 0
    zeros = tmp_path / "zeros.json"
    zeros.write_text("{}")
    assert main(["validate", "--in", str(path), "--qstar", "0.3", "--solution", str(zeros), "--out", str(rep)]) == 1


def test_domain_error_exit_code(inst_path, capsys):
    assert main(["plan", "--in", str(inst_path), "--qstar", "0.01"]) == 1
    assert "outside the solvable band" in capsys.readouterr().err


def test_bad_config_exit_code(tmp_path, capsys):
    assert main(["gen", "--n", "3", "--dmin", "5", "--dmax", "4", "--out", str(tmp_path / "x.json")]) == 1
    assert "error" in capsys.readouterr().err


def test_io_error_exit_code(tmp_path, capsys):
    assert main(["plan", "--in", str(tmp_path / "missing.json")]) == 2
    assert "I/O error" in capsys.readouterr().err


def test_malformed_json_is_domain_error(tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    assert main(["bound", "--in", str(bad)]) == 1


def test_module_entry_point(tmp_path):
    out = tmp_path / "i.json"
    r = subprocess.run([sys.executable, "-m", "obsplan", "gen", "--n", "3", "--out", str(out)], capture_output=True)
    assert r.returncode == 0 and out.exists()
