import csv
import json

import numpy as np
import pytest

from hetindex.cli import main
from hetindex.geometry import Point
from hetindex.network import NodeKind
from hetindex.scenario import ScenarioConfig, generate, load, save


def run(*argv):
    import io

    out = io.StringIO()
    code = main([str(a) for a in argv], out)
    return code, out.getvalue()


@pytest.fixture
def scen(tmp_path):
    p = tmp_path / "s.json"
    code, out = run("gen", "--n", 300, "--seed", 4, "--blockages", 20, "--ues", 10, "--out", p)
    assert code == 0 and "300 SBS" in out
    return p


def test_gen_validate(scen):
    code, out = run("validate", "--scenario", scen)
    assert code == 0 and out.startswith("ok: 330 nodes")


def test_gen_from_config(tmp_path):
    cfg = tmp_path / "c.json"
    cfg.write_text(json.dumps({"area_width": 300, "area_height": 300, "beamwidth_deg": 30, "seed": 1}))
    code, _ = run("gen", "--config", cfg, "--out", tmp_path / "s.json")
    assert code == 0
    sc = load(tmp_path / "s.json")
    assert len(sc.container) == 9
    # g_max = 10 cannot be normalized over a 40 degree beam
    cfg.write_text(json.dumps({"beamwidth_deg": 40}))
    assert run("gen", "--config", cfg, "--out", tmp_path / "t.json")[0] == 2


def test_usage_errors(tmp_path, scen):
    assert run()[0] == 1
    assert run("gen", "--out", tmp_path / "x.json")[0] == 1
    assert run("query", "--scenario", scen, "--type", "radius")[0] == 1
    assert run("query", "--scenario", scen, "--type", "knn", "--center", "1,2", "--k", 0)[0] == 1
    assert run("query", "--scenario", scen, "--type", "radius", "--center", "nope", "--radius", 1)[0] == 1
    assert run("bench", "--n-list", "0", "--out", tmp_path / "b.csv")[0] == 1


def test_data_errors(tmp_path, scen, capsys):
    assert run("validate", "--scenario", tmp_path / "missing.json")[0] == 2
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    assert run("validate", "--scenario", bad)[0] == 2
    d = json.loads(scen.read_text())
    d["nodes"].append(dict(d["nodes"][17]))
    bad.write_text(json.dumps(d))
    capsys.readouterr()
    assert run("validate", "--scenario", bad)[0] == 2
    assert "duplicate node id 17" in capsys.readouterr().err


def _nodes(out):
    lines = out.strip().splitlines()
    return [json.loads(x) for x in lines[:-1]], json.loads(lines[-1])["query_stats"]


def test_query_radius_and_knn(scen):
    sc = load(scen)
    pts = {n.id: n.loc for n in sc.container}
    code, out = run("query", "--scenario", scen, "--type", "radius", "--center", "500,500", "--radius", 300)
    nodes, stats = _nodes(out)
    want = sorted(i for i, p in pts.items() if np.hypot(p.x - 500, p.y - 500) <= 300)
    assert code == 0 and sorted(n["id"] for n in nodes) == want
    assert stats["matches"] == len(want) and stats["nodes_visited"] > 0
    code, out = run("query", "--scenario", scen, "--type", "knn", "--center", "100,100", "--k", 4, "--kind", "SmallBS")
    nodes, _ = _nodes(out)
    assert all(n["kind"] == "SmallBS" for n in nodes) and len(nodes) <= 4


def test_query_sector_and_los(scen):
    code, out = run("query", "--scenario", scen, "--type", "sector", "--origin", "500,500",
                    "--boresight", 45, "--beamwidth", 30, "--range", 400)
    exact, _ = _nodes(out)
    code2, out2 = run("query", "--scenario", scen, "--type", "sector", "--origin", "500,500",
                      "--boresight", 45, "--beamwidth", 30, "--range", 400, "--raw")
    raw, _ = _nodes(out2)
    assert code == code2 == 0
    assert {n["id"] for n in exact} <= {n["id"] for n in raw}
    code, out = run("query", "--scenario", scen, "--type", "los", "--from", "0,0", "--to", "1700,1700")
    hits, stats = _nodes(out)
    assert code == 0 and stats["los_clear"] == (not hits)
    assert all(h["kind"] == "Blockage" for h in hits)
    assert run("query", "--scenario", scen, "--type", "los", "--from", "1,1", "--to", "1,1")[0] == 1


@pytest.mark.parametrize("cmd", ["snr", "sinr"])
def test_links_both(cmd, scen, tmp_path):
    p = tmp_path / "l.csv"
    code, out = run(cmd, "--scenario", scen, "--method", "both", "--out", p)
    assert code == 0 and "identical" in out
    rows = list(csv.DictReader(p.open()))
    assert rows and all(float(r["distance_m"]) <= 200 for r in rows)
    if cmd == "sinr":
        assert all(float(r["sinr_db"]) <= float(r["snr_db"]) for r in rows)


def test_bench_cmd(tmp_path):
    p = tmp_path / "b.csv"
    code, out = run("bench", "--task", "snr", "--n-list", "20,40,80", "--reps", 1, "--out", p)
    assert code == 0
    assert "slope snr array" in out and "slope snr spatial" in out
    assert len(p.read_text().splitlines()) == 1 + 6


def test_churned_large_scenario_validates(tmp_path):
    sc = generate(ScenarioConfig.for_n(10_000, aim=False))
    c = sc.container
    rng = np.random.default_rng(0)
    ids = rng.choice(10_000, 1000, replace=False)
    removed = [c.remove_node(int(i)) for i in ids]
    for n in removed:
        c.add_node(n)
    for i in ids[:300]:
        c.move_node(int(i), Point(*rng.uniform(0, 10_000, 2)))
    p = tmp_path / "big.json"
    save(sc, p)
    code, out = run("validate", "--scenario", p)
    assert code == 0 and "10000 nodes" in out
    assert load(p).container.count(NodeKind.SMALL_BS) == 10_000
