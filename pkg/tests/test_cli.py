import csv
import json

import pytest

from citecluster.cli import main


def run(argv):
    return main([str(a) for a in argv])


def planted_corpus(tmp_path):
    """Synthetic corpus with a dense 8-source community in a sparse background.

    Sources 0..7 form a clique bridged twice into a 40-node background ring
    with chords; 14 citing papers about influenza cite sources 0, 1, 2 often
    enough to clear a threshold of 10.
    """
    edges = []
    for i in range(8):
        for j in range(i + 1, 8):
            edges.append((i, j))
    ring = list(range(8, 48))
    for k, node in enumerate(ring):
        edges.append((node, ring[(k + 1) % 40]))
        if k % 2 == 0:
            edges.append((node, ring[(k + 13) % 40]))
    edges += [(0, 8), (4, 22)]

    flu_ids = list(range(48, 62))
    for f in flu_ids:
        edges.append((f, 0))
    for f in flu_ids[:12]:
        edges.append((f, 1))
    for f in flu_ids[:11]:
        edges.append((f, 2))
    for f in flu_ids[:4]:
        edges.append((f, 9))
    other_ids = [62, 63, 64]
    for o in other_ids:
        edges.append((o, 10))

    edge_path = tmp_path / "edges.csv"
    edge_path.write_text("".join(f"{a},{b}\n" for a, b in edges))

    rows = []
    for sid in range(48):
        kw = "epidemic;mcmc" if sid < 8 else "regression"
        rows.append(f"{sid}\tsource\t{2000 + sid % 5}\tStatJ\tSource paper {sid}\t"
                    f"methods\t{kw}\tStatistics & Probability\t")
    for f in flu_ids:
        rows.append(f"{f}\tciting\t{2010 + f % 3}\tEpiJ\tInfluenza wave study {f}\t"
                    f"we model flu\t\tPublic Health\tLife Sciences & Biomedicine")
    for o in other_ids:
        rows.append(f"{o}\tciting\t2012\tEconJ\tMarket analysis {o}\t"
                    f"prices\t\tEconomics\tSocial Sciences")
    meta_path = tmp_path / "meta.tsv"
    meta_path.write_text("\n".join(rows) + "\n")
    return edge_path, meta_path


@pytest.fixture
def corpus_files(tmp_path):
    return planted_corpus(tmp_path)


def read_csv_rows(path):
    with open(path, encoding="utf-8") as fh:
        lines = [ln for ln in fh if not ln.startswith("#")]
    return list(csv.DictReader(lines))


def test_cluster_recovers_planted_community(corpus_files, tmp_path, capsys):
    edges, meta = corpus_files
    out = tmp_path / "out"
    code = run(["cluster", "--edges", edges, "--metadata", meta,
                "--keywords", "flu,influenza", "--field", "title",
                "--threshold", "10", "--out", out])
    assert code == 0

    cluster = json.loads((out / "cluster.json").read_text())
    assert cluster["members"] == list(range(8))
    assert cluster["cutoff"] == 8
    assert "config" in cluster

    rows = read_csv_rows(out / "curve.csv")
    assert len(rows) >= 8
    phi8 = float(rows[7]["phi"])
    assert phi8 == pytest.approx(2 / 58)
    assert all(float(r["phi"]) > phi8 for r in rows[:7])

    stats = json.loads((out / "stats.json").read_text())
    assert stats["size"] == 8
    assert stats["density"] == pytest.approx(1.0)

    kw_rows = read_csv_rows(out / "keywords.csv")
    table = {r["keyword"]: int(r["count"]) for r in kw_rows}
    assert table == {"epidemic": 8, "mcmc": 8}


def test_cluster_no_topic_exit_2(corpus_files, tmp_path, capsys):
    edges, meta = corpus_files
    code = run(["cluster", "--edges", edges, "--metadata", meta,
                "--keywords", "quantum", "--field", "title",
                "--threshold", "10", "--out", tmp_path / "o"])
    assert code == 2
    assert "no topic papers" in capsys.readouterr().err


def test_cluster_threshold_too_high_exit_3(corpus_files, tmp_path, capsys):
    edges, meta = corpus_files
    code = run(["cluster", "--edges", edges, "--metadata", meta,
                "--keywords", "flu", "--field", "title",
                "--threshold", "99", "--out", tmp_path / "o"])
    assert code == 3
    assert "threshold" in capsys.readouterr().err


def test_cluster_no_local_minimum_exit_4(tmp_path, capsys):
    # a lone clique: conductance falls monotonically, no interior valley
    edges = [(i, j) for i in range(8) for j in range(i + 1, 8)]
    flu = [(f, s) for f in range(8, 20) for s in (0, 1)]
    edge_path = tmp_path / "edges.csv"
    edge_path.write_text("".join(f"{a},{b}\n" for a, b in edges + flu))
    rows = [f"{i}\tsource\t2000\tJ\tSource {i}\t\t\t\t" for i in range(8)]
    rows += [f"{f}\tciting\t2010\tE\tflu report {f}\t\t\t\t" for f in range(8, 20)]
    meta_path = tmp_path / "meta.tsv"
    meta_path.write_text("\n".join(rows) + "\n")
    code = run(["cluster", "--edges", edge_path, "--metadata", meta_path,
                "--keywords", "flu", "--threshold", "10", "--out", tmp_path / "o"])
    assert code == 4


def test_sweep_command_writes_curve_and_ranking(corpus_files, tmp_path):
    edges, meta = corpus_files
    out = tmp_path / "sweepout"
    code = run(["sweep", "--edges", edges, "--metadata", meta,
                "--keywords", "flu", "--threshold", "10", "--out", out])
    assert code == 0
    curve = read_csv_rows(out / "curve.csv")
    ranking = read_csv_rows(out / "ranking.csv")
    assert len(curve) == len(ranking) > 0
    assert int(ranking[0]["rank"]) == 1
    assert float(ranking[0]["score"]) >= float(ranking[-1]["score"])


def write_sim_spec(tmp_path, seed=11):
    path = tmp_path / "model.txt"
    path.write_text(
        "K = 2\nsizes = 12,48\nS = 0.9,0.02,0.02,0.5\nrho = 1.0\n"
        f"recipe = constant\nseed = {seed}\n")
    return path


def test_simulate_writes_cell_reports(tmp_path):
    spec = write_sim_spec(tmp_path)
    out = tmp_path / "sim"
    code = run(["simulate", "--spec", spec, "--alphas", "0.15", "--seeds", "3",
                "--reps", "5", "--nmax", "20", "--out", out])
    assert code == 0
    rows = read_csv_rows(out / "sim_alpha0.15_m3.csv")
    assert len(rows) == 5
    summary = json.loads((out / "sim_alpha0.15_m3.json").read_text())
    assert summary["repetitions"] == 5
    assert 0.0 <= summary["mean_precision"] <= 1.0
    top = json.loads((out / "summary.json").read_text())
    assert len(top["cells"]) == 1


def test_simulate_deterministic_outputs(tmp_path):
    spec = write_sim_spec(tmp_path)
    out = tmp_path / "sim_twice"
    argv = ["simulate", "--spec", spec, "--alphas", "0.15", "--seeds", "3",
            "--reps", "4", "--nmax", "20", "--out", out]
    names = ("sim_alpha0.15_m3.csv", "sim_alpha0.15_m3.json", "summary.json")
    assert run(argv) == 0
    first = {name: (out / name).read_bytes() for name in names}
    assert run(argv) == 0
    second = {name: (out / name).read_bytes() for name in names}
    assert first == second


def test_simulate_bad_reps_exit_1(tmp_path, capsys):
    spec = write_sim_spec(tmp_path)
    assert run(["simulate", "--spec", spec, "--reps", "0",
                "--out", tmp_path / "o"]) == 1


def test_simulate_invalid_spec_names_field(tmp_path, capsys):
    bad = tmp_path / "bad.txt"
    bad.write_text("sizes = 12,48\nS = 0.9\n")
    assert run(["simulate", "--spec", bad, "--reps", "2",
                "--out", tmp_path / "o"]) == 1
    assert "S" in capsys.readouterr().err


def test_config_file_overrides_flags(tmp_path):
    spec = write_sim_spec(tmp_path)
    cfg = tmp_path / "run.cfg"
    cfg.write_text("reps = 3\nnmax = 20\n")
    out = tmp_path / "cfg_out"
    code = run(["simulate", "--spec", spec, "--alphas", "0.15", "--seeds", "3",
                "--reps", "7", "--config", cfg, "--out", out])
    assert code == 0
    summary = json.loads((out / "sim_alpha0.15_m3.json").read_text())
    assert summary["repetitions"] == 3
    assert summary["config"]["reps"] == 3


def test_metrics_reports(corpus_files, tmp_path):
    edges, meta = corpus_files
    out = tmp_path / "metrics"
    code = run(["metrics", "--edges", edges, "--metadata", meta, "--out", out])
    assert code == 0
    for name in ("trends.csv", "lorenz.csv", "breakdown.csv", "gini.csv",
                 "ranks.csv"):
        assert (out / name).exists(), name
    trend = read_csv_rows(out / "trends.csv")
    assert {r["journal"] for r in trend} == {"StatJ"}
    ranks = read_csv_rows(out / "ranks.csv")
    assert len(ranks) == 48
    top = [r for r in ranks if r["source_id"] == "0"][0]
    assert int(top["external_rank"]) == 1  # the flu papers are external citers
    breakdown = read_csv_rows(out / "breakdown.csv")
    weights = {}
    for r in breakdown:
        weights[r["year"]] = weights.get(r["year"], 0) + float(r["weight"])
    assert weights["2012"] == pytest.approx(7.0)  # 4 flu papers + 3 market papers


def test_metrics_requires_years(tmp_path, capsys):
    edge_path = tmp_path / "edges.csv"
    edge_path.write_text("1,0\n")
    meta_path = tmp_path / "meta.tsv"
    meta_path.write_text("0\tsource\t\tJ\tTitle\t\t\t\t\n1\tciting\t\tE\tT\t\t\t\t\n")
    assert run(["metrics", "--edges", edge_path, "--metadata", meta_path,
                "--out", tmp_path / "o"]) == 1
    assert "year" in capsys.readouterr().err
