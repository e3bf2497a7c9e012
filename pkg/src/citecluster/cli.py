"""Command-line front door: cluster | sweep | simulate | metrics.

Commands are deterministic given their flags and seed; the effective
configuration is echoed into every output file (as a ``# config:`` comment
in CSVs, as a ``config`` key in JSONs). Exit codes: 0 success, 1
config/parse problem, 2 empty topic, 3 empty seed set, 4 no local minimum.
"""

from __future__ import annotations

import argparse
import csv
import json
import sys
from pathlib import Path

import numpy as np

from . import corpus as corpus_mod
from . import conductance, dcsbm, metrics, ppr
from .graph import subgraph_stats
from .errors import (CiteClusterError, ConvergenceError, EmptySeedError,
                     NoLocalMinimumError, ParseError, ValidationError)

EXIT_OK = 0
EXIT_CONFIG = 1
EXIT_EMPTY_TOPIC = 2
EXIT_EMPTY_SEED = 3
EXIT_NO_MINIMUM = 4


def _fail(code: int, message: str) -> int:
    print(f"error: {message}", file=sys.stderr)
    return code


def _config_echo(args: argparse.Namespace) -> dict:
    skip = {"func"}
    return {k: v for k, v in sorted(vars(args).items())
            if k not in skip and not k.startswith("_")}


def _config_comment(config: dict) -> str:
    return "config: " + json.dumps(config, sort_keys=True)


def _write_json(path: Path, payload: dict, config: dict) -> None:
    payload = dict(payload)
    payload["config"] = config
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(payload, fh, indent=2, sort_keys=True)
        fh.write("\n")


def _sweep_params(args: argparse.Namespace) -> conductance.SweepParams:
    return conductance.SweepParams(window=args.window, n_min=args.nmin, n_max=args.nmax)


def _load_and_select(args: argparse.Namespace):
    corpus = corpus_mod.load_corpus(args.edges, args.metadata)
    graph = corpus_mod.source_network(corpus)
    keywords = [k.strip() for k in args.keywords.split(",") if k.strip()]
    area_map = metrics.load_area_map(args.area_map) if args.area_map else None
    topic = corpus_mod.select_topic_papers(
        corpus, keywords, field_name=args.field, area_filter=args.area,
        exact_word=args.exact_word, area_map=area_map)
    return corpus, graph, topic


def _preference_from_topic(corpus, graph, topic, threshold):
    counts = corpus_mod.citation_counts(corpus, topic)
    counts = counts.copy()
    counts[graph.degrees == 0] = 0  # isolated sources cannot seed the walk
    return ppr.build_preference(counts, threshold)


def cmd_cluster(args: argparse.Namespace) -> int:
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    config = _config_echo(args)
    corpus, graph, topic = _load_and_select(args)
    if not topic:
        return _fail(EXIT_EMPTY_TOPIC, "no topic papers matched the keywords")
    try:
        pref = _preference_from_topic(corpus, graph, topic, args.threshold)
    except EmptySeedError:
        return _fail(EXIT_EMPTY_SEED,
                     f"no seeds above threshold {args.threshold}; lower --threshold")
    try:
        result = conductance.local_cluster(graph, pref, alpha=args.alpha,
                                           params=_sweep_params(args))
    except NoLocalMinimumError as exc:
        return _fail(EXIT_NO_MINIMUM, str(exc))

    comment = _config_comment(config)
    conductance.write_curve_csv(out / "curve.csv", result.curve, header_lines=[comment])
    _write_json(out / "cluster.json", result.to_dict(), config)
    members = sorted(result.cluster)
    kw_counts = corpus_mod.keyword_counts(corpus, members)
    with open(out / "keywords.csv", "w", newline="", encoding="utf-8") as fh:
        fh.write(f"# {comment}\n")
        writer = csv.writer(fh)
        writer.writerow(["keyword", "count"])
        for kw, cnt in sorted(kw_counts.items(), key=lambda kv: (-kv[1], kv[0])):
            writer.writerow([kw, cnt])
    stats = subgraph_stats(graph, members)
    _write_json(out / "stats.json", stats.to_dict(), config)
    print(f"cluster of size {result.cutoff} written to {out}")
    return EXIT_OK


def cmd_sweep(args: argparse.Namespace) -> int:
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    config = _config_echo(args)
    corpus, graph, topic = _load_and_select(args)
    if not topic:
        return _fail(EXIT_EMPTY_TOPIC, "no topic papers matched the keywords")
    try:
        pref = _preference_from_topic(corpus, graph, topic, args.threshold)
    except EmptySeedError:
        return _fail(EXIT_EMPTY_SEED,
                     f"no seeds above threshold {args.threshold}; lower --threshold")
    solution = ppr.solve_ppr(graph, pref, alpha=args.alpha)
    ranking = ppr.adjust_and_rank(graph, solution)
    n_max = args.nmax if args.nmax is not None else min(500, ranking.positive_count)
    n_max = min(n_max, ranking.positive_count)
    curve = conductance.sweep(graph, ranking, n_max)
    comment = _config_comment(config)
    conductance.write_curve_csv(out / "curve.csv", curve, header_lines=[comment])
    ppr.write_ranking_csv(out / "ranking.csv", graph, ranking, top=n_max,
                          header_lines=[comment])
    print(f"sweep curve over {n_max} prefixes written to {out}")
    return EXIT_OK


def cmd_simulate(args: argparse.Namespace) -> int:
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    if args.reps < 1:
        return _fail(EXIT_CONFIG, "reps must be >= 1")
    spec = dcsbm.load_block_model_spec(args.spec)
    if args.seed is not None and "seed" not in _spec_file_keys(args.spec):
        spec.rng_seed = args.seed
    alphas = [float(a) for a in args.alphas.split(",") if a.strip()]
    seed_counts = [int(m) for m in args.seeds.split(",") if m.strip()]
    if not alphas or not seed_counts:
        return _fail(EXIT_CONFIG, "need at least one alpha and one seed count")
    params = _sweep_params(args)
    config = _config_echo(args)
    comment = _config_comment(config)

    summaries = []
    for alpha in alphas:
        for m in seed_counts:
            report = dcsbm.run_experiment(spec, alpha=alpha, num_seeds=m,
                                          repetitions=args.reps, params=params,
                                          jobs=args.jobs)
            stem = f"sim_alpha{alpha:g}_m{m}"
            dcsbm.write_report_csv(out / f"{stem}.csv", report,
                                   header_lines=[comment])
            dcsbm.write_report_json(out / f"{stem}.json", report, config=config)
            summaries.append(report.summary())
    _write_json(out / "summary.json", {"cells": summaries}, config)
    print(f"{len(summaries)} experiment cells written to {out}")
    return EXIT_OK


def _spec_file_keys(path) -> set[str]:
    keys = set()
    with open(path, encoding="utf-8") as fh:
        for raw in fh:
            line = raw.strip()
            if line and not line.startswith("#") and "=" in line:
                keys.add(line.partition("=")[0].strip().lower())
    return keys


def cmd_metrics(args: argparse.Namespace) -> int:
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    config = _config_echo(args)
    comment = _config_comment(config)
    corpus = corpus_mod.load_corpus(args.edges, args.metadata)
    if not any(p.year is not None for p in corpus.source_papers()):
        return _fail(EXIT_CONFIG, "metadata carries no publication years")
    area_map = metrics.load_area_map(args.area_map) if args.area_map \
        else (metrics.AREA_MAP_WITH_SUBFIELDS if args.carve_out
              else metrics.DEFAULT_AREA_MAP)
    labels = metrics.classify_corpus(corpus, area_map)

    years = [p.year for p in corpus.papers if p.year is not None]
    if args.years:
        y0, y1 = (int(y) for y in args.years.split(":"))
    else:
        y0, y1 = min(years), max(years)
    journals = ([j.strip() for j in args.journals.split(",") if j.strip()]
                if args.journals else
                sorted({p.venue for p in corpus.source_papers() if p.venue}))

    # citation trends, one normalizer per journal
    with open(out / "trends.csv", "w", newline="", encoding="utf-8") as fh:
        fh.write(f"# {comment}\n")
        writer = csv.writer(fh)
        writer.writerow(["journal", "year", "normalized_citations"])
        for journal in journals:
            series = metrics.normalized_trend(corpus, journal, (y0, y1))
            for year in sorted(series.values):
                writer.writerow([journal, year, repr(series.values[year])])

    # citation inequality per journal
    received = np.zeros(corpus.n_source, dtype=np.int64)
    if corpus.edges.size:
        np.add.at(received, corpus.edges[:, 1], 1)
    with open(out / "lorenz.csv", "w", newline="", encoding="utf-8") as fh:
        fh.write(f"# {comment}\n")
        writer = csv.writer(fh)
        writer.writerow(["journal", "p", "share"])
        for journal in journals:
            ids = [p.id for p in corpus.source_papers() if p.venue == journal]
            curve = metrics.lorenz(received[ids])
            for p, share in curve:
                writer.writerow([journal, repr(float(p)), repr(float(share))])

    # yearly field breakdown over citing papers
    breakdown = metrics.fractional_breakdown(corpus, labels,
                                             carve_out=args.carve_out)
    with open(out / "breakdown.csv", "w", newline="", encoding="utf-8") as fh:
        fh.write(f"# {comment}\n")
        writer = csv.writer(fh)
        writer.writerow(["year", "tag", "weight"])
        for year in sorted(breakdown):
            for tag in sorted(breakdown[year], key=lambda t: t.value):
                writer.writerow([year, tag.value, repr(breakdown[year][tag])])

    # yearly concentration per journal (and pooled)
    cited_by: dict[str, set[int]] = {}
    journal_of = {p.id: p.venue for p in corpus.source_papers()}
    for citing, source in corpus.edges:
        venue = journal_of.get(int(source), "")
        if venue:
            cited_by.setdefault(venue, set()).add(int(citing))
    with open(out / "gini.csv", "w", newline="", encoding="utf-8") as fh:
        fh.write(f"# {comment}\n")
        writer = csv.writer(fh)
        writer.writerow(["journal", "year", "gini"])
        for journal in ["all"] + journals:
            subset = None if journal == "all" else cited_by.get(journal, set())
            part = metrics.fractional_breakdown(corpus, labels,
                                                carve_out=args.carve_out,
                                                paper_ids=subset)
            for year in sorted(part):
                total = sum(part[year].values())
                if total <= 0:
                    continue
                shares = {t: w / total for t, w in part[year].items()}
                writer.writerow([journal, year,
                                 repr(metrics.gini_concentration(shares))])

    # internal vs external ranks per source paper
    entries = metrics.rank_compare(corpus, labels)
    with open(out / "ranks.csv", "w", newline="", encoding="utf-8") as fh:
        fh.write(f"# {comment}\n")
        writer = csv.writer(fh)
        writer.writerow(["source_id", "internal_count", "external_count",
                         "internal_rank", "external_rank", "total", "top20_either"])
        for e in entries:
            top20 = int(e.internal_rank <= 20 or e.external_rank <= 20)
            writer.writerow([e.source_id, e.internal_count, e.external_count,
                             e.internal_rank, e.external_rank, e.total, top20])
    print(f"metric reports written to {out}")
    return EXIT_OK


def _apply_config_file(args: argparse.Namespace, parser: argparse.ArgumentParser) -> None:
    """Values from --config (key = value lines) override parsed flags."""
    if not getattr(args, "config", None):
        return
    path = Path(args.config)
    if not path.exists():
        raise ParseError(f"config file {path} does not exist")
    casts = {
        "alpha": float, "threshold": int, "window": int, "nmin": int,
        "nmax": int, "seed": int, "jobs": int, "reps": int,
        "exact_word": lambda v: v.lower() in ("1", "true", "yes"),
        "carve_out": lambda v: v.lower() in ("1", "true", "yes"),
    }
    with open(path, encoding="utf-8") as fh:
        for ln, raw in enumerate(fh, start=1):
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            if "=" not in line:
                raise ParseError(f"{path}:{ln}: expected 'key = value'")
            key, _, val = line.partition("=")
            key = key.strip().lower().replace("-", "_")
            val = val.strip()
            if not hasattr(args, key):
                raise ParseError(f"{path}:{ln}: unknown option {key!r}")
            cast = casts.get(key, str)
            try:
                setattr(args, key, cast(val))
            except ValueError:
                raise ParseError(f"{path}:{ln}: bad value for {key!r}") from None


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="citecluster",
        description="Seeded local clustering, block-model benchmarks and "
                    "bibliometric reports for citation networks.")
    sub = parser.add_subparsers(dest="command", required=True)

    def add_common(p):
        p.add_argument("--out", required=True, help="output directory")
        p.add_argument("--config", help="key=value file; overrides flags")
        p.add_argument("--seed", type=int, default=None,
                       help="global RNG seed (default 0 where randomness is used)")

    def add_pipeline_inputs(p):
        p.add_argument("--edges", required=True, help="edge CSV (citing_id,source_id)")
        p.add_argument("--metadata", help="metadata TSV")
        p.add_argument("--keywords", required=True, help="comma-separated keywords")
        p.add_argument("--field", default="title", choices=["title", "abstract"])
        p.add_argument("--area", default=None,
                       help="restrict topic papers to one broad-area tag (e.g. SOC)")
        p.add_argument("--area-map", dest="area_map",
                       help="pattern<TAB>tag TSV replacing the built-in area map")
        p.add_argument("--exact-word", dest="exact_word", action="store_true",
                       help="match whole words instead of substrings")
        p.add_argument("--threshold", type=int, default=10,
                       help="minimum topic citations for a seed (default 10)")
        p.add_argument("--alpha", type=float, default=ppr.DEFAULT_ALPHA)

    def add_sweep_flags(p, nmin_default=2, nmax_default=None):
        p.add_argument("--window", type=int, default=5)
        p.add_argument("--nmin", type=int, default=nmin_default)
        p.add_argument("--nmax", type=int, default=nmax_default)

    p_cluster = sub.add_parser("cluster", help="find a local community for a topic")
    add_pipeline_inputs(p_cluster)
    add_sweep_flags(p_cluster)
    add_common(p_cluster)
    p_cluster.set_defaults(func=cmd_cluster)

    p_sweep = sub.add_parser("sweep", help="export the conductance curve and ranking")
    add_pipeline_inputs(p_sweep)
    add_sweep_flags(p_sweep)
    add_common(p_sweep)
    p_sweep.set_defaults(func=cmd_sweep)

    p_sim = sub.add_parser("simulate", help="repeated block-model recovery runs")
    p_sim.add_argument("--spec", required=True, help="block-model spec file")
    p_sim.add_argument("--alphas", default="0.15", help="comma list of alphas")
    p_sim.add_argument("--seeds", default="1,5,10,15,20",
                       help="comma list of seed counts")
    p_sim.add_argument("--reps", type=int, default=50)
    p_sim.add_argument("--jobs", type=int, default=1,
                       help="worker threads across repetitions")
    add_sweep_flags(p_sim, nmax_default=55)
    add_common(p_sim)
    p_sim.set_defaults(func=cmd_simulate)

    p_met = sub.add_parser("metrics", help="trend/Lorenz/Gini/rank reports")
    p_met.add_argument("--edges", required=True)
    p_met.add_argument("--metadata", required=True)
    p_met.add_argument("--journals", help="comma list (default: all venues)")
    p_met.add_argument("--years", help="range as START:END (default: data range)")
    p_met.add_argument("--area-map", dest="area_map")
    p_met.add_argument("--carve-out", dest="carve_out", action="store_true",
                       help="do not double-count BE under SOC or CS under TECH")
    add_common(p_met)
    p_met.set_defaults(func=cmd_metrics)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        _apply_config_file(args, parser)
        return args.func(args)
    except (ParseError, ValidationError) as exc:
        return _fail(EXIT_CONFIG, str(exc))
    except EmptySeedError as exc:
        return _fail(EXIT_EMPTY_SEED, str(exc))
    except NoLocalMinimumError as exc:
        return _fail(EXIT_NO_MINIMUM, str(exc))
    except (ConvergenceError, CiteClusterError) as exc:
        return _fail(EXIT_CONFIG, str(exc))


if __name__ == "__main__":
    sys.exit(main())
