"""Seeded local graph clustering with conductance size selection, plus a
degree-corrected block-model benchmark harness and citation bibliometrics."""

from .corpus import (CitationCorpus, Kind, PaperRecord, citation_counts,
                     keyword_counts, load_corpus, select_topic_papers,
                     source_network)
from .dcsbm import (BlockModelSpec, ExperimentReport, PlantedGraph,
                    ThetaRecipe, load_block_model_spec, precision_recall,
                    run_experiment, sample_graph, sample_theta)
from .errors import (CiteClusterError, ConvergenceError, EmptySeedError,
                     NoLocalMinimumError, ParseError, ValidationError)
from .graph import SparseGraph, SubgraphStats, subgraph_stats
from .metrics import (ClassLabel, LorenzCurve, Side, Tag, TrendSeries,
                      classify, classify_corpus, fractional_breakdown,
                      gini_concentration, lorenz, normalized_trend,
                      rank_compare)
from .ppr import (APPRRanking, PPRVector, PreferenceVector, adjust_and_rank,
                  build_preference, cluster_at, solve_ppr, uniform_seeds)
from .conductance import (SweepCurve, SweepParams, SweepResult,
                          first_local_min, local_cluster, sweep)

__version__ = "0.1.0"

__all__ = [
    "APPRRanking", "BlockModelSpec", "CitationCorpus", "CiteClusterError",
    "ClassLabel", "ConvergenceError", "EmptySeedError", "ExperimentReport",
    "Kind", "LorenzCurve", "NoLocalMinimumError", "PPRVector", "PaperRecord",
    "ParseError", "PlantedGraph", "PreferenceVector", "Side", "SparseGraph",
    "SubgraphStats", "SweepCurve", "SweepParams", "SweepResult", "Tag",
    "ThetaRecipe", "TrendSeries", "ValidationError", "adjust_and_rank",
    "build_preference", "citation_counts", "classify", "classify_corpus",
    "cluster_at", "first_local_min", "fractional_breakdown",
    "gini_concentration", "keyword_counts", "load_block_model_spec",
    "load_corpus", "local_cluster", "lorenz", "normalized_trend",
    "precision_recall", "rank_compare", "run_experiment", "sample_graph",
    "sample_theta", "select_topic_papers", "solve_ppr", "source_network",
    "subgraph_stats", "sweep", "uniform_seeds",
]
