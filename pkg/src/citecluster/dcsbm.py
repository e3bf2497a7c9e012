"""Degree-corrected block-model sampling and repeated recovery experiments.

Randomness flows through numpy's counter-based Philox generator. Every
repetition of an experiment draws from its own `SeedSequence` substream, so
results are bit-reproducible for a given seed regardless of how many worker
threads execute the repetitions.
"""

from __future__ import annotations

import csv
import json
import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from functools import lru_cache
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from .errors import NoLocalMinimumError, ParseError, ValidationError
from .graph import SparseGraph
from .ppr import uniform_seeds
from .conductance import SweepParams, local_cluster

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class ThetaRecipe:
    """How per-node degree propensities are produced.

    ``constant`` fixes every propensity to 1 (plain block model);
    ``uniform`` draws eta ~ Uniform(lo, hi) per node and rescales within
    each block so the block sums equal the block sizes exactly.
    """

    kind: str
    lo: float = 1.0
    hi: float = 10.0

    @classmethod
    def constant(cls) -> "ThetaRecipe":
        return cls(kind="constant")

    @classmethod
    def uniform(cls, lo: float = 1.0, hi: float = 10.0) -> "ThetaRecipe":
        if not lo < hi:
            raise ValidationError(f"uniform recipe needs lo < hi, got ({lo}, {hi})")
        return cls(kind="uniform", lo=lo, hi=hi)

    def describe(self) -> str:
        if self.kind == "constant":
            return "constant"
        return f"uniform:{self.lo:g},{self.hi:g}"


@dataclass
class BlockModelSpec:
    """Everything needed to sample one graph reproducibly."""

    sizes: Sequence[int]
    S: np.ndarray
    rho: float = 1.0
    theta_recipe: ThetaRecipe = field(default_factory=ThetaRecipe.constant)
    rng_seed: int = 0

    def __post_init__(self):
        self.sizes = [int(s) for s in self.sizes]
        self.S = np.asarray(self.S, dtype=np.float64)
        if any(s <= 0 for s in self.sizes):
            raise ValidationError("block sizes must be positive")
        k = len(self.sizes)
        if self.S.shape != (k, k):
            raise ValidationError(f"S must be {k}x{k}, got {self.S.shape}")
        if not np.allclose(self.S, self.S.T):
            raise ValidationError("S must be symmetric")
        if (self.S < 0).any():
            raise ValidationError("S must be nonnegative")
        if not (0.0 <= self.rho <= 1.0):
            raise ValidationError(f"rho must be in [0, 1], got {self.rho}")

    @property
    def K(self) -> int:
        return len(self.sizes)

    @property
    def n(self) -> int:
        return sum(self.sizes)

    def block_probabilities(self) -> np.ndarray:
        return self.rho * self.S

    def to_dict(self) -> dict:
        return {"K": self.K, "sizes": list(self.sizes),
                "S": [float(x) for x in self.S.ravel()], "rho": self.rho,
                "recipe": self.theta_recipe.describe(), "seed": self.rng_seed}


@dataclass
class PlantedGraph:
    graph: SparseGraph
    membership: np.ndarray
    theta: np.ndarray
    clip_count: int = 0


def _rng_for(seed) -> np.random.Generator:
    if isinstance(seed, np.random.SeedSequence):
        return np.random.Generator(np.random.Philox(seed))
    return np.random.Generator(np.random.Philox(np.random.SeedSequence(seed)))


def sample_theta(spec: BlockModelSpec, rng: np.random.Generator) -> np.ndarray:
    """Degree propensities; each block sums to its size by construction."""
    recipe = spec.theta_recipe
    if recipe.kind == "constant":
        return np.ones(spec.n, dtype=np.float64)
    if recipe.kind != "uniform":
        raise ValidationError(f"unknown theta recipe {recipe.kind!r}")
    eta = rng.uniform(recipe.lo, recipe.hi, size=spec.n)
    theta = np.empty(spec.n, dtype=np.float64)
    offset = 0
    for size in spec.sizes:
        block = eta[offset:offset + size]
        theta[offset:offset + size] = size * block / block.sum()
        offset += size
    return theta


@lru_cache(maxsize=8)
def _triu_pairs(n: int) -> tuple[np.ndarray, np.ndarray]:
    iu, ju = np.triu_indices(n, k=1)
    return iu.astype(np.int32), ju.astype(np.int32)


def sample_graph(spec: BlockModelSpec, rng: np.random.Generator | None = None) -> PlantedGraph:
    """One independent draw: pair {i, j} is an edge with probability
    clip(theta_i * theta_j * rho * S[g(i), g(j)], 0, 1).

    Probabilities above 1 are clipped and counted on the result; at sane
    parameter choices the counter stays 0.
    """
    if rng is None:
        rng = _rng_for(spec.rng_seed)
    theta = sample_theta(spec, rng)
    membership = np.repeat(np.arange(spec.K), spec.sizes)
    offsets = np.concatenate([[0], np.cumsum(spec.sizes)])
    B = spec.block_probabilities()

    clip_count = 0
    chunks: list[np.ndarray] = []
    for a in range(spec.K):
        th_a = theta[offsets[a]:offsets[a + 1]]
        for b in range(a, spec.K):
            prob = B[a, b]
            if a == b:
                iu, ju = _triu_pairs(len(th_a))
                p = prob * th_a[iu] * th_a[ju]
                clip_count += int((p > 1.0).sum())
                keep = rng.random(p.size) < np.minimum(p, 1.0)
                if keep.any():
                    chunk = np.stack([iu[keep].astype(np.int64) + offsets[a],
                                      ju[keep].astype(np.int64) + offsets[a]], axis=1)
                    chunks.append(chunk)
            else:
                th_b = theta[offsets[b]:offsets[b + 1]]
                p = prob * np.multiply.outer(th_a, th_b)
                clip_count += int((p > 1.0).sum())
                keep = rng.random(p.shape) < np.minimum(p, 1.0)
                ii, jj = np.nonzero(keep)
                if ii.size:
                    chunk = np.stack([ii + offsets[a], jj + offsets[b]], axis=1)
                    chunks.append(chunk)
    if chunks:
        edges = np.concatenate(chunks, axis=0)
    else:
        edges = np.empty((0, 2), dtype=np.int64)
    if clip_count:
        log.warning("clipped %d edge probabilities above 1", clip_count)
    graph = SparseGraph.from_edges(spec.n, edges)
    return PlantedGraph(graph=graph, membership=membership, theta=theta,
                        clip_count=clip_count)


def precision_recall(found: Iterable[int], truth: Iterable[int]) -> tuple[float, float]:
    found_set = set(found)
    truth_set = set(truth)
    if not found_set:
        raise ValidationError("found set is empty")
    if not truth_set:
        raise ValidationError("truth set is empty")
    hits = len(found_set & truth_set)
    return hits / len(found_set), hits / len(truth_set)


@dataclass
class RepetitionResult:
    index: int
    precision: float = float("nan")
    recall: float = float("nan")
    cutoff: int = 0
    exact_at_truth: bool = False
    failed: bool = False


@dataclass
class ExperimentReport:
    """Per-repetition precision/recall plus their summary statistics."""

    alpha: float
    num_seeds: int
    repetitions: int
    runs: list[RepetitionResult]
    spec: dict

    @property
    def failure_count(self) -> int:
        return sum(1 for r in self.runs if r.failed)

    def _successful(self, attr: str) -> np.ndarray:
        return np.array([getattr(r, attr) for r in self.runs if not r.failed],
                        dtype=np.float64)

    @staticmethod
    def _mean_sd(values: np.ndarray) -> tuple[float, float]:
        if values.size == 0:
            return float("nan"), float("nan")
        mean = float(values.mean())
        sd = float(values.std(ddof=1)) if values.size > 1 else 0.0
        return mean, sd

    def summary(self) -> dict:
        mp, sp = self._mean_sd(self._successful("precision"))
        mr, sr = self._mean_sd(self._successful("recall"))
        return {
            "alpha": self.alpha, "num_seeds": self.num_seeds,
            "repetitions": self.repetitions, "failures": self.failure_count,
            "mean_precision": mp, "sd_precision": sp,
            "mean_recall": mr, "sd_recall": sr,
            "spec": self.spec,
        }


def run_experiment(spec: BlockModelSpec, alpha: float, num_seeds: int,
                   repetitions: int, params: SweepParams | None = None,
                   jobs: int = 1, random_seeds: bool = False) -> ExperimentReport:
    """Repeated draw-and-recover runs against block 1.

    Each repetition samples a fresh graph from its own substream, seeds the
    walk with ``num_seeds`` block-1 nodes (the first ones unless
    ``random_seeds``), runs the full local-clustering pipeline and scores the
    result against block 1. A sweep that finds no local minimum marks the
    repetition failed instead of aborting the experiment.
    """
    if repetitions < 1:
        raise ValidationError("repetitions must be >= 1")
    n1 = spec.sizes[0]
    if not (1 <= num_seeds <= n1):
        raise ValidationError(f"need 1 <= num_seeds <= {n1}, got {num_seeds}")
    # default search range sized for a small target block
    params = params or SweepParams(window=5, n_min=2, n_max=55)
    truth = set(range(n1))
    streams = np.random.SeedSequence(spec.rng_seed).spawn(repetitions)

    def one(rep: int) -> RepetitionResult:
        rng = _rng_for(streams[rep])
        planted = sample_graph(spec, rng=rng)
        if random_seeds:
            seeds = rng.choice(n1, size=num_seeds, replace=False)
        else:
            seeds = np.arange(num_seeds)
        pref = uniform_seeds(seeds)
        try:
            result = local_cluster(planted.graph, pref, alpha=alpha, params=params)
        except NoLocalMinimumError:
            return RepetitionResult(index=rep, failed=True)
        prec, rec = precision_recall(result.cluster, truth)
        exact = set(int(v) for v in result.ranking.order[:n1]) == truth
        return RepetitionResult(index=rep, precision=prec, recall=rec,
                                cutoff=result.cutoff, exact_at_truth=exact)

    if jobs > 1:
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            runs = list(pool.map(one, range(repetitions)))
    else:
        runs = [one(rep) for rep in range(repetitions)]
    return ExperimentReport(alpha=alpha, num_seeds=num_seeds,
                            repetitions=repetitions, runs=runs,
                            spec=spec.to_dict())


def load_block_model_spec(path) -> BlockModelSpec:
    """Parse a key-value spec file (K, sizes, S row-major, rho, recipe, seed)."""
    values: dict[str, str] = {}
    path = Path(path)
    with open(path, encoding="utf-8") as fh:
        for ln, raw in enumerate(fh, start=1):
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            if "=" not in line:
                raise ParseError(f"{path}:{ln}: expected 'key = value'")
            key, _, val = line.partition("=")
            values[key.strip().lower()] = val.strip()

    def need(key: str, display: str | None = None) -> str:
        if key not in values:
            raise ParseError(f"{path}: missing field '{display or key}'")
        return values[key]

    try:
        sizes = [int(x) for x in need("sizes").split(",") if x.strip()]
    except ValueError:
        raise ParseError(f"{path}: field 'sizes' must be a comma list of integers") from None
    k = int(values.get("k", len(sizes)))
    if k != len(sizes):
        raise ParseError(f"{path}: field 'K' ({k}) does not match sizes ({len(sizes)})")
    try:
        flat = [float(x) for x in need("s", "S").split(",") if x.strip()]
    except ValueError:
        raise ParseError(f"{path}: field 'S' must be a comma list of numbers") from None
    if len(flat) != k * k:
        raise ParseError(f"{path}: field 'S' needs {k * k} entries, got {len(flat)}")
    try:
        rho = float(values.get("rho", "1.0"))
    except ValueError:
        raise ParseError(f"{path}: field 'rho' must be a number") from None
    recipe_text = values.get("recipe", "constant").lower()
    if recipe_text == "constant":
        recipe = ThetaRecipe.constant()
    elif recipe_text.startswith("uniform"):
        _, _, args = recipe_text.partition(":")
        try:
            lo, hi = (float(x) for x in args.split(",")) if args else (1.0, 10.0)
        except ValueError:
            raise ParseError(f"{path}: field 'recipe' expects uniform:lo,hi") from None
        recipe = ThetaRecipe.uniform(lo, hi)
    else:
        raise ParseError(f"{path}: field 'recipe' must be constant or uniform:lo,hi")
    try:
        seed = int(values.get("seed", "0"))
    except ValueError:
        raise ParseError(f"{path}: field 'seed' must be an integer") from None
    try:
        return BlockModelSpec(sizes=sizes, S=np.array(flat).reshape(k, k),
                              rho=rho, theta_recipe=recipe, rng_seed=seed)
    except ValidationError as exc:
        raise ParseError(f"{path}: {exc}") from None


def write_report_csv(path, report: ExperimentReport,
                     header_lines: Iterable[str] = ()) -> None:
    """One row per repetition: index, precision, recall, cutoff, failed."""
    with open(path, "w", newline="", encoding="utf-8") as fh:
        for line in header_lines:
            fh.write(f"# {line}\n")
        writer = csv.writer(fh)
        writer.writerow(["repetition", "precision", "recall", "cutoff",
                         "exact_at_truth", "failed"])
        for run in report.runs:
            writer.writerow([run.index,
                             "" if run.failed else repr(run.precision),
                             "" if run.failed else repr(run.recall),
                             run.cutoff, int(run.exact_at_truth), int(run.failed)])


def write_report_json(path, report: ExperimentReport, config: dict | None = None) -> None:
    payload = report.summary()
    if config is not None:
        payload["config"] = config
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(payload, fh, indent=2, sort_keys=True)
        fh.write("\n")
