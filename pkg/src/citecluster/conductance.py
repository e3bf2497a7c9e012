"""Conductance sweep over ranking prefixes and local-minimum size selection.

Cut and volume are tracked as exact integers while the ranking prefix grows;
conductance is only materialized as a float when the curve is read, so the
minimum search never suffers accumulation drift.
"""

from __future__ import annotations

import csv
import json
from dataclasses import dataclass, field
from typing import Iterable

import numpy as np

from .errors import NoLocalMinimumError, ValidationError
from .graph import SparseGraph
from .ppr import APPRRanking, PreferenceVector, adjust_and_rank, solve_ppr
from .ppr import DEFAULT_ALPHA, DEFAULT_MAX_ITER, DEFAULT_TOL


@dataclass
class SweepCurve:
    """Running cut/volume (integers) for every ranking prefix."""

    cut: np.ndarray
    vol: np.ndarray

    def __len__(self) -> int:
        return len(self.cut)

    @property
    def phi(self) -> np.ndarray:
        """Conductance cut/vol per prefix, as floats."""
        return self.cut / self.vol


@dataclass
class SweepParams:
    """Knobs for the local-minimum search."""

    window: int = 5
    n_min: int = 2
    n_max: int | None = None  # None: min(500, number of positive-score nodes)


@dataclass
class SweepResult:
    curve: SweepCurve
    cutoff: int
    cluster: set[int]
    params: SweepParams
    ranking: APPRRanking = field(repr=False, default=None)

    def to_dict(self) -> dict:
        return {
            "cutoff": self.cutoff,
            "conductance": float(self.curve.phi[self.cutoff - 1]),
            "params": {"window": self.params.window, "n_min": self.params.n_min,
                       "n_max": self.params.n_max},
            "members": sorted(int(v) for v in self.cluster),
        }


def sweep(graph: SparseGraph, ranking: APPRRanking, n_max: int) -> SweepCurve:
    """Cut and volume for every prefix of the ranking up to ``n_max``.

    Incremental update: adding node v grows the volume by deg(v) and the cut
    by deg(v) minus twice its links into the current prefix, so the whole
    sweep costs one pass over the touched adjacency lists and agrees with a
    from-scratch recount exactly.
    """
    if n_max <= 0:
        raise ValidationError("n_max must be positive")
    if n_max > ranking.positive_count:
        raise ValidationError(
            f"n_max {n_max} exceeds the {ranking.positive_count} nodes the walk reached")
    cut = np.empty(n_max, dtype=np.int64)
    vol = np.empty(n_max, dtype=np.int64)
    member = np.zeros(graph.n, dtype=bool)
    running_cut = 0
    running_vol = 0
    deg = graph.degrees
    for i, v in enumerate(ranking.order[:n_max]):
        links_in = int(member[graph.neighbors(v)].sum())
        running_vol += int(deg[v])
        running_cut += int(deg[v]) - 2 * links_in
        member[v] = True
        cut[i] = running_cut
        vol[i] = running_vol
    return SweepCurve(cut=cut, vol=vol)


def first_local_min(curve: SweepCurve, window: int = 5, n_min: int = 2,
                    n_max: int | None = None) -> int:
    """Earliest prefix size in [n_min, n_max] that is a windowed local minimum.

    A candidate must beat every curve value up to ``window`` steps to its
    left strictly and be no worse than every value up to ``window`` steps to
    its right, which makes the earliest index of a flat valley win. A prefix
    with zero cut qualifies outright (the set is perfectly separated, so no
    later prefix can score lower). Candidates at the very end of the curve
    have no right-hand context and never qualify on their own, hence a curve
    that is still falling at the boundary raises
    :class:`NoLocalMinimumError`.
    """
    L = len(curve)
    if n_max is None:
        n_max = L
    if window < 1:
        raise ValidationError("window must be >= 1")
    if not (1 <= n_min < n_max <= L):
        raise ValidationError(
            f"need 1 <= n_min < n_max <= curve length, got [{n_min}, {n_max}] vs {L}")
    phi = curve.phi
    for n in range(n_min, n_max + 1):
        i = n - 1
        if curve.cut[i] == 0:
            return n
        lo = max(0, i - window)
        if not (phi[lo:i] > phi[i]).all():
            continue
        hi = min(L, i + 1 + window)
        if hi == i + 1:
            continue  # no right context: cannot call it a valley
        if (phi[i] <= phi[i + 1:hi]).all():
            return n
    raise NoLocalMinimumError(
        f"no local minimum in [{n_min}, {n_max}]; widen n_max or extend the sweep")


def local_cluster(graph: SparseGraph, pref: PreferenceVector,
                  alpha: float = DEFAULT_ALPHA, params: SweepParams | None = None,
                  tol: float = DEFAULT_TOL, max_iter: int = DEFAULT_MAX_ITER) -> SweepResult:
    """Full pipeline: solve the walk, rank, sweep, pick the first local minimum.

    The search range is capped so the candidate volume never exceeds half
    the graph volume (past that point the one-sided conductance stops being
    comparable), and the curve is computed ``window`` steps past the range
    so boundary candidates still have right-hand context.
    """
    params = params or SweepParams()
    ppr = solve_ppr(graph, pref, alpha=alpha, tol=tol, max_iter=max_iter)
    ranking = adjust_and_rank(graph, ppr)
    n_pos = ranking.positive_count
    n_max = params.n_max if params.n_max is not None else min(500, n_pos)
    n_max = min(n_max, n_pos)
    if n_max < 1:
        raise NoLocalMinimumError("walk reached no nodes to sweep")

    curve = sweep(graph, ranking, min(n_pos, n_max + params.window))
    half_volume = graph.edge_count  # total volume is twice the edge count
    within_half = int(np.searchsorted(curve.vol, half_volume, side="right"))
    n_max_eff = min(n_max, within_half)
    if n_max_eff <= params.n_min:
        raise NoLocalMinimumError(
            f"search range [{params.n_min}, {n_max_eff}] is empty after the "
            "half-volume guard; the seed set may dominate the graph")
    cutoff = first_local_min(curve, window=params.window,
                             n_min=params.n_min, n_max=n_max_eff)
    cluster = set(int(v) for v in ranking.order[:cutoff])
    used = SweepParams(window=params.window, n_min=params.n_min, n_max=n_max_eff)
    return SweepResult(curve=curve, cutoff=cutoff, cluster=cluster,
                       params=used, ranking=ranking)


def write_curve_csv(path, curve: SweepCurve, header_lines: Iterable[str] = ()) -> None:
    """Export ``n,cut,vol,phi`` rows (the conductance-plot data)."""
    phi = curve.phi
    with open(path, "w", newline="", encoding="utf-8") as fh:
        for line in header_lines:
            fh.write(f"# {line}\n")
        writer = csv.writer(fh)
        writer.writerow(["n", "cut", "vol", "phi"])
        for i in range(len(curve)):
            writer.writerow([i + 1, int(curve.cut[i]), int(curve.vol[i]),
                             repr(float(phi[i]))])


def write_result_json(path, result: SweepResult, config: dict | None = None) -> None:
    payload = result.to_dict()
    if config is not None:
        payload["config"] = config
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(payload, fh, indent=2, sort_keys=True)
        fh.write("\n")
