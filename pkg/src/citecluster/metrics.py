"""Descriptive bibliometrics over a citation corpus.

Covers internal/external field classification, fractional category
breakdowns, Gini concentration, Lorenz curves, normalized citation trends
and the internal-vs-external rank comparison.
"""

from __future__ import annotations

import enum
import logging
from collections import Counter, defaultdict
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Mapping, Sequence

import numpy as np

from .corpus import CitationCorpus, Kind, PaperRecord
from .errors import ParseError, ValidationError

log = logging.getLogger(__name__)

STATS_CATEGORY = "statistics & probability"
MATH_KEYWORD = "math"


class Side(enum.Enum):
    INTERNAL = "internal"
    EXTERNAL = "external"


class Tag(enum.Enum):
    STATS = "STATS"
    MATH = "MATH"
    ART = "ART"
    BIO = "BIO"
    PHY = "PHY"
    SOC = "SOC"
    TECH = "TECH"
    BE = "BE"
    CS = "CS"
    NA = "NA"


_INTERNAL_TAGS = frozenset({Tag.STATS, Tag.MATH})


@dataclass(frozen=True)
class ClassLabel:
    side: Side
    tag: Tag

    @classmethod
    def from_tag(cls, tag: Tag) -> "ClassLabel":
        side = Side.INTERNAL if tag in _INTERNAL_TAGS else Side.EXTERNAL
        return cls(side=side, tag=tag)


# Broad research areas; extend with finer entries (e.g. the business/economics
# and computer science carve-outs) via a custom map when needed.
DEFAULT_AREA_MAP: tuple[tuple[str, Tag], ...] = (
    ("arts & humanities", Tag.ART),
    ("life sciences & biomedicine", Tag.BIO),
    ("physical sciences", Tag.PHY),
    ("social sciences", Tag.SOC),
    ("technology", Tag.TECH),
)

AREA_MAP_WITH_SUBFIELDS: tuple[tuple[str, Tag], ...] = (
    ("business & economics", Tag.BE),
    ("computer science", Tag.CS),
) + DEFAULT_AREA_MAP


def load_area_map(path) -> tuple[tuple[str, Tag], ...]:
    """Two-column TSV ``pattern<TAB>tag``; earlier rows take precedence."""
    entries: list[tuple[str, Tag]] = []
    path = Path(path)
    with open(path, encoding="utf-8") as fh:
        for ln, raw in enumerate(fh, start=1):
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            parts = line.split("\t")
            if len(parts) != 2:
                raise ParseError(f"{path}:{ln}: expected 'pattern<TAB>tag'")
            pattern, tag_text = parts[0].strip(), parts[1].strip().upper()
            try:
                tag = Tag(tag_text)
            except ValueError:
                raise ParseError(f"{path}:{ln}: unknown tag {tag_text!r}") from None
            entries.append((pattern.lower(), tag))
    if not entries:
        raise ParseError(f"{path}: area map is empty")
    return tuple(entries)


def classify(record: PaperRecord, area_map=None) -> list[ClassLabel]:
    """Field labels for one paper.

    Precedence: any category equal to "Statistics & Probability" makes the
    paper STATS; otherwise any category containing "math" makes it MATH
    (both internal, single label). External papers get one label per listed
    research area via the area map; areas the map does not know degrade to
    NA with a warning, as does an empty area list.
    """
    area_map = DEFAULT_AREA_MAP if area_map is None else area_map
    cats = [c.strip().lower() for c in record.categories]
    if any(c == STATS_CATEGORY for c in cats):
        return [ClassLabel.from_tag(Tag.STATS)]
    if any(MATH_KEYWORD in c for c in cats):
        return [ClassLabel.from_tag(Tag.MATH)]
    tags: list[Tag] = []
    for area in record.areas:
        area_l = area.strip().lower()
        if not area_l:
            continue
        for pattern, tag in area_map:
            if pattern in area_l:
                if tag not in tags:
                    tags.append(tag)
                break
        else:
            log.warning("paper %d: research area %r not in area map", record.id, area)
            if Tag.NA not in tags:
                tags.append(Tag.NA)
    if not tags:
        tags = [Tag.NA]
    return [ClassLabel.from_tag(t) for t in tags]


def classify_corpus(corpus: CitationCorpus, area_map=None) -> dict[int, list[ClassLabel]]:
    """Labels for every paper in the corpus, keyed by paper id."""
    return {p.id: classify(p, area_map) for p in corpus.papers}


def is_internal(labels: Sequence[ClassLabel]) -> bool:
    return any(lab.side is Side.INTERNAL for lab in labels)


def fractional_breakdown(corpus: CitationCorpus,
                         labels: Mapping[int, Sequence[ClassLabel]],
                         carve_out: bool = False,
                         paper_ids: Iterable[int] | None = None
                         ) -> dict[int, dict[Tag, float]]:
    """Year-by-year tag weights over citing papers.

    A paper with k labels contributes 1/k to each of its tags, so every
    year's bucket total equals the number of citing papers from that year.
    With ``carve_out``, papers tagged BE are not counted in SOC and papers
    tagged CS are not counted in TECH (the remaining tags re-share the unit
    weight). ``paper_ids`` restricts the tally to a subset of citing papers.
    """
    wanted = None if paper_ids is None else set(int(p) for p in paper_ids)
    out: dict[int, dict[Tag, float]] = defaultdict(lambda: defaultdict(float))
    for rec in corpus.citing_papers():
        if rec.year is None:
            continue
        if wanted is not None and rec.id not in wanted:
            continue
        tags = [lab.tag for lab in labels[rec.id]]
        if carve_out:
            if Tag.BE in tags and Tag.SOC in tags:
                tags = [t for t in tags if t is not Tag.SOC]
            if Tag.CS in tags and Tag.TECH in tags:
                tags = [t for t in tags if t is not Tag.TECH]
        weight = 1.0 / len(tags)
        for tag in tags:
            out[rec.year][tag] += weight
    return {year: dict(buckets) for year, buckets in out.items()}


def gini_concentration(proportions: Mapping) -> float:
    """100 times the sum of squared shares, with the two internal tags
    (STATS and MATH) merged into a single category before squaring."""
    merged: dict = defaultdict(float)
    total = 0.0
    for key, share in proportions.items():
        total += share
        tag = key if isinstance(key, Tag) else None
        if tag in _INTERNAL_TAGS or (isinstance(key, str) and key.upper() in ("STATS", "MATH")):
            merged["__internal__"] += share
        else:
            merged[key] += share
    if abs(total - 1.0) > 1e-9:
        raise ValidationError(f"proportions must sum to 1, got {total!r}")
    return 100.0 * float(sum(s * s for s in merged.values()))


@dataclass
class LorenzCurve:
    """Cumulative share of citations held by the bottom fraction of papers."""

    p: np.ndarray
    share: np.ndarray

    def __iter__(self):
        return iter(zip(self.p, self.share))


def lorenz(counts, grid: np.ndarray | None = None) -> LorenzCurve:
    """Lorenz curve of a citation-count vector.

    Counts are sorted non-decreasing; the share at p is the summed counts of
    the bottom floor(p * N) papers over the total. An all-zero vector yields
    the identity line by convention. Default grid: every percent plus 0.
    """
    arr = np.asarray(counts)
    if arr.size == 0:
        raise ValidationError("count vector is empty")
    if (arr < 0).any():
        raise ValidationError("citation counts must be nonnegative")
    if grid is None:
        grid = np.linspace(0.01, 1.0, 100)
    grid = np.asarray(grid, dtype=np.float64)
    if (grid < 0).any() or (grid > 1).any():
        raise ValidationError("grid values must lie in [0, 1]")
    p = np.concatenate([[0.0], grid])
    n = arr.size
    total = int(arr.sum())
    if total == 0:
        return LorenzCurve(p=p, share=p.copy())
    csum = np.concatenate([[0], np.cumsum(np.sort(arr))])
    # nudge before flooring so p values like 0.29 * 100 land on the integer
    idx = np.floor(p * n + 1e-9).astype(np.int64)
    return LorenzCurve(p=p, share=csum[idx] / total)


class Normalization(enum.Enum):
    RAW = "raw"
    PER_CUMULATIVE_PUBLICATION = "per_cumulative_publication"


@dataclass
class TrendSeries:
    """Per-year values for one venue, contiguous over the reported range."""

    venue: str
    values: dict[int, float]
    normalization: Normalization


def normalized_trend(corpus: CitationCorpus, journal: str,
                     year_range: tuple[int, int],
                     normalize: bool = True) -> TrendSeries:
    """Annual citations to a journal's source papers, optionally divided by
    the cumulative number of that journal's publications up to each year.

    Years before the journal's first publication are omitted (the
    denominator would be zero); afterwards the series is contiguous, with 0
    for years without citations.
    """
    pubs = Counter()
    found = False
    for rec in corpus.source_papers():
        if rec.venue == journal:
            found = True
            if rec.year is not None:
                pubs[rec.year] += 1
    if not found:
        raise ValidationError(f"journal {journal!r} has no source papers in corpus")

    is_journal_source = np.zeros(corpus.n_source, dtype=bool)
    for rec in corpus.source_papers():
        if rec.venue == journal:
            is_journal_source[rec.id] = True
    cites = Counter()
    for citing, source in corpus.edges:
        if not is_journal_source[source]:
            continue
        year = corpus.paper(int(citing)).year
        if year is not None:
            cites[year] += 1

    start, end = year_range
    if start > end:
        raise ValidationError(f"bad year range {year_range}")
    values: dict[int, float] = {}
    cumulative = sum(c for y, c in pubs.items() if y < start)
    for year in range(start, end + 1):
        cumulative += pubs.get(year, 0)
        if cumulative == 0:
            continue  # journal not founded yet
        raw = float(cites.get(year, 0))
        values[year] = raw / cumulative if normalize else raw
    norm = (Normalization.PER_CUMULATIVE_PUBLICATION if normalize
            else Normalization.RAW)
    return TrendSeries(venue=journal, values=values, normalization=norm)


@dataclass
class RankEntry:
    source_id: int
    internal_count: int
    external_count: int
    internal_rank: int
    external_rank: int
    total: int


def _competition_ranks(counts: np.ndarray) -> np.ndarray:
    """Rank 1 = highest count; ties share the smallest rank of the group."""
    ascending = np.sort(counts)
    greater = counts.size - np.searchsorted(ascending, counts, side="right")
    return greater + 1


def rank_compare(corpus: CitationCorpus,
                 labels: Mapping[int, Sequence[ClassLabel]]) -> list[RankEntry]:
    """Rank source papers by internal and by external citation counts.

    A citing paper counts toward the internal tally when its labels contain
    an internal tag, otherwise toward the external tally. Ranks use
    competition ranking (ties share the minimum rank).
    """
    internal = np.zeros(corpus.n_source, dtype=np.int64)
    external = np.zeros(corpus.n_source, dtype=np.int64)
    for citing, source in corpus.edges:
        if is_internal(labels[int(citing)]):
            internal[source] += 1
        else:
            external[source] += 1
    int_rank = _competition_ranks(internal)
    ext_rank = _competition_ranks(external)
    return [RankEntry(source_id=i,
                      internal_count=int(internal[i]),
                      external_count=int(external[i]),
                      internal_rank=int(int_rank[i]),
                      external_rank=int(ext_rank[i]),
                      total=int(internal[i] + external[i]))
            for i in range(corpus.n_source)]
