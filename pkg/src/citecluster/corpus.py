"""Bibliographic records, citation edges and the derived source-paper network.

File formats (UTF-8, ``#``-prefixed comment lines ignored):

* edge CSV: headerless ``citing_id,source_id`` rows;
* metadata TSV, fixed column order: id, kind, year, venue, title, abstract,
  keywords (``;``-separated), categories (``;``-separated), areas
  (``;``-separated). Empty cells are allowed everywhere but id and kind.
"""

from __future__ import annotations

import csv
import enum
import logging
import re
from collections import Counter
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from .errors import ParseError, ValidationError
from .graph import SparseGraph

log = logging.getLogger(__name__)

YEAR_MIN, YEAR_MAX = 1900, 2100


class Kind(enum.Enum):
    SOURCE = "source"
    CITING = "citing"


@dataclass
class PaperRecord:
    """One bibliographic record; text fields may be empty."""

    id: int
    title: str = ""
    abstract: str = ""
    keywords: list[str] = field(default_factory=list)
    year: int | None = None
    venue: str = ""
    categories: list[str] = field(default_factory=list)
    areas: list[str] = field(default_factory=list)
    kind: Kind = Kind.CITING


class CitationCorpus:
    """Immutable collection of paper records plus directed citing->source edges.

    Source papers occupy the contiguous id prefix ``[0, n_source)``; every
    edge target lies in that prefix. Edges are deduplicated and loop-free.
    """

    def __init__(self, papers: Sequence[PaperRecord], edges: np.ndarray,
                 n_source: int, duplicates_dropped: int = 0):
        self.papers = list(papers)
        self.edges = np.asarray(edges, dtype=np.int64).reshape(-1, 2)
        self.n_source = int(n_source)
        self.duplicates_dropped = int(duplicates_dropped)
        self._by_id = {p.id: p for p in self.papers}
        self._validate()

    def _validate(self) -> None:
        if len(self._by_id) != len(self.papers):
            raise ValidationError("duplicate paper id in corpus")
        for p in self.papers:
            if p.year is not None and not (YEAR_MIN <= p.year <= YEAR_MAX):
                raise ValidationError(f"paper {p.id}: year {p.year} outside "
                                      f"[{YEAR_MIN}, {YEAR_MAX}]")
        source_ids = {p.id for p in self.papers if p.kind is Kind.SOURCE}
        if source_ids != set(range(self.n_source)):
            raise ValidationError("source ids must form the contiguous prefix "
                                  f"[0, {self.n_source})")
        if self.edges.size:
            if (self.edges[:, 0] == self.edges[:, 1]).any():
                raise ValidationError("self-citation edge")
            if self.edges[:, 1].max(initial=-1) >= self.n_source or self.edges.min() < 0:
                raise ValidationError("edge target outside the source prefix")
            for cid in np.unique(self.edges[:, 0]):
                if int(cid) not in self._by_id:
                    raise ValidationError(f"edge references unknown paper {cid}")

    @property
    def n_papers(self) -> int:
        return len(self.papers)

    def paper(self, paper_id: int) -> PaperRecord:
        return self._by_id[paper_id]

    def __contains__(self, paper_id: int) -> bool:
        return paper_id in self._by_id

    def citing_papers(self) -> Iterable[PaperRecord]:
        return (p for p in self.papers if p.kind is Kind.CITING)

    def source_papers(self) -> Iterable[PaperRecord]:
        return (p for p in self.papers if p.kind is Kind.SOURCE)


def _data_rows(path: Path):
    """Yield (line_number, stripped_line) skipping blanks and # comments."""
    with open(path, encoding="utf-8") as fh:
        for ln, raw in enumerate(fh, start=1):
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            yield ln, line


def _split_multi(cell: str) -> list[str]:
    return [part.strip() for part in cell.split(";") if part.strip()]


def _parse_metadata(path: Path) -> dict[int, PaperRecord]:
    records: dict[int, PaperRecord] = {}
    for ln, line in _data_rows(path):
        cols = next(csv.reader([line], delimiter="\t"))
        if len(cols) < 2:
            raise ParseError(f"{path}:{ln}: expected at least id and kind columns")
        cols += [""] * (9 - len(cols))
        try:
            pid = int(cols[0])
        except ValueError:
            raise ParseError(f"{path}:{ln}: bad paper id {cols[0]!r}") from None
        kind_text = cols[1].strip().lower()
        if kind_text not in ("source", "citing"):
            raise ParseError(f"{path}:{ln}: kind must be 'source' or 'citing', "
                             f"got {cols[1]!r}")
        year: int | None = None
        if cols[2].strip():
            try:
                year = int(cols[2])
            except ValueError:
                raise ParseError(f"{path}:{ln}: bad year {cols[2]!r}") from None
        if pid in records:
            raise ParseError(f"{path}:{ln}: duplicate metadata for id {pid}")
        records[pid] = PaperRecord(
            id=pid,
            kind=Kind(kind_text),
            year=year,
            venue=cols[3].strip(),
            title=cols[4].strip(),
            abstract=cols[5].strip(),
            keywords=_split_multi(cols[6]),
            categories=_split_multi(cols[7]),
            areas=_split_multi(cols[8]),
        )
    return records


def load_corpus(edge_file, metadata_file=None, n_source: int | None = None) -> CitationCorpus:
    """Load a corpus from an edge CSV and an optional metadata TSV.

    Without metadata, the source prefix is either ``n_source`` (if given) or
    inferred as ``max(cited id) + 1``; ids past the prefix become citing
    papers with empty text fields. With metadata, the explicit kind column
    wins and ``n_source`` is ignored.

    Duplicate edges collapse silently (counted on the corpus); a self-citation
    or an edge target outside the declared source range is an error.
    """
    edge_path = Path(edge_file)
    seen: set[tuple[int, int]] = set()
    edges: list[tuple[int, int]] = []
    dup = 0
    for ln, line in _data_rows(edge_path):
        parts = [p.strip() for p in line.split(",")]
        if len(parts) != 2:
            raise ParseError(f"{edge_path}:{ln}: expected 'citing_id,source_id'")
        try:
            citing, source = int(parts[0]), int(parts[1])
        except ValueError:
            raise ParseError(f"{edge_path}:{ln}: non-integer id") from None
        if citing < 0 or source < 0:
            raise ParseError(f"{edge_path}:{ln}: negative id")
        if citing == source:
            raise ValidationError(f"{edge_path}:{ln}: self-citation ({citing},{source})")
        if (citing, source) in seen:
            dup += 1
            continue
        seen.add((citing, source))
        edges.append((citing, source))
    if dup:
        log.warning("%s: dropped %d duplicate edges", edge_path, dup)

    edge_arr = np.array(edges, dtype=np.int64).reshape(-1, 2)
    records = _parse_metadata(Path(metadata_file)) if metadata_file else {}

    if records:
        declared_sources = sorted(p.id for p in records.values() if p.kind is Kind.SOURCE)
        n_src = len(declared_sources)
        if declared_sources != list(range(n_src)):
            raise ValidationError(f"{metadata_file}: source ids must form a "
                                  f"contiguous prefix starting at 0")
    elif n_source is not None:
        n_src = int(n_source)
    else:
        n_src = int(edge_arr[:, 1].max()) + 1 if edge_arr.size else 0

    if edge_arr.size and edge_arr[:, 1].max() >= n_src:
        bad = int(edge_arr[edge_arr[:, 1] >= n_src][0, 1])
        raise ValidationError(f"cited id {bad} outside the declared source "
                              f"range [0, {n_src})")

    max_id = -1
    if edge_arr.size:
        max_id = int(edge_arr.max())
    if records:
        max_id = max(max_id, max(records))
    max_id = max(max_id, n_src - 1)

    papers = []
    for pid in range(max_id + 1):
        if pid in records:
            papers.append(records[pid])
        else:
            kind = Kind.SOURCE if pid < n_src else Kind.CITING
            papers.append(PaperRecord(id=pid, kind=kind))
    return CitationCorpus(papers, edge_arr, n_src, duplicates_dropped=dup)


def source_network(corpus: CitationCorpus) -> SparseGraph:
    """Undirected network over source papers: an edge whenever either paper
    cites the other. Sources without any source-side citation stay in the
    graph with degree 0."""
    e = corpus.edges
    if e.size:
        between = e[e[:, 0] < corpus.n_source]
    else:
        between = e
    return SparseGraph.from_edges(corpus.n_source, between)


def citation_counts(corpus: CitationCorpus, topic: Iterable[int]) -> np.ndarray:
    """Per-source counts of citations received from the given citing papers."""
    topic_ids = set(int(t) for t in topic)
    for t in topic_ids:
        if t not in corpus:
            raise ValidationError(f"topic id {t} not present in corpus")
        if corpus.paper(t).kind is not Kind.CITING:
            raise ValidationError(f"topic id {t} is not a citing paper")
    counts = np.zeros(corpus.n_source, dtype=np.int64)
    if topic_ids and corpus.edges.size:
        mask = np.isin(corpus.edges[:, 0], np.fromiter(topic_ids, dtype=np.int64))
        np.add.at(counts, corpus.edges[mask, 1], 1)
    return counts


def select_topic_papers(corpus: CitationCorpus, keywords: Sequence[str],
                        field_name: str = "title", area_filter=None,
                        exact_word: bool = False, area_map=None) -> set[int]:
    """Citing papers whose title or abstract matches any keyword.

    Matching is case-insensitive substring by default (so "flu" also finds
    "influenza"); ``exact_word=True`` switches to word-boundary matches.
    ``area_filter`` keeps only papers carrying that broad-area tag.
    """
    if not keywords:
        raise ValidationError("keywords must be nonempty")
    field_name = field_name.lower()
    if field_name not in ("title", "abstract"):
        raise ValidationError(f"field must be 'title' or 'abstract', got {field_name!r}")
    kws = [k.lower() for k in keywords if k]

    if area_filter is not None:
        from .metrics import Tag, classify
        want = Tag(area_filter) if not isinstance(area_filter, Tag) else area_filter

    if exact_word:
        patterns = [re.compile(r"\b" + re.escape(k) + r"\b") for k in kws]

    selected: set[int] = set()
    for rec in corpus.citing_papers():
        text = (rec.title if field_name == "title" else rec.abstract).lower()
        if exact_word:
            hit = any(p.search(text) for p in patterns)
        else:
            hit = any(k in text for k in kws)
        if not hit:
            continue
        if area_filter is not None:
            labels = classify(rec, area_map)
            if not any(lab.tag is want for lab in labels):
                continue
        selected.add(rec.id)
    return selected


def keyword_counts(corpus: CitationCorpus, nodes: Iterable[int]) -> dict[str, int]:
    """Case-folded keyword frequency table over the given source papers."""
    counter: Counter[str] = Counter()
    for nid in nodes:
        nid = int(nid)
        if nid not in corpus or corpus.paper(nid).kind is not Kind.SOURCE:
            raise ValidationError(f"node {nid} is not a source paper")
        for kw in corpus.paper(nid).keywords:
            counter[kw.casefold()] += 1
    return dict(counter)
