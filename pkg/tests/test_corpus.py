import numpy as np
import pytest

from citecluster import (CitationCorpus, Kind, PaperRecord, ParseError,
                         ValidationError, citation_counts, keyword_counts,
                         load_corpus, select_topic_papers, source_network)


def write(path, text):
    path.write_text(text, encoding="utf-8")
    return path


@pytest.fixture
def edge_file(tmp_path):
    def make(text, name="edges.csv"):
        return write(tmp_path / name, text)
    return make


def test_load_dedupes_duplicate_edges(edge_file):
    corpus = load_corpus(edge_file("10,2\n10,2\n"))
    assert len(corpus.edges) == 1
    assert corpus.duplicates_dropped == 1


def test_load_rejects_self_citation(edge_file):
    with pytest.raises(ValidationError):
        load_corpus(edge_file("3,3\n"))


def test_load_kind_inference_with_declared_sources(edge_file):
    corpus = load_corpus(edge_file("9,0\n9,1\n"), n_source=2)
    assert len(corpus.edges) == 2
    assert corpus.paper(9).kind is Kind.CITING
    assert corpus.paper(0).kind is Kind.SOURCE
    assert corpus.n_source == 2


def test_load_infers_source_prefix_from_targets(edge_file):
    corpus = load_corpus(edge_file("7,0\n8,2\n"))
    assert corpus.n_source == 3
    assert [corpus.paper(i).kind for i in range(3)] == [Kind.SOURCE] * 3
    assert corpus.paper(5).kind is Kind.CITING


def test_load_rejects_target_outside_declared_range(edge_file):
    with pytest.raises(ValidationError):
        load_corpus(edge_file("9,5\n"), n_source=2)


def test_load_parse_error_carries_line_number(edge_file):
    with pytest.raises(ParseError, match=":2"):
        load_corpus(edge_file("1,0\nnot-a-row\n"))
    with pytest.raises(ParseError):
        load_corpus(edge_file("1,0,9\n"))


def test_load_skips_comments_and_blanks(edge_file):
    corpus = load_corpus(edge_file("# header\n\n5,0\n"))
    assert len(corpus.edges) == 1


def metadata_text():
    rows = [
        "0\tsource\t2001\tJ1\tAlpha Study\tOn testing\tmcmc;fdr\tStatistics & Probability\t",
        "1\tsource\t2003\tJ2\tBeta Study\tOn models\tMCMC\tStatistics & Probability\t",
        "9\tciting\t2010\tOther\tTracking Influenza\tWe track flu\t\tPsychiatry\tLife Sciences & Biomedicine",
    ]
    return "\n".join(rows) + "\n"


def test_metadata_parsing(edge_file, tmp_path):
    meta = write(tmp_path / "meta.tsv", metadata_text())
    corpus = load_corpus(edge_file("9,0\n9,1\n"), meta)
    assert corpus.n_source == 2
    rec = corpus.paper(0)
    assert rec.year == 2001 and rec.venue == "J1"
    assert rec.keywords == ["mcmc", "fdr"]
    assert corpus.paper(9).title == "Tracking Influenza"


def test_metadata_source_prefix_must_be_contiguous(edge_file, tmp_path):
    meta = write(tmp_path / "meta.tsv",
                 "0\tsource\t2001\t\t\t\t\t\t\n2\tsource\t2001\t\t\t\t\t\t\n")
    with pytest.raises(ValidationError):
        load_corpus(edge_file("5,0\n"), meta)


def test_metadata_bad_kind_and_year(edge_file, tmp_path):
    with pytest.raises(ParseError):
        load_corpus(edge_file("1,0\n"),
                    write(tmp_path / "m1.tsv", "0\tbook\t2001\t\t\t\t\t\t\n"))
    with pytest.raises(ParseError):
        load_corpus(edge_file("1,0\n"),
                    write(tmp_path / "m2.tsv", "0\tsource\tnope\t\t\t\t\t\t\n"))


def test_year_bounds_validated():
    with pytest.raises(ValidationError):
        CitationCorpus([PaperRecord(id=0, kind=Kind.SOURCE, year=1800)],
                       np.empty((0, 2), dtype=np.int64), 1)


def test_source_network_symmetrization_idempotent(edge_file):
    corpus = load_corpus(edge_file("0,1\n1,0\n"), n_source=2)
    g = source_network(corpus)
    assert g.edge_count == 1
    g.validate()


def test_source_network_excludes_bipartite_edges(edge_file):
    corpus = load_corpus(edge_file("9,0\n"), n_source=2)
    g = source_network(corpus)
    assert g.n == 2
    assert g.edge_count == 0


def test_source_network_path_degrees(edge_file):
    corpus = load_corpus(edge_file("0,1\n2,1\n"), n_source=3)
    g = source_network(corpus)
    assert g.degrees.tolist() == [1, 2, 1]


def test_source_network_random_corpora_symmetric_loop_free():
    rng = np.random.default_rng(11)
    for _ in range(15):
        n_src = int(rng.integers(3, 12))
        n_cit = int(rng.integers(0, 12))
        edges = set()
        for _ in range(40):
            citing = int(rng.integers(0, n_src + n_cit))
            source = int(rng.integers(0, n_src))
            if citing != source:
                edges.add((citing, source))
        papers = [PaperRecord(id=i, kind=Kind.SOURCE if i < n_src else Kind.CITING)
                  for i in range(n_src + n_cit)]
        corpus = CitationCorpus(papers, np.array(sorted(edges)), n_src)
        g = source_network(corpus)
        g.validate()
        assert g.n == n_src


def test_citation_counts_examples(edge_file):
    corpus = load_corpus(edge_file("9,0\n9,1\n10,0\n"), n_source=3)
    assert citation_counts(corpus, set()).tolist() == [0, 0, 0]
    assert citation_counts(corpus, {9}).tolist() == [1, 1, 0]
    assert citation_counts(corpus, {9, 10}).tolist() == [2, 1, 0]


def test_citation_counts_conserves_edges(edge_file):
    corpus = load_corpus(edge_file("9,0\n9,1\n10,0\n11,2\n"), n_source=3)
    topic = {9, 11}
    counts = citation_counts(corpus, topic)
    in_topic = sum(1 for c, _ in corpus.edges if int(c) in topic)
    assert counts.sum() == in_topic


def test_citation_counts_rejects_bad_ids(edge_file):
    corpus = load_corpus(edge_file("9,0\n"), n_source=2)
    with pytest.raises(ValidationError):
        citation_counts(corpus, {99})
    with pytest.raises(ValidationError):
        citation_counts(corpus, {0})  # source paper, not a citing paper


def topic_corpus():
    papers = [
        PaperRecord(id=0, kind=Kind.SOURCE, title="Influenza statistics",
                    keywords=["mcmc"]),
        PaperRecord(id=1, kind=Kind.SOURCE, keywords=["FDR", "fdr"]),
        PaperRecord(id=2, kind=Kind.CITING, title="Tracking Influenza",
                    abstract="flu waves", areas=["Life Sciences & Biomedicine"]),
        PaperRecord(id=3, kind=Kind.CITING, title="Labor supply",
                    abstract="labor markets", areas=["Social Sciences"]),
        PaperRecord(id=4, kind=Kind.CITING, title="Labor biology",
                    abstract="labor in cells", areas=["Life Sciences & Biomedicine"]),
    ]
    return CitationCorpus(papers, np.array([[2, 0], [3, 1], [4, 1]]), 2)


def test_select_substring_matches_inside_words():
    corpus = topic_corpus()
    assert select_topic_papers(corpus, ["flu"], "title") == {2}


def test_select_area_filter():
    corpus = topic_corpus()
    hits = select_topic_papers(corpus, ["labor"], "abstract", area_filter="SOC")
    assert hits == {3}


def test_select_never_returns_source_papers():
    corpus = topic_corpus()
    hits = select_topic_papers(corpus, ["influenza"], "title")
    assert 0 not in hits and hits == {2}


def test_select_exact_word_mode():
    corpus = topic_corpus()
    assert select_topic_papers(corpus, ["flu"], "title", exact_word=True) == set()
    assert select_topic_papers(corpus, ["influenza"], "title", exact_word=True) == {2}


def test_select_monotone_in_keywords():
    corpus = topic_corpus()
    rng = np.random.default_rng(3)
    pool = ["flu", "labor", "cells", "markets", "waves", "zzz"]
    for _ in range(20):
        k = int(rng.integers(1, len(pool)))
        kws = list(rng.choice(pool, size=k, replace=False))
        base = select_topic_papers(corpus, kws, "abstract")
        more = select_topic_papers(corpus, kws + ["tracking"], "abstract")
        assert base <= more


def test_select_requires_keywords():
    with pytest.raises(ValidationError):
        select_topic_papers(topic_corpus(), [], "title")


def test_keyword_counts_casefolds():
    corpus = topic_corpus()
    assert keyword_counts(corpus, [0, 1]) == {"mcmc": 1, "fdr": 2}
    assert keyword_counts(corpus, []) == {}
    with pytest.raises(ValidationError):
        keyword_counts(corpus, [2])  # citing paper
