import logging
import math

import numpy as np
import pytest
import scipy.sparse as sp
from hypothesis import given, settings
from hypothesis import strategies as st

from sentkit.cooc import EdgeMatrix, build_cooc, cosine_edges, ppmi, unigram_counts
from sentkit.corpus import Corpus, Token, Vocabulary
from sentkit.lexicon import (
    DEFAULT_C_SUP,
    DEFAULT_C_UNSUP,
    SeedSet,
    SentimentLexicon,
    build_delta_tfidf_lexicon,
    build_unsupervised_lexicon,
    combine_lexicons,
    combine_scores,
    delta_idf,
    delta_tfidf,
    four_scores,
    grid_search_coefficients,
    propagate,
    three_feats,
    unsupervised_sc,
    wt_score,
)
from sentkit.windows import WindowSpec

import oracles
from conftest import make_corpus, make_doc


class TestSeedSet:
    def test_rejects_word_in_both_roles(self):
        with pytest.raises(ValueError):
            SeedSet((("good", "bad"), ("bad", "worse")))

    def test_tsv_round_trip(self, tmp_path):
        seeds = SeedSet((("iyi", "kötü"), ("güzel", "çirkin")))
        path = tmp_path / "seeds.tsv"
        seeds.to_tsv(path)
        assert SeedSet.from_tsv(path) == seeds

    def test_shipped_seed_files_parse(self):
        from importlib import resources

        for name in (
            "seeds_turkish_domain_independent.tsv",
            "seeds_turkish_domain_specific.tsv",
            "seeds_english.tsv",
        ):
            with resources.as_file(resources.files("sentkit.data") / name) as p:
                seeds = SeedSet.from_tsv(p)
            assert len(seeds.pairs) == 10


class TestUnsupervisedSc:
    def test_balanced_ratio_gives_zero(self):
        # near(w,p)/count(p) exactly equals near(w,n)/count(n)
        corpus = make_corpus([(["w", "p"], "unlabeled"), (["w", "n"], "unlabeled")])
        cooc = build_cooc(corpus, WindowSpec(kind="sliding", k=1))
        counts = unigram_counts(corpus)
        seeds = SeedSet((("p", "n"),))
        assert unsupervised_sc("w", cooc, counts, seeds) == pytest.approx(0.0)

    def test_derived_count_case(self):
        # "fine" co-occurs with the positive seed 8 times and the negative
        # seed 0 times; both seeds appear 10 times overall
        docs = [(["fine", "p"], "unlabeled")] * 8 + [(["p", "x"], "unlabeled")] * 2
        docs += [(["n", "x"], "unlabeled")] * 10
        corpus = make_corpus(docs)
        cooc = build_cooc(corpus, WindowSpec(kind="sliding", k=1))
        counts = unigram_counts(corpus)
        assert counts["p"] == 10 and counts["n"] == 10
        assert cooc.count("fine", "p") == 8 and cooc.count("fine", "n") == 0
        expected = math.log2((8.001 / 10.001) * (10.001 / 0.001))
        got = unsupervised_sc("fine", cooc, counts, SeedSet((("p", "n"),)))
        assert got == pytest.approx(expected, abs=1e-12)

    def test_seed_self_query_large_positive(self):
        docs = [(["p", "p", "x"], "unlabeled")] * 4 + [(["n", "y"], "unlabeled")] * 4
        corpus = make_corpus(docs)
        cooc = build_cooc(corpus, WindowSpec(kind="sliding", k=2))
        counts = unigram_counts(corpus)
        score = unsupervised_sc("p", cooc, counts, SeedSet((("p", "n"),)))
        assert score > 3.0

    def test_absent_word_warns_and_returns_zero(self, caplog):
        corpus = make_corpus([(["a", "b"], "unlabeled")])
        cooc = build_cooc(corpus, WindowSpec(kind="sliding", k=1))
        with caplog.at_level(logging.WARNING, logger="sentkit.lexicon"):
            score = unsupervised_sc(
                "missing", cooc, unigram_counts(corpus), SeedSet((("a", "b"),))
            )
        assert score == 0.0
        assert any("missing" in rec.message for rec in caplog.records)


def dense_edges(matrix):
    vocab = Vocabulary([f"w{i}" for i in range(matrix.shape[0])])
    return EdgeMatrix(vocab, sp.csr_matrix(matrix))


class TestPropagate:
    def test_constant_g_one_pins_to_seeds(self):
        edges = dense_edges(np.array([[1.0, 0.5], [0.5, 1.0]]))
        seeds = SeedSet((("w0", "w1"),))
        lex = propagate(edges, seeds, g0=1.0, decay=1.0, max_iter=10, tol=1e-12)
        assert lex.get("w0") > 0 > lex.get("w1")

    def test_line_graph_ordering_and_oracle(self):
        e = np.array([[1.0, 0.6, 0.0], [0.6, 1.0, 0.6], [0.0, 0.6, 1.0]])
        edges = dense_edges(e)
        seeds = SeedSet((("w0", "w2"),))
        lex = propagate(edges, seeds, g0=0.5, max_iter=10, tol=0.0)
        assert lex.get("w0") > lex.get("w1") > lex.get("w2")
        assert abs(lex.get("w1")) < 1e-6
        expected = oracles.dense_propagation(
            e, [0], [2], 1, 1, g0=0.5, decay=0.9, g_floor=0.05, max_iter=10, tol=0.0
        )
        for i in range(3):
            assert lex.get(f"w{i}") == pytest.approx(expected[i], abs=1e-9)

    def test_huge_tol_truncates_series_after_one_step(self):
        e = np.array([[1.0, 0.3], [0.3, 1.0]])
        edges = dense_edges(e)
        seeds = SeedSet((("w0", "w1"),))
        lex = propagate(edges, seeds, g0=0.5, max_iter=50, tol=1e9)
        n = 2
        p0 = np.full(n, 1 / n)
        g = 0.5
        p1_pos = (1 - g) * (e @ p0) + g * np.array([1.0, 0.0])
        p1_neg = (1 - g) * (e @ p0) + g * np.array([0.0, 1.0])
        expected = np.log((p1_pos + 1e-9) / (p1_neg + 1e-9))
        for i in range(n):
            assert lex.get(f"w{i}") == pytest.approx(expected[i], abs=1e-12)

    @given(st.integers(2, 8), st.integers(0, 10_000))
    @settings(max_examples=40, deadline=None)
    def test_swapping_seed_roles_negates_scores(self, n, seed):
        rng = np.random.default_rng(seed)
        e = rng.random((n, n))
        e = (e + e.T) / 2
        np.fill_diagonal(e, 1.0)
        edges = dense_edges(e)
        pos, neg = "w0", f"w{n - 1}"
        forward = propagate(edges, SeedSet(((pos, neg),)), g0=0.5, max_iter=15, tol=0.0)
        backward = propagate(edges, SeedSet(((neg, pos),)), g0=0.5, max_iter=15, tol=0.0)
        for i in range(n):
            w = f"w{i}"
            assert forward.get(w) == pytest.approx(-backward.get(w), abs=1e-12)

    def test_factorial_series_tail_vanishes(self):
        # iterate vectors stay bounded by 1, so the tail beyond k = 20 is
        # below 1/21! < 1e-19 per entry
        tail = sum(1.0 / math.factorial(k) for k in range(21, 60))
        assert tail < 1e-15

    def test_invalid_g0_rejected(self):
        edges = dense_edges(np.eye(2))
        with pytest.raises(ValueError):
            propagate(edges, SeedSet((("w0", "w1"),)), g0=0.0)

    def test_end_to_end_from_corpus(self, tiny_labeled_corpus):
        cooc = build_cooc(tiny_labeled_corpus, WindowSpec(kind="sliding", k=2))
        edges = cosine_edges(ppmi(cooc))
        lex = propagate(edges, SeedSet((("good", "bad"),)), max_iter=30)
        assert lex.provenance == "semisupervised"
        assert lex.get("good") > lex.get("bad")


class TestDeltaIdf:
    def test_balanced_word_is_zero(self):
        corpus = make_corpus([(["w"], "positive"), (["w"], "negative")])
        assert delta_idf("w", corpus) == pytest.approx(0.0)

    def test_hand_computed_value(self):
        corpus = make_corpus([
            (["w", "a"], "positive"), (["b"], "positive"),
            (["c"], "negative"), (["d"], "negative"),
        ])
        assert delta_idf("w", corpus) == pytest.approx(math.log(0.501 / 0.001), abs=1e-9)

    def test_tf_normalization_fixed_point(self):
        corpus = make_corpus([
            (["w", "w", "a"], "positive"), (["b"], "negative"),
        ])
        doc = corpus.documents[0]
        assert delta_tfidf("w", doc, corpus) == pytest.approx(delta_idf("w", corpus))

    def test_empty_document_rejected(self):
        corpus = make_corpus([(["w"], "positive"), (["x"], "negative")])
        empty = make_doc("e", ["placeholder"])
        object.__setattr__(empty, "tokens", ())
        with pytest.raises(ValueError, match="empty"):
            delta_tfidf("w", empty, corpus)

    @given(st.integers(1, 5), st.integers(1, 5), st.integers(0, 5), st.integers(0, 5))
    @settings(max_examples=60, deadline=None)
    def test_antisymmetric_under_corpus_swap(self, n_pos, n_neg, with_pos, with_neg):
        with_pos, with_neg = min(with_pos, n_pos), min(with_neg, n_neg)
        docs = []
        for i in range(n_pos):
            docs.append((["w"] if i < with_pos else ["x"], "positive"))
        for i in range(n_neg):
            docs.append((["w"] if i < with_neg else ["y"], "negative"))
        corpus = make_corpus(docs)
        swapped = Corpus(tuple(
            type(d)(id=d.id, tokens=d.tokens,
                    label={"positive": "negative", "negative": "positive"}[d.label])
            for d in corpus
        ))
        assert delta_idf("w", corpus) == pytest.approx(-delta_idf("w", swapped))
        assert wt_score("w", corpus) == pytest.approx(-wt_score("w", swapped))


class TestWtScore:
    def test_balanced_word_is_zero(self):
        corpus = make_corpus([(["w"], "positive"), (["w"], "negative")])
        assert wt_score("w", corpus) == pytest.approx(0.0)

    def test_hand_computed_value(self):
        docs = [(["t"], "positive")] * 5 + [(["x"], "positive")] * 5
        docs += [(["y"], "negative")] * 10
        corpus = make_corpus(docs)
        assert wt_score("t", corpus) == pytest.approx(math.log(0.51 / 0.01), abs=1e-9)

    def test_negative_only_word_scores_negative(self):
        corpus = make_corpus([(["a"], "positive"), (["w"], "negative")])
        assert wt_score("w", corpus) < 0


class TestCombine:
    def test_opposite_signs_keep_damped_supervised(self):
        assert combine_scores(2.0, -1.0, 0.3, 0.7) == pytest.approx(1.4)

    def test_agreeing_signs_weighted_sum(self):
        assert combine_scores(2.0, 1.0, 0.3, 0.7) == pytest.approx(1.7)

    def test_zero_counts_as_agreement(self):
        assert combine_scores(0.0, -1.0, 0.3, 0.7) == pytest.approx(-0.3)

    def test_coefficients_validated(self):
        with pytest.raises(ValueError):
            combine_scores(1.0, 1.0, 0.5, 0.6)

    @given(st.floats(-5, 5), st.floats(-5, 5))
    @settings(max_examples=100, deadline=None)
    def test_cu_zero_reduces_to_supervised(self, sup, unsup):
        assert combine_scores(sup, unsup, 0.0, 1.0) == pytest.approx(sup)

    def test_default_coefficients_are_the_reported_optimum(self):
        assert (DEFAULT_C_UNSUP, DEFAULT_C_SUP) == (0.3, 0.7)


class TestGridSearch:
    def _split(self, docs):
        corpus = make_corpus(docs)
        train = Corpus(corpus.documents[::2])
        dev = Corpus(corpus.documents[1::2])
        return train, dev

    def test_planted_supervised_optimum(self):
        # supervised scores separate perfectly; unsupervised scores are
        # anti-correlated noise, so the largest c_s wins
        sup = SentimentLexicon({"good": 2.0, "bad": -2.0}, "supervised-delta-tfidf")
        unsup = SentimentLexicon({"good": -3.0, "bad": 3.0}, "unsupervised")
        train, dev = self._split(
            [(["good"], "positive"), (["good"], "positive"),
             (["bad"], "negative"), (["bad"], "negative")] * 3
        )
        c_u, c_s = grid_search_coefficients(train, dev, sup=sup, unsup=unsup)
        assert c_s == pytest.approx(0.9)

    def test_constant_accuracy_breaks_tie_upward(self):
        sup = SentimentLexicon({"good": 1.0}, "supervised-delta-tfidf")
        unsup = SentimentLexicon({"good": 1.0}, "unsupervised")
        train, dev = self._split(
            [(["good"], "positive"), (["good"], "positive")] * 3
        )
        c_u, c_s = grid_search_coefficients(train, dev, sup=sup, unsup=unsup)
        assert (c_u, c_s) == (pytest.approx(0.1), pytest.approx(0.9))

    def test_requires_disjoint_dev(self, tiny_labeled_corpus):
        with pytest.raises(ValueError, match="disjoint"):
            grid_search_coefficients(
                tiny_labeled_corpus, tiny_labeled_corpus,
                sup=SentimentLexicon({}, "supervised-delta-tfidf"),
                unsup=SentimentLexicon({}, "unsupervised"),
            )


class TestFourScores:
    def test_zero_scored_neighbors(self):
        corpus = make_corpus([(["w", "a", "b"], "unlabeled")])
        base = SentimentLexicon({"w": 2.0}, "supervised-wt")
        spec = WindowSpec(kind="sliding", k=2)
        assert four_scores("w", corpus, spec, base) == (2.0, 0.0, 0.0, 0.0)

    def test_matches_neighbor_scan_oracle(self):
        corpus = make_corpus([
            (["w", "a", "b", "w", "c"], "unlabeled"),
            (["a", "c"], "unlabeled"),
        ])
        base = SentimentLexicon(
            {"w": 1.0, "a": -2.0, "b": 0.5, "c": 3.0}, "supervised-wt"
        )
        spec = WindowSpec(kind="sliding", k=1)

        def pair_fn(keys):
            for i in range(len(keys)):
                for j in range(len(keys)):
                    if i != j and abs(i - j) <= 1:
                        yield keys[i], keys[j]

        expected = oracles.neighbor_scan_four_scores(
            "w", [d.keys() for d in corpus], pair_fn, base.scores
        )
        assert four_scores("w", corpus, spec, base) == pytest.approx(expected)

    def test_isolated_word_repeats_self(self):
        corpus = make_corpus([(["w"], "unlabeled")])
        base = SentimentLexicon({"w": 1.5}, "supervised-wt")
        spec = WindowSpec(kind="sliding", k=2)
        assert four_scores("w", corpus, spec, base) == (1.5, 1.5, 1.5, 1.5)


class TestThreeFeats:
    def test_min_mean_max(self):
        lex = SentimentLexicon({"a": -1.0, "b": 0.0, "c": 2.0}, "combined")
        doc = make_doc("d", ["a", "b", "c"])
        assert three_feats(doc, lex) == pytest.approx((-1.0, 1.0 / 3.0, 2.0))

    def test_unknown_tokens_contribute_zero(self):
        lex = SentimentLexicon({}, "combined")
        doc = make_doc("d", ["x", "y"])
        assert three_feats(doc, lex) == (0.0, 0.0, 0.0)

    def test_negated_token_flips_sign(self):
        lex = SentimentLexicon({"w": 1.5}, "combined")
        doc = Corpus((
            make_doc("d", ["w"]),
        )).documents[0]
        negated = type(doc)(
            id="d", tokens=(Token("w", "w", negated=True),), label="unlabeled"
        )
        assert three_feats(negated, lex) == pytest.approx((-1.5, -1.5, -1.5))

    def test_empty_document(self):
        lex = SentimentLexicon({"w": 1.0}, "combined")
        doc = make_doc("d", ["w"])
        object.__setattr__(doc, "tokens", ())
        assert three_feats(doc, lex) == (0.0, 0.0, 0.0)

    def test_intensity_scales_score(self):
        lex = SentimentLexicon({"w": 2.0}, "combined")
        doc = type(make_doc("d", ["w"]))(
            id="d", tokens=(Token("w", "w", intensity=1.2),), label="unlabeled"
        )
        assert three_feats(doc, lex)[2] == pytest.approx(2.4)


class TestScalingInvariance:
    @given(st.floats(0.1, 50.0))
    @settings(max_examples=30, deadline=None)
    def test_positive_scaling_preserves_sign_decisions(self, factor):
        from sentkit.classify import log_score_predict

        lex = SentimentLexicon({"good": 1.2, "bad": -0.7, "meh": 0.1}, "combined")
        docs = [
            make_doc("a", ["good", "meh"]),
            make_doc("b", ["bad", "meh"]),
            make_doc("c", ["good", "bad"]),
        ]
        scaled = lex.scaled(factor)
        for doc in docs:
            assert log_score_predict(doc, lex) == log_score_predict(doc, scaled)
            a = three_feats(doc, lex)
            b = three_feats(doc, scaled)
            assert np.argsort(a).tolist() == np.argsort(b).tolist()


class TestLexiconIO:
    def test_tsv_round_trip(self, tmp_path):
        lex = SentimentLexicon({"iyi": 1.25, "kötü": -2.5}, "combined")
        path = tmp_path / "lex.tsv"
        lex.to_tsv(path)
        again = SentimentLexicon.from_tsv(path)
        assert again.scores == lex.scores
        assert again.provenance == "combined"

    def test_rejects_nonfinite(self):
        with pytest.raises(ValueError):
            SentimentLexicon({"w": float("nan")}, "combined")

    def test_rejects_unknown_provenance(self):
        with pytest.raises(ValueError):
            SentimentLexicon({}, "alchemy")

    def test_delta_tfidf_lexicon_is_doc_averaged(self):
        corpus = make_corpus([
            (["w", "w", "a"], "positive"),
            (["w", "b"], "positive"),
            (["c"], "negative"),
        ])
        lex = build_delta_tfidf_lexicon(corpus)
        idf = delta_idf("w", corpus)
        expected = (1.0 * idf + 1.0 * idf) / 2  # w is the peak word in both docs
        assert lex.get("w") == pytest.approx(expected)
