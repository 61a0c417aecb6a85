import json

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from sentkit.corpus import (
    Corpus,
    CorpusFormatError,
    Document,
    Token,
    attach_trees,
    load_conllu,
    load_documents,
    save_documents,
    split_folds,
    vocabulary,
)

from conftest import make_corpus, make_doc, write_jsonl


class TestTokenInvariants:
    def test_rejects_empty_surface(self):
        with pytest.raises(ValueError):
            Token(surface="", root="x")

    def test_rejects_empty_root(self):
        with pytest.raises(ValueError):
            Token(surface="x", root="")

    def test_rejects_nonpositive_intensity(self):
        with pytest.raises(ValueError):
            Token(surface="x", root="x", intensity=0.0)

    def test_negated_key_has_single_trailing_underscore(self):
        tok = Token(surface="beğenmedim", root="beğen", negated=True)
        assert tok.key() == "beğen_"
        assert not tok.key().endswith("__")

    def test_unmarked_key_ignores_negation(self):
        tok = Token(surface="x", root="x", negated=True)
        assert tok.key(mark_negation=False) == "x"


class TestLoadDocuments:
    def test_minimal_record(self, tmp_path):
        path = tmp_path / "docs.jsonl"
        write_jsonl(path, [{"id": "d1", "label": "positive",
                            "tokens": [{"surface": "good"}]}])
        corpus = load_documents(path)
        assert corpus.n_positive == 1
        assert corpus.n_negative == 0
        tok = corpus.documents[0].tokens[0]
        assert (tok.root, tok.morphemes, tok.pos) == ("good", (), "UNK")

    def test_rejects_neutral_label(self, tmp_path):
        path = tmp_path / "docs.jsonl"
        write_jsonl(path, [{"id": "d1", "label": "neutral",
                            "tokens": [{"surface": "meh"}]}])
        with pytest.raises(CorpusFormatError, match="binary"):
            load_documents(path)

    def test_rejects_duplicate_id(self, tmp_path):
        path = tmp_path / "docs.jsonl"
        write_jsonl(path, [
            {"id": "d1", "label": "positive", "tokens": [{"surface": "a"}]},
            {"id": "d1", "label": "negative", "tokens": [{"surface": "b"}]},
        ])
        with pytest.raises(CorpusFormatError, match="line 2"):
            load_documents(path)

    def test_malformed_record_names_line(self, tmp_path):
        path = tmp_path / "docs.jsonl"
        path.write_text('{"id": "d1", "label": "positive", "tokens": [{"surface": "a"}]}\n'
                        "{broken\n", encoding="utf-8")
        with pytest.raises(CorpusFormatError, match="line 2"):
            load_documents(path)

    def test_round_trip(self, tmp_path):
        corpus = Corpus((
            Document(id="a", label="positive", tokens=(
                Token("İyi", "iyi", ("mA",), "ADJ", True, 1.2),)),
            Document(id="b", label="unlabeled", tokens=(Token("x", "x"),),
                     tree_ref="s1"),
        ))
        path = tmp_path / "round.jsonl"
        save_documents(corpus, path)
        again = load_documents(path)
        assert again == corpus


class TestLoadConllu:
    def test_well_formed_root(self, tmp_path):
        path = tmp_path / "t.conllu"
        lines = []
        heads = [2, 0, 2, 2, 2]
        for i, h in enumerate(heads, start=1):
            lines.append(f"{i}\tw{i}\tw{i}\tNOUN\t_\t_\t{h}\tdep\t_\t_")
        path.write_text("\n".join(lines) + "\n", encoding="utf-8")
        trees = load_conllu(path)
        assert len(trees) == 1
        assert trees[0].root_index == 1

    def test_head_out_of_range(self, tmp_path):
        path = tmp_path / "t.conllu"
        path.write_text("1\ta\ta\tNOUN\t_\t_\t9\tdep\t_\t_\n", encoding="utf-8")
        with pytest.raises(CorpusFormatError, match="sentence 0"):
            load_conllu(path)

    def test_multiple_roots_rejected(self, tmp_path):
        path = tmp_path / "t.conllu"
        path.write_text(
            "1\ta\ta\tNOUN\t_\t_\t0\troot\t_\t_\n"
            "2\tb\tb\tNOUN\t_\t_\t0\troot\t_\t_\n",
            encoding="utf-8",
        )
        with pytest.raises(CorpusFormatError, match="root"):
            load_conllu(path)

    def test_cycle_rejected(self, tmp_path):
        path = tmp_path / "t.conllu"
        path.write_text(
            "1\ta\ta\tNOUN\t_\t_\t2\tdep\t_\t_\n"
            "2\tb\tb\tNOUN\t_\t_\t1\tdep\t_\t_\n"
            "3\tc\tc\tNOUN\t_\t_\t0\troot\t_\t_\n",
            encoding="utf-8",
        )
        with pytest.raises(CorpusFormatError, match="cycle|root"):
            load_conllu(path)

    def test_conj_links_the_two_verb_heads(self, golden_conllu):
        trees = {t.sent_id: t for t in load_conllu(golden_conllu)}
        spice = trees["spice"]
        are = spice.nodes[1]
        has = spice.nodes[9]
        assert are.head_index is None and are.pos == "VERB"
        assert has.relation == "conj" and has.head_index == 1 and has.pos == "VERB"

    def test_attach_trees(self, tmp_path, golden_conllu):
        path = tmp_path / "docs.jsonl"
        write_jsonl(path, [{
            "id": "d1", "label": "positive", "tree": "spice",
            "tokens": [{"surface": w} for w in
                       "There are slow and repetitive parts , but it has just "
                       "enough spice to keep it interesting .".split()],
        }])
        corpus = attach_trees(load_documents(path), load_conllu(golden_conllu))
        assert corpus.documents[0].tree is not None
        with pytest.raises(CorpusFormatError, match="unknown tree"):
            attach_trees(
                Corpus((make_doc("x", ["a"]).__class__(
                    id="x", tokens=(Token("a", "a"),), tree_ref="missing"),)),
                load_conllu(golden_conllu),
            )


class TestSplitFolds:
    def test_exhaustive_split(self):
        corpus = make_corpus([([f"w{i}"], "positive") for i in range(5)]
                             + [([f"v{i}"], "negative") for i in range(5)])
        folds = split_folds(corpus, 10, seed=1)
        assert all(len(test) == 1 for _, test in folds)

    def test_fold_sizes_within_one(self):
        corpus = make_corpus([([f"w{i}"], "positive") for i in range(13)]
                             + [([f"v{i}"], "negative") for i in range(11)])
        folds = split_folds(corpus, 10, seed=3)
        sizes = [len(test) for _, test in folds]
        assert max(sizes) - min(sizes) <= 1
        assert sum(sizes) == 24

    def test_deterministic(self):
        corpus = make_corpus([([f"w{i}"], "positive") for i in range(20)]
                             + [([f"v{i}"], "negative") for i in range(20)])
        assert split_folds(corpus, 10, seed=7) == split_folds(corpus, 10, seed=7)

    def test_k_larger_than_corpus_rejected(self):
        corpus = make_corpus([(["a"], "positive"), (["b"], "negative")])
        with pytest.raises(ValueError):
            split_folds(corpus, 3, seed=0)

    @given(n_pos=st.integers(2, 30), n_neg=st.integers(2, 30),
           k=st.integers(2, 6), seed=st.integers(0, 1000))
    @settings(max_examples=60, deadline=None)
    def test_folds_partition_labeled_documents(self, n_pos, n_neg, k, seed):
        corpus = make_corpus([([f"w{i}"], "positive") for i in range(n_pos)]
                             + [([f"v{i}"], "negative") for i in range(n_neg)])
        folds = split_folds(corpus, k, seed)
        tests = [set(test) for _, test in folds]
        union = set().union(*tests)
        assert union == {d.id for d in corpus.labeled()}
        for i in range(len(tests)):
            for j in range(i + 1, len(tests)):
                assert not tests[i] & tests[j]
            # train is the complement of test
            assert set(folds[i][0]) == union - tests[i]


class TestVocabulary:
    def test_threshold_boundary(self):
        corpus = make_corpus([(["a", "a", "b"], "unlabeled")])
        assert vocabulary(corpus, 2).words == ("a",)

    def test_no_filtering(self):
        corpus = make_corpus([(["a", "a", "b"], "unlabeled")])
        assert vocabulary(corpus, 0).words == ("a", "b")

    def test_lexicographic_tie_break(self):
        corpus = make_corpus([(["x"] * 5 + ["y"] * 5, "unlabeled")])
        assert vocabulary(corpus, 3).words == ("x", "y")

    @given(st.lists(st.sampled_from("abcde"), min_size=1, max_size=40),
           st.integers(0, 5))
    @settings(max_examples=50, deadline=None)
    def test_size_nonincreasing_in_min_freq(self, words, min_freq):
        corpus = make_corpus([(words, "unlabeled")])
        assert len(vocabulary(corpus, min_freq + 1)) <= len(vocabulary(corpus, min_freq))
