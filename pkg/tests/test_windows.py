import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from sentkit.corpus import (
    DependencyTree,
    Document,
    Token,
    TreeNode,
    load_conllu_sentences,
)
from sentkit.windows import (
    Subclause,
    WindowSpec,
    extract_subclauses,
    iter_window_pairs,
    render_subclause,
)

from conftest import make_doc


def chain_tree(n, pos="NOUN"):
    """Token i headed by i-1; token 0 is the root."""
    nodes = [TreeNode(0, None, "root", pos)]
    nodes += [TreeNode(i, i - 1, "dep", pos) for i in range(1, n)]
    return DependencyTree(tuple(nodes))


class TestWindowSpec:
    def test_sliding_needs_positive_k(self):
        with pytest.raises(ValueError):
            WindowSpec(kind="sliding", k=0)

    def test_subclause_needs_cut_relations(self):
        with pytest.raises(ValueError):
            WindowSpec(kind="subclause", cut_relations=frozenset())

    def test_unknown_kind(self):
        with pytest.raises(ValueError):
            WindowSpec(kind="bag")


class TestGoldenSubclauses:
    def test_three_way_split(self, golden_conllu):
        sentences = {t.sent_id: (t, toks) for t, toks in load_conllu_sentences(golden_conllu)}
        tree, tokens = sentences["vibe"]
        rendered = [render_subclause(tokens, s) for s in extract_subclauses(tree, tokens)]
        assert rendered == [
            "The vibe is very relaxed and cozy!",
            "service was great!",
            "the food was excellent!",
        ]

    def test_split_at_secondary_verb(self, golden_conllu):
        sentences = {t.sent_id: (t, toks) for t, toks in load_conllu_sentences(golden_conllu)}
        tree, tokens = sentences["spice"]
        subs = extract_subclauses(tree, tokens)
        assert len(subs) == 2
        # the cut happens at "has" (index 9): it starts the second subclause
        assert subs[1].token_indices[2] == 9
        rendered = [render_subclause(tokens, s) for s in subs]
        assert rendered == [
            "There are slow and repetitive parts.",
            "but it has just enough spice to keep it interesting.",
        ]

    def test_single_clause_covers_sentence(self):
        tokens = tuple(Token(w, w) for w in ["I", "love", "this", "."])
        tree = DependencyTree((
            TreeNode(0, 1, "nsubj", "PRON"),
            TreeNode(1, None, "root", "VERB"),
            TreeNode(2, 1, "dobj", "PRON"),
            TreeNode(3, 1, "punct", "PUNCT"),
        ))
        subs = extract_subclauses(tree, tokens)
        assert len(subs) == 1
        assert subs[0].token_indices == (0, 1, 2)
        assert render_subclause(tokens, subs[0]) == "I love this."

    def test_length_mismatch_rejected(self):
        tokens = tuple(Token(w, w) for w in ["a", "b"])
        with pytest.raises(ValueError, match="nodes"):
            extract_subclauses(chain_tree(3), tokens)

    def test_non_verb_conj_not_cut(self):
        # "slow and repetitive": the adjective conj must not start a clause
        tokens = tuple(Token(w, w) for w in ["slow", "and", "repetitive"])
        tree = DependencyTree((
            TreeNode(0, None, "root", "ADJ"),
            TreeNode(1, 2, "cc", "CCONJ"),
            TreeNode(2, 0, "conj", "ADJ"),
        ))
        assert len(extract_subclauses(tree, tokens)) == 1


class TestSubclauseType:
    def test_indices_strictly_increasing(self):
        with pytest.raises(ValueError):
            Subclause((2, 1))

    def test_non_empty(self):
        with pytest.raises(ValueError):
            Subclause(())


class TestSlidingPairs:
    def test_symmetric_k1(self):
        doc = make_doc("d", ["a", "b", "c"])
        pairs = set(iter_window_pairs(doc, WindowSpec(kind="sliding", k=1)))
        assert pairs == {("a", "b"), ("b", "a"), ("b", "c"), ("c", "b")}

    def test_right_k1(self):
        doc = make_doc("d", ["a", "b", "c"])
        spec = WindowSpec(kind="sliding", k=1, orientation="right")
        assert set(iter_window_pairs(doc, spec)) == {("a", "b"), ("b", "c")}

    def test_pair_multiplicity(self):
        doc = make_doc("d", ["a", "a"])
        pairs = list(iter_window_pairs(doc, WindowSpec(kind="sliding", k=1)))
        assert pairs == [("a", "a"), ("a", "a")]


class TestSubclausePairs:
    def _doc_with_cut(self):
        # [a b][c]: c attaches to the root verb by conj and is itself a verb
        tokens = tuple(Token(w, w) for w in ["a", "b", "c"])
        tree = DependencyTree((
            TreeNode(0, 1, "nsubj", "NOUN"),
            TreeNode(1, None, "root", "VERB"),
            TreeNode(2, 1, "conj", "VERB"),
        ))
        return Document(id="d", tokens=tokens, tree=tree)

    def test_adjacency_across_cut_contributes_nothing(self):
        doc = self._doc_with_cut()
        pairs = set(iter_window_pairs(doc, WindowSpec(kind="subclause")))
        assert pairs == {("a", "b"), ("b", "a")}

    def test_requires_tree(self):
        doc = make_doc("d", ["a", "b"])
        with pytest.raises(ValueError, match="tree"):
            list(iter_window_pairs(doc, WindowSpec(kind="subclause")))


@st.composite
def random_parsed_doc(draw):
    n = draw(st.integers(2, 9))
    words = [draw(st.sampled_from("abcdefg")) for _ in range(n)]
    pos = [draw(st.sampled_from(["VERB", "NOUN", "ADJ"])) for _ in range(n)]
    rel = [draw(st.sampled_from(["conj", "ccomp", "dep", "amod"])) for _ in range(n)]
    root = draw(st.integers(0, n - 1))
    nodes = []
    for i in range(n):
        if i == root:
            nodes.append(TreeNode(i, None, "root", pos[i]))
        else:
            # head earlier in a random permutation guarantees acyclicity
            head = draw(st.integers(0, n - 1).filter(lambda h, i=i: h != i))
            nodes.append(TreeNode(i, head, rel[i], pos[i]))
    try:
        tree = DependencyTree(tuple(nodes))
    except Exception:
        return None
    tokens = tuple(Token(w, w) for w in words)
    return Document(id="d", tokens=tokens, tree=tree)


class TestSubclauseProperties:
    @given(random_parsed_doc())
    @settings(max_examples=200, deadline=None)
    def test_partition_disjoint_and_ordered(self, doc):
        if doc is None:
            return
        subs = extract_subclauses(doc.tree, doc.tokens)
        seen = set()
        for sub in subs:
            assert not seen & set(sub.token_indices)
            seen |= set(sub.token_indices)
        # order-preserving: sorted by first index
        firsts = [s.token_indices[0] for s in subs]
        assert firsts == sorted(firsts)

    @given(random_parsed_doc())
    @settings(max_examples=100, deadline=None)
    def test_pair_count_bounded_by_full_sliding(self, doc):
        if doc is None:
            return
        sub_pairs = list(iter_window_pairs(doc, WindowSpec(kind="subclause")))
        full = WindowSpec(kind="sliding", k=len(doc.tokens))
        sliding_pairs = list(iter_window_pairs(doc, full))
        assert len(sub_pairs) <= len(sliding_pairs)

    @given(random_parsed_doc())
    @settings(max_examples=50, deadline=None)
    def test_deterministic(self, doc):
        if doc is None:
            return
        a = extract_subclauses(doc.tree, doc.tokens)
        b = extract_subclauses(doc.tree, doc.tokens)
        assert a == b
