"""Data model and ingestion: labeled documents, morphological analyses,
dependency parses, fold splitting, and vocabulary construction.

Input is pre-tokenized (and, for agglutinative languages, pre-analyzed);
morphological analyses and parses arrive as data, they are never computed
here.  All types are immutable after construction and safe to share across
workers.
"""

from __future__ import annotations

import json
from collections import Counter
from dataclasses import dataclass, field, replace

import numpy as np

LABELS = ("positive", "negative", "unlabeled")


class CorpusFormatError(ValueError):
    """Raised for malformed or inconsistent input files."""


@dataclass(frozen=True)
class Token:
    """A single token: surface/root/morpheme decomposition plus the
    negation flag and intensity multiplier attached by preprocessing."""

    surface: str
    root: str
    morphemes: tuple[str, ...] = ()
    pos: str = "UNK"
    negated: bool = False
    intensity: float = 1.0

    def __post_init__(self):
        if not self.surface:
            raise ValueError("token surface must be non-empty")
        if not self.root:
            raise ValueError("token root must be non-empty")
        if not self.intensity > 0:
            raise ValueError("token intensity must be > 0")
        if not isinstance(self.morphemes, tuple):
            object.__setattr__(self, "morphemes", tuple(self.morphemes))

    def key(self, mark_negation: bool = True) -> str:
        """Feature key emitted downstream: the root, with a single trailing
        underscore when the token is negated.

        Lexicon-scoring consumers look words up by the unmarked key and
        apply the sign flip numerically (see ``lexicon.effective_score``);
        bag-of-words features use the marked key, so a negated word is a
        distinct feature.
        """
        if mark_negation and self.negated:
            return self.root + "_"
        return self.root


ROOT = None  # head marker for the root node of a dependency tree


@dataclass(frozen=True)
class TreeNode:
    token_index: int
    head_index: int | None  # ROOT (None) for the root node
    relation: str
    pos: str


@dataclass(frozen=True)
class DependencyTree:
    """One node per token, in token order.  Exactly one ROOT, no cycles."""

    nodes: tuple[TreeNode, ...]
    sent_id: str | None = None

    def __post_init__(self):
        if not isinstance(self.nodes, tuple):
            object.__setattr__(self, "nodes", tuple(self.nodes))
        roots = [n for n in self.nodes if n.head_index is ROOT]
        if len(roots) != 1:
            raise CorpusFormatError(
                f"dependency tree must have exactly one root, found {len(roots)}"
            )
        n = len(self.nodes)
        for node in self.nodes:
            if node.head_index is not ROOT and not 0 <= node.head_index < n:
                raise CorpusFormatError(
                    f"head index {node.head_index} out of range for sentence of {n} tokens"
                )
        # cycle check: every node must reach the root
        for start in range(n):
            seen = set()
            i = start
            while i is not ROOT:
                if i in seen:
                    raise CorpusFormatError("dependency tree contains a cycle")
                seen.add(i)
                i = self.nodes[i].head_index

    def __len__(self):
        return len(self.nodes)

    @property
    def root_index(self) -> int:
        return next(n.token_index for n in self.nodes if n.head_index is ROOT)

    def children(self) -> dict[int, list[int]]:
        kids: dict[int, list[int]] = {i: [] for i in range(len(self.nodes))}
        for n in self.nodes:
            if n.head_index is not ROOT:
                kids[n.head_index].append(n.token_index)
        return kids


@dataclass(frozen=True)
class Document:
    """A labeled token sequence with an optional dependency parse."""

    id: str
    tokens: tuple[Token, ...]
    label: str = "unlabeled"
    tree: DependencyTree | None = None
    tree_ref: str | None = None

    def __post_init__(self):
        if not isinstance(self.tokens, tuple):
            object.__setattr__(self, "tokens", tuple(self.tokens))
        if self.label not in LABELS:
            raise CorpusFormatError(
                f"label must be one of {LABELS}, got {self.label!r} (binary task only)"
            )
        if self.tree is not None and len(self.tree) != len(self.tokens):
            raise CorpusFormatError(
                f"document {self.id!r}: tree has {len(self.tree)} nodes "
                f"for {len(self.tokens)} tokens"
            )

    def keys(self, mark_negation: bool = True) -> list[str]:
        return [t.key(mark_negation) for t in self.tokens]


@dataclass(frozen=True)
class Corpus:
    documents: tuple[Document, ...]
    n_positive: int = field(init=False)
    n_negative: int = field(init=False)

    def __post_init__(self):
        if not isinstance(self.documents, tuple):
            object.__setattr__(self, "documents", tuple(self.documents))
        seen = set()
        for d in self.documents:
            if d.id in seen:
                raise CorpusFormatError(f"duplicate document id {d.id!r}")
            seen.add(d.id)
        object.__setattr__(
            self, "n_positive", sum(d.label == "positive" for d in self.documents)
        )
        object.__setattr__(
            self, "n_negative", sum(d.label == "negative" for d in self.documents)
        )

    def __len__(self):
        return len(self.documents)

    def __iter__(self):
        return iter(self.documents)

    def labeled(self) -> list[Document]:
        return [d for d in self.documents if d.label != "unlabeled"]

    def by_id(self, doc_id: str) -> Document:
        for d in self.documents:
            if d.id == doc_id:
                return d
        raise KeyError(doc_id)

    def subset(self, ids) -> "Corpus":
        wanted = set(ids)
        return Corpus(tuple(d for d in self.documents if d.id in wanted))


def _token_from_record(obj, lineno):
    if "surface" not in obj or not obj["surface"]:
        raise CorpusFormatError(f"line {lineno}: token missing surface string")
    surface = obj["surface"]
    return Token(
        surface=surface,
        root=obj.get("root") or surface,
        morphemes=tuple(obj.get("morphemes") or ()),
        pos=obj.get("pos", "UNK"),
        negated=bool(obj.get("negated", False)),
        intensity=float(obj.get("intensity", 1.0)),
    )


def load_documents(path, trees: dict[str, DependencyTree] | None = None) -> Corpus:
    """Load a corpus from a JSONL file, one document object per line.

    Each record carries ``id``, ``label`` and ``tokens``; tokens need at
    minimum a surface string (root defaults to the surface, morphemes to an
    empty list, pos to "UNK").  A record may name its parse through a
    ``tree`` field holding a CoNLL-U sentence id, resolved against *trees*
    when given.
    """
    docs = []
    seen_ids = set()
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.strip()
            if not line:
                continue
            try:
                obj = json.loads(line)
            except json.JSONDecodeError as exc:
                raise CorpusFormatError(f"line {lineno}: invalid JSON ({exc})") from exc
            if "id" not in obj:
                raise CorpusFormatError(f"line {lineno}: record missing id")
            if obj["id"] in seen_ids:
                raise CorpusFormatError(
                    f"line {lineno}: duplicate document id {obj['id']!r}"
                )
            seen_ids.add(obj["id"])
            if "tokens" not in obj or not isinstance(obj["tokens"], list):
                raise CorpusFormatError(f"line {lineno}: record missing tokens list")
            tokens = tuple(_token_from_record(t, lineno) for t in obj["tokens"])
            tree_ref = obj.get("tree")
            tree = None
            if tree_ref is not None and trees is not None:
                if tree_ref not in trees:
                    raise CorpusFormatError(
                        f"line {lineno}: unknown tree reference {tree_ref!r}"
                    )
                tree = trees[tree_ref]
            try:
                docs.append(
                    Document(
                        id=obj["id"],
                        tokens=tokens,
                        label=obj.get("label", "unlabeled"),
                        tree=tree,
                        tree_ref=tree_ref,
                    )
                )
            except CorpusFormatError as exc:
                raise CorpusFormatError(f"line {lineno}: {exc}") from exc
    return Corpus(tuple(docs))


def save_documents(corpus: Corpus, path) -> None:
    """Serialize a corpus back to JSONL; inverse of load_documents."""
    with open(path, "w", encoding="utf-8") as fh:
        for d in corpus:
            rec = {
                "id": d.id,
                "label": d.label,
                "tokens": [
                    {
                        "surface": t.surface,
                        "root": t.root,
                        "morphemes": list(t.morphemes),
                        "pos": t.pos,
                        "negated": t.negated,
                        "intensity": t.intensity,
                    }
                    for t in d.tokens
                ],
            }
            if d.tree_ref is not None:
                rec["tree"] = d.tree_ref
            fh.write(json.dumps(rec, ensure_ascii=False) + "\n")


def load_conllu_sentences(path) -> list[tuple[DependencyTree, tuple]]:
    """Like load_conllu, but also returns each sentence's tokens built from
    the FORM / LEMMA / UPOS columns."""
    trees = []
    rows = []  # (index, form, lemma, upos, deprel, head)
    sent_id = None
    sent_no = 0

    def flush():
        nonlocal rows, sent_id, sent_no
        if not rows:
            sent_id = None
            return
        ident = sent_id if sent_id is not None else str(sent_no)
        n = len(rows)
        nodes = []
        tokens = []
        for idx, form, lemma, upos, deprel, head in rows:
            if head == 0:
                head_index = ROOT
            else:
                if not 1 <= head <= n:
                    raise CorpusFormatError(
                        f"sentence {sent_no}: head {head} out of range (1..{n})"
                    )
                head_index = head - 1
            nodes.append(TreeNode(idx, head_index, deprel, upos))
            root = lemma if lemma and lemma != "_" else form
            tokens.append(Token(surface=form, root=root, pos=upos))
        try:
            trees.append((DependencyTree(tuple(nodes), sent_id=ident), tuple(tokens)))
        except CorpusFormatError as exc:
            raise CorpusFormatError(f"sentence {sent_no}: {exc}") from exc
        rows = []
        sent_id = None
        sent_no += 1

    with open(path, encoding="utf-8") as fh:
        for line in fh:
            line = line.rstrip("\n")
            if not line.strip():
                flush()
                continue
            if line.startswith("#"):
                if line[1:].strip().startswith("sent_id"):
                    _, _, value = line.partition("=")
                    sent_id = value.strip()
                continue
            cols = line.split("\t")
            if len(cols) < 8:
                raise CorpusFormatError(
                    f"sentence {sent_no}: expected 10-column CoNLL-U line, got {line!r}"
                )
            tok_id = cols[0]
            if "-" in tok_id or "." in tok_id:
                continue  # multiword token range / empty node
            rows.append(
                (int(tok_id) - 1, cols[1], cols[2], cols[3], cols[7], int(cols[6]))
            )
    flush()
    return trees


def load_conllu(path) -> list[DependencyTree]:
    """Read dependency trees from a standard 10-column CoNLL-U file.

    Multiword-token ranges and empty nodes are skipped; relation strings
    are preserved verbatim.  Sentences are identified by their
    ``# sent_id`` comment when present, else by their 0-based position.
    """
    return [tree for tree, _ in load_conllu_sentences(path)]


def trees_by_id(trees: list[DependencyTree]) -> dict[str, DependencyTree]:
    return {t.sent_id: t for t in trees}


def attach_trees(corpus: Corpus, trees: list[DependencyTree]) -> Corpus:
    """Resolve each document's tree_ref against a list of loaded trees."""
    index = trees_by_id(trees)
    docs = []
    for d in corpus:
        if d.tree_ref is not None:
            if d.tree_ref not in index:
                raise CorpusFormatError(
                    f"document {d.id!r}: unknown tree reference {d.tree_ref!r}"
                )
            docs.append(replace(d, tree=index[d.tree_ref]))
        else:
            docs.append(d)
    return Corpus(tuple(docs))


def split_folds(corpus: Corpus, k: int, seed: int) -> list[tuple[tuple, tuple]]:
    """Split labeled documents into k stratified folds.

    Returns (train_ids, test_ids) per fold.  Folds are disjoint, cover all
    labeled documents, and their total sizes differ by at most one; the
    split is deterministic for a fixed seed.
    """
    if k < 2:
        raise ValueError("k must be >= 2")
    labeled = corpus.labeled()
    if len(labeled) < k:
        raise ValueError(f"cannot make {k} folds from {len(labeled)} labeled documents")
    rng = np.random.default_rng(seed)
    folds: list[list[str]] = [[] for _ in range(k)]
    sizes = np.zeros(k, dtype=int)
    for label in ("positive", "negative"):
        ids = sorted(d.id for d in labeled if d.label == label)
        rng.shuffle(ids)
        base, extra = divmod(len(ids), k)
        pos = 0
        for f in range(k):
            take = base
            folds[f].extend(ids[pos : pos + take])
            sizes[f] += take
            pos += take
        # hand leftovers one at a time to the currently smallest fold so
        # overall sizes stay within one of each other
        for _ in range(extra):
            f = int(np.argmin(sizes))
            folds[f].append(ids[pos])
            sizes[f] += 1
            pos += 1
    all_ids = {d.id for d in labeled}
    out = []
    for f in range(k):
        test = tuple(folds[f])
        train = tuple(sorted(all_ids.difference(test)))
        out.append((train, test))
    return out


class Vocabulary:
    """Dense word index ordered by descending corpus frequency
    (ties broken lexicographically)."""

    def __init__(self, words):
        self.words = tuple(words)
        self.index = {w: i for i, w in enumerate(self.words)}
        if len(self.index) != len(self.words):
            raise ValueError("vocabulary words must be unique")

    def __len__(self):
        return len(self.words)

    def __contains__(self, word):
        return word in self.index

    def __getitem__(self, word):
        return self.index[word]

    def __eq__(self, other):
        return isinstance(other, Vocabulary) and self.words == other.words

    def word(self, i: int) -> str:
        return self.words[i]

    def save(self, path):
        with open(path, "w", encoding="utf-8") as fh:
            for i, w in enumerate(self.words):
                fh.write(f"{i}\t{w}\n")

    @classmethod
    def load(cls, path):
        pairs = []
        with open(path, encoding="utf-8") as fh:
            for line in fh:
                if line.strip():
                    i, w = line.rstrip("\n").split("\t")
                    pairs.append((int(i), w))
        pairs.sort()
        return cls(w for _, w in pairs)


def count_keys(corpus: Corpus, mark_negation: bool = True) -> Counter:
    counts: Counter = Counter()
    for doc in corpus:
        counts.update(doc.keys(mark_negation))
    return counts


def vocabulary(corpus: Corpus, min_freq: int = 0, mark_negation: bool = True) -> Vocabulary:
    """Words with corpus frequency >= min_freq, most frequent first."""
    if min_freq < 0:
        raise ValueError("min_freq must be >= 0")
    counts = count_keys(corpus, mark_negation)
    kept = [(w, c) for w, c in counts.items() if c >= min_freq]
    kept.sort(key=lambda wc: (-wc[1], wc[0]))
    return Vocabulary(w for w, _ in kept)
