"""Word-level polarity scoring.

Implements the domain-independent co-occurrence score (an antonym-pair
log-ratio with corpus counts standing in for search-engine hits), the
domain-specific random-walk propagation with factorial series pooling,
the supervised delta idf / delta tf-idf and dictionary-sign weights, the
sign-aware supervised/unsupervised fusion, and the per-document and
per-context score summaries (3-feats, 4-scores).
"""

from __future__ import annotations

import logging
import math
from collections import Counter, defaultdict
from dataclasses import dataclass, field

import numpy as np

from .cooc import CoocMatrix, EdgeMatrix, build_cooc, unigram_counts
from .corpus import Corpus, Document
from .windows import WindowSpec, iter_window_pairs

log = logging.getLogger(__name__)

PROVENANCES = (
    "unsupervised",
    "semisupervised",
    "supervised-delta-idf",
    "supervised-delta-tfidf",
    "supervised-wt",
    "combined",
)

# smoothing constants, as printed in the source formulas
SC_SMOOTHING = 0.001
DELTA_SMOOTHING = 0.001
WT_SMOOTHING = 0.01
PROPAGATION_SMOOTHING = 1e-9

# symmetric window reach for the corpus-count NEAR operator: twelve-word
# span means six words each side
NEAR_REACH = 6
# the propagation windows use a fifteen-word span, seven words each side
PROPAGATION_REACH = 7

# fusion coefficients found optimal by nested grid search
DEFAULT_C_UNSUP = 0.3
DEFAULT_C_SUP = 0.7


class NumericError(ArithmeticError):
    """Raised when an iteration produces non-finite values."""


@dataclass(frozen=True)
class SeedSet:
    """Manually chosen antonym pairs; each seed carries weight 1/|s|."""

    pairs: tuple[tuple[str, str], ...]

    def __post_init__(self):
        object.__setattr__(self, "pairs", tuple(tuple(p) for p in self.pairs))
        if not self.pairs:
            raise ValueError("seed set must contain at least one antonym pair")
        pos = {p for p, _ in self.pairs}
        neg = {n for _, n in self.pairs}
        both = pos & neg
        if both:
            raise ValueError(f"words in both polarity roles: {sorted(both)}")

    @property
    def positive_words(self) -> tuple[str, ...]:
        return tuple(p for p, _ in self.pairs)

    @property
    def negative_words(self) -> tuple[str, ...]:
        return tuple(n for _, n in self.pairs)

    @classmethod
    def from_tsv(cls, path) -> "SeedSet":
        pairs = []
        with open(path, encoding="utf-8") as fh:
            for line in fh:
                line = line.rstrip("\n")
                if not line or line.startswith("#"):
                    continue
                pos, neg = line.split("\t")
                pairs.append((pos, neg))
        return cls(tuple(pairs))

    def to_tsv(self, path) -> None:
        with open(path, "w", encoding="utf-8") as fh:
            for pos, neg in self.pairs:
                fh.write(f"{pos}\t{neg}\n")


@dataclass
class SentimentLexicon:
    """word -> polarity score; absent words are treated as 0 by consumers.

    ``split_id`` stamps which training split the lexicon was built from;
    the cross-validation leakage guard checks it.
    """

    scores: dict[str, float]
    provenance: str
    split_id: str | None = None

    def __post_init__(self):
        if self.provenance not in PROVENANCES:
            raise ValueError(f"unknown provenance {self.provenance!r}")
        bad = [w for w, s in self.scores.items() if not math.isfinite(s)]
        if bad:
            raise ValueError(f"non-finite scores for {bad[:5]}")

    def get(self, word: str, default: float = 0.0) -> float:
        return self.scores.get(word, default)

    def __len__(self):
        return len(self.scores)

    def __contains__(self, word):
        return word in self.scores

    def scaled(self, factor: float) -> "SentimentLexicon":
        return SentimentLexicon(
            {w: s * factor for w, s in self.scores.items()},
            self.provenance,
            self.split_id,
        )

    def to_tsv(self, path) -> None:
        with open(path, "w", encoding="utf-8") as fh:
            for word in sorted(self.scores):
                fh.write(f"{word}\t{self.scores[word]!r}\t{self.provenance}\n")

    @classmethod
    def from_tsv(cls, path) -> "SentimentLexicon":
        scores = {}
        provenance = "combined"
        with open(path, encoding="utf-8") as fh:
            for line in fh:
                if not line.strip():
                    continue
                word, score, provenance = line.rstrip("\n").split("\t")
                scores[word] = float(score)
        return cls(scores, provenance)


@dataclass
class PropagationState:
    """Final state of the random-walk iteration, for inspection."""

    p_pos: np.ndarray
    p_neg: np.ndarray
    g: float
    iteration: int
    series_pos: np.ndarray = field(repr=False, default=None)
    series_neg: np.ndarray = field(repr=False, default=None)


def effective_score(token, lex: SentimentLexicon) -> float:
    """Per-token score: lexicon value of the unmarked key, times the
    intensity multiplier, negated for negation-marked tokens."""
    base = lex.get(token.key(mark_negation=False))
    return base * token.intensity * (-1.0 if token.negated else 1.0)


# ---------------------------------------------------------------------------
# unsupervised: antonym-pair co-occurrence ratio


def unsupervised_sc(
    word: str,
    cooc_near: CoocMatrix,
    counts: Counter,
    seeds: SeedSet,
    smoothing: float = SC_SMOOTHING,
) -> float:
    """Domain-independent polarity score of one word.

    For each antonym pair (p, n) the score is
    log2((near(word,p)/count(p)) * (count(n)/near(word,n))) with the
    smoothing constant added inside every near/count term; the result is
    the average over all pairs.  Corpus co-occurrence counts replace
    search-engine hits.
    """
    if word not in cooc_near.vocab:
        log.warning("word %r not in vocabulary; unsupervised score is 0", word)
        return 0.0
    total = 0.0
    for pos, neg in seeds.pairs:
        near_p = cooc_near.count(word, pos) + smoothing
        near_n = cooc_near.count(word, neg) + smoothing
        count_p = counts.get(pos, 0) + smoothing
        count_n = counts.get(neg, 0) + smoothing
        total += math.log2((near_p / count_p) * (count_n / near_n))
    return total / len(seeds.pairs)


def build_unsupervised_lexicon(
    corpus: Corpus,
    seeds: SeedSet,
    reach: int = NEAR_REACH,
    min_freq: int = 0,
    split_id: str | None = None,
) -> SentimentLexicon:
    spec = WindowSpec(kind="sliding", k=reach, orientation="symmetric")
    cooc_near = build_cooc(corpus, spec, min_freq)
    counts = unigram_counts(corpus)
    scores = {
        w: unsupervised_sc(w, cooc_near, counts, seeds)
        for w in cooc_near.vocab.words
    }
    return SentimentLexicon(scores, "unsupervised", split_id)


# ---------------------------------------------------------------------------
# semi-supervised: random-walk propagation over the cosine edge graph


def propagation_seed_vector(edges: EdgeMatrix, seed_words) -> np.ndarray:
    s = np.zeros(len(edges.vocab))
    present = [w for w in seed_words if w in edges.vocab]
    missing = [w for w in seed_words if w not in edges.vocab]
    if missing:
        log.warning("seed words not in vocabulary, ignored: %s", missing)
    for w in present:
        s[edges.vocab[w]] = 1.0 / len(seed_words)
    return s


def propagate(
    edges: EdgeMatrix,
    seeds: SeedSet,
    g0: float = 0.5,
    max_iter: int = 50,
    tol: float = 1e-6,
    decay: float = 0.9,
    g_floor: float = 0.05,
    split_id: str | None = None,
) -> SentimentLexicon:
    lexicon, _ = propagate_with_state(
        edges, seeds, g0, max_iter, tol, decay, g_floor, split_id
    )
    return lexicon


def propagate_with_state(
    edges: EdgeMatrix,
    seeds: SeedSet,
    g0: float = 0.5,
    max_iter: int = 50,
    tol: float = 1e-6,
    decay: float = 0.9,
    g_floor: float = 0.05,
    split_id: str | None = None,
) -> tuple[SentimentLexicon, PropagationState]:
    """Propagate seed polarities across the word graph.

    Both polarity vectors start at 1/|v|, iterate
    P^(k+1) = (1 - g_k) E P^(k) + g_k s with g_k = max(g0 * decay^k,
    g_floor), and stop at convergence (max entrywise delta < tol) or after
    max_iter steps.  The pooled vector is the factorial series
    sum_k P^(k)/k!, and the final word score is
    log(P_pos(w) / P_neg(w)) after smoothing.
    """
    if not 0 < g0 <= 1:
        raise ValueError("g0 must lie in (0, 1]")
    if max_iter < 1:
        raise ValueError("max_iter must be >= 1")
    n = len(edges.vocab)
    if n == 0:
        raise ValueError("empty vocabulary")
    e = edges.values
    s_pos = propagation_seed_vector(edges, seeds.positive_words)
    s_neg = propagation_seed_vector(edges, seeds.negative_words)

    p_pos = np.full(n, 1.0 / n)
    p_neg = np.full(n, 1.0 / n)
    series_pos = np.zeros(n)
    series_neg = np.zeros(n)
    factorial = 1.0
    g = g0
    iteration = 0
    for k in range(max_iter):
        g = max(g0 * decay**k, g_floor)
        next_pos = (1.0 - g) * (e @ p_pos) + g * s_pos
        next_neg = (1.0 - g) * (e @ p_neg) + g * s_neg
        if not (np.all(np.isfinite(next_pos)) and np.all(np.isfinite(next_neg))):
            raise NumericError(f"non-finite propagation values at iteration {k + 1}")
        iteration = k + 1
        factorial *= iteration
        series_pos += next_pos / factorial
        series_neg += next_neg / factorial
        delta = max(
            np.max(np.abs(next_pos - p_pos)), np.max(np.abs(next_neg - p_neg))
        )
        p_pos, p_neg = next_pos, next_neg
        if delta < tol:
            break

    num = series_pos + PROPAGATION_SMOOTHING
    den = series_neg + PROPAGATION_SMOOTHING
    if np.any(den <= 0):
        raise NumericError("negative-polarity mass vanished despite smoothing")
    scores_vec = np.log(num / den)
    if not np.all(np.isfinite(scores_vec)):
        raise NumericError("non-finite propagation scores")
    scores = {edges.vocab.word(i): float(scores_vec[i]) for i in range(n)}
    state = PropagationState(p_pos, p_neg, g, iteration, series_pos, series_neg)
    return SentimentLexicon(scores, "semisupervised", split_id), state


# ---------------------------------------------------------------------------
# supervised weights


def _doc_frequencies(corpus: Corpus) -> tuple[Counter, Counter]:
    df_pos: Counter = Counter()
    df_neg: Counter = Counter()
    for doc in corpus:
        if doc.label == "positive":
            df_pos.update(set(doc.keys()))
        elif doc.label == "negative":
            df_neg.update(set(doc.keys()))
    return df_pos, df_neg


def delta_idf(word: str, corpus: Corpus, smoothing: float = DELTA_SMOOTHING) -> float:
    """log((N_pos,w/N_pos + s) / (N_neg,w/N_neg + s)), natural log."""
    df_pos, df_neg = _doc_frequencies(corpus)
    return _delta_idf_from_counts(
        df_pos[word], df_neg[word], corpus.n_positive, corpus.n_negative, smoothing
    )


def _delta_idf_from_counts(dp, dn, n_pos, n_neg, smoothing=DELTA_SMOOTHING):
    if n_pos <= 0 or n_neg <= 0:
        raise ValueError("corpus must contain positive and negative documents")
    return math.log((dp / n_pos + smoothing) / (dn / n_neg + smoothing))


def _tf_factor(word: str, doc: Document) -> float:
    counts = Counter(doc.keys())
    if not counts:
        raise ValueError(f"document {doc.id!r} is empty")
    return 0.5 + 0.5 * counts[word] / max(counts.values())


def delta_tfidf(
    word: str, doc: Document, corpus: Corpus, smoothing: float = DELTA_SMOOTHING
) -> float:
    """(0.5 + 0.5 f_wd / max_w' f_w'd) * delta_idf(w)."""
    return _tf_factor(word, doc) * delta_idf(word, corpus, smoothing)


def wt_score(word: str, corpus: Corpus, smoothing: float = WT_SMOOTHING) -> float:
    """Dictionary-sign supervised weight; same shape as delta idf but with
    smoothing 0.01, as printed."""
    df_pos, df_neg = _doc_frequencies(corpus)
    if corpus.n_positive <= 0 or corpus.n_negative <= 0:
        raise ValueError("corpus must contain positive and negative documents")
    return math.log(
        (df_pos[word] / corpus.n_positive + smoothing)
        / (df_neg[word] / corpus.n_negative + smoothing)
    )


def build_delta_idf_lexicon(
    corpus: Corpus, min_freq: int = 0, split_id: str | None = None
) -> SentimentLexicon:
    df_pos, df_neg = _doc_frequencies(corpus)
    counts = Counter()
    for doc in corpus:
        counts.update(doc.keys())
    scores = {
        w: _delta_idf_from_counts(
            df_pos[w], df_neg[w], corpus.n_positive, corpus.n_negative
        )
        for w, c in counts.items()
        if c >= min_freq
    }
    return SentimentLexicon(scores, "supervised-delta-idf", split_id)


def build_delta_tfidf_lexicon(
    corpus: Corpus, min_freq: int = 0, split_id: str | None = None
) -> SentimentLexicon:
    """Word-level delta tf-idf: the per-document value averaged over the
    documents in which the word occurs."""
    idf = build_delta_idf_lexicon(corpus, 0, split_id)
    sums: dict[str, float] = defaultdict(float)
    occurrences: Counter = Counter()
    freq: Counter = Counter()
    for doc in corpus:
        counts = Counter(doc.keys())
        freq.update(counts)
        if not counts:
            continue
        peak = max(counts.values())
        for w, c in counts.items():
            sums[w] += (0.5 + 0.5 * c / peak) * idf.get(w)
            occurrences[w] += 1
    scores = {
        w: sums[w] / occurrences[w]
        for w in sums
        if freq[w] >= min_freq
    }
    return SentimentLexicon(scores, "supervised-delta-tfidf", split_id)


def build_wt_lexicon(
    corpus: Corpus, min_freq: int = 0, split_id: str | None = None
) -> SentimentLexicon:
    df_pos, df_neg = _doc_frequencies(corpus)
    if corpus.n_positive <= 0 or corpus.n_negative <= 0:
        raise ValueError("corpus must contain positive and negative documents")
    counts = Counter()
    for doc in corpus:
        counts.update(doc.keys())
    scores = {
        w: math.log(
            (df_pos[w] / corpus.n_positive + WT_SMOOTHING)
            / (df_neg[w] / corpus.n_negative + WT_SMOOTHING)
        )
        for w, c in counts.items()
        if c >= min_freq
    }
    return SentimentLexicon(scores, "supervised-wt", split_id)


# ---------------------------------------------------------------------------
# fusion of supervised and unsupervised scores


def combine_scores(sup: float, unsup: float, c_u: float, c_s: float) -> float:
    """Sign-aware fusion: opposite nonzero signs keep only the damped
    supervised score; otherwise the weighted sum.  Zero counts as agreeing
    with either sign."""
    if not (0 <= c_u <= 1 and 0 <= c_s <= 1):
        raise ValueError("coefficients must lie in [0, 1]")
    if abs(c_u + c_s - 1.0) > 1e-9:
        raise ValueError("coefficients must sum to 1")
    if sup * unsup < 0:
        return c_s * sup
    return c_u * unsup + c_s * sup


def combine(
    word: str,
    sup: SentimentLexicon,
    unsup: SentimentLexicon,
    c_u: float = DEFAULT_C_UNSUP,
    c_s: float = DEFAULT_C_SUP,
) -> float:
    return combine_scores(sup.get(word), unsup.get(word), c_u, c_s)


def combine_lexicons(
    sup: SentimentLexicon,
    unsup: SentimentLexicon,
    c_u: float = DEFAULT_C_UNSUP,
    c_s: float = DEFAULT_C_SUP,
    split_id: str | None = None,
) -> SentimentLexicon:
    words = set(sup.scores) | set(unsup.scores)
    scores = {
        w: combine_scores(sup.get(w), unsup.get(w), c_u, c_s) for w in words
    }
    return SentimentLexicon(scores, "combined", split_id or sup.split_id)


def grid_search_coefficients(
    train: Corpus,
    dev: Corpus,
    step: float = 0.1,
    sup: SentimentLexicon | None = None,
    unsup: SentimentLexicon | None = None,
    seeds: SeedSet | None = None,
) -> tuple[float, float]:
    """Pick (c_u, c_s) maximizing dev accuracy of the log-scoring rule over
    the combined lexicon; c_s ranges over {step, ..., 1 - step} and ties go
    to the larger c_s."""
    train_ids = {d.id for d in train}
    if any(d.id in train_ids for d in dev):
        raise ValueError("dev set must be disjoint from the training set")
    if sup is None:
        sup = build_delta_tfidf_lexicon(train)
    if unsup is None:
        if seeds is None:
            raise ValueError("need either an unsupervised lexicon or a seed set")
        unsup = build_unsupervised_lexicon(train, seeds)
    dev_docs = [d for d in dev if d.label != "unlabeled"]
    best = None
    n_steps = round(1.0 / step)
    for i in range(1, n_steps):
        c_s = i * step
        c_u = 1.0 - c_s
        combined = combine_lexicons(sup, unsup, c_u, c_s)
        correct = 0
        for doc in dev_docs:
            total = sum(effective_score(t, combined) for t in doc.tokens)
            pred = "positive" if total > 0 else "negative"
            correct += pred == doc.label
        accuracy = correct / len(dev_docs) if dev_docs else 0.0
        if best is None or accuracy >= best[0]:
            best = (accuracy, c_u, c_s)
    return best[1], best[2]


# ---------------------------------------------------------------------------
# score summaries


def three_feats(doc: Document, lex: SentimentLexicon) -> tuple[float, float, float]:
    """Per-document (min, mean, max) of effective token scores; tokens
    absent from the lexicon contribute 0, and an empty document yields
    (0, 0, 0)."""
    scores = [effective_score(t, lex) for t in doc.tokens]
    if not scores:
        return (0.0, 0.0, 0.0)
    return (min(scores), sum(scores) / len(scores), max(scores))


def context_neighbors(corpus: Corpus, spec: WindowSpec) -> dict[str, set]:
    neighbors: dict[str, set] = defaultdict(set)
    for doc in corpus:
        for w1, w2 in iter_window_pairs(doc, spec):
            neighbors[w1].add(w2)
    return neighbors


def four_scores(
    word: str,
    corpus: Corpus,
    spec: WindowSpec,
    base: SentimentLexicon,
    neighbors: dict[str, set] | None = None,
) -> tuple[float, float, float, float]:
    """Per-word (self, min, max, mean) where min/max/mean range over the
    base scores of all distinct words co-occurring with the target in any
    of its context windows.  A word with no contexts repeats its own
    score."""
    if neighbors is None:
        neighbors = context_neighbors(corpus, spec)
    self_score = base.get(word)
    context = neighbors.get(word)
    if not context:
        return (self_score, self_score, self_score, self_score)
    values = [base.get(w) for w in sorted(context)]
    return (self_score, min(values), max(values), sum(values) / len(values))


def four_scores_matrix(
    corpus: Corpus, spec: WindowSpec, base: SentimentLexicon, vocab
) -> np.ndarray:
    neighbors = context_neighbors(corpus, spec)
    rows = [
        four_scores(w, corpus, spec, base, neighbors) for w in vocab.words
    ]
    return np.array(rows, dtype=np.float64)
