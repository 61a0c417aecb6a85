"""Classical classifiers, the log-scoring rule, feature assembly, and
majority-vote ensembles.

The SVM is a linear-kernel primal stochastic-subgradient machine (hinge
loss, L2 regularization, fixed epochs, seeded shuffles) so that training
is reproducible without an external learning library.  Naive Bayes is
Gaussian on dense schemas and multinomial on nonnegative bag schemas; kNN
votes over cosine similarity with k = 3.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp

from .corpus import Document, Vocabulary
from .lexicon import SentimentLexicon, effective_score, three_feats

POSITIVE = "positive"
NEGATIVE = "negative"

BAG_SCHEMAS = ("delta-idf", "delta-tfidf", "tfidf")
DENSE_SCHEMAS = ("3feats", "tfidf+3feats", "doc-embedding")


def _encode(labels) -> np.ndarray:
    y = np.array([1.0 if lab == POSITIVE else -1.0 for lab in labels])
    if len(set(labels)) < 2:
        raise ValueError("training set must contain both classes")
    return y


def _decode(y) -> np.ndarray:
    return np.where(np.asarray(y) > 0, POSITIVE, NEGATIVE)


def _as_dense(x):
    return x.toarray() if sp.issparse(x) else np.asarray(x, dtype=np.float64)


@dataclass
class FeatureMatrix:
    schema: str
    x: object  # ndarray or csr_matrix, one row per document
    split_id: str | None = None

    def __post_init__(self):
        if self.schema not in BAG_SCHEMAS + DENSE_SCHEMAS:
            raise ValueError(f"unknown feature schema {self.schema!r}")


# ---------------------------------------------------------------------------
# log scoring


def log_score(doc: Document, lex: SentimentLexicon) -> float:
    return sum(effective_score(t, lex) for t in doc.tokens)


def log_score_predict(doc: Document, lex: SentimentLexicon) -> str:
    """Sum the effective token scores; positive sums mean a positive
    document, ties go to negative."""
    return POSITIVE if log_score(doc, lex) > 0 else NEGATIVE


# ---------------------------------------------------------------------------
# models


class LinearSVM:
    """Primal stochastic-subgradient linear SVM (Pegasos-style schedule)."""

    kind = "linearSVM"

    def __init__(self, weights: np.ndarray, reg: float):
        self.weights = weights  # last entry is the bias term
        self.reg = reg

    def decision(self, x) -> np.ndarray:
        x = x.tocsr() if sp.issparse(x) else np.asarray(x, dtype=np.float64)
        scores = x @ self.weights[:-1] + self.weights[-1]
        return np.asarray(scores).ravel()

    def predict(self, x) -> np.ndarray:
        return _decode(self.decision(x))


def train_svm(
    features, labels, reg: float = 1e-4, epochs: int = 50, seed: int = 0
) -> LinearSVM:
    x = features.x if isinstance(features, FeatureMatrix) else features
    y = _encode(labels)
    n, d = x.shape
    sparse = sp.issparse(x)
    if sparse:
        x = x.tocsr()
    v = np.zeros(d + 1)
    scale = 1.0
    rng = np.random.default_rng(seed)
    order = np.arange(n)
    t = 0
    for _ in range(epochs):
        rng.shuffle(order)
        for i in order:
            t += 1
            eta = 1.0 / (reg * t)
            if sparse:
                row = x.getrow(i)
                margin = y[i] * scale * (row @ v[:-1] + v[-1])[0]
            else:
                margin = y[i] * scale * (x[i] @ v[:-1] + v[-1])
            scale *= 1.0 - eta * reg
            if scale < 1e-9:
                v *= scale
                scale = 1.0
            if margin < 1.0:
                step = eta * y[i] / scale
                if sparse:
                    v[row.indices] += step * row.data
                else:
                    v[:-1] += step * x[i]
                v[-1] += step
    return LinearSVM(v * scale, reg)


class NaiveBayes:
    kind = "NB"

    def __init__(self, variant, class_log_prior, params):
        self.variant = variant  # "gaussian" | "multinomial"
        self.class_log_prior = class_log_prior  # (positive, negative)
        self.params = params

    def _joint(self, x) -> np.ndarray:
        if self.variant == "multinomial":
            x = x.tocsr() if sp.issparse(x) else np.asarray(x, dtype=np.float64)
            log_pos, log_neg = self.params
            jp = np.asarray(x @ log_pos).ravel() + self.class_log_prior[0]
            jn = np.asarray(x @ log_neg).ravel() + self.class_log_prior[1]
            return np.column_stack([jp, jn])
        mu, var = self.params
        x = _as_dense(x)
        out = []
        for c, prior in enumerate(self.class_log_prior):
            ll = -0.5 * np.sum(
                np.log(2.0 * np.pi * var[c]) + (x - mu[c]) ** 2 / var[c], axis=1
            )
            out.append(ll + prior)
        return np.column_stack(out)

    def predict(self, x) -> np.ndarray:
        joint = self._joint(x)
        return np.where(joint[:, 0] >= joint[:, 1], POSITIVE, NEGATIVE)


def train_nb(features, labels, variant: str = "auto", alpha: float = 1.0) -> NaiveBayes:
    """Gaussian class-conditionals on dense schemas, multinomial with
    Laplace smoothing on (nonnegative) bag schemas."""
    schema = features.schema if isinstance(features, FeatureMatrix) else None
    x = features.x if isinstance(features, FeatureMatrix) else features
    y = _encode(labels)
    if variant == "auto":
        bag = schema in BAG_SCHEMAS if schema else sp.issparse(x)
        nonneg = (x.data.min() if sp.issparse(x) and x.nnz else _as_dense(x).min()) >= 0
        variant = "multinomial" if bag and nonneg else "gaussian"
    pos, neg = y > 0, y < 0
    prior = (
        float(np.log(pos.sum() / len(y))),
        float(np.log(neg.sum() / len(y))),
    )
    if variant == "multinomial":
        if (x.data.min() if sp.issparse(x) and x.nnz else _as_dense(x).min()) < 0:
            raise ValueError("multinomial naive Bayes needs nonnegative features")

        def class_sum(rows):
            return np.asarray(x[rows].sum(axis=0)).ravel()

        counts_pos = class_sum(pos) + alpha
        counts_neg = class_sum(neg) + alpha
        log_pos = np.log(counts_pos / counts_pos.sum())
        log_neg = np.log(counts_neg / counts_neg.sum())
        return NaiveBayes("multinomial", prior, (log_pos, log_neg))
    dense = _as_dense(x)
    mu = np.stack([dense[pos].mean(axis=0), dense[neg].mean(axis=0)])
    var = np.stack([dense[pos].var(axis=0), dense[neg].var(axis=0)]) + 1e-9
    return NaiveBayes("gaussian", prior, (mu, var))


class KNearest:
    """Cosine k-nearest-neighbour classifier; when distances tie exactly,
    the earlier training index wins."""

    kind = "kNN"

    def __init__(self, x, labels, k: int = 3):
        self.x = _as_dense(x)
        self.labels = np.asarray(labels)
        self.k = k
        norms = np.linalg.norm(self.x, axis=1)
        self._normalized = np.divide(
            self.x, norms[:, None], out=np.zeros_like(self.x), where=norms[:, None] > 0
        )

    def predict(self, x) -> np.ndarray:
        x = _as_dense(x)
        norms = np.linalg.norm(x, axis=1)
        q = np.divide(x, norms[:, None], out=np.zeros_like(x), where=norms[:, None] > 0)
        sims = q @ self._normalized.T
        out = []
        for row in sims:
            # stable sort on descending similarity keeps index order on ties
            nearest = np.argsort(-row, kind="stable")[: self.k]
            votes = Counter(self.labels[nearest])
            top = votes.most_common()
            if len(top) > 1 and top[0][1] == top[1][1]:
                out.append(self.labels[nearest[0]])
            else:
                out.append(top[0][0])
        return np.asarray(out)


def train_knn(features, labels, k: int = 3) -> KNearest:
    x = features.x if isinstance(features, FeatureMatrix) else features
    _encode(labels)  # validates both classes are present
    return KNearest(x, labels, k)


# ---------------------------------------------------------------------------
# ensembles


def majority_vote(votes: list, tie_breaker: np.ndarray | None = None) -> np.ndarray:
    """Label with the most votes per document; exact ties fall back to the
    tie-breaking member (by convention the SVM's votes)."""
    if not votes:
        raise ValueError("majority vote needs at least one voter")
    stacked = np.stack([np.asarray(v) for v in votes])
    n = stacked.shape[1]
    out = []
    for i in range(n):
        counts = Counter(stacked[:, i])
        top = counts.most_common()
        if len(top) > 1 and top[0][1] == top[1][1]:
            if tie_breaker is not None:
                out.append(tie_breaker[i])
            else:
                out.append(stacked[0, i])
        else:
            out.append(top[0][0])
    return np.asarray(out)


# ---------------------------------------------------------------------------
# serialization

_MODEL_VERSION = 1


def save_model(model, path) -> None:
    """Versioned npz serialization for trained models."""
    if isinstance(model, LinearSVM):
        np.savez(
            path,
            version=_MODEL_VERSION,
            kind="linearSVM",
            weights=model.weights,
            reg=model.reg,
        )
    elif isinstance(model, NaiveBayes):
        arrays = {f"param{i}": p for i, p in enumerate(model.params)}
        np.savez(
            path,
            version=_MODEL_VERSION,
            kind="NB",
            variant=model.variant,
            prior=np.array(model.class_log_prior),
            **arrays,
        )
    elif isinstance(model, KNearest):
        np.savez(
            path,
            version=_MODEL_VERSION,
            kind="kNN",
            x=model.x,
            labels=model.labels,
            k=model.k,
        )
    else:
        raise TypeError(f"cannot serialize model of type {type(model).__name__}")


def load_model(path):
    data = np.load(path, allow_pickle=False)
    kind = str(data["kind"])
    if kind == "linearSVM":
        return LinearSVM(data["weights"], float(data["reg"]))
    if kind == "NB":
        variant = str(data["variant"])
        prior = tuple(float(v) for v in data["prior"])
        params = tuple(data[f"param{i}"] for i in range(2))
        return NaiveBayes(variant, prior, params)
    if kind == "kNN":
        return KNearest(data["x"], data["labels"], int(data["k"]))
    raise ValueError(f"unknown model kind {kind!r}")


# ---------------------------------------------------------------------------
# feature extraction


class BagExtractor:
    """Bag features over a fixed vocabulary with training-split weights."""

    def __init__(self, schema, vocab, weights, split_id=None):
        if schema not in BAG_SCHEMAS:
            raise ValueError(f"not a bag schema: {schema!r}")
        self.schema = schema
        self.vocab = vocab
        self.weights = weights  # word -> idf-style weight
        self.split_id = split_id

    @classmethod
    def fit(cls, schema, corpus, min_freq: int = 0, split_id=None) -> "BagExtractor":
        from .corpus import vocabulary
        from .lexicon import build_delta_idf_lexicon

        vocab = vocabulary(corpus, min_freq)
        if schema in ("delta-idf", "delta-tfidf"):
            lex = build_delta_idf_lexicon(corpus, split_id=split_id)
            weights = {w: lex.get(w) for w in vocab.words}
        elif schema == "tfidf":
            df = Counter()
            for doc in corpus:
                df.update(set(doc.keys()))
            n_docs = len(corpus)
            weights = {
                w: float(np.log(n_docs / df[w])) if df[w] else 0.0
                for w in vocab.words
            }
        else:
            raise ValueError(f"not a bag schema: {schema!r}")
        return cls(schema, vocab, weights, split_id)

    def transform(self, docs) -> FeatureMatrix:
        docs = list(docs)
        rows, cols, data = [], [], []
        for r, doc in enumerate(docs):
            counts = Counter(k for k in doc.keys() if k in self.vocab)
            peak = max(counts.values()) if counts else 1
            for w, c in counts.items():
                value = self.weights[w]
                if self.schema in ("delta-tfidf", "tfidf"):
                    value *= 0.5 + 0.5 * c / peak
                if value != 0.0:
                    rows.append(r)
                    cols.append(self.vocab[w])
                    data.append(value)
        x = sp.csr_matrix((data, (rows, cols)), shape=(len(docs), len(self.vocab)))
        return FeatureMatrix(self.schema, x, self.split_id)


class ThreeFeatsExtractor:
    schema = "3feats"

    def __init__(self, lex: SentimentLexicon):
        self.lex = lex
        self.split_id = lex.split_id

    def transform(self, docs) -> FeatureMatrix:
        x = np.array([three_feats(d, self.lex) for d in docs])
        return FeatureMatrix("3feats", x, self.split_id)


class CombinedExtractor:
    """Column-wise concatenation, e.g. tfidf + 3feats."""

    def __init__(self, parts, schema="tfidf+3feats"):
        self.parts = parts
        self.schema = schema
        self.split_id = parts[0].split_id

    def transform(self, docs) -> FeatureMatrix:
        docs = list(docs)
        blocks = [p.transform(docs).x for p in self.parts]
        dense = [_as_dense(b) for b in blocks]
        return FeatureMatrix(self.schema, np.hstack(dense), self.split_id)


def extractor_to_dict(extractor) -> dict:
    if isinstance(extractor, BagExtractor):
        return {
            "schema": extractor.schema,
            "vocab": list(extractor.vocab.words),
            "weights": {w: extractor.weights[w] for w in extractor.vocab.words},
            "split_id": extractor.split_id,
        }
    if isinstance(extractor, ThreeFeatsExtractor):
        return {
            "schema": "3feats",
            "lexicon": dict(extractor.lex.scores),
            "provenance": extractor.lex.provenance,
            "split_id": extractor.lex.split_id,
        }
    if isinstance(extractor, CombinedExtractor):
        return {
            "schema": extractor.schema,
            "parts": [extractor_to_dict(p) for p in extractor.parts],
        }
    raise TypeError(f"cannot serialize extractor {type(extractor).__name__}")


def extractor_from_dict(obj: dict):
    schema = obj["schema"]
    if schema in BAG_SCHEMAS:
        return BagExtractor(
            schema, Vocabulary(obj["vocab"]), dict(obj["weights"]), obj.get("split_id")
        )
    if schema == "3feats":
        lex = SentimentLexicon(
            dict(obj["lexicon"]), obj.get("provenance", "supervised-delta-tfidf"),
            obj.get("split_id"),
        )
        return ThreeFeatsExtractor(lex)
    if "parts" in obj:
        return CombinedExtractor(
            [extractor_from_dict(p) for p in obj["parts"]], schema
        )
    raise ValueError(f"unknown extractor schema {schema!r}")
