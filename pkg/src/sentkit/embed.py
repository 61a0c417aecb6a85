"""Word vectors from truncated SVD of PPMI, GloVe training under any
window scheme, dictionary definitions with a supervised sign, and document
embeddings."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp
from scipy.sparse.linalg import svds

from .cooc import CoocMatrix, PpmiMatrix
from .corpus import Corpus, Document, Vocabulary
from .lexicon import NumericError, SentimentLexicon, three_feats

GLOVE_X_MAX = 100.0
GLOVE_ALPHA = 0.75
GLOVE_LEARNING_RATE = 0.05


@dataclass(frozen=True)
class WordVectors:
    vocab: Vocabulary
    matrix: np.ndarray  # one row per vocab word
    source: str  # svd-u | glove | dictionary | concat

    def __post_init__(self):
        if self.matrix.shape[0] != len(self.vocab):
            raise ValueError("one row per vocabulary word required")

    @property
    def dim(self) -> int:
        return self.matrix.shape[1]

    def vector(self, word: str) -> np.ndarray:
        return self.matrix[self.vocab[word]]

    def save(self, path) -> None:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(f"# source={self.source}\n")
            for i, word in enumerate(self.vocab.words):
                values = " ".join(repr(float(v)) for v in self.matrix[i])
                fh.write(f"{word} {values}\n")

    @classmethod
    def load(cls, path) -> "WordVectors":
        words, rows = [], []
        source = "concat"
        with open(path, encoding="utf-8") as fh:
            for line in fh:
                line = line.rstrip("\n")
                if not line:
                    continue
                if line.startswith("#"):
                    _, _, value = line.partition("=")
                    source = value.strip() or source
                    continue
                parts = line.split(" ")
                words.append(parts[0])
                rows.append([float(v) for v in parts[1:]])
        return cls(Vocabulary(words), np.array(rows, dtype=np.float64), source)


def _canonicalize_signs(u: np.ndarray, vt: np.ndarray | None = None):
    """Flip each singular vector pair so the largest-magnitude entry of the
    U column is positive; removes the SVD sign ambiguity."""
    for j in range(u.shape[1]):
        peak = np.argmax(np.abs(u[:, j]))
        if u[peak, j] < 0:
            u[:, j] = -u[:, j]
            if vt is not None:
                vt[j, :] = -vt[j, :]
    return u, vt


def svd_factor(matrix, d: int):
    """Top-d singular triples (U, S, Vt) of a sparse or dense matrix,
    singular values descending, signs canonicalized."""
    n_rows, n_cols = matrix.shape
    bound = min(n_rows, n_cols)
    if not 1 <= d <= bound:
        raise ValueError(f"d must lie in 1..{bound}, got {d}")
    if d == bound or not sp.issparse(matrix):
        dense = matrix.toarray() if sp.issparse(matrix) else np.asarray(matrix, float)
        u, s, vt = np.linalg.svd(dense, full_matrices=False)
        u, s, vt = u[:, :d], s[:d], vt[:d, :]
    else:
        v0 = np.ones(bound) / np.sqrt(bound)  # fixed start vector: determinism
        u, s, vt = svds(sp.csr_matrix(matrix, dtype=np.float64), k=d, v0=v0)
        order = np.argsort(-s)
        u, s, vt = u[:, order], s[order], vt[order, :]
    u = np.ascontiguousarray(u)
    vt = np.ascontiguousarray(vt)
    _canonicalize_signs(u, vt)
    return u, s, vt


def truncated_svd_u(ppmi: PpmiMatrix, d: int = 200) -> WordVectors:
    """Word vectors: the first d columns of U from M ~ U S V^T."""
    u, _, _ = svd_factor(ppmi.values, d)
    return WordVectors(ppmi.vocab, u, "svd-u")


def train_glove(
    cooc: CoocMatrix,
    d: int,
    epochs: int = 10,
    x_max: float = GLOVE_X_MAX,
    alpha: float = GLOVE_ALPHA,
    learning_rate: float = GLOVE_LEARNING_RATE,
    seed: int = 0,
    return_losses: bool = False,
):
    """Weighted least squares over the nonzero co-occurrence cells with
    AdaGrad updates; the returned vector is the sum of the word and context
    vectors."""
    coo = cooc.counts.tocoo()
    if coo.nnz == 0:
        raise ValueError("empty co-occurrence matrix")
    n = len(cooc.vocab)
    rng = np.random.default_rng(seed)
    w = (rng.random((n, d)) - 0.5) / d
    c = (rng.random((n, d)) - 0.5) / d
    bw = (rng.random(n) - 0.5) / d
    bc = (rng.random(n) - 0.5) / d
    gw = np.ones((n, d))
    gc = np.ones((n, d))
    gbw = np.ones(n)
    gbc = np.ones(n)

    rows, cols = coo.row.copy(), coo.col.copy()
    logx = np.log(coo.data)
    weight = np.minimum(1.0, (coo.data / x_max) ** alpha)
    order = np.arange(coo.nnz)
    losses = []
    for _ in range(epochs):
        rng.shuffle(order)
        total = 0.0
        for t in order:
            i, j = rows[t], cols[t]
            diff = w[i] @ c[j] + bw[i] + bc[j] - logx[t]
            fdiff = weight[t] * diff
            total += 0.5 * fdiff * diff
            grad_w = fdiff * c[j]
            grad_c = fdiff * w[i]
            w[i] -= learning_rate * grad_w / np.sqrt(gw[i])
            c[j] -= learning_rate * grad_c / np.sqrt(gc[j])
            gw[i] += grad_w**2
            gc[j] += grad_c**2
            bw[i] -= learning_rate * fdiff / np.sqrt(gbw[i])
            bc[j] -= learning_rate * fdiff / np.sqrt(gbc[j])
            gbw[i] += fdiff**2
            gbc[j] += fdiff**2
        if not np.isfinite(total):
            raise NumericError("non-finite GloVe loss; lower the learning rate")
        losses.append(float(total))
    vectors = WordVectors(cooc.vocab, w + c, "glove")
    if return_losses:
        return vectors, losses
    return vectors


def load_definitions(path) -> dict[str, tuple[str, ...]]:
    """Dictionary file: TSV "headword<TAB>space-joined definition tokens"."""
    defs = {}
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            line = line.rstrip("\n")
            if not line:
                continue
            head, _, gloss = line.partition("\t")
            defs[head] = tuple(gloss.split()) if gloss else ()
    return defs


def dictionary_matrix(
    defs: dict, lex: SentimentLexicon, vocab: Vocabulary | None = None
):
    """Boolean headword-by-definition-word matrix, each row multiplied by
    the sign (+1/-1, with sign(0) = +1) of the headword's supervised score.

    Headwords with an empty or missing definition keep an all-zero row.
    """
    if vocab is None:
        vocab = Vocabulary(sorted(defs))
    columns = sorted({w for gloss in defs.values() for w in gloss})
    col_index = {w: i for i, w in enumerate(columns)}
    matrix = np.zeros((len(vocab), len(columns)))
    for word in vocab.words:
        row = vocab[word]
        sign = -1.0 if lex.get(word) < 0 else 1.0
        for gloss_word in defs.get(word, ()):
            matrix[row, col_index[gloss_word]] = sign
    return matrix, vocab, columns


def dictionary_vectors(
    defs: dict,
    lex: SentimentLexicon,
    d: int = 200,
    vocab: Vocabulary | None = None,
) -> WordVectors:
    matrix, vocab, _ = dictionary_matrix(defs, lex, vocab)
    u, _, _ = svd_factor(matrix, d)
    return WordVectors(vocab, u, "dictionary")


def concat_vectors(parts: list[WordVectors]) -> WordVectors:
    """Row-wise concatenation of vector sets sharing one vocabulary
    (e.g. 200 corpus-SVD + 200 dictionary + 4 context scores = 404)."""
    if not parts:
        raise ValueError("nothing to concatenate")
    vocab = parts[0].vocab
    for part in parts[1:]:
        if part.vocab != vocab:
            raise ValueError("vocabulary mismatch between vector parts")
    if len(parts) == 1:
        return parts[0]
    return WordVectors(vocab, np.hstack([p.matrix for p in parts]), "concat")


def document_vector(
    doc: Document,
    vectors: WordVectors,
    lex: SentimentLexicon,
    mark_negation: bool = True,
) -> np.ndarray:
    """Mean of the in-vocabulary token vectors (zero vector if none),
    concatenated with the document's three polarity summary scores."""
    rows = [
        vectors.matrix[vectors.vocab[k]]
        for k in doc.keys(mark_negation)
        if k in vectors.vocab
    ]
    mean = np.mean(rows, axis=0) if rows else np.zeros(vectors.dim)
    return np.concatenate([mean, three_feats(doc, lex)])


def document_matrix(
    docs, vectors: WordVectors, lex: SentimentLexicon, mark_negation: bool = True
) -> np.ndarray:
    return np.array([document_vector(d, vectors, lex, mark_negation) for d in docs])
