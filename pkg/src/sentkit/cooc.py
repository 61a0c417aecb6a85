"""Sparse co-occurrence counting, the PPMI transform, and the cosine edge
matrix feeding polarity propagation.

Probabilities are estimated from pair mass: p(w_i, w_j) is the pair count
over the total pair mass, and the marginal p(w) is the row sum over the
same total.  PPMI uses the natural log, and edge weights are cosines over
raw PPMI rows.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp

from .corpus import Corpus, Vocabulary, vocabulary
from .windows import WindowSpec, iter_window_pairs


@dataclass(frozen=True)
class CoocMatrix:
    vocab: Vocabulary
    counts: sp.csr_matrix  # (i, j) -> co-occurrence count
    window_total: float  # total pair mass

    def count(self, w1: str, w2: str) -> float:
        if w1 not in self.vocab or w2 not in self.vocab:
            return 0.0
        return float(self.counts[self.vocab[w1], self.vocab[w2]])


@dataclass(frozen=True)
class PpmiMatrix:
    vocab: Vocabulary
    values: sp.csr_matrix  # stored entries all > 0; zeros implicit

    def value(self, w1: str, w2: str) -> float:
        return float(self.values[self.vocab[w1], self.vocab[w2]])


@dataclass(frozen=True)
class EdgeMatrix:
    vocab: Vocabulary
    values: sp.csr_matrix  # cosine similarities in [-1, 1]


def build_cooc(
    corpus: Corpus,
    spec: WindowSpec,
    min_freq: int = 0,
    vocab: Vocabulary | None = None,
    mark_negation: bool = True,
) -> CoocMatrix:
    """Accumulate window pairs over all documents into a sparse matrix."""
    if vocab is None:
        vocab = vocabulary(corpus, min_freq, mark_negation)
    counts: Counter = Counter()
    for doc in corpus:
        for w1, w2 in iter_window_pairs(doc, spec, mark_negation):
            i = vocab.index.get(w1)
            j = vocab.index.get(w2)
            if i is not None and j is not None:
                counts[(i, j)] += 1
    n = len(vocab)
    if counts:
        ij = np.array(sorted(counts), dtype=np.int64)
        data = np.array([counts[tuple(p)] for p in ij], dtype=np.float64)
        matrix = sp.csr_matrix((data, (ij[:, 0], ij[:, 1])), shape=(n, n))
    else:
        matrix = sp.csr_matrix((n, n), dtype=np.float64)
    return CoocMatrix(vocab, matrix, float(matrix.sum()))


def unigram_counts(corpus: Corpus, mark_negation: bool = True) -> Counter:
    counts: Counter = Counter()
    for doc in corpus:
        counts.update(doc.keys(mark_negation))
    return counts


def ppmi(cooc: CoocMatrix) -> PpmiMatrix:
    """Positive pointwise mutual information over the pair counts:
    max(log(p(w_i, w_j) / (p(w_i) p(w_j))), 0), natural log.

    Words with a zero marginal have their rows omitted (all implicit
    zeros).
    """
    total = cooc.window_total
    if not total > 0:
        raise ValueError("co-occurrence matrix has no pair mass")
    coo = cooc.counts.tocoo()
    row_sums = np.asarray(cooc.counts.sum(axis=1)).ravel()
    p_ij = coo.data / total
    p_i = row_sums[coo.row] / total
    p_j = row_sums[coo.col] / total
    with np.errstate(divide="ignore"):
        values = np.log(p_ij / (p_i * p_j))
    values = np.maximum(values, 0.0)
    keep = values > 0
    matrix = sp.csr_matrix(
        (values[keep], (coo.row[keep], coo.col[keep])), shape=cooc.counts.shape
    )
    return PpmiMatrix(cooc.vocab, matrix)


def cosine_edges(ppmi_matrix: PpmiMatrix) -> EdgeMatrix:
    """Edge weights E_ij = cos(M_i, M_j) over raw PPMI rows.

    All-zero rows get zero edges; the diagonal is 1 on supported rows.
    Negative cosines are clamped to 0 before propagation (they cannot
    occur for nonnegative PPMI rows, but the guarantee is enforced).
    """
    m = ppmi_matrix.values
    norms = np.sqrt(np.asarray(m.multiply(m).sum(axis=1)).ravel())
    inv = np.divide(1.0, norms, out=np.zeros_like(norms), where=norms > 0)
    normalized = sp.diags(inv) @ m
    edges = (normalized @ normalized.T).tocsr()
    edges.data = np.clip(edges.data, 0.0, 1.0)
    edges.setdiag(np.where(norms > 0, 1.0, 0.0))
    edges.eliminate_zeros()
    return EdgeMatrix(ppmi_matrix.vocab, edges.tocsr())


def save_matrix(path, vocab: Vocabulary, matrix: sp.spmatrix) -> None:
    """Coordinate-list text format "i<TAB>j<TAB>value"; the vocabulary goes
    to a sidecar file at path + ".vocab"."""
    coo = matrix.tocoo()
    order = np.lexsort((coo.col, coo.row))
    with open(path, "w", encoding="utf-8") as fh:
        for k in order:
            fh.write(f"{coo.row[k]}\t{coo.col[k]}\t{float(coo.data[k])!r}\n")
    vocab.save(str(path) + ".vocab")


def load_matrix(path) -> tuple[Vocabulary, sp.csr_matrix]:
    vocab = Vocabulary.load(str(path) + ".vocab")
    rows, cols, data = [], [], []
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            if line.strip():
                i, j, v = line.rstrip("\n").split("\t")
                rows.append(int(i))
                cols.append(int(j))
                data.append(float(v))
    n = len(vocab)
    return vocab, sp.csr_matrix((data, (rows, cols)), shape=(n, n))


def save_cooc(path, cooc: CoocMatrix) -> None:
    save_matrix(path, cooc.vocab, cooc.counts)


def load_cooc(path) -> CoocMatrix:
    vocab, matrix = load_matrix(path)
    return CoocMatrix(vocab, matrix, float(matrix.sum()))
