"""sentkit: sentiment lexicon induction and document classification.

Unsupervised, semi-supervised and supervised word polarity scoring and
their fusion, morpheme-level lexicons for agglutinative text,
subclause-based context windows, PPMI/SVD and GloVe embeddings, classical
classifiers, and a cross-validation harness with significance tests.
"""

__version__ = "0.1.0"
