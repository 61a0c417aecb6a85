"""Trainable document-classification pipelines.

A pipeline owns feature extraction and model training for one
configuration; everything it learns is stamped with the split id it was
fitted on so the cross-validation leakage guard can verify it.
"""

from __future__ import annotations

import numpy as np

from . import classify
from .classify import (
    BagExtractor,
    CombinedExtractor,
    ThreeFeatsExtractor,
    majority_vote,
    train_knn,
    train_nb,
    train_svm,
)
from .cooc import build_cooc, ppmi
from .corpus import Corpus, vocabulary
from .embed import document_matrix, truncated_svd_u
from .lexicon import (
    SeedSet,
    SentimentLexicon,
    build_delta_idf_lexicon,
    build_delta_tfidf_lexicon,
    build_unsupervised_lexicon,
    build_wt_lexicon,
    combine_lexicons,
    effective_score,
)
from .windows import WindowSpec

LEXICON_BUILDERS = {
    "delta-idf": build_delta_idf_lexicon,
    "delta-tfidf": build_delta_tfidf_lexicon,
    "wt": build_wt_lexicon,
}

MODEL_TRAINERS = {"svm": train_svm, "nb": train_nb, "knn": train_knn}


class LexiconLSPipeline:
    """Log-scoring rule over a supervised lexicon built on the fold."""

    def __init__(self, lexicon_kind: str = "delta-idf", min_freq: int = 0, seed: int = 0):
        self.lexicon_kind = lexicon_kind
        self.min_freq = min_freq
        self.lexicon = None

    def fit(self, train: Corpus, split_id: str):
        self.lexicon = LEXICON_BUILDERS[self.lexicon_kind](
            train, self.min_freq, split_id
        )
        return self

    def predict(self, docs):
        return np.asarray([classify.log_score_predict(d, self.lexicon) for d in docs])

    def artifacts(self):
        return [self.lexicon]


class PrebuiltLexiconPipeline:
    """LS over an externally supplied lexicon.  Exists mostly for the
    leakage guard: a lexicon stamped for another split trips crossval."""

    def __init__(self, lexicon: SentimentLexicon):
        self.lexicon = lexicon

    def fit(self, train, split_id):
        return self

    def predict(self, docs):
        return np.asarray([classify.log_score_predict(d, self.lexicon) for d in docs])

    def artifacts(self):
        return [self.lexicon]


class BagModelPipeline:
    """Bag / dense features plus a classical model."""

    def __init__(
        self,
        schema: str = "delta-tfidf",
        model: str = "svm",
        min_freq: int = 0,
        seed: int = 0,
        **model_params,
    ):
        self.schema = schema
        self.model_name = model
        self.min_freq = min_freq
        self.seed = seed
        self.model_params = model_params
        self.extractor = None
        self.model = None

    def _fit_extractor(self, train: Corpus, split_id: str):
        if self.schema in classify.BAG_SCHEMAS:
            return BagExtractor.fit(self.schema, train, self.min_freq, split_id)
        if self.schema == "3feats":
            lex = build_delta_tfidf_lexicon(train, split_id=split_id)
            return ThreeFeatsExtractor(lex)
        if self.schema == "tfidf+3feats":
            bag = BagExtractor.fit("tfidf", train, self.min_freq, split_id)
            lex = build_delta_tfidf_lexicon(train, split_id=split_id)
            return CombinedExtractor([bag, ThreeFeatsExtractor(lex)])
        raise ValueError(f"unknown schema {self.schema!r}")

    def fit(self, train: Corpus, split_id: str):
        self.extractor = self._fit_extractor(train, split_id)
        docs = train.labeled()
        features = self.extractor.transform(docs)
        labels = [d.label for d in docs]
        trainer = MODEL_TRAINERS[self.model_name]
        params = dict(self.model_params)
        if self.model_name == "svm":
            params.setdefault("seed", self.seed)
        self.model = trainer(features, labels, **params)
        return self

    def predict(self, docs):
        return self.model.predict(self.extractor.transform(docs).x)

    def artifacts(self):
        arts = [self.extractor]
        if isinstance(self.extractor, CombinedExtractor):
            arts = list(self.extractor.parts)
        return arts


class EmbeddingPipeline:
    """Window scheme -> co-occurrence -> PPMI -> SVD-U word vectors ->
    averaged document vectors -> linear SVM."""

    def __init__(
        self,
        window: WindowSpec,
        dim: int = 100,
        min_freq: int = 4,
        append_three_feats: bool = False,
        seed: int = 0,
        **svm_params,
    ):
        self.window = window
        self.dim = dim
        self.min_freq = min_freq
        self.append_three_feats = append_three_feats
        self.seed = seed
        self.svm_params = svm_params
        self.vectors = None
        self.lexicon = None
        self.model = None

    def fit(self, train: Corpus, split_id: str):
        cooc = build_cooc(train, self.window, self.min_freq)
        self.vectors = truncated_svd_u(ppmi(cooc), min(self.dim, len(cooc.vocab)))
        if self.append_three_feats:
            self.lexicon = build_wt_lexicon(train, split_id=split_id)
        else:
            self.lexicon = SentimentLexicon({}, "supervised-wt", split_id)
        x = document_matrix(train.labeled(), self.vectors, self.lexicon)
        if not self.append_three_feats:
            x = x[:, : self.vectors.dim]
        labels = [d.label for d in train.labeled()]
        self.model = train_svm(x, labels, seed=self.seed, **self.svm_params)
        return self

    def predict(self, docs):
        x = document_matrix(docs, self.vectors, self.lexicon)
        if not self.append_three_feats:
            x = x[:, : self.vectors.dim]
        return self.model.predict(x)

    def artifacts(self):
        return [self.lexicon]


class CombinedLexiconPipeline:
    """Fusion of the supervised and unsupervised word scores, classified by
    the log-scoring rule.  Nested cross-validation can tune the fusion
    coefficients inside the training split."""

    def __init__(
        self,
        seeds: SeedSet,
        c_u: float = 0.3,
        c_s: float = 0.7,
        near_reach: int = 6,
        min_freq: int = 0,
        inner_folds: int = 10,
        seed: int = 0,
    ):
        self.seeds = seeds
        self.c_u = c_u
        self.c_s = c_s
        self.near_reach = near_reach
        self.min_freq = min_freq
        self.inner_folds = inner_folds
        self.lexicon = None

    def search_coefficients(self, train: Corpus, seed: int) -> tuple[float, float]:
        """Grid search over c_s with inner cross-validation on the outer
        training split; ties favor the larger supervised weight."""
        from .corpus import split_folds
        from .lexicon import (
            build_delta_tfidf_lexicon as sup_builder,
            combine_lexicons as fuse,
        )

        k = min(self.inner_folds, len(train.labeled()))
        folds = split_folds(train, max(k, 2), seed)
        grid = [round(0.1 * i, 1) for i in range(1, 10)]
        scores = {c_s: [] for c_s in grid}
        for train_ids, dev_ids in folds:
            inner_train = train.subset(train_ids)
            dev_docs = [train.by_id(d) for d in dev_ids]
            sup = sup_builder(inner_train)
            unsup = build_unsupervised_lexicon(
                inner_train, self.seeds, self.near_reach, self.min_freq
            )
            for c_s in grid:
                fused = fuse(sup, unsup, 1.0 - c_s, c_s)
                correct = sum(
                    (
                        "positive"
                        if sum(effective_score(t, fused) for t in d.tokens) > 0
                        else "negative"
                    )
                    == d.label
                    for d in dev_docs
                )
                scores[c_s].append(correct / len(dev_docs))
        best_c_s = max(grid, key=lambda c: (np.mean(scores[c]), c))
        self.c_u, self.c_s = round(1.0 - best_c_s, 1), best_c_s
        return self.c_u, self.c_s

    def fit(self, train: Corpus, split_id: str):
        sup = build_delta_tfidf_lexicon(train, self.min_freq, split_id)
        unsup = build_unsupervised_lexicon(
            train, self.seeds, self.near_reach, self.min_freq, split_id
        )
        self.lexicon = combine_lexicons(sup, unsup, self.c_u, self.c_s, split_id)
        return self

    def predict(self, docs):
        return np.asarray([classify.log_score_predict(d, self.lexicon) for d in docs])

    def artifacts(self):
        return [self.lexicon]


class EnsemblePipeline:
    """Majority vote over member pipelines; ties go to the SVM member.
    Optionally adds the LS rule over a combined lexicon as an extra voter."""

    def __init__(self, members: list, ls_member: CombinedLexiconPipeline | None = None):
        if not members:
            raise ValueError("ensemble needs at least one member")
        self.members = members
        self.ls_member = ls_member

    def fit(self, train: Corpus, split_id: str):
        for member in self.members:
            member.fit(train, split_id)
        if self.ls_member is not None:
            self.ls_member.fit(train, split_id)
        return self

    def predict(self, docs):
        docs = list(docs)
        votes = [np.asarray(m.predict(docs)) for m in self.members]
        if self.ls_member is not None:
            votes.append(np.asarray(self.ls_member.predict(docs)))
        tie = None
        for member, vote_arr in zip(self.members, votes):
            if getattr(member, "model_name", None) == "svm":
                tie = vote_arr
                break
        return majority_vote(votes, tie)

    def artifacts(self):
        arts = []
        for member in self.members:
            arts.extend(member.artifacts())
        if self.ls_member is not None:
            arts.extend(self.ls_member.artifacts())
        return arts


def make_pipeline(config: dict, seed: int = 0):
    """Build a pipeline from a declarative config dict (the CLI's
    ``--pipeline`` file format)."""
    kind = config.get("kind", "bag-model")
    if kind == "bag-model":
        return BagModelPipeline(
            schema=config.get("schema", "delta-tfidf"),
            model=config.get("model", "svm"),
            min_freq=config.get("min_freq", 0),
            seed=seed,
            **config.get("model_params", {}),
        )
    if kind == "lexicon-ls":
        return LexiconLSPipeline(
            lexicon_kind=config.get("lexicon", "delta-idf"),
            min_freq=config.get("min_freq", 0),
        )
    if kind == "embedding":
        window = config.get("window", {})
        spec = WindowSpec(
            kind=window.get("kind", "sliding"),
            k=window.get("k", 10),
            orientation=window.get("orientation", "symmetric"),
            cut_relations=frozenset(window.get("cut_relations", ("conj", "ccomp"))),
        )
        return EmbeddingPipeline(
            spec,
            dim=config.get("dim", 100),
            min_freq=config.get("min_freq", 4),
            append_three_feats=config.get("append_three_feats", False),
            seed=seed,
        )
    if kind == "combined-ls":
        seeds = SeedSet(tuple(tuple(p) for p in config["seeds"]))
        return CombinedLexiconPipeline(
            seeds,
            c_u=config.get("c_u", 0.3),
            c_s=config.get("c_s", 0.7),
            min_freq=config.get("min_freq", 0),
        )
    if kind == "ensemble":
        members = [make_pipeline(m, seed) for m in config["members"]]
        ls_member = None
        if "ls_member" in config:
            ls_member = make_pipeline(config["ls_member"], seed)
        return EnsemblePipeline(members, ls_member)
    raise ValueError(f"unknown pipeline kind {kind!r}")


def pipeline_factory(config: dict):
    """crossval-compatible factory: a fresh pipeline per fold seed."""

    def factory(seed: int):
        return make_pipeline(config, seed)

    return factory
