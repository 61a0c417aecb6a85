"""Cross-validation orchestration, metrics, and significance testing.

Every lexicon or statistic used inside a fold must be rebuilt from that
fold's training split; fitted artifacts carry a split id and the leakage
guard refuses mismatched stamps.  Per-fold seeds derive from the master
seed through numpy's SeedSequence with the fold index as spawn key, so
runs are reproducible across machines.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np
from scipy import stats

from .corpus import Corpus, split_folds

POSITIVE = "positive"
NEGATIVE = "negative"


class LeakageError(RuntimeError):
    """A fold artifact was built from the wrong split."""


def fold_seed(master_seed: int, fold: int) -> int:
    """Documented counter scheme: seed of fold i spawns from the master."""
    ss = np.random.SeedSequence(master_seed, spawn_key=(fold,))
    return int(ss.generate_state(1)[0])


# ---------------------------------------------------------------------------
# metrics


def accuracy(preds, golds) -> float:
    preds, golds = list(preds), list(golds)
    if len(preds) != len(golds):
        raise ValueError("prediction and gold lengths differ")
    if not preds:
        raise ValueError("empty input")
    return sum(p == g for p, g in zip(preds, golds)) / len(preds)


def _binary_f1(preds, golds, positive_label) -> float:
    tp = sum(p == positive_label and g == positive_label for p, g in zip(preds, golds))
    fp = sum(p == positive_label and g != positive_label for p, g in zip(preds, golds))
    fn = sum(p != positive_label and g == positive_label for p, g in zip(preds, golds))
    if 2 * tp + fp + fn == 0:
        return 0.0
    return 2 * tp / (2 * tp + fp + fn)


def f1(preds, golds, averaging: str = "binary-positive") -> float:
    preds, golds = list(preds), list(golds)
    if len(preds) != len(golds):
        raise ValueError("prediction and gold lengths differ")
    if not preds:
        raise ValueError("empty input")
    if averaging == "binary-positive":
        return _binary_f1(preds, golds, POSITIVE)
    if averaging == "macro":
        classes = sorted(set(golds))
        return float(np.mean([_binary_f1(preds, golds, c) for c in classes]))
    raise ValueError(f"unknown averaging {averaging!r}")


# ---------------------------------------------------------------------------
# significance tests


def paired_t_test(a, b) -> float:
    """Two-sided paired t-test over per-fold scores."""
    a, b = np.asarray(a, float), np.asarray(b, float)
    if a.shape != b.shape:
        raise ValueError("paired inputs must align")
    diffs = a - b
    if np.allclose(diffs.std(ddof=1) if len(diffs) > 1 else 0.0, 0.0):
        return 1.0 if np.allclose(diffs, 0.0) else 0.0
    return float(stats.ttest_rel(a, b).pvalue)


def approx_randomization(
    preds_a, preds_b, golds, rounds: int = 10000, seed: int = 0
) -> float:
    """Swap each paired prediction with probability one half per replicate;
    the p-value is the add-one-smoothed fraction of replicates whose
    absolute accuracy gap is at least the observed one."""
    a = np.asarray([p == g for p, g in zip(preds_a, golds)], dtype=float)
    b = np.asarray([p == g for p, g in zip(preds_b, golds)], dtype=float)
    if len(a) != len(b) or len(a) != len(list(golds)):
        raise ValueError("paired inputs must align")
    n = len(a)
    observed = abs(a.mean() - b.mean())
    rng = np.random.default_rng(seed)
    hits = 0
    for _ in range(rounds):
        mask = rng.random(n) < 0.5
        swapped_a = np.where(mask, b, a)
        swapped_b = np.where(mask, a, b)
        if abs(swapped_a.mean() - swapped_b.mean()) >= observed - 1e-12:
            hits += 1
    return (hits + 1) / (rounds + 1)


def discordant_counts(preds_a, preds_b, golds) -> tuple[int, int]:
    b = sum(
        pa == g and pb != g for pa, pb, g in zip(preds_a, preds_b, golds)
    )
    c = sum(
        pa != g and pb == g for pa, pb, g in zip(preds_a, preds_b, golds)
    )
    return b, c


def mcnemar(preds_a, preds_b, golds, method: str = "auto") -> float:
    """McNemar's test on the discordant-pair counts.

    Uses the continuity-corrected chi-square statistic; with five or fewer
    discordant pairs (where that approximation is too coarse) the exact
    binomial tail is used instead.  Zero discordant pairs give p = 1.
    """
    b, c = discordant_counts(preds_a, preds_b, golds)
    n = b + c
    if n == 0:
        return 1.0
    if method == "exact" or (method == "auto" and n <= 5):
        k = min(b, c)
        p = stats.binom.cdf(k, n, 0.5) + stats.binom.sf(n - k - 1, n, 0.5)
        return float(min(1.0, p))
    statistic = (max(abs(b - c) - 1, 0)) ** 2 / n
    return float(stats.chi2.sf(statistic, df=1))


# ---------------------------------------------------------------------------
# cross-validation


@dataclass
class FoldResult:
    fold: int
    accuracy: float
    f1: float
    n_test: int
    predictions: list = field(default_factory=list, repr=False)
    gold: list = field(default_factory=list, repr=False)


@dataclass
class CrossvalResult:
    folds: list
    seed: int
    k: int
    coefficients: list = field(default_factory=list)

    @property
    def mean_accuracy(self) -> float:
        return float(np.mean([f.accuracy for f in self.folds]))

    @property
    def std_accuracy(self) -> float:
        return float(np.std([f.accuracy for f in self.folds], ddof=1))

    @property
    def mean_f1(self) -> float:
        return float(np.mean([f.f1 for f in self.folds]))

    def accuracies(self) -> list[float]:
        return [f.accuracy for f in self.folds]

    def all_predictions(self) -> tuple[list, list]:
        preds, golds = [], []
        for f in self.folds:
            preds.extend(f.predictions)
            golds.extend(f.gold)
        return preds, golds

    def to_dict(self) -> dict:
        out = {
            "k": self.k,
            "seed": self.seed,
            "folds": [
                {
                    "fold": f.fold,
                    "accuracy": f.accuracy,
                    "f1": f.f1,
                    "n_test": f.n_test,
                }
                for f in self.folds
            ],
            "mean_accuracy": self.mean_accuracy,
            "std_accuracy": self.std_accuracy,
            "mean_f1": self.mean_f1,
        }
        if self.coefficients:
            out["coefficients"] = self.coefficients
        return out

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True)

    def save_tsv(self, path) -> None:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write("fold\taccuracy\tf1\tn_test\n")
            for f in self.folds:
                fh.write(f"{f.fold}\t{f.accuracy!r}\t{f.f1!r}\t{f.n_test}\n")
            fh.write(f"mean\t{self.mean_accuracy!r}\t{self.mean_f1!r}\t-\n")
            fh.write(f"stdev\t{self.std_accuracy!r}\t-\t-\n")


def check_split_stamp(artifact, expected: str) -> None:
    stamp = getattr(artifact, "split_id", None)
    if stamp != expected:
        raise LeakageError(
            f"artifact stamped {stamp!r} used in split {expected!r}; "
            "fold statistics must come from the fold's own training data"
        )


def crossval(
    corpus: Corpus,
    pipeline_factory,
    k: int = 10,
    seed: int = 0,
    nested: bool = False,
) -> CrossvalResult:
    """k-fold cross-validation of a pipeline factory.

    The factory is called once per fold (receiving the fold seed) and must
    return an object with fit(train_corpus, split_id), predict(docs) and
    artifacts().  Nested mode asks the pipeline to tune its fusion
    coefficients inside the outer training split via its ``search_coefficients``
    hook.
    """
    folds = split_folds(corpus, k, seed)
    results = []
    coefficients = []
    for i, (train_ids, test_ids) in enumerate(folds):
        split_id = f"seed{seed}-fold{i}-train"
        train = corpus.subset(train_ids)
        test_docs = [corpus.by_id(d) for d in test_ids]
        pipeline = pipeline_factory(fold_seed(seed, i))
        if nested:
            if not hasattr(pipeline, "search_coefficients"):
                raise ValueError("pipeline does not support nested coefficient search")
            coefficients.append(pipeline.search_coefficients(train, fold_seed(seed, i)))
        pipeline.fit(train, split_id)
        for artifact in pipeline.artifacts():
            check_split_stamp(artifact, split_id)
        preds = list(pipeline.predict(test_docs))
        gold = [d.label for d in test_docs]
        results.append(
            FoldResult(
                fold=i,
                accuracy=accuracy(preds, gold),
                f1=f1(preds, gold),
                n_test=len(test_docs),
                predictions=preds,
                gold=gold,
            )
        )
    return CrossvalResult(results, seed, k, coefficients)
