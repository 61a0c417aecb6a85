"""Morpheme polarity lexicon and partial-surface-form rewriting.

A morpheme inherits the supervised polarity of its host words: its score
is the mean of the word-level delta tf-idf scores of all surface forms it
appears in, and scores from several corpora are averaged.  Partial surface
forms keep the root plus only the most discriminative morphemes; negator
morphemes are always retained.
"""

from __future__ import annotations

from collections import Counter, defaultdict
from dataclasses import dataclass

from .corpus import Corpus, Token
from .lexicon import DELTA_SMOOTHING, _delta_idf_from_counts


@dataclass(frozen=True)
class MorphemeLexicon:
    scores: dict[str, float]
    host_counts: dict[str, int]

    def __post_init__(self):
        for m in self.scores:
            if self.host_counts.get(m, 0) < 1:
                raise ValueError(f"scored morpheme {m!r} has no host words")

    def __len__(self):
        return len(self.scores)

    def get(self, morpheme: str, default: float = 0.0) -> float:
        return self.scores.get(morpheme, default)

    def to_tsv(self, path) -> None:
        with open(path, "w", encoding="utf-8") as fh:
            for m in sorted(self.scores):
                fh.write(f"{m}\t{self.scores[m]!r}\t{self.host_counts[m]}\n")

    @classmethod
    def from_tsv(cls, path) -> "MorphemeLexicon":
        scores, hosts = {}, {}
        with open(path, encoding="utf-8") as fh:
            for line in fh:
                if line.strip():
                    m, score, count = line.rstrip("\n").split("\t")
                    scores[m] = float(score)
                    hosts[m] = int(count)
        return cls(scores, hosts)


@dataclass(frozen=True)
class PartialFormPolicy:
    """Top-percentage selection policy.  p = 100 keeps every morpheme
    (surface-form behavior), p = 0 keeps negators only (root-form
    behavior); in between, equally many top positive and top negative
    morphemes are kept."""

    top_percent: int = 100
    always_keep: frozenset = frozenset()

    def __post_init__(self):
        if self.top_percent not in range(0, 101, 10):
            raise ValueError("top_percent must be one of 0, 10, ..., 100")
        if not isinstance(self.always_keep, frozenset):
            object.__setattr__(self, "always_keep", frozenset(self.always_keep))


def surface_form_scores(corpus: Corpus, smoothing: float = DELTA_SMOOTHING) -> dict:
    """Word-level delta tf-idf per surface form: the per-document value
    averaged over the documents containing the form."""
    df_pos: Counter = Counter()
    df_neg: Counter = Counter()
    for doc in corpus:
        surfaces = {t.surface for t in doc.tokens}
        if doc.label == "positive":
            df_pos.update(surfaces)
        elif doc.label == "negative":
            df_neg.update(surfaces)
    sums: dict[str, float] = defaultdict(float)
    seen: Counter = Counter()
    for doc in corpus:
        counts = Counter(t.surface for t in doc.tokens)
        if not counts:
            continue
        peak = max(counts.values())
        for surface, c in counts.items():
            idf = _delta_idf_from_counts(
                df_pos[surface],
                df_neg[surface],
                corpus.n_positive,
                corpus.n_negative,
                smoothing,
            )
            sums[surface] += (0.5 + 0.5 * c / peak) * idf
            seen[surface] += 1
    return {s: sums[s] / seen[s] for s in sums}


def build_morpheme_lexicon(corpora: list[Corpus]) -> MorphemeLexicon:
    """Score every attested morpheme by averaging its host-word scores
    within each corpus, then averaging across corpora."""
    if not corpora:
        raise ValueError("need at least one corpus")
    per_corpus_scores: dict[str, list[float]] = defaultdict(list)
    host_counts: Counter = Counter()
    for corpus in corpora:
        word_scores = surface_form_scores(corpus)
        hosts: dict[str, set] = defaultdict(set)
        for doc in corpus:
            for tok in doc.tokens:
                for m in tok.morphemes:
                    hosts[m].add(tok.surface)
        for m, surfaces in hosts.items():
            values = [word_scores[s] for s in surfaces if s in word_scores]
            if values:
                per_corpus_scores[m].append(sum(values) / len(values))
                host_counts[m] += len(surfaces)
    scores = {
        m: sum(vals) / len(vals) for m, vals in per_corpus_scores.items()
    }
    return MorphemeLexicon(scores, dict(host_counts))


def select_morphemes(lex: MorphemeLexicon, policy: PartialFormPolicy) -> frozenset:
    """Equally many top positive-scored and top negative-scored morphemes,
    2m of them covering roughly top_percent of the lexicon, plus the
    always-kept negators."""
    if policy.top_percent == 100:
        return frozenset(lex.scores) | policy.always_keep
    m = policy.top_percent * len(lex.scores) // 200
    # always-kept negators are already in; they do not occupy ranked slots
    candidates = {mo: s for mo, s in lex.scores.items() if mo not in policy.always_keep}
    positives = sorted(
        (mo for mo, s in candidates.items() if s > 0),
        key=lambda mo: (-candidates[mo], mo),
    )
    negatives = sorted(
        (mo for mo, s in candidates.items() if s < 0),
        key=lambda mo: (candidates[mo], mo),
    )
    # equal polarity counts: an imbalanced tail would bias selection
    # toward the majority sentiment
    take = min(m, len(positives), len(negatives))
    selected = set(positives[:take]) | set(negatives[:take])
    return frozenset(selected) | policy.always_keep


def partial_surface_form(token: Token, keep, mark_negation: bool = True) -> str:
    """Feature key: the root (never dropped) plus the kept morphemes in
    their original attachment order, concatenated."""
    key = token.root + "".join(m for m in token.morphemes if m in keep)
    if mark_negation and token.negated:
        key += "_"
    return key
