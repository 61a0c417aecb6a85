"""Deterministic normalization and feature-key rewriting.

Covers negation marking, intensifier handling, emoticon normalization,
multi-word expressions, stop words, URL/hashtag rules, punctuation policy
and emphasis boosts.  All operations are pure functions over token lists;
the document pipeline is idempotent.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass, field, replace
from importlib import resources

from .corpus import Corpus, Document, Token

INTENSITY_FACTORS = {"more": 1.2, "less": 0.8, "most": 1.5, "least": 0.5}

# tokens kept verbatim by the punctuation policy
KEPT_PUNCTUATION = {"?", "!", "(!)"}
# class token standing in for repeated !/? runs (negative-emphasis signal)
EXCL_EMPH = "EXCL_EMPH"
EMPHASIS_FACTOR = 1.2  # reuse of the "more" class for uppercase / char runs

_EMOTICON_RE = re.compile(r"^[:;=8xX][-'~^o]?[()\[\]{}<>/\\|DPpSsOo*@$3]+$")
_URL_RE = re.compile(r"^(https?://|www\.)\S+$", re.IGNORECASE)
_PUNCT_ONLY_RE = re.compile(r"^[^\w\s]+$", re.UNICODE)
_EMPH_RUN_RE = re.compile(r"(\w)\1{2,}", re.UNICODE)


@dataclass(frozen=True)
class PreprocessConfig:
    """Declarative rule set; shipped defaults exist for Turkish and English.

    ``negators_follow_target`` selects the negation direction: Turkish
    negator words ("değil", "yok") negate the token they follow, English
    ones ("not") the token they precede.
    """

    negator_words: frozenset[str] = frozenset()
    negator_morphemes: frozenset[str] = frozenset()
    intensifiers: dict = field(default_factory=dict)  # word -> class
    stopwords: frozenset[str] = frozenset()
    mwe_list: tuple[tuple[str, ...], ...] = ()
    keep_hashtags: bool = True
    strip_urls: bool = True
    negators_follow_target: bool = False

    def __post_init__(self):
        bad = set(self.intensifiers.values()) - set(INTENSITY_FACTORS)
        if bad:
            raise ValueError(f"unknown intensifier classes: {sorted(bad)}")
        for name in ("negator_words", "negator_morphemes", "stopwords"):
            value = getattr(self, name)
            if not isinstance(value, frozenset):
                object.__setattr__(self, name, frozenset(value))
        object.__setattr__(
            self, "mwe_list", tuple(tuple(m) for m in self.mwe_list)
        )

    @classmethod
    def from_file(cls, path) -> "PreprocessConfig":
        with open(path, encoding="utf-8") as fh:
            return cls.from_dict(json.load(fh))

    @classmethod
    def from_dict(cls, obj: dict) -> "PreprocessConfig":
        return cls(
            negator_words=frozenset(obj.get("negator_words", ())),
            negator_morphemes=frozenset(obj.get("negator_morphemes", ())),
            intensifiers=dict(obj.get("intensifiers", {})),
            stopwords=frozenset(obj.get("stopwords", ())),
            mwe_list=tuple(tuple(m) for m in obj.get("mwe_list", ())),
            keep_hashtags=bool(obj.get("keep_hashtags", True)),
            strip_urls=bool(obj.get("strip_urls", True)),
            negators_follow_target=bool(obj.get("negators_follow_target", False)),
        )

    @classmethod
    def default(cls, language: str) -> "PreprocessConfig":
        name = f"preprocess_{language}.json"
        with resources.files("sentkit.data").joinpath(name).open(encoding="utf-8") as fh:
            return cls.from_dict(json.load(fh))


def _is_emoticon(surface: str) -> bool:
    return bool(_EMOTICON_RE.match(surface))


def normalize_emoticons(tokens):
    """Collapse runs of a repeated trailing emoticon character to length 2.

    Emoticons are never deleted; ":((((" becomes ":((".
    """
    out = []
    for tok in tokens:
        if _is_emoticon(tok.surface):
            collapsed = re.sub(r"(.)\1{2,}", r"\1\1", tok.surface)
            if collapsed != tok.surface:
                tok = replace(tok, surface=collapsed, root=collapsed)
        out.append(tok)
    return out


def strip_urls_keep_hashtags(tokens, config: PreprocessConfig):
    """Drop URL tokens when configured; hashtags stay verbatim when
    keep_hashtags, otherwise the leading '#' is stripped."""
    out = []
    for tok in tokens:
        if config.strip_urls and _URL_RE.match(tok.surface):
            continue
        if tok.surface.startswith("#") and len(tok.surface) > 1:
            if config.keep_hashtags:
                out.append(tok)
            else:
                bare = tok.surface.lstrip("#")
                out.append(replace(tok, surface=bare, root=bare))
            continue
        out.append(tok)
    return out


def apply_punctuation_policy(tokens):
    """Drop punctuation except "?", "!", "(!)"; collapse repeated !/?
    runs (e.g. "?!", "!!") into a single EXCL_EMPH class token."""
    out = []
    i = 0
    while i < len(tokens):
        tok = tokens[i]
        if tok.surface == EXCL_EMPH or _is_emoticon(tok.surface):
            out.append(tok)
            i += 1
            continue
        if _PUNCT_ONLY_RE.match(tok.surface):
            if set(tok.surface) <= {"!", "?"}:
                # merge a run of adjacent !/? tokens into one mark
                marks = tok.surface
                while i + 1 < len(tokens) and set(tokens[i + 1].surface) <= {"!", "?"}:
                    i += 1
                    marks += tokens[i].surface
                if len(marks) == 1:
                    out.append(replace(tok, surface=marks, root=marks))
                else:
                    out.append(Token(surface=EXCL_EMPH, root=EXCL_EMPH, pos="PUNCT"))
            elif tok.surface in KEPT_PUNCTUATION:
                out.append(tok)
            i += 1
            continue
        out.append(tok)
        i += 1
    return out


def match_mwes(tokens, config: PreprocessConfig):
    """Replace listed multi-word expressions by single tokens keyed with '+'.

    Matching is greedy left-to-right, longest expression first,
    non-overlapping, case-insensitive on surfaces.
    """
    if not config.mwe_list:
        return list(tokens)
    mwes = sorted(config.mwe_list, key=len, reverse=True)
    out = []
    i = 0
    while i < len(tokens):
        matched = None
        for mwe in mwes:
            n = len(mwe)
            if n == 0 or i + n > len(tokens):
                continue
            window = [t.surface.lower() for t in tokens[i : i + n]]
            if window == [w.lower() for w in mwe]:
                matched = n
                break
        if matched:
            joined = "+".join(t.surface for t in tokens[i : i + matched])
            out.append(Token(surface=joined, root=joined, pos="MWE"))
            i += matched
        else:
            out.append(tokens[i])
            i += 1
    return out


def remove_stopwords(tokens, config: PreprocessConfig):
    """Drop stop words, always retaining negators and intensifiers."""
    keep = set(config.negator_words) | set(config.intensifiers)
    return [
        t
        for t in tokens
        if t.surface.lower() not in config.stopwords
        or t.surface.lower() in keep
    ]


def mark_negation(tokens, config: PreprocessConfig):
    """Flag negated tokens and consume negators.

    A negator word toggles the negation of its target (the preceding kept
    token in Turkish, the following one in English); a negator morpheme
    toggles its own token.  Explicitly consecutive negations cancel, so
    "şekersiz değil" leaves "şeker" unnegated.  Consumed negators vanish:
    the word token is dropped and the morpheme leaves the morpheme list,
    which is what keeps reprocessing a no-op.
    """
    toggles = [bool(set(t.morphemes) & config.negator_morphemes) for t in tokens]
    is_negator = [t.surface.lower() in config.negator_words for t in tokens]
    if config.negators_follow_target:
        for i, neg in enumerate(is_negator):
            if not neg:
                continue
            for j in range(i - 1, -1, -1):
                if not is_negator[j]:
                    toggles[j] = not toggles[j]
                    break
    else:
        for i, neg in enumerate(is_negator):
            if not neg:
                continue
            for j in range(i + 1, len(tokens)):
                if not is_negator[j]:
                    toggles[j] = not toggles[j]
                    break
    out = []
    for tok, toggle, skip in zip(tokens, toggles, is_negator):
        if skip:
            continue
        morphemes = tuple(
            m for m in tok.morphemes if m not in config.negator_morphemes
        )
        negated = tok.negated != toggle
        if negated != tok.negated or morphemes != tok.morphemes:
            tok = replace(tok, negated=negated, morphemes=morphemes)
        out.append(tok)
    return out


def apply_intensifiers(tokens, config: PreprocessConfig):
    """Remove intensifier tokens, multiplying the intensity of the next
    scoring-eligible token by the class factor of each removed one
    (1.2^x for x consecutive boosters, 0.8^x for downtoners, 1.5 / 0.5
    for most / least).  A trailing intensifier has no effect.

    Bare punctuation is not scoring-eligible (it may be dropped later);
    emoticons are.
    """
    out = []
    pending = 1.0
    for tok in tokens:
        cls = config.intensifiers.get(tok.surface.lower())
        if cls is not None:
            pending *= INTENSITY_FACTORS[cls]
            continue
        eligible = _is_emoticon(tok.surface) or not _PUNCT_ONLY_RE.match(tok.surface)
        if pending != 1.0 and eligible:
            tok = replace(tok, intensity=tok.intensity * pending)
            pending = 1.0
        out.append(tok)
    return out


def apply_emphasis(tokens):
    """Boost uppercase words (in mixed-case documents) and words with
    character runs of three or more, then fold case.

    Runs collapse to length two and surfaces are lowercased afterwards,
    which keeps the whole pipeline idempotent.  All-uppercase documents
    carry no per-token emphasis and are left unboosted.
    """
    alpha = [t for t in tokens if any(c.isalpha() for c in t.surface) and t.surface != EXCL_EMPH]
    doc_all_upper = bool(alpha) and all(t.surface.isupper() for t in alpha)
    out = []
    for tok in tokens:
        if tok.surface == EXCL_EMPH or _is_emoticon(tok.surface):
            out.append(tok)
            continue
        surface, root, boost = tok.surface, tok.root, 1.0
        if _EMPH_RUN_RE.search(surface):
            boost *= EMPHASIS_FACTOR
            surface = _EMPH_RUN_RE.sub(r"\1\1", surface)
            root = _EMPH_RUN_RE.sub(r"\1\1", root)
        if surface.isupper() and not doc_all_upper and len(surface) > 1:
            boost *= EMPHASIS_FACTOR
        lowered_surface = surface.lower()
        lowered_root = root.lower()
        if boost != 1.0 or lowered_surface != tok.surface or lowered_root != tok.root:
            tok = replace(
                tok,
                surface=lowered_surface,
                root=lowered_root,
                intensity=tok.intensity * boost,
            )
        out.append(tok)
    return out


def preprocess_tokens(tokens, config: PreprocessConfig):
    """Full normalization pipeline over one token sequence.

    The punctuation policy runs after every token-removing pass so that
    mark runs created by removals are still collapsed in one application.
    """
    tokens = strip_urls_keep_hashtags(tokens, config)
    tokens = normalize_emoticons(tokens)
    tokens = match_mwes(tokens, config)
    tokens = remove_stopwords(tokens, config)
    tokens = mark_negation(tokens, config)
    tokens = apply_intensifiers(tokens, config)
    tokens = apply_punctuation_policy(tokens)
    tokens = apply_emphasis(tokens)
    return tokens


def preprocess_document(doc: Document, config: PreprocessConfig) -> Document:
    """Preprocess a document.  The parse is dropped: normalization merges
    and removes tokens, which invalidates token-index-aligned trees."""
    return Document(
        id=doc.id,
        tokens=tuple(preprocess_tokens(list(doc.tokens), config)),
        label=doc.label,
    )


def preprocess_corpus(corpus: Corpus, config: PreprocessConfig) -> Corpus:
    return Corpus(tuple(preprocess_document(d, config) for d in corpus))
