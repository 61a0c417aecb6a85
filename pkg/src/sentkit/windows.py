"""Context-window generation: fixed sliding windows and dependency-derived
subclauses.

A subclause is found by scanning the dependency tree from the root:
whenever a verb node hangs off its head by a cut relation (conjunction or
clausal complement), the tree is cut there and the node starts a new
subclause together with all of its recursively collected, non-cut
children.  Boundary punctuation and redundant conjunctions are stripped,
and the sentence-final punctuation mark is re-appended to every subclause
when rendering.
"""

from __future__ import annotations

import re
from dataclasses import dataclass

from .corpus import DependencyTree, Document

DEFAULT_CUT_RELATIONS = frozenset({"conj", "ccomp"})
# verbs "be it in gerund, infinitive, or any other form"; UPOS tags
DEFAULT_VERB_POS = frozenset({"VERB", "AUX"})
# additive conjunctions dropped at subclause boundaries; contrastive ones
# ("but") carry sentiment-reversal information and are kept
REDUNDANT_CONJUNCTIONS = frozenset({"and", "or", "ve", "veya"})

_PUNCT_ONLY_RE = re.compile(r"^[^\w\s]+$", re.UNICODE)


@dataclass(frozen=True)
class WindowSpec:
    """Hyper-parameters of a context-window scheme."""

    kind: str  # "sliding" | "subclause"
    k: int = 0
    orientation: str = "symmetric"  # "symmetric" | "right"
    cut_relations: frozenset = DEFAULT_CUT_RELATIONS
    verb_pos: frozenset = DEFAULT_VERB_POS

    def __post_init__(self):
        if self.kind not in ("sliding", "subclause"):
            raise ValueError(f"unknown window kind {self.kind!r}")
        if self.kind == "sliding":
            if self.k < 1:
                raise ValueError("sliding windows require k >= 1")
            if self.orientation not in ("symmetric", "right"):
                raise ValueError(f"unknown orientation {self.orientation!r}")
        if self.kind == "subclause" and not self.cut_relations:
            raise ValueError("subclause windows require non-empty cut_relations")
        for name in ("cut_relations", "verb_pos"):
            value = getattr(self, name)
            if not isinstance(value, frozenset):
                object.__setattr__(self, name, frozenset(value))


@dataclass(frozen=True)
class Subclause:
    """Strictly increasing token indices into the parent document, plus the
    index of the sentence-final punctuation mark appended on rendering."""

    token_indices: tuple[int, ...]
    punct_index: int | None = None

    def __post_init__(self):
        idx = tuple(self.token_indices)
        object.__setattr__(self, "token_indices", idx)
        if not idx:
            raise ValueError("subclause must be non-empty")
        if any(b <= a for a, b in zip(idx, idx[1:])):
            raise ValueError("subclause indices must be strictly increasing")


def _is_punct(token) -> bool:
    return token.pos == "PUNCT" or bool(_PUNCT_ONLY_RE.match(token.surface))


def extract_subclauses(
    tree: DependencyTree,
    tokens,
    spec: WindowSpec | None = None,
    redundant_conjunctions: frozenset = REDUNDANT_CONJUNCTIONS,
) -> list[Subclause]:
    """Cut a sentence into subclauses at verb nodes attached by a cut
    relation.  A sentence with no qualifying cut yields one subclause
    covering all tokens."""
    if spec is None:
        spec = WindowSpec(kind="subclause")
    if len(tree) != len(tokens):
        raise ValueError(
            f"tree has {len(tree)} nodes for {len(tokens)} tokens"
        )
    cut_nodes = {tree.root_index}
    for node in tree.nodes:
        if (
            node.head_index is not None
            and node.pos in spec.verb_pos
            and node.relation in spec.cut_relations
        ):
            cut_nodes.add(node.token_index)

    children = tree.children()
    groups = []
    for cut in sorted(cut_nodes):
        members = []
        stack = [cut]
        while stack:
            i = stack.pop()
            members.append(i)
            for child in children[i]:
                if child not in cut_nodes:
                    stack.append(child)
        groups.append(sorted(members))
    groups.sort(key=lambda g: g[0])

    # the whole sentence's final punctuation mark, re-appended to every
    # subclause for consistency
    punct_index = None
    if tokens and _is_punct(tokens[-1]):
        punct_index = len(tokens) - 1

    subclauses = []
    for members in groups:
        kept = list(members)
        while kept and _boundary_drop(tokens[kept[0]], redundant_conjunctions):
            kept.pop(0)
        while kept and _boundary_drop(tokens[kept[-1]], redundant_conjunctions):
            kept.pop()
        if kept:
            subclauses.append(Subclause(tuple(kept), punct_index))
    return subclauses


def _boundary_drop(token, redundant_conjunctions) -> bool:
    return _is_punct(token) or token.surface.lower() in redundant_conjunctions


def render_subclause(tokens, subclause: Subclause) -> str:
    """Detokenize a subclause, attaching punctuation without a space."""
    parts = [tokens[i].surface for i in subclause.token_indices]
    if subclause.punct_index is not None:
        parts.append(tokens[subclause.punct_index].surface)
    text = ""
    for part in parts:
        if text and not _PUNCT_ONLY_RE.match(part):
            text += " "
        text += part
    return text


def iter_window_pairs(doc: Document, spec: WindowSpec, mark_negation: bool = True):
    """Yield (center word, context word) pairs under the given window
    scheme, one pair per co-occurrence (uniform weight).

    Sliding symmetric windows pair positions i, j with 0 < |i-j| <= k;
    right windows only j > i.  Subclause windows pair all distinct
    positions within the same subclause and contribute nothing across
    cuts.  Windows never cross documents.
    """
    keys = doc.keys(mark_negation)
    n = len(keys)
    if spec.kind == "sliding":
        for i in range(n):
            start = max(0, i - spec.k) if spec.orientation == "symmetric" else i + 1
            end = min(n, i + spec.k + 1)
            for j in range(start, end):
                if j == i:
                    continue
                yield keys[i], keys[j]
    elif spec.kind == "subclause":
        if doc.tree is None:
            raise ValueError(
                f"document {doc.id!r} has no dependency tree; "
                "subclause windows need a parse"
            )
        for sub in extract_subclauses(doc.tree, doc.tokens, spec):
            idx = sub.token_indices
            for a in idx:
                for b in idx:
                    if a != b:
                        yield keys[a], keys[b]
    else:  # pragma: no cover - guarded by WindowSpec
        raise ValueError(f"unknown window kind {spec.kind!r}")
