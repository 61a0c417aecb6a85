import json
from pathlib import Path

import pytest

from sentkit.corpus import Corpus, Document, Token

DATA_DIR = Path(__file__).parent / "data"


def make_doc(doc_id, words, label="unlabeled", **token_kwargs):
    tokens = tuple(Token(surface=w, root=w, **token_kwargs) for w in words)
    return Document(id=str(doc_id), tokens=tokens, label=label)


def make_corpus(docs_spec):
    """docs_spec: list of (words, label) or (id, words, label)."""
    docs = []
    for i, spec in enumerate(docs_spec):
        if len(spec) == 3:
            doc_id, words, label = spec
        else:
            words, label = spec
            doc_id = f"d{i}"
        docs.append(make_doc(doc_id, words, label))
    return Corpus(tuple(docs))


def write_jsonl(path, records):
    with open(path, "w", encoding="utf-8") as fh:
        for rec in records:
            fh.write(json.dumps(rec, ensure_ascii=False) + "\n")


@pytest.fixture
def golden_conllu():
    return DATA_DIR / "golden_subclauses.conllu"


@pytest.fixture
def tiny_labeled_corpus():
    return make_corpus(
        [
            (["good", "fine", "nice"], "positive"),
            (["good", "solid", "fine"], "positive"),
            (["bad", "awful", "poor"], "negative"),
            (["bad", "weak", "awful"], "negative"),
        ]
    )
