"""Operator-facing command surface.

Every run writes a manifest (config snapshot, seeds, input digests) beside
its outputs, so any artifact can be reproduced from the manifest alone.
Exit codes: 0 success, 1 usage, 2 data error, 3 numeric failure.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import os
import sys
from pathlib import Path

from . import __version__
from .corpus import (
    Corpus,
    CorpusFormatError,
    attach_trees,
    load_conllu,
    load_conllu_sentences,
    load_documents,
    save_documents,
    vocabulary,
)
from .lexicon import NumericError

USAGE_ERROR = 1
DATA_ERROR = 2
NUMERIC_ERROR = 3


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(USAGE_ERROR, f"{self.prog}: error: {message}\n")


def _sha256(path) -> str:
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        for block in iter(lambda: fh.read(1 << 16), b""):
            h.update(block)
    return h.hexdigest()


def write_manifest(out_path, command, args, inputs, outputs, seeds=None) -> None:
    manifest = {
        "tool": "sentkit",
        "version": __version__,
        "command": command,
        "arguments": {k: v for k, v in sorted(args.items()) if v is not None},
        "inputs": {str(p): _sha256(p) for p in inputs if p and Path(p).exists()},
        "outputs": [str(o) for o in outputs],
        "seeds": seeds or {},
    }
    with open(out_path, "w", encoding="utf-8") as fh:
        json.dump(manifest, fh, indent=2, sort_keys=True, ensure_ascii=False)
        fh.write("\n")


def _load_corpus(path, conllu=None) -> Corpus:
    corpus = load_documents(path)
    if conllu:
        corpus = attach_trees(corpus, load_conllu(conllu))
    return corpus


def _window_spec(args):
    from .windows import WindowSpec

    if args.kind == "subclause":
        relations = frozenset(args.relations.split(","))
        return WindowSpec(kind="subclause", cut_relations=relations)
    return WindowSpec(kind="sliding", k=args.k, orientation=args.orientation)


# ---------------------------------------------------------------------------
# handlers


def cmd_ingest(args):
    corpus = _load_corpus(args.docs, args.conllu)
    outdir = Path(args.out)
    outdir.mkdir(parents=True, exist_ok=True)
    out_docs = outdir / "corpus.jsonl"
    save_documents(corpus, out_docs)
    outputs = [out_docs.name]
    if args.conllu:
        target = outdir / "trees.conllu"
        target.write_bytes(Path(args.conllu).read_bytes())
        outputs.append(target.name)
    write_manifest(
        outdir / "manifest.json",
        "ingest",
        vars(args),
        [args.docs, args.conllu],
        outputs,
    )
    print(
        f"ingested {len(corpus)} documents "
        f"({corpus.n_positive} positive, {corpus.n_negative} negative)"
    )
    return 0


def cmd_preprocess(args):
    from .preprocess import PreprocessConfig, preprocess_corpus

    if args.config:
        config = PreprocessConfig.from_file(args.config)
    else:
        config = PreprocessConfig.default(args.lang)
    corpus = _load_corpus(args.docs)
    out = Path(args.out)
    out.parent.mkdir(parents=True, exist_ok=True)
    save_documents(preprocess_corpus(corpus, config), out)
    write_manifest(
        out.with_suffix(out.suffix + ".manifest.json"),
        "preprocess",
        vars(args),
        [args.docs, args.config],
        [out.name],
    )
    return 0


def cmd_lexicon_unsup(args):
    from .lexicon import SeedSet, build_unsupervised_lexicon

    corpus = _load_corpus(args.corpus)
    seeds = SeedSet.from_tsv(args.seeds)
    lex = build_unsupervised_lexicon(corpus, seeds, args.reach, args.min_freq)
    out = Path(args.out)
    lex.to_tsv(out)
    write_manifest(
        out.with_suffix(out.suffix + ".manifest.json"),
        "lexicon unsup",
        vars(args),
        [args.corpus, args.seeds],
        [out.name],
    )
    return 0


def cmd_lexicon_propagate(args):
    from .cooc import build_cooc, cosine_edges, ppmi
    from .lexicon import PROPAGATION_REACH, SeedSet, propagate
    from .windows import WindowSpec

    corpus = _load_corpus(args.corpus)
    seeds = SeedSet.from_tsv(args.seeds)
    spec = WindowSpec(kind="sliding", k=args.reach, orientation="symmetric")
    edges = cosine_edges(ppmi(build_cooc(corpus, spec, args.min_freq)))
    lex = propagate(
        edges,
        seeds,
        g0=args.g0,
        max_iter=args.max_iter,
        tol=args.tol,
        decay=args.decay,
        g_floor=args.g_floor,
    )
    out = Path(args.out)
    lex.to_tsv(out)
    write_manifest(
        out.with_suffix(out.suffix + ".manifest.json"),
        "lexicon propagate",
        vars(args),
        [args.corpus, args.seeds],
        [out.name],
    )
    return 0


def cmd_lexicon_supervised(args):
    from .lexicon import (
        build_delta_idf_lexicon,
        build_delta_tfidf_lexicon,
        build_wt_lexicon,
    )

    builders = {
        "delta-idf": build_delta_idf_lexicon,
        "delta-tfidf": build_delta_tfidf_lexicon,
        "wt": build_wt_lexicon,
    }
    corpus = _load_corpus(args.corpus)
    lex = builders[args.method](corpus, args.min_freq)
    out = Path(args.out)
    lex.to_tsv(out)
    write_manifest(
        out.with_suffix(out.suffix + ".manifest.json"),
        "lexicon supervised",
        vars(args),
        [args.corpus],
        [out.name],
    )
    return 0


def cmd_lexicon_combine(args):
    from .lexicon import SentimentLexicon, combine_lexicons

    sup = SentimentLexicon.from_tsv(args.sup)
    unsup = SentimentLexicon.from_tsv(args.unsup)
    lex = combine_lexicons(sup, unsup, args.cu, args.cs)
    out = Path(args.out)
    lex.to_tsv(out)
    write_manifest(
        out.with_suffix(out.suffix + ".manifest.json"),
        "lexicon combine",
        vars(args),
        [args.sup, args.unsup],
        [out.name],
    )
    return 0


def cmd_morpho_build(args):
    from .morpho import build_morpheme_lexicon

    corpora = [_load_corpus(p) for p in args.corpus]
    lex = build_morpheme_lexicon(corpora)
    out = Path(args.out)
    lex.to_tsv(out)
    write_manifest(
        out.with_suffix(out.suffix + ".manifest.json"),
        "morpho build",
        vars(args),
        list(args.corpus),
        [out.name],
    )
    return 0


def cmd_morpho_select(args):
    from .morpho import MorphemeLexicon, PartialFormPolicy, select_morphemes

    lex = MorphemeLexicon.from_tsv(args.lexicon)
    negators = frozenset(args.keep_negators.split(",")) if args.keep_negators else frozenset()
    policy = PartialFormPolicy(top_percent=args.top_percent, always_keep=negators)
    selected = select_morphemes(lex, policy)
    out = Path(args.out)
    with open(out, "w", encoding="utf-8") as fh:
        for m in sorted(selected):
            fh.write(m + "\n")
    write_manifest(
        out.with_suffix(out.suffix + ".manifest.json"),
        "morpho select",
        vars(args),
        [args.lexicon],
        [out.name],
    )
    return 0


def cmd_cooc_build(args):
    from .cooc import build_cooc, save_cooc

    corpus = _load_corpus(args.corpus, args.conllu)
    spec = _window_spec(args)
    cooc = build_cooc(corpus, spec, args.min_freq)
    out = Path(args.out)
    save_cooc(out, cooc)
    write_manifest(
        out.with_suffix(out.suffix + ".manifest.json"),
        "cooc build",
        vars(args),
        [args.corpus, args.conllu],
        [out.name, out.name + ".vocab"],
    )
    return 0


def cmd_embed_svd(args):
    from .cooc import load_cooc, ppmi
    from .embed import truncated_svd_u

    cooc = load_cooc(args.cooc)
    vectors = truncated_svd_u(ppmi(cooc), args.dim)
    out = Path(args.out)
    vectors.save(out)
    write_manifest(
        out.with_suffix(out.suffix + ".manifest.json"),
        "embed svd",
        vars(args),
        [args.cooc],
        [out.name],
    )
    return 0


def cmd_embed_glove(args):
    from .cooc import load_cooc
    from .embed import train_glove

    cooc = load_cooc(args.cooc)
    vectors = train_glove(cooc, args.dim, epochs=args.epochs, seed=args.seed)
    out = Path(args.out)
    vectors.save(out)
    write_manifest(
        out.with_suffix(out.suffix + ".manifest.json"),
        "embed glove",
        vars(args),
        [args.cooc],
        [out.name],
        seeds={"glove": args.seed},
    )
    return 0


def cmd_embed_dict(args):
    from .corpus import Vocabulary
    from .embed import dictionary_vectors, load_definitions
    from .lexicon import SentimentLexicon

    defs = load_definitions(args.definitions)
    lex = SentimentLexicon.from_tsv(args.lexicon)
    vocab = Vocabulary.load(args.vocab) if args.vocab else None
    vectors = dictionary_vectors(defs, lex, args.dim, vocab)
    out = Path(args.out)
    vectors.save(out)
    write_manifest(
        out.with_suffix(out.suffix + ".manifest.json"),
        "embed dict",
        vars(args),
        [args.definitions, args.lexicon, args.vocab],
        [out.name],
    )
    return 0


def cmd_embed_concat(args):
    from .embed import WordVectors, concat_vectors

    parts = [WordVectors.load(p) for p in args.parts]
    vectors = concat_vectors(parts)
    out = Path(args.out)
    vectors.save(out)
    write_manifest(
        out.with_suffix(out.suffix + ".manifest.json"),
        "embed concat",
        vars(args),
        list(args.parts),
        [out.name],
    )
    return 0


def cmd_embed_docvec(args):
    from .embed import WordVectors, document_vector
    from .lexicon import SentimentLexicon

    corpus = _load_corpus(args.corpus)
    vectors = WordVectors.load(args.vectors)
    lex = SentimentLexicon.from_tsv(args.lexicon)
    out = Path(args.out)
    with open(out, "w", encoding="utf-8") as fh:
        for doc in corpus:
            vec = document_vector(doc, vectors, lex)
            fh.write(doc.id + "\t" + " ".join(repr(float(v)) for v in vec) + "\n")
    write_manifest(
        out.with_suffix(out.suffix + ".manifest.json"),
        "embed docvec",
        vars(args),
        [args.corpus, args.vectors, args.lexicon],
        [out.name],
    )
    return 0


def cmd_windows_extract(args):
    from .windows import WindowSpec, extract_subclauses, render_subclause

    spec = WindowSpec(
        kind="subclause", cut_relations=frozenset(args.relations.split(","))
    )
    out = Path(args.out) if args.out else None
    sink = open(out, "w", encoding="utf-8") if out else sys.stdout
    try:
        for tree, tokens in load_conllu_sentences(args.conllu):
            subclauses = extract_subclauses(tree, tokens, spec)
            record = {
                "sent_id": tree.sent_id,
                "subclauses": [
                    {
                        "token_indices": list(s.token_indices),
                        "text": render_subclause(tokens, s),
                    }
                    for s in subclauses
                ],
            }
            sink.write(json.dumps(record, ensure_ascii=False) + "\n")
    finally:
        if out:
            sink.close()
    if out:
        write_manifest(
            out.with_suffix(out.suffix + ".manifest.json"),
            "windows extract",
            vars(args),
            [args.conllu],
            [out.name],
        )
    return 0


def cmd_train(args):
    from .classify import extractor_to_dict, save_model
    from .pipeline import BagModelPipeline

    corpus = _load_corpus(args.corpus)
    pipeline = BagModelPipeline(
        schema=args.schema, model=args.model, min_freq=args.min_freq, seed=args.seed
    )
    pipeline.fit(corpus, split_id=f"train:{args.corpus}")
    outdir = Path(args.out)
    outdir.mkdir(parents=True, exist_ok=True)
    save_model(pipeline.model, outdir / "model.npz")
    with open(outdir / "extractor.json", "w", encoding="utf-8") as fh:
        json.dump(extractor_to_dict(pipeline.extractor), fh, sort_keys=True)
    write_manifest(
        outdir / "manifest.json",
        "train",
        vars(args),
        [args.corpus],
        ["model.npz", "extractor.json"],
        seeds={"model": args.seed},
    )
    return 0


def cmd_predict(args):
    from .classify import extractor_from_dict, load_model

    model_dir = Path(args.model)
    if not (model_dir / "model.npz").exists():
        raise CorpusFormatError(f"missing model artifact {model_dir / 'model.npz'}")
    model = load_model(model_dir / "model.npz")
    with open(model_dir / "extractor.json", encoding="utf-8") as fh:
        extractor = extractor_from_dict(json.load(fh))
    corpus = _load_corpus(args.corpus)
    docs = list(corpus)
    preds = model.predict(extractor.transform(docs).x)
    out = Path(args.out)
    with open(out, "w", encoding="utf-8") as fh:
        fh.write("id\tprediction\n")
        for doc, pred in zip(docs, preds):
            fh.write(f"{doc.id}\t{pred}\n")
    write_manifest(
        out.with_suffix(out.suffix + ".manifest.json"),
        "predict",
        vars(args),
        [args.corpus, model_dir / "model.npz", model_dir / "extractor.json"],
        [out.name],
    )
    return 0


def cmd_evaluate(args):
    from .evaluate import crossval
    from .pipeline import pipeline_factory

    with open(args.pipeline, encoding="utf-8") as fh:
        config = json.load(fh)
    # flags override the config file
    if args.min_freq is not None:
        config["min_freq"] = args.min_freq
    corpus = _load_corpus(args.corpus, args.conllu)
    result = crossval(
        corpus,
        pipeline_factory(config),
        k=args.folds,
        seed=args.seed,
        nested=args.nested,
    )
    outdir = Path(args.out)
    outdir.mkdir(parents=True, exist_ok=True)
    (outdir / "summary.json").write_text(result.to_json() + "\n", encoding="utf-8")
    result.save_tsv(outdir / "folds.tsv")
    write_manifest(
        outdir / "manifest.json",
        "evaluate",
        vars(args),
        [args.pipeline, args.corpus, args.conllu],
        ["summary.json", "folds.tsv"],
        seeds={"crossval": args.seed},
    )
    print(f"mean accuracy {result.mean_accuracy:.4f} over {args.folds} folds")
    return 0


def cmd_report(args):
    from .report import write_report

    written = write_report(args.summary, args.outdir, args.compare)
    write_manifest(
        Path(args.outdir) / "manifest.json",
        "report",
        vars(args),
        [args.summary, args.compare],
        written,
    )
    return 0


# ---------------------------------------------------------------------------
# parser wiring


def build_parser() -> _Parser:
    parser = _Parser(prog="sentkit", description=__doc__)
    parser.add_argument("--version", action="version", version=f"sentkit {__version__}")
    parser.add_argument(
        "--threads",
        type=int,
        default=os.cpu_count(),
        help="internal numeric parallelism (exported to the BLAS layer)",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("ingest", help="JSONL/CoNLL-U into a normalized store")
    p.add_argument("--docs", required=True)
    p.add_argument("--conllu")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_ingest)

    p = sub.add_parser("preprocess", help="run the normalization pipeline")
    p.add_argument("--docs", required=True)
    p.add_argument("--config", help="preprocess config JSON (flags override)")
    p.add_argument("--lang", default="english", choices=["turkish", "english"])
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_preprocess)

    lex = sub.add_parser("lexicon", help="word polarity scoring").add_subparsers(
        dest="subcommand", required=True
    )
    p = lex.add_parser("unsup", help="antonym-pair co-occurrence scores")
    p.add_argument("--corpus", required=True)
    p.add_argument("--seeds", required=True)
    p.add_argument("--reach", type=int, default=6, help="words each side (12-word span)")
    p.add_argument("--min-freq", type=int, default=0)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_lexicon_unsup)

    p = lex.add_parser("propagate", help="random-walk propagation scores")
    p.add_argument("--corpus", required=True)
    p.add_argument("--seeds", required=True)
    p.add_argument("--g0", type=float, default=0.5)
    p.add_argument("--decay", type=float, default=0.9)
    p.add_argument("--g-floor", type=float, default=0.05)
    p.add_argument("--max-iter", type=int, default=50)
    p.add_argument("--tol", type=float, default=1e-6)
    p.add_argument("--reach", type=int, default=7, help="words each side (15-word span)")
    p.add_argument("--min-freq", type=int, default=0)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_lexicon_propagate)

    p = lex.add_parser("supervised", help="delta idf / delta tf-idf / wt scores")
    p.add_argument("--corpus", required=True)
    p.add_argument("--method", default="delta-tfidf", choices=["delta-idf", "delta-tfidf", "wt"])
    p.add_argument("--min-freq", type=int, default=0)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_lexicon_supervised)

    p = lex.add_parser("combine", help="sign-aware supervised/unsupervised fusion")
    p.add_argument("--sup", required=True)
    p.add_argument("--unsup", required=True)
    p.add_argument("--cu", type=float, default=0.3)
    p.add_argument("--cs", type=float, default=0.7)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_lexicon_combine)

    morpho = sub.add_parser("morpho", help="morpheme polarity lexicon").add_subparsers(
        dest="subcommand", required=True
    )
    p = morpho.add_parser("build", help="score morphemes from host words")
    p.add_argument("--corpus", action="append", required=True)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_morpho_build)

    p = morpho.add_parser("select", help="top-percent morpheme selection")
    p.add_argument("--lexicon", required=True)
    p.add_argument("--top-percent", type=int, default=100)
    p.add_argument("--keep-negators", default="")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_morpho_select)

    cooc = sub.add_parser("cooc", help="co-occurrence statistics").add_subparsers(
        dest="subcommand", required=True
    )
    p = cooc.add_parser("build", help="count window pairs")
    p.add_argument("--corpus", required=True)
    p.add_argument("--conllu")
    p.add_argument("--kind", default="sliding", choices=["sliding", "subclause"])
    p.add_argument("--k", type=int, default=10)
    p.add_argument("--orientation", default="symmetric", choices=["symmetric", "right"])
    p.add_argument("--relations", default="conj,ccomp")
    p.add_argument("--min-freq", type=int, default=0)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_cooc_build)

    embed = sub.add_parser("embed", help="word and document vectors").add_subparsers(
        dest="subcommand", required=True
    )
    p = embed.add_parser("svd", help="truncated SVD of the PPMI matrix")
    p.add_argument("--cooc", required=True)
    p.add_argument("--dim", type=int, default=200)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_embed_svd)

    p = embed.add_parser("glove", help="weighted least-squares embeddings")
    p.add_argument("--cooc", required=True)
    p.add_argument("--dim", type=int, default=100)
    p.add_argument("--epochs", type=int, default=10)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_embed_glove)

    p = embed.add_parser("dict", help="definition vectors with supervised sign")
    p.add_argument("--definitions", required=True)
    p.add_argument("--lexicon", required=True)
    p.add_argument("--dim", type=int, default=200)
    p.add_argument("--vocab", help="vocab sidecar fixing the row order")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_embed_dict)

    p = embed.add_parser("concat", help="row-wise concatenation of vector files")
    p.add_argument("--parts", nargs="+", required=True)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_embed_concat)

    p = embed.add_parser("docvec", help="averaged document vectors + 3-feats")
    p.add_argument("--corpus", required=True)
    p.add_argument("--vectors", required=True)
    p.add_argument("--lexicon", required=True)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_embed_docvec)

    p = sub.add_parser("windows", help="context windows").add_subparsers(
        dest="subcommand", required=True
    ).add_parser("extract", help="emit subclauses as JSONL")
    p.add_argument("--conllu", required=True)
    p.add_argument("--relations", default="conj,ccomp")
    p.add_argument("--out")
    p.set_defaults(func=cmd_windows_extract)

    p = sub.add_parser("train", help="fit a classifier on a labeled corpus")
    p.add_argument("--corpus", required=True)
    p.add_argument(
        "--schema",
        default="delta-tfidf",
        choices=["delta-idf", "delta-tfidf", "tfidf", "3feats", "tfidf+3feats"],
    )
    p.add_argument("--model", default="svm", choices=["svm", "nb", "knn"])
    p.add_argument("--min-freq", type=int, default=0)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_train)

    p = sub.add_parser("predict", help="label documents with a trained model")
    p.add_argument("--model", required=True, help="directory written by train")
    p.add_argument("--corpus", required=True)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_predict)

    p = sub.add_parser("evaluate", help="k-fold cross-validation of a pipeline")
    p.add_argument("--pipeline", required=True, help="pipeline config JSON")
    p.add_argument("--corpus", required=True)
    p.add_argument("--conllu")
    p.add_argument("--folds", type=int, default=10)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--nested", action="store_true")
    p.add_argument("--min-freq", type=int, default=None)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_evaluate)

    p = sub.add_parser("report", help="figures + tables from a summary")
    p.add_argument("--summary", required=True)
    p.add_argument("--compare")
    p.add_argument("--outdir", required=True)
    p.set_defaults(func=cmd_report)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.threads:
        os.environ.setdefault("OMP_NUM_THREADS", str(args.threads))
    try:
        return args.func(args)
    except (CorpusFormatError, FileNotFoundError, ValueError) as exc:
        print(f"sentkit: data error: {exc}", file=sys.stderr)
        return DATA_ERROR
    except NumericError as exc:
        print(f"sentkit: numeric failure: {exc}", file=sys.stderr)
        return NUMERIC_ERROR


if __name__ == "__main__":
    sys.exit(main())
