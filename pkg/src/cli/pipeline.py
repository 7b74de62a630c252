"""
emrQA toolkit command line
One executable, one subcommand per pipeline stage. Every run writes a
manifest beside its outputs so it can be replayed byte for byte.

Usage:
    python main.py generate --notes n.json --templates t.json --annotations a.json --out d.json
    python main.py split --in d.json --ratios 0.7,0.1,0.2 --seed 1 --out-dir splits/
    python main.py --help

Exit codes: 0 success, 1 data/I-O error, 2 usage error.
"""

import argparse
import logging
import sys
from pathlib import Path
from typing import Any, Dict, List, Optional, Sequence

import pandas as pd

from src import __version__
from src.augmentation import augment_dataset, build_lexicon, load_knowledge_base, load_lexicon
from src.corpus import (
    dataset_stats,
    load_dataset,
    load_notes,
    sample_distinct_answers,
    sample_questions,
    sample_rate_grid,
    save_dataset,
    split_by_documents,
    split_stats,
)
from src.corpus.splitting import SPLIT_NAMES
from src.evaluation import (
    answers_as_predictions,
    difficulty_distribution,
    evaluate_by_group,
    evaluate_predictions,
    label_questions,
    load_predictions,
    load_scores,
    partition_difficulty,
    save_report,
)
from src.generation import generate_dataset, load_annotations, load_templates
from src.knowledge import (
    TransEConfig,
    WordVectors,
    evaluate_link_prediction,
    init_kim_params,
    load_embedding_table,
    load_kim_params,
    save_embedding_table,
    save_kim_params,
    save_loss_trace,
    train_transe,
)
from src.reader import KnowledgeResources, ReaderConfig, predict_dataset
from src.segmentation import load_header_lexicon, shorten_dataset
from src.utils.config import (
    KIM_ACTIVATION,
    MAX_ANSWER_TOKENS,
    SAMPLE_RATE_GRIDS,
    SPLIT_RATIOS,
    TRANSE_BATCH_SIZE,
    TRANSE_DIM,
    TRANSE_EPOCHS,
    TRANSE_LEARNING_RATE,
    TRANSE_MARGIN,
    TRANSE_NORM,
    WORD_VECTOR_DIM,
    parse_ratios,
    setup_logging,
)
from src.utils.errors import DimensionMismatchError, ToolkitError
from src.utils.io import ArtifactSaver, dumps_json, read_json

from .manifest import build_manifest, changed_inputs, load_manifest, manifest_path_for, write_manifest

logger = logging.getLogger(__name__)

# args attributes that describe the command rather than configure it
INTERNAL_KEYS = {'handler', 'inputs', 'outputs', 'output_dir', 'command', 'log_level'}

EPILOG = """
Examples:
  python main.py generate --notes n.json --templates t.json --annotations a.json \\
                          --max-answer-tokens 20 --out d.json
  python main.py split    --in d.json --ratios 0.7,0.1,0.2 --seed 1 --out-dir splits/
  python main.py sample   --in splits/train.json --rate 0.2 --seed 3 --out train_20.json
  python main.py sample   --in splits/train.json --grid medication --seed 3 --out train.json
  python main.py segment  --in d.json --out d_sections.json
  python main.py augment  --in d.json --kb-entities kb.json --seed 7 --out d_aug.json
  python main.py kge-train --kb-entities kb.json --kb-triples kb.tsv --seed 7 --out-dir kge/
  python main.py fuse     --embeddings kge/embeddings.tsv --word-dim 50 --seed 7 --out kim.npz
  python main.py read     --in d.json --seed 7 --out pred.json
  python main.py evaluate --pred pred.json --gold d.json --out report.json
  python main.py difficulty --scores scores.csv --gold d.json --out labels.json
  python main.py stats    --in d.json
  python main.py replay   --manifest report.json.manifest.json
"""


class UsageError(Exception):
    """Flag combination argparse cannot express"""


def _ratios(text: str):
    try:
        return parse_ratios(text)
    except ValueError as e:
        raise argparse.ArgumentTypeError(str(e)) from e


# ============================================================================
# SUBCOMMAND HANDLERS
# Each returns the list of files it wrote.
# ============================================================================

def cmd_generate(args) -> List[Path]:
    notes = load_notes(args.notes)
    templates = load_templates(args.templates)
    annotations = load_annotations(args.annotations)
    dataset = generate_dataset(notes, templates, annotations, args.max_answer_tokens)
    return [save_dataset(dataset, args.out)]


def cmd_split(args) -> List[Path]:
    dataset = load_dataset(args.input)
    splits = dict(zip(SPLIT_NAMES, split_by_documents(dataset, args.ratios, args.seed)))
    out_dir = Path(args.out_dir)

    written = [save_dataset(split, out_dir / f"{name}.json") for name, split in splits.items()]
    table = split_stats(splits)
    logger.info(f"📊 Split statistics:\n{table.to_string(index=False)}")
    written.append(ArtifactSaver.save_csv(table, out_dir / 'split_stats.csv'))
    return written


def cmd_sample(args) -> List[Path]:
    dataset = load_dataset(args.input)
    if args.grid is not None:
        out = Path(args.out)
        grid = sample_rate_grid(dataset, SAMPLE_RATE_GRIDS[args.grid], args.seed)
        return [
            save_dataset(sampled, out.with_name(f"{out.stem}_{round(rate * 100):02d}pct{out.suffix}"))
            for rate, sampled in grid.items()
        ]
    if args.distinct is not None:
        sampled = sample_distinct_answers(dataset, args.distinct, args.seed)
    else:
        sampled = sample_questions(dataset, args.rate, args.seed)
    return [save_dataset(sampled, args.out)]


def cmd_segment(args) -> List[Path]:
    dataset = load_dataset(args.input)
    shortened = shorten_dataset(dataset, load_header_lexicon(args.header_lexicon))
    return [save_dataset(shortened, args.out)]


def _lexicon(args, kb=None) -> Dict[str, str]:
    if args.lexicon:
        return load_lexicon(args.lexicon)
    if kb is None:
        kb = load_knowledge_base(args.kb_entities)
    return build_lexicon(kb)


def cmd_augment(args) -> List[Path]:
    dataset = load_dataset(args.input)
    kb = load_knowledge_base(args.kb_entities, args.kb_triples)
    augmented = augment_dataset(dataset, kb, _lexicon(args, kb), args.seed, expand=args.expand)
    return [save_dataset(augmented, args.out)]


def cmd_kge_train(args) -> List[Path]:
    kb = load_knowledge_base(args.kb_entities, args.kb_triples)
    config = TransEConfig(
        dim=args.dim,
        margin=args.margin,
        learning_rate=args.lr,
        epochs=args.epochs,
        batch_size=args.batch_size,
        norm=args.norm,
        seed=args.seed,
    )
    emb = train_transe(kb.triples, kb.entity_ids, config, progress=True)
    metrics = evaluate_link_prediction(emb, kb.triples, filtered=True)
    logger.info(
        f"📊 Link prediction (train, filtered): MRR={metrics['mrr']:.4f} "
        f"hits@10={metrics['hits@10']:.4f}"
    )

    out_dir = Path(args.out_dir)
    return [
        save_embedding_table(emb, out_dir / 'embeddings.tsv'),
        save_loss_trace(emb.loss_trace, out_dir / 'loss_trace.csv'),
        ArtifactSaver.save_json({'config': config.to_dict(), **metrics}, out_dir / 'link_prediction.json'),
    ]


def cmd_fuse(args) -> List[Path]:
    emb = load_embedding_table(args.embeddings)
    word_dim = args.word_dim
    if args.word_vectors:
        word_dim = WordVectors.from_tsv(args.word_vectors).dim
    params = init_kim_params(
        d=args.dim or word_dim, d1=word_dim, d2=emb.dim, seed=args.seed, activation=args.activation
    )
    logger.info(f"🧠 Fusion layer: d={params.d} d1={params.d1} d2={params.d2} σ={params.activation}")
    return [save_kim_params(params, args.out)]


def cmd_read(args) -> List[Path]:
    dataset = load_dataset(args.input)
    if args.mode == 'lexical':
        config, resources = ReaderConfig(), None
    else:
        if not (args.embeddings and args.kim_params and (args.lexicon or args.kb_entities)):
            raise UsageError(
                "lexical+knowledge mode needs --embeddings, --kim-params and --lexicon or --kb-entities"
            )
        params = load_kim_params(args.kim_params)
        if args.word_vectors:
            word_vectors = WordVectors.from_tsv(args.word_vectors, seed=args.seed)
            if word_vectors.dim != params.d1:
                raise DimensionMismatchError(
                    f"word vectors have dim {word_vectors.dim}, fusion layer expects {params.d1}"
                )
        else:
            word_vectors = WordVectors.random(params.d1, args.seed)
        config = ReaderConfig(mode='lexical+knowledge', embedding_weight=args.embedding_weight)
        resources = KnowledgeResources(
            embeddings=load_embedding_table(args.embeddings),
            params=params,
            lexicon=_lexicon(args),
            word_vectors=word_vectors,
        )

    predictions = predict_dataset(dataset, config, resources, progress=True)
    return [ArtifactSaver.save_json(predictions, args.out)]


def cmd_evaluate(args) -> List[Path]:
    gold = load_dataset(args.gold)
    if args.pred is not None:
        predictions = load_predictions(args.pred)
    else:
        predictions = answers_as_predictions(load_dataset(args.pred_dataset))

    report = evaluate_predictions(predictions, gold)
    written = [save_report(report, args.out)]

    if args.scores_out:
        column = 0 if args.score_metric == 'em' else 1
        scores = pd.DataFrame(
            [(qid, float(s[column])) for qid, s in report.per_question.items()],
            columns=['question_id', 'score'],
        )
        written.append(ArtifactSaver.save_csv(scores, args.scores_out))

    if args.labels:
        if not args.groups_out:
            raise UsageError("--labels needs --groups-out")
        labels = read_json(args.labels)
        question_labels = labels.get('questions', labels) if isinstance(labels, dict) else {}
        table = evaluate_by_group(report, question_labels)
        logger.info(f"📊 By group:\n{table.to_string(index=False)}")
        written.append(ArtifactSaver.save_csv(table, args.groups_out))
    return written


def cmd_difficulty(args) -> List[Path]:
    gold = load_dataset(args.gold)
    template_of = {qa.question_id: qa.template_id for qa in gold.qa_pairs if qa.template_id is not None}
    scores = load_scores(args.scores)

    template_labels = partition_difficulty(scores, template_of)
    question_labels = label_questions(template_labels, template_of)
    distribution = difficulty_distribution(question_labels)
    logger.info(f"📊 Difficulty distribution:\n{distribution.to_string(index=False)}")

    payload = {
        'templates': template_labels,
        'questions': question_labels,
        'distribution': distribution.to_dict(orient='records'),
    }
    return [ArtifactSaver.save_json(payload, args.out)]


def cmd_stats(args) -> List[Path]:
    report = dataset_stats(load_dataset(args.input)).to_dict()
    if args.out is None:
        sys.stdout.write(dumps_json(report))
        return []
    return [ArtifactSaver.save_json(report, args.out)]


# ============================================================================
# PARSER
# ============================================================================

def _add_seed(parser: argparse.ArgumentParser, required: bool) -> None:
    if required:
        help_text = 'Base random seed (required)'
    else:
        help_text = ('Base random seed; this subcommand draws no random numbers, '
                     'so it is only written to the run manifest')
    parser.add_argument('--seed', type=int, required=required, default=None, help=help_text)


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument('--log-level', default=None, help='DEBUG, INFO, WARNING... (default: EMRQA_LOG_LEVEL)')

    parser = argparse.ArgumentParser(
        prog='emrqa',
        description='Clinical reading-comprehension corpus toolkit',
        formatter_class=argparse.RawDescriptionHelpFormatter,
        epilog=EPILOG,
    )
    parser.add_argument('--version', action='version', version=f'%(prog)s {__version__}')
    sub = parser.add_subparsers(dest='command', required=True, metavar='<subcommand>')

    def add(name: str, help_text: str, handler, inputs=(), outputs=(), output_dir=None):
        p = sub.add_parser(name, help=help_text, parents=[common])
        p.set_defaults(handler=handler, inputs=list(inputs), outputs=list(outputs), output_dir=output_dir)
        return p

    # generate
    p = add('generate', 'Instantiate templates over annotated notes', cmd_generate,
            inputs=['notes', 'templates', 'annotations'], outputs=['out'])
    p.add_argument('--notes', required=True, help='Notes JSON')
    p.add_argument('--templates', required=True, help='Templates JSON')
    p.add_argument('--annotations', required=True, help='Annotations JSON')
    p.add_argument('--max-answer-tokens', type=int, default=MAX_ANSWER_TOKENS,
                   help=f'Drop longer answers (default: {MAX_ANSWER_TOKENS})')
    p.add_argument('--out', required=True, help='Output corpus JSON')
    _add_seed(p, required=False)

    # split
    p = add('split', 'Document-level train/dev/test split', cmd_split,
            inputs=['input'], output_dir='out_dir')
    p.add_argument('--in', dest='input', required=True, help='Corpus JSON')
    p.add_argument('--ratios', type=_ratios, default=SPLIT_RATIOS,
                   help='train,dev,test proportions (default: %(default)s)')
    p.add_argument('--out-dir', required=True, help='Directory for train/dev/test JSON')
    _add_seed(p, required=True)

    # sample
    p = add('sample', 'Per-note question sampling', cmd_sample, inputs=['input'], outputs=['out'])
    p.add_argument('--in', dest='input', required=True, help='Corpus JSON')
    how = p.add_mutually_exclusive_group(required=True)
    how.add_argument('--rate', type=float, help='Fraction of QA pairs kept per note')
    how.add_argument('--distinct', type=int, help='Draw N QA pairs with pairwise distinct answers')
    how.add_argument('--grid', choices=sorted(SAMPLE_RATE_GRIDS),
                     help='Sample every rate of a redundancy grid (<out>_<pct>pct.json per rate)')
    p.add_argument('--out', required=True, help='Output corpus JSON')
    _add_seed(p, required=True)

    # segment
    p = add('segment', 'Shorten contexts to answer-bearing sections', cmd_segment,
            inputs=['input', 'header_lexicon'], outputs=['out'])
    p.add_argument('--in', dest='input', required=True, help='Corpus JSON')
    p.add_argument('--header-lexicon', default=None, help='Header phrase list (default: shipped lexicon)')
    p.add_argument('--out', required=True, help='Output corpus JSON')
    _add_seed(p, required=False)

    # augment
    p = add('augment', 'Synonym substitution of question entities', cmd_augment,
            inputs=['input', 'kb_entities', 'kb_triples', 'lexicon'], outputs=['out'])
    p.add_argument('--in', dest='input', required=True, help='Corpus JSON')
    p.add_argument('--kb-entities', required=True, help='KB entities JSON')
    p.add_argument('--kb-triples', default=None, help='KB triples TSV')
    p.add_argument('--lexicon', default=None, help='surface<TAB>entity_id TSV (default: built from the KB)')
    p.add_argument('--expand', action='store_true', help='Emit every substitution instead of one')
    p.add_argument('--out', required=True, help='Output corpus JSON')
    _add_seed(p, required=True)

    # kge-train
    p = add('kge-train', 'Train TransE embeddings on a KB', cmd_kge_train,
            inputs=['kb_entities', 'kb_triples'], output_dir='out_dir')
    p.add_argument('--kb-entities', required=True, help='KB entities JSON')
    p.add_argument('--kb-triples', required=True, help='KB triples TSV')
    p.add_argument('--dim', type=int, default=TRANSE_DIM, help='Embedding size (default: %(default)s)')
    p.add_argument('--margin', type=float, default=TRANSE_MARGIN, help='Hinge margin (default: %(default)s)')
    p.add_argument('--lr', type=float, default=TRANSE_LEARNING_RATE, help='Learning rate (default: %(default)s)')
    p.add_argument('--epochs', type=int, default=TRANSE_EPOCHS, help='Epochs (default: %(default)s)')
    p.add_argument('--batch-size', type=int, default=TRANSE_BATCH_SIZE, help='Batch size (default: %(default)s)')
    p.add_argument('--norm', choices=['L1', 'L2'], default=TRANSE_NORM, help='Distance norm (default: %(default)s)')
    p.add_argument('--out-dir', required=True, help='Directory for embeddings, loss trace and metrics')
    _add_seed(p, required=True)

    # fuse
    p = add('fuse', 'Initialise fusion-layer parameters', cmd_fuse,
            inputs=['embeddings', 'word_vectors'], outputs=['out'])
    p.add_argument('--embeddings', required=True, help='Embedding table TSV')
    p.add_argument('--word-vectors', default=None, help='Word vector TSV (sets the word dimension)')
    p.add_argument('--word-dim', type=int, default=WORD_VECTOR_DIM, help='Word vector size (default: %(default)s)')
    p.add_argument('--dim', type=int, default=None, help='Output size (default: word dimension)')
    p.add_argument('--activation', choices=['tanh', 'relu', 'identity'], default=KIM_ACTIVATION,
                   help='Activation (default: %(default)s)')
    p.add_argument('--out', required=True, help='Parameter file (.npz)')
    _add_seed(p, required=True)

    # read
    p = add('read', 'Baseline evidence-line reader', cmd_read,
            inputs=['input', 'embeddings', 'kim_params', 'lexicon', 'kb_entities', 'word_vectors'],
            outputs=['out'])
    p.add_argument('--in', dest='input', required=True, help='Corpus JSON')
    p.add_argument('--mode', choices=['lexical', 'lexical+knowledge'], default='lexical')
    p.add_argument('--embedding-weight', type=float, default=0.5,
                   help='λ for lexical+knowledge mode (default: %(default)s)')
    p.add_argument('--embeddings', default=None, help='Embedding table TSV')
    p.add_argument('--kim-params', default=None, help='Fusion parameters (.npz)')
    p.add_argument('--lexicon', default=None, help='surface<TAB>entity_id TSV')
    p.add_argument('--kb-entities', default=None, help='KB entities JSON (lexicon source)')
    p.add_argument('--word-vectors', default=None, help='Word vector TSV (default: seeded random)')
    p.add_argument('--out', required=True, help='Predictions JSON')
    _add_seed(p, required=True)

    # evaluate
    p = add('evaluate', 'EM / F1 of predictions against a gold corpus', cmd_evaluate,
            inputs=['pred', 'pred_dataset', 'gold', 'labels'], outputs=['out', 'scores_out', 'groups_out'])
    pred = p.add_mutually_exclusive_group(required=True)
    pred.add_argument('--pred', help='Predictions JSON (question_id -> answer)')
    pred.add_argument('--pred-dataset', help='Corpus whose answers are scored as predictions (agreement)')
    p.add_argument('--gold', required=True, help='Gold corpus JSON')
    p.add_argument('--out', required=True, help='Report JSON')
    p.add_argument('--scores-out', default=None, help='Per-question question_id,score CSV')
    p.add_argument('--score-metric', choices=['em', 'f1'], default='f1', help='Score written to --scores-out')
    p.add_argument('--labels', default=None, help='Difficulty labels JSON (from the difficulty subcommand)')
    p.add_argument('--groups-out', default=None, help='Per-group EM/F1 CSV')
    _add_seed(p, required=False)

    # difficulty
    p = add('difficulty', 'Easy/Hard template split from per-question scores', cmd_difficulty,
            inputs=['scores', 'gold'], outputs=['out'])
    p.add_argument('--scores', required=True, help='question_id,score CSV')
    p.add_argument('--gold', required=True, help='Corpus JSON (question -> template)')
    p.add_argument('--out', required=True, help='Labels JSON')
    _add_seed(p, required=False)

    # stats
    p = add('stats', 'Corpus statistics', cmd_stats, inputs=['input'], outputs=['out'])
    p.add_argument('--in', dest='input', required=True, help='Corpus JSON')
    p.add_argument('--out', default=None, help='Stats JSON (default: stdout)')
    _add_seed(p, required=False)

    # replay
    p = sub.add_parser('replay', help='Re-run the command recorded in a manifest', parents=[common])
    p.add_argument('--manifest', required=True, help='Manifest JSON')
    return parser


# ============================================================================
# ENTRY POINTS
# ============================================================================

def _config_of(args) -> Dict[str, Any]:
    return {k: v for k, v in sorted(vars(args).items()) if k not in INTERNAL_KEYS}


def _write_run_manifest(args, argv: Sequence[str], written: List[Path]) -> Optional[Path]:
    if args.output_dir:
        target = manifest_path_for(getattr(args, args.output_dir), is_dir=True)
    else:
        primary = next((getattr(args, o) for o in args.outputs if getattr(args, o, None)), None)
        if primary is None:
            return None
        target = manifest_path_for(primary, is_dir=False)

    inputs = [str(getattr(args, i)) for i in args.inputs if getattr(args, i, None)]
    manifest = build_manifest(
        subcommand=args.command,
        argv=list(argv),
        config=_config_of(args),
        seed=getattr(args, 'seed', None),
        inputs=inputs,
        outputs=[str(p) for p in written],
    )
    return write_manifest(manifest, target)


def run(argv: Optional[Sequence[str]] = None) -> int:
    """
    Parse argv and execute one subcommand

    Returns:
        0 on success, 1 on data or I/O errors, 2 on usage errors
    """
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return e.code if isinstance(e.code, int) else (0 if e.code is None else 2)

    setup_logging(args.log_level)
    if args.command == 'replay':
        return replay(args.manifest)

    logger.info("=" * 70)
    logger.info(f"🚀 emrqa {args.command}")
    logger.info("=" * 70)

    try:
        written = args.handler(args)
        _write_run_manifest(args, argv, written)
    except UsageError as e:
        logger.error(f"❌ {args.command}: {e}")
        return 2
    except (ToolkitError, OSError, ValueError) as e:
        logger.error(f"❌ {args.command} failed: {e}")
        return 1

    logger.info(f"✅ {args.command} done ({len(written)} files)")
    return 0


def replay(manifest_path) -> int:
    """
    Re-run the argv recorded in a manifest

    Returns:
        Exit code of the replayed run (1 when the manifest is unreadable)
    """
    try:
        manifest = load_manifest(manifest_path)
    except (ToolkitError, OSError) as e:
        logger.error(f"❌ Cannot replay {manifest_path}: {e}")
        return 1

    changed = changed_inputs(manifest)
    if changed:
        logger.warning(f"⚠️ Inputs changed since the recorded run: {changed}")

    logger.info(f"🔁 Replaying {manifest.subcommand} from {manifest_path}")
    return run(manifest.argv)


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
