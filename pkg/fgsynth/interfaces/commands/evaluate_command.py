"""``evaluate``: mask metrics and Fréchet distance, as CSV / Markdown / JSON."""

import json
import logging

from interfaces.commands.common import add_device_argument, device_from_args, output_dir
from services.checkpoint_service import load_generator
from services.evaluation_service import (
    DEFAULT_SAMPLES,
    GT_SOURCES,
    evaluate_generator,
    evaluate_oracle,
    evaluate_oracle_directory,
)
from visualization.report_table import to_markdown, write_csv, write_markdown

logger = logging.getLogger(__name__)


def register_evaluate_command(subparsers) -> None:
    parser = subparsers.add_parser('evaluate', help='Score generated masks and images')
    source = parser.add_mutually_exclusive_group(required=True)
    source.add_argument('--checkpoint', help='Checkpoint to evaluate')
    source.add_argument('--oracle', type=int, metavar='RESOLUTION',
                        help='Score oracle samples with their own mattes as the model output')
    source.add_argument('--oracle-dir', help='Score a dataset written by the oracle subcommand')
    parser.add_argument('--n', type=int, default=DEFAULT_SAMPLES, help='Number of samples')
    parser.add_argument('--psi', type=float, nargs='+', default=[1.0], help='Truncation values')
    parser.add_argument('--threshold', type=float, nargs='+', default=[0.5], help='Mask thresholds')
    parser.add_argument('--averaging', choices=['micro', 'macro'], default='micro')
    parser.add_argument('--gt', choices=GT_SOURCES, default=None,
                        help='Ground truth (default: oracle for --oracle, palette otherwise)')
    parser.add_argument('--mask-dir', help='External masks for --gt directory')
    parser.add_argument('--no-frechet', action='store_true', help='Skip the Fréchet distance')
    parser.add_argument('--seed', type=int, default=0)
    parser.add_argument('--out', required=True, help='Output directory')
    add_device_argument(parser)
    parser.set_defaults(handler=run_evaluate)


def run_evaluate(args) -> None:
    reports, settings = [], []
    if args.oracle:
        for threshold in args.threshold:
            reports.append(evaluate_oracle(args.n, args.oracle, args.seed, threshold, args.averaging,
                                           args.gt or 'oracle'))
            settings.append(f"oracle t={threshold:g}")
    elif args.oracle_dir:
        for threshold in args.threshold:
            reports.append(evaluate_oracle_directory(args.oracle_dir, threshold, args.averaging,
                                                     args.gt or 'palette', args.mask_dir))
            settings.append(f"stored oracle t={threshold:g}")
    else:
        generator, config = load_generator(args.checkpoint, device_from_args(args))
        for psi in args.psi:
            for threshold in args.threshold:
                reports.append(evaluate_generator(
                    generator, config, n_samples=args.n, psi=psi, threshold=threshold,
                    averaging=args.averaging, gt_source=args.gt or 'palette', mask_dir=args.mask_dir,
                    seed=args.seed, frechet=not args.no_frechet,
                ))
                settings.append(f"psi={psi:g} t={threshold:g}")

    out = output_dir(args.out)
    write_csv(reports, out / 'report.csv', settings)
    write_markdown(reports, out / 'report.md', settings)
    (out / 'report.json').write_text(json.dumps([r.to_dict() for r in reports], indent=2))
    logger.info(f"Evaluation report:\n{to_markdown(reports, settings)}")
