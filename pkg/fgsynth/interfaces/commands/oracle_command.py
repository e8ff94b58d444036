"""``oracle``: render the synthetic oracle dataset to paired PNGs plus a manifest."""

import logging

from data.oracle_dataset import COVERAGE_BAND, generate_oracle_dataset, persist_oracle_dataset
from interfaces.commands.common import output_dir

logger = logging.getLogger(__name__)


def register_oracle_command(subparsers) -> None:
    parser = subparsers.add_parser('oracle', help='Write oracle images and exact mattes to a directory')
    parser.add_argument('--n', type=int, default=1000, help='Number of samples')
    parser.add_argument('--resolution', type=int, default=64, help='Image side')
    parser.add_argument('--seed', type=int, default=0)
    parser.add_argument('--coverage-band', type=float, nargs=2, default=list(COVERAGE_BAND),
                        metavar=('LOW', 'HIGH'), help='Target mean matte coverage')
    parser.add_argument('--no-progress', action='store_true', help='Hide the progress bar')
    parser.add_argument('--out', required=True, help='Output directory')
    parser.set_defaults(handler=run_oracle)


def run_oracle(args) -> None:
    band = tuple(args.coverage_band)
    samples = generate_oracle_dataset(args.n, args.resolution, args.seed, coverage_band=band,
                                      progress=not args.no_progress)
    directory = persist_oracle_dataset(samples, output_dir(args.out), args.seed, band)
    coverage = sum(s.coverage for s in samples) / len(samples)
    logger.info(f"Oracle dataset: {len(samples)} samples at {args.resolution}px, "
                f"mean coverage {coverage:.3f}, written to {directory}")
