"""Arguments and helpers shared by subcommands."""

from pathlib import Path

from utils.env_config import resolve_device


def add_device_argument(parser) -> None:
    parser.add_argument('--device', choices=['auto', 'cpu', 'cuda'], default=None,
                        help='Compute device (default: config value or FGSYNTH_DEVICE)')


def add_checkpoint_argument(parser, required: bool = True) -> None:
    parser.add_argument('--checkpoint', required=required, help='Checkpoint file (e.g. runs/<name>/checkpoints/latest.pt)')


def device_from_args(args):
    return resolve_device(args.device or 'auto')


def output_dir(path) -> Path:
    path = Path(path)
    path.mkdir(parents=True, exist_ok=True)
    return path
