"""``train``: run the adversarial training loop into a run directory."""

import logging
import platform
import sys
from datetime import datetime, timezone
from pathlib import Path
from typing import Any, Dict, List

import psutil
import torch

from core.models.train_config import TrainConfig
from interfaces.commands.common import add_device_argument
from interfaces.step_logging import register_step_logging
from services.training_service import TrainingService
from storage.checkpoint_store import load_checkpoint
from storage.run_storage import FileRunStorage
from utils.config_loader import load_train_config, parse_overrides
from utils.env_config import get_runs_dir

logger = logging.getLogger(__name__)


def register_train_command(subparsers) -> None:
    parser = subparsers.add_parser('train', help='Train a layered generator')
    parser.add_argument('--config', help='Flat TOML config file')
    parser.add_argument('--resume', help='Checkpoint to continue from')
    parser.add_argument('--run-dir', help='Run directory (default: $FGSYNTH_RUNS_DIR/<run_name>)')
    parser.add_argument('--seed', type=int, help='Override seed')
    parser.add_argument('--iterations', type=int, help='Override total_iterations')
    parser.add_argument('--batch-size', type=int, help='Override batch_size')
    parser.add_argument('--resolution', type=int, help='Override resolution')
    parser.add_argument('--set', action='append', default=[], metavar='KEY=VALUE',
                        help='Override any config key (repeatable)')
    parser.add_argument('--no-progress', action='store_true', help='Hide the progress bar')
    add_device_argument(parser)
    parser.set_defaults(handler=run_train)


def effective_config(args) -> TrainConfig:
    """Defaults < --config file < --set < dedicated flags."""
    overrides = parse_overrides(args.set)
    flags = {
        'seed': args.seed,
        'total_iterations': args.iterations,
        'batch_size': args.batch_size,
        'resolution': args.resolution,
        'device': args.device,
    }
    overrides.update({key: value for key, value in flags.items() if value is not None})
    return load_train_config(args.config, overrides)


def build_manifest(config: TrainConfig, argv: List[str], resumed_from=None) -> Dict[str, Any]:
    memory = psutil.virtual_memory()
    return {
        'created_at': datetime.now(timezone.utc).isoformat(),
        'argv': list(argv),
        'run_name': config.run_name,
        'seed': config.seed,
        'resumed_from': str(resumed_from) if resumed_from else None,
        'torch_version': torch.__version__,
        'python_version': platform.python_version(),
        'cuda_available': torch.cuda.is_available(),
        'host': {
            'cpu_count': psutil.cpu_count(),
            'memory_total_mb': round(memory.total / 2 ** 20),
        },
    }


def run_train(args) -> None:
    config = effective_config(args)
    run_dir = Path(args.run_dir) if args.run_dir else Path(get_runs_dir()) / config.run_name
    storage = FileRunStorage(run_dir)
    storage.write_config(config.to_dict())
    storage.write_manifest(build_manifest(config, sys.argv, args.resume))
    logger.info(f"Run directory: {run_dir}")

    service = TrainingService(config, storage, show_progress=not args.no_progress)
    register_step_logging(service, config.log_every)
    state = service.restore(load_checkpoint(args.resume)) if args.resume else None
    service.run(state)
