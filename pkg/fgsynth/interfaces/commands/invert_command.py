"""``invert``: segment real images by latent optimization."""

import json
import logging
from pathlib import Path

from interfaces.commands.common import add_checkpoint_argument, add_device_argument, device_from_args, output_dir
from services.checkpoint_service import load_generator
from services.inversion_service import DEFAULT_STEPS, SPACES, invert
from utils.image_io import list_images, load_image, save_mask
from visualization.image_grid import save_inversion_quadruplet

logger = logging.getLogger(__name__)


def register_invert_command(subparsers) -> None:
    parser = subparsers.add_parser('invert', help='Invert images and read off their masks')
    add_checkpoint_argument(parser)
    parser.add_argument('--images', nargs='+', required=True, help='Image files or folders')
    parser.add_argument('--steps', type=int, default=DEFAULT_STEPS)
    parser.add_argument('--lr', type=float, default=0.1)
    parser.add_argument('--space', choices=SPACES, default='w')
    parser.add_argument('--center-crop', action='store_true')
    parser.add_argument('--out', required=True, help='Output directory')
    add_device_argument(parser)
    parser.set_defaults(handler=run_invert)


def expand_image_paths(entries):
    paths = []
    for entry in entries:
        entry = Path(entry)
        paths.extend(list_images(entry) if entry.is_dir() else [entry])
    return paths


def run_invert(args) -> None:
    generator, _ = load_generator(args.checkpoint, device_from_args(args))
    out = output_dir(args.out)
    results = []
    for path in expand_image_paths(args.images):
        image = load_image(path, generator.resolution, args.center_crop).unsqueeze(0)
        result = invert(image, generator, steps=args.steps, lr=args.lr, space=args.space)
        save_inversion_quadruplet(result, image, out / f"{path.stem}_inversion.png")
        save_mask(result.mask[0], out / f"{path.stem}_mask.png")
        results.append({'image': str(path), 'loss': result.loss, 'low_confidence': result.low_confidence})
        logger.info(f"{path.name}: loss {result.loss:.4f}{' (low confidence)' if result.low_confidence else ''}")
    with open(out / 'results.jsonl', 'w') as f:
        for record in results:
            f.write(json.dumps(record) + '\n')
