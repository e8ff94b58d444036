"""``composite``: cross N foregrounds with M backgrounds into an N x M grid."""

import logging

import torch

from core.exceptions import ContractViolationError
from core.imaging import cross_composite
from interfaces.commands.common import add_device_argument, device_from_args
from services.checkpoint_service import load_generator
from utils.image_io import image_size, list_images, load_image, load_mask
from visualization.image_grid import save_composite_grid

logger = logging.getLogger(__name__)


def register_composite_command(subparsers) -> None:
    parser = subparsers.add_parser('composite', help='Place every foreground over every background')
    parser.add_argument('--fg', help='Folder of foreground images (file mode)')
    parser.add_argument('--masks', help='Folder of masks, one per foreground, same order (file mode)')
    parser.add_argument('--bg', help='Folder of background images (file mode)')
    parser.add_argument('--checkpoint', help='Generate foregrounds and backgrounds from this checkpoint instead')
    parser.add_argument('--rows', type=int, default=4, help='Foregrounds in checkpoint mode')
    parser.add_argument('--cols', type=int, default=4, help='Backgrounds in checkpoint mode')
    parser.add_argument('--psi', type=float, default=1.0)
    parser.add_argument('--seed', type=int, default=0)
    parser.add_argument('--out', required=True, help='Output PNG')
    add_device_argument(parser)
    parser.set_defaults(handler=run_composite)


def load_layers_from_files(fg_dir, mask_dir, bg_dir):
    """Decode the three folders; every file must share one square size."""
    fg_files, mask_files, bg_files = list_images(fg_dir), list_images(mask_dir), list_images(bg_dir)
    if len(fg_files) != len(mask_files):
        raise ContractViolationError(
            f"{len(fg_files)} foregrounds but {len(mask_files)} masks",
            details={'foregrounds': len(fg_files), 'masks': len(mask_files)},
        )
    sizes = {str(f): image_size(f) for f in fg_files + mask_files + bg_files}
    distinct = set(sizes.values())
    if len(distinct) != 1:
        raise ContractViolationError(
            f"Images differ in size: {sorted(distinct)}", details={'sizes': sizes}
        )
    width, height = distinct.pop()
    if width != height:
        raise ContractViolationError(f"Images must be square, got {width}x{height}")
    fg = torch.stack([load_image(f, width) for f in fg_files])
    masks = torch.stack([load_mask(f, width) for f in mask_files])
    bg = torch.stack([load_image(f, width) for f in bg_files])
    return fg, masks, bg


@torch.no_grad()
def generate_layers(args):
    """Foregrounds with masks from ``rows`` latents and backgrounds from ``cols`` other latents."""
    generator, config = load_generator(args.checkpoint, device_from_args(args))
    if args.psi < 1.0 and not bool(generator.foreground.w_avg_ready):
        generator.update_mean_styles(config.truncation_samples, seed=config.seed)
    rng = torch.Generator().manual_seed(args.seed)
    fg_latents = generator.sample_latents(args.rows, rng)
    bg_latents = generator.sample_latents(args.cols, rng)
    fg, features = generator.generate_foreground(fg_latents, psi=args.psi, noise_mode='const')
    masks = generator.generate_mask(features).mask
    bg = generator.generate_background(bg_latents, psi=args.psi, noise_mode='const')
    return fg.cpu(), masks.cpu(), bg.cpu()


def run_composite(args) -> None:
    if args.checkpoint:
        fg, masks, bg = generate_layers(args)
    elif args.fg and args.masks and args.bg:
        fg, masks, bg = load_layers_from_files(args.fg, args.masks, args.bg)
    else:
        raise ContractViolationError('composite needs --checkpoint or all of --fg, --masks and --bg')
    cross = cross_composite(fg, masks, bg)
    path = save_composite_grid(cross, args.out, foregrounds=fg, backgrounds=bg)
    logger.info(f"Wrote {cross.shape[0]}x{cross.shape[1]} composite grid to {path}")
