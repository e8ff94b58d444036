"""``generate``: write fg / bg / mask / composite quadruplets from a checkpoint."""

import logging

import torch

from core.models.latent import LatentCode
from generators.style_generator import STYLE_BANDS
from interfaces.commands.common import add_checkpoint_argument, add_device_argument, device_from_args, output_dir
from services.checkpoint_service import load_generator
from utils.image_io import save_image, save_mask
from visualization.image_grid import save_quadruplets

logger = logging.getLogger(__name__)


def register_generate_command(subparsers) -> None:
    parser = subparsers.add_parser('generate', help='Sample layered images from a checkpoint')
    add_checkpoint_argument(parser)
    parser.add_argument('--n', type=int, default=8, help='Number of samples')
    parser.add_argument('--psi', type=float, default=1.0, help='Truncation in (0, 1]')
    parser.add_argument('--seed', type=int, default=0)
    parser.add_argument('--out', required=True, help='Output directory')
    parser.add_argument('--mix', nargs='+', choices=STYLE_BANDS,
                        help='Take these style bands of the foreground from a second latent set')
    parser.add_argument('--interpolate', type=int, metavar='K',
                        help='Also write K steps between two foreground latents')
    add_device_argument(parser)
    parser.set_defaults(handler=run_generate)


def write_sample_files(sample, directory, prefix: str = '') -> None:
    for i in range(sample.composite.shape[0]):
        stem = directory / f"{prefix}{i:06d}"
        save_image(sample.foreground[i], f"{stem}_fg.png")
        save_image(sample.background[i], f"{stem}_bg.png")
        save_mask(sample.masks.mask[i], f"{stem}_mask.png")
        save_image(sample.composite[i], f"{stem}_composite.png")


def interpolation_latents(generator, latents_a: LatentCode, latents_b: LatentCode, steps: int) -> LatentCode:
    """Straight line between the first foreground latents of A and B; background held at A's."""
    alphas = torch.linspace(0, 1, steps, device=latents_a.z_fg.device)[:, None]
    z_a, z_b = latents_a.z_fg[:1], latents_b.z_fg[:1]
    z_fg = z_a + alphas * (z_b - z_a)
    return LatentCode(z_fg=z_fg, z_bg=latents_a.z_bg[:1].expand(steps, -1))


@torch.no_grad()
def run_generate(args) -> None:
    device = device_from_args(args)
    generator, config = load_generator(args.checkpoint, device)
    if args.psi < 1.0 and not bool(generator.foreground.w_avg_ready):
        generator.update_mean_styles(config.truncation_samples, seed=config.seed)
    out = output_dir(args.out)

    latents = generator.sample_latents(args.n, torch.Generator().manual_seed(args.seed))
    sample = generator.synthesize(latents, gamma=1.0, psi=args.psi, noise_mode='const')
    write_sample_files(sample, out)
    save_quadruplets(sample, out / 'quadruplets.png')
    logger.info(f"Wrote {args.n} quadruplets to {out}")

    if args.mix or args.interpolate:
        other = generator.sample_latents(args.n, torch.Generator().manual_seed(args.seed + 1))
    if args.mix:
        mixed = generator.synthesize_mixed(latents, other, args.mix, psi=args.psi)
        source_b = generator.synthesize(other, gamma=1.0, psi=args.psi, noise_mode='const')
        save_quadruplets(source_b, out / 'mix_source_b.png')
        save_quadruplets(mixed, out / f"mix_{'-'.join(args.mix)}.png")
        write_sample_files(mixed, out, prefix='mix_')
        logger.info(f"Wrote style mixing of bands {', '.join(args.mix)}")
    if args.interpolate:
        path = interpolation_latents(generator, latents, other, args.interpolate)
        walk = generator.synthesize(path, gamma=1.0, psi=args.psi, noise_mode='const')
        save_quadruplets(walk, out / 'interpolation.png')
        logger.info(f"Wrote {args.interpolate}-step interpolation")
