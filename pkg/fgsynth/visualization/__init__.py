"""PNG grids and report tables."""

from .image_grid import (
    composite_grid,
    inversion_quadruplet,
    quadruplet_grid,
    save_composite_grid,
    save_inversion_quadruplet,
    save_quadruplets,
)
from .report_table import COLUMNS, to_markdown, write_csv, write_markdown

__all__ = [
    'composite_grid',
    'inversion_quadruplet',
    'quadruplet_grid',
    'save_composite_grid',
    'save_inversion_quadruplet',
    'save_quadruplets',
    'COLUMNS',
    'to_markdown',
    'write_csv',
    'write_markdown',
]
