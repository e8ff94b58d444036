"""Dataset ingestion and the synthetic oracle dataset."""

from .folder_dataset import FolderImageDataset, WraparoundBatchSampler, batch_stream, build_dataset, load_folder
from .oracle_dataset import (
    OracleDataset,
    generate_oracle_dataset,
    load_oracle_directory,
    oracle_segment,
    persist_oracle_dataset,
    render_oracle_sample,
)

__all__ = [
    'FolderImageDataset',
    'WraparoundBatchSampler',
    'batch_stream',
    'build_dataset',
    'load_folder',
    'OracleDataset',
    'generate_oracle_dataset',
    'load_oracle_directory',
    'oracle_segment',
    'persist_oracle_dataset',
    'render_oracle_sample',
]
