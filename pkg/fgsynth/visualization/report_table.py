"""Evaluation reports as CSV and Markdown tables."""

import csv
from pathlib import Path
from typing import Dict, List, Sequence

from core.models.reports import EvaluationReport

COLUMNS = ('Setting', 'IoU(fg/bg)', 'mIoU', 'recall', 'precision', 'F1', 'Accuracy',
           'PixelAccuracy', 'FD', 'psi', 'threshold', 'averaging', 'n_samples')


def report_row(report: EvaluationReport, setting: str = '') -> Dict[str, str]:
    s = report.segmentation
    return {
        'Setting': setting,
        'IoU(fg/bg)': f"{s.iou_fg:.4f}/{s.iou_bg:.4f}",
        'mIoU': f"{s.miou:.4f}",
        'recall': f"{s.recall:.4f}",
        'precision': f"{s.precision:.4f}",
        'F1': f"{s.f1:.4f}",
        'Accuracy': f"{s.accuracy:.4f}",
        'PixelAccuracy': f"{s.pixel_accuracy:.4f}",
        'FD': '' if report.frechet is None else f"{report.frechet:.4f}",
        'psi': f"{report.psi:g}",
        'threshold': f"{report.threshold:g}",
        'averaging': report.averaging,
        'n_samples': str(report.n_samples),
    }


def write_csv(reports: Sequence[EvaluationReport], path, settings: Sequence[str] = ()) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, 'w', newline='') as f:
        writer = csv.DictWriter(f, fieldnames=COLUMNS)
        writer.writeheader()
        for row in _rows(reports, settings):
            writer.writerow(row)
    return path


def to_markdown(reports: Sequence[EvaluationReport], settings: Sequence[str] = ()) -> str:
    lines = ['| ' + ' | '.join(COLUMNS) + ' |', '|' + '---|' * len(COLUMNS)]
    for row in _rows(reports, settings):
        lines.append('| ' + ' | '.join(row[c] for c in COLUMNS) + ' |')
    return '\n'.join(lines) + '\n'


def write_markdown(reports: Sequence[EvaluationReport], path, settings: Sequence[str] = ()) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(to_markdown(reports, settings))
    return path


def _rows(reports: Sequence[EvaluationReport], settings: Sequence[str]) -> List[Dict[str, str]]:
    labels = list(settings) + [''] * (len(reports) - len(settings))
    return [report_row(r, label) for r, label in zip(reports, labels)]
