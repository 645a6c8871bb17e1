"""
Statistics Utilities

Aggregates per-function PRE reports into corpus-level figures.
"""

from typing import Any, Dict, List, Sequence

import numpy as np


# Per-function keys printed by ``stats``, in this order
FUNCTION_KEYS = (
    'max_vn', 'width', 'width_ratio', 'insertions', 'replacements',
    'lcse_removed', 'skipped_vns',
)


def report_row(report: Any) -> Dict[str, Any]:
    """Flatten a PreReport into the values ``stats`` prints."""
    return {
        'function': report.function,
        'max_vn': report.max_vn,
        'width': report.width,
        'width_ratio': report.width_ratio,
        'insertions': sum(1 for ins in report.insertions if not ins.fused),
        'replacements': len(report.replacements),
        'lcse_removed': report.lcse_removed,
        'skipped_vns': len(report.skipped_vns),
    }


def summarize_rows(rows: Sequence[Dict[str, Any]]) -> Dict[str, float]:
    """Corpus averages and totals.

    The average width ratio is taken over functions with at least one value
    number, so empty functions do not pull it towards zero.
    """
    if not rows:
        return {'functions': 0, 'avg_width_ratio': 0.0, 'avg_width': 0.0,
                'avg_max_vn': 0.0, 'total_insertions': 0, 'total_replacements': 0,
                'total_lcse_removed': 0, 'total_skipped_vns': 0}

    ratios = np.array([r['width_ratio'] for r in rows if r['max_vn'] > 0], dtype=float)
    widths = np.array([r['width'] for r in rows], dtype=float)
    max_vns = np.array([r['max_vn'] for r in rows], dtype=float)
    return {
        'functions': len(rows),
        'avg_width_ratio': float(np.mean(ratios)) if ratios.size else 0.0,
        'avg_width': float(np.mean(widths)),
        'avg_max_vn': float(np.mean(max_vns)),
        'total_insertions': int(sum(r['insertions'] for r in rows)),
        'total_replacements': int(sum(r['replacements'] for r in rows)),
        'total_lcse_removed': int(sum(r['lcse_removed'] for r in rows)),
        'total_skipped_vns': int(sum(r['skipped_vns'] for r in rows)),
    }


def _format_value(value: Any) -> str:
    if isinstance(value, float):
        return f"{value:.4f}"
    return str(value)


def format_statistics_report(rows: List[Dict[str, Any]], summary: Dict[str, Any],
                             detailed: bool = True) -> str:
    """Render rows and summary as ``key=value`` lines.

    Args:
        rows: One dictionary per function (see ``report_row``)
        summary: Output of ``summarize_rows``
        detailed: Include the per-function lines

    Returns:
        Report text, newline-terminated
    """
    lines = []
    if detailed:
        for row in rows:
            fields = ' '.join(f"{key}={_format_value(row[key])}" for key in FUNCTION_KEYS)
            lines.append(f"function=@{row['function']} {fields}")
    lines.append(' '.join(f"{key}={_format_value(value)}" for key, value in summary.items()))
    return '\n'.join(lines) + '\n'
