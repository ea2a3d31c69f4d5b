"""Render semilog convergence figures from solver CSV files.

Input is the experiment runner's CSV schema
(method,theta,T,dx,dt,iteration,error_linf_l2,trace_error_l2,wallclock_ms);
one line series is drawn per distinct value of the grouping column, with
the error on a log axis and clipped below at the 1e-16 floor.  Rendering
is read-only over its inputs and deterministic for fixed inputs and
library versions.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass
from pathlib import Path
from typing import Dict, List, Optional, Sequence, Tuple

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt

__all__ = ["FigureSpec", "render", "ERROR_FLOOR", "METHOD_MARKERS"]

ERROR_FLOOR = 1e-16

# fixed marker table so reruns and method comparisons stay visually stable
METHOD_MARKERS = {
    "dnwr": "o",
    "nnwr": "s",
    "swr_classical": "^",
    "swr_optimized": "v",
}
_FALLBACK_MARKERS = ["o", "s", "^", "v", "D", "p", "x", "*"]


@dataclass(frozen=True)
class FigureSpec:
    """What to plot: which CSVs, which column forms the series, where to."""

    csv_paths: Sequence[Path]
    group_by: str
    out_path: Path
    title: Optional[str] = None
    xlabel: str = "iteration"
    ylabel: str = "error"
    error_column: str = "error_linf_l2"


def _load_rows(paths: Sequence[Path], needed: Sequence[str]) -> List[dict]:
    rows: List[dict] = []
    for path in paths:
        with open(path, newline="") as fh:
            reader = csv.DictReader(fh)
            header = reader.fieldnames or []
            for column in needed:
                if column not in header:
                    raise ValueError(f"{path}: missing column {column!r}")
            rows.extend(reader)
    if not rows:
        raise ValueError("no data rows in " + ", ".join(str(p) for p in paths))
    return rows


def _group_key(value: str) -> Tuple:
    try:
        return (0, float(value))
    except ValueError:
        return (1, value)


def render(spec: FigureSpec):
    """Draw the figure, write it to spec.out_path, and return it."""
    needed = (spec.group_by, "iteration", spec.error_column)
    rows = _load_rows([Path(p) for p in spec.csv_paths], needed)

    series: Dict[str, List[Tuple[int, float]]] = {}
    for row in rows:
        series.setdefault(row[spec.group_by], []).append(
            (int(row["iteration"]), max(float(row[spec.error_column]), ERROR_FLOOR))
        )

    fig, ax = plt.subplots(figsize=(6.4, 4.8))
    for idx, key in enumerate(sorted(series, key=_group_key)):
        points = sorted(series[key])
        marker = METHOD_MARKERS.get(key, _FALLBACK_MARKERS[idx % len(_FALLBACK_MARKERS)])
        ax.semilogy(
            [p[0] for p in points],
            [p[1] for p in points],
            marker=marker,
            label=f"{spec.group_by}={key}",
        )
    ax.set_xlabel(spec.xlabel)
    ax.set_ylabel(spec.ylabel)
    if spec.title:
        ax.set_title(spec.title)
    ax.grid(True, which="both", alpha=0.3)
    ax.legend()
    fig.tight_layout()
    out = Path(spec.out_path)
    out.parent.mkdir(parents=True, exist_ok=True)
    fig.savefig(out, dpi=150)
    return fig
