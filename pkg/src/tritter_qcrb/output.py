from __future__ import annotations

import io
import math
import os
from pathlib import Path

import numpy as np

from .sweep import CSV_COLUMNS, Row, curves


def format_cell(value) -> str:
    """12 significant digits, printed in shortest round-trip form; None -> ''."""
    if value is None:
        return ""
    if isinstance(value, str):
        return value
    if isinstance(value, (bool, np.bool_)):
        raise TypeError("boolean CSV cells are not supported")
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    x = float(value)
    if not math.isfinite(x):
        return ""
    x = float(f"{x:.12g}")
    return repr(x + 0.0)


def csv_text(rows) -> str:
    buf = io.StringIO()
    buf.write(",".join(CSV_COLUMNS) + "\n")
    for row in rows:
        buf.write(",".join(format_cell(v) for v in row.values()) + "\n")
    return buf.getvalue()


def emit_csv(rows, destination) -> None:
    """Write ``rows`` to a path or text stream; singular-bound diagnostics go to ``<path>.log``."""
    text = csv_text(rows)
    notes = [f"{r.scenario},{r.engine},N={r.N},r=({r.r_a:g},{r.r_b:g},{r.r_c:g}): {r.diagnostic}" for r in rows if r.diagnostic]
    if hasattr(destination, "write"):
        destination.write(text)
        return
    path = Path(destination)
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(text)
    log_path = path.with_name(path.name + ".log")
    if notes:
        log_path.write_text("\n".join(notes) + "\n", encoding="utf-8")
    elif log_path.exists():
        os.remove(log_path)


def emit_plot(rows: list[Row], destination, ordinate: str = "qcrb", title: str | None = None) -> None:
    """One curve per scenario tag as a static SVG."""
    if not rows:
        raise ValueError("nothing to plot")
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    data = curves(rows, ordinate)
    fig, ax = plt.subplots(figsize=(6, 4.2))
    x_label = "N"
    positive = []
    for label, (x, y, x_label) in data.items():
        ax.plot(x, y, marker="o", ms=3, lw=1.2, label=label)
        positive.extend(v for v in y if v > 0)
    if positive and max(positive) / min(positive) > 100:
        ax.set_yscale("log")
    ax.set_xlabel(x_label)
    ax.set_ylabel(ordinate)
    if title:
        ax.set_title(title)
    ax.legend(fontsize=7)
    fig.tight_layout()
    # fixed metadata keeps the SVG byte-stable across runs
    plt.rcParams["svg.hashsalt"] = "tritter-qcrb"
    fig.savefig(destination, format="svg", metadata={"Date": None})
    plt.close(fig)
