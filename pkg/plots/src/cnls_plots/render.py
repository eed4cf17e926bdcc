"""The four figure kinds: invariants, drift, order, waterfall.

Pure consumers of the reader outputs; byte-identical inputs yield
identical images (no randomness, fixed layout, PNG at 150 dpi unless
overridden).
"""

from __future__ import annotations

from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

from .readers import OrderTable, SchemaError, Snapshot

__all__ = ["plot_invariants", "plot_drift", "plot_orders", "plot_waterfall", "DPI"]

DPI = 150

_INVARIANTS = ("M_u", "M_v", "R_u", "R_v", "E")
# floor for log-scaled drift axes; exact zeros (the first row) sit on it
_DRIFT_FLOOR = 1e-20


def _save(fig, out: str | Path, dpi: int) -> None:
    fig.savefig(out, dpi=dpi)
    plt.close(fig)


def plot_invariants(data: dict[str, np.ndarray], out: str | Path, dpi: int = DPI) -> None:
    """One panel per conserved quantity against time."""
    fig, axes = plt.subplots(1, 5, figsize=(18, 3.2), constrained_layout=True)
    for ax, col in zip(axes, _INVARIANTS):
        ax.plot(data["time"], data[col], lw=1.0)
        ax.set_title(col)
        ax.set_xlabel("t")
        ax.grid(True, alpha=0.3)
    _save(fig, out, dpi)


def plot_drift(data: dict[str, np.ndarray], out: str | Path, dpi: int = DPI) -> None:
    """One panel per absolute-drift column, log-scaled."""
    fig, axes = plt.subplots(1, 5, figsize=(18, 3.2), constrained_layout=True)
    for ax, col in zip(axes, _INVARIANTS):
        drift = np.maximum(data[f"absdrift_{col}"], _DRIFT_FLOOR)
        ax.semilogy(data["time"], drift, lw=1.0)
        ax.set_title(f"|{col}(t) - {col}(0)|")
        ax.set_xlabel("t")
        ax.grid(True, which="both", alpha=0.3)
    _save(fig, out, dpi)


def order_figure(table: OrderTable):
    """Build the log-log decay figure; returns (figure, slopes per column)."""
    if len(table.mesh_sizes) < 2:
        raise SchemaError("order table needs at least two rows to show decay")
    fig, ax = plt.subplots(figsize=(5.0, 4.0), constrained_layout=True)
    slopes: dict[str, float] = {}
    logm = np.log(table.mesh_sizes.astype(float))
    for col, errs in table.errors.items():
        slope = float(np.polyfit(logm, np.log(errs), 1)[0])
        slopes[col] = slope
        ax.loglog(table.mesh_sizes, errs, "o-", label=f"{col} (slope {slope:.2f})")
    # slope -4 reference through the first point of the first column
    first = next(iter(table.errors.values()))
    m = table.mesh_sizes.astype(float)
    guide = first[0] * (m / m[0]) ** -4.0
    ax.loglog(m, guide, "k--", lw=0.8, label="slope -4 guide")
    ax.set_xlabel("mesh size M")
    ax.set_ylabel("error")
    ax.grid(True, which="both", alpha=0.3)
    ax.legend(fontsize=7)
    return fig, slopes


def plot_orders(table: OrderTable, out: str | Path, dpi: int = DPI) -> dict[str, float]:
    """Log-log error decay against mesh size, with a slope -4 guide.

    Returns the fitted slope per error column (least squares on the
    log-log points).  A single-row table has no decay to show and is
    rejected.
    """
    fig, slopes = order_figure(table)
    _save(fig, out, dpi)
    return slopes


def plot_waterfall(snapshots: list[Snapshot], out: str | Path, dpi: int = DPI) -> None:
    """Pseudocolor |u|, |v| over (x, t); one snapshot falls back to lines."""
    if len(snapshots) == 1:
        snap = snapshots[0]
        fig, ax = plt.subplots(figsize=(6.0, 3.5), constrained_layout=True)
        ax.plot(snap.x, np.abs(snap.u), label="|u|")
        ax.plot(snap.x, np.abs(snap.v), label="|v|")
        ax.set_xlabel("x")
        ax.set_title(f"t = {snap.t:g}")
        ax.legend()
        _save(fig, out, dpi)
        return

    x = snapshots[0].x
    ts = np.array([s.t for s in snapshots])
    U = np.array([np.abs(s.u) for s in snapshots])
    V = np.array([np.abs(s.v) for s in snapshots])
    fig, axes = plt.subplots(1, 2, figsize=(10.0, 4.0), constrained_layout=True)
    for ax, Z, label in ((axes[0], U, "|u|"), (axes[1], V, "|v|")):
        pc = ax.pcolormesh(x, ts, Z, shading="nearest", cmap="viridis")
        ax.set_xlabel("x")
        ax.set_ylabel("t")
        ax.set_title(label)
        fig.colorbar(pc, ax=ax)
    _save(fig, out, dpi)
