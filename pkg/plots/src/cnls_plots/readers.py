"""Schema-validated readers for the solver's on-disk artifacts.

These functions are pure readers: they never recompute physics, only
parse the documented CSV and snapshot formats and complain precisely
(naming the missing column or offending file) when a schema does not
match.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

import numpy as np

__all__ = [
    "SchemaError",
    "INVARIANT_COLUMNS",
    "ORDER_UV_COLUMNS",
    "ORDER_PHIPSI_COLUMNS",
    "read_invariants",
    "read_order_table",
    "read_snapshots",
    "Snapshot",
]


class SchemaError(ValueError):
    """An artifact does not match its documented schema."""


INVARIANT_COLUMNS = (
    "step", "time", "M_u", "M_v", "R_u", "R_v", "E",
    "absdrift_M_u", "absdrift_M_v", "absdrift_R_u", "absdrift_R_v", "absdrift_E",
)
ORDER_UV_COLUMNS = (
    "M", "err_U_L2", "order", "err_U_H1", "order",
    "err_V_L2", "order", "err_V_H1", "order",
)
ORDER_PHIPSI_COLUMNS = ("M", "err_Phi_L2", "order", "err_Psi_L2", "order")


def read_invariants(path: str | Path) -> dict[str, np.ndarray]:
    """Read an invariants CSV into column arrays (possibly empty)."""
    lines = Path(path).read_text().splitlines()
    if not lines:
        raise SchemaError(f"{path}: empty file, expected the invariants header")
    header = lines[0].split(",")
    for col in INVARIANT_COLUMNS:
        if col not in header:
            raise SchemaError(f"{path}: missing column {col!r}")
    extra = [c for c in header if c not in INVARIANT_COLUMNS]
    if extra:
        raise SchemaError(f"{path}: unexpected column {extra[0]!r}")
    rows = [line.split(",") for line in lines[1:] if line.strip()]
    data: dict[str, np.ndarray] = {}
    for j, col in enumerate(header):
        vals = [row[j] for row in rows]
        data[col] = np.array([float(v) for v in vals]) if col != "step" \
            else np.array([int(v) for v in vals])
    return data


@dataclass
class OrderTable:
    """Rows of one error ladder: mesh sizes, error columns, order columns."""

    mesh_sizes: np.ndarray
    errors: dict[str, np.ndarray]
    orders: dict[str, np.ndarray]  # NaN where the table printed '--'


def read_order_table(path: str | Path) -> OrderTable:
    lines = [l for l in Path(path).read_text().splitlines() if l.strip()]
    if not lines:
        raise SchemaError(f"{path}: empty file, expected an order-table header")
    header = tuple(lines[0].split(","))
    if header not in (ORDER_UV_COLUMNS, ORDER_PHIPSI_COLUMNS):
        raise SchemaError(f"{path}: header {lines[0]!r} is not an order-table schema")
    rows = [line.split(",") for line in lines[1:]]
    if any(len(r) != len(header) for r in rows):
        raise SchemaError(f"{path}: ragged row in order table")
    ms = np.array([int(r[0]) for r in rows])
    errors: dict[str, np.ndarray] = {}
    orders: dict[str, np.ndarray] = {}
    for j, col in enumerate(header):
        if col == "M":
            continue
        vals = np.array([np.nan if r[j] == "--" else float(r[j]) for r in rows])
        if col == "order":
            # order columns attach to the error column immediately before
            orders[header[j - 1]] = vals
        else:
            errors[col] = vals
    return OrderTable(mesh_sizes=ms, errors=errors, orders=orders)


@dataclass
class Snapshot:
    """One modulus-profile sample of a 1D collision run."""

    t: float
    x: np.ndarray
    u: np.ndarray  # complex
    v: np.ndarray


def read_snapshots(directory: str | Path) -> list[Snapshot]:
    """Read every snapshot file in a directory, sorted by filename."""
    directory = Path(directory)
    files = sorted(p for p in directory.iterdir() if p.is_file())
    if not files:
        raise SchemaError(f"{directory}: no snapshot files found")
    snaps = []
    for f in files:
        lines = f.read_text().splitlines()
        if not lines or not lines[0].startswith("# t="):
            raise SchemaError(f"{f}: missing '# t=' header line")
        t = float(lines[0][4:])
        rows = [line.split(",") for line in lines[1:] if line.strip()]
        if not rows:
            raise SchemaError(f"{f}: snapshot has no data rows")
        width = len(rows[0])
        if width != 5 or any(len(r) != width for r in rows):
            raise SchemaError(f"{f}: expected rows 'x,re_u,im_u,re_v,im_v'")
        arr = np.array([[float(c) for c in r] for r in rows])
        snaps.append(Snapshot(
            t=t, x=arr[:, 0],
            u=arr[:, 1] + 1j * arr[:, 2],
            v=arr[:, 3] + 1j * arr[:, 4],
        ))
    return snaps
