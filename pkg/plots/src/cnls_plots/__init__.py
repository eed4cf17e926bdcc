"""Figure rendering for cnls solver artifacts.

A pure reader of the solver's documented CSV and snapshot formats; never
recomputes physics.
"""

from .readers import (
    OrderTable,
    SchemaError,
    Snapshot,
    read_invariants,
    read_order_table,
    read_snapshots,
)
from .render import plot_drift, plot_invariants, plot_orders, plot_waterfall

__version__ = "0.1.0"

__all__ = [
    "OrderTable",
    "SchemaError",
    "Snapshot",
    "read_invariants",
    "read_order_table",
    "read_snapshots",
    "plot_drift",
    "plot_invariants",
    "plot_orders",
    "plot_waterfall",
]
