"""Periodic tensor-product grids, staggered time grids, and grid functions.

The spatial mesh covers a 1-, 2- or 3-dimensional box with uniform spacing
per axis and periodic identification of the two endpoints of each axis.
Exactly one value is stored per periodic equivalence class (no ghost layers,
no duplicated boundary column); every stencil wraps indices modulo the axis
size.  Complex grid functions (:class:`Field`) carry the wavefields, real
ones (:class:`RealField`) carry the relaxation variables and the frozen
potential coefficients.

Meshes and time grids are immutable and hashable, so derived data (stencil
symbols, sparse matrices) can be cached per mesh.  Fields are value-like:
concurrent reads are safe, writers take ownership.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

__all__ = [
    "Mesh",
    "TimeGrid",
    "Field",
    "RealField",
    "make_mesh",
    "sample",
]


@dataclass(frozen=True)
class Mesh:
    """Uniform periodic box grid.

    ``extents[i] = (lower, upper)`` and ``points[i]`` give, per axis, the
    physical interval and the number of stored nodes.  The node with index
    ``k`` along axis ``i`` sits at ``lower + k * spacing[i]``; index ``points[i]``
    is identified with index 0.
    """

    extents: tuple[tuple[float, float], ...]
    points: tuple[int, ...]

    def __post_init__(self) -> None:
        if not 1 <= len(self.points) <= 3:
            raise ValueError(f"mesh dimension must be 1, 2 or 3, got {len(self.points)}")
        if len(self.extents) != len(self.points):
            raise ValueError("extents and points must have matching length")
        for (lo, hi), m in zip(self.extents, self.points):
            if m < 3:
                raise ValueError(f"need at least 3 points per axis for the stencils, got {m}")
            if not (math.isfinite(lo) and math.isfinite(hi)) or hi <= lo:
                raise ValueError(f"invalid axis extent ({lo}, {hi})")

    @property
    def dim(self) -> int:
        return len(self.points)

    @property
    def spacings(self) -> tuple[float, ...]:
        return tuple((hi - lo) / m for (lo, hi), m in zip(self.extents, self.points))

    @property
    def h(self) -> float:
        """Largest axis spacing."""
        return max(self.spacings)

    @property
    def shape(self) -> tuple[int, ...]:
        return self.points

    @property
    def size(self) -> int:
        return int(np.prod(self.points))

    @property
    def cell_volume(self) -> float:
        """Quadrature weight of one node, prod of the axis spacings."""
        return float(np.prod(self.spacings))

    def axis_coords(self, axis: int) -> np.ndarray:
        """Node coordinates along one axis (length ``points[axis]``)."""
        lo, _ = self.extents[axis]
        h = self.spacings[axis]
        return lo + h * np.arange(self.points[axis])

    def coords(self) -> tuple[np.ndarray, ...]:
        """Dense coordinate arrays of shape ``self.shape``, one per axis."""
        axes = [self.axis_coords(i) for i in range(self.dim)]
        return tuple(np.meshgrid(*axes, indexing="ij"))


@dataclass(frozen=True)
class TimeGrid:
    """Uniform time grid with the staggered half- and quarter-nodes.

    Primal unknowns live at the nodes ``t_n = n*tau``; the relaxation
    variables live at the half-nodes ``t_{n+1/2}``.  The prediction step
    is centered at ``t_{1/4} = tau/4``.
    """

    T: float
    N: int

    def __post_init__(self) -> None:
        if not (math.isfinite(self.T) and self.T > 0):
            raise ValueError(f"time horizon must be positive, got {self.T}")
        if self.N < 1:
            raise ValueError(f"step count must be >= 1, got {self.N}")

    @property
    def tau(self) -> float:
        return self.T / self.N

    def t(self, n: int) -> float:
        return n * self.tau

    def t_half(self, n: int) -> float:
        """Half-node time ``t_{n+1/2}``."""
        return (n + 0.5) * self.tau

    @property
    def t_quarter(self) -> float:
        return 0.25 * self.tau


class Field:
    """Complex periodic grid function: one value per stored node."""

    __slots__ = ("mesh", "values")

    _dtype = np.complex128

    def __init__(self, mesh: Mesh, values: np.ndarray):
        values = np.asarray(values, dtype=self._dtype)
        if values.shape != mesh.shape:
            raise ValueError(f"values shape {values.shape} does not match mesh {mesh.shape}")
        self.mesh = mesh
        self.values = values

    @classmethod
    def zeros(cls, mesh: Mesh) -> "Field":
        return cls(mesh, np.zeros(mesh.shape, dtype=cls._dtype))

    @classmethod
    def full(cls, mesh: Mesh, value) -> "Field":
        return cls(mesh, np.full(mesh.shape, value, dtype=cls._dtype))

    def copy(self) -> "Field":
        return type(self)(self.mesh, self.values.copy())

    def abs2(self) -> "RealField":
        """Pointwise squared modulus, |w|^2, as a real field."""
        v = self.values
        return RealField(self.mesh, (v * v.conj()).real)

    def to_complex(self) -> "Field":
        return Field(self.mesh, self.values)

    # -- value-like arithmetic -------------------------------------------
    # Results are RealField exactly when the numpy result dtype is real.

    def _check(self, other: "Field") -> None:
        if other.mesh != self.mesh:
            raise ValueError("fields live on different meshes")

    def __add__(self, other: "Field") -> "Field":
        self._check(other)
        return _wrap(self.mesh, self.values + other.values)

    def __sub__(self, other: "Field") -> "Field":
        self._check(other)
        return _wrap(self.mesh, self.values - other.values)

    def __neg__(self) -> "Field":
        return _wrap(self.mesh, -self.values)

    def __mul__(self, other):
        if isinstance(other, Field):
            self._check(other)
            return _wrap(self.mesh, self.values * other.values)
        return _wrap(self.mesh, self.values * other)

    __rmul__ = __mul__

    def __repr__(self) -> str:  # pragma: no cover
        return f"{type(self).__name__}(shape={self.mesh.shape})"


class RealField(Field):
    """Field with real values (relaxation variables, potentials)."""

    __slots__ = ()

    _dtype = np.float64


def _wrap(mesh: Mesh, values: np.ndarray) -> Field:
    if np.issubdtype(values.dtype, np.floating):
        return RealField(mesh, values)
    return Field(mesh, values)


def make_mesh(
    dim: int,
    extents: Sequence[Sequence[float]],
    points: Sequence[int] | int,
) -> Mesh:
    """Build a periodic box mesh.

    ``extents`` is one ``(lower, upper)`` pair per axis; ``points`` is the
    node count per axis (a single int is broadcast to every axis).
    """
    if dim not in (1, 2, 3):
        raise ValueError(f"dim must be 1, 2 or 3, got {dim}")
    if isinstance(points, int):
        points = (points,) * dim
    ext = tuple((float(lo), float(hi)) for lo, hi in extents)
    pts = tuple(int(m) for m in points)
    if len(ext) != dim or len(pts) != dim:
        raise ValueError("extents/points length must equal dim")
    return Mesh(ext, pts)


def sample(mesh: Mesh, fn: Callable) -> Field:
    """Evaluate a pointwise function of the coordinates at every node.

    ``fn`` receives one coordinate array per axis (numpy-broadcastable) and
    may return real or complex values; scalars are broadcast.  Returns a
    :class:`RealField` when the result is real, else a :class:`Field`.
    """
    raw = np.asarray(fn(*mesh.coords()))
    if raw.shape != mesh.shape:
        raw = np.broadcast_to(raw, mesh.shape)
    if np.issubdtype(raw.dtype, np.complexfloating):
        return Field(mesh, np.array(raw, dtype=np.complex128))
    return RealField(mesh, np.array(raw, dtype=np.float64))
