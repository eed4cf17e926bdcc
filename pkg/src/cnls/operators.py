"""Compact difference operators, inner products, norms, and their symbols.

Per axis the two building blocks are the second difference

    d2 w_i = (w_{i+1} - 2 w_i + w_{i-1}) / h^2

and the compact average

    avg w_i = (w_{i-1} + 10 w_i + w_{i+1}) / 12 = w_i + (h^2/12) d2 w_i,

both with periodic index wrap.  Tensorized they give the fourth-order
compact pair used by the scheme: ``compact_average`` is the product of the
axis averages, and ``compact_laplacian`` applies each axis second
difference averaged along the remaining axes (in 1D it reduces to the
plain second difference).

Both operators are circulant per axis, hence diagonalized exactly by the
discrete Fourier transform.  Their eigenvalue tables live in
:class:`OperatorSymbols`; the average is inverted spectrally.

All operations are pure functions; the per-mesh symbol table is computed
once and cached immutably.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np
import scipy.fft

from .mesh import Field, Mesh, RealField

__all__ = [
    "OperatorSymbols",
    "symbols",
    "compact_average_axis",
    "second_diff_axis",
    "compact_average",
    "compact_laplacian",
    "compact_average_inverse",
    "inner",
    "norm_l2",
    "seminorm_h1",
    "norm_h1",
    "norm_inf",
    "norm_avg",
]

# Relative guard below which a negative radicand is treated as roundoff.
_RADICAND_GUARD = 1e-14


@dataclass(frozen=True)
class OperatorSymbols:
    """Circulant eigenvalue tables for one mesh.

    ``axis_average[i][k] = (10 + 2 cos(2 pi k / M_i)) / 12`` and
    ``axis_second_diff[i][k] = -(4/h_i^2) sin^2(pi k / M_i)`` are the 1D
    symbols; ``average``, ``laplacian`` and ``ratio = laplacian/average``
    are their tensorized counterparts on the full frequency grid.

    The average symbol lies in [(2/3)^dim, 1], so the compact average is
    always invertible; the second-difference symbol is nonpositive and
    vanishes only at frequency zero, hence ``ratio`` does too.
    """

    axis_average: tuple[np.ndarray, ...]
    axis_second_diff: tuple[np.ndarray, ...]
    average: np.ndarray
    laplacian: np.ndarray
    ratio: np.ndarray


def _broadcast_along(arr: np.ndarray, axis: int, dim: int) -> np.ndarray:
    shape = [1] * dim
    shape[axis] = -1
    return arr.reshape(shape)


@lru_cache(maxsize=None)
def symbols(mesh: Mesh) -> OperatorSymbols:
    """Symbol table for a mesh (cached; meshes are immutable)."""
    dim = mesh.dim
    axis_avg = []
    axis_d2 = []
    for ax in range(dim):
        m = mesh.points[ax]
        h = mesh.spacings[ax]
        theta = 2.0 * np.pi * np.arange(m) / m
        axis_avg.append((10.0 + 2.0 * np.cos(theta)) / 12.0)
        axis_d2.append(-(4.0 / h**2) * np.sin(theta / 2.0) ** 2)

    average = np.ones(mesh.shape)
    for ax in range(dim):
        average = average * _broadcast_along(axis_avg[ax], ax, dim)

    laplacian = np.zeros(mesh.shape)
    for ax in range(dim):
        term = _broadcast_along(axis_d2[ax], ax, dim)
        for other in range(dim):
            if other != ax:
                term = term * _broadcast_along(axis_avg[other], other, dim)
        laplacian = laplacian + term

    return OperatorSymbols(
        axis_average=tuple(axis_avg),
        axis_second_diff=tuple(axis_d2),
        average=average,
        laplacian=laplacian,
        ratio=laplacian / average,
    )


def _check_axis(field: Field, axis: int) -> None:
    if not 0 <= axis < field.mesh.dim:
        raise ValueError(f"axis {axis} out of range for a {field.mesh.dim}D mesh")


def compact_average_axis(field: Field, axis: int) -> Field:
    """Apply the (1, 10, 1)/12 averaging stencil along one axis."""
    _check_axis(field, axis)
    v = field.values
    out = (np.roll(v, 1, axis) + 10.0 * v + np.roll(v, -1, axis)) / 12.0
    return type(field)(field.mesh, out)


def second_diff_axis(field: Field, axis: int) -> Field:
    """Apply the centered second difference along one axis."""
    _check_axis(field, axis)
    h = field.mesh.spacings[axis]
    v = field.values
    out = (np.roll(v, -1, axis) - 2.0 * v + np.roll(v, 1, axis)) / h**2
    return type(field)(field.mesh, out)


def compact_average(field: Field) -> Field:
    """Tensor-product compact average over all axes (axis order immaterial)."""
    out = field
    for ax in range(field.mesh.dim):
        out = compact_average_axis(out, ax)
    return out


def compact_laplacian(field: Field) -> Field:
    """Fourth-order compact Laplacian surrogate.

    Sum over axes of the axis second difference, compact-averaged along
    the remaining axes.  Approximates (average o Laplace) to O(h^4).
    """
    total = None
    for ax in range(field.mesh.dim):
        term = second_diff_axis(field, ax)
        for other in range(field.mesh.dim):
            if other != ax:
                term = compact_average_axis(term, other)
        total = term if total is None else total + term
    return total


def compact_average_inverse(field: Field) -> Field:
    """Invert the compact average by spectral division.

    Exact up to roundoff: the operator is circulant with symbol bounded
    away from zero, so the DFT diagonalizes it.
    """
    sym = symbols(field.mesh).average
    out = scipy.fft.ifftn(scipy.fft.fftn(field.values) / sym)
    if isinstance(field, RealField):
        return RealField(field.mesh, out.real)
    return Field(field.mesh, out)


# -- inner products and norms -------------------------------------------


def _check_pair(v: Field, q: Field) -> None:
    if v.mesh != q.mesh:
        raise ValueError("fields live on different meshes")


def inner(v: Field, q: Field) -> complex:
    """Discrete L2 inner product, cell volume times sum of v * conj(q)."""
    _check_pair(v, q)
    return complex(v.mesh.cell_volume * np.vdot(q.values, v.values))


def norm_l2(v: Field) -> float:
    return float(np.sqrt(v.mesh.cell_volume * np.sum(np.abs(v.values) ** 2)))


def seminorm_h1(v: Field) -> float:
    """Discrete H1 seminorm from forward half-point differences per axis."""
    acc = 0.0
    vals = v.values
    for ax in range(v.mesh.dim):
        h = v.mesh.spacings[ax]
        d = (np.roll(vals, -1, ax) - vals) / h
        acc += np.sum(np.abs(d) ** 2)
    return float(np.sqrt(v.mesh.cell_volume * acc))


def norm_h1(v: Field) -> float:
    return float(np.sqrt(norm_l2(v) ** 2 + seminorm_h1(v) ** 2))


def norm_inf(v: Field) -> float:
    return float(np.max(np.abs(v.values)))


def norm_avg(v: Field) -> float:
    """Norm induced by the compact average, sqrt(Re (avg v, v))."""
    rad = inner(compact_average(v), v).real
    scale = norm_l2(v) ** 2
    if rad < 0.0:
        if rad < -_RADICAND_GUARD * max(1.0, scale):
            raise ArithmeticError(f"average-norm radicand {rad} beyond roundoff guard")
        rad = 0.0
    return float(np.sqrt(rad))
