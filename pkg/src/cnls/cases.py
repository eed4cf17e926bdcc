"""Built-in problem library.

Three families: manufactured trigonometric solutions with hand-derived
closed-form sources (for convergence studies in 2D and 3D), a pair of
well-separated Gaussians for long-horizon conservation runs, and the
two-soliton collision family in 1D.

The manufactured fields are Laplacian eigenfunctions with unit-modulus
time factor, so the sources reduce to (|u|^2 + |v|^2 - (dim + 1)) times
the exact solution; the expansion is hard-coded (no symbolic engine) and
guarded by residual tests in the suite.

Gaussian and soliton tails at the periodic boundary are below e^{-25};
they are treated as compatible with the periodic box without modification.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from .mesh import Mesh, make_mesh
from .stepper import SchemeParams, SourceHook

__all__ = [
    "CaseSpec",
    "manufactured_2d",
    "manufactured_3d",
    "gaussian_conservation_2d",
    "soliton_1d",
    "SOLITON_PRESETS",
    "CASE_NAMES",
    "by_name",
]


@dataclass(frozen=True)
class CaseSpec:
    """One fully described problem: domain, data, and optional extras.

    ``exact_*`` and the sources are either all absent (conservation and
    collision runs) or jointly consistent: the relaxation targets satisfy
    phi = |u|^2 and psi = |v|^2 identically, and the sources are obtained
    by substituting the exact pair into the equations.
    """

    name: str
    dim: int
    extents: tuple[tuple[float, float], ...]
    params: SchemeParams
    u0: Callable
    v0: Callable
    default_points: tuple[int, ...]
    default_T: float
    default_tau: float | None = None
    exact_u: Callable | None = None
    exact_v: Callable | None = None
    exact_phi: Callable | None = None
    exact_psi: Callable | None = None
    f1: Callable | None = None
    f2: Callable | None = None

    @property
    def has_exact(self) -> bool:
        return self.exact_u is not None

    @property
    def has_sources(self) -> bool:
        return self.f1 is not None

    def make_mesh(self, points: tuple[int, ...] | int | None = None) -> Mesh:
        return make_mesh(self.dim, self.extents, points if points is not None else self.default_points)

    def source_hook(self) -> SourceHook | None:
        if self.f1 is None:
            return None
        return SourceHook(self.f1, self.f2)


def manufactured_2d() -> CaseSpec:
    """Trigonometric exact pair on the 2-pi square, unit coefficients."""

    def u(x, y, t):
        return np.exp(1j * t) * np.cos(x) * np.sin(y)

    def v(x, y, t):
        return 0.5 * np.exp(1j * t) * np.sin(x) * np.sin(y)

    def phi(x, y, t):
        return np.cos(x) ** 2 * np.sin(y) ** 2

    def psi(x, y, t):
        return 0.25 * np.sin(x) ** 2 * np.sin(y) ** 2

    def _bracket(x, y):
        # |u|^2 + |v|^2; time factor has unit modulus
        return np.cos(x) ** 2 * np.sin(y) ** 2 + 0.25 * np.sin(x) ** 2 * np.sin(y) ** 2

    def f1(x, y, t):
        # i u_t = -u and Laplacian u = -2 u, so the source collapses
        return (_bracket(x, y) - 3.0) * u(x, y, t)

    def f2(x, y, t):
        return (_bracket(x, y) - 3.0) * v(x, y, t)

    return CaseSpec(
        name="manufactured2d",
        dim=2,
        extents=((0.0, 2.0 * np.pi), (0.0, 2.0 * np.pi)),
        params=SchemeParams(kappa=1.0, beta=1.0),
        u0=lambda x, y: u(x, y, 0.0),
        v0=lambda x, y: v(x, y, 0.0),
        default_points=(8, 8),
        default_T=1.0,
        exact_u=u,
        exact_v=v,
        exact_phi=phi,
        exact_psi=psi,
        f1=f1,
        f2=f2,
    )


def manufactured_3d() -> CaseSpec:
    """Trigonometric exact pair on the 2-pi cube, unit coefficients."""

    def u(x, y, z, t):
        return np.exp(1j * t) * np.cos(x) * np.sin(y) * np.cos(z)

    def v(x, y, z, t):
        return 0.5 * np.exp(1j * t) * np.sin(x) * np.sin(y) * np.cos(z)

    def phi(x, y, z, t):
        return np.cos(x) ** 2 * np.sin(y) ** 2 * np.cos(z) ** 2

    def psi(x, y, z, t):
        return 0.25 * np.sin(x) ** 2 * np.sin(y) ** 2 * np.cos(z) ** 2

    def _bracket(x, y, z):
        return (np.cos(x) ** 2 + 0.25 * np.sin(x) ** 2) * np.sin(y) ** 2 * np.cos(z) ** 2

    def f1(x, y, z, t):
        # i u_t = -u and Laplacian u = -3 u in three dimensions
        return (_bracket(x, y, z) - 4.0) * u(x, y, z, t)

    def f2(x, y, z, t):
        return (_bracket(x, y, z) - 4.0) * v(x, y, z, t)

    return CaseSpec(
        name="manufactured3d",
        dim=3,
        extents=((0.0, 2.0 * np.pi),) * 3,
        params=SchemeParams(kappa=1.0, beta=1.0),
        u0=lambda x, y, z: u(x, y, z, 0.0),
        v0=lambda x, y, z: v(x, y, z, 0.0),
        default_points=(8, 8, 8),
        default_T=1.0,
        exact_u=u,
        exact_v=v,
        exact_phi=phi,
        exact_psi=psi,
        f1=f1,
        f2=f2,
    )


def gaussian_conservation_2d() -> CaseSpec:
    """Two well-separated Gaussians on (-10, 10)^2 for conservation runs.

    Default resolution matches the long-run setup: spacing 0.2 per axis
    and time step 0.2.
    """

    def u0(x, y):
        return 0.5 * np.exp(-x**2 - y**2)

    def v0(x, y):
        return 0.3 * np.exp(-((x - 5.0) ** 2) - (y - 5.0) ** 2)

    return CaseSpec(
        name="gaussian2d",
        dim=2,
        extents=((-10.0, 10.0), (-10.0, 10.0)),
        params=SchemeParams(kappa=0.5, beta=1.5),
        u0=u0,
        v0=v0,
        default_points=(100, 100),
        default_T=100.0,
        default_tau=0.2,
    )


def gaussian_conservation_1d() -> CaseSpec:
    """1D reduction of the Gaussian case, sized for direct solves."""

    def u0(x):
        return 0.5 * np.exp(-(x**2))

    def v0(x):
        return 0.3 * np.exp(-((x - 5.0) ** 2))

    return CaseSpec(
        name="gaussian1d",
        dim=1,
        extents=((-10.0, 10.0),),
        params=SchemeParams(kappa=0.5, beta=1.5),
        u0=u0,
        v0=v0,
        default_points=(200,),
        default_T=20.0,
        default_tau=0.01,
    )


def soliton_1d(alpha: float = 1.0, beta: float = 1.0) -> CaseSpec:
    """Two counter-propagating sech solitons on (-40, 40).

    Both humps have unit width parameter; they start at -9 and +9 with
    opposite phase velocities +/- alpha/4.  alpha and beta select the
    collision regime (see :data:`SOLITON_PRESETS`).
    """
    r1 = r2 = 1.0
    lam1, lam2 = 18.0, -18.0
    a1, a2 = alpha / 4.0, -alpha / 4.0

    def u0(x):
        return np.sqrt(2.0) * r1 / np.cosh(r1 * x + 0.5 * lam1) * np.exp(1j * a1 * x)

    def v0(x):
        return np.sqrt(2.0) * r2 / np.cosh(r2 * x + 0.5 * lam2) * np.exp(1j * a2 * x)

    return CaseSpec(
        name="soliton",
        dim=1,
        extents=((-40.0, 40.0),),
        params=SchemeParams(kappa=1.0, beta=beta),
        u0=u0,
        v0=v0,
        default_points=(800,),
        default_T=80.0,
        default_tau=0.01,
    )


SOLITON_PRESETS: dict[str, tuple[float, float]] = {
    "elastic": (1.0, 1.0),
    "reflection": (1.15, 2.0 / 3.0),
    "entangle": (1.05, 2.0 / 3.0),
}

CASE_NAMES = ("manufactured2d", "manufactured3d", "gaussian2d", "gaussian1d", "soliton")


def by_name(name: str, alpha: float | None = None, beta: float | None = None) -> CaseSpec:
    """Look up a case; alpha/beta apply to the soliton family only."""
    if name == "manufactured2d":
        return manufactured_2d()
    if name == "manufactured3d":
        return manufactured_3d()
    if name == "gaussian2d":
        return gaussian_conservation_2d()
    if name == "gaussian1d":
        return gaussian_conservation_1d()
    if name == "soliton":
        return soliton_1d(
            alpha if alpha is not None else 1.0,
            beta if beta is not None else 1.0,
        )
    if name in SOLITON_PRESETS:
        a, b = SOLITON_PRESETS[name]
        return soliton_1d(
            alpha if alpha is not None else a,
            beta if beta is not None else b,
        )
    raise ValueError(f"unknown case {name!r}; available: {', '.join(CASE_NAMES)}")
