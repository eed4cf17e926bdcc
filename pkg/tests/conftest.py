import numpy as np
import pytest

from cnls.mesh import Field, RealField, make_mesh

TWO_PI = 2.0 * np.pi

# The three fixed property-test meshes.
MESHES = {
    "1d8": make_mesh(1, ((0.0, TWO_PI),), 8),
    "2d8": make_mesh(2, ((0.0, TWO_PI),) * 2, 8),
    "3d4": make_mesh(3, ((0.0, TWO_PI),) * 3, 4),
}


@pytest.fixture(params=sorted(MESHES))
def prop_mesh(request):
    return MESHES[request.param]


@pytest.fixture
def rng():
    return np.random.default_rng(20240831)


def random_complex_field(mesh, rng) -> Field:
    return Field(mesh, rng.standard_normal(mesh.shape) + 1j * rng.standard_normal(mesh.shape))


def random_real_field(mesh, rng) -> RealField:
    return RealField(mesh, rng.standard_normal(mesh.shape))


def plane_wave(mesh, freqs) -> Field:
    """exp(i sum_k 2*pi*k_ax*(x-lo)/L_ax), an exact DFT mode of the mesh."""
    coords = mesh.coords()
    phase = np.zeros(mesh.shape)
    for ax, k in enumerate(freqs):
        lo, hi = mesh.extents[ax]
        phase = phase + 2.0 * np.pi * k * (coords[ax] - lo) / (hi - lo)
    return Field(mesh, np.exp(1j * phase))
