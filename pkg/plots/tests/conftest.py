"""Artifact fixtures, produced through the solver's command-line interface.

The plotting package consumes the solver only through its documented file
formats, so the fixtures shell out to the installed ``cnls`` command.
"""

import subprocess
import sys

import pytest


def run_solver(args, outdir):
    cmd = [sys.executable, "-m", "cnls.cli", *args, "--outdir", str(outdir)]
    proc = subprocess.run(cmd, capture_output=True, text=True)
    assert proc.returncode == 0, f"solver failed: {proc.stderr}"
    return outdir


@pytest.fixture(scope="session")
def conservation_artifact(tmp_path_factory):
    """Invariant stream of the scaled 2D conservation run."""
    out = tmp_path_factory.mktemp("conservation")
    return run_solver(["run", "--case", "gaussian2d", "--T", "20"], out)


@pytest.fixture(scope="session")
def ladder_artifact(tmp_path_factory):
    """Order tables of the 2D refinement ladder (8, 16, 32)."""
    out = tmp_path_factory.mktemp("ladder")
    return run_solver(
        ["convergence", "--case", "manufactured2d", "--ladder", "8,16,32"], out
    )


@pytest.fixture(scope="session")
def collision_artifact(tmp_path_factory):
    """Snapshot series of a desk-scale elastic collision."""
    out = tmp_path_factory.mktemp("collision")
    return run_solver(
        ["soliton", "elastic", "--T", "8", "--snapshot-dt", "0.5", "--cadence", "100"],
        out,
    )
