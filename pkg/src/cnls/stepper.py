"""Relaxation time integrator on the staggered grid.

One run consists of three stages:

1. prediction: a Crank-Nicolson half step of size tau/2, centered at
   t = tau/4, producing midpoint wavefields U(tau/2), V(tau/2) from the
   initial data, with the potentials frozen at |u0|^2, |v0|^2;
2. first step: the relaxation variables are corrected to the squared
   moduli of the predicted midpoints, then a full Crank-Nicolson step
   yields U(tau), V(tau);
3. marching: for n >= 1 the relaxation variables advance by the explicit
   mirror recurrence Phi_{n+1/2} = 2|U_n|^2 - Phi_{n-1/2} (likewise Psi),
   after which the two wavefields are updated by independent linear solves
   with the potentials frozen at the new half level.

Every implicit stage is one :class:`~cnls.linsolve.StepOperator` solve;
its right-hand side is the Cayley mirror ``2 w - L w`` of the current
state, optionally shifted by a manufactured source sampled at the stage's
centering time.  Within a step the two solves share read-only inputs and
disjoint outputs, so they may run concurrently; steps themselves are
strictly sequential.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

from .linsolve import (
    SolverConfig,
    SolverError,
    StepOperator,
    cayley_step,
)
from .mesh import Field, Mesh, RealField, TimeGrid, sample

__all__ = [
    "SchemeParams",
    "RelaxState",
    "SourceHook",
    "initial_state",
    "predict_half",
    "correct_first",
    "relax_update",
    "advance",
    "run",
]


@dataclass(frozen=True)
class SchemeParams:
    """Physical constants: dispersion coefficient and coupling parameter."""

    kappa: float
    beta: float


@dataclass
class RelaxState:
    """Staggered four-field state after step ``n``.

    ``U``, ``V`` sit at the node time ``t_n``.  ``Phi``, ``Psi`` sit at the
    preceding half node ``t_{n-1/2}`` for ``n >= 1``; at ``n = 0`` they hold
    the initial squared moduli (exactly one half level is retained).
    """

    n: int
    U: Field
    V: Field
    Phi: RealField
    Psi: RealField

    def __post_init__(self) -> None:
        mesh = self.U.mesh
        for f in (self.V, self.Phi, self.Psi):
            if f.mesh != mesh:
                raise ValueError("state fields live on different meshes")
        for f in (self.Phi, self.Psi):
            if not isinstance(f, RealField):
                raise TypeError("relaxation variables must be real fields")

    @property
    def mesh(self) -> Mesh:
        return self.U.mesh


@dataclass(frozen=True)
class SourceHook:
    """Manufactured source pair, each a function of (*coords, t).

    Absent for conservation and soliton runs.  The stepper samples the
    sources at the centering time of each implicit stage (t = tau/4 for
    the prediction, the half nodes afterwards).
    """

    f1: Callable
    f2: Callable

    def fields(self, mesh: Mesh, t: float) -> tuple[Field, Field]:
        s1 = sample(mesh, lambda *xs: self.f1(*xs, t)).to_complex()
        s2 = sample(mesh, lambda *xs: self.f2(*xs, t)).to_complex()
        return s1, s2


_DEFAULT_SOLVER = SolverConfig()


def _implicit_stage(
    U: Field,
    V: Field,
    nu_u: RealField,
    nu_v: RealField,
    sigma: float,
    params: SchemeParams,
    tau: float,
    sources: tuple[Field, Field] | None,
    solver: SolverConfig,
) -> tuple[Field, Field]:
    """Solve the decoupled pair of step systems with frozen potentials.

    The right-hand side is 2w - L w (the sign-flipped application of the
    step operator); a source f shifts it by -2i*sigma*tau*f, i.e. the
    discrete equations carry the compact-averaged source at the stage's
    centering time.
    """
    out = []
    for w, nu, src in ((U, nu_u, sources[0] if sources else None),
                       (V, nu_v, sources[1] if sources else None)):
        op = StepOperator(w.mesh, sigma, params.kappa, tau, nu)
        sol, _ = cayley_step(op, w, source=src, config=solver)
        out.append(sol)
    return out[0], out[1]


def predict_half(
    state: RelaxState,
    params: SchemeParams,
    tau: float,
    hook: SourceHook | None = None,
    solver: SolverConfig = _DEFAULT_SOLVER,
) -> tuple[Field, Field]:
    """Prediction stage: midpoint wavefields at t = tau/2 from the data."""
    if state.n != 0:
        raise ValueError("prediction requires the initial state (n=0)")
    nu_u = state.Phi + params.beta * state.Psi
    nu_v = state.Psi + params.beta * state.Phi
    sources = hook.fields(state.mesh, 0.25 * tau) if hook is not None else None
    return _implicit_stage(state.U, state.V, nu_u, nu_v, 0.25, params, tau, sources, solver)


def correct_first(
    state: RelaxState,
    U_half: Field,
    V_half: Field,
    params: SchemeParams,
    tau: float,
    hook: SourceHook | None = None,
    solver: SolverConfig = _DEFAULT_SOLVER,
) -> RelaxState:
    """Correction stage: set the half-level potentials, march to t = tau."""
    if state.n != 0:
        raise ValueError("correction requires the initial state (n=0)")
    phi_half = U_half.abs2()
    psi_half = V_half.abs2()
    nu_u = phi_half + params.beta * psi_half
    nu_v = psi_half + params.beta * phi_half
    sources = hook.fields(state.mesh, 0.5 * tau) if hook is not None else None
    U1, V1 = _implicit_stage(state.U, state.V, nu_u, nu_v, 0.5, params, tau, sources, solver)
    return RelaxState(n=1, U=U1, V=V1, Phi=phi_half, Psi=psi_half)


def relax_update(state: RelaxState) -> tuple[RealField, RealField]:
    """Explicit mirror step of the relaxation variables.

    Returns the next half-level pair 2|U|^2 - Phi, 2|V|^2 - Psi; no solve
    is involved.
    """
    if state.n < 1:
        raise ValueError("relaxation recurrence starts after the first step")
    phi_next = 2.0 * state.U.abs2() - state.Phi
    psi_next = 2.0 * state.V.abs2() - state.Psi
    return phi_next, psi_next


def advance(
    state: RelaxState,
    params: SchemeParams,
    tau: float,
    hook: SourceHook | None = None,
    solver: SolverConfig = _DEFAULT_SOLVER,
) -> RelaxState:
    """One full marching step from n to n+1 (n >= 1)."""
    phi_next, psi_next = relax_update(state)
    nu_u = phi_next + params.beta * psi_next
    nu_v = psi_next + params.beta * phi_next
    t_mid = (state.n + 0.5) * tau
    sources = hook.fields(state.mesh, t_mid) if hook is not None else None
    U_next, V_next = _implicit_stage(
        state.U, state.V, nu_u, nu_v, 0.5, params, tau, sources, solver
    )
    return RelaxState(n=state.n + 1, U=U_next, V=V_next, Phi=phi_next, Psi=psi_next)


def initial_state(mesh: Mesh, u0: Callable, v0: Callable) -> RelaxState:
    """Sample the initial data and its squared moduli."""
    U0 = sample(mesh, u0).to_complex()
    V0 = sample(mesh, v0).to_complex()
    return RelaxState(n=0, U=U0, V=V0, Phi=U0.abs2(), Psi=V0.abs2())


def run(
    u0: Callable,
    v0: Callable,
    params: SchemeParams,
    mesh: Mesh,
    timegrid: TimeGrid,
    hook: SourceHook | None = None,
    solver: SolverConfig = _DEFAULT_SOLVER,
    observer: Callable[[RelaxState, float], None] | None = None,
) -> RelaxState:
    """Integrate the full scheme over the time grid.

    The observer is invoked after construction of the initial state and
    after every completed step, on the stepping thread; diagnostics and
    persistence hang off this callback.  Deterministic for a fixed
    configuration.  Aborts on the first failed solve, reporting the step.
    """
    tau = timegrid.tau
    state = initial_state(mesh, u0, v0)
    if observer is not None:
        observer(state, 0.0)
    try:
        U_half, V_half = predict_half(state, params, tau, hook, solver)
        state = correct_first(state, U_half, V_half, params, tau, hook, solver)
    except SolverError as err:
        raise SolverError(f"first step failed: {err}", err.report) from err
    if observer is not None:
        observer(state, timegrid.t(1))
    for n in range(1, timegrid.N):
        try:
            state = advance(state, params, tau, hook, solver)
        except SolverError as err:
            raise SolverError(f"step {n + 1} failed: {err}", err.report) from err
        if observer is not None:
            observer(state, timegrid.t(n + 1))
    return state
