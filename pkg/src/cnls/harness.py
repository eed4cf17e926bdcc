"""Experiment drivers: convergence ladders, conservation runs, collisions.

The convergence protocol couples the step count to the mesh: N = M^2 per
rung, so the observed decay measures the fourth-order spatial rate while
the second-order temporal error contributes at the same size.  Observed
orders are log-ratios of successive errors over the log mesh ratio, which
handles both dyadic (8, 16, 32, ...) and factor-1.5 (8, 12, 18, 27)
ladders.

Conservation runs stream invariant records at a configurable cadence;
collision runs additionally snapshot the modulus profiles for waterfall
plots.  Rungs of a study are independent runs and reproduce bit-identical
outputs for a fixed configuration.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field as dataclass_field

import numpy as np

from .cases import CaseSpec
from .diagnostics import (
    ErrorRecord,
    InvariantRecord,
    energy,
    error_norms,
    mass,
    relaxation_mass,
)
from .linsolve import SolverConfig
from .mesh import TimeGrid
from .stepper import RelaxState, relax_update, run

__all__ = [
    "StudyPlan",
    "CollisionResult",
    "convergence_study",
    "conservation_run",
    "collision_run",
    "simulate",
    "order_rows",
]

_DEFAULT_SOLVER = SolverConfig()


@dataclass(frozen=True)
class StudyPlan:
    """A refinement ladder for one manufactured case."""

    case: CaseSpec
    ladder: tuple[int, ...]
    T: float = 1.0
    solver: SolverConfig = _DEFAULT_SOLVER
    order_floor: float | None = 3.8

    def __post_init__(self) -> None:
        if len(self.ladder) < 2:
            raise ValueError("refinement ladder needs at least 2 rungs to observe orders")
        if any(b <= a for a, b in zip(self.ladder, self.ladder[1:])):
            raise ValueError("refinement ladder must be strictly increasing")


def convergence_study(plan: StudyPlan) -> list[ErrorRecord]:
    """Run every rung of the ladder and attach observed orders.

    Each rung uses N = M^2 steps.  Orders are checked against the plan's
    floor (if set) before the records are handed back for writing.
    """
    case = plan.case
    if not case.has_exact:
        raise ValueError(f"case {case.name!r} has no exact solution")
    records: list[ErrorRecord] = []
    for m in plan.ladder:
        mesh = case.make_mesh((m,) * case.dim)
        timegrid = TimeGrid(T=plan.T, N=m * m)
        final = run(
            case.u0, case.v0, case.params, mesh, timegrid,
            hook=case.source_hook(), solver=plan.solver,
        )
        rec = error_norms(
            final,
            case.exact_u, case.exact_v, case.exact_phi, case.exact_psi,
            t_node=timegrid.t(timegrid.N),
            tau=timegrid.tau,
        )
        rec.points = m
        records.append(rec)

    _attach_orders(records)
    if plan.order_floor is not None:
        observed = [
            o
            for rec in records
            for o in (
                rec.order_u_l2, rec.order_u_h1, rec.order_v_l2,
                rec.order_v_h1, rec.order_phi_l2, rec.order_psi_l2,
            )
            if o is not None
        ]
        bad = [o for o in observed if o < plan.order_floor]
        if bad:
            raise RuntimeError(
                f"observed convergence orders {sorted(bad)} fall below "
                f"the floor {plan.order_floor}"
            )
    return records


def _order(e_coarse: float, e_fine: float, m_coarse: int, m_fine: int) -> float | None:
    if e_coarse <= 0.0 or e_fine <= 0.0:
        return None
    return math.log(e_coarse / e_fine) / math.log(m_fine / m_coarse)


def _attach_orders(records: list[ErrorRecord]) -> None:
    for prev, cur in zip(records, records[1:]):
        mc, mf = prev.points, cur.points
        cur.order_u_l2 = _order(prev.err_u_l2, cur.err_u_l2, mc, mf)
        cur.order_u_h1 = _order(prev.err_u_h1, cur.err_u_h1, mc, mf)
        cur.order_v_l2 = _order(prev.err_v_l2, cur.err_v_l2, mc, mf)
        cur.order_v_h1 = _order(prev.err_v_h1, cur.err_v_h1, mc, mf)
        cur.order_phi_l2 = _order(prev.err_phi_l2, cur.err_phi_l2, mc, mf)
        cur.order_psi_l2 = _order(prev.err_psi_l2, cur.err_psi_l2, mc, mf)


def order_rows(records: list[ErrorRecord]) -> tuple[list[list], list[list]]:
    """Flatten error records into the two order-table layouts.

    First table: M, wavefield L2/H1 errors with orders.  Second table:
    M, relaxation-variable L2 errors with orders.
    """
    uv, phipsi = [], []
    for r in records:
        uv.append([
            r.points,
            r.err_u_l2, r.order_u_l2, r.err_u_h1, r.order_u_h1,
            r.err_v_l2, r.order_v_l2, r.err_v_h1, r.order_v_h1,
        ])
        phipsi.append([r.points, r.err_phi_l2, r.order_phi_l2, r.err_psi_l2, r.order_psi_l2])
    return uv, phipsi


def _invariant_collector(case: CaseSpec, timegrid: TimeGrid, cadence: int):
    """Observer building the invariant stream along a run.

    The start-up energy needs the first half-level pair, so the n = 0
    record is completed when the first step arrives.  The final node has
    no next relaxation level; its half-sum column closes the recurrence
    with the explicit mirror value (algebraically equal to the node mass).
    """
    records: list[InvariantRecord] = []
    holder: dict = {}

    def observer(state: RelaxState, t: float) -> None:
        if state.n == 0:
            holder["state0"] = state
            m_u, m_v = mass(state)
            r_u, r_v = relaxation_mass(state)
            records.append(InvariantRecord(0, t, m_u, m_v, r_u, r_v, float("nan")))
            return
        if state.n == 1:
            records[0].E = energy(
                holder["state0"], case.params, "initial",
                phi_half=state.Phi, psi_half=state.Psi,
            )
        sampled = state.n % cadence == 0 or state.n == timegrid.N
        if not sampled:
            return
        m_u, m_v = mass(state)
        phi_next, psi_next = relax_update(state)
        if state.n < timegrid.N:
            r_u, r_v = relaxation_mass(state, phi_next, psi_next, n_final=timegrid.N)
            e = energy(state, case.params, "interior")
        else:
            # closing value: 0.5*(mirror + stored) integrates to the node mass
            hvol = state.mesh.cell_volume
            r_u = 0.5 * hvol * float(np.sum(phi_next.values + state.Phi.values))
            r_v = 0.5 * hvol * float(np.sum(psi_next.values + state.Psi.values))
            e = energy(state, case.params, "final")
        records.append(InvariantRecord(state.n, t, m_u, m_v, r_u, r_v, e))

    return records, observer


def simulate(
    case: CaseSpec,
    T: float | None = None,
    cadence: int = 1,
    solver: SolverConfig = _DEFAULT_SOLVER,
    points: tuple[int, ...] | None = None,
    tau: float | None = None,
) -> list[InvariantRecord]:
    """March a case and sample the invariant stream (no conservation claim)."""
    horizon = T if T is not None else case.default_T
    step = tau if tau is not None else case.default_tau
    if step is None:
        raise ValueError("case has no default time step; pass tau")
    mesh = case.make_mesh(points)
    timegrid = TimeGrid(T=horizon, N=round(horizon / step))
    records, observer = _invariant_collector(case, timegrid, cadence)
    run(case.u0, case.v0, case.params, mesh, timegrid,
        hook=case.source_hook(), solver=solver, observer=observer)
    return records


def conservation_run(
    case: CaseSpec,
    T: float | None = None,
    cadence: int = 1,
    solver: SolverConfig = _DEFAULT_SOLVER,
    points: tuple[int, ...] | None = None,
    tau: float | None = None,
) -> list[InvariantRecord]:
    """March a source-free case and sample the invariant stream.

    The invariants are conserved only without sources, so sourced cases
    are rejected here; use :func:`simulate` for those.
    """
    if case.has_sources:
        raise ValueError(f"case {case.name!r} has sources; invariants are not conserved")
    return simulate(case, T=T, cadence=cadence, solver=solver, points=points, tau=tau)


@dataclass
class CollisionResult:
    """Snapshot series plus the invariant stream of one collision run."""

    times: list[float]
    U_profiles: list[np.ndarray]
    V_profiles: list[np.ndarray]
    x: np.ndarray
    records: list[InvariantRecord] = dataclass_field(default_factory=list)

    def peak_series(self) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        """Per-snapshot maxima of |U| and |V|."""
        pu = np.array([np.max(np.abs(p)) for p in self.U_profiles])
        pv = np.array([np.max(np.abs(p)) for p in self.V_profiles])
        return np.array(self.times), pu, pv


def collision_run(
    case: CaseSpec,
    T: float | None = None,
    snapshot_dt: float = 0.5,
    cadence: int = 10,
    solver: SolverConfig = _DEFAULT_SOLVER,
) -> CollisionResult:
    """Run a 1D collision case, keeping modulus profiles at a fixed stride."""
    if case.dim != 1:
        raise ValueError("collision runs are 1D")
    horizon = T if T is not None else case.default_T
    mesh = case.make_mesh()
    timegrid = TimeGrid(T=horizon, N=round(horizon / case.default_tau))
    stride = max(1, round(snapshot_dt / timegrid.tau))

    records, inv_observer = _invariant_collector(case, timegrid, cadence)
    result = CollisionResult([], [], [], mesh.axis_coords(0), records)

    def observer(state: RelaxState, t: float) -> None:
        inv_observer(state, t)
        if state.n % stride == 0 or state.n == timegrid.N:
            result.times.append(t)
            result.U_profiles.append(state.U.values.copy())
            result.V_profiles.append(state.V.values.copy())

    run(case.u0, case.v0, case.params, mesh, timegrid, solver=solver, observer=observer)
    return result
