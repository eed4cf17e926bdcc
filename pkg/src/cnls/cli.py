"""Command-line front end, configuration, and on-disk artifacts.

Subcommands:

* ``run``          -- march a case and write ``invariants.csv`` (plus
  modulus snapshots for 1D cases when a snapshot stride is set);
* ``convergence``  -- run a refinement ladder and write the two order
  tables, echoing them to stdout;
* ``soliton``      -- collision presets (elastic / reflection / entangle).

Configuration lives in a YAML file (``--config``); command-line flags
override file keys, unknown keys are rejected.  Every run writes its fully
resolved configuration next to its outputs so the artifact reproduces from
that file alone.  The output root honors the ``CNLS_OUT`` environment
variable unless ``--outdir`` is given.

File schemas (consumed by the plotting package):

* ``invariants.csv`` -- header ``step,time,M_u,M_v,R_u,R_v,E,absdrift_M_u,
  absdrift_M_v,absdrift_R_u,absdrift_R_v,absdrift_E``; floats printed with
  17 significant digits in scientific notation.
* snapshots -- one plain-text file per sample, header line ``# t=<time>``,
  then rows ``x[,y[,z]],re_u,im_u,re_v,im_v`` with the x index fastest.
* order tables -- ``orders_uv.csv`` with header ``M,err_U_L2,order,
  err_U_H1,order,err_V_L2,order,err_V_H1,order`` and ``orders_phipsi.csv``
  with ``M,err_Phi_L2,order,err_Psi_L2,order``; absent orders print ``--``.
"""

from __future__ import annotations

import argparse
import os
import sys
from dataclasses import asdict, dataclass, field
from pathlib import Path

import numpy as np
import yaml

from . import cases
from .diagnostics import ErrorRecord, InvariantRecord
from .harness import (
    CollisionResult,
    StudyPlan,
    collision_run,
    convergence_study,
    order_rows,
    simulate,
)
from .linsolve import SolverConfig, SolverError

__all__ = [
    "RunConfig",
    "ConfigError",
    "main",
    "write_invariants_csv",
    "write_snapshots",
    "write_order_tables",
]

INVARIANTS_HEADER = (
    "step,time,M_u,M_v,R_u,R_v,E,"
    "absdrift_M_u,absdrift_M_v,absdrift_R_u,absdrift_R_v,absdrift_E"
)
ORDERS_UV_HEADER = "M,err_U_L2,order,err_U_H1,order,err_V_L2,order,err_V_H1,order"
ORDERS_PHIPSI_HEADER = "M,err_Phi_L2,order,err_Psi_L2,order"


class ConfigError(ValueError):
    pass


_SOLVER_KEYS = {"method", "tol", "max_iter", "restart"}
_CONFIG_KEYS = {
    "case", "T", "tau", "points", "cadence", "snapshot_dt",
    "alpha", "beta", "kappa", "outdir", "ladder", "solver",
}


@dataclass
class RunConfig:
    """Validated, fully resolved run configuration."""

    case: str
    T: float | None = None
    tau: float | None = None
    points: list[int] | None = None
    cadence: int = 1
    snapshot_dt: float | None = None
    alpha: float | None = None
    beta: float | None = None
    kappa: float | None = None
    outdir: str | None = None
    ladder: list[int] | None = None
    solver: SolverConfig = field(default_factory=SolverConfig)

    @classmethod
    def from_mapping(cls, data: dict) -> "RunConfig":
        unknown = set(data) - _CONFIG_KEYS
        if unknown:
            raise ConfigError(f"unknown config key: {sorted(unknown)[0]!r}")
        solver_data = data.get("solver") or {}
        bad = set(solver_data) - _SOLVER_KEYS
        if bad:
            raise ConfigError(f"unknown config key: {'solver.' + sorted(bad)[0]!r}")
        if "case" not in data or not data["case"]:
            raise ConfigError("config must name a case")
        try:
            solver = SolverConfig(**solver_data)
        except (TypeError, ValueError) as err:
            raise ConfigError(f"invalid solver block: {err}") from err
        kwargs = {k: v for k, v in data.items() if k != "solver"}
        cfg = cls(solver=solver, **kwargs)
        if cfg.cadence < 1:
            raise ConfigError("cadence must be >= 1")
        if cfg.ladder is not None and len(cfg.ladder) < 2:
            raise ConfigError("ladder must list at least 2 mesh sizes")
        return cfg

    def resolved_dict(self) -> dict:
        data = asdict(self)
        data["solver"] = {
            "method": self.solver.method,
            "tol": self.solver.tol,
            "max_iter": self.solver.max_iter,
            "restart": self.solver.restart,
        }
        return data


def _fmt(x) -> str:
    if x is None:
        return "--"
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    return f"{float(x):.16E}"


def write_invariants_csv(path: Path, records: list[InvariantRecord]) -> None:
    base = records[0] if records else None
    lines = [INVARIANTS_HEADER]
    for r in records:
        drifts = (
            abs(r.M_u - base.M_u), abs(r.M_v - base.M_v),
            abs(r.R_u - base.R_u), abs(r.R_v - base.R_v),
            abs(r.E - base.E),
        )
        cells = [str(r.step), _fmt(r.time), _fmt(r.M_u), _fmt(r.M_v),
                 _fmt(r.R_u), _fmt(r.R_v), _fmt(r.E)] + [_fmt(d) for d in drifts]
        lines.append(",".join(cells))
    path.write_text("\n".join(lines) + "\n")


def write_snapshots(outdir: Path, result: CollisionResult) -> None:
    outdir.mkdir(parents=True, exist_ok=True)
    for k, (t, up, vp) in enumerate(zip(result.times, result.U_profiles, result.V_profiles)):
        lines = [f"# t={_fmt(t)}"]
        for x, uu, vv in zip(result.x, up, vp):
            lines.append(
                f"{_fmt(x)},{_fmt(uu.real)},{_fmt(uu.imag)},{_fmt(vv.real)},{_fmt(vv.imag)}"
            )
        (outdir / f"snapshot_{k:05d}.txt").write_text("\n".join(lines) + "\n")


def write_order_tables(outdir: Path, records: list[ErrorRecord]) -> tuple[Path, Path]:
    uv, phipsi = order_rows(records)
    p1 = outdir / "orders_uv.csv"
    p2 = outdir / "orders_phipsi.csv"
    p1.write_text(
        "\n".join([ORDERS_UV_HEADER] + [",".join(_fmt(c) for c in row) for row in uv]) + "\n"
    )
    p2.write_text(
        "\n".join([ORDERS_PHIPSI_HEADER] + [",".join(_fmt(c) for c in row) for row in phipsi]) + "\n"
    )
    return p1, p2


def _print_order_table(records: list[ErrorRecord]) -> None:
    uv, phipsi = order_rows(records)

    def show(val) -> str:
        if val is None:
            return "  --  "
        if isinstance(val, int):
            return str(val)
        if abs(val) < 10 and abs(val) > 0.1:
            return f"{val:.2f}"
        return f"{val:.4E}"

    print("M     ||U-u||      C.O.   ||U-u||_1    C.O.   ||V-v||      C.O.   ||V-v||_1    C.O.")
    for row in uv:
        print("  ".join(show(c) for c in row))
    print("M     ||Phi-phi||  C.O.   ||Psi-psi||  C.O.")
    for row in phipsi:
        print("  ".join(show(c) for c in row))


def _resolve_outdir(cfg: RunConfig, command: str) -> Path:
    if cfg.outdir:
        root = Path(cfg.outdir)
    else:
        root = Path(os.environ.get("CNLS_OUT", "cnls_out")) / f"{command}-{cfg.case}"
    root.mkdir(parents=True, exist_ok=True)
    return root


def _case_from_config(cfg: RunConfig) -> cases.CaseSpec:
    spec = cases.by_name(cfg.case, alpha=cfg.alpha, beta=cfg.beta)
    if cfg.kappa is not None or cfg.beta is not None:
        from dataclasses import replace

        from .stepper import SchemeParams

        params = SchemeParams(
            kappa=cfg.kappa if cfg.kappa is not None else spec.params.kappa,
            beta=cfg.beta if cfg.beta is not None else spec.params.beta,
        )
        spec = replace(spec, params=params)
    return spec


def _write_resolved_config(cfg: RunConfig, outdir: Path) -> None:
    data = cfg.resolved_dict()
    data["outdir"] = str(outdir)
    (outdir / "config.yaml").write_text(yaml.safe_dump(data, sort_keys=True))


def cmd_run(cfg: RunConfig) -> int:
    spec = _case_from_config(cfg)
    outdir = _resolve_outdir(cfg, "run")
    points = tuple(cfg.points) if cfg.points else None
    want_snapshots = spec.dim == 1 and (cfg.snapshot_dt is not None or spec.name == "soliton")
    if want_snapshots:
        result = collision_run(
            spec, T=cfg.T, snapshot_dt=cfg.snapshot_dt or 0.5,
            cadence=cfg.cadence, solver=cfg.solver,
        )
        records = result.records
        write_snapshots(outdir / "snapshots", result)
    else:
        records = simulate(
            spec, T=cfg.T, cadence=cfg.cadence, solver=cfg.solver,
            points=points, tau=cfg.tau,
        )
    write_invariants_csv(outdir / "invariants.csv", records)
    _write_resolved_config(cfg, outdir)
    print(f"wrote {outdir / 'invariants.csv'} ({len(records)} rows)")
    return 0


def cmd_convergence(cfg: RunConfig) -> int:
    if cfg.ladder is None:
        raise ConfigError("convergence needs a ladder of mesh sizes")
    spec = _case_from_config(cfg)
    outdir = _resolve_outdir(cfg, "convergence")
    plan = StudyPlan(
        case=spec, ladder=tuple(cfg.ladder),
        T=cfg.T if cfg.T is not None else spec.default_T,
        solver=cfg.solver,
    )
    records = convergence_study(plan)
    _print_order_table(records)
    p1, p2 = write_order_tables(outdir, records)
    _write_resolved_config(cfg, outdir)
    print(f"wrote {p1} and {p2}")
    return 0


def cmd_soliton(cfg: RunConfig, preset: str) -> int:
    alpha, beta = cases.SOLITON_PRESETS[preset]
    spec = cases.soliton_1d(
        cfg.alpha if cfg.alpha is not None else alpha,
        cfg.beta if cfg.beta is not None else beta,
    )
    outdir = _resolve_outdir(cfg, f"soliton-{preset}")
    result = collision_run(
        spec, T=cfg.T, snapshot_dt=cfg.snapshot_dt or 0.5,
        cadence=cfg.cadence, solver=cfg.solver,
    )
    write_snapshots(outdir / "snapshots", result)
    write_invariants_csv(outdir / "invariants.csv", result.records)
    _write_resolved_config(cfg, outdir)
    print(f"wrote {outdir} ({len(result.times)} snapshots)")
    return 0


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="cnls",
        description="Conservative relaxation compact-difference solver for coupled "
                    "nonlinear Schrodinger systems",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def add_common(p):
        p.add_argument("--config", type=Path, help="YAML config file")
        p.add_argument("--case", help="case name")
        p.add_argument("--T", type=float, help="time horizon")
        p.add_argument("--tau", type=float, help="time step")
        p.add_argument("--cadence", type=int, help="invariant sampling stride")
        p.add_argument("--snapshot-dt", dest="snapshot_dt", type=float,
                       help="snapshot interval (1D cases)")
        p.add_argument("--alpha", type=float, help="soliton phase-velocity parameter")
        p.add_argument("--beta", type=float, help="coupling parameter override")
        p.add_argument("--kappa", type=float, help="dispersion coefficient override")
        p.add_argument("--outdir", help="output directory")
        p.add_argument("--solver-method", dest="solver_method",
                       choices=["bicgstab", "gmres", "direct1d"])
        p.add_argument("--solver-tol", dest="solver_tol", type=float)
        p.add_argument("--solver-max-iter", dest="solver_max_iter", type=int)
        p.add_argument("--solver-restart", dest="solver_restart", type=int)

    p_run = sub.add_parser("run", help="march a case, write invariants and snapshots")
    add_common(p_run)
    p_run.add_argument("--points", type=int, nargs="+", help="mesh points per axis")

    p_conv = sub.add_parser("convergence", help="refinement ladder with order tables")
    add_common(p_conv)
    p_conv.add_argument("--ladder", type=lambda s: [int(x) for x in s.split(",")],
                        help="comma-separated mesh sizes, e.g. 8,16,32")

    p_sol = sub.add_parser("soliton", help="two-soliton collision presets")
    p_sol.add_argument("preset", choices=sorted(cases.SOLITON_PRESETS))
    add_common(p_sol)

    return parser


def _merge_config(args: argparse.Namespace) -> RunConfig:
    data: dict = {}
    if args.config is not None:
        loaded = yaml.safe_load(Path(args.config).read_text())
        if loaded is None:
            loaded = {}
        if not isinstance(loaded, dict):
            raise ConfigError("config file must hold a mapping")
        data.update(loaded)

    for key in ("case", "T", "tau", "cadence", "snapshot_dt", "alpha", "beta",
                "kappa", "outdir", "ladder"):
        val = getattr(args, key, None)
        if val is not None:
            data[key] = val
    if getattr(args, "points", None) is not None:
        data["points"] = list(args.points)

    solver = dict(data.get("solver") or {})
    for flag, key in (("solver_method", "method"), ("solver_tol", "tol"),
                      ("solver_max_iter", "max_iter"), ("solver_restart", "restart")):
        val = getattr(args, flag, None)
        if val is not None:
            solver[key] = val
    if solver:
        data["solver"] = solver

    if getattr(args, "command", None) == "soliton" and "case" not in data:
        data["case"] = "soliton"

    return RunConfig.from_mapping(data)


def main(argv: list[str] | None = None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        cfg = _merge_config(args)
        if args.command == "run":
            return cmd_run(cfg)
        if args.command == "convergence":
            return cmd_convergence(cfg)
        if args.command == "soliton":
            return cmd_soliton(cfg, args.preset)
        parser.error(f"unknown command {args.command!r}")
    except ConfigError as err:
        print(f"config error: {err}", file=sys.stderr)
        return 2
    except SolverError as err:
        print(f"solver failure: {err}", file=sys.stderr)
        return 1
    except (OSError, RuntimeError, ValueError) as err:
        print(f"error: {err}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
