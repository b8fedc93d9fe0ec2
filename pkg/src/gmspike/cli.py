"""Command-line reporting for the spike profiles.

Subcommands
-----------
analytic   evaluate the closed-form profile on a grid
residual   closed-form residual u'' - u + u**p on a grid
shoot      run the shooting solver and report the refined amplitude
compare    shooting profile versus closed form on a grid
sweep      compare for p in {2, 3, 4} x {inner, boundary}; one file per
           case plus a summary table

Every command emits CSV with the fixed header
``rho,u_analytic,u_numeric,v_numeric,abs_error`` (one schema for all
commands; columns a command does not produce stay empty, and ``residual``
reports |residual| in the abs_error column) or a JSON document embedding
the full configuration echo.  Floats are written with 17 significant
digits, '.' decimal separator, and '\\n' line endings, so identical inputs
produce byte-identical files.  No environment variables are consulted.

Exit status: 0 on success with all cases converged, 1 on solver failure or
non-convergence, 2 on usage errors.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
from dataclasses import dataclass
from pathlib import Path
from typing import Sequence

from .analytic import (
    P_MAX,
    P_MIN,
    ProblemParams,
    SpikeKind,
    eval_spike_rho,
    spike_amplitude,
)
from .ode import IntegratorConfig, default_integrator_config
from .shooting import ShootingConfig, ShootingError, ShootingResult, shoot
from .verify import ComparisonReport, compare, ode_residual

__all__ = ["RunConfig", "run", "main", "run_config_from_dict"]

CSV_HEADER = "rho,u_analytic,u_numeric,v_numeric,abs_error"

_SWEEP_EXPONENTS = (2.0, 3.0, 4.0)
_SWEEP_KINDS = (SpikeKind.INNER, SpikeKind.BOUNDARY)
_SWEEP_GRID_POINTS = 401
_SWEEP_SPAN = 10.0


@dataclass(frozen=True)
class RunConfig:
    """One CLI invocation, fully determined and serializable."""

    command: str
    params: ProblemParams
    shooting: ShootingConfig
    integrator: IntegratorConfig
    grid: tuple[float, float, int] | None = None
    out: str | None = None
    fmt: str = "csv"

    def to_dict(self) -> dict:
        return {
            "command": self.command,
            "params": {
                "p": self.params.p,
                "epsilon": self.params.epsilon,
                "half_length": self.params.half_length,
                "peak_rho": self.params.peak_rho,
                "kind": self.params.kind.value,
            },
            "shooting": {
                "delta": self.shooting.delta,
                "eta": self.shooting.eta,
                "rho_l": self.shooting.rho_l,
                "scan_points": self.shooting.scan_points,
                "refine_tol": self.shooting.refine_tol,
                "max_bisections": self.shooting.max_bisections,
            },
            "integrator": {
                "rel_tol": self.integrator.rel_tol,
                "abs_tol": self.integrator.abs_tol,
                "h_init": self.integrator.h_init,
                "h_min": self.integrator.h_min,
                "h_max": self.integrator.h_max,
                "u_cap": self.integrator.u_cap,
            },
            "grid": list(self.grid) if self.grid is not None else None,
            "format": self.fmt,
        }


def run_config_from_dict(data: dict) -> RunConfig:
    """Rebuild a RunConfig from a JSON report's configuration echo."""
    params = ProblemParams(
        p=data["params"]["p"],
        epsilon=data["params"]["epsilon"],
        half_length=data["params"]["half_length"],
        peak_rho=data["params"]["peak_rho"],
        kind=SpikeKind(data["params"]["kind"]),
    )
    shooting = ShootingConfig(**data["shooting"])
    integrator = IntegratorConfig(**data["integrator"])
    grid = tuple(data["grid"]) if data.get("grid") is not None else None
    if grid is not None:
        grid = (float(grid[0]), float(grid[1]), int(grid[2]))
    return RunConfig(
        command=data["command"],
        params=params,
        shooting=shooting,
        integrator=integrator,
        grid=grid,
        out=data.get("out"),
        fmt=data.get("format", "csv"),
    )


def _fmt(value: float) -> str:
    # +0.0 collapses negative zero so reruns cannot differ in sign of zero.
    return format(value + 0.0, ".17g")


def _make_grid(bounds: tuple[float, float, int]) -> list[float]:
    start, end, count = bounds
    if count < 2:
        raise ValueError("grid needs at least 2 points")
    if not (end > start):
        raise ValueError("grid end must exceed start")
    step = (end - start) / (count - 1)
    grid = [start + i * step for i in range(count)]
    grid[-1] = end
    return grid


def _csv_text(rows) -> str:
    lines = [CSV_HEADER]
    for row in rows:
        lines.append(",".join("" if cell is None else _fmt(cell) for cell in row))
    return "\n".join(lines) + "\n"


def _emit(text: str, out: str | None) -> None:
    if out is None:
        print(text, end="")
    else:
        path = Path(out)
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(text, newline="")


def _json_text(payload: dict) -> str:
    return json.dumps(payload, indent=2, sort_keys=False) + "\n"


def _comparison_rows(report: ComparisonReport):
    return list(report.rows())


def _run_analytic(config: RunConfig) -> int:
    grid = _make_grid(config.grid)
    values = [eval_spike_rho(config.params, rho) for rho in grid]
    if config.fmt == "csv":
        rows = [(rho, u, None, None, None) for rho, u in zip(grid, values)]
        _emit(_csv_text(rows), config.out)
    else:
        payload = {
            "config": config.to_dict(),
            "result": {"rho": grid, "u_analytic": values},
        }
        _emit(_json_text(payload), config.out)
    return 0


def _run_residual(config: RunConfig) -> int:
    grid = _make_grid(config.grid)
    residuals = ode_residual(config.params, grid)
    max_residual = max(abs(r) for r in residuals)
    if config.fmt == "csv":
        rows = [
            (rho, eval_spike_rho(config.params, rho), None, None, abs(r))
            for rho, r in zip(grid, residuals)
        ]
        _emit(_csv_text(rows), config.out)
    else:
        payload = {
            "config": config.to_dict(),
            "result": {"rho": grid, "residual": residuals, "max_abs_residual": max_residual},
        }
        _emit(_json_text(payload), config.out)
    print(f"max |residual| = {_fmt(max_residual)}")
    return 0


def _shoot_payload(config: RunConfig, result: ShootingResult) -> dict:
    return {
        "config": config.to_dict(),
        "result": {
            "a_star": result.a_star,
            "amplitude_closed_form": spike_amplitude(config.params.p),
            "bc_residual": result.bc_residual,
            "signed_bc_residual": result.signed_bc_residual,
            "converged": result.converged,
            "classifications": len(result.classifications),
            "accepted_steps": result.trajectory.accepted_steps,
            "rejected_steps": result.trajectory.rejected_steps,
            "terminal_event": result.trajectory.terminal_event.value,
        },
    }


def _run_shoot(config: RunConfig) -> int:
    result = shoot(config.params, config.shooting, config.integrator)
    print(
        f"a_star = {_fmt(result.a_star)}  bc_residual = {_fmt(result.bc_residual)}  "
        f"converged = {str(result.converged).lower()}"
    )
    if config.fmt == "csv":
        peak = config.params.peak_rho
        rows = []
        for tau, state in result.trajectory.samples:
            ua = eval_spike_rho(config.params, peak + tau)
            rows.append((tau, ua, state.u, state.v, abs(ua - state.u)))
        _emit(_csv_text(rows), config.out)
    else:
        _emit(_json_text(_shoot_payload(config, result)), config.out)
    return 0 if result.converged else 1


def _default_grid(params: ProblemParams) -> tuple[float, float, int]:
    if params.kind is SpikeKind.BOUNDARY:
        return (params.peak_rho - _SWEEP_SPAN, params.peak_rho, _SWEEP_GRID_POINTS)
    return (-_SWEEP_SPAN, _SWEEP_SPAN, _SWEEP_GRID_POINTS)


def _run_compare(config: RunConfig) -> int:
    result = shoot(config.params, config.shooting, config.integrator)
    grid = _make_grid(config.grid if config.grid is not None else _default_grid(config.params))
    report = compare(config.params, result, grid)
    print(
        f"a_star = {_fmt(result.a_star)}  max_abs_err = {_fmt(report.max_abs_err)}  "
        f"l2_err = {_fmt(report.l2_err)}"
    )
    if config.fmt == "csv":
        _emit(_csv_text(_comparison_rows(report)), config.out)
    else:
        payload = _shoot_payload(config, result)
        payload["result"]["comparison"] = {
            "grid": list(report.grid),
            "analytic": list(report.analytic),
            "numeric": list(report.numeric),
            "numeric_v": list(report.numeric_v),
            "max_abs_err": report.max_abs_err,
            "l2_err": report.l2_err,
        }
        _emit(_json_text(payload), config.out)
    return 0 if result.converged else 1


def _run_sweep(config: RunConfig) -> int:
    out_dir = Path(config.out if config.out is not None else "sweep_out")
    out_dir.mkdir(parents=True, exist_ok=True)
    summary_rows = []
    all_converged = True
    for p in _SWEEP_EXPONENTS:
        for kind in _SWEEP_KINDS:
            if kind is SpikeKind.INNER:
                params = ProblemParams.inner(p, config.params.epsilon, config.params.half_length)
            else:
                params = ProblemParams.boundary(p, config.params.epsilon, config.params.half_length)
            shooting = config.shooting
            integrator = default_integrator_config(
                p,
                rel_tol=config.integrator.rel_tol,
                abs_tol=config.integrator.abs_tol,
                h_init=config.integrator.h_init,
                h_min=config.integrator.h_min,
                h_max=config.integrator.h_max,
            )
            result = shoot(params, shooting, integrator)
            grid = _make_grid(_default_grid(params))
            report = compare(params, result, grid)
            all_converged = all_converged and result.converged
            name = f"compare_p{p:g}_{kind.value}"
            if config.fmt == "csv":
                _emit(_csv_text(_comparison_rows(report)), str(out_dir / f"{name}.csv"))
            else:
                case_config = RunConfig(
                    command="compare",
                    params=params,
                    shooting=shooting,
                    integrator=integrator,
                    grid=_default_grid(params),
                    out=None,
                    fmt="json",
                )
                payload = _shoot_payload(case_config, result)
                payload["result"]["comparison"] = {
                    "grid": list(report.grid),
                    "analytic": list(report.analytic),
                    "numeric": list(report.numeric),
                    "numeric_v": list(report.numeric_v),
                    "max_abs_err": report.max_abs_err,
                    "l2_err": report.l2_err,
                }
                _emit(_json_text(payload), str(out_dir / f"{name}.json"))
            summary_rows.append(
                {
                    "p": p,
                    "kind": kind.value,
                    "a_star": result.a_star,
                    "amplitude": spike_amplitude(p),
                    "amp_abs_err": abs(result.a_star - spike_amplitude(p)),
                    "bc_residual": result.bc_residual,
                    "signed_bc_residual": result.signed_bc_residual,
                    "max_abs_err": report.max_abs_err,
                    "l2_err": report.l2_err,
                    "converged": result.converged,
                }
            )
            print(
                f"p={p:g} {kind.value}: a_star={_fmt(result.a_star)} "
                f"max_abs_err={_fmt(report.max_abs_err)} "
                f"converged={str(result.converged).lower()}"
            )

    header = (
        "p,kind,a_star,amplitude,amp_abs_err,bc_residual,"
        "signed_bc_residual,max_abs_err,l2_err,converged"
    )
    lines = [header]
    for row in summary_rows:
        lines.append(
            ",".join(
                [
                    _fmt(row["p"]),
                    row["kind"],
                    _fmt(row["a_star"]),
                    _fmt(row["amplitude"]),
                    _fmt(row["amp_abs_err"]),
                    _fmt(row["bc_residual"]),
                    _fmt(row["signed_bc_residual"]),
                    _fmt(row["max_abs_err"]),
                    _fmt(row["l2_err"]),
                    str(row["converged"]).lower(),
                ]
            )
        )
    if config.fmt == "csv":
        _emit("\n".join(lines) + "\n", str(out_dir / "summary.csv"))
    else:
        _emit(_json_text({"config": config.to_dict(), "result": summary_rows}), str(out_dir / "summary.json"))
    return 0 if all_converged else 1


_RUNNERS = {
    "analytic": _run_analytic,
    "residual": _run_residual,
    "shoot": _run_shoot,
    "compare": _run_compare,
    "sweep": _run_sweep,
}


def run(config: RunConfig) -> int:
    """Execute one configured command and return the process exit code."""
    runner = _RUNNERS.get(config.command)
    if runner is None:
        raise ValueError(f"unknown command {config.command!r}")
    try:
        return runner(config)
    except ShootingError as exc:
        diagnostic = {"config": config.to_dict(), "error": str(exc)}
        if config.out is not None and config.command != "sweep":
            _emit(_json_text(diagnostic), config.out)
        print(f"solver failure: {exc}")
        return 1


def _parse_grid(text: str) -> tuple[float, float, int]:
    parts = text.split(":")
    if len(parts) != 3:
        raise argparse.ArgumentTypeError("grid must be start:end:count")
    try:
        start, end = float(parts[0]), float(parts[1])
        count = int(parts[2])
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"bad grid {text!r}: {exc}") from exc
    if count < 2:
        raise argparse.ArgumentTypeError("grid count must be at least 2")
    if not (end > start):
        raise argparse.ArgumentTypeError("grid end must exceed start")
    return (start, end, count)


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="gmspike",
        description="Spike solutions of u'' - u + u**p = 0: closed form and shooting.",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    for name, helptext in [
        ("analytic", "evaluate the closed-form profile on a grid"),
        ("residual", "closed-form residual on a grid"),
        ("shoot", "run the shooting solver"),
        ("compare", "shooting profile versus closed form"),
        ("sweep", "compare for p in {2,3,4} x {inner,boundary}"),
    ]:
        cmd = sub.add_parser(name, help=helptext)
        cmd.add_argument("--p", type=float, default=2.0, help=f"exponent in [{P_MIN}, {P_MAX}]")
        cmd.add_argument("--epsilon", type=float, default=0.1, help="length-scale ratio in (0, 1)")
        cmd.add_argument("--L", type=float, default=1.0, dest="half_length", help="half-domain length")
        cmd.add_argument(
            "--spike",
            choices=["inner", "boundary"],
            default="inner",
            help="spike location (ignored by sweep, which runs both)",
        )
        cmd.add_argument("--eta", type=float, default=0.01, help="boundary functional tolerance")
        cmd.add_argument("--delta", type=float, default=0.1, help="scan half-width around the amplitude")
        cmd.add_argument("--rho-l", type=float, default=None, help="truncation point (default 12)")
        cmd.add_argument("--rel-tol", type=float, default=1e-10, help="integrator relative tolerance")
        cmd.add_argument("--abs-tol", type=float, default=1e-12, help="integrator absolute tolerance")
        cmd.add_argument(
            "--grid",
            type=_parse_grid,
            default=None,
            help="evaluation grid start:end:count (use --grid=-10:10:401 for negative starts)",
        )
        cmd.add_argument("--format", choices=["csv", "json"], default="csv", dest="fmt")
        cmd.add_argument("--out", type=str, default=None, help="output file (sweep: output directory)")
    return parser


def _config_from_args(args: argparse.Namespace) -> RunConfig:
    if args.spike == "boundary" and args.command != "sweep":
        params = ProblemParams.boundary(args.p, args.epsilon, args.half_length)
    else:
        params = ProblemParams.inner(args.p, args.epsilon, args.half_length)
    shooting_kwargs = {"delta": args.delta, "eta": args.eta}
    if args.rho_l is not None:
        shooting_kwargs["rho_l"] = args.rho_l
    shooting = ShootingConfig(**shooting_kwargs)
    integrator = default_integrator_config(args.p, rel_tol=args.rel_tol, abs_tol=args.abs_tol)
    grid = args.grid
    if grid is None and args.command in ("analytic", "residual"):
        grid = _default_grid(params)
    return RunConfig(
        command=args.command,
        params=params,
        shooting=shooting,
        integrator=integrator,
        grid=grid,
        out=args.out,
        fmt=args.fmt,
    )


def main(argv: Sequence[str] | None = None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        config = _config_from_args(args)
    except ValueError as exc:
        parser.error(str(exc))
    try:
        return run(config)
    except BrokenPipeError:
        # The downstream reader went away (e.g. piping into head). Point
        # stdout at devnull so the interpreter's exit-time flush stays quiet.
        os.dup2(os.open(os.devnull, os.O_WRONLY), sys.stdout.fileno())
        return 1


if __name__ == "__main__":
    raise SystemExit(main())
