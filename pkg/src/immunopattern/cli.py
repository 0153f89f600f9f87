"""Command-line interface.

Subcommands: equilibria, dispersion, hopf, region, simulate, ode.  Every
run resolves its parameters as flag > config file > scenario preset,
writes a manifest.json into the output directory before computing, and
emits CSV (9 significant digits, byte-stable across reruns), binary
snapshots and PNG heatmaps as appropriate.

Exit codes: 0 success, 1 no result (no equilibrium / no crossing),
2 usage or config error, 3 numerical failure.
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import os
import sys
from importlib import resources
from pathlib import Path

import numpy as np

from . import __version__
from .errors import (BlowUpError, BracketError, ConfigError, ConvergenceError,
                     DomainError, NegativityError, NoResultError)
from .kinetics import ModelParams, parse_kv, preset
from .equilibria import cancer_free_equilibrium, coexistence_equilibria, existence_region
from .stability import (REFERENCE_D32_THRESHOLD, critical_d32, dispersion_relation,
                        hopf_scan)
from .ode import cycle_metrics, integrate
from .pde import SimConfig, simulate, stable_dt_bound
from .metrics import pattern_report
from . import io as out

_OUTDIR_ENV = "IMMUNOPATTERN_OUTDIR"
_SOLVER_KEYS = ("scenario", "ic", "dims", "dx", "dt", "t_end", "snapshots",
                "snap_every", "negativity", "workers", "probe_x", "probe_y",
                "persist_stride")


def _add_param_flags(parser):
    parser.add_argument("--scenario", choices=("untreated", "treated", "kirschner-table1"),
                        default="untreated")
    for name in ModelParams.field_names():
        flag = "--tau-l" if name == "tau_L" else f"--{name}"
        parser.add_argument(flag, dest=name, type=float, default=None,
                            help=argparse.SUPPRESS)
    parser.add_argument("--outdir", default=None,
                        help=f"output directory (default ${_OUTDIR_ENV} or ./immunopattern_out)")


def _resolve_params(args, file_values=None) -> ModelParams:
    scenario = args.scenario
    if file_values and "scenario" in file_values:
        scenario = file_values["scenario"]
    p = preset(scenario)
    if file_values:
        fields = {k: float(v) for k, v in file_values.items()
                  if k in ModelParams.field_names()}
        if fields:
            p = p.replace(**fields)
    overrides = {name: getattr(args, name) for name in ModelParams.field_names()
                 if getattr(args, name) is not None}
    if overrides:
        p = p.replace(**overrides)
    return p


def _outdir(args) -> Path:
    path = Path(args.outdir or os.environ.get(_OUTDIR_ENV, "immunopattern_out"))
    path.mkdir(parents=True, exist_ok=True)
    return path


def _write_manifest(outdir: Path, subcommand: str, p: ModelParams, args,
                    extra=None, config_path=None):
    manifest = {
        "artifact_version": __version__,
        "subcommand": subcommand,
        "scenario": args.scenario,
        "config_file": str(config_path) if config_path else None,
        "outdir": str(outdir),
        "params": p.as_dict(),
        "settings": extra or {},
        "deterministic": True,  # no RNG anywhere in a run
    }
    with open(outdir / "manifest.json", "w") as fh:
        json.dump(manifest, fh, indent=2, sort_keys=True)
        fh.write("\n")


def _eig_columns(eigs):
    cols = []
    for lam in eigs:
        cols.extend([lam.real, lam.imag])
    return cols


def cmd_equilibria(args) -> int:
    p = _resolve_params(args)
    outdir = _outdir(args)
    _write_manifest(outdir, "equilibria", p, args)
    rows = []
    found = []
    cfe = cancer_free_equilibrium(p)
    if cfe is not None:
        found.append(cfe)
    found.extend(coexistence_equilibria(p))
    header = ("kind", "u", "v", "w", "re1", "im1", "re2", "im2", "re3", "im3",
              "stability", "residual")
    for eq in found:
        rows.append((eq.kind, *eq.state, *_eig_columns(eq.eigenvalues),
                     eq.stability, eq.residual))
    out.write_csv(outdir / "equilibria.csv", header, rows)
    if not found:
        print("no equilibria found for these parameters")
        return 1
    widths = (5, 13, 13, 13, 10)
    print(f"{'kind':<5} {'u':>13} {'v':>13} {'w':>13} {'verdict':>10}  eigenvalues")
    for eq in found:
        eigs = ", ".join(f"{lam.real:.6g}{lam.imag:+.6g}j" for lam in eq.eigenvalues)
        print(f"{eq.kind:<5} {eq.state[0]:>13.9g} {eq.state[1]:>13.9g} "
              f"{eq.state[2]:>13.9g} {eq.stability:>10}  [{eigs}]")
    return 0


def _pick_base_state(p: ModelParams):
    eqs = coexistence_equilibria(p)
    if not eqs:
        raise NoResultError("no coexistence equilibrium under these parameters")
    stable = [e for e in eqs if e.is_stable]
    return (stable or eqs)[-1]


def cmd_dispersion(args) -> int:
    p = _resolve_params(args)
    outdir = _outdir(args)
    settings = {"k_min": args.k_min, "k_max": args.k_max, "k_step": args.k_step,
                "find_critical": args.find_critical,
                "d32_lo": args.d32_lo, "d32_hi": args.d32_hi}
    _write_manifest(outdir, "dispersion", p, args, settings)
    eq = _pick_base_state(p)
    if args.k_max < args.k_min:
        raise ConfigError("need --k-max >= --k-min")
    k_grid = np.arange(args.k_min, args.k_max + args.k_step / 2, args.k_step)
    if k_grid.size == 0:
        k_grid = np.array([args.k_min])
    dr = dispersion_relation(p, eq.state, k_grid)
    out.write_csv(outdir / "dispersion.csv", ("k", "growth", "frequency"),
                  zip(dr.k, dr.growth, dr.frequency))
    print(f"base state ({eq.stability} CCE): u={eq.state[0]:.9g} "
          f"v={eq.state[1]:.9g} w={eq.state[2]:.9g}")
    print(f"growth_max = {dr.growth_max:.9g} at k = {dr.k_max:.9g}")
    if not args.find_critical:
        return 0
    thr = critical_d32(p, eq.state, args.d32_lo, args.d32_hi, k_grid)
    ref = REFERENCE_D32_THRESHOLD.get(args.scenario)
    lines = [f"d32_critical = {thr:.9g}",
             f"bracket_lo = {args.d32_lo:.9g}",
             f"bracket_hi = {args.d32_hi:.9g}"]
    if ref is not None:
        lines.append(f"reference_truncated = {ref:.9g}")
        lines.append(f"difference = {thr - ref:.9g}")
        lines.append("note = reference derives from the linear-in-k^2 truncation of "
                     "the determinant coefficient; this threshold uses the full "
                     "determinant (k^4 and k^6 terms included), see dispersion.csv")
    (outdir / "critical_d32.txt").write_text("\n".join(lines) + "\n")
    for line in lines:
        print(line)
    return 0


def cmd_hopf(args) -> int:
    p = _resolve_params(args)
    outdir = _outdir(args)
    _write_manifest(outdir, "hopf", p, args,
                    {"p2_lo": args.p2_lo, "p2_hi": args.p2_hi})
    res = hopf_scan(p, args.p2_lo, args.p2_hi)
    if res is None:
        print(f"no stability crossing of the complex pair on "
              f"[{args.p2_lo:g}, {args.p2_hi:g}]")
        return 1
    out.write_csv(outdir / "hopf.csv",
                  ("p2_critical", "re", "im", "bracket_lo", "bracket_hi",
                   "u", "v", "w"),
                  [(res.p2_critical, res.eigenpair[1].real, res.eigenpair[1].imag,
                    res.bracket[0], res.bracket[1], *res.state)])
    print(f"p2_critical = {res.p2_critical:.9g}")
    print(f"eigenpair = {res.eigenpair[1].real:.9g} +/- {abs(res.eigenpair[1].imag):.9g}j")
    return 0


def cmd_region(args) -> int:
    p = _resolve_params(args)
    outdir = _outdir(args)
    if args.p2_steps < 1 or args.c_steps < 1:
        raise ConfigError("grid steps must be >= 1")
    _write_manifest(outdir, "region", p, args,
                    {"p2_lo": args.p2_lo, "p2_hi": args.p2_hi,
                     "p2_steps": args.p2_steps, "c_lo": args.c_lo,
                     "c_hi": args.c_hi, "c_steps": args.c_steps,
                     "log_p2": not args.linear_p2})
    if args.linear_p2:
        p2_grid = np.linspace(args.p2_lo, args.p2_hi, args.p2_steps)
    else:
        if args.p2_lo <= 0:
            raise ConfigError("log-sampled p2 grid needs --p2-lo > 0")
        p2_grid = np.geomspace(args.p2_lo, args.p2_hi, args.p2_steps)
    c_grid = np.linspace(args.c_lo, args.c_hi, args.c_steps)
    grid = existence_region(p, p2_grid, c_grid, args.scenario)
    rows = ((p2_grid[i], c_grid[j], int(grid[i, j]))
            for i in range(p2_grid.size) for j in range(c_grid.size))
    out.write_csv(outdir / "region.csv", ("p2", "c", "exists"), rows)
    n_true = int(grid.sum())
    print(f"{n_true} of {grid.size} grid points admit a coexistence equilibrium")
    return 0


def _load_sim_file(spec: str):
    path = Path(spec)
    if path.exists():
        return parse_kv(path.read_text()), path
    name = spec if spec.endswith(".cfg") else spec + ".cfg"
    ref = resources.files("immunopattern").joinpath("configs", name)
    if ref.is_file():
        return parse_kv(ref.read_text()), ref
    raise ConfigError(f"config {spec!r} is neither a file nor a shipped config name")


def cmd_simulate(args) -> int:
    file_values, config_path = ({}, None)
    if args.config:
        file_values, config_path = _load_sim_file(args.config)
        unknown = [k for k in file_values
                   if k not in _SOLVER_KEYS and k not in ModelParams.field_names()]
        if unknown:
            raise ConfigError(f"unknown config keys: {', '.join(sorted(unknown))}")
    p = _resolve_params(args, file_values)

    def setting(flag_value, key, cast, default):
        if flag_value is not None:
            return flag_value
        if key in file_values:
            return cast(file_values[key])
        return default

    ic = int(setting(args.ic, "ic", int, 1))
    dims = int(setting(args.dims, "dims", int, 2))
    dx = float(setting(args.dx, "dx", float, 0.01))
    dt = float(setting(args.dt, "dt", float, 1e-3))
    t_end = float(setting(args.t_end, "t_end", float, 200.0))
    negativity = setting(args.negativity, "negativity", str, "abort")
    workers = int(setting(args.workers, "workers", int, 1))
    probe_x = float(setting(args.probe_x, "probe_x", float, 0.5))
    probe_y = float(setting(args.probe_y, "probe_y", float, 0.5 if dims == 2 else 0.0))
    stride = int(setting(args.persist_stride, "persist_stride", int, 1))
    if args.snapshots is not None:
        snap_times = tuple(float(s) for s in args.snapshots.split(","))
    elif "snapshots" in file_values:
        snap_times = tuple(float(s) for s in file_values["snapshots"].split(","))
    else:
        every = float(setting(args.snap_every, "snap_every", float, t_end / 10))
        snap_times = tuple(np.arange(0.0, t_end + every / 2, every))

    try:
        cfg = SimConfig(params=p, ic_variant=ic, dims=dims, dx=dx, dt=dt,
                        t_end=t_end, snapshot_times=snap_times,
                        negativity=negativity, workers=workers)
    except ConfigError as exc:
        if "stability bound" in str(exc):
            bound = stable_dt_bound(p, dx, dx if dims == 2 else 0.0)
            raise ConfigError(f"{exc}; largest admissible dt is {bound:.9g}") from None
        raise

    outdir = _outdir(args)
    _write_manifest(outdir, "simulate", p, args,
                    {"ic": ic, "dims": dims, "dx": dx, "dt": dt, "t_end": t_end,
                     "snapshots": list(snap_times), "negativity": negativity,
                     "workers": workers, "probe_x": probe_x, "probe_y": probe_y,
                     "persist_stride": stride},
                    config_path)

    snaps = simulate(cfg)
    persisted = snaps[::stride]
    if snaps[-1] is not persisted[-1]:
        persisted = list(persisted) + [snaps[-1]]
    for idx, snap in enumerate(persisted):
        tag = f"snap_{idx:04d}"
        out.save_snapshot_csv(snap, outdir, tag)
        out.save_snapshot_bin(snap, outdir / f"{tag}.bin")
        out.save_snapshot_pngs(snap, outdir, tag)

    probe = (probe_x, probe_y)
    report = pattern_report(snaps, probe=probe)
    (outdir / "report.txt").write_text(report.to_kv())
    kv_pairs = [ln.split(" = ") for ln in report.to_kv().strip().splitlines()]
    out.write_csv(outdir / "report.csv",
                  [k for k, _ in kv_pairs], [[v for _, v in kv_pairs]])
    print(report.to_kv(), end="")
    print(f"{len(snaps)} snapshots recorded, {len(persisted)} persisted to {outdir}")
    return 0


def cmd_ode(args) -> int:
    p = _resolve_params(args)
    outdir = _outdir(args)
    _write_manifest(outdir, "ode", p, args,
                    {"u0": args.u0, "v0": args.v0, "w0": args.w0,
                     "t_end": args.t_end, "dt": args.dt,
                     "record_every": args.record_every})
    tr = integrate(p, (args.u0, args.v0, args.w0), args.t_end, dt=args.dt,
                   record_every=args.record_every)
    out.write_csv(outdir / "trajectory.csv", ("t", "u", "v", "w"),
                  ((tr.t[i], *tr.states[i]) for i in range(len(tr.t))))
    cm = cycle_metrics(tr)
    if cm is None:
        print(f"no sustained oscillation; final state "
              f"({tr.final[0]:.9g}, {tr.final[1]:.9g}, {tr.final[2]:.9g})")
    else:
        print(f"limit cycle: period = {cm.period:.9g}, "
              f"amplitude = ({cm.amplitude[0]:.9g}, {cm.amplitude[1]:.9g}, "
              f"{cm.amplitude[2]:.9g})")
    return 0


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="immunopattern",
        description="Equilibria, bifurcations and cross-diffusion patterns of a "
                    "three-species tumor-immune reaction-diffusion model.",
        allow_abbrev=False)
    ap.add_argument("--version", action="version", version=__version__)
    sub = ap.add_subparsers(dest="command", required=True)

    eq = sub.add_parser("equilibria", help="cancer-free and coexistence steady states",
                        allow_abbrev=False)
    _add_param_flags(eq)
    eq.set_defaults(fn=cmd_equilibria)

    disp = sub.add_parser("dispersion", help="growth rate vs wavenumber scan",
                          allow_abbrev=False)
    _add_param_flags(disp)
    disp.add_argument("--k-min", type=float, default=0.0)
    disp.add_argument("--k-max", type=float, default=300.0)
    disp.add_argument("--k-step", type=float, default=0.5)
    disp.add_argument("--find-critical", action="store_true",
                      help="bisect the critical cross-diffusion coefficient")
    disp.add_argument("--d32-lo", type=float, default=-2.0)
    disp.add_argument("--d32-hi", type=float, default=0.0)
    disp.set_defaults(fn=cmd_dispersion)

    hopf = sub.add_parser("hopf", help="locate the oscillatory stability crossing in p2",
                          allow_abbrev=False)
    _add_param_flags(hopf)
    hopf.add_argument("--p2-lo", type=float, default=0.3)
    hopf.add_argument("--p2-hi", type=float, default=0.58)
    hopf.set_defaults(fn=cmd_hopf)

    reg = sub.add_parser("region", help="scan the (p2, c) plane for CCE existence",
                         allow_abbrev=False)
    _add_param_flags(reg)
    reg.add_argument("--p2-lo", type=float, default=1e-2)
    reg.add_argument("--p2-hi", type=float, default=10.0)
    reg.add_argument("--p2-steps", type=int, default=50)
    reg.add_argument("--c-lo", type=float, default=0.0)
    reg.add_argument("--c-hi", type=float, default=1.0)
    reg.add_argument("--c-steps", type=int, default=50)
    reg.add_argument("--linear-p2", action="store_true",
                     help="sample p2 linearly instead of logarithmically")
    reg.set_defaults(fn=cmd_region)

    sim = sub.add_parser("simulate", help="explicit finite-difference PDE run",
                         allow_abbrev=False)
    _add_param_flags(sim)
    sim.add_argument("--config", default=None,
                     help="key=value config file path or shipped config name")
    sim.add_argument("--ic", type=int, default=None, choices=(1, 2, 3))
    sim.add_argument("--dims", type=int, default=None, choices=(1, 2))
    sim.add_argument("--dx", type=float, default=None)
    sim.add_argument("--dt", type=float, default=None)
    sim.add_argument("--t-end", type=float, default=None)
    sim.add_argument("--snapshots", default=None,
                     help="comma-separated snapshot times")
    sim.add_argument("--snap-every", type=float, default=None)
    sim.add_argument("--negativity", choices=("abort", "warn", "ignore"), default=None)
    sim.add_argument("--workers", type=int, default=None)
    sim.add_argument("--probe-x", type=float, default=None)
    sim.add_argument("--probe-y", type=float, default=None)
    sim.add_argument("--persist-stride", type=int, default=None,
                     help="persist every Nth recorded snapshot (default 1)")
    sim.set_defaults(fn=cmd_simulate)

    ode = sub.add_parser("ode", help="integrate the diffusion-free system",
                         allow_abbrev=False)
    _add_param_flags(ode)
    ode.add_argument("--u0", type=float, default=0.1)
    ode.add_argument("--v0", type=float, default=0.3)
    ode.add_argument("--w0", type=float, default=1.0)
    ode.add_argument("--t-end", type=float, default=400.0)
    ode.add_argument("--dt", type=float, default=1e-3)
    ode.add_argument("--record-every", type=int, default=10)
    ode.set_defaults(fn=cmd_ode)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.fn(args)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except NoResultError as exc:
        print(f"no result: {exc}", file=sys.stderr)
        return 1
    except (BlowUpError, NegativityError, ConvergenceError, BracketError,
            DomainError) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return 3
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


def entry():
    sys.exit(main())


if __name__ == "__main__":
    entry()
