"""Command-line dispatcher.

Exit codes: 0 success, 1 domain or input error, 2 usage error.
"""
from __future__ import annotations

import argparse
import sys
import warnings
from pathlib import Path

import numpy as np

from .berry import MomentumPath, berry_phase_loop
from .config import SCENARIO_KINDS, ConfigError, RunConfig, parse_config
from .dynamics import TrajectoryAborted, integrate
from .fileio import fmt, read_grid_binary, read_path_csv, write_grid_binary, write_grid_csv, write_trajectory_csv
from .modes import ModeSpec, grid_norm, oam_expectation, probability_current, ring_peak_radius, sample_mode
from .paraxial import propagate
from .symplectic import COORD_NAMES, build_frame

__all__ = ["main", "build_parser"]


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(2, f"{self.prog}: error: {message}\n")


def _vec(text):
    try:
        v = [float(x) for x in text.split(",")]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected x,y,z, got {text!r}") from None
    if len(v) != 3:
        raise argparse.ArgumentTypeError(f"expected three comma-separated numbers, got {text!r}")
    return np.array(v)


def _load_config(path) -> RunConfig:
    if path is None:
        return RunConfig()
    try:
        data = Path(path).read_bytes()
    except OSError as exc:
        raise OSError(f"{path}: {exc.strerror or exc}") from exc
    return parse_config(data)


def _cmd_modes(args, out):
    cfg = _load_config(args.config)
    u = cfg.unit_system()
    spec = ModeSpec(l=args.l, m_radial=args.m, waist=args.waist, units=u)
    grid = sample_mode(spec, args.grid_n, extent=args.extent, tau=args.tau)
    if args.out:
        if args.format == "csv":
            write_grid_csv(grid, args.out, probability_current(spec, grid))
        else:
            write_grid_binary(grid, args.out)
    print(f"l = {spec.l}, m = {spec.m_radial}, waist = {fmt(spec.waist)}, tau = {fmt(args.tau)}", file=out)
    print(f"norm = {fmt(grid_norm(grid))}", file=out)
    print(f"oam = {fmt(oam_expectation(grid))}", file=out)
    print(f"ring_radius = {fmt(ring_peak_radius(spec, args.tau))}", file=out)
    return 0


def _cmd_propagate(args, out):
    cfg = _load_config(args.config)
    grid = read_grid_binary(args.input)
    res = propagate(grid, args.tau, args.steps, cfg.unit_system())
    write_grid_binary(res, args.out)
    print(f"tau = {fmt(res.tau)}, norm = {fmt(grid_norm(res))}, flags = {','.join(res.flags) or 'none'}", file=out)
    return 0


def _cmd_berry(args, out):
    pts = read_path_csv(args.path)
    closed = len(pts) > 1 and np.allclose(pts[0], pts[-1])
    if args.close and not closed:
        pts = np.vstack([pts, pts[:1]])
        closed = True
    res = berry_phase_loop(MomentumPath(pts, closed=closed), args.l)
    print("quantity,value", file=out)
    print(f"phase,{fmt(res.phase)}", file=out)
    print(f"line_integral,{fmt(res.line_integral)}", file=out)
    print(f"solid_angle_phase,{fmt(res.solid_angle)}", file=out)
    print(f"method,{res.method}", file=out)
    print(f"gauge,{res.gauge_label}", file=out)
    return 0


def _cmd_trace(args, out):
    cfg = _load_config(args.config)
    try:
        traj = integrate(cfg.initial_state(), cfg.field_config(), cfg.zeeman(), cfg.integrator_config())
    except TrajectoryAborted as exc:
        if args.out:
            write_trajectory_csv(exc.trajectory, args.out)
        raise
    if args.out:
        write_trajectory_csv(traj, args.out)
        print(f"{len(traj)} rows written to {args.out} (gauge {traj.gauge_label})", file=out)
    else:
        from .dynamics import CSV_COLUMNS

        print(",".join(CSV_COLUMNS), file=out)
        for row in traj.data:
            print(",".join(fmt(v) for v in row), file=out)
    return 0


def _cmd_symplectic(args, out):
    cfg = _load_config(args.config)
    frame = build_frame(args.r, args.p, args.l, cfg.field_config())
    width = 24
    print(",".join(["bracket".rjust(8)] + [c.rjust(width) for c in COORD_NAMES]), file=out)
    for i, name in enumerate(COORD_NAMES):
        cells = [format(float(frame.brackets[i, j]), ".15e").rjust(width) for j in range(6)]
        print(",".join([name.rjust(8)] + cells), file=out)
    print(f"{'D'.rjust(8)},{format(frame.D, '.15e').rjust(width)}", file=out)
    return 0


def _cmd_scenario(args, out):
    from .scenarios import run_scenario

    cfg = _load_config(args.config)
    files = run_scenario(cfg, args.out, kind=args.kind)
    print(f"{args.kind}: wrote manifest and {len(files)} files to {args.out}", file=out)
    return 0


def _cmd_selftest(args, out):
    from .checks import run_all

    numbers = None
    if args.only:
        numbers = {int(x) for x in args.only.split(",")}
    results = run_all(numbers)
    for r in results:
        print(r.line(), file=out)
    failed = [r for r in results if not r.passed]
    print(f"{len(results) - len(failed)}/{len(results)} checks passed", file=out)
    return 1 if failed else 0


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="vortexpacket", description="OAM wave-packet dynamics toolkit")
    sub = p.add_subparsers(dest="command", metavar="command", parser_class=_Parser)
    sub.required = True

    s = sub.add_parser("modes", help="sample an LG mode on a grid")
    s.add_argument("--l", type=int, default=1)
    s.add_argument("--m", type=int, default=0)
    s.add_argument("--grid-n", type=int, default=256)
    s.add_argument("--extent", type=float)
    s.add_argument("--waist", type=float)
    s.add_argument("--tau", type=float, default=0.0)
    s.add_argument("--format", choices=("binary", "csv"), default="binary")
    s.add_argument("--config")
    s.add_argument("--out")
    s.set_defaults(func=_cmd_modes)

    s = sub.add_parser("propagate", help="spectral free propagation of a VPGRID01 file")
    s.add_argument("--in", dest="input", required=True)
    s.add_argument("--tau", type=float, required=True)
    s.add_argument("--steps", type=int, default=1)
    s.add_argument("--config")
    s.add_argument("--out", required=True)
    s.set_defaults(func=_cmd_propagate)

    s = sub.add_parser("berry", help="Berry phase of a momentum path (CSV of p_x,p_y,p_z)")
    s.add_argument("--path", required=True)
    s.add_argument("--l", type=int, required=True)
    s.add_argument("--close", action="store_true", help="append the first point if needed")
    s.set_defaults(func=_cmd_berry)

    s = sub.add_parser("trace", help="integrate a center trajectory from a config file")
    s.add_argument("--config", required=True)
    s.add_argument("--out")
    s.set_defaults(func=_cmd_trace)

    s = sub.add_parser("symplectic", help="print the bracket table and D")
    s.add_argument("--r", type=_vec, default=np.zeros(3))
    s.add_argument("--p", type=_vec, required=True)
    s.add_argument("--l", type=int, required=True)
    s.add_argument("--config", help="field block is taken from this file")
    s.set_defaults(func=_cmd_symplectic)

    s = sub.add_parser("scenario", help="run a canned scenario")
    s.add_argument("kind", choices=SCENARIO_KINDS)
    s.add_argument("--config")
    s.add_argument("--out", required=True)
    s.set_defaults(func=_cmd_scenario)

    s = sub.add_parser("selftest", help="run the acceptance checks")
    s.add_argument("--only", help="comma-separated check numbers")
    s.set_defaults(func=_cmd_selftest)
    return p


def main(argv=None, out=None) -> int:
    out = out or sys.stdout
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        with warnings.catch_warnings():
            warnings.simplefilter("default")
            return args.func(args, out)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 1
    except (ValueError, OSError, TrajectoryAborted, RuntimeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
