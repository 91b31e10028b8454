"""Command-line front end.

Subcommands: validate, decouple, reduce, figure, simulate.  All outputs
are deterministic given the configuration and seed: re-running a command
produces byte-identical CSV/JSON files.

Exit codes: 0 success, 1 validation failure, 2 configuration error,
3 numerical failure.
"""

import argparse
import json
import os
import sys as _sys

import numpy as np

from . import benchmarks
from .analysis import FrequencyGrid, h2_norm, hinf_estimate, relative_error_curve, simulate_dissipation
from .decoupling import decouple_index1
from .errors import (
    ConfigError,
    NotApplicableError,
    PhmorError,
    ShiftAtPoleError,
    UnboundedError,
)
from .model import validate_phdae
from .reduction import balance_split, ecrm, fcrm, moment_match, open_resistive_port
from .serialize import dump_json, load_system, save_system, system_to_dict

__all__ = ["main"]

OUT_DIR_ENV = "PHMOR_OUT_DIR"


# ----------------------------------------------------------------------
# configuration handling


def _parse_order_list(spec):
    """Parse an order specification: "4", "2,4,8", or a range "2..20"
    (default step 2, optional "2..20..3")."""
    orders = []
    for part in str(spec).split(","):
        part = part.strip()
        if ".." in part:
            pieces = part.split("..")
            if len(pieces) not in (2, 3):
                raise ConfigError("invalid order range: %r" % part)
            try:
                a, b = int(pieces[0]), int(pieces[1])
                step = int(pieces[2]) if len(pieces) == 3 else 2
            except ValueError as exc:
                raise ConfigError("invalid order range: %r" % part) from exc
            if step < 1 or b < a:
                raise ConfigError("invalid order range: %r" % part)
            orders.extend(range(a, b + 1, step))
        else:
            try:
                orders.append(int(part))
            except ValueError as exc:
                raise ConfigError("invalid order: %r" % part) from exc
    if not orders or any(r < 1 for r in orders):
        raise ConfigError("need at least one order, all >= 1")
    return orders


def _parse_shift_list(spec):
    shifts = []
    for part in str(spec).split(","):
        part = part.strip().lower()
        if part in ("inf", "infinity"):
            shifts.append(np.inf)
        else:
            try:
                shifts.append(float(part))
            except ValueError as exc:
                raise ConfigError("invalid shift: %r" % part) from exc
    if not shifts:
        raise ConfigError("need at least one shift")
    return shifts


def _parse_convection(spec):
    parts = str(spec).split(",")
    if len(parts) != 2:
        raise ConfigError("convection must be 'a1,a2'")
    try:
        return (float(parts[0]), float(parts[1]))
    except ValueError as exc:
        raise ConfigError("convection must be numeric") from exc


def _load_config_file(path):
    try:
        with open(path) as fh:
            cfg = json.load(fh)
    except OSError as exc:
        raise ConfigError("cannot read config file %s: %s" % (path, exc)) from exc
    except json.JSONDecodeError as exc:
        raise ConfigError("cannot parse config file %s: %s" % (path, exc)) from exc
    if not isinstance(cfg, dict):
        raise ConfigError("config file must hold a JSON object")
    return cfg


def _merged_option(args, cfg, name, default=None):
    """Flags win over the config file, which wins over defaults."""
    val = getattr(args, name.replace("-", "_"), None)
    if val is not None:
        return val
    if name in cfg:
        return cfg[name]
    return default


class Runner:
    """Resolved run configuration shared by the subcommands."""

    def __init__(self, args):
        cfg = _load_config_file(args.config) if getattr(args, "config", None) else {}
        self.benchmark = _merged_option(args, cfg, "benchmark")
        self.file = _merged_option(args, cfg, "file")
        if (self.benchmark is None) == (self.file is None):
            raise ConfigError("exactly one of --benchmark or --file is required")
        self.grid = int(_merged_option(args, cfg, "grid", 11))
        self.masses = int(_merged_option(args, cfg, "masses", 200))
        self.viscosity = float(_merged_option(args, cfg, "viscosity", 1.0))
        conv = _merged_option(args, cfg, "convection", "0,0")
        self.convection = _parse_convection(conv) if isinstance(conv, str) else tuple(conv)
        self.seed = int(_merged_option(args, cfg, "seed", 0))
        self.tol = float(_merged_option(args, cfg, "tol", 1e-10))
        self.methods = str(_merged_option(args, cfg, "method", "ecrm")).split(",")
        self.orders = _parse_order_list(_merged_option(args, cfg, "order", "16"))
        self.shifts = _parse_shift_list(_merged_option(args, cfg, "shift", "0,inf"))
        self.omega_min = float(_merged_option(args, cfg, "omega-min", 1e-6))
        self.omega_max = float(_merged_option(args, cfg, "omega-max", 1e6))
        self.samples = int(_merged_option(args, cfg, "samples", 400))
        out = _merged_option(args, cfg, "out")
        if out is None:
            out = os.environ.get(OUT_DIR_ENV, ".")
        self.out = out
        for m in self.methods:
            if m not in ("ecrm", "fcrm", "mm"):
                raise ConfigError("unknown method %r" % m)

    def grid_spec(self):
        return FrequencyGrid.log_spaced(self.omega_min, self.omega_max, self.samples)

    def flow_config(self):
        return benchmarks.FlowConfig(
            grid=self.grid,
            viscosity=self.viscosity,
            convection=self.convection,
            seed=self.seed,
        )

    def msd_config(self):
        return benchmarks.MSDConfig(masses=self.masses)

    def build(self):
        """Returns (full system, DecoupledSystem or None)."""
        b = self.benchmark
        if b == "stokes":
            cfg = self.flow_config()
            return benchmarks.build_stokes(cfg), benchmarks.stokes_decouple(cfg)
        if b == "oseen":
            cfg = self.flow_config()
            return benchmarks.build_oseen(cfg), benchmarks.oseen_decouple(cfg)
        if b == "msd":
            cfg = self.msd_config()
            return benchmarks.build_msd(cfg), benchmarks.msd_decouple(cfg)
        if b == "msd-me":
            cfg = self.msd_config()
            dae, ode = benchmarks.build_msd_minimal_extension(cfg)
            _, block = decouple_index1(ode)

            class _Bundle:
                pass

            bundle = benchmarks.DecoupledSystem(
                ode=ode, recovery=None, block_factory=lambda: block
            )
            return dae, bundle
        if b is not None:
            raise ConfigError("unknown benchmark %r" % b)
        return load_system(self.file), None

    def ensure_out(self):
        os.makedirs(self.out, exist_ok=True)
        return self.out


# ----------------------------------------------------------------------
# output helpers


def _fmt(x):
    if isinstance(x, float):
        if np.isnan(x):
            return "nan"
        if np.isinf(x):
            return "inf"
        return repr(x)
    return str(x)


def write_curve_csv(path, curve):
    lines = ["omega,norm_G,norm_err,rel_err"]
    for i in range(curve.omega.size):
        if not curve.valid[i]:
            continue
        lines.append(
            ",".join(
                _fmt(float(v))
                for v in (curve.omega[i], curve.norm_G[i], curve.norm_err[i], curve.rel_err[i])
            )
        )
    with open(path, "w", newline="\n") as fh:
        fh.write("\n".join(lines))
        fh.write("\n")


def _combo_tag(method, r, shift):
    if method == "mm":
        stag = "inf" if np.isinf(shift) else ("%g" % shift)
        return "mm_s%s_r%02d" % (stag, r)
    return "%s_r%02d" % (method, r)


def _shift_json(shift):
    if shift is None:
        return None
    if np.isinf(shift):
        return "inf"
    return float(shift)


# ----------------------------------------------------------------------
# subcommands


def cmd_validate(args):
    run = Runner(args)
    full, _ = run.build()
    if isinstance(full, benchmarks.DescriptorSystem):
        print("benchmark builds a non-port-Hamiltonian descriptor system;")
        print("validating its underlying pHODE instead")
        _, bundle = run.build()
        full = bundle.ode
    report = validate_phdae(full, tol=run.tol)
    print(report.summary())
    return 0 if report.passed else 1


def cmd_decouple(args):
    run = Runner(args)
    full, bundle = run.build()
    if bundle is None:
        dec, block = decouple_index1(full)
        ode = dec.ode_system()
        n1, n2, n3 = (block.n1, block.n2, block.n3) if block else (dec.n1, 0, dec.n2)
    else:
        ode = bundle.ode
        block = bundle.block
        n1, n2, n3 = block.n1, block.n2, block.n3
    n_full = full.E.shape[0] if hasattr(full, "E") else full.n
    print("full size:      %d" % n_full)
    print("ode size:       %d" % ode.n)
    print("block (n1,n2,n3): (%d, %d, %d)" % (n1, n2, n3))
    out = run.ensure_out()
    save_system(ode, os.path.join(out, "ode.json"), meta={"seed": run.seed})
    from .model import assemble_block

    save_system(
        assemble_block(block),
        os.path.join(out, "block.json"),
        meta={"seed": run.seed, "n1": n1, "n2": n2, "n3": n3},
    )
    print("wrote ode.json, block.json to %s" % out)
    return 0


def _reduction_sweep(run, full, block):
    """Yields result rows for every (method, r, shift) combination."""
    grid = run.grid_spec()
    need_rep = any(m in ("ecrm", "fcrm") for m in run.methods)
    rep = None
    if need_rep:
        sp = balance_split(block, min(max(run.orders), block.n1))
        rep = open_resistive_port(block, sp)
    try:
        h2_full = h2_norm(block)
    except (UnboundedError, PhmorError):
        h2_full = None
    hinf_full = hinf_estimate(full, None, grid=grid).value

    for method in run.methods:
        shifts = run.shifts if method == "mm" else [None]
        for r in run.orders:
            for shift in shifts:
                row = {
                    "method": method,
                    "r": r,
                    "shift": _shift_json(shift),
                }
                try:
                    if r > block.n1:
                        raise NotApplicableError(
                            "r=%d exceeds dynamic dimension %d" % (r, block.n1)
                        )
                    if method == "ecrm":
                        model = ecrm(rep, r)
                    elif method == "fcrm":
                        model = fcrm(rep, r)
                    else:
                        model = moment_match(block, r, shift)
                except (NotApplicableError, ShiftAtPoleError) as exc:
                    row.update(
                        {
                            "hinf_rel": None,
                            "h2_rel_or_unbounded": None,
                            "structure_pass": False,
                            "status": "not_applicable: %s" % exc,
                        }
                    )
                    yield row, None, None
                    continue
                report = validate_phdae(model.system, tol=run.tol)
                err = hinf_estimate(full, model, grid=grid)
                hinf_rel = (
                    float(err.value / hinf_full) if np.isfinite(err.value) else "unbounded"
                )
                try:
                    h2_err = _h2_error(block, model)
                    h2_rel = float(h2_err / h2_full) if h2_full else "unbounded"
                except (UnboundedError, PhmorError):
                    h2_rel = "unbounded"
                row.update(
                    {
                        "hinf_rel": hinf_rel,
                        "h2_rel_or_unbounded": h2_rel,
                        "structure_pass": bool(report.passed),
                        "status": "ok",
                    }
                )
                curve = relative_error_curve(full, model, grid=grid)
                yield row, model, curve


def _h2_error(block, model):
    """H2 norm of the difference system."""
    from .analysis import StateSpace, proper_part

    s1 = proper_part(block)
    s2 = proper_part(model)
    n1, n2 = s1.n, s2.n
    A = np.zeros((n1 + n2, n1 + n2))
    A[:n1, :n1] = s1.A
    A[n1:, n1:] = s2.A
    B = np.vstack([s1.B, s2.B])
    C = np.hstack([s1.C, -s2.C])
    D = s1.D - s2.D
    return h2_norm(StateSpace(A=A, B=B, C=C, D=D))


def cmd_reduce(args):
    run = Runner(args)
    full, bundle = run.build()
    if bundle is None:
        _, block = decouple_index1(full)
        if block is None:
            raise ConfigError("input system carries feed-through; cannot form block")
    else:
        block = bundle.block
    out = run.ensure_out()
    rows = []
    for row, model, curve in _reduction_sweep(run, full, block):
        tag = _combo_tag(row["method"], row["r"], np.inf if row["shift"] == "inf" else (row["shift"] or 0))
        if model is not None:
            save_system(
                model.system,
                os.path.join(out, "model_%s.json" % tag),
                meta={
                    "method": model.method,
                    "r": model.r,
                    "shift": _shift_json(model.shift),
                    "seed": run.seed,
                },
            )
            write_curve_csv(os.path.join(out, "curve_%s.csv" % tag), curve)
        rows.append(row)
        status = row["status"]
        print(
            "%-6s r=%-3d shift=%-6s %s"
            % (row["method"], row["r"], row["shift"], status)
        )
    dump_json(rows, os.path.join(out, "summary.json"))
    print("wrote summary.json to %s" % out)
    return 0


def cmd_figure(args):
    run = Runner(args)
    full, bundle = run.build()
    block = bundle.block if bundle is not None else decouple_index1(full)[1]
    out = run.ensure_out()
    grid = run.grid_spec()

    need_rep = any(m in ("ecrm", "fcrm") for m in run.methods)
    rep = None
    if need_rep:
        sp = balance_split(block, min(max(run.orders), block.n1))
        rep = open_resistive_port(block, sp)

    def make(method, r, shift):
        if method == "ecrm":
            return ecrm(rep, r)
        if method == "fcrm":
            return fcrm(rep, r)
        return moment_match(block, r, shift)

    # (i) relative error over omega at the largest requested order
    r_fix = max(run.orders)
    for method in run.methods:
        shifts = run.shifts if method == "mm" else [None]
        for shift in shifts:
            tag = _combo_tag(method, r_fix, np.inf if shift is not None and np.isinf(shift) else (shift or 0))
            try:
                model = make(method, r_fix, shift)
            except (NotApplicableError, ShiftAtPoleError) as exc:
                print("%s: not applicable (%s)" % (tag, exc))
                continue
            curve = relative_error_curve(full, model, grid=grid)
            write_curve_csv(os.path.join(out, "curve_%s.csv" % tag), curve)
            print("wrote curve_%s.csv" % tag)

    # (ii) H-infinity relative error over r
    hinf_full = hinf_estimate(full, None, grid=grid).value
    lines = ["r,method,shift,hinf_rel"]
    for r in run.orders:
        for method in run.methods:
            shifts = run.shifts if method == "mm" else [None]
            for shift in shifts:
                try:
                    model = make(method, r, shift)
                except (NotApplicableError, ShiftAtPoleError):
                    lines.append("%d,%s,%s,not_applicable" % (r, method, _shift_json(shift)))
                    continue
                err = hinf_estimate(full, model, grid=grid)
                rel = err.value / hinf_full
                lines.append("%d,%s,%s,%s" % (r, method, _shift_json(shift), _fmt(float(rel))))
    path = os.path.join(out, "hinf_table.csv")
    with open(path, "w", newline="\n") as fh:
        fh.write("\n".join(lines))
        fh.write("\n")
    print("wrote hinf_table.csv to %s" % out)
    return 0


def cmd_simulate(args):
    run = Runner(args)
    _, bundle = run.build()
    if bundle is None:
        raise ConfigError("simulate requires a benchmark")
    block = bundle.block
    dt = float(args.dt)
    t_final = float(args.tfinal)
    u = np.ones(block.m)  # unit step input
    x0 = np.zeros(block.n)
    res = simulate_dissipation(block, u, x0, dt, t_final)
    out = run.ensure_out()
    lines = ["t,hamiltonian,dissipated"]
    lines.append("# max residual per unit time: midpoint=%s simpson=%s" % (
        _fmt(res.balance_residual), _fmt(res.balance_residual_refined)))
    for i in range(res.times.size):
        lines.append("%s,%s,%s" % (_fmt(float(res.times[i])), _fmt(float(res.hamiltonians[i])),
                                   _fmt(float(res.dissipated[i]))))
    path = os.path.join(out, "simulation.csv")
    with open(path, "w", newline="\n") as fh:
        fh.write("\n".join(lines))
        fh.write("\n")
    print("balance residual (midpoint quadrature): %.3e per unit time" % res.balance_residual)
    print("balance residual (Simpson quadrature):  %.3e per unit time" % res.balance_residual_refined)
    print("wrote simulation.csv to %s" % out)
    return 0


# ----------------------------------------------------------------------
# argument parsing


def _add_common(p):
    p.add_argument("--benchmark", choices=["stokes", "oseen", "msd", "msd-me"])
    p.add_argument("--file")
    p.add_argument("--config")
    p.add_argument("--grid", type=int)
    p.add_argument("--masses", type=int)
    p.add_argument("--viscosity", type=float)
    p.add_argument("--convection")
    p.add_argument("--method")
    p.add_argument("--order")
    p.add_argument("--shift")
    p.add_argument("--omega-min", type=float, dest="omega_min")
    p.add_argument("--omega-max", type=float, dest="omega_max")
    p.add_argument("--samples", type=int)
    p.add_argument("--seed", type=int)
    p.add_argument("--tol", type=float)
    p.add_argument("--out")


def build_parser():
    parser = argparse.ArgumentParser(
        prog="phmor",
        description="Structure-preserving model reduction of port-Hamiltonian DAEs",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    for name, fn in (
        ("validate", cmd_validate),
        ("decouple", cmd_decouple),
        ("reduce", cmd_reduce),
        ("figure", cmd_figure),
        ("simulate", cmd_simulate),
    ):
        p = sub.add_parser(name)
        _add_common(p)
        if name == "simulate":
            p.add_argument("--dt", default="1e-3")
            p.add_argument("--tfinal", default="1.0")
        p.set_defaults(func=fn)
    return parser


def main(argv=None):
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 2 if exc.code not in (0, None) else 0
    try:
        return args.func(args)
    except ConfigError as exc:
        print("configuration error: %s" % exc, file=_sys.stderr)
        return 2
    except PhmorError as exc:
        print("numerical failure: %s" % exc, file=_sys.stderr)
        return 3


if __name__ == "__main__":
    raise SystemExit(main())
