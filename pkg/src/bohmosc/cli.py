"""Command-line interface.

Subcommands wire the library together and emit reproducible data files:

    ermakov      scale-function table for a frequency profile
    bohm         Bohm/classical potential, amplitude, phase surface
    wavefunction psi samples (real, imaginary, probability density)
    verify       finite-difference residual report (JSON) per refinement level
    tdse-check   split-step propagation fidelity against the construction
    fig1         subcritical (b=1) Bohm-potential surface
    fig2         critical (b=2) Bohm-potential surface
    transition   subcritical-vs-critical values near the b=2 boundary

CSV output uses a header row, comma separators, and floats printed with 17
significant digits so doubles round-trip exactly; rerunning a subcommand
with the same flags reproduces byte-identical files.  Exit codes: 0 on
success, 2 for flag or domain errors, 3 for verification-threshold
failures.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import sys
from concurrent.futures import ThreadPoolExecutor

import numpy as np

from . import __version__
from .frequency import FrequencyProfile, Regime, classify_rational
from .ermakov import ermakov_residual, log_scale, solve_numeric
from .madelung import (
    SpatialGrid,
    amplitude_gaussian,
    bohm_potential_critical,
    bohm_potential_gaussian,
    bohm_potential_subcritical,
    classical_potential,
    numeric_construction,
    rational_construction,
)
from .verify import build_residual_report
from .tdse import PropagatorConfig, fidelity, propagate

EXIT_OK = 0
EXIT_DOMAIN = 2
EXIT_THRESHOLD = 3

_TRANSITION_DEFAULT_BS = [2.0 - 10.0**-k for k in range(2, 7)]


def _fmt(value) -> str:
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    return f"{float(value):.17g}"


def _write_csv(path: str, header, rows) -> None:
    with open(path, "w", newline="") as handle:
        handle.write(",".join(header) + "\n")
        for row in rows:
            handle.write(",".join(_fmt(v) for v in row) + "\n")


def _write_manifest(args, outputs) -> None:
    if not args.manifest:
        return
    parameters = {}
    for key, value in sorted(vars(args).items()):
        if key in ("command", "func", "manifest"):
            continue
        if isinstance(value, np.ndarray):
            value = value.tolist()
        parameters[key] = value
    entries = []
    for path in outputs:
        digest = hashlib.sha256()
        with open(path, "rb") as handle:
            blob = handle.read()
        digest.update(blob)
        entries.append({"path": path, "sha256": digest.hexdigest(),
                        "bytes": len(blob)})
    manifest = {
        "tool": "bohmosc",
        "version": __version__,
        "subcommand": args.command,
        "parameters": parameters,
        "outputs": entries,
    }
    with open(args.manifest, "w") as handle:
        json.dump(manifest, handle, indent=2, sort_keys=True)
        handle.write("\n")


def _parallel_map(fn, items, threads: int):
    if threads <= 1:
        return [fn(item) for item in items]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(fn, items))


def _table_profile(path: str) -> FrequencyProfile:
    table = np.loadtxt(path, delimiter=",", ndmin=2)
    if table.shape[1] != 2:
        raise ValueError("--omega-table needs two columns: t, omega")
    return FrequencyProfile.from_table(table[:, 0], table[:, 1])


def _profile_from_args(args):
    """Frequency profile from --omega-table, --a/--b, or the family --b."""
    if getattr(args, "omega_table", None):
        return _table_profile(args.omega_table), True
    if getattr(args, "a", None) is not None:
        if args.b is None:
            raise ValueError("--a requires --b (use --b 0 for a constant frequency)")
        return FrequencyProfile.rational(args.a, args.b), True
    if getattr(args, "b", None) is None:
        raise ValueError("give --b, --a with --b, or --omega-table")
    return None, False  # family profile; construction resolved by the caller


def _branch_value(args) -> float:
    if getattr(args, "critical", False):
        if getattr(args, "b", None) is not None:
            raise ValueError("--critical and --b are mutually exclusive")
        return 2.0
    if getattr(args, "b", None) is None:
        raise ValueError("give --b or --critical")
    return args.b


# ----------------------------------------------------------------- ermakov

def _cmd_ermakov(args) -> int:
    times = np.linspace(0.0, args.t_max, args.samples)
    profile, generic = _profile_from_args(args)

    if generic:
        rho_dot0 = args.rho_dot0 if args.rho_dot0 is not None else 0.0
        solution = solve_numeric(profile, args.rho0, rho_dot0,
                                 (0.0, args.t_max),
                                 rel_tol=args.rel_tol, abs_tol=args.abs_tol)
    else:
        construction = rational_construction(args.b)
        profile = construction.profile
        solution = construction.solution
        if args.numeric:
            rho_dot0 = args.rho_dot0
            if rho_dot0 is None:
                rho_dot0 = float(solution.rho_dot(0.0))
            solution = solve_numeric(profile, args.rho0, rho_dot0,
                                     (0.0, args.t_max),
                                     rel_tol=args.rel_tol, abs_tol=args.abs_tol)
    scale = log_scale(solution, profile)

    rows = zip(times, solution.rho(times), solution.rho_dot(times),
               scale.nu(times), scale.nu_dot(times), scale.nu_ddot(times),
               ermakov_residual(solution, profile, times))
    _write_csv(args.out, ["t", "rho", "rho_dot", "nu", "nu_dot",
                          "nu_ddot", "residual"], rows)
    _write_manifest(args, [args.out])
    return EXIT_OK


# -------------------------------------------------------------------- bohm

def _field_rows(args, emit):
    """Common sweep for bohm/wavefunction: emit(construction, t, x) per time."""
    if getattr(args, "omega_table", None):
        construction = numeric_construction(_table_profile(args.omega_table),
                                            (0.0, args.t_max))
    else:
        construction = rational_construction(_branch_value(args))
    times = np.linspace(0.0, args.t_max, args.nt)
    x = np.linspace(args.x_min, args.x_max, args.nx)

    blocks = _parallel_map(lambda t: emit(construction, t, x), times, args.threads)
    for t, block in zip(times, blocks):
        for i in range(x.size):
            yield (t, x[i], *[column[i] for column in block])


def _cmd_bohm(args) -> int:
    def emit(construction, t, x):
        scale, field, profile = (construction.scale, construction.field,
                                 construction.profile)
        return (bohm_potential_gaussian(x, t, scale),
                classical_potential(profile, x, t),
                amplitude_gaussian(x, t, scale),
                field.S(x, t))

    _write_csv(args.out, ["t", "x", "V_B", "V", "A", "S"],
               _field_rows(args, emit))
    _write_manifest(args, [args.out])
    return EXIT_OK


def _cmd_wavefunction(args) -> int:
    def emit(construction, t, x):
        amp = amplitude_gaussian(x, t, construction.scale)
        psi = amp * np.exp(1j * construction.field.S(x, t))
        return psi.real, psi.imag, np.abs(psi) ** 2

    _write_csv(args.out, ["t", "x", "re_psi", "im_psi", "abs2_psi"],
               _field_rows(args, emit))
    _write_manifest(args, [args.out])
    return EXIT_OK


# ------------------------------------------------------------------ verify

def _cmd_verify(args) -> int:
    if args.refine < 1:
        raise ValueError("--refine needs at least one level")
    b_value = _branch_value(args)
    construction = rational_construction(b_value)
    span = args.x_max - args.x_min
    probes = np.linspace(args.t_max / args.nt, args.t_max, args.nt)

    h0 = args.h if args.h is not None else span / (args.nx - 1)

    def level_report(level: int) -> dict:
        h = h0 / 2**level
        dt = args.dt / 2**level
        n = int(round(span / h)) + 1
        grid = SpatialGrid(args.x_min, args.x_max, n)
        worst = None
        for t in probes:
            report = build_residual_report(construction, grid, float(t), dt,
                                           space_order=args.order)
            entry = report.to_dict()
            if worst is None:
                worst = entry
            else:
                for key in ("se_residual_l2", "se_residual_max",
                            "continuity_residual_max", "qhje_residual_max",
                            "normalization_error"):
                    worst[key] = max(worst[key], entry[key])
        return worst

    levels = _parallel_map(level_report, range(args.refine), args.threads)
    orders = {}
    for key in ("se_residual_max", "continuity_residual_max", "qhje_residual_max"):
        pairs = zip(levels, levels[1:])
        orders[key] = [
            float(np.log2(lo[key] / hi[key])) if hi[key] > 0 and lo[key] > 0 else None
            for lo, hi in pairs
        ]
    critical = classify_rational(b_value) is Regime.CRITICAL
    document = {
        "branch": "critical" if critical else f"subcritical b={b_value}",
        "t_probes": list(map(float, probes)),
        "space_order": args.order,
        "levels": levels,
        "observed_orders": orders,
    }
    blob = json.dumps(document, indent=2, sort_keys=True) + "\n"
    if args.out:
        with open(args.out, "w") as handle:
            handle.write(blob)
        _write_manifest(args, [args.out])
    else:
        sys.stdout.write(blob)

    if args.threshold is not None:
        finest = levels[-1]
        worst = max(finest["se_residual_max"], finest["continuity_residual_max"],
                    finest["qhje_residual_max"])
        if worst > args.threshold:
            print(f"verification failed: max residual {worst:.3e} > "
                  f"threshold {args.threshold:.3e}", file=sys.stderr)
            return EXIT_THRESHOLD
    return EXIT_OK


# -------------------------------------------------------------- tdse-check

def _auto_half_width(construction, t_max: float) -> float:
    # Keep the Gaussian truncation below ~1e-12: tails need |x| > 5.1 rho.
    rho_end = float(construction.solution.rho(t_max))
    return max(8.0, float(np.ceil(5.5 * rho_end)))


def _cmd_tdse_check(args) -> int:
    if args.samples < 2:
        raise ValueError("--samples needs at least 2 (t=0 plus one probe)")
    construction = rational_construction(_branch_value(args))
    half_width = args.x_max if args.x_max else _auto_half_width(construction,
                                                                args.t_max)
    grid = SpatialGrid(-half_width, half_width, args.n)
    config = PropagatorConfig(grid=grid, dt=args.dt, profile=construction.profile)

    sample_times = np.linspace(0.0, args.t_max, args.samples)[1:]
    psi0 = construction.psi(grid, 0.0)
    propagated = propagate(psi0, config, args.t_max, sample_times=sample_times)
    reference = construction.psi(grid, sample_times)
    fidelities = fidelity(reference, propagated)
    norm_errors = np.abs(propagated.norms() - 1.0)

    rows = [(0.0, 1.0, abs(float(psi0.norms()[0]) - 1.0))]
    rows += list(zip(sample_times, np.atleast_1d(fidelities), norm_errors))
    _write_csv(args.out, ["t", "fidelity", "norm_error"], rows)
    _write_manifest(args, [args.out])

    if args.min_fidelity is not None:
        worst = float(np.min(np.atleast_1d(fidelities)))
        if worst < args.min_fidelity:
            print(f"tdse check failed: fidelity {worst:.12f} < "
                  f"{args.min_fidelity}", file=sys.stderr)
            return EXIT_THRESHOLD
    return EXIT_OK


# ----------------------------------------------------------------- figures

def _figure_surface(args, values_at) -> int:
    times = np.linspace(0.0, 6.0, 121)
    x = np.linspace(-5.0, 5.0, 201)
    blocks = _parallel_map(lambda t: values_at(x, t), times, args.threads)

    def rows():
        for t, block in zip(times, blocks):
            for i in range(x.size):
                yield (t, x[i], block[i])

    _write_csv(args.out, ["t", "x", "V_B"], rows())
    _write_manifest(args, [args.out])
    return EXIT_OK


def _cmd_fig1(args) -> int:
    return _figure_surface(args, lambda x, t: bohm_potential_subcritical(1.0, x, t))


def _cmd_fig2(args) -> int:
    return _figure_surface(args, bohm_potential_critical)


# -------------------------------------------------------------- transition

def _cmd_transition(args) -> int:
    if args.t_probe <= 0:
        raise ValueError("the two branches only separate for t > 0; "
                         "pick a positive --t-probe")
    if args.b_values:
        bs = [float(v) for v in args.b_values.split(",")]
    else:
        bs = _TRANSITION_DEFAULT_BS
    for b in bs:
        if classify_rational(b) is not Regime.SUBCRITICAL:
            raise ValueError(f"transition scan needs subcritical b values, got {b}")

    rows = [(b, float(bohm_potential_subcritical(b, args.x_probe, args.t_probe)))
            for b in bs]
    rows.append((2.0, float(bohm_potential_critical(args.x_probe, args.t_probe))))
    _write_csv(args.out, ["b", "V_B"], rows)
    _write_manifest(args, [args.out])
    return EXIT_OK


# ------------------------------------------------------------------ parser

def _add_common(parser, out_required=True):
    parser.add_argument("--out", required=out_required,
                        help="output file path")
    parser.add_argument("--manifest",
                        help="write a JSON run manifest (parameters + digests)")
    parser.add_argument("--threads", type=int, default=1,
                        help="worker threads for grid sweeps (default 1)")


def _add_branch(parser):
    parser.add_argument("--b", type=float, help="rational-family slope")
    parser.add_argument("--critical", action="store_true",
                        help="use the critical branch b=2")


def _add_field_grid(parser, nx=201, nt=121, t_max=6.0):
    parser.add_argument("--x-min", type=float, default=-8.0)
    parser.add_argument("--x-max", type=float, default=8.0)
    parser.add_argument("--nx", type=int, default=nx)
    parser.add_argument("--t-max", type=float, default=t_max)
    parser.add_argument("--nt", type=int, default=nt)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="bohmosc",
        description="Madelung-Bohm construction for time-dependent "
                    "harmonic oscillators, with verification oracles.")
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("ermakov", help="tabulate the Ermakov scale function")
    p.add_argument("--b", type=float, help="rational-family slope")
    p.add_argument("--a", type=float,
                   help="rational-family offset (forces the numeric path)")
    p.add_argument("--omega-table", help="CSV with t,omega samples")
    p.add_argument("--t-max", type=float, default=10.0)
    p.add_argument("--samples", type=int, default=1001)
    p.add_argument("--numeric", action="store_true",
                   help="force the ODE integrator over the closed form")
    p.add_argument("--rho0", type=float, default=1.0)
    p.add_argument("--rho-dot0", type=float, default=None)
    p.add_argument("--rel-tol", type=float, default=1e-10)
    p.add_argument("--abs-tol", type=float, default=1e-12)
    _add_common(p)
    p.set_defaults(func=_cmd_ermakov)

    p = sub.add_parser("bohm", help="Bohm-potential surface data")
    _add_branch(p)
    p.add_argument("--omega-table", help="CSV with t,omega samples")
    _add_field_grid(p)
    _add_common(p)
    p.set_defaults(func=_cmd_bohm)

    p = sub.add_parser("wavefunction", help="wavefunction surface data")
    _add_branch(p)
    p.add_argument("--omega-table", help="CSV with t,omega samples")
    _add_field_grid(p)
    _add_common(p)
    p.set_defaults(func=_cmd_wavefunction)

    p = sub.add_parser("verify", help="finite-difference residual report")
    _add_branch(p)
    p.add_argument("--x-min", type=float, default=-8.0)
    p.add_argument("--x-max", type=float, default=8.0)
    p.add_argument("--t-max", type=float, default=2.0,
                   help="largest probe time")
    p.add_argument("--nt", type=int, default=1, help="number of probe times")
    p.add_argument("--nx", type=int, default=513,
                   help="grid points at the coarsest level")
    p.add_argument("--h", type=float,
                   help="grid spacing at the coarsest level (overrides --nx)")
    p.add_argument("--dt", type=float, default=1e-3,
                   help="time step at the coarsest level")
    p.add_argument("--refine", type=int, default=1,
                   help="number of refinement levels (halving h and dt)")
    p.add_argument("--order", type=int, choices=(2, 4), default=2,
                   help="spatial stencil order")
    p.add_argument("--threshold", type=float,
                   help="exit 3 if the finest-level max residual exceeds this")
    _add_common(p, out_required=False)
    p.set_defaults(func=_cmd_verify)

    p = sub.add_parser("tdse-check", help="split-step fidelity check")
    _add_branch(p)
    p.add_argument("--t-max", type=float, default=5.0)
    p.add_argument("--dt", type=float, default=1e-4)
    p.add_argument("--n", type=int, default=512, help="grid points (power of two)")
    p.add_argument("--x-max", type=float,
                   help="half-width of the domain (default: auto-sized)")
    p.add_argument("--samples", type=int, default=11,
                   help="number of fidelity samples including t=0")
    p.add_argument("--min-fidelity", type=float,
                   help="exit 3 if any sampled fidelity falls below this")
    _add_common(p)
    p.set_defaults(func=_cmd_tdse_check)

    p = sub.add_parser("fig1", help="subcritical (b=1) Bohm-potential surface")
    _add_common(p)
    p.set_defaults(func=_cmd_fig1)

    p = sub.add_parser("fig2", help="critical (b=2) Bohm-potential surface")
    _add_common(p)
    p.set_defaults(func=_cmd_fig2)

    p = sub.add_parser("transition", help="Bohm potential across the b=2 boundary")
    p.add_argument("--t-probe", type=float, default=1.0)
    p.add_argument("--x-probe", type=float, default=0.0)
    p.add_argument("--b-values",
                   help="comma-separated subcritical slopes "
                        "(default: 2-10^-k for k=2..6)")
    _add_common(p)
    p.set_defaults(func=_cmd_transition)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (ValueError, RuntimeError, OSError) as error:
        print(f"bohmosc {args.command}: {error}", file=sys.stderr)
        return EXIT_DOMAIN


if __name__ == "__main__":
    sys.exit(main())
