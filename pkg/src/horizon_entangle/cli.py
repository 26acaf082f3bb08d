"""Command-line front end.

Exit codes: 0 ok, 2 domain or usage error, 3 truncation infeasible,
4 sweep finished with unconverged rows, 5 conservation check failed.
"""

from __future__ import annotations

import argparse
import math
import re
import sys
from dataclasses import replace
from pathlib import Path
from typing import Sequence

import numpy as np

from . import __version__
from .constants import CONFIG_ENV_VAR, Constants, RunConfig, load_config
from .errors import DomainError, HorizonEntangleError, HorizonLimitError, TruncationError, UsageError
from .geometry import (
    VALIDITY_THRESHOLD,
    NaturalScenario,
    PhysicalScenario,
    schwarzschild_radius,
    squeeze_params,
    surface_gravity,
    to_natural,
)
from .measures import BIPARTITIONS, analyze_all, analyze_scalar
from .states import NMAX_CAP, choose_nmax, dirac_entangled
from .sweeps import (
    PRESET_OMEGAS,
    RRBAR_NMAX_CAP,
    WIDE_NMAX_CAP,
    R0Grid,
    SweepSpec,
    figure_presets,
    rows_to_csv,
    run_sweep,
    verify_conservation,
)

EXIT_OK, EXIT_DOMAIN, EXIT_TRUNCATION, EXIT_UNCONVERGED, EXIT_VERIFY = 0, 2, 3, 4, 5

_NUMBER = r"([-+]?(?:\d+\.?\d*|\.\d+)(?:[eE][-+]?\d+)?)"
_MASS_UNITS = {"kg": 1.0, "sun": None, "msun": None}
_LENGTH_UNITS = {"m": 1.0, "cm": 1e-2, "mm": 1e-3, "km": 1e3}
_FREQ_UNITS = {"hz": 1.0, "khz": 1e3, "mhz": 1e6, "ghz": 1e9}


def _split_literal(text: str) -> tuple[float, str]:
    m = re.fullmatch(_NUMBER + r"\s*([a-zA-Z_]*)", text.strip())
    if not m:
        raise UsageError(f"cannot parse quantity {text!r}")
    return float(m.group(1)), m.group(2).lower()


def parse_mass(text: str, constants: Constants) -> float:
    """'2e30', '2e30kg', '1e-5sun' -> kilograms."""
    value, unit = _split_literal(text)
    if unit in ("", "kg"):
        return value
    if unit in ("sun", "msun"):
        return value * constants.M_sun
    raise UsageError(f"unknown mass unit {unit!r} (use kg or sun)")


def parse_length(text: str, rs: float | None = None) -> float:
    """'0.01', '1cm', '2km' -> metres; '0.01rs' -> multiples of R_S when ``rs`` is given."""
    value, unit = _split_literal(text)
    if unit == "":
        return value
    if unit == "rs":
        if rs is None:
            raise UsageError("the rs length unit needs a mass")
        return value * rs
    if unit not in _LENGTH_UNITS:
        raise UsageError(f"unknown length unit {unit!r} (use m, cm, mm, km, rs)")
    return value * _LENGTH_UNITS[unit]


def parse_frequency(text: str) -> float:
    value, unit = _split_literal(text)
    if unit == "":
        return value
    if unit not in _FREQ_UNITS:
        raise UsageError(f"unknown frequency unit {unit!r} (use Hz, kHz, MHz, GHz)")
    return value * _FREQ_UNITS[unit]


def _rs(mass: float, constants: Constants) -> float | None:
    return schwarzschild_radius(mass, constants) if mass > 0 else None


def _float_list(text: str) -> tuple[float, ...]:
    try:
        return tuple(float(x) for x in text.split(",") if x.strip())
    except ValueError as exc:
        raise UsageError(f"expected a comma-separated list of numbers, got {text!r}") from exc


def _bipartition_list(text: str) -> tuple[str, ...]:
    chosen = tuple(x.strip() for x in text.split(",") if x.strip())
    unknown = set(chosen) - set(BIPARTITIONS)
    if unknown or not chosen:
        raise UsageError(f"bipartitions must be drawn from {','.join(BIPARTITIONS)}")
    return chosen


def _g(x: float) -> str:
    return format(x, ".10g")


# ---------------------------------------------------------------------------
# point


def _scenario_from_args(args, config: RunConfig) -> tuple[NaturalScenario, PhysicalScenario | None]:
    natural = args.omega is not None or args.r0 is not None
    physical = any(v is not None for v in (args.mass, args.delta0, args.freq))
    if natural == physical:
        raise UsageError("give exactly one of (--omega, --r0) or (--mass, --delta0, --freq)")
    if natural:
        if args.omega is None or args.r0 is None:
            raise UsageError("--omega and --r0 go together")
        return NaturalScenario(args.omega, args.r0), None
    if None in (args.mass, args.delta0, args.freq):
        raise UsageError("--mass, --delta0 and --freq go together")
    mass = parse_mass(args.mass, config.constants)
    phys = PhysicalScenario(
        mass,
        parse_length(args.delta0, _rs(mass, config.constants)),
        parse_frequency(args.freq),
        args.angular or config.angular_frequency,
    )
    return to_natural(phys, config.constants), phys


def cmd_point(args, config: RunConfig, out) -> int:
    nat, phys = _scenario_from_args(args, config)
    sq = squeeze_params(nat)
    tol = args.tol if args.tol is not None else config.tolerance
    bips = args.bipartitions or BIPARTITIONS
    warnings = list(sq.warnings)
    if args.field == "dirac":
        reports = analyze_all(dirac_entangled(sq.tan_qd), bipartitions=bips)
        nmax, tail = 0, 0.0
    else:
        trunc = choose_nmax(sq.tanh_qs, tol, args.max_nmax)
        nmax, tail = trunc.n_max, trunc.tail_bound
        if "RRbar" in bips and nmax > RRBAR_NMAX_CAP:
            warnings.append(f"RRbar skipped: n_max {nmax} > {RRBAR_NMAX_CAP}")
            bips = tuple(b for b in bips if b != "RRbar")
        reports = analyze_scalar(sq.tanh_qs, trunc, bips)

    print(f"field           {args.field}", file=out)
    if phys is not None:
        print(f"mass_kg         {_g(phys.mass)}", file=out)
        print(f"delta0_m        {_g(phys.delta0)}", file=out)
        print(f"freq_hz         {_g(phys.frequency)}", file=out)
    print(f"omega           {_g(nat.omega)}", file=out)
    print(f"r0_over_rs      {format(nat.r0_over_rs, '.17g')}", file=out)
    print(f"tanh_q          {format(sq.tanh_qs, '.17g')}", file=out)
    print(f"validity_ratio  {_g(sq.validity_ratio)}", file=out)
    print(f"nmax            {nmax}", file=out)
    print(f"tail_bound      {tail:.3e}", file=out)
    print(f"warnings        {'; '.join(warnings) if warnings else 'none'}", file=out)
    print("", file=out)
    print(f"{'bipartition':<12}{'negativity':>16}{'mutual_info':>16}{'S_a':>14}{'S_b':>14}{'S_joint':>14}", file=out)
    for name, rep in reports.items():
        print(
            f"{name:<12}{rep.negativity:16.10f}{rep.mutual_information:16.10f}"
            f"{rep.entropy_a:14.8f}{rep.entropy_b:14.8f}{rep.entropy_joint:14.8f}",
            file=out,
        )
    if "AR" in reports and "ARbar" in reports:
        neg_sum = reports["AR"].negativity + reports["ARbar"].negativity
        mi_sum = reports["AR"].mutual_information + reports["ARbar"].mutual_information
        print("", file=out)
        print(f"neg_ar + neg_arbar = {neg_sum:.10f}", file=out)
        print(f"mi_ar + mi_arbar   = {mi_sum:.10f}", file=out)
    return EXIT_OK


# ---------------------------------------------------------------------------
# sweep / verify


def _spec_from_args(args, config: RunConfig, default_preset: str | None = None) -> SweepSpec:
    tol = args.tol if args.tol is not None else config.tolerance
    overrides = {}
    if args.bipartitions:
        overrides["bipartitions"] = args.bipartitions
    if args.max_nmax is not None:
        overrides["max_nmax"] = args.max_nmax
    preset = args.preset or (default_preset if args.field is None and args.r0_min is None
                             and args.mass_min is None else None)
    if preset:
        presets = figure_presets(config.constants)
        if preset not in presets:
            raise UsageError(f"unknown preset {preset!r}; choose from {', '.join(presets)}")
        if args.tol is not None:
            overrides["tolerance"] = tol
        if args.omega is not None:
            overrides["omega_values"] = args.omega
        return replace(presets[preset], **overrides)

    if args.field is None:
        raise UsageError("give --preset or --field with grid flags")
    if args.mass_min is not None or args.mass_max is not None:
        if None in (args.mass_min, args.mass_max, args.delta0, args.freq):
            raise UsageError("physical grids need --mass-min, --mass-max, --delta0 and --freq")
        lo = parse_mass(args.mass_min, config.constants)
        hi = parse_mass(args.mass_max, config.constants)
        if not 0 < lo <= hi:
            raise DomainError("need 0 < --mass-min <= --mass-max")
        masses = tuple(float(m) for m in np.geomspace(lo, hi, args.count or 81))
        return SweepSpec(
            args.field,
            mode="physical",
            mass_values=masses,
            delta0_values=tuple(parse_length(x) for x in args.delta0.split(",")),
            frequency=parse_frequency(args.freq),
            angular=args.angular or config.angular_frequency,
            tolerance=tol,
            **{"bipartitions": ("AR", "ARbar"), "max_nmax": WIDE_NMAX_CAP, **overrides},
        )
    grid = R0Grid(
        args.r0_min if args.r0_min is not None else 1.0 + 1e-6,
        args.r0_max if args.r0_max is not None else 2.0,
        args.count or 200,
        args.spacing,
    )
    return SweepSpec(
        args.field,
        omega_values=args.omega or PRESET_OMEGAS,
        r0_grid=grid,
        tolerance=tol,
        **{"bipartitions": ("AR", "ARbar"), "max_nmax": WIDE_NMAX_CAP, **overrides},
    )


def _workers(args, config: RunConfig) -> int:
    return args.workers if args.workers is not None else config.workers


def cmd_sweep(args, config: RunConfig, out) -> int:
    spec = _spec_from_args(args, config)
    rows = run_sweep(spec, _workers(args, config), config.constants)
    text = rows_to_csv(rows)
    dest = args.out if args.out is not None else config.output
    if dest == "-":
        out.write(text)
    else:
        Path(dest).write_text(text)
    unconverged = sum(not r.converged for r in rows)
    report = verify_conservation(rows, spec.bipartitions)
    status = "n/a" if all(c.passed is None for c in report.checks) else ("PASS" if report.passed else "FAIL")
    print(f"rows={len(rows)} unconverged={unconverged} conservation={status}", file=sys.stderr)
    return EXIT_UNCONVERGED if unconverged else EXIT_OK


def cmd_verify(args, config: RunConfig, out) -> int:
    if args.preset is None and args.field is None:
        raise UsageError("give --field or --preset")
    if args.preset is None and args.r0_min is None and args.mass_min is None:
        args.preset = {"scalar": "fig3", "dirac": "fig4"}[args.field]
    spec = _spec_from_args(args, config)
    if args.field is not None and spec.field != args.field:
        raise UsageError(f"preset {args.preset} is a {spec.field} sweep, not {args.field}")
    rows = run_sweep(spec, _workers(args, config), config.constants)
    report = verify_conservation(rows, spec.bipartitions)
    print(f"{spec.field} sweep, {len(rows)} rows, tolerance {spec.tolerance:g}", file=out)
    for line in report.lines():
        print(line, file=out)
    verdict = "PASS" if report.passed else "FAIL"
    print(verdict, file=out)
    return EXIT_OK if report.passed else EXIT_VERIFY


# ---------------------------------------------------------------------------
# units


def cmd_units(args, config: RunConfig, out) -> int:
    c = config.constants
    mass = parse_mass(args.mass, c)
    phys = PhysicalScenario(
        mass,
        parse_length(args.delta0, _rs(mass, c)),
        parse_frequency(args.freq),
        args.angular or config.angular_frequency,
    )
    nat = to_natural(phys, c)
    sq = squeeze_params(nat)
    rs = schwarzschild_radius(phys.mass, c)
    if sq.outside_validity:
        verdict = "outside Rindler-approximation regime"
    else:
        verdict = f"within near-horizon regime (Delta0/R_S <= {VALIDITY_THRESHOLD})"
    rows = [
        ("mass_kg", _g(phys.mass)),
        ("R_S_m", _g(rs)),
        ("R_S_cm", _g(rs * 100)),
        ("kappa_per_s", _g(surface_gravity(phys.mass, c))),
        ("omega_angular_rad_per_s", _g(phys.angular_frequency)),
        ("f0", _g(sq.f0)),
        ("sqrt_f0", _g(math.sqrt(sq.f0))),
        ("Omega", _g(nat.omega)),
        ("R0", format(nat.r0_over_rs, ".17g")),
        ("tanh_q", format(sq.tanh_qs, ".17g")),
        ("validity_ratio", _g(sq.validity_ratio)),
        ("verdict", verdict),
        ("warning", "; ".join(sq.warnings) if sq.warnings else "none"),
    ]
    for key, value in rows:
        print(f"{key:<26}{value}", file=out)
    return EXIT_OK


# ---------------------------------------------------------------------------


def _add_grid_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--preset", choices=sorted(figure_presets()), help="figure preset")
    p.add_argument("--field", choices=("scalar", "dirac"), help="field type for explicit grids")
    p.add_argument("--omega", type=_float_list, help="comma-separated Omega series")
    p.add_argument("--r0-min", type=float, help="smallest R0 (> 1)")
    p.add_argument("--r0-max", type=float, help="largest R0")
    p.add_argument("--count", type=int, help="grid points per series")
    p.add_argument("--spacing", choices=("log-offset", "linear"), default="log-offset",
                   help="R0 - 1 spacing (default: log-offset)")
    p.add_argument("--mass-min", help="physical grid: smallest mass (kg or e.g. 1e-6sun)")
    p.add_argument("--mass-max", help="physical grid: largest mass")
    p.add_argument("--delta0", help="physical grid: comma-separated distances to the horizon")
    p.add_argument("--freq", help="physical grid: Rob's mode frequency (e.g. 1.5MHz)")
    p.add_argument("--angular", action="store_true", help="treat --freq as angular frequency")
    p.add_argument("--tol", type=float, help="truncation tolerance")
    p.add_argument("--bipartitions", type=_bipartition_list, help="subset of AR,ARbar,RRbar")
    p.add_argument("--max-nmax", type=int, help="largest admissible scalar n_max")
    p.add_argument("--workers", type=int, help="worker processes")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="horizon-entangle",
        description="Entanglement degradation near a Schwarzschild horizon.",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument("--config", help=f"config file (default: ${CONFIG_ENV_VAR})")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("point", help="evaluate one parameter point")
    p.add_argument("--field", choices=("scalar", "dirac"), required=True, help="field type")
    p.add_argument("--omega", type=float, help="dimensionless frequency Omega")
    p.add_argument("--r0", type=float, help="R0 = r0 / R_S (> 1)")
    p.add_argument("--mass", help="black hole mass (kg or e.g. 1e-5sun)")
    p.add_argument("--delta0", help="distance to the horizon (m, or e.g. 1cm, 0.01rs)")
    p.add_argument("--freq", help="Rob's mode frequency (Hz or e.g. 1.5MHz)")
    p.add_argument("--angular", action="store_true", help="treat --freq as angular frequency")
    p.add_argument("--tol", type=float, help="truncation tolerance")
    p.add_argument("--bipartitions", type=_bipartition_list, help="subset of AR,ARbar,RRbar")
    p.add_argument("--max-nmax", type=int, default=NMAX_CAP, help="largest admissible scalar n_max")
    p.set_defaults(handler=cmd_point)

    p = sub.add_parser("sweep", help="run a parameter sweep and write CSV")
    _add_grid_flags(p)
    p.add_argument("--out", help="output CSV path, '-' for stdout")
    p.set_defaults(handler=cmd_sweep)

    p = sub.add_parser("verify", help="check the conservation laws over a sweep")
    _add_grid_flags(p)
    p.set_defaults(handler=cmd_verify)

    p = sub.add_parser("units", help="convert a physical scenario to natural units")
    p.add_argument("--mass", required=True, help="black hole mass (kg or e.g. 1e-5sun)")
    p.add_argument("--delta0", required=True, help="distance to the horizon (m, or e.g. 1cm, 0.01rs)")
    p.add_argument("--freq", required=True, help="Rob's mode frequency (Hz or e.g. 1.5MHz)")
    p.add_argument("--angular", action="store_true", help="treat --freq as angular frequency")
    p.set_defaults(handler=cmd_units)
    return parser


def main(argv: Sequence[str] | None = None, out=None) -> int:
    out = out if out is not None else sys.stdout
    args = build_parser().parse_args(argv)
    try:
        config = load_config(args.config)
        return args.handler(args, config, out)
    except (TruncationError, HorizonLimitError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_TRUNCATION
    except (DomainError, UsageError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DOMAIN
    except HorizonEntangleError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DOMAIN


def main_exit() -> None:
    sys.exit(main())


if __name__ == "__main__":
    main_exit()
