"""Parameter sweeps reproducing the figure families, with deterministic CSV output."""

from __future__ import annotations

import csv
import io
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field, fields, replace
from typing import Iterable, Sequence

import numpy as np

from .constants import DEFAULT_CONSTANTS, Constants
from .errors import DomainError, HorizonLimitError, TruncationError
from .geometry import NaturalScenario, PhysicalScenario, squeeze_params, to_natural
from .measures import (
    BIPARTITIONS,
    analyze_all,
    analyze_scalar,
    entropy_from_eigenvalues,
    scalar_rrbar_blockwise,
    scalar_spectra,
)
from .states import NMAX_CAP, choose_nmax, dirac_entangled, truncation_at

CSV_COLUMNS = (
    "field", "mode", "omega", "mass_kg", "delta0_m", "freq_hz", "r0_over_rs", "tanh_q",
    "validity_ratio", "nmax", "tail_bound", "neg_ar", "neg_arbar", "neg_rrbar",
    "mi_ar", "mi_arbar", "mi_rrbar", "converged", "warning",
)
MEASURE_COLUMNS = ("neg_ar", "neg_arbar", "neg_rrbar", "mi_ar", "mi_arbar", "mi_rrbar")

# Widest truncation tolerance that still counts as certified.
MAX_CERTIFIED_TOLERANCE = 1e-3
# The Rob-AntiRob route costs O(n_max^3); above this it is skipped and the row flagged.
RRBAR_NMAX_CAP = 1024
# Large enough for tanh q ~ 0.9995 at tolerance 1e-9 (only O(n_max) routes).
WIDE_NMAX_CAP = 1 << 16
PRESET_OMEGAS = (2.0, 6.0, 10.0, 20.0, 40.0)
MAX_DOUBLINGS = 3


@dataclass(frozen=True)
class R0Grid:
    r0_min: float
    r0_max: float
    count: int
    spacing: str = "log-offset"  # or "linear"

    def __post_init__(self):
        if not self.r0_min > 1:
            raise DomainError(f"R0 grid minimum must be > 1, got {self.r0_min!r}")
        if not self.r0_max >= self.r0_min:
            raise DomainError("R0 grid maximum must be >= minimum")
        if self.count < 1:
            raise DomainError("R0 grid needs at least one point")
        if self.spacing not in ("log-offset", "linear"):
            raise DomainError(f"unknown spacing {self.spacing!r}")

    def offsets(self) -> np.ndarray:
        """R0 - 1 for every grid point, ascending."""
        lo, hi = self.r0_min - 1.0, self.r0_max - 1.0
        if self.count == 1:
            return np.array([lo])
        if self.spacing == "linear":
            return np.linspace(lo, hi, self.count)
        return np.geomspace(lo, hi, self.count)


@dataclass(frozen=True)
class SweepSpec:
    field: str
    mode: str = "natural"
    omega_values: tuple[float, ...] = PRESET_OMEGAS
    r0_grid: R0Grid | None = None
    mass_values: tuple[float, ...] = ()
    delta0_values: tuple[float, ...] = ()
    frequency: float | None = None
    angular: bool = False
    tolerance: float = 1e-9
    bipartitions: tuple[str, ...] = BIPARTITIONS
    max_nmax: int = NMAX_CAP
    recheck: bool = True

    def __post_init__(self):
        if self.field not in ("scalar", "dirac"):
            raise DomainError(f"field must be 'scalar' or 'dirac', got {self.field!r}")
        if self.mode == "natural":
            if not self.omega_values or self.r0_grid is None:
                raise DomainError("natural sweeps need omega values and an R0 grid")
            if any(not w > 0 for w in self.omega_values):
                raise DomainError("omega values must be positive")
        elif self.mode == "physical":
            if not self.mass_values or not self.delta0_values or self.frequency is None:
                raise DomainError("physical sweeps need masses, distances and a frequency")
        else:
            raise DomainError(f"mode must be 'natural' or 'physical', got {self.mode!r}")
        # tolerances above MAX_CERTIFIED_TOLERANCE are accepted but every
        # row they produce is flagged as uncertified
        if not 0 < self.tolerance <= 1:
            raise DomainError(f"tolerance must lie in (0, 1], got {self.tolerance!r}")
        if not self.bipartitions or set(self.bipartitions) - set(BIPARTITIONS):
            raise DomainError(f"bipartitions must be a nonempty subset of {BIPARTITIONS}")
        object.__setattr__(
            self, "bipartitions", tuple(b for b in BIPARTITIONS if b in self.bipartitions)
        )

    def points(self, constants: Constants = DEFAULT_CONSTANTS) -> list["_Point"]:
        pts = []
        if self.mode == "natural":
            for omega in sorted(self.omega_values):
                for off in self.r0_grid.offsets():
                    pts.append(_Point(NaturalScenario.from_offset(omega, float(off)), None))
        else:
            for delta0 in sorted(self.delta0_values):
                for mass in sorted(self.mass_values):
                    phys = PhysicalScenario(mass, delta0, self.frequency, self.angular)
                    pts.append(_Point(to_natural(phys, constants), phys))
        return pts


@dataclass(frozen=True)
class _Point:
    natural: NaturalScenario
    physical: PhysicalScenario | None


@dataclass(frozen=True)
class SweepRow:
    field: str
    mode: str
    omega: float
    mass_kg: float | None
    delta0_m: float | None
    freq_hz: float | None
    r0_over_rs: float
    tanh_q: float
    validity_ratio: float
    nmax: int | None
    tail_bound: float | None
    neg_ar: float | None = None
    neg_arbar: float | None = None
    neg_rrbar: float | None = None
    mi_ar: float | None = None
    mi_arbar: float | None = None
    mi_rrbar: float | None = None
    converged: bool = True
    warning: str = ""

    @property
    def sort_key(self) -> tuple[float, float]:
        if self.mode == "physical":
            return (self.delta0_m, self.mass_kg)
        return (self.omega, self.validity_ratio)

    def measures(self) -> dict[str, float | None]:
        return {k: getattr(self, k) for k in MEASURE_COLUMNS}


def _join(*parts: str) -> str:
    return "; ".join(p for p in parts if p)


def _scalar_measures(
    tanh_q: float, n_max: int, bipartitions: Sequence[str], rrbar_cap: int
) -> tuple[dict[str, float | None], str]:
    """Measure columns for a scalar point at a fixed truncation, plus a warning string."""
    trunc = truncation_at(tanh_q, n_max)
    cheap = [b for b in bipartitions if b != "RRbar"]
    reports = analyze_scalar(tanh_q, trunc, cheap) if cheap else {}
    out: dict[str, float | None] = dict.fromkeys(MEASURE_COLUMNS)
    for name, rep in reports.items():
        key = name.lower()
        out[f"neg_{key}"] = rep.negativity
        out[f"mi_{key}"] = rep.mutual_information
    warning = ""
    if "RRbar" in bipartitions:
        s_a, s_r, s_rbar = (entropy_from_eigenvalues(p) for p in scalar_spectra(tanh_q, trunc))
        out["mi_rrbar"] = max(s_r + s_rbar - s_a, 0.0)
        if n_max <= rrbar_cap:
            out["neg_rrbar"] = scalar_rrbar_blockwise(tanh_q, trunc)
        else:
            warning = f"neg_rrbar skipped: n_max {n_max} > {rrbar_cap}"
    return out, warning


def _base_row(spec: SweepSpec, point: _Point) -> tuple[dict, object]:
    sq = squeeze_params(point.natural)
    phys = point.physical
    base = dict(
        field=spec.field,
        mode=spec.mode,
        omega=point.natural.omega,
        mass_kg=phys.mass if phys else None,
        delta0_m=phys.delta0 if phys else None,
        freq_hz=phys.frequency if phys else None,
        r0_over_rs=point.natural.r0_over_rs,
        tanh_q=sq.tanh_qs,
        validity_ratio=sq.validity_ratio,
    )
    return base, sq


def evaluate_point(spec: SweepSpec, point: _Point) -> SweepRow:
    base, sq = _base_row(spec, point)
    validity = "; ".join(sq.warnings)
    if spec.field == "dirac":
        reports = analyze_all(dirac_entangled(sq.tan_qd), bipartitions=spec.bipartitions)
        values = dict.fromkeys(MEASURE_COLUMNS)
        for name, rep in reports.items():
            values[f"neg_{name.lower()}"] = rep.negativity
            values[f"mi_{name.lower()}"] = rep.mutual_information
        return SweepRow(**base, nmax=0, tail_bound=0.0, **values, converged=True, warning=validity)
    try:
        trunc = choose_nmax(sq.tanh_qs, spec.tolerance, spec.max_nmax)
    except (TruncationError, HorizonLimitError) as exc:
        return SweepRow(
            **base, nmax=None, tail_bound=None, converged=False,
            warning=_join(f"truncation-infeasible: {exc}", validity),
        )
    values, rr_warning = _scalar_measures(sq.tanh_qs, trunc.n_max, spec.bipartitions, RRBAR_NMAX_CAP)
    certified = trunc.tail_bound <= MAX_CERTIFIED_TOLERANCE
    row = SweepRow(
        **base,
        nmax=trunc.n_max,
        tail_bound=trunc.tail_bound,
        **values,
        converged=certified and not rr_warning,
        warning=_join(
            "" if certified else f"uncertified: tail bound {trunc.tail_bound:.3g} > {MAX_CERTIFIED_TOLERANCE:g}",
            rr_warning,
            validity,
        ),
    )
    if spec.recheck and row.converged:
        row = convergence_recheck(row, spec.tolerance, spec.bipartitions, spec.max_nmax)
    return row


def _move_threshold(column: str, tolerance: float) -> float:
    # truncation enters rho_RRbar^pT through amplitudes, so the
    # Rob-AntiRob negativity converges like sqrt(tail) rather than tail
    if column == "neg_rrbar":
        return 10.0 * math.sqrt(tolerance)
    return 10.0 * tolerance


def convergence_recheck(
    row: SweepRow,
    tolerance: float,
    bipartitions: Sequence[str] = BIPARTITIONS,
    max_nmax: int = WIDE_NMAX_CAP,
    rrbar_cap: int = RRBAR_NMAX_CAP,
) -> SweepRow:
    """Recompute a scalar row with n_max doubled (up to three times) until every measure settles.

    The returned row carries the finest truncation evaluated. Rows that do
    not settle are marked unconverged, never dropped.
    """
    if row.field != "scalar" or row.nmax is None:
        return row
    prev = row.measures()
    n = row.nmax
    moved: list[str] = []
    for _ in range(MAX_DOUBLINGS):
        n_next = max(2 * n, 1)
        if n_next > max_nmax:
            return replace(
                row, converged=False,
                warning=_join(row.warning, f"unconverged: refinement n_max {n_next} > cap {max_nmax}"),
            )
        values, rr_warning = _scalar_measures(row.tanh_q, n_next, bipartitions, rrbar_cap)
        if rr_warning:
            return replace(
                row, converged=False,
                warning=_join(row.warning, f"unconverged: {rr_warning} during recheck"),
            )
        moved = [
            k for k, v in values.items()
            if v is not None and abs(v - prev[k]) >= _move_threshold(k, tolerance)
        ]
        n, prev = n_next, values
        refined = replace(
            row, nmax=n, tail_bound=truncation_at(row.tanh_q, n).tail_bound, **values
        )
        if not moved:
            return refined
        row = refined
    return replace(
        row, converged=False,
        warning=_join(row.warning, "unconverged: " + ",".join(moved) + " still moving"),
    )


def _evaluate_star(args):
    return evaluate_point(*args)


def run_sweep(
    spec: SweepSpec, workers: int = 1, constants: Constants = DEFAULT_CONSTANTS
) -> list[SweepRow]:
    pts = spec.points(constants)
    if workers > 1 and len(pts) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            rows = list(pool.map(_evaluate_star, [(spec, p) for p in pts], chunksize=4))
    else:
        rows = [evaluate_point(spec, p) for p in pts]
    return sorted(rows, key=lambda r: r.sort_key)


def _fmt(value) -> str:
    if value is None:
        return ""
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, float):
        return format(value, ".17g")
    return str(value)


def rows_to_csv(rows: Iterable[SweepRow]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(CSV_COLUMNS)
    for row in rows:
        d = asdict(row)
        writer.writerow([_fmt(d[c]) for c in CSV_COLUMNS])
    return buf.getvalue()


def _parse_cell(column: str, text: str):
    if text == "":
        return None if column != "warning" else ""
    if column in ("field", "mode", "warning"):
        return text
    if column == "converged":
        return text == "true"
    if column == "nmax":
        return int(text)
    return float(text)


def rows_from_csv(text: str) -> list[SweepRow]:
    reader = csv.reader(io.StringIO(text))
    header = next(reader)
    if tuple(header) != CSV_COLUMNS:
        raise DomainError("CSV header does not match the sweep schema")
    return [SweepRow(**{c: _parse_cell(c, v) for c, v in zip(header, rec)}) for rec in reader]


@dataclass(frozen=True)
class Check:
    name: str
    value: float | None
    tolerance: float | None
    passed: bool | None  # None: not applicable


@dataclass(frozen=True)
class ConservationReport:
    checks: tuple[Check, ...] = field(default_factory=tuple)

    @property
    def passed(self) -> bool:
        return all(c.passed is not False for c in self.checks)

    def lines(self) -> list[str]:
        out = []
        for c in self.checks:
            status = "n/a" if c.passed is None else ("PASS" if c.passed else "FAIL")
            value = "" if c.value is None else f" max={c.value:.3e}"
            tol = "" if c.tolerance is None else f" tol={c.tolerance:.1e}"
            out.append(f"{status} {c.name}{value}{tol}")
        return out


def verify_conservation(
    rows: Sequence[SweepRow], bipartitions: Sequence[str] | None = None
) -> ConservationReport:
    """Check the negativity and mutual-information conservation laws over sweep rows.

    * Dirac: |N_AR + N_ARbar - 1/2| <= 1e-12.
    * Both:  |I_AR + I_ARbar - 2| <= 1e-12 (Dirac) or max(1e-9, 10 tail) (scalar).
    * Scalar: N_ARbar <= 1e-10.

    Rows without certified values (infeasible truncation, or a tail bound
    above MAX_CERTIFIED_TOLERANCE) fail the certification check.
    """
    rows = list(rows)
    if bipartitions is None:
        applicable = any(r.neg_arbar is not None for r in rows)
    else:
        applicable = {"AR", "ARbar"} <= set(bipartitions)
    if not rows or not applicable:
        return ConservationReport((Check("conservation", None, None, None),))

    def certified(r: SweepRow) -> bool:
        return (
            r.nmax is not None
            and None not in (r.neg_ar, r.neg_arbar, r.mi_ar, r.mi_arbar)
            and r.tail_bound <= MAX_CERTIFIED_TOLERANCE
        )

    good = [r for r in rows if certified(r)]
    n_bad = len(rows) - len(good)
    checks = [Check("certified rows (count failing)", float(n_bad), 0.0, n_bad == 0)]
    dirac = [r for r in good if r.field == "dirac"]
    scalar = [r for r in good if r.field == "scalar"]
    if dirac:
        dev = max(abs(r.neg_ar + r.neg_arbar - 0.5) for r in dirac)
        checks.append(Check("dirac N_AR + N_ARbar = 1/2", dev, 1e-12, dev <= 1e-12))
        dev = max(abs(r.mi_ar + r.mi_arbar - 2.0) for r in dirac)
        checks.append(Check("dirac I_AR + I_ARbar = 2", dev, 1e-12, dev <= 1e-12))
    if scalar:
        dev = max(abs(r.mi_ar + r.mi_arbar - 2.0) for r in scalar)
        ok = all(abs(r.mi_ar + r.mi_arbar - 2.0) <= max(1e-9, 10.0 * r.tail_bound) for r in scalar)
        checks.append(Check("scalar I_AR + I_ARbar = 2 (tol max(1e-9, 10 tail))", dev, None, ok))
        worst = max(r.neg_arbar for r in scalar)
        checks.append(Check("scalar N_ARbar = 0", worst, 1e-10, worst <= 1e-10))
    return ConservationReport(tuple(checks))


def default_r0_grid(count: int = 200) -> R0Grid:
    return R0Grid(1.0 + 1e-6, 2.0, count, "log-offset")


def figure_presets(constants: Constants = DEFAULT_CONSTANTS) -> dict[str, SweepSpec]:
    """Sweep specs for the six figure families.

    Omega series are a chosen spread, {2, 6, 10, 20, 40}; the published
    curves do not state theirs.
    """
    grid = default_r0_grid()
    cca = ("AR", "ARbar")
    masses = tuple(float(m) * constants.M_sun for m in np.geomspace(1e-6, 1e-2, 81))
    physical = dict(
        mode="physical", mass_values=masses, delta0_values=(0.01, 0.1), frequency=1.5e6,
        bipartitions=cca,
    )
    return {
        "fig3": SweepSpec("scalar", omega_values=PRESET_OMEGAS, r0_grid=grid,
                          bipartitions=cca, max_nmax=WIDE_NMAX_CAP),
        "fig4": SweepSpec("dirac", omega_values=PRESET_OMEGAS, r0_grid=grid, bipartitions=cca),
        # the O(n_max^3) Rob-AntiRob route limits how close to the horizon
        # a scalar sweep can certify
        "fig5": SweepSpec("scalar", omega_values=PRESET_OMEGAS,
                          r0_grid=R0Grid(1.0 + 2e-3, 2.0, 40, "log-offset"),
                          tolerance=1e-6, bipartitions=("RRbar",)),
        "fig6": SweepSpec("dirac", omega_values=PRESET_OMEGAS, r0_grid=grid, bipartitions=("RRbar",)),
        "fig7": SweepSpec("scalar", max_nmax=WIDE_NMAX_CAP, **physical),
        "fig8": SweepSpec("dirac", **physical),
    }
