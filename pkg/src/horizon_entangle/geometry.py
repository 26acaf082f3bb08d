"""Schwarzschild near-horizon geometry and the squeezing parameter.

Everything here is a pure function of value types. Radii passed as
dimensionless numbers are measured in Schwarzschild radii; the surface
gravity ``kappa`` is returned in s^-1 (geometrized kappa = 1/(4m) times c).

A static observer at ``R0 = r0 / R_S`` sees the Hartle-Hawking vacuum of a
mode with dimensionless frequency ``Omega = 2*pi*omega/kappa`` as a two-mode
squeezed state with::

    tanh q_s = tan q_d = exp(-(Omega / 2) * sqrt(1 - 1/R0))

The near-horizon offset ``R0 - 1`` is carried explicitly so that the horizon
limit can be probed far below double-precision resolution of ``R0`` itself.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .constants import DEFAULT_CONSTANTS, Constants
from .errors import DomainError

# Offsets Delta0/R_S above this leave the regime where the Rindler
# approximation was shown to carry all the interesting behaviour.
VALIDITY_THRESHOLD = 0.05


@dataclass(frozen=True)
class PhysicalScenario:
    """Black hole mass (kg), distance to the horizon (m) and Rob's mode frequency (Hz).

    ``angular`` selects whether ``frequency`` is already an angular frequency
    (rad/s). By default it is an ordinary frequency and gets multiplied by 2*pi.
    """

    mass: float
    delta0: float
    frequency: float
    angular: bool = False

    def __post_init__(self):
        for name in ("mass", "delta0", "frequency"):
            value = getattr(self, name)
            if not (value > 0 and math.isfinite(value)):
                raise DomainError(f"{name} must be positive and finite, got {value!r}")

    @property
    def angular_frequency(self) -> float:
        return self.frequency if self.angular else 2.0 * math.pi * self.frequency


@dataclass(frozen=True)
class NaturalScenario:
    """Dimensionless (Omega, R0) pair.

    Build with ``NaturalScenario(omega, r0_over_rs)`` or, to approach the
    horizon closer than float spacing near 1 allows,
    ``NaturalScenario.from_offset(omega, r0_over_rs - 1)``.
    """

    omega: float
    r0_over_rs: float
    offset: float | None = None

    def __post_init__(self):
        if not (self.omega > 0 and math.isfinite(self.omega)):
            raise DomainError(f"omega must be positive and finite, got {self.omega!r}")
        if self.offset is None:
            if not self.r0_over_rs > 1:
                raise DomainError(
                    f"R0 must be > 1 (observer outside the horizon), got {self.r0_over_rs!r}"
                )
            object.__setattr__(self, "offset", self.r0_over_rs - 1.0)
        elif not self.offset > 0:
            raise DomainError(f"R0 - 1 must be > 0, got {self.offset!r}")

    @classmethod
    def from_offset(cls, omega: float, offset: float) -> "NaturalScenario":
        if not offset > 0:
            raise DomainError(f"R0 - 1 must be > 0, got {offset!r}")
        return cls(omega, 1.0 + offset, offset)

    @property
    def f0(self) -> float:
        """Redshift factor 1 - 1/R0, computed from the offset without cancellation."""
        return self.offset / (1.0 + self.offset)


@dataclass(frozen=True)
class SqueezeParams:
    tanh_qs: float
    tan_qd: float
    qs: float
    qd: float
    f0: float
    validity_ratio: float

    @property
    def outside_validity(self) -> bool:
        return self.validity_ratio > VALIDITY_THRESHOLD

    @property
    def warnings(self) -> tuple[str, ...]:
        if self.outside_validity:
            return (
                f"outside Rindler-approximation regime (Delta0/R_S = {self.validity_ratio:.6g}"
                f" > {VALIDITY_THRESHOLD})",
            )
        return ()


def _check_mass(mass: float) -> None:
    if not (mass > 0 and math.isfinite(mass)):
        raise DomainError(f"mass must be positive and finite, got {mass!r}")


def surface_gravity(mass: float, constants: Constants = DEFAULT_CONSTANTS) -> float:
    """kappa = c^3 / (4 G M), in s^-1."""
    _check_mass(mass)
    return constants.c**3 / (4.0 * constants.G * mass)


def schwarzschild_radius(mass: float, constants: Constants = DEFAULT_CONSTANTS) -> float:
    _check_mass(mass)
    return 2.0 * constants.G * mass / constants.c**2


def proper_acceleration(r: float, mass: float, constants: Constants = DEFAULT_CONSTANTS) -> float:
    """Proper acceleration (m/s^2) of a static observer at ``r`` Schwarzschild radii.

    a = |df/dr| / (2 sqrt(f)) with f = 1 - R_S/r, which in units of the
    surface acceleration kappa*c reads 1 / (r^2 sqrt(1 - 1/r)).
    """
    _check_mass(mass)
    if not r > 1:
        raise DomainError(f"r must be > 1 Schwarzschild radius, got {r!r}")
    kappa_accel = constants.c**4 / (4.0 * constants.G * mass)
    return kappa_accel / (r * r * math.sqrt(1.0 - 1.0 / r))


def boundary_acceleration(r0_over_rs: float) -> tuple[float, float]:
    """Exact and near-horizon proper acceleration at R0, both in units of kappa.

    exact = (1 - f0)^2 / sqrt(f0), approx = 1 / sqrt(f0).
    """
    if not r0_over_rs > 1:
        raise DomainError(f"R0 must be > 1, got {r0_over_rs!r}")
    f0 = 1.0 - 1.0 / r0_over_rs
    approx = 1.0 / math.sqrt(f0)
    return (1.0 - f0) ** 2 * approx, approx


def to_natural(scenario: PhysicalScenario, constants: Constants = DEFAULT_CONSTANTS) -> NaturalScenario:
    kappa = surface_gravity(scenario.mass, constants)
    rs = schwarzschild_radius(scenario.mass, constants)
    omega = 2.0 * math.pi * scenario.angular_frequency / kappa
    return NaturalScenario.from_offset(omega, scenario.delta0 / rs)


def squeeze_params(scenario: NaturalScenario) -> SqueezeParams:
    exponent = 0.5 * scenario.omega * math.sqrt(scenario.f0)
    t = math.exp(-exponent)
    # exponent > 0 always, but may underflow to t == 1.0 in float64
    return SqueezeParams(
        tanh_qs=t,
        tan_qd=t,
        qs=math.atanh(t) if t < 1.0 else math.inf,
        qd=math.atan(t),
        f0=scenario.f0,
        validity_ratio=scenario.offset,
    )
