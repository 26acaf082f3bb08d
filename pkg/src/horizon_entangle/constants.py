"""Physical constants and the run configuration file.

The config file is flat ``key = value`` text. Blank lines and lines starting
with ``#`` are ignored. Recognised keys::

    c = 299792458            # speed of light, m/s
    G = 6.67430e-11          # gravitational constant, m^3 kg^-1 s^-2
    M_sun = 1.98892e30       # solar mass, kg
    tolerance = 1e-9         # default truncation tolerance
    output = -               # default output path ("-" is stdout)
    workers = 1              # sweep worker processes
    angular_frequency = false  # true: --freq values are already angular

Unknown keys are rejected.
"""

from __future__ import annotations

import os
from dataclasses import dataclass, field, fields
from pathlib import Path

from .errors import DomainError, UsageError

CONFIG_ENV_VAR = "HORIZON_ENTANGLE_CONFIG"


@dataclass(frozen=True)
class Constants:
    c: float = 299_792_458.0
    G: float = 6.674_30e-11
    M_sun: float = 1.988_92e30

    def __post_init__(self):
        for f in fields(self):
            if not getattr(self, f.name) > 0:
                raise DomainError(f"constant {f.name} must be positive")

    def to_config_text(self) -> str:
        return "".join(f"{f.name} = {getattr(self, f.name)!r}\n" for f in fields(self))


DEFAULT_CONSTANTS = Constants()


@dataclass(frozen=True)
class RunConfig:
    constants: Constants = field(default_factory=Constants)
    tolerance: float = 1e-9
    output: str = "-"
    workers: int = 1
    angular_frequency: bool = False

    def __post_init__(self):
        if not 0 < self.tolerance <= 1:
            raise DomainError("tolerance must lie in (0, 1]")
        if self.workers < 1:
            raise DomainError("workers must be >= 1")

    def to_config_text(self) -> str:
        return (
            self.constants.to_config_text()
            + f"tolerance = {self.tolerance!r}\n"
            + f"output = {self.output}\n"
            + f"workers = {self.workers}\n"
            + f"angular_frequency = {str(self.angular_frequency).lower()}\n"
        )


def _parse_bool(key: str, text: str) -> bool:
    low = text.lower()
    if low in ("true", "yes", "1", "on"):
        return True
    if low in ("false", "no", "0", "off"):
        return False
    raise UsageError(f"{key}: expected a boolean, got {text!r}")


def parse_config(text: str) -> RunConfig:
    """Parse config text into a validated :class:`RunConfig`."""
    const_kw: dict[str, float] = {}
    kw: dict[str, object] = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise UsageError(f"config line {lineno}: expected 'key = value'")
        key, value = (part.strip() for part in line.split("=", 1))
        try:
            if key in ("c", "G", "M_sun"):
                const_kw[key] = float(value)
            elif key == "tolerance":
                kw[key] = float(value)
            elif key == "workers":
                kw[key] = int(value)
            elif key == "output":
                kw[key] = value
            elif key == "angular_frequency":
                kw[key] = _parse_bool(key, value)
            else:
                raise UsageError(f"config line {lineno}: unknown key {key!r}")
        except ValueError as exc:
            if isinstance(exc, UsageError):
                raise
            raise UsageError(f"config line {lineno}: bad value for {key!r}: {value!r}") from exc
    return RunConfig(constants=Constants(**const_kw), **kw)


def load_config(path: str | os.PathLike | None = None) -> RunConfig:
    """Load the config from ``path``, else from $HORIZON_ENTANGLE_CONFIG, else defaults."""
    if path is None:
        path = os.environ.get(CONFIG_ENV_VAR)
    if not path:
        return RunConfig()
    return parse_config(Path(path).read_text())


__all__ = [
    "CONFIG_ENV_VAR",
    "Constants",
    "DEFAULT_CONSTANTS",
    "RunConfig",
    "load_config",
    "parse_config",
]
