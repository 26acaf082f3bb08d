"""Entanglement degradation between a free-falling observer and a static
observer hovering near a Schwarzschild horizon."""

__version__ = "0.1.0"

from .constants import DEFAULT_CONSTANTS, Constants, RunConfig, load_config
from .errors import (
    ConsistencyError,
    DomainError,
    HorizonEntangleError,
    HorizonLimitError,
    InvalidStateError,
    TruncationError,
    UsageError,
)
from .geometry import (
    NaturalScenario,
    PhysicalScenario,
    SqueezeParams,
    boundary_acceleration,
    proper_acceleration,
    schwarzschild_radius,
    squeeze_params,
    surface_gravity,
    to_natural,
)
from .measures import analyze_all, analyze_scalar, mutual_information, negativity, von_neumann_entropy
from .states import choose_nmax, dirac_entangled, scalar_entangled
from .sweeps import R0Grid, SweepSpec, figure_presets, rows_to_csv, run_sweep, verify_conservation
