"""Classical lag and quantum phase of charges passing a line of electric or magnetic dipoles."""

from .core import (
    BeamParams,
    Constants,
    ConvergenceError,
    DomainError,
    ElectricDipoleLine,
    Method,
    PhaseResult,
    Side,
    SingularityError,
    SolenoidLine,
    ValidityWarning,
    make_electric_dipole_line,
    make_solenoid_line,
)
from .dynamics import (
    CouplingKind,
    CouplingSpec,
    ForceSource,
    OdeConfig,
    coupling_for_strength,
    electric_coupling,
    integrate_trajectory,
    lag_displacement,
    magnetic_coupling,
    relative_displacement,
    trajectory_relative_displacement,
)
from .forces import ForceModel
from .oracle import QuadratureConfig, integrate, richardson_extrapolate
from .phase import (
    WkbConfig,
    phase_flux,
    phase_semiclassical,
    phase_wkb_electric,
    phase_wkb_extrapolated,
    phase_wkb_magnetic,
)

__version__ = "0.1.0"
