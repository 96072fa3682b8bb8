"""Modelling, design-space analysis and control simulation for folded pouch
pneumatic artificial muscles.

Subpackages are plain modules; the names below are the public API.
"""

from .control import (
    AnalyticForceModel,
    CallableForceModel,
    Equilibrium,
    PiController,
    ServoModel,
    ValveModel,
    leak_map,
    pi_update,
    plant_equilibrium,
    servo_step,
    valve_step,
)
from .curves import ForceStrainCurve
from .design_space import (
    FamilyMemberError,
    RegionArea,
    curve_extrema,
    curve_family,
    design_space_area,
    normalized_area,
)
from .errors import (
    DataFormatError,
    DomainError,
    FoldpamError,
    InfeasibleScenarioError,
    NoSolutionError,
    OutOfRangeError,
    RootFindingError,
    SingularityError,
)
from .geometry import MAX_FOLD_RATIO, Geometry, OperatingPoint, make_geometry, wf_circ
from .kink import KinkDetector, KinkReport, detect_kink
from .measurements import (
    DatasetMeta,
    MeasurementDataset,
    Stroke,
    dataset_to_curve,
    load_measurements,
    load_metadata,
    synthesize_measurements,
)
from .models import (
    POUCH_MAX_STRAIN,
    ModelKind,
    force_at_strain,
    max_strain,
    pouch_force,
    pouch_strain,
    pouch_volume,
    ppam_force_at_strain,
    ppam_max_strain,
    ppam_solve,
    sample_curve,
)
from .scenarios import (
    BUILTIN_SCENARIOS,
    ScenarioConfig,
    SimTrace,
    builtin_scenario,
    position_span,
    run_scenario,
)
from .special import ellip_e, ellip_f, find_root_bracketed
from .surrogate import SurrogateModel, build_surrogate, surrogate_force

__version__ = "0.1.0"

__all__ = [name for name in dir() if not name.startswith("_")]
