"""Stray-field coupling simulator for perpendicular STT-MRAM arrays.

Models every magnetic layer of a cell as a bound-current loop and sums
discretized loop fields to get the stray field a free layer sees from its
own fixed layers and from its neighbors.  On top of that field it derives
the device-level consequences: critical switching current, average
switching time, and thermal stability, plus analysis tools for measured
hysteresis loops and switching-probability curves.
"""

from .characterization import (
    FitResult,
    HysteresisLoop,
    LoopSummary,
    RampProtocol,
    SwitchingProbCurve,
    analyze_loop,
    default_field_protocol,
    fit_hk_delta0,
    ramp_switching_probability,
    read_calibration_csv,
    read_cycles_csv,
    read_loop_csv,
    switching_probability,
    synth_loop,
)
from .config import RunConfig, default_config, load_config, render_defaults
from .coupling import (
    ArrayConfig,
    CouplingReport,
    NeighborhoodPattern,
    coupling_map,
    inter_stray_field,
    min_pitch_for_psi,
    psi_sweep,
)
from .errors import (
    ConfigError,
    CouplingError,
    DataError,
    DomainError,
    FitError,
    GeometryError,
)
from .magnetostatics import (
    CurrentLoop,
    DiscretizationPolicy,
    FieldVector,
    loop_field,
    on_axis_field_analytic,
    superpose,
)
from .metrics import (
    ResistanceModel,
    StabilityParams,
    SunParams,
    SwitchParams,
    WorstCaseDelta,
    avg_switching_time,
    calibrate_sun_prefactor,
    critical_current,
    delta0_at,
    ic0_from_constituents,
    overdrive_current,
    thermal_stability,
    worst_case_delta,
)
from .stack import (
    CalibrationResult,
    LayerSpec,
    MtjStack,
    calibrate_ms_t,
    default_stack,
    ecd_from_rp,
    intra_center_hz_oe,
    intra_stray_field,
    intra_stray_profile,
    rp_from_ecd,
)
from .units import AM_PER_OE, oersted_from_si, si_from_oersted

__version__ = "0.1.0"

__all__ = [
    "AM_PER_OE",
    "ArrayConfig",
    "CalibrationResult",
    "ConfigError",
    "CouplingError",
    "CouplingReport",
    "CurrentLoop",
    "DataError",
    "DiscretizationPolicy",
    "DomainError",
    "FieldVector",
    "FitError",
    "FitResult",
    "GeometryError",
    "HysteresisLoop",
    "LayerSpec",
    "LoopSummary",
    "MtjStack",
    "NeighborhoodPattern",
    "RampProtocol",
    "ResistanceModel",
    "RunConfig",
    "StabilityParams",
    "SunParams",
    "SwitchParams",
    "SwitchingProbCurve",
    "WorstCaseDelta",
    "analyze_loop",
    "avg_switching_time",
    "calibrate_ms_t",
    "calibrate_sun_prefactor",
    "coupling_map",
    "critical_current",
    "default_config",
    "default_field_protocol",
    "default_stack",
    "delta0_at",
    "ecd_from_rp",
    "fit_hk_delta0",
    "ic0_from_constituents",
    "inter_stray_field",
    "intra_center_hz_oe",
    "intra_stray_field",
    "intra_stray_profile",
    "load_config",
    "loop_field",
    "min_pitch_for_psi",
    "on_axis_field_analytic",
    "oersted_from_si",
    "overdrive_current",
    "psi_sweep",
    "ramp_switching_probability",
    "read_calibration_csv",
    "read_cycles_csv",
    "read_loop_csv",
    "render_defaults",
    "rp_from_ecd",
    "si_from_oersted",
    "superpose",
    "switching_probability",
    "synth_loop",
    "thermal_stability",
    "worst_case_delta",
]
