"""MTJ stack description, electrical sizing and intra-cell stray field.

The stack is modeled as three magnetic layers, each reduced to a single
bound-current loop of diameter equal to the electrical critical dimension:

    free layer (FL)       at z = 0 (reference midplane)
    reference layer (RL)  below the tunnel barrier, moment along +z
    hard layer (HL)       SAF partner of the RL, moment along -z

The intra-cell stray field is the field of the RL and HL loops evaluated
inside the FL; the FL itself never contributes to the field it experiences.
With the RL along +z the measured hysteresis loop offset is positive, so
the net out-of-plane stray field at the FL center is negative.

Default sheet moments (Ms*t products) are calibrated values: they are
chosen so the forward model reproduces measured loop offsets and array
coupling steps, and they absorb the uncertainty in the individual layer
magnetizations and spacer geometry.
"""

import math
from dataclasses import dataclass, replace

import numpy as np

from .errors import ConfigError, FitError
from .magnetostatics import (
    DEFAULT_POLICY,
    CurrentLoop,
    loop_field,
    on_axis_field_analytic,
    superpose,
)
from .units import oersted_from_si

RA_DEFAULT_OHM_UM2 = 4.5

# Calibrated default sheet moments (A) and layer midplane offsets (nm).
FL_MS_T_A = 1.741e-3
RL_MS_T_A = 0.05e-3
HL_MS_T_A = -1.17e-3
FL_Z_NM = 0.0
RL_Z_NM = -2.2
HL_Z_NM = -7.0
FL_THICKNESS_NM = 1.4
RL_THICKNESS_NM = 1.0
HL_THICKNESS_NM = 7.0


@dataclass(frozen=True)
class LayerSpec:
    """One magnetic layer reduced to a rim current loop.

    ms_t_a is the signed sheet moment Ms*t in A; its sign is the moment
    direction along z.  z_center_nm is the layer midplane measured from
    the FL midplane.
    """

    name: str
    ms_t_a: float
    thickness_nm: float
    z_center_nm: float

    def __post_init__(self):
        if not self.thickness_nm > 0:
            raise ConfigError(
                f"layer {self.name}: thickness must be positive, got {self.thickness_nm}"
            )
        if self.ms_t_a == 0.0:
            raise ConfigError(f"layer {self.name}: ms_t_a must be nonzero")


@dataclass(frozen=True)
class MtjStack:
    """Full stack plus the electrical parameters that set the loop diameter."""

    fl: LayerSpec
    rl: LayerSpec
    hl: LayerSpec
    ecd_nm: float
    ra_ohm_um2: float = RA_DEFAULT_OHM_UM2

    def __post_init__(self):
        if not self.ecd_nm > 0:
            raise ConfigError(f"ecd_nm must be positive, got {self.ecd_nm}")
        if not self.ra_ohm_um2 > 0:
            raise ConfigError(f"ra_ohm_um2 must be positive, got {self.ra_ohm_um2}")
        # SAF constraint: RL and HL moments antiparallel
        if math.copysign(1.0, self.rl.ms_t_a) == math.copysign(1.0, self.hl.ms_t_a):
            raise ConfigError(
                "SAF constraint violated: rl.ms_t_a and hl.ms_t_a must have "
                f"opposite signs, got {self.rl.ms_t_a} and {self.hl.ms_t_a}"
            )
        if self.fl.ms_t_a < 0:
            raise ConfigError(
                "fl.ms_t_a is the P-state (+z) moment and must be positive"
            )

    @property
    def radius_nm(self):
        return 0.5 * self.ecd_nm

    def layer_loop(self, layer, center_xy_nm=(0.0, 0.0), sign=1.0):
        """CurrentLoop for one layer of a cell centered at center_xy_nm."""
        return CurrentLoop(
            center_nm=(center_xy_nm[0], center_xy_nm[1], layer.z_center_nm),
            radius_nm=self.radius_nm,
            current_a=sign * layer.ms_t_a,
        )


def default_stack(ecd_nm=35.0, ra_ohm_um2=RA_DEFAULT_OHM_UM2):
    """Stack with the calibrated default sheet moments."""
    return MtjStack(
        fl=LayerSpec("fl", FL_MS_T_A, FL_THICKNESS_NM, FL_Z_NM),
        rl=LayerSpec("rl", RL_MS_T_A, RL_THICKNESS_NM, RL_Z_NM),
        hl=LayerSpec("hl", HL_MS_T_A, HL_THICKNESS_NM, HL_Z_NM),
        ecd_nm=ecd_nm,
        ra_ohm_um2=ra_ohm_um2,
    )


def rp_from_ecd(ecd_nm, ra_ohm_um2=RA_DEFAULT_OHM_UM2):
    """Parallel-state resistance of a circular device: R = RA / area."""
    if not ecd_nm > 0:
        raise ConfigError(f"ecd_nm must be positive, got {ecd_nm}")
    ecd_um = ecd_nm * 1e-3
    return ra_ohm_um2 / (math.pi / 4.0 * ecd_um * ecd_um)


def ecd_from_rp(rp_ohm, ra_ohm_um2=RA_DEFAULT_OHM_UM2):
    """Electrical critical dimension (nm) from R_P and the RA product."""
    if not rp_ohm > 0:
        raise ConfigError(f"rp_ohm must be positive, got {rp_ohm}")
    if not ra_ohm_um2 > 0:
        raise ConfigError(f"ra_ohm_um2 must be positive, got {ra_ohm_um2}")
    return math.sqrt(4.0 / math.pi * ra_ohm_um2 / rp_ohm) * 1e3


def intra_stray_field(stack, point_nm=(0.0, 0.0, 0.0), policy=DEFAULT_POLICY):
    """Stray field (A/m) from the RL and HL loops at a point inside the cell.

    The FL is excluded by construction.  point_nm is measured from the FL
    midplane center.
    """
    return superpose(
        [
            loop_field(stack.layer_loop(stack.rl), point_nm, policy),
            loop_field(stack.layer_loop(stack.hl), point_nm, policy),
        ]
    )


def intra_center_hz_oe(stack):
    """hz (Oe) of the intra-cell stray field at the FL center.

    Uses the closed-form on-axis expression, which the segment sum
    converges to.
    """
    hz = on_axis_field_analytic(stack.layer_loop(stack.rl), 0.0)
    hz += on_axis_field_analytic(stack.layer_loop(stack.hl), 0.0)
    return oersted_from_si(hz)


@dataclass(frozen=True)
class RadialProfile:
    """Out-of-plane stray field along a radius ray at the FL midplane."""

    radius_nm: np.ndarray
    hz_oe: np.ndarray


def intra_stray_profile(stack, n_points=50, azimuth_rad=0.0, policy=DEFAULT_POLICY):
    """hz profile from the cell center to the rim (radius 0 .. ecd/2).

    The stray field is rotationally symmetric up to the discretization of
    the rim, so azimuth_rad only picks the ray direction.
    """
    if n_points < 2:
        raise ConfigError(f"n_points must be >= 2, got {n_points}")
    radii = np.linspace(0.0, stack.radius_nm, n_points)
    ux, uy = math.cos(azimuth_rad), math.sin(azimuth_rad)
    hz = np.empty(n_points)
    for i, r in enumerate(radii):
        f = intra_stray_field(stack, (r * ux, r * uy, 0.0), policy)
        hz[i] = oersted_from_si(f.hz)
    return RadialProfile(radius_nm=radii, hz_oe=hz)


@dataclass(frozen=True)
class CalibrationResult:
    """Least-squares scale factors for the RL and HL sheet moments."""

    rl_scale: float
    hl_scale: float
    residual_oe: float

    def apply(self, stack):
        """Stack with the template moments rescaled by the fitted factors."""
        return replace(
            stack,
            rl=replace(stack.rl, ms_t_a=self.rl_scale * stack.rl.ms_t_a),
            hl=replace(stack.hl, ms_t_a=self.hl_scale * stack.hl.ms_t_a),
        )


def calibrate_ms_t(template, measured):
    """Fit RL/HL moment scale factors to measured center stray fields.

    Parameters
    ----------
    template : MtjStack
        Provides geometry and the base moments that the factors rescale.
    measured : sequence of (ecd_nm, hs_intra_oe)
        Measured out-of-plane stray field at the FL center per device size.

    Returns
    -------
    CalibrationResult

    Raises
    ------
    FitError
        Fewer than two points, or all points at the same size (the two
        basis responses are then indistinguishable).
    """
    pts = [(float(e), float(h)) for e, h in measured]
    if len(pts) < 2:
        raise FitError(f"need at least 2 measured points, got {len(pts)}")
    if len({e for e, _ in pts}) < 2:
        raise FitError("all measured points share one ecd; fit is degenerate")

    design = np.empty((len(pts), 2))
    target = np.empty(len(pts))
    for i, (ecd, hs) in enumerate(pts):
        s = replace(template, ecd_nm=ecd)
        design[i, 0] = oersted_from_si(
            on_axis_field_analytic(s.layer_loop(s.rl), 0.0)
        )
        design[i, 1] = oersted_from_si(
            on_axis_field_analytic(s.layer_loop(s.hl), 0.0)
        )
        target[i] = hs

    coef, _, rank, _ = np.linalg.lstsq(design, target, rcond=None)
    if rank < 2:
        raise FitError("design matrix is rank-deficient; fit is degenerate")
    residual = float(np.sqrt(np.mean((design @ coef - target) ** 2)))
    return CalibrationResult(
        rl_scale=float(coef[0]), hl_scale=float(coef[1]), residual_oe=residual
    )
