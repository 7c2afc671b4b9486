"""Device metrics under a perpendicular stray field.

Three families of figures of merit, all driven by the net out-of-plane
field h at the free layer:

* critical switching current, linear in h with a direction-dependent sign,
* average switching time in the thermally activated Sun regime, inverse in
  the overdrive current margin,
* thermal stability factor, quadratic in h with a state-dependent sign.

Sign conventions: positive h points along +z, the P state magnetization
points along +z, and the stray field of the default stack is negative at
the free layer.  A negative h therefore assists P -> AP and opposes
AP -> P, and it deepens the AP well while it shallows the P well.
"""

import math
from dataclasses import dataclass

from scipy.constants import e as _E_CHARGE
from scipy.constants import hbar as _HBAR
from scipy.constants import mu_0 as _MU0

from .errors import ConfigError, DomainError
from .units import si_from_oersted

IC0_DEFAULT_A = 57.2e-6
HK_DEFAULT_OE = 4646.8
DELTA0_DEFAULT = 45.5
T_REF_DEFAULT_K = 300.0
EULER_C_DEFAULT = 0.577

_SIGN_BY_DIRECTION = {"p_to_ap": 1.0, "ap_to_p": -1.0}
_SIGN_BY_STATE = {"p": 1.0, "ap": -1.0}

# relative tolerance for the ic0-vs-constituents cross check
_IC0_CONSISTENCY_RTOL = 1e-6


def _direction_sign(direction):
    try:
        return _SIGN_BY_DIRECTION[direction]
    except KeyError:
        raise ConfigError(
            f"direction must be 'p_to_ap' or 'ap_to_p', got {direction!r}"
        ) from None


def _state_sign(state):
    try:
        return _SIGN_BY_STATE[state]
    except KeyError:
        raise ConfigError(f"state must be 'p' or 'ap', got {state!r}") from None


def ic0_from_constituents(eta, alpha, ms_a_per_m, volume_m3, hk_oe):
    """Zero-field critical current from the macrospin current balance.

    ic0 = (2 e alpha / hbar) * mu0 * Ms * V * Hk / eta, with Hk in A/m.
    """
    if not eta > 0 or not alpha > 0 or not ms_a_per_m > 0 or not volume_m3 > 0:
        raise ConfigError("constituents must all be positive")
    hk_si = si_from_oersted(hk_oe)
    return (2.0 * alpha * _E_CHARGE / _HBAR) * _MU0 * ms_a_per_m * volume_m3 * hk_si / eta


@dataclass(frozen=True)
class SwitchParams:
    """Critical-current model ic = ic0 * (1 + s * h / hk).

    ic0_a and hk_oe are the working parameters.  The microscopic
    constituents (spin efficiency eta, damping alpha, Ms, volume) are
    optional; when all four are given, ic0_a must agree with the value
    they imply or construction fails.
    """

    ic0_a: float = IC0_DEFAULT_A
    hk_oe: float = HK_DEFAULT_OE
    eta: float = None
    alpha: float = None
    ms_a_per_m: float = None
    volume_m3: float = None

    def __post_init__(self):
        if not self.ic0_a > 0:
            raise ConfigError(f"ic0_a must be positive, got {self.ic0_a}")
        if not self.hk_oe > 0:
            raise ConfigError(f"hk_oe must be positive, got {self.hk_oe}")
        parts = (self.eta, self.alpha, self.ms_a_per_m, self.volume_m3)
        given = [p is not None for p in parts]
        if any(given) and not all(given):
            raise ConfigError(
                "eta, alpha, ms_a_per_m, volume_m3 must be given together"
            )
        if all(given):
            implied = ic0_from_constituents(
                self.eta, self.alpha, self.ms_a_per_m, self.volume_m3, self.hk_oe
            )
            if abs(self.ic0_a - implied) > _IC0_CONSISTENCY_RTOL * implied:
                raise ConfigError(
                    f"ic0_a={self.ic0_a:.6e} A disagrees with the value "
                    f"{implied:.6e} A implied by its constituents"
                )


def critical_current(params, direction, h_oe=0.0):
    """Critical switching current (A) under a net field h (Oe).

    A field along the P direction raises the P -> AP threshold and lowers
    the AP -> P one; the two always average to ic0.
    """
    s = _direction_sign(direction)
    if abs(h_oe) >= params.hk_oe:
        raise DomainError(
            f"|h| = {abs(h_oe)} Oe is outside the uniaxial regime "
            f"(hk = {params.hk_oe} Oe)"
        )
    return params.ic0_a * (1.0 + s * h_oe / params.hk_oe)


@dataclass(frozen=True)
class ResistanceModel:
    """Junction resistance vs bias.

    R_P is bias independent.  R_AP relaxes from rp*(1+tmr) at zero bias
    toward R_P with a Lorentzian roll-off of width vh_v.
    """

    rp_ohm: float
    tmr: float = 0.85
    vh_v: float = 0.5

    def __post_init__(self):
        if not self.rp_ohm > 0:
            raise ConfigError(f"rp_ohm must be positive, got {self.rp_ohm}")
        if not self.tmr > 0:
            raise ConfigError(f"tmr must be positive, got {self.tmr}")
        if not self.vh_v > 0:
            raise ConfigError(f"vh_v must be positive, got {self.vh_v}")

    @property
    def rap0_ohm(self):
        return self.rp_ohm * (1.0 + self.tmr)

    def resistance(self, state, v_v=0.0):
        """Resistance (ohm) of the given state at bias v_v (V)."""
        _state_sign(state)
        if state == "p":
            return self.rp_ohm
        return self.rp_ohm + (self.rap0_ohm - self.rp_ohm) / (
            1.0 + (v_v / self.vh_v) ** 2
        )

    def current(self, state, v_v):
        """Drive current (A) through the junction at bias v_v (V)."""
        return v_v / self.resistance(state, v_v)


@dataclass(frozen=True)
class SunParams:
    """Thermally activated switching-time model t_w = 1 / (fac * B * I_m).

    prefactor_b absorbs the material and geometry details; it is treated
    as a calibration constant with units 1/(A s).  fac collapses the
    attempt-time logarithm: fac = 2 / (euler_c + ln(pi^2 * delta0 / 4)).
    """

    prefactor_b: float
    delta_for_log: float = DELTA0_DEFAULT
    euler_c: float = EULER_C_DEFAULT

    def __post_init__(self):
        if not self.prefactor_b > 0:
            raise ConfigError(f"prefactor_b must be positive, got {self.prefactor_b}")
        if not self.delta_for_log > 0:
            raise ConfigError(
                f"delta_for_log must be positive, got {self.delta_for_log}"
            )

    @property
    def log_factor(self):
        return 2.0 / (self.euler_c + math.log(math.pi**2 * self.delta_for_log / 4.0))


def overdrive_current(resist, switch, direction, vp_v, h_oe=0.0):
    """Current margin I_m = I_drive - I_c (A) for a write pulse at vp_v.

    The drive current uses the resistance of the initial state, so an
    AP -> P write sees the bias-dependent R_AP.
    """
    if not vp_v > 0:
        raise ConfigError(f"vp_v must be positive, got {vp_v}")
    state = "ap" if direction == "ap_to_p" else "p"
    _direction_sign(direction)
    i_drive = resist.current(state, vp_v)
    i_c = critical_current(switch, direction, h_oe)
    return i_drive - i_c


def avg_switching_time(sun, switch, resist, direction, vp_v, h_oe=0.0):
    """Average switching time (ns) of a write pulse at amplitude vp_v (V).

    Raises DomainError when the pulse is sub-critical (margin <= 0); the
    model only covers the overdriven regime.
    """
    i_m = overdrive_current(resist, switch, direction, vp_v, h_oe)
    if i_m <= 0.0:
        raise DomainError(
            f"vp = {vp_v} V is sub-critical for {direction} at h = {h_oe} Oe "
            f"(margin {i_m:.3e} A)"
        )
    return 1e9 / (sun.log_factor * sun.prefactor_b * i_m)


def calibrate_sun_prefactor(im_slow_a, im_fast_a, target_spread_s, sun_template):
    """Prefactor B that puts a given gap between two switching times.

    The spread t_w(im_slow) - t_w(im_fast) is linear in 1/B, so the value
    is exact: B = (1/im_slow - 1/im_fast) / (fac * spread).
    """
    if not 0 < im_slow_a < im_fast_a:
        raise ConfigError(
            f"need 0 < im_slow < im_fast, got {im_slow_a} and {im_fast_a}"
        )
    if not target_spread_s > 0:
        raise ConfigError(f"target spread must be positive, got {target_spread_s}")
    fac = sun_template.log_factor
    return (1.0 / im_slow_a - 1.0 / im_fast_a) / (fac * target_spread_s)


@dataclass(frozen=True)
class StabilityParams:
    """Thermal stability model delta = delta0(T) * (1 + s * h / hk)^2."""

    delta0: float = DELTA0_DEFAULT
    t_ref_k: float = T_REF_DEFAULT_K
    hk_oe: float = HK_DEFAULT_OE

    def __post_init__(self):
        if not self.delta0 > 0:
            raise ConfigError(f"delta0 must be positive, got {self.delta0}")
        if not self.t_ref_k > 0:
            raise ConfigError(f"t_ref_k must be positive, got {self.t_ref_k}")
        if not self.hk_oe > 0:
            raise ConfigError(f"hk_oe must be positive, got {self.hk_oe}")


def delta0_at(params, t_k):
    """Zero-field barrier at temperature t_k (K); scales as 1/T."""
    if not t_k > 0:
        raise DomainError(f"temperature must be positive, got {t_k} K")
    return params.delta0 * params.t_ref_k / t_k


def thermal_stability(params, state, h_oe=0.0, t_k=T_REF_DEFAULT_K):
    """Barrier height (in kT units) of one state under a net field h (Oe).

    A field along +z deepens the P well (s = +1) and shallows the AP well
    (s = -1).  sqrt(delta_p) + sqrt(delta_ap) is field independent.
    """
    s = _state_sign(state)
    if abs(h_oe) >= params.hk_oe:
        raise DomainError(
            f"|h| = {abs(h_oe)} Oe is outside the uniaxial regime "
            f"(hk = {params.hk_oe} Oe)"
        )
    return delta0_at(params, t_k) * (1.0 + s * h_oe / params.hk_oe) ** 2


@dataclass(frozen=True)
class WorstCaseDelta:
    delta_min: float
    state: str
    np8: int


def worst_case_delta(params, h_intra_oe, inter_map_oe, t_k=T_REF_DEFAULT_K):
    """Minimum barrier over both states and all 256 neighborhood patterns.

    inter_map_oe holds the aggressor field for pattern code n at index n.
    Ties keep the first candidate in scan order (np8 ascending, P before
    AP), so the result is deterministic.
    """
    if len(inter_map_oe) != 256:
        raise ConfigError(f"inter_map_oe must have 256 entries, got {len(inter_map_oe)}")
    best = None
    for np8, h_inter in enumerate(inter_map_oe):
        h = h_intra_oe + h_inter
        for state in ("p", "ap"):
            d = thermal_stability(params, state, h, t_k)
            if best is None or d < best.delta_min:
                best = WorstCaseDelta(delta_min=d, state=state, np8=np8)
    return best
