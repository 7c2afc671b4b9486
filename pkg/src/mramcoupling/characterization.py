"""Hysteresis-loop synthesis and analysis.

The measurement model is a resistance-vs-field sweep on a fixed grid.
Synthetic loops realize a switching event at the first grid node past the
true switching field and place the midpoint resistance (rp + rap) / 2 on
that node, so a linear interpolation through the midpoint recovers an
on-grid switching field exactly and an off-grid one to within a step.

Analysis recovers the plateau resistances by medians, locates the two
branch transitions with a deadband state machine, and reduces them to
coercive field, loop offset, and the implied internal stray field.  Cycle
ensembles give an empirical switching-probability curve per branch, and a
ramp-rate activation model fits the anisotropy field and barrier height
from such a curve.
"""

import csv
import math
from dataclasses import dataclass

import numpy as np
from scipy.integrate import cumulative_trapezoid
from scipy.optimize import isotonic_regression, least_squares

from .errors import ConfigError, DataError, FitError
from .stack import RA_DEFAULT_OHM_UM2, ecd_from_rp

FIELD_MAX_DEFAULT_OE = 3000.0
FIELD_STEP_DEFAULT_OE = 12.0

# deadband half-width as a fraction of the plateau separation
_BAND_FRACTION = 0.1


def default_field_protocol(
    h_max_oe=FIELD_MAX_DEFAULT_OE, h_step_oe=FIELD_STEP_DEFAULT_OE
):
    """Field grid of one full sweep cycle: 0 -> +max -> -max -> 0."""
    if not h_max_oe > 0 or not h_step_oe > 0 or h_step_oe > h_max_oe:
        raise ConfigError(
            f"bad protocol: h_max={h_max_oe} Oe, h_step={h_step_oe} Oe"
        )
    up = np.arange(0.0, h_max_oe, h_step_oe)
    down = np.arange(h_max_oe, -h_max_oe, -h_step_oe)
    back = np.arange(-h_max_oe, 0.0 + 0.5 * h_step_oe, h_step_oe)
    return np.concatenate([up, down, back])


@dataclass(frozen=True, eq=False)
class HysteresisLoop:
    """One resistance-vs-field sweep."""

    h_oe: np.ndarray
    resistance_ohm: np.ndarray

    def __post_init__(self):
        h = np.asarray(self.h_oe, dtype=float)
        r = np.asarray(self.resistance_ohm, dtype=float)
        if h.ndim != 1 or h.shape != r.shape or h.size < 3:
            raise DataError(
                f"loop needs matching 1-d arrays of at least 3 points, "
                f"got {h.shape} and {r.shape}"
            )
        if not (np.isfinite(h).all() and np.isfinite(r).all()):
            raise DataError("loop contains non-finite samples")
        object.__setattr__(self, "h_oe", h)
        object.__setattr__(self, "resistance_ohm", r)


def synth_loop(
    rp_ohm,
    rap_ohm,
    hsw_p_oe,
    hsw_n_oe,
    noise_sigma_ohm=0.0,
    seed=None,
    h_oe=None,
):
    """Synthetic loop with switching fields hsw_p (ascending) and hsw_n.

    The device leaves AP at the first ascending node at or above hsw_p and
    leaves P at the first descending node at or below hsw_n; the node that
    realizes a switch carries the midpoint resistance.  Gaussian read
    noise of noise_sigma_ohm is added on top when requested.
    """
    if not 0 < rp_ohm < rap_ohm:
        raise DataError(f"need 0 < rp < rap, got {rp_ohm} and {rap_ohm}")
    if not hsw_n_oe < hsw_p_oe:
        raise DataError(f"need hsw_n < hsw_p, got {hsw_n_oe} and {hsw_p_oe}")
    if noise_sigma_ohm < 0:
        raise DataError(f"noise_sigma_ohm must be >= 0, got {noise_sigma_ohm}")
    h = default_field_protocol() if h_oe is None else np.asarray(h_oe, dtype=float)
    if h.size < 3:
        raise DataError("field protocol needs at least 3 points")
    if hsw_p_oe > h.max() or hsw_n_oe < h.min():
        raise DataError(
            f"switching fields ({hsw_p_oe}, {hsw_n_oe}) Oe fall outside the "
            f"protocol span [{h.min()}, {h.max()}] Oe"
        )

    mid = 0.5 * (rp_ohm + rap_ohm)
    r = np.empty_like(h)
    ascending_start = h[1] > h[0]
    if ascending_start:
        state = "p" if hsw_p_oe <= h[0] else "ap"
    else:
        state = "ap" if hsw_n_oe >= h[0] else "p"
    for i in range(h.size):
        up = h[i] > h[i - 1] if i > 0 else ascending_start
        if up and state == "ap" and h[i] >= hsw_p_oe:
            r[i] = mid
            state = "p"
        elif not up and state == "p" and h[i] <= hsw_n_oe:
            r[i] = mid
            state = "ap"
        else:
            r[i] = rap_ohm if state == "ap" else rp_ohm
    if noise_sigma_ohm > 0:
        r = r + np.random.default_rng(seed).normal(0.0, noise_sigma_ohm, h.size)
    return HysteresisLoop(h_oe=h, resistance_ohm=r)


def _monotone_runs(h):
    """Maximal monotone index runs [(lo, hi, up), ...]; hi is inclusive."""
    d = np.diff(h)
    if np.any(d == 0):
        raise DataError("field protocol has repeated consecutive values")
    runs = []
    lo = 0
    up = d[0] > 0
    for i in range(1, d.size):
        cur = d[i] > 0
        if cur != up:
            runs.append((lo, i, up))
            lo = i
            up = cur
    runs.append((lo, d.size, up))
    return runs


def _run_crossings(h, r, lo, hi, mid, band):
    """Mid-resistance crossings of one monotone run.

    A transition fires when the signal leaves the deadband on the other
    side; the crossing field comes from walking back to the bracketing
    sample pair and interpolating to R = mid.
    """
    crossings = []
    state = None
    last_idx = None
    for i in range(lo, hi + 1):
        if r[i] >= mid + band:
            level = "high"
        elif r[i] <= mid - band:
            level = "low"
        else:
            continue
        if state is not None and level != state:
            h_cross = None
            for j in range(last_idx, i):
                r0, r1 = r[j] - mid, r[j + 1] - mid
                if r0 * r1 <= 0.0:
                    if r1 == r0:
                        h_cross = h[j]
                    else:
                        h_cross = h[j] + (0.0 - r0) * (h[j + 1] - h[j]) / (r1 - r0)
                    break
            if h_cross is None:
                h_cross = 0.5 * (h[last_idx] + h[i])
            crossings.append(float(h_cross))
        state = level
        last_idx = i
    return crossings


@dataclass(frozen=True)
class LoopSummary:
    """Scalar reductions of one hysteresis loop."""

    hsw_p_oe: float
    hsw_n_oe: float
    hc_oe: float
    hoffset_oe: float
    hs_intra_oe: float
    rp_ohm: float
    rap_ohm: float
    tmr: float
    ecd_nm: float


def analyze_loop(loop, ra_ohm_um2=RA_DEFAULT_OHM_UM2):
    """Reduce a loop to switching fields, plateaus, and derived scalars.

    The loop offset is read as the negative of an internal stray field
    acting on the free layer, and the P plateau together with the RA
    product gives back the electrical diameter.
    """
    h, r = loop.h_oe, loop.resistance_ohm
    rough = 0.5 * (r.max() + r.min())
    high = r[r >= rough]
    low = r[r < rough]
    if high.size == 0 or low.size == 0:
        raise DataError("loop shows a single resistance level; no switching found")
    rap = float(np.median(high))
    rp = float(np.median(low))
    if not rap > rp:
        raise DataError("plateau separation vanished; loop is not bistable")
    mid = 0.5 * (rp + rap)
    band = _BAND_FRACTION * (rap - rp)

    up_cross = []
    down_cross = []
    for lo, hi, up in _monotone_runs(h):
        found = _run_crossings(h, r, lo, hi, mid, band)
        (up_cross if up else down_cross).extend(found)
    if len(up_cross) == 0 or len(down_cross) == 0:
        raise DataError(
            f"no switching transition on the "
            f"{'ascending' if not up_cross else 'descending'} branch"
        )
    if len(up_cross) > 1 or len(down_cross) > 1:
        raise DataError(
            f"multiple transitions per branch ({len(up_cross)} ascending, "
            f"{len(down_cross)} descending); loop is not single-domain"
        )
    hsw_p = up_cross[0]
    hsw_n = down_cross[0]
    hoffset = 0.5 * (hsw_p + hsw_n)
    return LoopSummary(
        hsw_p_oe=hsw_p,
        hsw_n_oe=hsw_n,
        hc_oe=0.5 * (hsw_p - hsw_n),
        hoffset_oe=hoffset,
        hs_intra_oe=-hoffset,
        rp_ohm=rp,
        rap_ohm=rap,
        tmr=(rap - rp) / rp,
        ecd_nm=ecd_from_rp(rp, ra_ohm_um2),
    )


@dataclass(frozen=True, eq=False)
class SwitchingProbCurve:
    """Empirical switching probability along one branch.

    For the descending branch the abscissa is the reversed field -h, so
    both curves rise from 0 to 1 left to right.
    """

    direction: str
    h_oe: np.ndarray
    p: np.ndarray
    n_cycles: int


def switching_probability(cycles, direction):
    """Per-node switching probability over repeated cycles.

    All cycles must share one field grid.  A node counts as switched once
    the resistance has crossed the midpoint level: at or below it on the
    ascending branch, at or above it on the descending branch.  The
    averaged curve is cleaned up with an isotonic fit so it is monotone
    despite read noise.
    """
    if direction not in ("ascending", "descending"):
        raise ConfigError(
            f"direction must be 'ascending' or 'descending', got {direction!r}"
        )
    if len(cycles) < 2:
        raise DataError(f"need at least 2 cycles, got {len(cycles)}")
    h = cycles[0].h_oe
    for c in cycles[1:]:
        if not np.array_equal(c.h_oe, h):
            raise DataError("cycles were taken on different field grids")

    r_all = np.stack([c.resistance_ohm for c in cycles])
    rough = 0.5 * (r_all.max() + r_all.min())
    rap = float(np.median(r_all[r_all >= rough]))
    rp = float(np.median(r_all[r_all < rough]))
    mid = 0.5 * (rp + rap)

    want_up = direction == "ascending"
    idx = []
    for lo, hi, up in _monotone_runs(h):
        if up == want_up:
            idx.extend(range(lo, hi + 1))
    idx = np.array(idx, dtype=int)
    if idx.size == 0:
        raise DataError(f"protocol has no {direction} branch")

    x = h[idx] if want_up else -h[idx]
    switched = r_all[:, idx] <= mid if want_up else r_all[:, idx] >= mid

    # nodes visited more than once per cycle pool their samples
    x_unique, inverse = np.unique(x, return_inverse=True)
    hits = np.zeros(x_unique.size)
    counts = np.zeros(x_unique.size)
    for row in switched:
        np.add.at(hits, inverse, row)
        np.add.at(counts, inverse, 1.0)
    p = hits / counts
    p = np.clip(isotonic_regression(p, increasing=True).x, 0.0, 1.0)
    return SwitchingProbCurve(
        direction=direction, h_oe=x_unique, p=p, n_cycles=len(cycles)
    )


@dataclass(frozen=True)
class RampProtocol:
    """Field-ramp timing behind a probability curve."""

    f0_hz: float = 1e9
    ramp_rate_oe_per_s: float = 6000.0

    def __post_init__(self):
        if not self.f0_hz > 0 or not self.ramp_rate_oe_per_s > 0:
            raise ConfigError(
                f"f0_hz and ramp_rate_oe_per_s must be positive, got "
                f"{self.f0_hz} and {self.ramp_rate_oe_per_s}"
            )


_N_FINE = 4001


def ramp_switching_probability(h_oe, hk_oe, delta0, protocol=RampProtocol()):
    """Switching probability of a field ramp from 0 to h (Oe).

    Thermal activation over a barrier delta0 * (1 - h/hk)^2 with attempt
    rate f0, accumulated along the ramp:

        P(h) = 1 - exp(-(f0 / rate) * integral_0^h exp(-delta) dx)
    """
    h = np.asarray(h_oe, dtype=float)
    if not hk_oe > 0 or not delta0 > 0:
        raise ConfigError(f"hk_oe={hk_oe} and delta0={delta0} must be positive")
    h_top = float(np.max(h, initial=0.0))
    if h_top <= 0.0:
        return np.zeros_like(h)
    grid = np.linspace(0.0, h_top, _N_FINE)
    barrier = delta0 * np.clip(1.0 - grid / hk_oe, 0.0, None) ** 2
    accum = cumulative_trapezoid(np.exp(-barrier), grid, initial=0.0)
    rate = protocol.f0_hz / protocol.ramp_rate_oe_per_s
    return 1.0 - np.exp(-rate * np.interp(np.clip(h, 0.0, None), grid, accum))


@dataclass(frozen=True)
class FitResult:
    hk_oe: float
    delta0: float
    residual: float
    n_points: int


def fit_hk_delta0(h_oe, p, protocol=RampProtocol()):
    """Fit (hk, delta0) of the ramp model to a probability curve.

    The curve must actually span the transition (reach below 0.1 and
    above 0.9).  Raises FitError with the best iterate attached when the
    optimizer does not converge.
    """
    h = np.asarray(h_oe, dtype=float)
    p = np.asarray(p, dtype=float)
    if h.shape != p.shape or h.ndim != 1 or h.size < 4:
        raise DataError("need matching 1-d arrays of at least 4 points")
    if p.min() > 0.1 or p.max() < 0.9:
        raise DataError(
            f"probability curve spans [{p.min():.3f}, {p.max():.3f}]; the "
            "transition is not resolved well enough to fit"
        )

    above = int(np.argmax(p >= 0.5))
    if above == 0:
        h50 = float(h[0])
    else:
        p0, p1 = p[above - 1], p[above]
        frac = 0.5 if p1 == p0 else (0.5 - p0) / (p1 - p0)
        h50 = float(h[above - 1] + frac * (h[above] - h[above - 1]))
    h50 = max(h50, 1.0)

    def resid(theta):
        return ramp_switching_probability(h, theta[0], theta[1], protocol) - p

    res = least_squares(
        resid,
        x0=[2.0 * h50, 40.0],
        bounds=([h50, 5.0], [20.0 * h50, 400.0]),
        x_scale=[1e3, 10.0],
        xtol=1e-14,
        ftol=1e-14,
        gtol=1e-14,
    )
    rms = float(math.sqrt(np.mean(res.fun**2)))
    if not res.success:
        raise FitError(
            f"ramp-model fit did not converge: {res.message}",
            best=(float(res.x[0]), float(res.x[1])),
            residual=rms,
        )
    return FitResult(
        hk_oe=float(res.x[0]), delta0=float(res.x[1]), residual=rms, n_points=h.size
    )


def _read_rows(path, required):
    try:
        with open(path, newline="") as fh:
            reader = csv.DictReader(_strip_comments(fh))
            if reader.fieldnames is None:
                raise DataError(f"{path}: empty file")
            missing = [c for c in required if c not in reader.fieldnames]
            if missing:
                raise DataError(f"{path}: missing columns {missing}")
            rows = list(reader)
    except OSError as exc:
        raise DataError(f"{path}: {exc}") from exc
    if not rows:
        raise DataError(f"{path}: no data rows")
    return rows


def _strip_comments(fh):
    for line in fh:
        if not line.lstrip().startswith("#"):
            yield line


def _float_field(row, key, path):
    try:
        return float(row[key])
    except (TypeError, ValueError) as exc:
        raise DataError(f"{path}: bad value {row[key]!r} in column {key}") from exc


def read_loop_csv(path):
    """Single loop from a CSV with columns h_oe, resistance_ohm."""
    rows = _read_rows(path, ("h_oe", "resistance_ohm"))
    h = np.array([_float_field(row, "h_oe", path) for row in rows])
    r = np.array([_float_field(row, "resistance_ohm", path) for row in rows])
    return HysteresisLoop(h_oe=h, resistance_ohm=r)


def read_calibration_csv(path):
    """Measured (ecd_nm, hs_intra_oe) pairs for sheet-moment calibration."""
    rows = _read_rows(path, ("ecd_nm", "hs_intra_oe"))
    return [
        (_float_field(row, "ecd_nm", path), _float_field(row, "hs_intra_oe", path))
        for row in rows
    ]


def read_cycles_csv(path):
    """Cycle ensemble from a CSV with columns cycle, h_oe, resistance_ohm.

    Rows are grouped by the cycle label in order of first appearance.
    """
    rows = _read_rows(path, ("cycle", "h_oe", "resistance_ohm"))
    groups = {}
    for row in rows:
        groups.setdefault(row["cycle"], []).append(
            (_float_field(row, "h_oe", path), _float_field(row, "resistance_ohm", path))
        )
    cycles = []
    for pairs in groups.values():
        h = np.array([p[0] for p in pairs])
        r = np.array([p[1] for p in pairs])
        cycles.append(HysteresisLoop(h_oe=h, resistance_ohm=r))
    return cycles
