"""Inter-cell coupling in a 3x3 array patch.

The victim cell sits at the center of a 3x3 neighborhood; the eight
aggressors contribute stray field at the victim's FL center.  Aggressor
RL and HL loops are state-independent, while each aggressor FL flips sign
with the stored bit, so the field over all 2^8 neighborhood patterns is an
affine function of how many direct and diagonal neighbors hold AP:

    hz(pattern) = hz(all P) + ones_direct * step_direct + ones_diag * step_diag

The pattern code packs the eight bits little-endian: bits 0..3 are the
direct (edge-sharing) neighbors, bits 4..7 the diagonal ones; bit value 1
means AP.  The relative variation of hz across patterns, normalized by the
coercive field, is the disturbance ratio psi.
"""

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, replace

import numpy as np

from .errors import ConfigError, DomainError, GeometryError
from .magnetostatics import DEFAULT_POLICY, loop_field
from .units import oersted_from_si, si_from_oersted

# unit cell offsets: C0..C3 direct, C4..C7 diagonal
_CELL_OFFSETS = (
    (1, 0),
    (-1, 0),
    (0, 1),
    (0, -1),
    (1, 1),
    (1, -1),
    (-1, 1),
    (-1, -1),
)

PITCH_RATIO_MIN = 1.5
PITCH_SWEEP_MAX_NM = 200.0


@dataclass(frozen=True)
class NeighborhoodPattern:
    """States of the eight aggressor cells; 0 = P, 1 = AP."""

    bits: tuple

    def __post_init__(self):
        if len(self.bits) != 8 or any(b not in (0, 1) for b in self.bits):
            raise ConfigError(f"pattern bits must be eight 0/1 values, got {self.bits}")

    @classmethod
    def from_int(cls, np8):
        if not 0 <= np8 <= 255:
            raise ConfigError(f"np8 must be in [0, 255], got {np8}")
        return cls(tuple((np8 >> i) & 1 for i in range(8)))

    @property
    def np8(self):
        return sum(b << i for i, b in enumerate(self.bits))

    @property
    def ones_direct(self):
        return sum(self.bits[:4])

    @property
    def ones_diag(self):
        return sum(self.bits[4:])


@dataclass(frozen=True)
class ArrayConfig:
    """Identical cells on a square grid with the given pitch."""

    stack: object
    pitch_nm: float

    def __post_init__(self):
        if self.pitch_nm < self.stack.ecd_nm:
            raise GeometryError(
                f"pitch {self.pitch_nm} nm is below the cell diameter "
                f"{self.stack.ecd_nm} nm; cells overlap"
            )


def _aggressor_hz(config, policy):
    """Per-cell hz (A/m) at the victim FL center.

    Returns (fixed, fl) where fixed[i] is the RL+HL contribution of cell i
    and fl[i] the FL contribution with the cell in P.
    """
    stack = config.stack
    p = config.pitch_nm
    fixed = np.empty(8)
    fl = np.empty(8)
    origin = (0.0, 0.0, 0.0)
    for i, (ox, oy) in enumerate(_CELL_OFFSETS):
        xy = (ox * p, oy * p)
        fixed[i] = (
            loop_field(stack.layer_loop(stack.rl, xy), origin, policy).hz
            + loop_field(stack.layer_loop(stack.hl, xy), origin, policy).hz
        )
        fl[i] = loop_field(stack.layer_loop(stack.fl, xy), origin, policy).hz
    return fixed, fl


def inter_stray_field(config, pattern, policy=DEFAULT_POLICY):
    """hz (Oe) at the victim FL center for one neighborhood pattern."""
    fixed, fl = _aggressor_hz(config, policy)
    signs = np.array([-1.0 if b else 1.0 for b in pattern.bits])
    return oersted_from_si(float(np.sum(fixed) + np.dot(signs, fl)))


@dataclass(frozen=True)
class CouplingReport:
    """Field map over all 256 neighborhood patterns, plus its affine summary."""

    ecd_nm: float
    pitch_nm: float
    hc_oe: float
    base_oe: float
    step_direct_oe: float
    step_diag_oe: float
    psi: float
    full_map_oe: tuple


def coupling_map(config, hc_oe, policy=DEFAULT_POLICY):
    """Field at the victim for every pattern, and the disturbance ratio psi.

    hc_oe is the coercive field used to normalize the worst-case field
    variation: psi = (max - min) / hc.
    """
    if hc_oe is None or not hc_oe > 0:
        raise DomainError(f"coupling_map requires a positive hc_oe, got {hc_oe}")

    fixed, fl = _aggressor_hz(config, policy)
    fixed_sum = float(np.sum(fixed))

    full = np.empty(256)
    for n in range(256):
        signs = np.array([-1.0 if (n >> i) & 1 else 1.0 for i in range(8)])
        full[n] = oersted_from_si(fixed_sum + float(np.dot(signs, fl)))

    base = full[0]
    # flipping one neighbor changes hz by -2x its P-state FL contribution
    step_direct = oersted_from_si(-2.0 * float(fl[0]))
    step_diag = oersted_from_si(-2.0 * float(fl[4]))

    # the map must collapse onto the 25 (ones_direct, ones_diag) classes
    scale = float(np.max(np.abs(full)))
    classes = {}
    for n in range(256):
        pat = NeighborhoodPattern.from_int(n)
        classes.setdefault((pat.ones_direct, pat.ones_diag), []).append(full[n])
    assert len(classes) == 25
    for vals in classes.values():
        assert np.ptp(vals) <= 1e-9 * scale, "pattern classes failed to collapse"

    psi = float((np.max(full) - np.min(full)) / hc_oe)
    return CouplingReport(
        ecd_nm=config.stack.ecd_nm,
        pitch_nm=config.pitch_nm,
        hc_oe=hc_oe,
        base_oe=float(base),
        step_direct_oe=step_direct,
        step_diag_oe=step_diag,
        psi=psi,
        full_map_oe=tuple(full),
    )


def _psi_single(stack, pitch_nm, hc_si, policy):
    # variation over patterns = 2 * (4|fl_direct| + 4|fl_diag|)
    cfg = ArrayConfig(stack=stack, pitch_nm=pitch_nm)
    p = cfg.pitch_nm
    origin = (0.0, 0.0, 0.0)
    fl_d = loop_field(stack.layer_loop(stack.fl, (p, 0.0)), origin, policy).hz
    fl_g = loop_field(stack.layer_loop(stack.fl, (p, p)), origin, policy).hz
    return 8.0 * (abs(fl_d) + abs(fl_g)) / hc_si


def psi_sweep(
    stack_template,
    ecd_list_nm,
    pitch_range_nm,
    hc_oe,
    policy=DEFAULT_POLICY,
    threads=1,
):
    """Disturbance ratio over a (size, pitch) grid.

    Parameters
    ----------
    stack_template : MtjStack
        Sheet moments and layer geometry; its own ecd is ignored.
    ecd_list_nm : sequence of float
    pitch_range_nm : (min, max, step)
    hc_oe : float
        Coercive field for normalization.
    threads : int
        Grid points are independent; with threads > 1 they are evaluated
        in a thread pool.  Results are assembled in grid order either way,
        so the output is identical.

    Returns
    -------
    list of (ecd_nm, pitch_nm, psi)
        Grid points with pitch below 1.5x ecd or above 200 nm are skipped.
    """
    if hc_oe is None or not hc_oe > 0:
        raise DomainError(f"psi_sweep requires a positive hc_oe, got {hc_oe}")
    pmin, pmax, pstep = pitch_range_nm
    if not pstep > 0 or pmax < pmin:
        raise ConfigError(f"bad pitch range {pitch_range_nm}")
    hc_si = si_from_oersted(hc_oe)

    grid = []
    for ecd in ecd_list_nm:
        stack = replace(stack_template, ecd_nm=float(ecd))
        for pitch in np.arange(pmin, pmax + 0.5 * pstep, pstep):
            pitch = float(pitch)
            if pitch < PITCH_RATIO_MIN * ecd or pitch > PITCH_SWEEP_MAX_NM:
                continue
            grid.append((stack, float(ecd), pitch))

    def run(item):
        stack, ecd, pitch = item
        return (ecd, pitch, float(_psi_single(stack, pitch, hc_si, policy)))

    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            return list(pool.map(run, grid))
    return [run(item) for item in grid]


def min_pitch_for_psi(stack_template, ecd_nm, psi_target, hc_oe, policy=DEFAULT_POLICY):
    """Smallest pitch on a 1 nm grid with psi at or below the target.

    The grid starts at 1.5x ecd and ends at 200 nm.  Returns None when even
    the loosest pitch on the grid exceeds the target.
    """
    if not psi_target > 0:
        raise ConfigError(f"psi_target must be positive, got {psi_target}")
    stack = replace(stack_template, ecd_nm=float(ecd_nm))
    hc_si = si_from_oersted(hc_oe) if hc_oe and hc_oe > 0 else None
    if hc_si is None:
        raise DomainError(f"min_pitch_for_psi requires a positive hc_oe, got {hc_oe}")

    start = PITCH_RATIO_MIN * ecd_nm
    n_steps = int(math.floor(PITCH_SWEEP_MAX_NM - start))
    for k in range(n_steps + 1):
        pitch = start + k
        if _psi_single(stack, pitch, hc_si, policy) <= psi_target:
            return pitch
    return None
