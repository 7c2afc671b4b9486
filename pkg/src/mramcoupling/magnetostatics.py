"""Magnetic field of circular bound-current loops.

A thin, uniformly out-of-plane magnetized disk produces the same external
field as a circular loop running along its rim and carrying the bound
current I = Ms * t (saturation magnetization times thickness, in amperes).
The loop field is evaluated by discretizing the rim into straight segments
and summing their Biot-Savart contributions at the segment midpoints:

    H(p) = (1/4pi) * sum_k  I * (dl_k x r_k) / |r_k|^3

where dl_k is the chord vector of segment k and r_k points from the segment
midpoint to the probe p.  The permeability of free space is divided out, so
results are H-fields in A/m rather than B-fields in tesla.

Geometry is supplied in nm at the call boundary and converted to meters
internally.  The quadrature error falls off as 1/n^2 in the segment count;
the default of 256 segments keeps on-axis errors below 1e-3 everywhere
within ten radii of the loop.
"""

import math
from dataclasses import dataclass

import numpy as np

from .errors import GeometryError
from .units import NM

# Probes closer than this to the idealized rim wire are rejected: the
# integrand diverges and the segment sum is meaningless there.
WIRE_GUARD_M = 1e-12


@dataclass(frozen=True)
class DiscretizationPolicy:
    """Number of straight segments used to approximate the rim."""

    n_segments: int = 256

    def __post_init__(self):
        if self.n_segments < 8:
            raise ValueError(
                f"n_segments must be >= 8, got {self.n_segments}"
            )


DEFAULT_POLICY = DiscretizationPolicy()


@dataclass(frozen=True)
class FieldVector:
    """H-field components in A/m."""

    hx: float
    hy: float
    hz: float

    def as_array(self):
        return np.array([self.hx, self.hy, self.hz])

    @property
    def magnitude(self):
        return math.hypot(self.hx, self.hy, self.hz)


ZERO_FIELD = FieldVector(0.0, 0.0, 0.0)


@dataclass(frozen=True)
class CurrentLoop:
    """Circular loop with its axis along z.

    Parameters
    ----------
    center_nm : tuple of float
        Loop center (x, y, z) in nm.
    radius_nm : float
        Loop radius in nm, strictly positive.
    current_a : float
        Signed bound current in A.  Positive current circulates
        counterclockwise seen from +z, i.e. the magnetic moment points
        along +z.
    """

    center_nm: tuple
    radius_nm: float
    current_a: float

    def __post_init__(self):
        if len(self.center_nm) != 3:
            raise ValueError("center_nm must be a 3-tuple")
        if not self.radius_nm > 0:
            raise ValueError(f"radius_nm must be positive, got {self.radius_nm}")

    @property
    def moment_am2(self):
        """Magnetic moment I * pi * R^2 in A m^2."""
        r = self.radius_nm * NM
        return self.current_a * math.pi * r * r


def on_axis_field_analytic(loop, z_nm):
    """Closed-form hz on the loop axis, in A/m.

    Parameters
    ----------
    loop : CurrentLoop
    z_nm : float
        Axial probe position in nm, measured in absolute coordinates
        (the loop's own center z is subtracted internally).

    Returns
    -------
    float
        hz = I R^2 / (2 (R^2 + z^2)^(3/2)).
    """
    r = loop.radius_nm * NM
    z = (z_nm - loop.center_nm[2]) * NM
    return loop.current_a * r * r / (2.0 * (r * r + z * z) ** 1.5)


def _wire_distance_m(loop, point_nm):
    # distance from the probe to the idealized circular wire
    px = (point_nm[0] - loop.center_nm[0]) * NM
    py = (point_nm[1] - loop.center_nm[1]) * NM
    pz = (point_nm[2] - loop.center_nm[2]) * NM
    rho = math.hypot(px, py)
    return math.hypot(rho - loop.radius_nm * NM, pz)


def loop_field(loop, point_nm, policy=DEFAULT_POLICY):
    """Discretized Biot-Savart H-field of one loop at one probe point.

    Parameters
    ----------
    loop : CurrentLoop
    point_nm : sequence of float
        Probe (x, y, z) in nm.
    policy : DiscretizationPolicy

    Returns
    -------
    FieldVector
        Field in A/m.

    Raises
    ------
    GeometryError
        If the probe lies on (or within 1e-12 m of) the rim wire.
    """
    if _wire_distance_m(loop, point_nm) < WIRE_GUARD_M:
        raise GeometryError(
            f"probe {tuple(point_nm)} nm lies on the rim of loop "
            f"r={loop.radius_nm} nm at {loop.center_nm} nm"
        )

    n = policy.n_segments
    theta = 2.0 * np.pi * np.arange(n + 1) / n
    r_m = loop.radius_nm * NM
    vx = r_m * np.cos(theta)
    vy = r_m * np.sin(theta)

    # chord vectors and their midpoints (the loop lies in its own z-plane)
    dlx = np.diff(vx)
    dly = np.diff(vy)
    mx = 0.5 * (vx[1:] + vx[:-1])
    my = 0.5 * (vy[1:] + vy[:-1])

    rx = (point_nm[0] - loop.center_nm[0]) * NM - mx
    ry = (point_nm[1] - loop.center_nm[1]) * NM - my
    rz = (point_nm[2] - loop.center_nm[2]) * NM

    inv_r3 = (rx * rx + ry * ry + rz * rz) ** -1.5
    coeff = loop.current_a / (4.0 * np.pi)
    # dl x r with dl_z = 0
    hx = coeff * np.sum(dly * rz * inv_r3)
    hy = coeff * np.sum(-dlx * rz * inv_r3)
    hz = coeff * np.sum((dlx * ry - dly * rx) * inv_r3)

    field = FieldVector(float(hx), float(hy), float(hz))
    if not all(map(math.isfinite, (field.hx, field.hy, field.hz))):
        raise GeometryError(f"non-finite field at {tuple(point_nm)} nm")
    return field


def superpose(fields):
    """Componentwise sum of FieldVectors.

    Uses exactly rounded summation so the result does not depend on the
    order of the inputs.
    """
    fields = list(fields)
    return FieldVector(
        math.fsum(f.hx for f in fields),
        math.fsum(f.hy for f in fields),
        math.fsum(f.hz for f in fields),
    )
