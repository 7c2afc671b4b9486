"""Unit conversions.

All internal computation is SI: lengths in m, currents in A, fields in A/m.
Oersted, nanometers and microamperes appear only at input/output boundaries.
"""

import math

# 1 Oe = 1000/(4 pi) A/m
AM_PER_OE = 1000.0 / (4.0 * math.pi)

NM = 1e-9
UM = 1e-6


def si_from_oersted(h_oe):
    """Field in A/m from a value in Oe."""
    return h_oe * AM_PER_OE


def oersted_from_si(h_am):
    """Field in Oe from a value in A/m."""
    return h_am / AM_PER_OE
