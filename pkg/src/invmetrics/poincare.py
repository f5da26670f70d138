"""The unit-disk metric: distance, geodesics, and Euclidean ball shapes.

The normalization is the half-log form

    rho(z, w) = atanh |(z - w) / (1 - z conj(w))|

(curvature -4, unit density at the origin).  Every other module follows
this convention.
"""

from __future__ import annotations

import math

import numpy as np

from .errors import OutOfDomain
from .mobius import as_finite, disk_automorphism


def check_in_disk(z) -> complex:
    z = as_finite(z)
    if abs(z) >= 1.0:
        raise OutOfDomain(f"point not strictly inside the unit disk: {z!r}")
    return z


def poincare_distance(z, w) -> float:
    """Hyperbolic distance between two points of the open unit disk."""
    z = check_in_disk(z)
    w = check_in_disk(w)
    t = abs(z - w) / abs(1.0 - z * w.conjugate())
    return math.atanh(t)


def rho_vec(z, w):
    """Vectorized distance; no domain checks, intended for rasters.

    Saturates near 19 once an argument is within one ulp of the boundary
    (a 0/0 there means both points collapsed onto the rim, i.e., the true
    distance exceeds what float64 can resolve through this formula).
    """
    z = np.asarray(z, dtype=complex)
    w = np.asarray(w, dtype=complex)
    with np.errstate(invalid="ignore", divide="ignore"):
        t = np.abs(z - w) / np.abs(1.0 - z * np.conjugate(w))
    t = np.nan_to_num(t, nan=1.0, posinf=1.0)
    return np.arctanh(np.minimum(t, np.nextafter(1.0, 0.0)))


def disk_density(z) -> float:
    """Density 1 / (1 - |z|^2) of the unit-disk metric."""
    z = check_in_disk(z)
    return 1.0 / (1.0 - abs(z) ** 2)


def poincare_geodesic(z, w, t: float):
    """Constant-speed geodesic with gamma(0) = z, gamma(1) = w.

    For equal endpoints the curve is constant at z.
    """
    z = check_in_disk(z)
    w = check_in_disk(w)
    if z == w:
        return z
    move = disk_automorphism(z, 0.0)  # sends z to the origin
    w1 = move(w)
    r = abs(w1)
    s = math.tanh(t * math.atanh(r))
    point = (w1 / r) * s
    return move.inverse()(point)


def poincare_ball_euclidean(center, radius: float):
    """Euclidean center and radius of the hyperbolic ball {rho(center,.) < radius}.

    Hyperbolic disks in this model are Euclidean disks with shifted
    centers; for center 0 the Euclidean radius is tanh(radius).
    """
    c = check_in_disk(center)
    if radius <= 0:
        raise OutOfDomain(f"ball radius must be positive: {radius!r}")
    t = math.tanh(radius)
    m = abs(c) ** 2
    den = 1.0 - t * t * m
    return c * (1.0 - t * t) / den, t * (1.0 - m) / den
