"""Stereographic projection of rays onto the tangent plane at (1,1,1)/sqrt(3).

A nonzero vector is normalized to the unit sphere and projected from the
antipode N = -(1,1,1)/sqrt(3) onto the tangent plane at -N.  Plane
coordinates are taken in the fixed orthonormal frame
u = (1,-1,0)/sqrt(2), w = (1,1,-2)/sqrt(6), so the center ray (1,1,1)
maps to (0, 0).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import AtAntipode, DomainError
from .tolerances import EPS_SIGN

_N_HAT = np.array([1.0, 1.0, 1.0]) / math.sqrt(3.0)
_U_HAT = np.array([1.0, -1.0, 0.0]) / math.sqrt(2.0)
_W_HAT = np.array([1.0, 1.0, -2.0]) / math.sqrt(6.0)


@dataclass(frozen=True)
class ProjectedPoint:
    """Plane coordinates of a projected ray, with the projection factor t."""

    u: float
    w: float
    t: float

    def xy(self) -> tuple[float, float]:
        return (self.u, self.w)


def stereo_project(x, eps_sign: float = EPS_SIGN) -> ProjectedPoint:
    """Project the ray through x; positive multiples map to the same point."""
    p = np.asarray(x, dtype=float)
    norm = float(np.linalg.norm(p))
    if norm <= eps_sign:
        raise DomainError("cannot project the zero vector")
    p = p / norm
    c = float(p @ _N_HAT)
    if c < -1.0 + eps_sign:
        raise AtAntipode("ray is the antipode of the projection center")
    t = 2.0 / (1.0 + c)
    # N + t (p - N) lies on the tangent plane; N has no u/w component.
    return ProjectedPoint(t * float(p @ _U_HAT), t * float(p @ _W_HAT), t)


def project_polyline(points, clip_t: float = 50.0, eps_sign: float = EPS_SIGN):
    """Project a 3D polyline into plane segments, splitting at clipped points.

    Points too close to the antipode (or with t > clip_t) break the line;
    the pieces on either side are returned as separate segments.
    """
    segments: list[list[tuple[float, float]]] = []
    current: list[tuple[float, float]] = []
    for x in points:
        try:
            pp = stereo_project(x, eps_sign)
        except (AtAntipode, DomainError):
            pp = None
        if pp is None or pp.t > clip_t:
            if len(current) >= 2:
                segments.append(current)
            current = []
        else:
            current.append(pp.xy())
    if len(current) >= 2:
        segments.append(current)
    return segments
