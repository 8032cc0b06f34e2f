"""Simplicial cones, membership tests and pairwise face checks.

Membership solves small linear systems directly (Cramer-style via
numpy.linalg) with a pivot tolerance; no LP solver is involved.  The
inner product throughout is <a, b>_D = a^T D b.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .tolerances import EPS_SIGN


def d_inner(x: np.ndarray, y: np.ndarray, d: np.ndarray) -> float:
    return float(x @ (d * y))


def d_norm(x: np.ndarray, d: np.ndarray) -> float:
    return math.sqrt(max(d_inner(x, x, d), 0.0))


def ray_direction(x: np.ndarray) -> np.ndarray:
    """Euclidean-unit representative of the ray through x."""
    n = float(np.linalg.norm(x))
    if n == 0.0:
        return np.zeros_like(x)
    return x / n


def angular_gap(x: np.ndarray, y: np.ndarray) -> float:
    """sin of the angle between the rays through x and y."""
    a, b = ray_direction(x), ray_direction(y)
    return float(np.linalg.norm(np.cross(a, b)))


@dataclass(frozen=True)
class Cone:
    """Polyhedral cone spanned by <= 3 generators (columns of ``gens``)."""

    gens: np.ndarray  # (3, r)
    d: np.ndarray

    @property
    def rank(self) -> int:
        return self.gens.shape[1]

    def coefficients(self, x: np.ndarray, eps_sign: float = EPS_SIGN):
        """Expansion coefficients of x over the generators, or None.

        For 3 generators this is a direct solve (pivot tolerance on the
        determinant); for fewer, a least-squares fit that must reproduce x.
        """
        g = self.gens
        r = g.shape[1]
        x = np.asarray(x, dtype=float)
        if r == 0:
            return np.zeros(0) if np.linalg.norm(x) <= eps_sign else None
        if r == 3:
            # pivot scale: product of column norms, so large well-posed
            # systems are not mistaken for degenerate ones
            scale = float(np.prod(np.linalg.norm(g, axis=0)))
            if abs(np.linalg.det(g)) <= 1e-14 * max(1.0, scale):
                return None
            return np.linalg.solve(g, x)
        coef, *_ = np.linalg.lstsq(g, x, rcond=None)
        resid = g @ coef - x
        scale = max(1.0, float(np.abs(x).max()), float(np.abs(g).max()))
        if float(np.abs(resid).max()) > eps_sign * scale:
            return None
        return coef

    def contains(self, x, eps_sign: float = EPS_SIGN, strict: bool = False) -> bool:
        coef = self.coefficients(x, eps_sign)
        if coef is None:
            return False
        if coef.size == 0:  # the zero cone: only x = 0 got this far
            return True
        scale = max(1.0, float(np.abs(coef).max()))
        if strict:
            return bool(np.all(coef > eps_sign * scale))
        return bool(np.all(coef >= -eps_sign * scale))

    def is_simplicial(self, eps_sign: float = EPS_SIGN) -> bool:
        g = self.gens
        if g.shape[1] < 2:
            return g.shape[1] == 0 or float(np.abs(g).max()) > eps_sign
        gram = g.T @ g
        scale = max(1.0, float(np.abs(gram).max())) ** g.shape[1]
        return abs(np.linalg.det(gram)) > (eps_sign * scale) ** 2


def g_cone(seed, subset=(1, 2, 3)) -> Cone:
    """Cone over the selected modified g-columns; subset = all gives C(G^w)."""
    from .seeds import modified_vectors

    mv = modified_vectors(seed)
    cols = [mv.g_col(j) for j in sorted(set(subset))]
    gens = np.column_stack(cols) if cols else np.zeros((3, 0))
    return Cone(gens, seed.d)


def intersection_extreme_rays(
    normals_a: np.ndarray, normals_b: np.ndarray, d: np.ndarray, eps_sign: float = EPS_SIGN
):
    """Extreme rays of {x : <x, n>_D >= 0 for all 6 normals}.

    Candidate rays come from cross products of pairs of the (Euclidean)
    constraint normals m = D n; a candidate survives if it satisfies every
    constraint weakly.  Both cones being pointed keeps the enumeration
    finite and exact for this 3D case.
    """
    ms = [d * n for n in np.column_stack([normals_a, normals_b]).T]
    rays = []
    for i in range(len(ms)):
        for j in range(i + 1, len(ms)):
            v = np.cross(ms[i], ms[j])
            nv = float(np.linalg.norm(v))
            limit = eps_sign * max(1.0, float(np.linalg.norm(ms[i])) * float(np.linalg.norm(ms[j])))
            if nv <= limit:
                continue
            v = v / nv
            for cand in (v, -v):
                vals = np.array([m @ cand for m in ms])
                slack = eps_sign * np.maximum(1.0, np.array([np.linalg.norm(m) for m in ms]))
                if np.all(vals >= -slack):
                    if not any(np.linalg.norm(cand - r) <= 1e-9 for r in rays):
                        rays.append(cand)
    return rays
