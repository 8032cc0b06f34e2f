"""Global and local upper bounds for the G-fan, and trunk supports.

The global bound for direction i is the convex cone over the positive
sheet of the quadratic surface attached to the once-mutated matrix.  The
local bound of a branch is a simplicial cone with one closed facet,
computed from the data at the branch word alone.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

from .cones import d_inner, d_norm
from .errors import DomainError, NotBranch
from .matrices import (
    EigenData,
    ExchangeMatrix,
    alpha,
    chebyshev_u,
    eigen_analysis,
    mutate,
    pseudo_cartan_sk,
    require_cluster_cyclic,
)
from .seeds import SeedState, initial_seed, modified_vectors, mutate_seed
from .tolerances import EPS_EQ, EPS_SIGN


class QuadrantClass(enum.Enum):
    Q_PLUS = "q_plus"
    Q_MINUS = "q_minus"
    ZERO = "zero"
    OUTSIDE = "outside"


@dataclass(frozen=True)
class QuadraticBound:
    """Membership data for Q, Q+/-, H+/- of one quadratic surface.

    direction is the initial mutation index i, or None for the bound built
    from the initial matrix itself.  quadform(x) = (D^(1/2)x)^T A~ (D^(1/2)x),
    v_pairing(x) = <D^(1/2)x, v> with v the positive unit eigenvector.
    """

    direction: int | None
    a_tilde: np.ndarray
    d: np.ndarray
    eigen: EigenData

    def quadform(self, x) -> float:
        y = np.sqrt(self.d) * np.asarray(x, dtype=float)
        return float(y @ self.a_tilde @ y)

    def quadform_scale(self, x) -> float:
        """Sum of absolute monomials, the natural scale for residuals."""
        y = np.abs(np.sqrt(self.d) * np.asarray(x, dtype=float))
        return max(1.0, float(y @ np.abs(self.a_tilde) @ y))

    def v_pairing(self, x) -> float:
        y = np.sqrt(self.d) * np.asarray(x, dtype=float)
        return float(y @ self.eigen.v)

    def surface_residual(self, x) -> float:
        """|quadform(x) - 2| relative to the monomial scale."""
        return abs(self.quadform(x) - 2.0) / self.quadform_scale(x)

    def classify(self, x, eps_sign: float = EPS_SIGN) -> QuadrantClass:
        x = np.asarray(x, dtype=float)
        if float(np.abs(x).max(initial=0.0)) <= eps_sign:
            return QuadrantClass.ZERO
        q = self.quadform(x)
        if q <= eps_sign * self.quadform_scale(x):
            return QuadrantClass.OUTSIDE
        pairing = self.v_pairing(x)
        return QuadrantClass.Q_PLUS if pairing >= 0.0 else QuadrantClass.Q_MINUS

    def contains_q_plus(self, x, eps_sign: float = EPS_SIGN) -> bool:
        cls = self.classify(x, eps_sign)
        return cls in (QuadrantClass.Q_PLUS, QuadrantClass.ZERO)

    def in_h_plus(self, x, eps_sign: float = EPS_SIGN, eps_eq: float = EPS_EQ):
        """(ok, surface residual, normalized pairing) for x on H+."""
        resid = self.surface_residual(x)
        norm = d_norm(np.asarray(x, float), self.d)
        pairing = self.v_pairing(x) / max(norm, eps_sign)
        ok = resid <= eps_eq and pairing >= -eps_sign
        return ok, resid, pairing


def _bound_from(mat: ExchangeMatrix, direction, eps_sign: float, eps_eq: float) -> QuadraticBound:
    at = pseudo_cartan_sk(mat, eps_sign)
    eig = eigen_analysis(at, eps_sign, eps_eq)
    return QuadraticBound(direction, at, mat.d, eig)


def global_bound(
    b: ExchangeMatrix, i: int, eps_sign: float = EPS_SIGN, eps_eq: float = EPS_EQ
) -> QuadraticBound:
    """Q_i^+ data: the quadratic surface of mu_i(B) with its eigenvector."""
    require_cluster_cyclic(b, eps_sign)
    return _bound_from(mutate(b, i), i, eps_sign, eps_eq)


def initial_bound(b: ExchangeMatrix, eps_sign: float = EPS_SIGN, eps_eq: float = EPS_EQ) -> QuadraticBound:
    """Q_initial^+ data, built from the initial matrix itself."""
    require_cluster_cyclic(b, eps_sign)
    return _bound_from(b, None, eps_sign, eps_eq)


@dataclass(frozen=True)
class LocalBound:
    """The branch bound V^w: cone over (g~_S, g~_T, gbar), facet C(g~_S, g~_T) closed.

    planes are the three inward normals of the interior in the hyperplane
    form: the two S-power limit normals and c~_K.  cbar is the separating
    normal between V°^{wS} and V°^{wT}.
    """

    word: tuple[int, ...]
    d: np.ndarray
    g_s: np.ndarray
    g_t: np.ndarray
    gbar: np.ndarray
    cbar: np.ndarray
    planes: tuple[np.ndarray, np.ndarray, np.ndarray]
    alpha_sk: float
    alpha_tk: float

    @property
    def generators(self) -> np.ndarray:
        return np.column_stack([self.g_s, self.g_t, self.gbar])

    def _coefficients(self, x, eps_sign: float):
        gens = self.generators
        scale = max(1.0, float(np.prod(np.linalg.norm(gens, axis=0))))
        if abs(np.linalg.det(gens)) <= 1e-14 * scale:
            raise DomainError("degenerate local bound generators")
        return np.linalg.solve(gens, np.asarray(x, dtype=float))

    def contains(self, x, eps_sign: float = EPS_SIGN) -> bool:
        """Half-open membership: the open cone, or the closed facet C(g~_S, g~_T).

        Strictness on the two open facets uses +eps_sign; points that
        converge onto them from inside fall below any fixed band, so
        verifiers use :meth:`closure_contains` instead.
        """
        a, b, c = self._coefficients(x, eps_sign)
        scale = max(1.0, abs(a), abs(b), abs(c))
        tol = eps_sign * scale
        if abs(c) <= tol:  # on the closed facet plane
            return a >= -tol and b >= -tol
        return c > tol and a > tol and b > tol

    def plane_pairings(self, x):
        """(value, relative value) of <x, n>_D for the three bounding planes.

        The relative value is scaled by the sum of absolute monomials, the
        honest resolution of the pairing in floating point.
        """
        x = np.asarray(x, dtype=float)
        out = []
        for n in self.planes:
            terms = x * self.d * n
            val = float(terms.sum())
            out.append((val, val / max(1.0, float(np.abs(terms).sum()))))
        return out

    def closure_contains(self, x, eps_sign: float = EPS_SIGN) -> bool:
        """Weak membership in the closure, via the bounding-plane pairings.

        Pairings are used instead of a generator solve because the
        generator matrix grows ill-conditioned with depth while the dual
        pairings stay exact.
        """
        return all(rel >= -eps_sign for _, rel in self.plane_pairings(x))

    def interior_contains(self, x, eps_sign: float = EPS_SIGN) -> bool:
        coef = self._coefficients(x, eps_sign)
        scale = max(1.0, float(np.abs(coef).max()))
        return bool(np.all(coef > eps_sign * scale))

    def interior_contains_halfspace(self, x, eps_sign: float = EPS_SIGN) -> bool:
        """Same set through the three bounding planes, strict sides."""
        x = np.asarray(x, dtype=float)
        vals = [d_inner(x, n, self.d) for n in self.planes]
        scale = max(1.0, float(np.abs(x).max()))
        return all(v > eps_sign * scale for v in vals)

    def interior_points(self, count: int, seed: int = 0) -> np.ndarray:
        from .sampling import interior_points

        return interior_points(self.generators, count, seed)


def local_bound(seed: SeedState, eps_sign: float = EPS_SIGN) -> LocalBound:
    """Local upper bound data of the branch at seed.

    gbar = g~_K - alpha_SK^-1 g~_S - alpha_TK^-1 g~_T and
    cbar = alpha_SK c~_S - alpha_TK c~_T.
    """
    if seed.position.kind != "branch":
        raise NotBranch(f"word {seed.word} is not in a branch")
    k_, s_, t_ = seed.kst
    mv = modified_vectors(seed)
    a_sk = seed.alpha_label("S", "K", eps_sign)
    a_tk = seed.alpha_label("T", "K", eps_sign)
    gbar = mv.g_col(k_) - mv.g_col(s_) / a_sk - mv.g_col(t_) / a_tk
    cbar = a_sk * mv.c_col(s_) - a_tk * mv.c_col(t_)
    planes = (
        a_sk * mv.c_col(s_) + mv.c_col(k_),
        a_tk * mv.c_col(t_) + mv.c_col(k_),
        mv.c_col(k_).copy(),
    )
    return LocalBound(
        seed.word,
        seed.d,
        mv.g_col(s_).copy(),
        mv.g_col(t_).copy(),
        gbar,
        cbar,
        planes,
        a_sk,
        a_tk,
    )


def _trunk_frame(b: ExchangeMatrix, i: int, eps_sign: float):
    from .seeds import _initial_kst

    chk = require_cluster_cyclic(b, eps_sign)
    k0, s0, t0 = _initial_kst(chk.orientation, i)
    p = b.p
    return k0, s0, t0, p


@dataclass(frozen=True)
class TrunkSupport:
    """Support of the trunk fan for one initial direction.

    Generator form: the union of the open cone over (e~_t0, e~_s0, limit
    ray), the closed 2-face C(e~_s0, e~_t0) and the open wedge between
    e~_s0 and the limit ray.  Half-space form: see support_contains.
    """

    i: int
    k0: int
    s0: int
    t0: int
    d: np.ndarray
    e_s: np.ndarray
    e_t: np.ndarray
    limit_ray: np.ndarray
    alpha_ks: float

    @property
    def e_k(self) -> np.ndarray:
        e = np.zeros(3)
        e[self.k0 - 1] = 1.0 / math.sqrt(self.d[self.k0 - 1])
        return e

    @property
    def generators(self) -> np.ndarray:
        return np.column_stack([self.e_t, self.e_s, self.limit_ray])

    def interior_contains(self, x, eps_sign: float = EPS_SIGN) -> bool:
        """The open trunk interior T_i, via its three strict half-spaces."""
        x = np.asarray(x, dtype=float)
        scale = max(1.0, float(np.abs(x).max()))
        third = self.alpha_ks * self.e_k + self.e_s
        return (
            d_inner(x, self.e_k, self.d) < -eps_sign * scale
            and d_inner(x, self.e_t, self.d) > eps_sign * scale
            and d_inner(x, third, self.d) > eps_sign * scale
        )

    def support_contains(self, x, eps_sign: float = EPS_SIGN) -> bool:
        """Half-space form of the full (half-open) trunk support."""
        x = np.asarray(x, dtype=float)
        scale = max(1.0, float(np.abs(x).max()))
        tol = eps_sign * scale
        third = self.alpha_ks * self.e_k + self.e_s
        in_slab = (
            d_inner(x, self.e_k, self.d) <= tol
            and d_inner(x, self.e_t, self.d) >= -tol
            and d_inner(x, third, self.d) > tol
        )
        if in_slab:
            return True
        # the leftover closed ray C(e~_t0)
        t_comp = d_inner(x, self.e_t, self.d)
        residual = x - t_comp * self.e_t / d_inner(self.e_t, self.e_t, self.d)
        return t_comp >= -tol and float(np.abs(residual).max()) <= tol

    def support_contains_generators(self, x, eps_sign: float = EPS_SIGN) -> bool:
        """Generator (union-of-cones) form of the same set."""
        from .cones import Cone

        full = Cone(self.generators, self.d)
        coef = full.coefficients(np.asarray(x, dtype=float), eps_sign)
        if coef is None:
            return False
        lt, ls, lr = coef
        scale = max(1.0, float(np.abs(coef).max()))
        tol = eps_sign * scale
        if lt > tol and ls > tol and lr > tol:
            return True
        if abs(lr) <= tol and lt >= -tol and ls >= -tol:
            return True
        return abs(lt) <= tol and ls > tol and lr > tol


def trunk_support(b: ExchangeMatrix, i: int, eps_sign: float = EPS_SIGN) -> TrunkSupport:
    k0, s0, t0, p = _trunk_frame(b, i, eps_sign)
    d = b.d
    e = np.diag(1.0 / np.sqrt(d))
    a = alpha(float(p[k0 - 1, s0 - 1]), eps_sign)
    limit_ray = a * e[:, s0 - 1] - e[:, k0 - 1]
    return TrunkSupport(i, k0, s0, t0, d, e[:, s0 - 1].copy(), e[:, t0 - 1].copy(), limit_ray, a)


def trunk_p_values(b: ExchangeMatrix, i: int, n: int, eps_sign: float = EPS_SIGN):
    """(p_SK, p_KT, p_ST) at the trunk word [i]S^n, in closed form."""
    k0, s0, t0, p = _trunk_frame(b, i, eps_sign)
    pks = float(p[k0 - 1, s0 - 1])
    pst = float(p[s0 - 1, t0 - 1])
    pkt = float(p[k0 - 1, t0 - 1])
    u = lambda m: chebyshev_u(m, pks, eps_sign)
    p_st = -u(n) * pst + u(n + 1) * pkt
    p_kt = -u(n - 1) * pst + u(n) * pkt
    return pks, p_kt, p_st


def frak_c(b: ExchangeMatrix, i: int, n: int, sign: str, eps_sign: float = EPS_SIGN) -> np.ndarray:
    """The separating vectors c_i^+(n) / c_i^-(n) of the maximal branches."""
    if n < 0:
        raise DomainError(f"frak_c requires n >= 0, got {n}")
    if sign not in ("+", "-"):
        raise DomainError(f"sign must be '+' or '-', got {sign!r}")
    k0, s0, t0, p = _trunk_frame(b, i, eps_sign)
    d = b.d
    e = np.diag(1.0 / np.sqrt(d))
    ek, es, et = e[:, k0 - 1], e[:, s0 - 1], e[:, t0 - 1]
    pks, p_kt, p_st = trunk_p_values(b, i, n, eps_sign)
    u = lambda m: chebyshev_u(m, pks, eps_sign)
    if sign == "+":
        a_st = alpha(p_st, eps_sign)
        return a_st * et + u(n) * es + u(n + 1) * ek
    a_tk = alpha(p_kt, eps_sign)
    return -(1.0 / a_tk) * et - u(n - 1) * es - u(n) * ek


def frak_c_limit(b: ExchangeMatrix, i: int, eps_sign: float = EPS_SIGN):
    """(c_i^+, c_i^-): the n -> infinity limit of c_i^+(n), and c_i^-(0)."""
    k0, s0, t0, p = _trunk_frame(b, i, eps_sign)
    d = b.d
    e = np.diag(1.0 / np.sqrt(d))
    ek, es, et = e[:, k0 - 1], e[:, s0 - 1], e[:, t0 - 1]
    a = alpha(float(p[k0 - 1, s0 - 1]), eps_sign)
    plus = (-float(p[s0 - 1, t0 - 1]) + a * float(p[k0 - 1, t0 - 1])) * et + es + a * ek
    return plus, frak_c(b, i, 0, "-", eps_sign)
