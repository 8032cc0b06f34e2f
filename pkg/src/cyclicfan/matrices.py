"""Validated 3x3 exchange-matrix arithmetic.

Mutation, cluster-cyclicity classification via the Markov constant,
pseudo Cartan eigen-analysis, and the scalar functions alpha(p) and
u_n(p) that the rest of the package consumes.

Direction indices k are 1-based throughout the public API, matching the
usual labeling of mutation directions by {1, 2, 3}.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

from .errors import (
    AmbiguousDescent,
    DomainError,
    NoSymmetrizer,
    NotClusterCyclic,
    NotCyclic,
    NotSkewSymmetrizable,
)
from .tolerances import EPS_EQ, EPS_SIGN

_PAIRS = ((0, 1), (1, 2), (2, 0))

# Reference cyclic orientation: sign(B) = orientation * _CYCLIC_PATTERN.
_CYCLIC_PATTERN = np.array([[0, 1, -1], [-1, 0, 1], [1, -1, 0]], dtype=float)


def _frozen(a: np.ndarray) -> np.ndarray:
    out = np.array(a, dtype=float)
    out.setflags(write=False)
    return out


@dataclass(frozen=True)
class ExchangeMatrix:
    """A 3x3 skew-symmetrizable real matrix with its skew-symmetrizer.

    ``b`` holds the entries (zero diagonal), ``d`` the positive diagonal
    of D with D b skew-symmetric.  Instances are immutable; construct
    through :func:`validate`.
    """

    b: np.ndarray
    d: np.ndarray

    def entry(self, i: int, j: int) -> float:
        """b_ij with 1-based indices."""
        return float(self.b[i - 1, j - 1])

    @property
    def p(self) -> np.ndarray:
        """Matrix of p_ij = sqrt(|b_ij b_ji|)."""
        return np.sqrt(np.abs(self.b * self.b.T))

    def p_pair(self, i: int, j: int) -> float:
        """p_ij with 1-based indices."""
        return float(math.sqrt(abs(self.b[i - 1, j - 1] * self.b[j - 1, i - 1])))

    def is_skew_symmetric(self, eps: float = EPS_EQ) -> bool:
        scale = max(1.0, float(np.abs(self.b).max()))
        return float(np.abs(self.b + self.b.T).max()) <= eps * scale

    def __eq__(self, other) -> bool:  # entrywise, exact
        return (
            isinstance(other, ExchangeMatrix)
            and np.array_equal(self.b, other.b)
            and np.array_equal(self.d, other.d)
        )


def validate(raw, d=None, *, eps_sign: float = EPS_SIGN, eps_eq: float = EPS_EQ) -> ExchangeMatrix:
    """Validate a raw 3x3 array as an exchange matrix and attach a symmetrizer.

    If ``d`` is omitted: skew-symmetric input gets d = (1,1,1); otherwise a
    symmetrizer is solved from d_i b_ij = -d_j b_ji and normalized so that
    min d_i = 1.

    Raises NotSkewSymmetrizable when the sign pattern or the cyclic product
    condition |b12 b23 b31| = |b21 b32 b13| fails, NoSymmetrizer when the
    d-system is inconsistent.
    """
    b = np.array(raw, dtype=float)
    if b.shape != (3, 3) or not np.all(np.isfinite(b)):
        raise NotSkewSymmetrizable("expected a finite 3x3 real matrix")
    if np.abs(np.diag(b)).max() > eps_sign:
        raise NotSkewSymmetrizable("diagonal must be zero")
    b[np.diag_indices(3)] = 0.0

    for i, j in _PAIRS:
        scale = max(1.0, abs(b[i, j]), abs(b[j, i]))
        zi = abs(b[i, j]) <= eps_sign * scale
        zj = abs(b[j, i]) <= eps_sign * scale
        if zi != zj:
            raise NotSkewSymmetrizable(
                f"entries ({i + 1},{j + 1}) and ({j + 1},{i + 1}) must vanish jointly"
            )
        if zi:
            b[i, j] = b[j, i] = 0.0
        elif b[i, j] * b[j, i] > 0:
            raise NotSkewSymmetrizable(
                f"sign(b[{i + 1},{j + 1}]) must be -sign(b[{j + 1},{i + 1}])"
            )

    lhs = abs(b[0, 1] * b[1, 2] * b[2, 0])
    rhs = abs(b[1, 0] * b[2, 1] * b[0, 2])
    if abs(lhs - rhs) > eps_eq * max(1.0, lhs, rhs):
        raise NotSkewSymmetrizable("cyclic products |b12 b23 b31| and |b21 b32 b13| differ")

    if d is not None:
        dv = np.array(d, dtype=float)
        if dv.shape != (3,) or np.any(dv <= 0):
            raise NoSymmetrizer("d must be three positive reals")
        for i, j in _PAIRS:
            lhs_ij = dv[i] * b[i, j]
            rhs_ij = -dv[j] * b[j, i]
            if abs(lhs_ij - rhs_ij) > eps_eq * max(1.0, abs(lhs_ij), abs(rhs_ij)):
                raise NoSymmetrizer(f"d_i b_ij != -d_j b_ji at pair ({i + 1},{j + 1})")
        return ExchangeMatrix(_frozen(b), _frozen(dv))

    if float(np.abs(b + b.T).max()) <= eps_eq * max(1.0, float(np.abs(b).max())):
        return ExchangeMatrix(_frozen(b), _frozen(np.ones(3)))

    # Solve d along the graph of nonzero pairs; free components default to 1.
    dv = np.full(3, np.nan)
    for start in range(3):
        if not np.isnan(dv[start]):
            continue
        dv[start] = 1.0
        stack = [start]
        while stack:
            i = stack.pop()
            for j in range(3):
                if j == i or b[i, j] == 0.0 or not np.isnan(dv[j]):
                    continue
                dv[j] = dv[i] * abs(b[i, j]) / abs(b[j, i])
                stack.append(j)
    for i, j in _PAIRS:
        lhs_ij = dv[i] * b[i, j]
        rhs_ij = -dv[j] * b[j, i]
        if abs(lhs_ij - rhs_ij) > eps_eq * max(1.0, abs(lhs_ij), abs(rhs_ij)):
            raise NoSymmetrizer("no consistent skew-symmetrizer exists")
    dv = dv / dv.min()
    return ExchangeMatrix(_frozen(b), _frozen(dv))


def mutate(mat: ExchangeMatrix, k: int) -> ExchangeMatrix:
    """k-direction mutation; the skew-symmetrizer is unchanged."""
    if k not in (1, 2, 3):
        raise DomainError(f"direction must be 1, 2 or 3, got {k}")
    kk = k - 1
    b = mat.b
    s = np.sign(b[:, kk])
    bump = np.maximum(np.outer(b[:, kk], b[kk, :]), 0.0)
    out = b + s[:, None] * bump
    out[kk, :] = -b[kk, :]
    out[:, kk] = -b[:, kk]
    out[kk, kk] = 0.0
    return ExchangeMatrix(_frozen(out), mat.d)


def mutate_word(mat: ExchangeMatrix, word) -> ExchangeMatrix:
    """Apply mutations left to right: B^w = mu_{k_r} ... mu_{k_1}(B)."""
    for k in word:
        mat = mutate(mat, k)
    return mat


def skew_symmetrize(mat: ExchangeMatrix) -> np.ndarray:
    """Sk(B): entries sign(b_ij) * sqrt(|b_ij b_ji|); independent of D."""
    return np.sign(mat.b) * mat.p


@dataclass(frozen=True)
class SkewPairs:
    """The three pair invariants p_ij and, where defined, alpha(p_ij)."""

    p12: float
    p23: float
    p31: float

    def as_tuple(self):
        return (self.p12, self.p23, self.p31)

    def alphas(self, eps_sign: float = EPS_SIGN):
        """(alpha(p12), alpha(p23), alpha(p31)); requires every p >= 2."""
        return tuple(alpha(p, eps_sign=eps_sign) for p in self.as_tuple())


def skew_pairs(mat: ExchangeMatrix) -> SkewPairs:
    p = mat.p
    return SkewPairs(float(p[0, 1]), float(p[1, 2]), float(p[2, 0]))


def cyclic_orientation(mat: ExchangeMatrix, eps_sign: float = EPS_SIGN):
    """+1/-1 if sign(B) = +/- the reference cyclic pattern, else None."""
    b = mat.b
    for i, j in _PAIRS:
        if min(abs(b[i, j]), abs(b[j, i])) <= eps_sign * max(1.0, abs(b[i, j]), abs(b[j, i])):
            return None
    off = ~np.eye(3, dtype=bool)
    for sgn in (1.0, -1.0):
        if np.all(np.sign(b[off]) == sgn * _CYCLIC_PATTERN[off]):
            return int(sgn)
    return None


def markov_constant(mat: ExchangeMatrix, eps_sign: float = EPS_SIGN) -> float:
    """C(B) = p12^2 + p23^2 + p31^2 - p12 p23 p31 for a cyclic matrix."""
    if cyclic_orientation(mat, eps_sign) is None:
        raise NotCyclic("Markov constant is defined for cyclic matrices only")
    p12, p23, p31 = skew_pairs(mat).as_tuple()
    return p12 * p12 + p23 * p23 + p31 * p31 - p12 * p23 * p31


def markov_constant_scale(mat: ExchangeMatrix) -> float:
    """Sum of the |monomials| of C(B): the honest float resolution of C.

    C is a difference of terms that grow like the squared entries, so any
    comparison involving it must be scaled by this quantity.
    """
    p12, p23, p31 = skew_pairs(mat).as_tuple()
    return max(1.0, p12 * p12 + p23 * p23 + p31 * p31 + p12 * p23 * p31)


@dataclass(frozen=True)
class CyclicityCheck:
    """Outcome of the cluster-cyclicity test; falsy with a reason on failure."""

    ok: bool
    reason: str | None = None
    orientation: int | None = None
    markov_constant: float | None = None

    def __bool__(self) -> bool:
        return self.ok


def is_cluster_cyclic(mat: ExchangeMatrix, eps_sign: float = EPS_SIGN) -> CyclicityCheck:
    """Cluster-cyclic iff B is cyclic, every p_ij >= 2 and C(B) <= 4."""
    orientation = cyclic_orientation(mat, eps_sign)
    if orientation is None:
        return CyclicityCheck(False, "NotCyclic: sign pattern is not cyclic")
    pairs = skew_pairs(mat)
    for name, p in zip(("p12", "p23", "p31"), pairs.as_tuple()):
        if p < 2.0 - eps_sign:
            return CyclicityCheck(False, f"{name} = {p:.6g} < 2", orientation)
    c = markov_constant(mat, eps_sign)
    if c > 4.0 + eps_sign * markov_constant_scale(mat):
        return CyclicityCheck(False, f"C(B) = {c:.6g} > 4", orientation, c)
    return CyclicityCheck(True, None, orientation, c)


def require_cluster_cyclic(mat: ExchangeMatrix, eps_sign: float = EPS_SIGN) -> CyclicityCheck:
    chk = is_cluster_cyclic(mat, eps_sign)
    if not chk:
        raise NotClusterCyclic(chk.reason)
    return chk


def pseudo_cartan(mat: ExchangeMatrix, eps_sign: float = EPS_SIGN) -> np.ndarray:
    """A: diagonal 2, off-diagonal |b_ij|.  Requires a cyclic matrix."""
    if cyclic_orientation(mat, eps_sign) is None:
        raise NotCyclic("pseudo Cartan companion is defined for cyclic matrices only")
    return 2.0 * np.eye(3) + np.abs(mat.b)


def pseudo_cartan_sk(mat: ExchangeMatrix, eps_sign: float = EPS_SIGN) -> np.ndarray:
    """A-tilde: the pseudo Cartan companion of Sk(B), off-diagonals p_ij."""
    if cyclic_orientation(mat, eps_sign) is None:
        raise NotCyclic("pseudo Cartan companion is defined for cyclic matrices only")
    return 2.0 * np.eye(3) + mat.p


def alpha(p: float, eps_sign: float = EPS_SIGN) -> float:
    """alpha(p) = (p + sqrt(p^2 - 4)) / 2 for p >= 2 (clamped at 2)."""
    if p < 2.0 - eps_sign:
        raise DomainError(f"alpha(p) requires p >= 2, got {p}")
    if p <= 2.0:
        return 1.0
    return 0.5 * (p + math.sqrt(p * p - 4.0))


def chebyshev_u(n: int, p: float, eps_sign: float = EPS_SIGN) -> float:
    """u_n(p): u_{-2} = -1, u_{-1} = 0, u_{n+1} = p u_n - u_{n-1}.

    Evaluated in closed form: n + 1 at p = 2, otherwise
    (a^(n+1) - a^-(n+1)) / sqrt(p^2 - 4) with a = alpha(p).  The three-term
    recursion is the test oracle, not the production path.
    """
    if n < -2:
        raise DomainError(f"u_n is defined for n >= -2, got n = {n}")
    if p < 2.0 - eps_sign:
        raise DomainError(f"u_n(p) requires p >= 2, got {p}")
    if p <= 2.0 + eps_sign:
        return float(n + 1)
    a = alpha(p)
    m = n + 1
    return (a**m - a**-m) / math.sqrt(p * p - 4.0)


class AbsOrder(enum.Enum):
    """Entrywise |.|-comparison outcome of two matrices."""

    LEQ = "leq"
    GEQ = "geq"
    BOTH = "both"
    INCOMPARABLE = "incomparable"


def abs_compare(a: np.ndarray, b: np.ndarray, eps_sign: float = EPS_SIGN) -> AbsOrder:
    absa, absb = np.abs(np.asarray(a, float)), np.abs(np.asarray(b, float))
    slack = eps_sign * np.maximum(1.0, np.maximum(absa, absb))
    leq = bool(np.all(absa <= absb + slack))
    geq = bool(np.all(absa >= absb - slack))
    if leq and geq:
        return AbsOrder.BOTH
    if leq:
        return AbsOrder.LEQ
    if geq:
        return AbsOrder.GEQ
    return AbsOrder.INCOMPARABLE


def abs_leq(mat: ExchangeMatrix, other: ExchangeMatrix, eps_sign: float = EPS_SIGN) -> AbsOrder:
    """Preorder comparison |b_ij| vs |b'_ij|; BOTH when all pairs are equal."""
    return abs_compare(mat.b, other.b, eps_sign)


@dataclass(frozen=True)
class DecreasingSequence:
    word: tuple[int, ...]
    matrix: ExchangeMatrix
    finite: bool


def decreasing_sequence(
    mat: ExchangeMatrix, max_len: int = 64, eps_sign: float = EPS_SIGN
) -> DecreasingSequence:
    """Greedy decreasing sequence delta(B) toward the minimum matrix.

    At each step the unique direction k with mu_k(B) >= B false is applied
    (at most one such k exists).  Stops with finite=True when all three
    directions are non-decreasing, finite=False after max_len steps.
    """
    require_cluster_cyclic(mat, eps_sign)
    word: list[int] = []
    cur = mat
    for _ in range(max_len):
        down = [k for k in (1, 2, 3) if abs_leq(cur, mutate(cur, k), eps_sign) == AbsOrder.GEQ]
        if not down:
            return DecreasingSequence(tuple(word), cur, True)
        if len(down) > 1:
            raise AmbiguousDescent(
                f"directions {down} both decrease at word {word}; tolerance breakdown"
            )
        word.append(down[0])
        cur = mutate(cur, down[0])
    down = [k for k in (1, 2, 3) if abs_leq(cur, mutate(cur, k), eps_sign) == AbsOrder.GEQ]
    return DecreasingSequence(tuple(word), cur, not down)


class SurfaceKind(enum.Enum):
    TWO_SHEETS = "two_sheets"
    CYLINDER = "cylinder"
    PARALLEL_PLANES = "parallel_planes"


@dataclass(frozen=True)
class EigenData:
    """Spectral data of a pseudo Cartan companion A-tilde.

    lam is the unique positive eigenvalue, nu1 >= nu2 the non-positive
    ones, v the positive unit eigenvector of lam.
    """

    lam: float
    nu1: float
    nu2: float
    v: np.ndarray
    surface_kind: SurfaceKind


def eigen_analysis(
    a_tilde: np.ndarray, eps_sign: float = EPS_SIGN, eps_eq: float = EPS_EQ
) -> EigenData:
    """Eigen-analysis of a symmetric pseudo Cartan companion.

    lam is found by bisection on the characteristic cubic
    f(t) = (t-2)^3 - (sum p^2)(t-2) - 2 p12 p23 p31, bracketed on the left
    by 2 + sqrt(sum p^2), then polished with Newton steps.  The positive
    eigenvector comes from the closed formula; nu1, nu2 from trace and
    determinant identities.
    """
    at = np.asarray(a_tilde, dtype=float)
    scale = max(1.0, float(np.abs(at).max()))
    if np.abs(at - at.T).max() > eps_eq * scale:
        raise DomainError("a_tilde must be symmetric")
    if np.abs(np.diag(at) - 2.0).max() > eps_eq:
        raise DomainError("a_tilde must have diagonal 2")
    p12, p23, p31 = float(at[0, 1]), float(at[1, 2]), float(at[2, 0])
    c = p12 * p12 + p23 * p23 + p31 * p31 - p12 * p23 * p31
    c_scale = max(1.0, p12 * p12 + p23 * p23 + p31 * p31 + p12 * p23 * p31)
    # f(0) = -2(4 - C); positive f(0) means C > 4, outside the class.
    if -2.0 * (4.0 - c) > eps_eq * c_scale:
        raise NotClusterCyclic(f"C = {c:.6g} > 4: quadratic surface is not of bounded type")

    q2 = p12 * p12 + p23 * p23 + p31 * p31
    q3 = p12 * p23 * p31

    def f(t: float) -> float:
        s = t - 2.0
        return s * s * s - q2 * s - 2.0 * q3

    def fprime(t: float) -> float:
        s = t - 2.0
        return 3.0 * s * s - q2

    lo = 2.0 + math.sqrt(q2)
    hi = lo + 2.0 * max(p12, p23, p31) + 4.0
    while f(hi) <= 0.0:
        hi = 2.0 * hi
    while hi - lo > 1e-13 * max(1.0, hi):
        mid = 0.5 * (lo + hi)
        if f(mid) > 0.0:
            hi = mid
        else:
            lo = mid
    lam = 0.5 * (lo + hi)
    for _ in range(3):  # Newton polish
        fp = fprime(lam)
        if fp != 0.0:
            lam -= f(lam) / fp

    s = lam - 2.0
    v = np.array(
        [
            s * s + (p12 + p31) * s + p12 * p23 + p31 * p23 - p23 * p23,
            s * s + (p23 + p12) * s + p23 * p31 + p12 * p31 - p31 * p31,
            s * s + (p31 + p23) * s + p31 * p12 + p23 * p12 - p12 * p12,
        ]
    )
    if np.any(v <= 0):
        raise DomainError("positive eigenvector formula produced a non-positive component")
    v = v / np.linalg.norm(v)

    tr_rest = 6.0 - lam
    prod_rest = 2.0 * (4.0 - c) / lam  # det(A~) = 2(4 - C) = lam nu1 nu2
    disc = tr_rest * tr_rest - 4.0 * prod_rest
    disc = max(disc, 0.0)
    root = math.sqrt(disc)
    nu1 = 0.5 * (tr_rest + root)
    nu2 = 0.5 * (tr_rest - root)

    pmax = max(p12, p23, p31)
    if abs(p12 - 2.0) <= eps_sign and abs(p23 - 2.0) <= eps_sign and abs(p31 - 2.0) <= eps_sign:
        kind = SurfaceKind.PARALLEL_PLANES
    elif abs(c - 4.0) <= eps_sign * max(1.0, abs(c)) and pmax > 2.0 + eps_sign:
        kind = SurfaceKind.CYLINDER
    else:
        kind = SurfaceKind.TWO_SHEETS
    return EigenData(float(lam), float(nu1), float(nu2), _frozen(v), kind)
