"""Seed states along the reduced-word tree.

C- and G-matrix recursions in their tropical-sign form, the sign recursion
itself, K/S/T labeling, trunk/branch classification, the S/T monoid action
and its fast closed-form S-powers.

Tropical signs are state, not measurement: they are evolved by the sign
recursion, and the sign pattern of B^w is tracked as a single +/-1
orientation flag that flips per mutation.  Float signs are only read when
a seed is created from scratch, so deep recursions cannot drift.
"""

from __future__ import annotations

import math
from collections import deque
from dataclasses import dataclass

import numpy as np

from .errors import DepthExceeded, DomainError, LabelContradiction, NotBranch
from .matrices import (
    _CYCLIC_PATTERN,
    ExchangeMatrix,
    _frozen,
    alpha,
    chebyshev_u,
    cyclic_orientation,
    mutate,
    require_cluster_cyclic,
)
from .tolerances import DEPTH_CAP, EPS_SIGN
from .words import check_reduced, extensions

# Re-assert SeedState invariants after every mutation when enabled (slow).
STRICT_STATE_CHECKS = False

# Entries past this magnitude would overflow the squares and 3x3
# determinants the verifiers compute; growing past it raises DepthExceeded.
OVERFLOW_LIMIT = 1e100


@dataclass(frozen=True)
class TreePosition:
    """Location of a word in the trunk/branch decomposition.

    kind is "origin", "trunk" or "branch".  For a trunk, the word is
    [i]S^n.  For a branch, [i]S^n T suffix with suffix a word over S, T.
    """

    kind: str
    i: int | None = None
    n: int | None = None
    suffix: tuple[str, ...] | None = None

    @property
    def st_word(self) -> str | None:
        """The word in [i] + S/T coordinates, e.g. 'SST' for [i]S^2 T."""
        if self.kind == "origin":
            return None
        if self.kind == "trunk":
            return "S" * self.n
        return "S" * self.n + "T" + "".join(self.suffix)

    @property
    def t_count(self) -> int:
        """Number of T letters in the S/T word."""
        if self.kind != "branch":
            return 0
        return 1 + sum(1 for m in self.suffix if m == "T")

    def after(self, step: str) -> "TreePosition":
        if self.kind == "origin":
            raise DomainError("origin has no S/T steps")
        if step == "S":
            if self.kind == "trunk":
                return TreePosition("trunk", self.i, self.n + 1)
            return TreePosition("branch", self.i, self.n, self.suffix + ("S",))
        if step == "T":
            if self.kind == "trunk":
                return TreePosition("branch", self.i, self.n, ())
            return TreePosition("branch", self.i, self.n, self.suffix + ("T",))
        raise DomainError(f"step must be 'S' or 'T', got {step!r}")


ORIGIN = TreePosition("origin")


def _initial_kst(orientation: int, i: int) -> tuple[int, int, int]:
    # s is the unique index with sign(b^[i]_{is}) = -1, i.e. b_{is} > 0.
    s = next(j for j in (1, 2, 3) if j != i and _CYCLIC_PATTERN[i - 1, j - 1] == orientation)
    t = next(j for j in (1, 2, 3) if j != i and j != s)
    return (i, s, t)


def _kst_after(kst: tuple[int, int, int], step: str, in_trunk: bool) -> tuple[int, int, int]:
    k, s, t = kst
    if step == "S":
        return (s, k, t)
    return (t, s, k) if in_trunk else (t, k, s)


@dataclass(frozen=True)
class SeedState:
    """Full state at a reduced word w: B^w, C^w, G^w, signs and labels.

    ``kst`` is the (K, S, T) index triple, absent at the origin.
    ``orientation`` is the +/-1 flag with sign(B^w) = orientation * cyclic
    pattern.  Immutable; mutations return fresh states.
    """

    word: tuple[int, ...]
    b: ExchangeMatrix
    c: np.ndarray
    g: np.ndarray
    eps: tuple[int, int, int]
    kst: tuple[int, int, int] | None
    orientation: int
    position: TreePosition
    b0: ExchangeMatrix

    @property
    def d(self) -> np.ndarray:
        return self.b.d

    def sign_of_b(self, i: int, j: int) -> int:
        """sign(b^w_ij) from the tracked orientation, never from floats."""
        return int(self.orientation * _CYCLIC_PATTERN[i - 1, j - 1])

    def p_label(self, m: str, m2: str) -> float:
        """p^w between two of the labels 'K', 'S', 'T'."""
        idx = dict(zip("KST", self.kst))
        return self.b.p_pair(idx[m], idx[m2])

    def alpha_label(self, m: str, m2: str, eps_sign: float = EPS_SIGN) -> float:
        return alpha(self.p_label(m, m2), eps_sign)

    def g_col(self, j: int) -> np.ndarray:
        return self.g[:, j - 1]

    def c_col(self, j: int) -> np.ndarray:
        return self.c[:, j - 1]


@dataclass(frozen=True)
class ModifiedVectors:
    """Columns rescaled by 1/sqrt(d_i): C~ = C D^{-1/2}, G~ = G D^{-1/2}."""

    c_tilde: np.ndarray
    g_tilde: np.ndarray
    e_tilde: np.ndarray

    def g_col(self, j: int) -> np.ndarray:
        return self.g_tilde[:, j - 1]

    def c_col(self, j: int) -> np.ndarray:
        return self.c_tilde[:, j - 1]


def modified_vectors(seed: SeedState) -> ModifiedVectors:
    root = np.sqrt(seed.d)
    return ModifiedVectors(
        _frozen(seed.c / root[None, :]),
        _frozen(seed.g / root[None, :]),
        _frozen(np.diag(1.0 / root)),
    )


def pairing_matrix(seed: SeedState) -> np.ndarray:
    """Gram matrix <g~_i, c~_j>_D; the identity, up to float error."""
    mv = modified_vectors(seed)
    return mv.g_tilde.T @ np.diag(seed.d) @ mv.c_tilde


def duality_residual(seed: SeedState) -> float:
    """max_ij |<g~_i, c~_j>_D - delta_ij| relative to the monomial scale."""
    mv = modified_vectors(seed)
    gram = pairing_matrix(seed)
    scale = np.abs(mv.g_tilde).T @ np.diag(seed.d) @ np.abs(mv.c_tilde)
    resid = np.abs(gram - np.eye(3)) / np.maximum(1.0, scale)
    return float(resid.max())


def det_parity_residual(seed: SeedState) -> float:
    """max of |det C^w - (-1)^|w||, |det G^w - ...| relative to scale^3."""
    parity = -1.0 if len(seed.word) % 2 else 1.0
    worst = 0.0
    for m in (seed.c, seed.g):
        scale = max(1.0, float(np.abs(m).max())) ** 3
        worst = max(worst, abs(float(np.linalg.det(m)) - parity) / scale)
    return worst


def initial_seed(b: ExchangeMatrix, eps_sign: float = EPS_SIGN) -> SeedState:
    """Seed at the empty word: C = G = I, all tropical signs +1."""
    chk = require_cluster_cyclic(b, eps_sign)
    eye = _frozen(np.eye(3))
    return SeedState((), b, eye, eye, (1, 1, 1), None, chk.orientation, ORIGIN, b)


def mutate_seed(seed: SeedState, k: int, depth_cap: int = DEPTH_CAP) -> SeedState:
    """Seed at w[k].  Appending the last letter pops it (replays the parent)."""
    if k not in (1, 2, 3):
        raise DomainError(f"direction must be 1, 2 or 3, got {k}")
    if seed.word and k == seed.word[-1]:
        return replay(seed.b0, seed.word[:-1], depth_cap)
    if len(seed.word) + 1 > depth_cap:
        raise DepthExceeded(f"word length {len(seed.word) + 1} exceeds cap {depth_cap}")

    kk = k - 1
    bmat = seed.b.b
    eps_k = float(seed.eps[kk])

    coeff = np.maximum(eps_k * bmat[kk, :], 0.0)
    coeff[kk] = 0.0
    c_new = seed.c + np.outer(seed.c[:, kk], coeff)
    c_new[:, kk] = -seed.c[:, kk]

    g_new = seed.g.copy()
    g_new[:, kk] = -seed.g[:, kk] + seed.g @ np.maximum(-eps_k * bmat[:, kk], 0.0)

    b_new = mutate(seed.b, k)

    if not seed.word:
        eps_new = tuple(-1 if j == k else 1 for j in (1, 2, 3))
        kst_new = _initial_kst(seed.orientation, k)
        pos_new = TreePosition("trunk", k, 0)
    else:
        k_, s_, t_ = seed.kst
        in_trunk = seed.position.kind == "trunk"
        eps_list = list(seed.eps)
        if k == s_:
            step = "S"
            eps_list[k_ - 1] *= -1
            eps_list[s_ - 1] *= -1
        elif k == t_:
            step = "T"
            eps_list[t_ - 1] *= -1
        else:  # pragma: no cover - excluded by the pop branch above
            raise DomainError("extension letter must be S(w) or T(w)")
        eps_new = tuple(eps_list)
        kst_new = _kst_after(seed.kst, step, in_trunk)
        pos_new = seed.position.after(step)

    if (
        float(np.abs(b_new.b).max()) > OVERFLOW_LIMIT
        or float(np.abs(c_new).max()) > OVERFLOW_LIMIT
        or float(np.abs(g_new).max()) > OVERFLOW_LIMIT
    ):
        raise DepthExceeded(
            f"entries at word {seed.word + (k,)} exceed the safe magnitude {OVERFLOW_LIMIT:g}"
        )
    out = SeedState(
        seed.word + (k,),
        b_new,
        _frozen(c_new),
        _frozen(g_new),
        eps_new,
        kst_new,
        -seed.orientation,
        pos_new,
        seed.b0,
    )
    if STRICT_STATE_CHECKS:
        assert_state_consistent(out)
    return out


def replay(b0: ExchangeMatrix, word, depth_cap: int = DEPTH_CAP) -> SeedState:
    """Recompute the seed at a reduced word from the initial matrix."""
    word = check_reduced(word)
    seed = initial_seed(b0)
    for letter in word:
        seed = mutate_seed(seed, letter, depth_cap)
    return seed


def kst_labels(seed: SeedState, eps_sign: float = EPS_SIGN) -> tuple[int, int, int]:
    """(K, S, T) measured from the S-condition, as a cross-check.

    K is the last letter; S the unique index with eps_S != eps_K and
    eps_S * sign(b_KS) = -1; T the remaining one.  Raises
    LabelContradiction when zero or two candidates qualify.
    """
    if not seed.word:
        raise DomainError("labels are defined for nonempty words only")
    k = seed.word[-1]
    scale = max(1.0, float(np.abs(seed.b.b).max()))
    cands = []
    for s in (1, 2, 3):
        if s == k or seed.eps[s - 1] == seed.eps[k - 1]:
            continue
        entry = seed.b.entry(k, s)
        if abs(entry) <= eps_sign * scale:
            continue
        if seed.eps[s - 1] * (1 if entry > 0 else -1) == -1:
            cands.append(s)
    if len(cands) != 1:
        raise LabelContradiction(
            f"found {len(cands)} S-candidates at word {seed.word}: tolerance breakdown"
        )
    s = cands[0]
    t = next(j for j in (1, 2, 3) if j not in (k, s))
    return (k, s, t)


def classify_position(word, b: ExchangeMatrix, eps_sign: float = EPS_SIGN) -> TreePosition:
    """Trunk/branch decomposition of a reduced word, from the sign data alone."""
    word = check_reduced(word)
    if not word:
        return ORIGIN
    orientation = cyclic_orientation(b, eps_sign)
    if orientation is None:
        raise DomainError("position classification needs a cyclic matrix")
    kst = _initial_kst(orientation, word[0])
    pos = TreePosition("trunk", word[0], 0)
    for letter in word[1:]:
        step = "S" if letter == kst[1] else "T"
        if letter == kst[0]:
            raise DomainError(f"{word} is not reduced")
        kst = _kst_after(kst, step, pos.kind == "trunk")
        pos = pos.after(step)
    return pos


def act(seed: SeedState, st_word: str, depth_cap: int = DEPTH_CAP) -> SeedState:
    """Right monoid action: fold wS = w[S(w)], wT = w[T(w)] letter by letter."""
    if not seed.word:
        raise DomainError("the S/T action is defined on nonempty words")
    for m in st_word:
        if m == "S":
            seed = mutate_seed(seed, seed.kst[1], depth_cap)
        elif m == "T":
            seed = mutate_seed(seed, seed.kst[2], depth_cap)
        else:
            raise DomainError(f"monoid letter must be 'S' or 'T', got {m!r}")
    return seed


def s_power_fast(seed: SeedState, n: int, depth_cap: int = DEPTH_CAP) -> SeedState:
    """Seed at w S^n via the Chebyshev closed forms, bypassing iteration.

    Agreement with n-fold act(seed, "S") is the primary oracle for this
    path.
    """
    if n < 0:
        raise DomainError(f"S-power requires n >= 0, got {n}")
    if not seed.word:
        raise DomainError("the S/T action is defined on nonempty words")
    if n == 0:
        return seed
    if len(seed.word) + n > depth_cap:
        raise DepthExceeded(f"word length {len(seed.word) + n} exceeds cap {depth_cap}")

    k_, s_, t_ = seed.kst
    p = seed.p_label("S", "K")
    u = {m: chebyshev_u(m, p) for m in (n - 2, n - 1, n)}

    mv = modified_vectors(seed)
    gk, gs, gt = mv.g_col(k_), mv.g_col(s_), mv.g_col(t_)
    ck, cs, ct = mv.c_col(k_), mv.c_col(s_), mv.c_col(t_)

    gk_new = -u[n - 1] * gs + u[n] * gk
    gs_new = -u[n - 2] * gs + u[n - 1] * gk
    ck_new = -u[n - 2] * ck - u[n - 1] * cs
    cs_new = u[n - 1] * ck + u[n] * cs

    p_kt = seed.p_label("K", "T")
    p_st = seed.p_label("S", "T")
    p_st_new = -u[n - 1] * p_kt + u[n] * p_st
    p_kt_new = -u[n - 2] * p_kt + u[n - 1] * p_st

    kst_new = (k_, s_, t_) if n % 2 == 0 else (s_, k_, t_)
    flip = -1 if n % 2 else 1
    eps_list = list(seed.eps)
    eps_list[k_ - 1] *= flip
    eps_list[s_ - 1] *= flip
    orientation_new = seed.orientation * flip

    pos = seed.position
    for _ in range(n):
        pos = pos.after("S")

    word = list(seed.word)
    nxt = s_
    for _ in range(n):
        word.append(nxt)
        nxt = k_ if nxt == s_ else s_

    # Rebuild B from the pair invariants, the sign flag and D.
    kn, sn, tn = kst_new
    pmat = np.zeros((3, 3))
    for (i, j), val in (
        ((kn, sn), p),
        ((sn, tn), p_st_new),
        ((kn, tn), p_kt_new),
    ):
        pmat[i - 1, j - 1] = pmat[j - 1, i - 1] = val
    d = seed.d
    ratio = np.sqrt(d[None, :] / d[:, None])
    b_new = ExchangeMatrix(
        _frozen(orientation_new * _CYCLIC_PATTERN * pmat * ratio), seed.b.d
    )

    root = np.sqrt(d)
    g_new = seed.g.copy()
    c_new = seed.c.copy()
    for idx, gcol, ccol in ((kn, gk_new, ck_new), (sn, gs_new, cs_new), (tn, gt, ct)):
        g_new[:, idx - 1] = root[idx - 1] * gcol
        c_new[:, idx - 1] = root[idx - 1] * ccol

    return SeedState(
        tuple(word),
        b_new,
        _frozen(c_new),
        _frozen(g_new),
        tuple(eps_list),
        kst_new,
        orientation_new,
        pos,
        seed.b0,
    )


def _d_norm(x: np.ndarray, d: np.ndarray) -> float:
    return math.sqrt(float(x @ (d * x)))


def limit_directions(seed: SeedState, eps_sign: float = EPS_SIGN):
    """Unit representatives of lim g~_K^{w S^n} and lim c~_S^{w S^n}.

    The g-limit is alpha_SK g~_K - g~_S, the c-limit alpha_SK c~_S + c~_K,
    both normalized to unit D-norm.
    """
    if not seed.word:
        raise DomainError("limits of S-powers require a nonempty word")
    a = seed.alpha_label("S", "K", eps_sign)
    mv = modified_vectors(seed)
    k_, s_, _ = seed.kst
    g_lim = a * mv.g_col(k_) - mv.g_col(s_)
    c_lim = a * mv.c_col(s_) + mv.c_col(k_)
    d = seed.d
    return g_lim / _d_norm(g_lim, d), c_lim / _d_norm(c_lim, d)


def iter_seeds(b0: ExchangeMatrix, depth: int, root_word=(), depth_cap: int | None = None):
    """Breadth-first seeds u >= root_word with |u| <= depth, root included."""
    cap = depth_cap if depth_cap is not None else max(DEPTH_CAP, depth)
    root = replay(b0, root_word, cap)
    queue = deque([root])
    while queue:
        seed = queue.popleft()
        yield seed
        if len(seed.word) < depth:
            for letter in extensions(seed.word):
                queue.append(mutate_seed(seed, letter, cap))


def branch_root_seed(b0: ExchangeMatrix, i: int, n: int, depth_cap: int = DEPTH_CAP) -> SeedState:
    """Seed at the maximal-branch root [i] S^n T."""
    seed = mutate_seed(initial_seed(b0), i, depth_cap)
    seed = s_power_fast(seed, n, depth_cap)
    return act(seed, "T", depth_cap)


def mutate_cg_general(b0: ExchangeMatrix, seed_b: ExchangeMatrix, c: np.ndarray, g: np.ndarray, k: int):
    """One step of the sign-free C/G recursion; cross-check oracle only.

    The production path is the tropical-sign form in mutate_seed; this
    entrywise variant needs no sign bookkeeping and is used to validate it.
    """
    kk = k - 1
    bw = seed_b.b
    c_new = c.copy()
    g_new = g.copy()
    for j in range(3):
        if j == kk:
            c_new[:, j] = -c[:, kk]
        else:
            c_new[:, j] = (
                c[:, j]
                + c[:, kk] * max(bw[kk, j], 0.0)
                + np.maximum(-c[:, kk], 0.0) * bw[kk, j]
            )
    g_new[:, kk] = -g[:, kk] + g @ np.maximum(bw[:, kk], 0.0) - b0.b @ np.maximum(c[:, kk], 0.0)
    return c_new, g_new


def assert_state_consistent(seed: SeedState, eps_sign: float = EPS_SIGN, eps_eq: float = 1e-7):
    """Re-assert the SeedState invariants (debug aid, used in tests)."""
    n = len(seed.word)
    parity = -1.0 if n % 2 else 1.0
    for name, m in (("C", seed.c), ("G", seed.g)):
        det = float(np.linalg.det(m))
        scale = max(1.0, float(np.abs(m).max())) ** 3
        if abs(det - parity) > eps_eq * scale:
            raise AssertionError(f"det {name}^w = {det}, expected {parity}")
    # column sign coherence of C, agreeing with the tracked signs
    for j in range(3):
        col = seed.c[:, j]
        scale = max(1.0, float(np.abs(col).max()))
        lo, hi = float(col.min()), float(col.max())
        if lo < -eps_sign * scale and hi > eps_sign * scale:
            raise AssertionError(f"c-column {j + 1} is not sign-coherent at {seed.word}")
        if max(abs(lo), abs(hi)) <= eps_sign * scale:
            raise AssertionError(f"c-column {j + 1} vanished at {seed.word}")
        measured = 1 if hi > eps_sign * scale else -1
        if measured != seed.eps[j]:
            raise AssertionError(f"tracked eps {seed.eps[j]} != measured {measured}")
    gram = pairing_matrix(seed)
    resid = np.abs(gram - np.eye(3))
    scale = max(1.0, float(np.abs(seed.g).max() * np.abs(seed.c).max() * seed.d.max()))
    if float(resid.max()) > eps_eq * scale:
        raise AssertionError(f"duality failed at {seed.word}: residual {resid.max()}")
    if seed.word:
        if kst_labels(seed, eps_sign) != seed.kst:
            raise AssertionError(f"tracked kst {seed.kst} disagrees with measurement")


def eps_closed_form(seed: SeedState) -> tuple[int, int, int]:
    """Expected tropical signs from the trunk/branch closed form."""
    pos = seed.position
    if pos.kind == "origin":
        return (1, 1, 1)
    k_, s_, t_ = seed.kst
    out = [0, 0, 0]
    if pos.kind == "trunk":
        out[k_ - 1], out[s_ - 1], out[t_ - 1] = -1, 1, 1
    else:
        sgn = (-1) ** pos.t_count
        out[k_ - 1], out[t_ - 1] = sgn, sgn
        out[s_ - 1] = -sgn
    return tuple(out)


def seed_record(seed: SeedState) -> dict:
    """JSON-ready record of a seed, one line of the streaming dump format."""
    pos = seed.position
    return {
        "word": list(seed.word),
        "st": None if pos.kind == "origin" else {"i": pos.i, "word": pos.st_word},
        "b": seed.b.b.tolist(),
        "d": seed.d.tolist(),
        "c": seed.c.tolist(),
        "g": seed.g.tolist(),
        "eps": list(seed.eps),
        "kst": list(seed.kst) if seed.kst else None,
        "position": {
            "kind": pos.kind,
            "i": pos.i,
            "n": pos.n,
            "suffix": list(pos.suffix) if pos.suffix is not None else None,
        },
    }
