"""Executable verifiers for the structure theorems.

Every checker walks the word tree to a requested depth and returns a
Report; with strict=True a hard violation raises ViolationFound instead.
Strictly-positive side assertions compare against a float noise floor
rather than EPS_SIGN, because the true margins shrink geometrically with
depth while roundoff stays near 1e-16 of the term scale.  Pairings whose
relative size falls below the floor are counted as indeterminate, never
as violations.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .bounds import (
    LocalBound,
    QuadrantClass,
    TrunkSupport,
    frak_c,
    global_bound,
    initial_bound,
    local_bound,
    trunk_p_values,
    trunk_support,
)
from .cones import angular_gap, ray_direction
from .errors import DuplicateFound, SignMismatch, ViolationFound
from .matrices import (
    AbsOrder,
    ExchangeMatrix,
    abs_leq,
    alpha,
    chebyshev_u,
    mutate,
    require_cluster_cyclic,
)
from .sampling import interior_points
from .seeds import (
    SeedState,
    _initial_kst,
    branch_root_seed,
    initial_seed,
    iter_seeds,
    modified_vectors,
    mutate_seed,
)
from .tolerances import EPS_EQ, EPS_SIGN

# Relative thresholds for side-of-plane decisions on normalized pairings.
WEAK_TOL = 1e-12
STRICT_FLOOR = 1e-13


@dataclass
class Violation:
    check: str
    message: str
    word: tuple | None = None
    data: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {
            "check": self.check,
            "message": self.message,
            "word": list(self.word) if self.word is not None else None,
            "data": {k: _plain(v) for k, v in self.data.items()},
        }


def _plain(v):
    if isinstance(v, np.ndarray):
        return v.tolist()
    if isinstance(v, (np.floating, np.integer)):
        return v.item()
    if isinstance(v, tuple):
        return list(v)
    return v


@dataclass
class Report:
    check: str
    ok: bool
    stats: dict = field(default_factory=dict)
    violations: list[Violation] = field(default_factory=list)
    notes: list[str] = field(default_factory=list)

    def add(self, violation: Violation):
        self.violations.append(violation)
        self.ok = False

    def raise_for_violations(self, exc=ViolationFound):
        if not self.ok:
            first = self.violations[0] if self.violations else None
            msg = first.message if first else f"{self.check} failed"
            raise exc(f"{self.check}: {msg}", report=self)

    def to_dict(self) -> dict:
        return {
            "check": self.check,
            "ok": self.ok,
            "stats": {k: _plain(v) for k, v in self.stats.items()},
            "violations": [v.to_dict() for v in self.violations],
            "notes": list(self.notes),
        }

    def lines(self):
        status = "ok" if self.ok else "VIOLATED"
        yield f"[{status}] {self.check}"
        for k, v in self.stats.items():
            yield f"    {k}: {_plain(v)}"
        for n in self.notes:
            yield f"    note: {n}"
        for v in self.violations[:20]:
            yield f"    violation at {list(v.word) if v.word else '-'}: {v.message}"
        if len(self.violations) > 20:
            yield f"    ... {len(self.violations) - 20} more violations"


def _pairing(x: np.ndarray, normal: np.ndarray, d: np.ndarray):
    """(value, relative value) of <x, normal>_D with the monomial scale."""
    terms = x * d * normal
    value = float(terms.sum())
    scale = max(1.0, float(np.abs(terms).sum()))
    return value, value / scale


class _Side:
    """Accumulates side-of-plane evidence for one certified inclusion."""

    def __init__(self, report: Report, word, label: str):
        self.report = report
        self.word = tuple(word) if word is not None else None
        self.label = label
        self.indeterminate = 0

    def expect(self, x, normal, d, side: str, strict: bool):
        _, rel = _pairing(np.asarray(x, float), normal, d)
        signed = rel if side == "+" else -rel
        if strict:
            if signed <= STRICT_FLOOR:
                if abs(rel) <= STRICT_FLOOR:
                    self.indeterminate += 1
                else:
                    self.report.add(
                        Violation(
                            self.report.check,
                            f"{self.label}: expected strict {side} side, got {rel:.3e}",
                            self.word,
                            {"relative_pairing": rel},
                        )
                    )
        elif signed < -WEAK_TOL:
            self.report.add(
                Violation(
                    self.report.check,
                    f"{self.label}: expected weak {side} side, got {rel:.3e}",
                    self.word,
                    {"relative_pairing": rel},
                )
            )


def check_global_bound(
    b: ExchangeMatrix,
    i: int,
    depth: int,
    eps_sign: float = EPS_SIGN,
    eps_eq: float = EPS_EQ,
    strict: bool = False,
) -> Report:
    """All modified g-vectors after [i] lie on the positive sheet H_i^+."""
    report = Report("global-bound", True)
    qb = global_bound(b, i, eps_sign, eps_eq)
    max_resid = 0.0
    min_pairing = np.inf
    count = 0
    for seed in iter_seeds(b, depth, root_word=(i,)):
        mv = modified_vectors(seed)
        for l in (1, 2, 3):
            ok, resid, pairing = qb.in_h_plus(mv.g_col(l), eps_sign, eps_eq)
            count += 1
            max_resid = max(max_resid, resid)
            min_pairing = min(min_pairing, pairing)
            if not ok:
                report.add(
                    Violation(
                        "global-bound",
                        f"g~_{l} off H_{i}^+: residual {resid:.3e}, pairing {pairing:.3e}",
                        seed.word,
                        {"column": l, "residual": resid, "pairing": pairing},
                    )
                )
    report.stats = {
        "direction": i,
        "depth": depth,
        "vectors": count,
        "max_surface_residual": max_resid,
        "min_pairing": float(min_pairing),
    }
    if strict:
        report.raise_for_violations()
    return report


def _local_bound_invariants(report: Report, seed: SeedState, lb: LocalBound, eps_eq: float):
    mv = modified_vectors(seed)
    gk = mv.g_col(seed.kst[0])
    for name, normal in (("limit-S", lb.planes[0]), ("limit-T", lb.planes[1]), ("cbar", lb.cbar)):
        _, rel = _pairing(lb.gbar, normal, lb.d)
        if abs(rel) > eps_eq:
            report.add(
                Violation(
                    report.check,
                    f"<gbar, {name}> = {rel:.3e}, expected 0",
                    seed.word,
                    {"relative_pairing": rel},
                )
            )
    # g~_K pairs to exactly 1 with each bounding plane, by duality
    side = _Side(report, seed.word, "g~_K interior")
    for normal in lb.planes:
        side.expect(gk, normal, lb.d, "+", strict=True)


def check_local_bounds(
    b: ExchangeMatrix,
    i: int,
    depth: int,
    eps_sign: float = EPS_SIGN,
    eps_eq: float = EPS_EQ,
    samples: int = 64,
    sample_seed: int = 0,
    strict: bool = False,
) -> Report:
    """Branch bounds contain their branches, nest, and split by the cbar plane."""
    report = Report("local-bound", True)
    branch_count = 0
    membership_checks = 0

    def walk(seed: SeedState, bounds: tuple):
        nonlocal branch_count, membership_checks
        mv = modified_vectors(seed)
        for lb in bounds:
            for l in (1, 2, 3):
                membership_checks += 1
                if not lb.closure_contains(mv.g_col(l), max(eps_sign, WEAK_TOL)):
                    report.add(
                        Violation(
                            "local-bound",
                            f"g~_{l} escapes the bound rooted at {list(lb.word)}",
                            seed.word,
                            {"column": l, "bound_word": lb.word},
                        )
                    )
        new_bounds = bounds
        if seed.position.kind == "branch":
            lb = local_bound(seed, eps_sign)
            branch_count += 1
            _local_bound_invariants(report, seed, lb, eps_eq)
            if bounds:
                parent = bounds[-1]
                for gen in lb.generators.T:
                    membership_checks += 1
                    if not parent.closure_contains(gen, max(eps_sign, WEAK_TOL)):
                        report.add(
                            Violation(
                                "local-bound",
                                f"bound at {list(seed.word)} leaves its parent "
                                f"{list(parent.word)}",
                                seed.word,
                            )
                        )
            new_bounds = bounds + (lb,)
            if len(seed.word) < depth:
                _check_split(report, seed, lb, samples, sample_seed, eps_sign)
        if len(seed.word) < depth:
            from .words import extensions

            for letter in extensions(seed.word):
                walk(mutate_seed(seed, letter), new_bounds)

    root = mutate_seed(initial_seed(b, eps_sign), i)
    walk(root, ())
    report.stats = {
        "direction": i,
        "depth": depth,
        "branch_seeds": branch_count,
        "membership_checks": membership_checks,
    }
    if strict:
        report.raise_for_violations()
    return report


def _check_split(
    report: Report, seed: SeedState, lb: LocalBound, samples: int, sample_seed: int, eps_sign: float
):
    """V°^{wS} and V°^{wT} sit strictly on opposite sides of the cbar plane."""
    child_s = mutate_seed(seed, seed.kst[1])
    child_t = mutate_seed(seed, seed.kst[2])
    lb_s = local_bound(child_s, eps_sign)
    lb_t = local_bound(child_t, eps_sign)
    d = lb.d
    side = _Side(report, seed.word, "cbar-split")
    for gen in lb_s.generators.T:
        side.expect(gen, lb.cbar, d, "-", strict=False)
    for gen in lb_t.generators.T:
        side.expect(gen, lb.cbar, d, "+", strict=False)
    for x in interior_points(lb_s.generators, samples, sample_seed):
        side.expect(x, lb.cbar, d, "-", strict=True)
    for x in interior_points(lb_t.generators, samples, sample_seed + 1):
        side.expect(x, lb.cbar, d, "+", strict=True)


@dataclass(frozen=True)
class _RegionSpec:
    """One open region with its generators, for the separateness table."""

    name: str
    kind: str  # "trunk" | "branch"
    i: int
    n: int | None
    generators: np.ndarray


def _separation_certificate(b, spec_a: _RegionSpec, spec_b: _RegionSpec, eps_sign: float):
    """(normal, side of A) certified by the structure lemmas, or None."""
    d = b.d
    e = np.diag(1.0 / np.sqrt(d))

    def frame(i):
        chk = require_cluster_cyclic(b, eps_sign)
        return _initial_kst(chk.orientation, i)

    a, bb = spec_a, spec_b
    if a.kind == "trunk" and bb.kind == "trunk":
        return e[:, a.i - 1], "-"
    if a.kind == "trunk":
        a, bb = bb, a
        swapped = True
    else:
        swapped = False
    k0, s0, t0 = frame(a.i)
    if bb.kind == "trunk":
        j = bb.i
        if j in (a.i, s0):
            normal = e[:, t0 - 1]
        else:  # j == t0
            normal = e[:, k0 - 1] + e[:, t0 - 1]
        side = "-"
    elif a.i == bb.i:
        big = max(a.n, bb.n)
        normal = frak_c(b, a.i, big, "-", eps_sign)
        side = "+" if a.n == big else "-"
    else:
        j = bb.i
        if j == s0:
            # in j's frame, a.i plays the t0 role; swap and reuse the rule
            normal, other_side = _separation_certificate(b, spec_b, spec_a, eps_sign)
            return normal, ("+" if other_side == "-" else "-")
        pkt = b.p_pair(k0, t0)
        normal = e[:, k0 - 1] + alpha(pkt, eps_sign) * e[:, t0 - 1]
        side = "-"
    if swapped:
        side = "+" if side == "-" else "-"
    return normal, side


def check_separateness(
    b: ExchangeMatrix,
    depth: int,
    eps_sign: float = EPS_SIGN,
    samples: int = 64,
    sample_seed: int = 0,
    strict: bool = False,
) -> Report:
    """Trunk interiors and maximal-branch bounds are pairwise disjoint."""
    report = Report("separateness", True)
    require_cluster_cyclic(b, eps_sign)
    regions: list[_RegionSpec] = []
    for i in (1, 2, 3):
        ts = trunk_support(b, i, eps_sign)
        regions.append(_RegionSpec(f"T_{i}", "trunk", i, None, ts.generators))
        for n in range(depth + 1):
            root = branch_root_seed(b, i, n)
            lb = local_bound(root, eps_sign)
            regions.append(_RegionSpec(f"V_{i},{n}", "branch", i, n, lb.generators))

    pair_count = 0
    indeterminate = 0
    for ai in range(len(regions)):
        for bi in range(ai + 1, len(regions)):
            ra, rb = regions[ai], regions[bi]
            cert = _separation_certificate(b, ra, rb, eps_sign)
            if cert is None:  # pragma: no cover - all cases are certified
                report.add(Violation("separateness", f"no certificate for {ra.name} vs {rb.name}"))
                continue
            normal, side_a = cert
            side_b = "+" if side_a == "-" else "-"
            pair_count += 1
            side = _Side(report, None, f"{ra.name} vs {rb.name}")
            for gen in ra.generators.T:
                side.expect(gen, normal, b.d, side_a, strict=False)
            for gen in rb.generators.T:
                side.expect(gen, normal, b.d, side_b, strict=False)
            for x in interior_points(ra.generators, samples, sample_seed):
                side.expect(x, normal, b.d, side_a, strict=True)
            for x in interior_points(rb.generators, samples, sample_seed + 1):
                side.expect(x, normal, b.d, side_b, strict=True)
            indeterminate += side.indeterminate
    report.stats = {
        "depth": depth,
        "regions": len(regions),
        "pairs": pair_count,
        "indeterminate_pairings": indeterminate,
    }
    if strict:
        report.raise_for_violations()
    return report


def _canonical_key(word: tuple, col: int) -> tuple:
    w = list(word)
    while w and w[-1] != col:
        w.pop()
    return (tuple(w), col)


def check_nonperiodicity(
    b: ExchangeMatrix,
    depth: int,
    eps_sign: float = EPS_SIGN,
    angle_eps: float | None = None,
    strict: bool = False,
) -> Report:
    """Distinct trivial-equality classes of g-vectors span distinct rays."""
    report = Report("non-periodicity", True)
    tol = eps_sign if angle_eps is None else angle_eps
    classes: dict[tuple, np.ndarray] = {}
    for seed in iter_seeds(b, depth):
        mv = modified_vectors(seed)
        for l in (1, 2, 3):
            key = _canonical_key(seed.word, l)
            if key not in classes:
                classes[key] = ray_direction(mv.g_col(l))
    keys = list(classes)
    rays = np.array([classes[k] for k in keys])
    dots = rays @ rays.T
    n = len(keys)
    iu = np.triu_indices(n, k=1)
    # coarse prefilter: only near-parallel pairs need the exact cross
    # product; widen it when the requested tolerance is coarse
    near_band = max(1e-4, min(2.0, 2.0 * tol * tol))
    near = dots[iu] > 1.0 - near_band
    min_gap = np.inf
    if np.any(~near):
        min_gap = float(np.arccos(np.clip(dots[iu][~near].max(), -1.0, 1.0)))
    for a, bj in zip(iu[0][near], iu[1][near]):
        gap = angular_gap(rays[a], rays[bj])
        min_gap = min(min_gap, gap)
        if gap <= tol:
            report.add(
                Violation(
                    "non-periodicity",
                    f"classes {keys[a]} and {keys[bj]} share a ray (gap {gap:.3e})",
                    keys[a][0],
                    {"other": keys[bj], "gap": gap},
                )
            )
    report.stats = {
        "depth": depth,
        "classes": n,
        "min_angular_gap": float(min_gap),
        "angle_eps": tol,
    }
    if strict:
        report.raise_for_violations(DuplicateFound)
    return report


_SIGN_TABLE = {
    "trunk": (-1, 1, 1),  # [i]S^n
    "s_branch": (-1, 1, -1),  # [i]S^{n+1}TX
    "t_trunk": (-1, 1, -1),  # [i]TS^n
    "t_branch": (1, 1, -1),  # [i]TS^nTX
}


def _table_shape(position) -> str:
    if position.kind == "trunk":
        return "trunk"
    if position.n >= 1:
        return "s_branch"
    if "T" not in position.suffix:
        return "t_trunk"
    return "t_branch"


def check_sign_table(
    b: ExchangeMatrix,
    i: int,
    depth: int,
    eps_sign: float = EPS_SIGN,
    strict: bool = False,
) -> Report:
    """Row signs of G^w follow the four-column sign table after [i]."""
    report = Report("sign-table", True)
    chk = require_cluster_cyclic(b, eps_sign)
    k0, s0, t0 = _initial_kst(chk.orientation, i)
    counts = dict.fromkeys(_SIGN_TABLE, 0)
    whitelisted = 0
    for seed in iter_seeds(b, depth, root_word=(i,)):
        shape = _table_shape(seed.position)
        counts[shape] += 1
        expected = dict(zip((k0, s0, t0), _SIGN_TABLE[shape]))
        scale = max(1.0, float(np.abs(seed.g).max()))
        for row in (1, 2, 3):
            entries = seed.g[row - 1, :]
            has_pos = bool(np.any(entries > eps_sign * scale))
            has_neg = bool(np.any(entries < -eps_sign * scale))
            if has_pos and has_neg:
                report.add(
                    Violation(
                        "sign-table",
                        f"row {row} of G^w is not sign-coherent",
                        seed.word,
                        {"row": row, "entries": entries},
                    )
                )
                continue
            observed = 1 if has_pos else -1 if has_neg else 0
            if observed != 0 and observed != expected[row]:
                report.add(
                    Violation(
                        "sign-table",
                        f"row {row} sign {observed:+d} contradicts table column {shape}",
                        seed.word,
                        {"row": row, "shape": shape, "entries": entries},
                    )
                )
        # corollary: s0-components never negative, t0-components never
        # positive except the trunk unit vector e_{t0} itself
        mv = modified_vectors(seed)
        for l in (1, 2, 3):
            col = mv.g_col(l)
            cscale = max(1.0, float(np.abs(col).max()))
            if col[s0 - 1] < -eps_sign * cscale:
                report.add(
                    Violation(
                        "sign-table", f"s0-component of g~_{l} negative", seed.word, {"column": l}
                    )
                )
            if col[t0 - 1] > eps_sign * cscale:
                unit = np.zeros(3)
                unit[t0 - 1] = 1.0 / np.sqrt(seed.d[t0 - 1])
                if seed.position.kind == "trunk" and np.allclose(col, unit):
                    whitelisted += 1
                else:
                    report.add(
                        Violation(
                            "sign-table",
                            f"t0-component of g~_{l} positive off the trunk unit ray",
                            seed.word,
                            {"column": l},
                        )
                    )
    report.stats = {
        "direction": i,
        "depth": depth,
        "shape_counts": counts,
        "whitelisted_t0_vectors": whitelisted,
    }
    if strict:
        report.raise_for_violations(SignMismatch)
    return report


def check_monotonicity(
    b: ExchangeMatrix,
    i: int,
    depth: int,
    eps_sign: float = EPS_SIGN,
    strict: bool = False,
) -> Report:
    """abs(g_j) grows entrywise along the tree when mu_i(B) >= B.

    Violations found while the precondition fails are expected
    counterexample data and do not fail the report.
    """
    report = Report("monotonicity", True)
    precondition = abs_leq(b, mutate(b, i), eps_sign) in (AbsOrder.LEQ, AbsOrder.BOTH)
    violations: list[Violation] = []
    pair_count = 0
    for seed in iter_seeds(b, depth - 1, root_word=(i,)):
        from .words import extensions

        for letter in extensions(seed.word):
            child = mutate_seed(seed, letter)
            pair_count += 1
            old = np.abs(seed.g[:, letter - 1])
            new = np.abs(child.g[:, letter - 1])
            slack = eps_sign * np.maximum(1.0, np.maximum(old, new))
            drops = np.nonzero(new < old - slack)[0]
            for row in drops:
                violations.append(
                    Violation(
                        "monotonicity",
                        f"|g| entry ({row + 1},{letter}) drops "
                        f"{old[row]:.6g} -> {new[row]:.6g}",
                        child.word,
                        {
                            "row": int(row + 1),
                            "column": letter,
                            "parent_value": float(old[row]),
                            "child_value": float(new[row]),
                        },
                    )
                )

    # sufficient-condition inequalities for the monotonicity after [i]
    chk = require_cluster_cyclic(b, eps_sign)
    k0, s0, t0 = _initial_kst(chk.orientation, i)
    pks = b.p_pair(k0, s0)
    sufficient_ok = True
    margins = []
    root = mutate_seed(initial_seed(b, eps_sign), i)
    seed_t = mutate_seed(root, root.kst[2])
    p_prime = seed_t.p_label("S", "K")
    pkt_t = seed_t.p_label("K", "T")
    pst_t = seed_t.p_label("S", "T")
    for n in range(depth + 1):
        _, _, p_st = trunk_p_values(b, i, n + 1, eps_sign)
        lhs1 = p_st * chebyshev_u(n, pks) - chebyshev_u(n + 1, pks)
        u2 = chebyshev_u(n + 1, p_prime)
        p_kt_ts = -chebyshev_u(n - 2, p_prime) * pkt_t + chebyshev_u(n - 1, p_prime) * pst_t
        lhs2 = p_kt_ts * u2 - pks - u2
        margins.append((lhs1, lhs2))
        scale1 = max(1.0, abs(p_st * chebyshev_u(n, pks)), chebyshev_u(n + 1, pks))
        scale2 = max(1.0, abs(p_kt_ts * u2), u2)
        if lhs1 < -eps_sign * scale1 or lhs2 < -eps_sign * scale2:
            sufficient_ok = False

    report.stats = {
        "direction": i,
        "depth": depth,
        "precondition_mu_i_geq": precondition,
        "parent_child_pairs": pair_count,
        "violations_found": len(violations),
        "sufficient_condition_ok": sufficient_ok,
        "min_sufficient_margins": [
            float(min(m[0] for m in margins)),
            float(min(m[1] for m in margins)),
        ],
    }
    if precondition:
        for v in violations:
            report.add(v)
    else:
        report.notes.append(
            "precondition mu_i(B) >= B fails; violations reported as expected data"
        )
        report.stats["expected_counterexamples"] = [v.to_dict() for v in violations[:10]]
    if strict:
        report.raise_for_violations()
    return report


def check_simplified_bound(
    b: ExchangeMatrix,
    depth: int,
    eps_sign: float = EPS_SIGN,
    eps_eq: float = EPS_EQ,
    strict: bool = False,
) -> Report:
    """All g-vectors after eligible directions lie in Q_initial^+."""
    report = Report("simplified-bound", True)
    qb0 = initial_bound(b, eps_sign, eps_eq)
    directions = [
        i for i in (1, 2, 3) if abs_leq(b, mutate(b, i), eps_sign) in (AbsOrder.LEQ, AbsOrder.BOTH)
    ]
    if len(directions) == 3:
        report.notes.append("matrix is minimum: whole fan checked")
    else:
        report.notes.append(f"non-minimum matrix: restricted to directions {directions}")
    min_quadform = np.inf
    min_pairing = np.inf
    count = 0
    indeterminate = 0
    for i in directions:
        qb_i = global_bound(b, i, eps_sign, eps_eq)
        for seed in iter_seeds(b, depth, root_word=(i,)):
            mv = modified_vectors(seed)
            for l in (1, 2, 3):
                x = mv.g_col(l)
                count += 1
                q0 = qb0.quadform(x) / qb0.quadform_scale(x)
                p0 = qb0.v_pairing(x) / max(np.linalg.norm(np.sqrt(b.d) * x), eps_sign)
                min_quadform = min(min_quadform, q0)
                min_pairing = min(min_pairing, p0)
                # membership margins shrink below float resolution for
                # fast-growing matrices; only resolvable exits count
                if q0 < -STRICT_FLOOR or p0 < -STRICT_FLOOR:
                    report.add(
                        Violation(
                            "simplified-bound",
                            f"g~_{l} outside Q_initial^+",
                            seed.word,
                            {"column": l, "quadform_rel": q0, "pairing_rel": p0},
                        )
                    )
                elif q0 <= STRICT_FLOOR:
                    indeterminate += 1
                ok, resid, _ = qb_i.in_h_plus(x, eps_sign, eps_eq)
                if not ok:
                    report.add(
                        Violation(
                            "simplified-bound",
                            f"direction-{i} cross-check failed (residual {resid:.3e})",
                            seed.word,
                            {"column": l},
                        )
                    )
    report.stats = {
        "depth": depth,
        "directions": directions,
        "vectors": count,
        "indeterminate_memberships": indeterminate,
        "min_quadform_rel": float(min_quadform),
        "min_pairing_rel": float(min_pairing),
    }
    if indeterminate:
        report.notes.append(
            "some membership margins fall below float resolution and were not certified"
        )
    if strict:
        report.raise_for_violations()
    return report


def check_fan_structure(
    b: ExchangeMatrix,
    depth: int,
    eps_sign: float = EPS_SIGN,
    strict: bool = False,
) -> Report:
    """Pairwise, depth-limited: G-cones intersect in common faces.

    LP-free: shared generators are identified by trivial-equality class,
    and each pair is certified by a plane through the shared face whose
    normal is a dual c-vector (or a nonnegative combination of two), with
    the cones weakly on opposite sides.
    """
    report = Report("fan-structure", True)
    seeds = list(iter_seeds(b, depth))
    data = []
    for seed in seeds:
        mv = modified_vectors(seed)
        keys = tuple(_canonical_key(seed.word, l) for l in (1, 2, 3))
        gens = mv.g_tilde / np.linalg.norm(mv.g_tilde, axis=0, keepdims=True)
        normals = seed.d[:, None] * mv.c_tilde  # Euclidean inward normals
        normals = normals / np.linalg.norm(normals, axis=0, keepdims=True)
        data.append((seed.word, keys, gens, normals))

    n = len(data)
    gens_all = np.stack([g for (_, _, g, _) in data])
    normals_all = np.stack([m for (_, _, _, m) in data])
    # vals[a, b, l, j] = <gen l of cone b, normal j of cone a> (Euclidean)
    vals = np.einsum("bkl,akj->ablj", gens_all, normals_all)
    # a single strictly separating bounding plane certifies intersection {0}
    separated = np.any(np.all(vals < -WEAK_TOL, axis=2), axis=2)
    fast_ok = separated | separated.T

    checked = 0
    indeterminate = 0
    for ai in range(n):
        wa, ka, ga, na = data[ai]
        for bi in range(ai + 1, n):
            checked += 1
            if fast_ok[ai, bi]:
                continue
            wb, kb, gb, nb = data[bi]
            shared_a = [l for l in range(3) if ka[l] in kb]
            shared_b = [l for l in range(3) if kb[l] in ka]
            status = _pair_certificate(ga, na, shared_a, gb, nb, shared_b)
            if status == "indeterminate":
                indeterminate += 1
            elif status == "fail":
                report.add(
                    Violation(
                        "fan-structure",
                        f"cones at {list(wa)} and {list(wb)} lack a common-face certificate",
                        wa,
                        {"other": list(wb), "shared": len(shared_a)},
                    )
                )
    report.stats = {
        "depth": depth,
        "cones": len(data),
        "pairs": checked,
        "indeterminate_pairs": indeterminate,
    }
    if indeterminate:
        report.notes.append(
            "some deep cone pairs are below float resolution and were not certified"
        )
    if strict:
        report.raise_for_violations()
    return report


def _ray_vs_cone(gens_self: np.ndarray, ray: np.ndarray) -> str:
    """'inside', 'outside' or 'indeterminate' for a unit ray vs a unit-gen cone."""
    scale = abs(float(np.linalg.det(gens_self)))
    if scale < 1e-14:
        return "indeterminate"
    coef = np.linalg.solve(gens_self, ray)
    rel = coef / max(1.0, float(np.abs(coef).max()))
    if np.all(rel > 1e-7):
        return "inside"
    if np.any(rel < -1e-7):
        return "outside"
    return "indeterminate"


def _sides_certify(values_other, shared_other, gens_other, gens_self, tol: float) -> str:
    """'ok', 'indeterminate' or 'fail' for one candidate plane.

    Every other-cone generator must sit weakly on the nonpositive side;
    a non-shared generator that lands on the plane must stay outside the
    self cone, else the intersection exceeds the shared face.
    """
    status = "ok"
    for l in range(3):
        v = float(values_other[l])
        if l in shared_other:
            if abs(v) > tol:
                return "fail"
            continue
        if v > tol:
            return "fail"
        if abs(v) <= tol:
            where = _ray_vs_cone(gens_self, gens_other[:, l])
            if where == "inside":
                return "fail"
            if where == "indeterminate":
                status = "indeterminate"
    return status


def _certificate_candidates(normals: np.ndarray, non_shared, gens_other: np.ndarray, tol: float):
    """Candidate separating normals supported on the non-shared dual rays."""
    ns = [normals[:, l] for l in non_shared]
    cands = list(ns)
    if len(ns) >= 2:
        cands.append(sum(ns))
    if len(ns) == 2:
        v1 = gens_other.T @ ns[0]
        v2 = gens_other.T @ ns[1]
        for l in range(3):
            lam, mu = float(v2[l]), float(-v1[l])
            if lam < 0 or mu < 0:
                lam, mu = -lam, -mu
            if lam >= -tol and mu >= -tol and abs(lam) + abs(mu) > tol:
                cands.append(max(lam, 0.0) * ns[0] + max(mu, 0.0) * ns[1])
    if len(ns) == 3:
        mat = np.column_stack(ns)
        for l1 in range(3):
            for l2 in range(l1 + 1, 3):
                cross = np.cross(gens_other[:, l1], gens_other[:, l2])
                for cand in (cross, -cross):
                    if np.linalg.norm(cand) <= tol:
                        continue
                    if abs(np.linalg.det(mat)) < 1e-14:
                        continue
                    coef = np.linalg.solve(mat, cand)
                    if np.all(coef >= -1e-9 * max(1.0, float(np.abs(coef).max()))):
                        cands.append(cand)
        for a in range(3):
            for b in range(a + 1, 3):
                sub = np.column_stack([ns[a], ns[b]])
                v1 = gens_other.T @ ns[a]
                v2 = gens_other.T @ ns[b]
                for l in range(3):
                    lam, mu = float(v2[l]), float(-v1[l])
                    if lam < 0 or mu < 0:
                        lam, mu = -lam, -mu
                    if lam >= -tol and mu >= -tol and abs(lam) + abs(mu) > tol:
                        cands.append(max(lam, 0.0) * ns[a] + max(mu, 0.0) * ns[b])
    return cands


def _pair_certificate(ga, na, shared_a, gb, nb, shared_b, tol: float = WEAK_TOL) -> str:
    if len(shared_a) == 3 or len(shared_b) == 3:
        return "fail"  # identical generator sets at distinct words
    best = "fail"
    for gens_self, normals, shared_self, gens_other, shared_other in (
        (ga, na, shared_a, gb, shared_b),
        (gb, nb, shared_b, ga, shared_a),
    ):
        non_shared = [l for l in range(3) if l not in shared_self]
        for cand in _certificate_candidates(normals, non_shared, gens_other, tol):
            nn = float(np.linalg.norm(cand))
            if nn <= tol:
                continue
            cand = cand / nn
            status = _sides_certify(
                gens_other.T @ cand, shared_other, gens_other, gens_self, tol
            )
            if status == "ok":
                return "ok"
            if status == "indeterminate":
                best = "indeterminate"
    return best


CHECK_NAMES = (
    "global",
    "local",
    "separate",
    "nonperiodic",
    "signs",
    "monotone",
    "simplified",
    "fanstructure",
)


def run_checks(
    b: ExchangeMatrix,
    depth: int,
    checks=CHECK_NAMES,
    eps_sign: float = EPS_SIGN,
    eps_eq: float = EPS_EQ,
    samples: int = 64,
    sample_seed: int = 0,
) -> list[Report]:
    """Run the named verifiers over all initial directions where they apply."""
    reports = []
    for name in checks:
        if name == "global":
            for i in (1, 2, 3):
                reports.append(check_global_bound(b, i, depth, eps_sign, eps_eq))
        elif name == "local":
            for i in (1, 2, 3):
                reports.append(
                    check_local_bounds(b, i, depth, eps_sign, eps_eq, samples, sample_seed)
                )
        elif name == "separate":
            reports.append(check_separateness(b, max(depth - 2, 0), eps_sign, samples, sample_seed))
        elif name == "nonperiodic":
            reports.append(check_nonperiodicity(b, depth, eps_sign))
        elif name == "signs":
            for i in (1, 2, 3):
                reports.append(check_sign_table(b, i, depth, eps_sign))
        elif name == "monotone":
            for i in (1, 2, 3):
                reports.append(check_monotonicity(b, i, depth, eps_sign))
        elif name == "simplified":
            reports.append(check_simplified_bound(b, depth, eps_sign, eps_eq))
        elif name == "fanstructure":
            reports.append(check_fan_structure(b, min(depth, 7), eps_sign))
        else:
            raise ValueError(f"unknown check {name!r}; choose from {CHECK_NAMES}")
    return reports
