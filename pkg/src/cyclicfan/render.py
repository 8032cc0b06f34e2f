"""SVG rendering of the projected G-fan with bound overlays.

Cone boundaries and planes are sampled (128 points per full plane circle)
and projected; no great-circle exactness is attempted.  Output is
deterministic for fixed inputs: sampling uses no randomness and floats
are written with fixed precision.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .bounds import global_bound, local_bound
from .matrices import ExchangeMatrix
from .projection import project_polyline
from .seeds import branch_root_seed, iter_seeds, modified_vectors
from .tolerances import EPS_SIGN

PLANE_SAMPLES = 128
EDGE_SAMPLES = 33
CLIP_T = 50.0

LAYERS = ("orthants", "gcones", "global", "local", "separators")

_STYLE = {
    "orthants": 'fill="none" stroke="#999999" stroke-width="0.02"',
    "gcones": 'fill="none" stroke="#222222" stroke-width="0.012"',
    "global": 'fill="none" stroke="#1f4fbf" stroke-width="0.035"',
    "local": 'fill="none" stroke="#1f4fbf" stroke-width="0.018" stroke-dasharray="0.08,0.05"',
    "separators": 'fill="none" stroke="#c02020" stroke-width="0.018"',
}


@dataclass
class RenderScene:
    """Projected arcs and points grouped by layer, plus the viewport."""

    arcs: list = field(default_factory=list)  # (layer, [(u, w), ...])
    points: list = field(default_factory=list)  # (layer, (u, w))
    viewport: tuple = (-7.0, -7.0, 14.0, 14.0)

    def add_path3(self, layer: str, points3, eps_sign: float = EPS_SIGN):
        for seg in project_polyline(points3, CLIP_T, eps_sign):
            self.arcs.append((layer, seg))


def _plane_circle(normal: np.ndarray, samples: int = PLANE_SAMPLES):
    """3D unit circle of the plane {x : <x, normal> = 0} (Euclidean normal)."""
    n = normal / np.linalg.norm(normal)
    ref = np.array([1.0, 0.0, 0.0]) if abs(n[0]) < 0.9 else np.array([0.0, 1.0, 0.0])
    q1 = np.cross(n, ref)
    q1 = q1 / np.linalg.norm(q1)
    q2 = np.cross(n, q1)
    theta = np.linspace(0.0, 2.0 * math.pi, samples + 1)
    return [math.cos(t) * q1 + math.sin(t) * q2 for t in theta]


def _cone_edge(a: np.ndarray, b: np.ndarray, samples: int = EDGE_SAMPLES):
    ah = a / np.linalg.norm(a)
    bh = b / np.linalg.norm(b)
    return [(1.0 - s) * ah + s * bh for s in np.linspace(0.0, 1.0, samples)]


def _quadric_zero_curve(qb, samples: int = PLANE_SAMPLES):
    """The boundary rays {quadform = 0, pairing >= 0}, one closed 3D curve."""
    vals, vecs = np.linalg.eigh(qb.a_tilde)
    order = np.argsort(vals)[::-1]  # lam first
    lam = vals[order[0]]
    nus = vals[order[1:]]
    v = vecs[:, order[0]]
    if v @ qb.eigen.v < 0:
        v = -v
    u1, u2 = vecs[:, order[1]], vecs[:, order[2]]
    droot = np.sqrt(qb.d)
    pts = []
    for t in np.linspace(0.0, 2.0 * math.pi, samples + 1):
        a, b = math.cos(t), math.sin(t)
        r = math.sqrt(max((-nus[0] * a * a - nus[1] * b * b) / lam, 0.0))
        y = r * v + a * u1 + b * u2
        pts.append(y / droot)
    return pts


def build_scene(
    b: ExchangeMatrix,
    depth: int,
    layers=("orthants", "gcones"),
    eps_sign: float = EPS_SIGN,
) -> RenderScene:
    scene = RenderScene()
    unknown = set(layers) - set(LAYERS)
    if unknown:
        raise ValueError(f"unknown layers {sorted(unknown)}; choose from {LAYERS}")

    if "orthants" in layers:
        for axis in range(3):
            normal = np.zeros(3)
            normal[axis] = 1.0
            scene.add_path3("orthants", _plane_circle(normal), eps_sign)

    if "gcones" in layers:
        seen = set()
        for seed in iter_seeds(b, depth):
            mv = modified_vectors(seed)
            cols = [mv.g_col(j) for j in (1, 2, 3)]
            for a in range(3):
                for bidx in range(a + 1, 3):
                    key = _edge_key(cols[a], cols[bidx])
                    if key in seen:
                        continue
                    seen.add(key)
                    scene.add_path3("gcones", _cone_edge(cols[a], cols[bidx]), eps_sign)

    if "global" in layers:
        for i in (1, 2, 3):
            qb = global_bound(b, i, eps_sign)
            scene.add_path3("global", _quadric_zero_curve(qb), eps_sign)

    if "local" in layers or "separators" in layers:
        for i in (1, 2, 3):
            for n in range(max(depth - 1, 0)):
                if n + 2 > depth:
                    break
                root = branch_root_seed(b, i, n)
                lb = local_bound(root, eps_sign)
                if "local" in layers:
                    gens = [lb.g_s, lb.g_t, lb.gbar]
                    for a in range(3):
                        for bidx in range(a + 1, 3):
                            scene.add_path3(
                                "local", _cone_edge(gens[a], gens[bidx]), eps_sign
                            )
                if "separators" in layers:
                    scene.add_path3(
                        "separators", _plane_circle(b.d * lb.cbar), eps_sign
                    )
    return scene


def _edge_key(a: np.ndarray, b: np.ndarray) -> tuple:
    ka = tuple(np.round(a / np.linalg.norm(a), 9))
    kb = tuple(np.round(b / np.linalg.norm(b), 9))
    return (ka, kb) if ka <= kb else (kb, ka)


def scene_to_svg(scene: RenderScene) -> str:
    x0, y0, w, h = scene.viewport
    out = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" version="1.1" '
        f'width="800" height="800" viewBox="{x0:.3f} {y0:.3f} {w:.3f} {h:.3f}">',
        f'<rect x="{x0:.3f}" y="{y0:.3f}" width="{w:.3f}" height="{h:.3f}" fill="white"/>',
    ]
    for layer in LAYERS:
        arcs = [seg for (lname, seg) in scene.arcs if lname == layer]
        if not arcs:
            continue
        out.append(f'<g id="{layer}" {_STYLE[layer]}>')
        for seg in arcs:
            pts = " ".join(f"{u:.6f},{-w:.6f}" for (u, w) in seg)
            out.append(f'<polyline points="{pts}"/>')
        out.append("</g>")
    for layer, (u, w) in scene.points:
        out.append(f'<circle cx="{u:.6f}" cy="{-w:.6f}" r="0.03" fill="#000000"/>')
    out.append("</svg>")
    return "\n".join(out) + "\n"


def render_fan(
    b: ExchangeMatrix,
    depth: int,
    layers=("orthants", "gcones"),
    out: str | None = None,
    eps_sign: float = EPS_SIGN,
) -> str:
    """Render the projected fan; write to ``out`` when given."""
    svg = scene_to_svg(build_scene(b, depth, layers, eps_sign))
    if out is not None:
        with open(out, "w", encoding="utf-8") as fh:
            fh.write(svg)
    return svg
