"""SVG scenes of domains and lunes, drawn through a model projection.

Curved pieces are emitted as dense polylines so that they stay correct
under any projection.  Supported projections:

* ``plane``        -- identity on the flat model;
* ``poincare``     -- hyperboloid to the unit disk, (x, y, z) -> k(x, y) / (1 + k z);
* ``orthographic`` -- sphere viewed from outside along the view centre,
  with the far hemisphere clipped.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from xml.sax.saxutils import escape

import numpy as np

from .kernel import GeometryError, space

PROJECTIONS = ("plane", "poincare", "orthographic")


class ProjectionError(GeometryError):
    pass


def default_projection(kappa: float) -> str:
    sp = space(kappa)
    if sp.flat:
        return "plane"
    return "orthographic" if kappa > 0 else "poincare"


def check_projection(kappa: float, projection: str) -> None:
    if projection not in PROJECTIONS:
        raise ProjectionError(f"unknown projection {projection!r}")
    if projection != default_projection(kappa):
        raise ProjectionError(f"projection {projection!r} does not apply to kappa = {kappa}")


def project(kappa: float, pts, projection: str, view=None):
    """Map model points to 2-D picture coordinates; returns (xy, visible)."""
    sp = space(kappa)
    pts = np.atleast_2d(np.asarray(pts, dtype=float))
    if projection == "plane":
        return pts[:, :2].copy(), np.ones(len(pts), dtype=bool)
    q = sp.k * pts
    if projection == "poincare":
        return q[:, :2] / (1.0 + q[:, 2:3]), np.ones(len(pts), dtype=bool)
    c = np.array([0.0, 0.0, 1.0]) if view is None else sp.k * np.asarray(view, dtype=float)
    c = c / np.linalg.norm(c)
    e1, e2 = sp.tangent_basis(c / sp.k)
    xy = np.stack([q @ e1, q @ e2], axis=-1)
    return xy, q @ c >= -1e-12


@dataclass
class Element:
    kind: str
    points: np.ndarray
    closed: bool = False
    style: dict = field(default_factory=dict)
    label: str | None = None


@dataclass
class RenderScene:
    kappa: float
    projection: str | None = None
    view: np.ndarray | None = None
    elements: list[Element] = field(default_factory=list)

    def __post_init__(self):
        if self.projection is None:
            self.projection = default_projection(self.kappa)
        check_projection(self.kappa, self.projection)

    def _add(self, kind, pts, closed=False, label=None, **style) -> Element:
        pts = np.atleast_2d(np.asarray(pts, dtype=float))
        err = space(self.kappa).on_surface_error(pts)
        if np.max(err) > 1e-6:
            raise GeometryError(f"{kind} element does not lie in the kappa = {self.kappa} model")
        el = Element(kind, pts, closed, style, label)
        self.elements.append(el)
        return el

    def add_polyline(self, pts, *, closed: bool = False, **style) -> Element:
        return self._add("polyline", pts, closed, **style)

    def add_arc(self, arc, h: float = 1e-2, **style) -> Element:
        return self._add("arc", arc.sample(h), **style)

    def add_geodesic(self, a, b, n: int = 64, **style) -> Element:
        sp = space(self.kappa)
        t = np.linspace(0.0, float(sp.dist(a, b)), n)
        u = sp.log_dir(a, b)
        return self._add("geodesic", sp.exp(np.asarray(a)[None], u[None], t), **style)

    def add_metric_circle(self, center, radius: float, n: int = 256, **style) -> Element:
        sp = space(self.kappa)
        th = np.linspace(0.0, 2 * math.pi, n, endpoint=False)
        pts = sp.from_polar(radius, th, center=np.asarray(center, dtype=float))
        return self._add("circle", pts, closed=True, **style)

    def add_point(self, p, label: str | None = None, **style) -> Element:
        return self._add("point", p, label=label, **style)

    # -- output ------------------------------------------------------------
    def to_svg(self, width: int = 640, margin: float = 0.06) -> str:
        projected = [project(self.kappa, el.points, self.projection, self.view) for el in self.elements]
        if self.projection == "plane":
            vis = [xy[v] for xy, v in projected if v.any()]
            allxy = np.vstack(vis) if vis else np.zeros((1, 2))
            lo, hi = allxy.min(axis=0), allxy.max(axis=0)
        else:
            lo, hi = np.array([-1.0, -1.0]), np.array([1.0, 1.0])
        span = float(max(hi - lo)) or 1.0
        lo = lo - margin * span
        span *= 1 + 2 * margin
        scale = width / span
        height = width

        def fmt(xy):
            x = (xy[:, 0] - lo[0]) * scale
            y = height - (xy[:, 1] - lo[1]) * scale
            return x, y

        out = [
            '<?xml version="1.0" encoding="UTF-8"?>',
            f'<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{width}" height="{height}" viewBox="0 0 {width} {height}">',
            f"<desc>kappa={self.kappa!r} projection={self.projection}</desc>",
            f'<rect x="0" y="0" width="{width}" height="{height}" fill="white"/>',
        ]
        if self.projection != "plane":
            cx, cy = fmt(np.zeros((1, 2)))
            out.append(f'<circle class="model-boundary" cx="{cx[0]:.3f}" cy="{cy[0]:.3f}" r="{scale:.3f}" fill="none" stroke="#999" stroke-width="1"/>')
        for el, (xy, vis) in zip(self.elements, projected):
            style = {"stroke": "black", "stroke-width": "1.5", "fill": "none"}
            style.update({k.replace("_", "-"): str(v) for k, v in el.style.items()})
            attrs = " ".join(f'{k}="{escape(v)}"' for k, v in style.items())
            x, y = fmt(xy)
            if el.kind == "point":
                if vis[0]:
                    r = style.get("r", "3")
                    fill = el.style.get("fill", "black")
                    out.append(f'<circle class="point" cx="{x[0]:.3f}" cy="{y[0]:.3f}" r="{r}" fill="{escape(str(fill))}"/>')
                    if el.label:
                        out.append(f'<text x="{x[0] + 5:.3f}" y="{y[0] - 5:.3f}" font-size="12" font-family="sans-serif">{escape(el.label)}</text>')
                continue
            for run in _visible_runs(vis, el.closed):
                d = "M " + " L ".join(f"{x[i]:.3f} {y[i]:.3f}" for i in run)
                if el.closed and len(run) == len(vis):
                    d += " Z"
                out.append(f'<path class="{el.kind}" d="{d}" {attrs}/>')
        out.append("</svg>")
        return "\n".join(out) + "\n"


def _visible_runs(vis: np.ndarray, closed: bool):
    n = len(vis)
    if vis.all():
        return [list(range(n))]
    runs, cur = [], []
    for i in range(n):
        if vis[i]:
            cur.append(i)
        elif cur:
            runs.append(cur)
            cur = []
    if cur:
        if closed and runs and runs[0][0] == 0:
            runs[0] = cur + runs[0]
        else:
            runs.append(cur)
    return [r for r in runs if len(r) > 1]


def lune_scene(lune, h: float = 1e-2, projection: str | None = None) -> RenderScene:
    scene = RenderScene(lune.kappa, projection, view=lune.center)
    for arc in lune.arcs:
        scene.add_arc(arc, h, stroke="#1f4e9c", stroke_width=2)
    scene.add_point(lune.corners[0], "p*")
    scene.add_point(lune.corners[1], "q*")
    scene.add_point(lune.center, "m", fill="#b22")
    return scene


def domain_scene(D, annotate: str | None = None, projection: str | None = None) -> RenderScene:
    """Boundary of D plus an optional solver annotation layer."""
    from .domains import balanced_chord, circumradius, inradius, reflect_arc

    r, inc = inradius(D)
    scene = RenderScene(D.kappa, projection, view=inc.coords)
    scene.add_polyline(D.boundary, closed=True, stroke="black", stroke_width=2)
    if annotate is None:
        return scene
    if annotate == "inradius":
        scene.add_metric_circle(inc.coords, r, stroke="#2a7", stroke_dasharray="4 3")
        scene.add_point(inc.coords, f"r = {r:.4f}", fill="#2a7")
    elif annotate == "circumradius":
        R, cc = circumradius(D)
        scene.add_metric_circle(cc.coords, R, stroke="#c62", stroke_dasharray="4 3")
        scene.add_point(cc.coords, f"R = {R:.4f}", fill="#c62")
    elif annotate == "chord":
        ch = balanced_chord(D)
        scene.add_geodesic(ch.p_star, ch.q_star, stroke="#b22")
        try:
            G = reflect_arc(D, ch)
            scene.add_polyline(G.boundary, closed=True, stroke="#1f4e9c", stroke_dasharray="5 3")
        except GeometryError:
            pass
        scene.add_metric_circle(inc.coords, r, stroke="#2a7", stroke_dasharray="2 2")
        scene.add_point(ch.p_star, "p*")
        scene.add_point(ch.q_star, "q*")
        scene.add_point(ch.m, "m", fill="#b22")
    else:
        raise ValueError(f"unknown annotation {annotate!r}")
    return scene
