"""Deterministic text emitters: SVG disc portraits, JSON atlases, CSV tables.

Every number goes through a fixed format string so that identical inputs give
byte-identical output.
"""

from __future__ import annotations

import math
import os
import tempfile
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path

import numpy as np

from .analysis import Classification, Equilibrium, RayDirection, invariant_rays, named_equilibria, ray_disc_point
from .flow import BasinGrid, IntegrationConfig, Trajectory, integrate_compactified
from .errors import FlagFlowError
from .models import FlagModel, Family, fibration_info, polynomial_field, raw_coefficients, ray_slopes

__all__ = [
    "PortraitOptions",
    "render_portrait",
    "export_equilibria",
    "export_rays",
    "export_trajectory",
    "export_basin",
    "model_summary",
    "model_json",
    "to_json",
    "write_atomic",
]


def fmt(x) -> str:
    """17 significant digits: enough to round-trip any double."""
    x = float(x)
    if x == 0:
        return "0"
    return format(x, ".17g")


def _frac(c: Fraction) -> str:
    return str(c.numerator) if c.denominator == 1 else f"{c.numerator}/{c.denominator}"


def to_json(obj, indent: int = 2, _level: int = 0) -> str:
    """Small JSON writer with fixed float formatting and insertion-ordered keys."""
    pad = " " * (indent * (_level + 1))
    end = " " * (indent * _level)
    if obj is None:
        return "null"
    if obj is True:
        return "true"
    if obj is False:
        return "false"
    if isinstance(obj, int):
        return str(obj)
    if isinstance(obj, float):
        if not math.isfinite(obj):
            return "null"
        return fmt(obj)
    if isinstance(obj, str):
        import json

        return json.dumps(obj, ensure_ascii=False)
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = [f"{pad}{to_json(str(k))}: {to_json(v, indent, _level + 1)}" for k, v in obj.items()]
        return "{\n" + ",\n".join(items) + "\n" + end + "}"
    if isinstance(obj, (list, tuple)):
        if not obj:
            return "[]"
        items = [f"{pad}{to_json(v, indent, _level + 1)}" for v in obj]
        return "[\n" + ",\n".join(items) + "\n" + end + "]"
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def write_atomic(path, data: str | bytes) -> None:
    """Write via a temporary file in the same directory, then rename."""
    path = Path(path)
    raw = data.encode("utf-8") if isinstance(data, str) else data
    fd, tmp = tempfile.mkstemp(dir=path.parent or ".", prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "wb") as fh:
            fh.write(raw)
        umask = os.umask(0)
        os.umask(umask)
        os.chmod(tmp, 0o666 & ~umask)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


# JSON / text exports -------------------------------------------------------------


def _equilibrium_record(e: Equilibrium) -> dict:
    return {
        "name": e.name,
        "chart": e.chart.value,
        "z1": float(e.z1),
        "sphere": [float(c) for c in e.sphere.as_tuple()],
        "disc": [float(c) for c in e.disc.as_tuple()],
        "eigenvalues": [{"re": float(l.real), "im": float(l.imag)} for l in e.eigenvalues],
        "class": e.classification.value,
    }


def export_equilibria(model: FlagModel) -> str:
    """JSON array of the first-quadrant equilibria at infinity, by disc angle descending."""
    eqs = sorted(named_equilibria(model), key=lambda e: -e.angle)
    return to_json([_equilibrium_record(e) for e in eqs]) + "\n"


def export_rays(model: FlagModel) -> str:
    rays = invariant_rays(polynomial_field(model))
    return to_json([_ray_record(r) for r in rays]) + "\n"


def _ray_record(r: RayDirection) -> dict:
    slope = r.slope
    if isinstance(slope, Fraction):
        exact = _frac(slope)
    else:
        exact = None
    return {
        "direction": [r.a, r.b],
        "slope_x_over_y": float(slope) if math.isfinite(float(slope)) else None,
        "slope_exact": exact,
        "angle": r.angle,
    }


def _poly_terms(p):
    return [{"x_power": i, "y_power": j, "coeff": _frac(c)} for (i, j), c in p]


def model_json(model: FlagModel) -> str:
    vf = polynomial_field(model)
    fib = fibration_info(model)
    raw = raw_coefficients(model)
    s1, s2 = ray_slopes(model)
    doc = {
        "family": model.family.value,
        "m": model.m,
        "k": model.k,
        "n": model.n,
        "strict": model.strict,
        "manifold": model.label,
        "notes": list(model.notes),
        "raw_system": {
            "form": _raw_form(model),
            "coefficients": {k: _frac(v) for k, v in raw.items()},
        },
        "polynomial_field": {"p1": _poly_terms(vf.p1), "p2": _poly_terms(vf.p2), "degree": vf.degree},
        "einstein_ray_slopes_x_over_y": [_frac(s1), _frac(s2)],
        "fibration": {
            "dim_m1": fib.dim_m1,
            "dim_m2": fib.dim_m2,
            "fiber": fib.fiber_label,
            "base": fib.base_label,
            "total": fib.total_label,
        },
    }
    return to_json(doc) + "\n"


def _raw_form(model: FlagModel) -> list[str]:
    if model.family is Family.TypeI:
        return ["x' = a + b*x^2/y^2", "y' = c + e*(y^2 - (x - y)^2)/(x*y)"]
    return ["x' = a + b*x^2/y^2", "y' = c - e*x/y"]


def model_summary(model: FlagModel) -> str:
    c = {k: _frac(v) for k, v in raw_coefficients(model).items()}
    vf = polynomial_field(model)
    lines = [
        f"family {model.family.value}: {model.label}  (m={model.m}, k={model.k}, n={model.n})",
        "flow system, x = lambda1, y = lambda2:",
    ]
    if model.family is Family.TypeI:
        lines += [f"  x' = {c['a']} + ({c['b']})*x^2/y^2",
                  f"  y' = {c['c']} + ({c['e']})*(y^2 - (x - y)^2)/(x*y)"]
    else:
        lines += [f"  x' = {c['a']} + ({c['b']})*x^2/y^2",
                  f"  y' = {c['c']} - ({c['e']})*x/y"]
    lines += [
        "polynomial field (flow system times y^2):",
        f"  x' = {vf.p1}",
        f"  y' = {vf.p2}",
    ]
    for note in model.notes:
        lines.append(f"note: {note}")
    return "\n".join(lines) + "\n"


def export_trajectory(traj: Trajectory) -> str:
    """CSV with header ``t,u,v,chart,z1,z2`` (plus ``x,y`` for raw runs), LF line ends."""
    raw = traj.is_raw
    header = "t,u,v,chart,z1,z2" + (",x,y" if raw else "")
    rows = [header]
    for i in range(len(traj)):
        cols = [fmt(traj.t[i]), fmt(traj.disc[i, 0]), fmt(traj.disc[i, 1]), traj.chart[i],
                fmt(traj.z[i, 0]), fmt(traj.z[i, 1])]
        if raw:
            cols += [fmt(traj.xy[i, 0]), fmt(traj.xy[i, 1])]
        rows.append(",".join(cols))
    return "\n".join(rows) + "\n"


def export_basin(grid: BasinGrid) -> str:
    rows = ["i,j,x0,y0,region,expected,omega,target,final_distance,consistent"]
    nx = grid.nx
    for idx, c in enumerate(grid.cells):
        j, i = divmod(idx, nx)
        om = c.dynamic
        rows.append(",".join([
            str(i), str(j), fmt(c.x0), fmt(c.y0),
            c.geometric.value if c.geometric else "",
            c.expected or "",
            om.verdict.value if om else "error",
            (om.target or "") if om else "",
            fmt(om.final_distance) if om else "",
            "true" if c.consistent else "false",
        ]))
    return "\n".join(rows) + "\n"


# SVG ---------------------------------------------------------------------------


@dataclass(frozen=True)
class PortraitOptions:
    width_px: int = 800
    n_stream_seeds: int = 24
    draw_rays: bool = True
    draw_equator: bool = True
    labels: bool = True
    max_points_per_curve: int = 400

    def __post_init__(self):
        if self.width_px < 100 or self.n_stream_seeds < 0:
            raise ValueError("width_px must be >= 100 and n_stream_seeds >= 0")


_CLASS_COLOURS = {
    Classification.StableNode: "#1f6fb4",
    Classification.UnstableNode: "#e07b00",
    Classification.Saddle: "#c8222c",
    Classification.StableFocus: "#2a9d8f",
    Classification.UnstableFocus: "#e9c46a",
    Classification.LinearCenter: "#6a4c93",
    Classification.Degenerate: "#555555",
}


def stream_seeds(n: int) -> list[tuple[float, float]]:
    """Deterministic plane seeds spread over the open first quadrant."""
    seeds = []
    for i in range(n):
        theta = (i + 0.5) / n * (math.pi / 2)
        r = 0.4 if i % 2 == 0 else 2.5
        seeds.append((r * math.cos(theta), r * math.sin(theta)))
    return seeds


class _Canvas:
    def __init__(self, width: int):
        self.w = width
        self.margin = round(width * 0.06)
        self.scale = width - 2 * self.margin

    def px(self, u: float, v: float) -> tuple[str, str]:
        return (f"{self.margin + u * self.scale:.3f}", f"{self.margin + (1 - v) * self.scale:.3f}")

    def polyline(self, pts, **attrs) -> str:
        coords = " ".join(",".join(self.px(u, v)) for u, v in pts)
        a = "".join(f' {k.replace("_", "-")}="{v}"' for k, v in attrs.items())
        return f'<polyline points="{coords}"{a}/>'


def _decimate(pts: np.ndarray, limit: int) -> np.ndarray:
    if len(pts) <= limit:
        return pts
    idx = np.unique(np.linspace(0, len(pts) - 1, limit).round().astype(int))
    return pts[idx]


def _ray_curve(model: FlagModel, ray: str, n: int = 240) -> list[tuple[float, float]]:
    pts = []
    for i in range(n + 1):
        s = i / n
        t = 1e6 if i == n else math.tan(s * math.pi / 2)
        pts.append(ray_disc_point(model, ray, t))
    return pts


def render_portrait(model: FlagModel, opts: PortraitOptions | None = None,
                    cfg: IntegrationConfig | None = None) -> bytes:
    """SVG portrait of the compactified flow on the first quadrant of the Poincaré disc."""
    opts = opts or PortraitOptions()
    cfg = cfg or IntegrationConfig()
    cv = _Canvas(opts.width_px)
    w = opts.width_px
    out = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{w}" height="{w}" '
        f'viewBox="0 0 {w} {w}">',
        f"<title>Poincare disc portrait, type {model.family.value}, m={model.m}, k={model.k}</title>",
        '<rect x="0" y="0" width="100%" height="100%" fill="#ffffff"/>',
    ]
    x0, y0 = cv.px(0, 0)
    x1, _ = cv.px(1, 0)
    _, y1 = cv.px(0, 1)
    out.append(f'<g id="axes" stroke="#999999" stroke-width="1">'
               f'<line x1="{x0}" y1="{y0}" x2="{x1}" y2="{y0}"/>'
               f'<line x1="{x0}" y1="{y0}" x2="{x0}" y2="{y1}"/></g>')
    if opts.draw_equator:
        r = f"{cv.scale:.3f}"
        out.append(f'<path id="equator" d="M {x1} {y0} A {r} {r} 0 0 0 {x0} {y1}" '
                   f'fill="none" stroke="#000000" stroke-width="1.5"/>')

    out.append('<g id="streamlines" fill="none" stroke="#7f7f7f" stroke-width="0.8">')
    for sx, sy in stream_seeds(opts.n_stream_seeds):
        try:
            traj = integrate_compactified(model, sx, sy, cfg)
        except FlagFlowError as exc:
            out.append(f"<!-- streamline from ({fmt(sx)}, {fmt(sy)}) omitted: {type(exc).__name__} -->")
            continue
        pts = _decimate(traj.disc, opts.max_points_per_curve)
        out.append(cv.polyline(pts, data_limit=traj.omega.target or traj.omega.verdict.value))
    out.append("</g>")

    if opts.draw_rays:
        out.append('<g id="rays" fill="none" stroke-width="1.6">')
        styles = {"gamma1": "#1f6fb4", "gamma2": "#c8222c", "gamma3": "#1f6fb4"}
        for ray, colour in styles.items():
            out.append(cv.polyline(_ray_curve(model, ray), id=ray, stroke=colour))
        out.append("</g>")

    out.append('<g id="equilibria">')
    for e in sorted(named_equilibria(model), key=lambda e: -e.angle):
        cx, cy = cv.px(e.disc.u, e.disc.v)
        colour = _CLASS_COLOURS[e.classification]
        out.append(
            f'<circle class="equilibrium {e.classification.value}" cx="{cx}" cy="{cy}" r="6" '
            f'fill="{colour}" stroke="#000000" data-name="{e.name}" '
            f'data-u="{fmt(e.disc.u)}" data-v="{fmt(e.disc.v)}"/>'
        )
        if opts.labels:
            lx = f"{float(cx) + 9:.3f}"
            ly = f"{float(cy) - 9:.3f}"
            out.append(f'<text x="{lx}" y="{ly}" font-family="sans-serif" font-size="14">{e.name}</text>')
    out.append("</g>")
    out.append("</svg>")
    return ("\n".join(out) + "\n").encode("utf-8")
