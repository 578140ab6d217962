"""Forward integration on the Poincaré disc and basin-of-attraction checks.

Compactified trajectories are integrated in chart time: the polynomial
expression of each chart differs from the plane flow by a positive factor, so
orbits and limits are those of the original system while the clock is not.
"""

from __future__ import annotations

import enum
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace
from fractions import Fraction
from typing import Iterator, Sequence

import numpy as np

from ._dopri import Stepper
from .analysis import Classification, Equilibrium, model_equilibria
from .compactify import Chart, DiscPoint, compactified_field
from .errors import DomainError, EmptyTrajectoryError, NumericalError, ParameterError, StepUnderflowError
from .models import Family, FlagModel, polynomial_field, raw_coefficients, ray_slopes

__all__ = [
    "IntegrationConfig",
    "Verdict",
    "OmegaLimit",
    "Trajectory",
    "Region",
    "BasinResult",
    "BasinGrid",
    "integrate_compactified",
    "integrate_raw",
    "omega_limit",
    "sector_of",
    "classify_basin",
    "basin_sweep",
    "grid_points",
    "orbit_deviation",
]

ON_RAY_RTOL = 1e-12
BLOWUP_SIZE = 1e6
BLOWUP_RATIO = 1e3
MIN_RTOL = 1e-15


@dataclass(frozen=True)
class IntegrationConfig:
    rtol: float = 1e-9
    atol: float = 1e-12
    t_max: float = 1e3
    capture_radius: float = 1e-6
    chart_switch_threshold: float = 2.0
    max_steps: int = 1_000_000
    #: disc distance between dense-output samples inside a step
    dense_arc_step: float = 1e-4

    def __post_init__(self):
        for name in ("rtol", "atol", "t_max", "capture_radius", "chart_switch_threshold", "dense_arc_step"):
            v = getattr(self, name)
            if not (isinstance(v, (int, float)) and v > 0 and math.isfinite(v)):
                raise ParameterError(f"{name} must be a positive finite number, got {v!r}")
        if self.rtol < MIN_RTOL:
            raise ParameterError(f"rtol below {MIN_RTOL:g} is beyond double precision")
        if self.capture_radius >= 1e-2:
            raise ParameterError("capture_radius must be below 1e-2")
        if self.chart_switch_threshold < 1:
            raise ParameterError("chart_switch_threshold must be at least 1")
        if int(self.max_steps) != self.max_steps or self.max_steps < 1:
            raise ParameterError("max_steps must be a positive integer")

    def tightened(self, factor: float = 0.5) -> "IntegrationConfig":
        return replace(self, rtol=self.rtol * factor, atol=self.atol * factor)


class Verdict(str, enum.Enum):
    CONVERGED = "converged"
    MAX_TIME = "max_time"
    STEP_LIMIT = "step_limit"


@dataclass(frozen=True)
class OmegaLimit:
    verdict: Verdict
    target: str | None
    final_disc: DiscPoint
    final_distance: float
    nearest: str | None = None
    target_disc: DiscPoint | None = None

    def __str__(self):
        if self.verdict is Verdict.CONVERGED:
            return f"converged({self.target})"
        return self.verdict.value


@dataclass
class Trajectory:
    """Samples of one forward orbit.

    ``z`` holds chart coordinates (the plane point itself for raw
    trajectories); ``xy`` is only set for raw trajectories.
    """

    t: np.ndarray
    disc: np.ndarray
    chart: list[str]
    z: np.ndarray
    omega: OmegaLimit | None = None
    xy: np.ndarray | None = None
    stop_reason: str = ""
    n_steps: int = 0

    def __len__(self):
        return len(self.t)

    @property
    def is_raw(self) -> bool:
        return self.xy is not None

    @property
    def samples(self) -> Iterator[tuple]:
        for i in range(len(self.t)):
            yield (self.t[i], DiscPoint(*self.disc[i]), self.chart[i], tuple(self.z[i]))


class Region(str, enum.Enum):
    R1 = "R1"
    R2 = "R2"
    R3 = "R3"
    OnGamma1 = "gamma1"
    OnGamma2 = "gamma2"
    OnAxis = "axis"

    @property
    def predicted_limit(self) -> str:
        return {"R1": "p1", "R2": "p1", "gamma1": "p1", "gamma2": "p2", "R3": "p3", "axis": "p3"}[self.value]


# chart geometry ----------------------------------------------------------------


def _disc_of(chart: Chart, z1: float, z2: float) -> tuple[float, float]:
    if chart is Chart.U3:
        n = math.sqrt(1.0 + z1 * z1 + z2 * z2)
        return z1 / n, z2 / n
    n = math.sqrt(1.0 + z1 * z1 + z2 * z2)
    if chart is Chart.U1:
        return 1.0 / n, z1 / n
    if chart is Chart.U2:
        return z1 / n, 1.0 / n
    raise ParameterError(f"integration only uses U-charts, got {chart}")


def _sphere_of(chart: Chart, z1: float, z2: float) -> tuple[float, float, float]:
    n = math.sqrt(1.0 + z1 * z1 + z2 * z2)
    if chart is Chart.U1:
        return 1.0 / n, z1 / n, z2 / n
    if chart is Chart.U2:
        return z1 / n, 1.0 / n, z2 / n
    return z1 / n, z2 / n, 1.0 / n


def _best_chart(y: tuple[float, float, float]) -> Chart:
    i = max(range(3), key=lambda a: abs(y[a]))
    if y[i] <= 0:
        raise DomainError("orbit left the closed first quadrant of the northern hemisphere")
    return (Chart.U1, Chart.U2, Chart.U3)[i]


def _chart_coords(chart: Chart, y):
    y1, y2, y3 = y
    if chart is Chart.U1:
        return y2 / y1, y3 / y1
    if chart is Chart.U2:
        return y1 / y2, y3 / y2
    return y1 / y3, y2 / y3


class _Fields:
    def __init__(self, model: FlagModel):
        vf = polynomial_field(model)
        self.f = {c: compactified_field(vf, c).fast for c in (Chart.U1, Chart.U2, Chart.U3)}


_FIELD_CACHE: dict[FlagModel, _Fields] = {}


def _fields(model: FlagModel) -> _Fields:
    try:
        return _FIELD_CACHE[model]
    except KeyError:
        out = _FIELD_CACHE[model] = _Fields(model)
        return out


def _targets(equilibria: Sequence[Equilibrium]) -> list[tuple[str, float, float]]:
    out = []
    for e in equilibria:
        if e.classification.is_stable or e.classification is Classification.Saddle:
            out.append((e.name or f"eq{len(out)}", e.disc.u, e.disc.v))
    return out


# integration -------------------------------------------------------------------


def _check_seed(x0, y0):
    if not (x0 > 0 and y0 > 0):
        raise DomainError(f"seed must lie in the open first quadrant, got ({x0}, {y0})")
    if not (math.isfinite(float(x0)) and math.isfinite(float(y0))):
        raise DomainError("seed must be finite")


def integrate_compactified(model: FlagModel, x0, y0, cfg: IntegrationConfig | None = None,
                           dense: bool = True) -> Trajectory:
    """Integrate the compactified field from the plane point ``(x0, y0)``.

    The orbit is followed in U3 until a chart coordinate exceeds
    ``cfg.chart_switch_threshold`` and then in whichever of U1, U2, U3 has the
    largest defining sphere coordinate. Integration stops once the disc point
    is within ``cfg.capture_radius`` of a stable equilibrium or of the saddle.

    With ``dense=False`` only accepted steps are recorded.
    """
    cfg = cfg or IntegrationConfig()
    _check_seed(x0, y0)
    fields = _fields(model)
    equilibria = model_equilibria(model)
    targets = _targets(equilibria)
    thr = cfg.chart_switch_threshold

    chart = Chart.U3
    z1, z2 = float(x0), float(y0)
    if max(abs(z1), abs(z2)) > thr:
        chart = _best_chart(_sphere_of(chart, z1, z2))
        z1, z2 = _chart_coords(chart, _sphere_of(Chart.U3, z1, z2))

    ts, us, vs, charts, z1s, z2s = [0.0], [], [], [chart.value], [z1], [z2]
    u, v = _disc_of(chart, z1, z2)
    us.append(u)
    vs.append(v)

    stepper = Stepper(fields.f[chart], z1, z2, cfg.rtol, cfg.atol)
    stop = "max_time"
    steps = 0
    captured = _captured(u, v, targets, cfg.capture_radius)
    if captured:
        stop = "captured"
    while not captured:
        if stepper.t >= cfg.t_max:
            stop = "max_time"
            break
        if steps >= cfg.max_steps:
            stop = "step_limit"
            break
        stepper.advance(h_max=cfg.t_max - stepper.t)
        steps += 1
        end_a, end_b, theta_end = stepper.a, stepper.b, 1.0
        nu, nv = _disc_of(chart, end_a, end_b)
        hit = _captured(nu, nv, targets, cfg.capture_radius)
        if hit:
            theta_end = _capture_crossing(stepper, chart, hit, cfg.capture_radius)
            end_a, end_b = stepper.dense(theta_end)
            nu, nv = _disc_of(chart, end_a, end_b)
        arc = math.hypot(nu - u, nv - v)
        n_sub = int(arc / cfg.dense_arc_step) if dense else 0
        t0 = stepper.t - stepper.h_last
        for i in range(1, n_sub + 1):
            th = theta_end * i / (n_sub + 1)
            da, db = stepper.dense(th)
            du, dv = _disc_of(chart, da, db)
            ts.append(t0 + th * stepper.h_last)
            us.append(du)
            vs.append(dv)
            charts.append(chart.value)
            z1s.append(da)
            z2s.append(db)
        u, v = nu, nv
        ts.append(t0 + theta_end * stepper.h_last)
        us.append(u)
        vs.append(v)
        charts.append(chart.value)
        z1s.append(end_a)
        z2s.append(end_b)
        if hit:
            stop = "captured"
            break
        if abs(stepper.a) > thr or abs(stepper.b) > thr:
            y = _sphere_of(chart, stepper.a, stepper.b)
            new = _best_chart(y)
            if new is not chart:
                chart = new
                a, b = _chart_coords(chart, y)
                stepper.reset(fields.f[chart], a, b)

    traj = Trajectory(
        t=np.asarray(ts),
        disc=np.column_stack([us, vs]),
        chart=charts,
        z=np.column_stack([z1s, z2s]),
        stop_reason=stop,
        n_steps=steps,
    )
    traj.omega = omega_limit(traj, equilibria, cfg)
    return traj


def _captured(u, v, targets, radius):
    for target in targets:
        if math.hypot(u - target[1], v - target[2]) <= radius:
            return target
    return None


def _capture_crossing(stepper: Stepper, chart: Chart, target, radius: float) -> float:
    """Fraction of the last step at which the orbit enters the capture disc.

    Bisection on the dense interpolant; makes the recorded endpoint independent
    of where the step controller happened to land.
    """
    _, eu, ev = target

    def inside(theta):
        u, v = _disc_of(chart, *stepper.dense(theta))
        return math.hypot(u - eu, v - ev) <= radius

    if inside(0.0):
        return 0.0
    lo, hi = 0.0, 1.0
    for _ in range(60):
        mid = 0.5 * (lo + hi)
        if inside(mid):
            hi = mid
        else:
            lo = mid
    return hi


def _raw_fast(model: FlagModel):
    c = {k: float(v) for k, v in raw_coefficients(model).items()}
    a, b, cc, e = c["a"], c["b"], c["c"], c["e"]
    if model.family is Family.TypeI:
        def f(x, y):
            r = x / y
            return a + b * r * r, cc + e * (2.0 * y - x) / y
    else:
        def f(x, y):
            r = x / y
            return a + b * r * r, cc - e * r
    return f


def integrate_raw(model: FlagModel, x0, y0, cfg: IntegrationConfig | None = None,
                  floor: float = 1e-9, ceiling: float = 1e12) -> Trajectory:
    """Integrate the rational flow system in its own time.

    Stops when a coordinate falls below `floor`, exceeds `ceiling`, or time
    reaches ``cfg.t_max``. Orbits heading to infinity may do so in finite
    time; when the step size underflows while the point is already far out
    (a coordinate above 1e6 or a coordinate ratio above 1e3) the run ends with
    ``stop_reason == "blowup"`` instead of raising. Samples carry ``lambda1 = x`` and ``lambda2 = y``.
    """
    cfg = cfg or IntegrationConfig()
    _check_seed(x0, y0)
    f = _raw_fast(model)
    x, y = float(x0), float(y0)
    stepper = Stepper(f, x, y, cfg.rtol, cfg.atol)
    ts, xs, ys = [0.0], [x], [y]
    stop = "max_time"
    steps = 0
    while True:
        if stepper.t >= cfg.t_max:
            stop = "max_time"
            break
        if steps >= cfg.max_steps:
            stop = "step_limit"
            break
        try:
            stepper.advance(h_max=cfg.t_max - stepper.t)
        except StepUnderflowError:
            # finite-time blow-up: the orbit leaves every compact set while raw
            # time stays bounded
            x, y = stepper.a, stepper.b
            if max(x, y) > BLOWUP_SIZE or max(x / y, y / x) > BLOWUP_RATIO:
                stop = "blowup"
                break
            raise
        steps += 1
        x, y = stepper.a, stepper.b
        if min(x, y) < floor:
            stop = "boundary"
            # the last point may have crossed the axis; keep it only if valid
            if x > 0 and y > 0:
                ts.append(stepper.t)
                xs.append(x)
                ys.append(y)
            break
        ts.append(stepper.t)
        xs.append(x)
        ys.append(y)
        if max(x, y) > ceiling:
            stop = "escaped"
            break
    xy = np.column_stack([xs, ys])
    n = np.sqrt(1.0 + xy[:, 0] ** 2 + xy[:, 1] ** 2)
    disc = xy / n[:, None]
    traj = Trajectory(
        t=np.asarray(ts), disc=disc, chart=[Chart.U3.value] * len(ts), z=xy.copy(), xy=xy,
        stop_reason=stop, n_steps=steps,
    )
    traj.omega = omega_limit(traj, model_equilibria(model), cfg)
    return traj


def omega_limit(traj: Trajectory, equilibria: Sequence[Equilibrium],
                cfg: IntegrationConfig | None = None) -> OmegaLimit:
    """Decide the forward limit from the final disc point.

    Converged when the endpoint lies within the capture radius of a stable
    equilibrium or of a saddle; otherwise the reason the integration stopped.
    """
    cfg = cfg or IntegrationConfig()
    if len(traj) == 0:
        raise EmptyTrajectoryError("trajectory has no samples")
    u, v = (float(c) for c in traj.disc[-1])
    final = DiscPoint(u, v)
    best, best_d, best_pt = None, math.inf, None
    for name, eu, ev in _targets(equilibria):
        d = math.hypot(u - eu, v - ev)
        if d < best_d:
            best, best_d, best_pt = name, d, DiscPoint(eu, ev)
    if best is not None and best_d <= cfg.capture_radius:
        return OmegaLimit(Verdict.CONVERGED, best, final, best_d, best, best_pt)
    verdict = Verdict.STEP_LIMIT if traj.stop_reason == "step_limit" else Verdict.MAX_TIME
    return OmegaLimit(verdict, None, final, best_d, best)


# regions and basins -------------------------------------------------------------


def _exact(v) -> Fraction:
    if isinstance(v, Fraction):
        return v
    if isinstance(v, int):
        return Fraction(v)
    return Fraction(float(v))


def sector_of(model: FlagModel, x, y) -> Region:
    """Sector of the open quadrant cut out by the two invariant rays.

    The ratio ``x/y`` is compared exactly; a ratio within a relative
    ``1e-12`` of a ray slope counts as lying on that ray.
    """
    if not (x > 0 and y > 0):
        raise DomainError(f"sector_of needs a point of the open first quadrant, got ({x}, {y})")
    r = _exact(x) / _exact(y)
    s1, s2 = ray_slopes(model)
    tol = Fraction(ON_RAY_RTOL)
    if abs(r - s1) <= tol * s1:
        return Region.OnGamma1
    if abs(r - s2) <= tol * s2:
        return Region.OnGamma2
    if r < s1:
        return Region.R1
    if r < s2:
        return Region.R2
    return Region.R3


@dataclass(frozen=True)
class BasinResult:
    x0: float
    y0: float
    geometric: Region | None
    dynamic: OmegaLimit | None
    consistent: bool
    error: str | None = None

    @property
    def expected(self) -> str | None:
        return self.geometric.predicted_limit if self.geometric else None


def classify_basin(model: FlagModel, x0, y0, cfg: IntegrationConfig | None = None) -> BasinResult:
    region = sector_of(model, x0, y0)
    traj = integrate_compactified(model, x0, y0, cfg, dense=False)
    om = traj.omega
    ok = om.verdict is Verdict.CONVERGED and om.target == region.predicted_limit
    return BasinResult(float(x0), float(y0), region, om, ok)


@dataclass
class BasinGrid:
    x_range: tuple[float, float]
    y_range: tuple[float, float]
    nx: int
    ny: int
    cells: list[BasinResult] = field(default_factory=list)

    def __iter__(self):
        return iter(self.cells)

    @property
    def all_consistent(self) -> bool:
        return all(c.consistent for c in self.cells)


def grid_points(x_range, y_range, nx: int, ny: int) -> list[tuple[float, float]]:
    """Row-major seeds on the half-open box ``(x_lo, x_hi] x (y_lo, y_hi]``."""
    (x_lo, x_hi), (y_lo, y_hi) = x_range, y_range
    if nx < 1 or ny < 1:
        raise ParameterError("grid needs at least one cell in each direction")
    if not (x_hi > x_lo >= 0 and y_hi > y_lo >= 0):
        raise ParameterError(f"empty or invalid range x={x_range}, y={y_range}")
    xs = [x_lo + (x_hi - x_lo) * (i + 1) / nx for i in range(nx)]
    ys = [y_lo + (y_hi - y_lo) * (j + 1) / ny for j in range(ny)]
    return [(x, y) for y in ys for x in xs]


def _cell(args) -> BasinResult:
    model, x, y, cfg = args
    try:
        return classify_basin(model, x, y, cfg)
    except (NumericalError, DomainError) as exc:
        region = sector_of(model, x, y) if x > 0 and y > 0 else None
        return BasinResult(x, y, region, None, False, f"{type(exc).__name__}: {exc}")


def basin_sweep(model: FlagModel, x_range, y_range, nx: int, ny: int,
                cfg: IntegrationConfig | None = None, workers: int = 1) -> BasinGrid:
    """Classify every seed of a grid. Per-cell failures are recorded, not raised.

    With ``workers > 1`` cells run in a process pool; the result order is
    row-major regardless.
    """
    cfg = cfg or IntegrationConfig()
    pts = grid_points(x_range, y_range, nx, ny)
    jobs = [(model, x, y, cfg) for x, y in pts]
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            cells = list(pool.map(_cell, jobs, chunksize=max(1, len(jobs) // (4 * workers))))
    else:
        cells = [_cell(j) for j in jobs]
    return BasinGrid(tuple(x_range), tuple(y_range), nx, ny, cells)


# orbit comparison ---------------------------------------------------------------


def orbit_deviation(raw: Trajectory, comp: Trajectory, chunk: int = 256) -> float:
    """Largest distance from a raw-trajectory disc sample to the compactified
    trajectory's disc polyline.

    When the compactified run converged, its polyline is closed off at the
    limit equilibrium: integration stops at the capture radius, while a raw
    orbit may get closer before it terminates.
    """
    if len(raw) == 0 or len(comp) == 0:
        raise EmptyTrajectoryError("orbit_deviation needs two nonempty trajectories")
    pts = np.asarray(raw.disc, dtype=float)
    poly = np.asarray(comp.disc, dtype=float)
    om = comp.omega
    if om is not None and om.verdict is Verdict.CONVERGED and comp is not raw:
        poly = np.vstack([poly, om.target_disc.as_tuple()])
    if len(poly) == 1:
        return float(np.max(np.linalg.norm(pts - poly[0], axis=1)))
    a, b = poly[:-1], poly[1:]
    ab = b - a
    L2 = np.einsum("ij,ij->i", ab, ab)
    L2 = np.where(L2 == 0, 1.0, L2)
    worst = 0.0
    for s in range(0, len(pts), chunk):
        p = pts[s:s + chunk, None, :]
        t = np.clip(np.einsum("nmj,mj->nm", p - a[None], ab) / L2[None], 0.0, 1.0)
        proj = a[None] + t[..., None] * ab[None]
        d = np.sqrt(np.min(np.sum((p - proj) ** 2, axis=-1), axis=1))
        worst = max(worst, float(d.max()))
    return worst
