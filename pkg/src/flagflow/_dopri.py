"""Dormand-Prince 5(4) stepper for planar systems, with 4th-order dense output.

Written for two scalar states so that each stage is a plain function call; this
is several times faster than going through numpy arrays for 2-vectors.
"""

from __future__ import annotations

import math

from .errors import StepUnderflowError

C = (0.0, 1 / 5, 3 / 10, 4 / 5, 8 / 9, 1.0, 1.0)
A21 = 1 / 5
A31, A32 = 3 / 40, 9 / 40
A41, A42, A43 = 44 / 45, -56 / 15, 32 / 9
A51, A52, A53, A54 = 19372 / 6561, -25360 / 2187, 64448 / 6561, -212 / 729
A61, A62, A63, A64, A65 = 9017 / 3168, -355 / 33, 46732 / 5247, 49 / 176, -5103 / 18656
B1, B3, B4, B5, B6 = 35 / 384, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84
# fifth minus embedded fourth order weights
E = (-71 / 57600, 0.0, 71 / 16695, -71 / 1920, 17253 / 339200, -22 / 525, 1 / 40)

# continuous extension: y(t + th*h) = y + h * sum_i K_i * sum_j P[i][j] th^(j+1)
P = (
    (1.0, -8048581381 / 2820520608, 8663915743 / 2820520608, -12715105075 / 11282082432),
    (0.0, 0.0, 0.0, 0.0),
    (0.0, 131558114200 / 32700410799, -68118460800 / 10900136933, 87487479700 / 32700410799),
    (0.0, -1754552775 / 470086768, 14199869525 / 1410260304, -10690763975 / 1880347072),
    (0.0, 127303824393 / 49829197408, -318862633887 / 49829197408, 701980252875 / 199316789632),
    (0.0, -282668133 / 205662961, 2019193451 / 616988883, -1453857185 / 822651844),
    (0.0, 40617522 / 29380423, -110615467 / 29380423, 69997945 / 29380423),
)

SAFETY = 0.9
MIN_FACTOR = 0.2
MAX_FACTOR = 10.0
MIN_STEP = 1e-15


def _finite(*vals) -> bool:
    return all(math.isfinite(v) for v in vals)


def _rms(a: float, b: float) -> float:
    # hypot avoids overflow when squaring large scaled values
    return math.hypot(a, b) / math.sqrt(2)


def _safe(f):
    def g(a, b):
        try:
            return f(a, b)
        except (ZeroDivisionError, OverflowError):
            return math.inf, math.inf

    return g


class Stepper:
    """Adaptive DOPRI5 for ``(a, b)' = f(a, b)``.

    After each `advance` the attributes ``t, a, b, h_last`` and the stage
    derivatives ``K`` describe the accepted step, so `dense` can interpolate
    inside it.
    """

    def __init__(self, f, a: float, b: float, rtol: float, atol: float, t: float = 0.0, h: float | None = None):
        self.f = _safe(f)
        self.rtol, self.atol = rtol, atol
        self.t, self.a, self.b = t, float(a), float(b)
        self.k1 = self.f(self.a, self.b)
        self.h = h if h is not None else self._initial_step()
        self.h_last = 0.0
        self.K = None
        self.prev = (self.a, self.b)
        self.n_accepted = 0
        self.n_rejected = 0

    def reset(self, f, a: float, b: float, h: float | None = None):
        """Continue from ``(a, b)`` with a new right-hand side (chart change)."""
        self.f = _safe(f)
        self.a, self.b = float(a), float(b)
        self.k1 = self.f(self.a, self.b)
        self.h = h if h is not None else self._initial_step()

    def _scale(self, a, b):
        return self.atol + self.rtol * abs(a), self.atol + self.rtol * abs(b)

    def _initial_step(self) -> float:
        # Hairer, Norsett & Wanner, II.4
        f0a, f0b = self.k1
        if not _finite(f0a, f0b):
            return 1e-6
        sa, sb = self._scale(self.a, self.b)
        d0 = _rms(self.a / sa, self.b / sb)
        d1 = _rms(f0a / sa, f0b / sb)
        h0 = 1e-6 if d0 < 1e-5 or d1 < 1e-5 else 0.01 * d0 / d1
        f1a, f1b = self.f(self.a + h0 * f0a, self.b + h0 * f0b)
        if not _finite(f1a, f1b):
            return h0
        d2 = _rms((f1a - f0a) / sa, (f1b - f0b) / sb) / h0
        if max(d1, d2) <= 1e-15:
            h1 = max(1e-6, h0 * 1e-3)
        else:
            h1 = (0.01 / max(d1, d2)) ** 0.2
        return min(100 * h0, h1)

    def _try(self, h):
        f, a, b = self.f, self.a, self.b
        k1a, k1b = self.k1
        k2a, k2b = f(a + h * A21 * k1a, b + h * A21 * k1b)
        k3a, k3b = f(a + h * (A31 * k1a + A32 * k2a), b + h * (A31 * k1b + A32 * k2b))
        k4a, k4b = f(a + h * (A41 * k1a + A42 * k2a + A43 * k3a),
                     b + h * (A41 * k1b + A42 * k2b + A43 * k3b))
        k5a, k5b = f(a + h * (A51 * k1a + A52 * k2a + A53 * k3a + A54 * k4a),
                     b + h * (A51 * k1b + A52 * k2b + A53 * k3b + A54 * k4b))
        k6a, k6b = f(a + h * (A61 * k1a + A62 * k2a + A63 * k3a + A64 * k4a + A65 * k5a),
                     b + h * (A61 * k1b + A62 * k2b + A63 * k3b + A64 * k4b + A65 * k5b))
        na = a + h * (B1 * k1a + B3 * k3a + B4 * k4a + B5 * k5a + B6 * k6a)
        nb = b + h * (B1 * k1b + B3 * k3b + B4 * k4b + B5 * k5b + B6 * k6b)
        k7a, k7b = f(na, nb)
        Ka = (k1a, k2a, k3a, k4a, k5a, k6a, k7a)
        Kb = (k1b, k2b, k3b, k4b, k5b, k6b, k7b)
        ea = h * sum(e * k for e, k in zip(E, Ka))
        eb = h * sum(e * k for e, k in zip(E, Kb))
        if not _finite(na, nb, ea, eb, k7a, k7b):
            return None
        sa = self.atol + self.rtol * max(abs(a), abs(na))
        sb = self.atol + self.rtol * max(abs(b), abs(nb))
        err = _rms(ea / sa, eb / sb)
        return na, nb, err, (Ka, Kb)

    def advance(self, h_max: float = math.inf) -> None:
        """Take one accepted step no longer than `h_max`."""
        h = min(self.h, h_max)
        rejected = False
        while True:
            if h < MIN_STEP:
                raise StepUnderflowError(f"step size {h:.3e} below {MIN_STEP:g} at t = {self.t:.6g}")
            out = self._try(h)
            if out is None:
                self.n_rejected += 1
                rejected = True
                h *= MIN_FACTOR
                continue
            na, nb, err, K = out
            if err <= 1.0:
                break
            self.n_rejected += 1
            rejected = True
            h *= max(MIN_FACTOR, SAFETY * err ** -0.2)
        factor = MAX_FACTOR if err == 0 else min(MAX_FACTOR, SAFETY * err ** -0.2)
        if rejected:
            factor = min(factor, 1.0)
        self.prev = (self.a, self.b)
        self.K = K
        self.h_last = h
        self.t += h
        self.a, self.b = na, nb
        self.k1 = (K[0][6], K[1][6])
        self.h = h * factor
        self.n_accepted += 1

    def dense(self, theta: float) -> tuple[float, float]:
        """State at fraction `theta` in [0, 1] of the last accepted step."""
        powers = (theta, theta**2, theta**3, theta**4)
        Ka, Kb = self.K
        qa = qb = 0.0
        for i in range(7):
            w = sum(p * c for p, c in zip(P[i], powers))
            qa += Ka[i] * w
            qb += Kb[i] * w
        a0, b0 = self.prev
        return a0 + self.h_last * qa, b0 + self.h_last * qb
