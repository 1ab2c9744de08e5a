"""
Adaptive Dormand-Prince 5(4) integration with dense output, plane-crossing
events, tangent-frame propagation, and map iteration.
"""
import bisect
import logging
import math
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import brentq

from .exceptions import DomainError, StiffnessError
from .systems import FLOW, MAP

logger = logging.getLogger(__name__)

# Termination reasons
TIME_REACHED = 'time-reached'
ESCAPED = 'escaped'
EVENT = 'event'
STEP_FAILURE = 'step-failure'
STOPPED = 'stopped'

# Dormand-Prince 5(4) tableau
A21 = 1 / 5
A31, A32 = 3 / 40, 9 / 40
A41, A42, A43 = 44 / 45, -56 / 15, 32 / 9
A51, A52, A53, A54 = 19372 / 6561, -25360 / 2187, 64448 / 6561, -212 / 729
A61, A62, A63, A64, A65 = 9017 / 3168, -355 / 33, 46732 / 5247, 49 / 176, -5103 / 18656
A71, A73, A74, A75, A76 = 35 / 384, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84
E1, E3, E4, E5, E6, E7 = (
    71 / 57600, -71 / 16695, 71 / 1920, -17253 / 339200, 22 / 525, -1 / 40,
)
# dense output weights for the fourth-order continuous extension
D1, D3, D4, D5, D6, D7 = (
    -12715105075 / 11282082432, 87487479700 / 32700410799,
    -10690763975 / 1880347072, 701980252875 / 199316789632,
    -1453857185 / 822651844, 69997945 / 29380423,
)

SAFETY = 0.9
MIN_FACTOR = 0.2
MAX_FACTOR = 10.0


def _settings_default(key, fallback):
    try:
        from django.conf import settings
        if settings.configured:
            return settings.DYNAMICS.get(key, fallback)
    except ImportError:
        pass
    return fallback


@dataclass
class IntegratorConfig:
    rtol: float = 1e-9
    atol: float = 1e-12
    first_step: float = None
    max_step: float = math.inf
    max_steps: int = 2_000_000
    escape_radius: float = 1e3

    def __post_init__(self):
        if self.rtol <= 0 or self.atol <= 0:
            raise DomainError('Tolerances must be positive')
        if self.max_step <= 0:
            raise DomainError('max_step must be positive')
        if self.escape_radius <= 0:
            raise DomainError('escape_radius must be positive')

    @classmethod
    def for_system(cls, system, params, sweep=False, **overrides):
        """Settings defaults with the per-system step cap applied."""
        values = {
            'rtol': _settings_default('SWEEP_RTOL' if sweep else 'RTOL', 1e-7 if sweep else 1e-9),
            'atol': _settings_default('ATOL', 1e-12),
            'max_steps': _settings_default('MAX_STEPS', 2_000_000),
            'escape_radius': _settings_default('ESCAPE_RADIUS', 1e3),
        }
        if system.max_step is not None:
            values['max_step'] = system.max_step(params)
        values.update({k: v for k, v in overrides.items() if v is not None})
        return cls(**values)


@dataclass(frozen=True)
class EventSpec:
    point: np.ndarray
    normal: np.ndarray
    direction: int = 0
    terminal: bool = False

    def __post_init__(self):
        normal = np.asarray(self.normal, dtype=float)
        if not np.any(normal):
            raise DomainError('Event plane normal must be nonzero')
        object.__setattr__(self, 'normal', normal)
        object.__setattr__(self, 'point', np.asarray(self.point, dtype=float))

    def distance(self, state):
        return float(np.dot(self.normal, state[:3] - self.point))

    def crossed(self, g0, g1):
        if g0 < 0.0 <= g1:
            return self.direction >= 0
        if g0 > 0.0 >= g1:
            return self.direction <= 0
        return False


@dataclass
class EventHit:
    t: float
    state: np.ndarray
    index: int


@dataclass
class Trajectory:
    t: np.ndarray
    y: np.ndarray
    status: str
    events: list = field(default_factory=list)
    last_step: float = None
    _steps: list = field(default_factory=list, repr=False)

    @property
    def final(self):
        return self.y[-1]

    @property
    def states(self):
        return self.y[:, :3]

    def interpolate(self, t):
        """Dense-output value at time t; needs dense_output=True."""
        if not self._steps:
            raise DomainError('Trajectory was integrated without dense output')
        starts = [s[0] for s in self._steps]
        forward = self._steps[0][1] > 0
        if forward:
            i = max(0, bisect.bisect_right(starts, t) - 1)
        else:
            neg = [-s for s in starts]
            i = max(0, bisect.bisect_right(neg, -t) - 1)
        t0, h, rcont = self._steps[i]
        return _dense(rcont, (t - t0) / h)

    def rows(self):
        for t, y in zip(self.t, self.y):
            yield (float(t), *(float(v) for v in y[:3]))


@dataclass
class TangentRun:
    trajectory: Trajectory
    times: np.ndarray
    log_stretches: np.ndarray
    frame: np.ndarray

    @property
    def status(self):
        return self.trajectory.status

    def exponents(self, discard=0):
        """Per-time log-stretch averages after dropping the first intervals."""
        logs = self.log_stretches[discard:]
        span = self.times[-1] - (self.times[discard - 1] if discard else 0.0)
        return logs.sum(axis=0) / span


@dataclass
class OrbitSample:
    y: np.ndarray
    status: str

    @property
    def final(self):
        return self.y[-1]


def _dense(rcont, theta):
    r1, r2, r3, r4, r5 = rcont
    theta1 = 1.0 - theta
    return r1 + theta * (r2 + theta1 * (r3 + theta * (r4 + theta1 * r5)))


def _error_norm(err, y0, y1, rtol, atol):
    scale = atol + rtol * np.maximum(np.abs(y0), np.abs(y1))
    return math.sqrt(float(np.mean((err / scale) ** 2)))


def _initial_step(fun, t0, y0, f0, direction, cfg):
    scale = cfg.atol + np.abs(y0) * cfg.rtol
    d0 = math.sqrt(float(np.mean((y0 / scale) ** 2)))
    d1 = math.sqrt(float(np.mean((f0 / scale) ** 2)))
    h0 = 1e-6 if d0 < 1e-5 or d1 < 1e-5 else 0.01 * d0 / d1
    y1 = y0 + direction * h0 * f0
    f1 = fun(y1)
    d2 = math.sqrt(float(np.mean(((f1 - f0) / scale) ** 2))) / h0
    if max(d1, d2) <= 1e-15:
        h1 = max(1e-6, h0 * 1e-3)
    else:
        h1 = (0.01 / max(d1, d2)) ** 0.2
    return min(100 * h0, h1, cfg.max_step)


def solve(fun, y0, t_span, config, t0=0.0, events=(), observer=None,
          record=True, dense_output=False):
    """
    Integrate y' = fun(y) from t0 over a signed duration t_span.

    observer(t, y) is called after every accepted step and stops the run
    when it returns True. Escape is tested on the first three components.
    """
    cfg = config
    y = np.array(y0, dtype=float)
    if not np.all(np.isfinite(y)):
        raise DomainError(f'Initial state is not finite: {y}')
    if t_span == 0:
        raise DomainError('t_span must be nonzero')
    direction = 1.0 if t_span > 0 else -1.0
    t = t0
    t_end = t0 + t_span
    event_tol = 1e-12 * (abs(t_span) if math.isfinite(t_span) else 1.0)

    f = fun(y)
    h = abs(cfg.first_step) if cfg.first_step else _initial_step(fun, t, y, f, direction, cfg)
    ts, ys = [t], [y.copy()]
    steps, hits = [], []
    # a start on the plane is not a crossing
    g_prev = [ev.distance(y) for ev in events]
    g_prev = [0.0 if abs(g) <= 1e-12 * (1.0 + np.linalg.norm(ev.point)) else g
              for g, ev in zip(g_prev, events)]
    status = TIME_REACHED
    n_steps = 0

    while direction * (t_end - t) > 0:
        if n_steps >= cfg.max_steps:
            status = STEP_FAILURE
            logger.warning(f'Max steps ({cfg.max_steps}) reached at t={t:.6g}')
            break
        min_step = 16 * np.spacing(abs(t)) + 1e-14
        remaining = abs(t_end - t)
        if remaining <= min_step:
            break
        h = min(h, cfg.max_step)
        h_step = min(h, remaining)
        while True:
            if h_step < min_step:
                raise StiffnessError(f'Step size underflow at t={t:.6g} (h={h_step:.3g})')
            hs = direction * h_step
            k1 = f
            k2 = fun(y + hs * A21 * k1)
            k3 = fun(y + hs * (A31 * k1 + A32 * k2))
            k4 = fun(y + hs * (A41 * k1 + A42 * k2 + A43 * k3))
            k5 = fun(y + hs * (A51 * k1 + A52 * k2 + A53 * k3 + A54 * k4))
            k6 = fun(y + hs * (A61 * k1 + A62 * k2 + A63 * k3 + A64 * k4 + A65 * k5))
            y_new = y + hs * (A71 * k1 + A73 * k3 + A74 * k4 + A75 * k5 + A76 * k6)
            k7 = fun(y_new)
            err = hs * (E1 * k1 + E3 * k3 + E4 * k4 + E5 * k5 + E6 * k6 + E7 * k7)
            if np.all(np.isfinite(y_new)):
                err_norm = _error_norm(err, y, y_new, cfg.rtol, cfg.atol)
            else:
                err_norm = math.inf
            if err_norm <= 1.0:
                factor = MAX_FACTOR if err_norm == 0 else min(MAX_FACTOR, SAFETY * err_norm ** -0.2)
                break
            h_step *= max(MIN_FACTOR, SAFETY * err_norm ** -0.2) if math.isfinite(err_norm) else MIN_FACTOR
            h = h_step
        n_steps += 1

        need_dense = dense_output or events
        if need_dense:
            r2 = y_new - y
            r3 = hs * k1 - r2
            rcont = (y, r2, r3, r2 - hs * k7 - r3,
                     hs * (D1 * k1 + D3 * k3 + D4 * k4 + D5 * k5 + D6 * k6 + D7 * k7))
            if dense_output:
                steps.append((t, hs, rcont))

        t_new = t_end if h_step >= remaining else t + hs
        stop = False
        for i, ev in enumerate(events):
            g_new = ev.distance(y_new)
            if ev.crossed(g_prev[i], g_new):
                theta = brentq(lambda th: ev.distance(_dense(rcont, th)), 0.0, 1.0,
                               xtol=max(event_tol / h_step, 1e-15), rtol=4 * np.finfo(float).eps)
                hit = EventHit(t + theta * hs, _dense(rcont, theta), i)
                hits.append(hit)
                if ev.terminal:
                    stop = True
                    t_new, y_new = hit.t, hit.state
            g_prev[i] = g_new

        t, y = t_new, y_new
        f = k7 if not stop else fun(y)
        if record:
            ts.append(t)
            ys.append(y.copy())
        h = max(h, h_step * factor) if h_step < h else h_step * factor
        if stop:
            status = EVENT
            break
        if np.linalg.norm(y[:3]) > cfg.escape_radius:
            status = ESCAPED
            break
        if observer is not None and observer(t, y):
            status = STOPPED
            break

    if not record:
        ts.append(t)
        ys.append(y.copy())
    return Trajectory(np.array(ts), np.array(ys), status, hits, direction * h, steps)


def integrate(system, x0, params, t_span, config=None, events=(), observer=None,
              record=True, dense_output=False, t0=0.0):
    """Integrate a registered flow; negative t_span runs the time-reversed field."""
    if system.kind != FLOW:
        raise DomainError(f'{system.name} is not a flow')
    config = config or IntegratorConfig.for_system(system, params)
    rhs = system.rhs
    return solve(lambda s: rhs(s, params), x0, t_span, config, t0=t0, events=events,
                 observer=observer, record=record, dense_output=dense_output)


def augmented_field(system, params):
    """State plus 3x3 tangent frame (column-major flattened) field."""
    rhs, jac = system.rhs, system.jac

    def fun(u):
        x = u[:3]
        frame = u[3:].reshape(3, 3, order='F')
        out = np.empty(12)
        out[:3] = rhs(x, params)
        out[3:] = (jac(x, params) @ frame).ravel(order='F')
        return out

    return fun


def integrate_with_tangents(system, x0, params, t_span, Q0=None, config=None,
                            renorm_interval=1.0, events=(), record=True):
    """
    Propagate v' = J(x(t)) v alongside the state.

    The frame is re-orthonormalized by QR every renorm_interval time units and
    the per-direction log-stretches are accumulated. With renorm_interval=None
    the raw fundamental-matrix product is returned in `frame`. Plane events
    are located inside every interval; a terminal one ends the run after a
    last QR step over the partial interval.
    """
    if system.kind != FLOW:
        raise DomainError(f'{system.name} is not a flow')
    config = config or IntegratorConfig.for_system(system, params)
    frame = np.eye(3) if Q0 is None else np.array(Q0, dtype=float)
    if not np.allclose(frame.T @ frame, np.eye(3), atol=1e-10):
        raise DomainError('Initial tangent frame must be orthonormal')
    fun = augmented_field(system, params)
    u = np.concatenate([np.asarray(x0, dtype=float), frame.ravel(order='F')])

    if renorm_interval is None:
        run = solve(fun, u, t_span, config, events=events, record=record)
        final = run.y[-1]
        return TangentRun(run, np.array([run.t[-1]]), np.zeros((0, 3)),
                          final[3:].reshape(3, 3, order='F'))

    direction = 1.0 if t_span > 0 else -1.0
    n_intervals = max(1, int(round(abs(t_span) / renorm_interval)))
    interval = abs(t_span) / n_intervals
    t = 0.0
    times, logs = [], []
    ts, ys = [0.0], [u[:3].copy()]
    hits = []
    status = TIME_REACHED
    step_cfg = config
    for _ in range(n_intervals):
        run = solve(fun, u, direction * interval, step_cfg, t0=t, events=events, record=False)
        hits.extend(run.events)
        u = run.y[-1].copy()
        t = run.t[-1]
        if run.status not in (TIME_REACHED, EVENT):
            status = run.status
            break
        q, r = np.linalg.qr(u[3:].reshape(3, 3, order='F'))
        signs = np.sign(np.diag(r))
        signs[signs == 0] = 1.0
        q = q * signs
        logs.append(np.log(np.abs(np.diag(r))))
        times.append(abs(t))
        u[3:] = q.ravel(order='F')
        if record:
            ts.append(t)
            ys.append(u[:3].copy())
        if run.status == EVENT:
            status = EVENT
            break
        step_cfg = IntegratorConfig(config.rtol, config.atol, abs(run.last_step),
                                    config.max_step, config.max_steps, config.escape_radius)

    if not record:
        ts.append(t)
        ys.append(u[:3].copy())
    trajectory = Trajectory(np.array(ts), np.array(ys), status, hits)
    return TangentRun(trajectory, np.array(times), np.array(logs).reshape(-1, 3),
                      u[3:].reshape(3, 3, order='F'))


def iterate_map(system, x0, params, n, escape_radius=None, keep=True):
    """Orbit of a registered map; stops early when the state leaves the box."""
    if system.kind != MAP:
        raise DomainError(f'{system.name} is not a map')
    rhs = system.rhs
    lo, hi = system.box_lo, system.box_hi
    radius = escape_radius or _settings_default('ESCAPE_RADIUS', 1e3)
    x = np.array(x0, dtype=float)
    if not np.all(np.isfinite(x)):
        raise DomainError(f'Initial state is not finite: {x}')
    out = [x] if keep else None
    status = TIME_REACHED
    for _ in range(n):
        x = rhs(x, params)
        if not (np.all(np.isfinite(x)) and np.all(x >= lo) and np.all(x <= hi)
                and np.linalg.norm(x) <= radius):
            status = ESCAPED
            if keep:
                out.append(x)
            break
        if keep:
            out.append(x)
    y = np.array(out) if keep else x[None, :]
    return OrbitSample(y, status)
