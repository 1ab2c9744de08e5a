"""
One-dimensional separatrices and two-dimensional unstable manifolds of
saddle-foci, the latter grown as a fan of trajectories.
"""
import logging
from dataclasses import dataclass

import numpy as np

from .equilibria import SADDLE, SADDLE_FOCUS_12, SADDLE_FOCUS_21
from .exceptions import PreconditionError
from .integrate import ESCAPED, IntegratorConfig, integrate
from .systems import FLOW, get_system
from .workers import map_ordered

logger = logging.getLogger(__name__)

STABLE = 'stable'
UNSTABLE = 'unstable'

LEFT_BOX = 'left-box'
ENTERED_BALL = 'entered-ball'
ARC_CAP = 'arc-cap'
TIME_LIMIT = 'time-limit'

DELTA = 1e-5
BALL_RADIUS = 1e-2
ARC_CAP_LENGTH = 1e4
MAX_TIME = 1e5


@dataclass
class Separatrix1D:
    side: int
    direction: str
    points: np.ndarray
    status: str
    arc_length: float

    @property
    def inside(self):
        """Outcome used by homoclinic shooting: stayed in the box."""
        return self.status in (ENTERED_BALL, ARC_CAP, TIME_LIMIT)


@dataclass
class Manifold2D:
    rings: list
    horizon: float
    delta: float
    seeds: np.ndarray

    @property
    def count(self):
        return len(self.rings)


def _one_dimensional_direction(eq, which):
    """Real eigenvector spanning the 1D stable or unstable subspace."""
    values = list(eq.spectrum)
    if which == STABLE:
        picked = [v for v in values if v.real < 0]
        allowed = (SADDLE_FOCUS_12, SADDLE)
    else:
        picked = [v for v in values if v.real > 0]
        allowed = (SADDLE_FOCUS_21, SADDLE)
    if eq.cls.tag not in allowed or len(picked) != 1:
        raise PreconditionError(
            f'{eq.cls.tag} has no one-dimensional {which} manifold'
        )
    return picked[0].real


def eigenvector(system, params, eq, value):
    jac = system.jac(eq.state, params)
    w, v = np.linalg.eig(jac)
    i = int(np.argmin(np.abs(w - value)))
    vec = v[:, i].real
    vec = vec / np.linalg.norm(vec)
    # deterministic orientation: largest component positive
    if vec[int(np.argmax(np.abs(vec)))] < 0:
        vec = -vec
    return vec


def track_separatrix(system, params, eq, which=STABLE, side=1, delta=DELTA, box=None,
                     ball_radius=BALL_RADIUS, cap=ARC_CAP_LENGTH, config=None, max_time=MAX_TIME):
    """
    Follow a one-dimensional separatrix (backward time for the stable one)
    until it leaves the box, returns into the ball around the equilibrium
    after first leaving twice its radius, or exceeds the arc-length cap.
    """
    if system.kind != FLOW:
        raise PreconditionError(f'{system.name} is not a flow')
    value = _one_dimensional_direction(eq, which)
    vec = eigenvector(system, params, eq, value)
    start = eq.state + side * delta * vec
    lo, hi = (np.asarray(b, dtype=float) for b in (box or system.box))
    center = eq.state
    state = {'arc': 0.0, 'prev': start, 'armed': False, 'status': None}

    def observer(t, y):
        x = y[:3]
        state['arc'] += float(np.linalg.norm(x - state['prev']))
        state['prev'] = x
        if np.any(x < lo) or np.any(x > hi):
            state['status'] = LEFT_BOX
            return True
        dist = float(np.linalg.norm(x - center))
        if not state['armed'] and dist > 2.0 * ball_radius:
            state['armed'] = True
        elif state['armed'] and dist < ball_radius:
            state['status'] = ENTERED_BALL
            return True
        if state['arc'] > cap:
            state['status'] = ARC_CAP
            return True
        return False

    cfg = config or IntegratorConfig.for_system(system, params, rtol=1e-10, atol=1e-13)
    t_span = -max_time if which == STABLE else max_time
    run = integrate(system, start, params, t_span, cfg, observer=observer)
    status = state['status']
    if status is None:
        status = LEFT_BOX if run.status == ESCAPED else TIME_LIMIT
    logger.debug(f'{which} separatrix side {side:+d}: {status} after arc {state["arc"]:.4g}')
    return Separatrix1D(side, which, run.states, status, state['arc'])


def unstable_plane(system, params, eq):
    """Orthonormal basis of the complex pair's eigenplane with positive real part."""
    if eq.cls.tag != SADDLE_FOCUS_12:
        raise PreconditionError(f'{eq.cls.tag} has no two-dimensional unstable manifold')
    pair = eq.spectrum.complex_pair
    w, v = np.linalg.eig(system.jac(eq.state, params))
    i = int(np.argmin(np.abs(w - pair[0])))
    e1 = v[:, i].real
    e1 = e1 / np.linalg.norm(e1)
    e2 = v[:, i].imag
    e2 = e2 - np.dot(e2, e1) * e1
    e2 = e2 / np.linalg.norm(e2)
    return e1, e2


def _fan_trajectory(task):
    name, values, seed, horizon, rtol = task
    system = get_system(name)
    params = system.params(values)
    cfg = IntegratorConfig.for_system(system, params, rtol=rtol)
    return integrate(system, seed, params, horizon, cfg)


def grow_unstable_surface(system, params, eq, n=32, delta=1e-3, horizon=600.0, rtol=1e-8, jobs=1):
    """Fan of trajectories seeded on a circle of radius delta in the unstable eigenplane."""
    if n < 16:
        raise PreconditionError('A fan needs at least 16 trajectories')
    e1, e2 = unstable_plane(system, params, eq)
    angles = 2.0 * np.pi * np.arange(n) / n
    seeds = np.array([eq.state + delta * (np.cos(a) * e1 + np.sin(a) * e2) for a in angles])
    tasks = [(system.name, params.as_dict(), seed, horizon, rtol) for seed in seeds]
    if jobs > 1:
        runs = map_ordered(_fan_trajectory, tasks, jobs)
    else:
        cfg = IntegratorConfig.for_system(system, params, rtol=rtol)
        runs = [integrate(system, seed, params, horizon, cfg) for seed in seeds]
    logger.info(f'{system.name}: grew {n}-trajectory fan to t={horizon}')
    return Manifold2D(runs, horizon, delta, seeds)


