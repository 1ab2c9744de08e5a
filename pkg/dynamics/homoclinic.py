"""
Homoclinic loops of saddle-foci located by shooting plus bisection, and
homoclinic-attractor diagnostics from the attractor-to-saddle distance.
"""
import logging
from dataclasses import dataclass, field

import numpy as np

from .chaos import CHAOTIC, DIVERGED, AttractorClass, classify_attractor, lyapunov_flow, lyapunov_map
from .cycles import unstable_plane_offset
from .equilibria import SADDLE_FOCUS_12, SADDLE_FOCUS_21, Equilibrium, Located, _bisect, tracked_equilibrium
from .exceptions import NotFound, PreconditionError
from .integrate import ESCAPED, IntegratorConfig, integrate, iterate_map
from .manifolds import BALL_RADIUS, STABLE, UNSTABLE, _one_dimensional_direction, eigenvector, track_separatrix
from .systems import FLOW

logger = logging.getLogger(__name__)

THRESHOLD = 1e-2
TRANSIENT = 1e4
SAMPLES = 1_000_000
CLASSIFY_TAIL = 4000
RETURN_RADIUS = 0.5
SHOOT_TIME = 2e3
CHUNK = 100_000
LOOP_THRESHOLD = 2e-3
LOOP_TRANSIENT = 2e3
LOOP_SAMPLES = 200_000
LOOP_METHODS = ('auto', 'separatrix', 'distance')


@dataclass
class AttractorDistance:
    d_min: float
    status: str
    samples: int
    endpoint: np.ndarray = field(default=None, repr=False)

    @property
    def diverged(self):
        return self.status == ESCAPED


@dataclass
class HomoclinicDiagnostic:
    params: dict
    d_min: float
    attractor: AttractorClass
    homoclinic_attractor: bool
    orientation: int = None
    exponents: list = None


def _saddle_state(system, params, saddle):
    if saddle is None:
        return tracked_equilibrium(system, params).state
    if isinstance(saddle, Equilibrium):
        return saddle.state
    return np.asarray(saddle, dtype=float)


def _map_distance(system, params, x, center, n_samples):
    d_min = np.inf
    done = 0
    while done < n_samples:
        n = min(CHUNK, n_samples - done)
        sample = iterate_map(system, x, params, n)
        d = np.linalg.norm(sample.y[1:] - center, axis=1)
        if sample.status == ESCAPED:
            return AttractorDistance(np.inf, ESCAPED, done, sample.y[-1])
        d_min = min(d_min, float(d.min()))
        x = sample.y[-1]
        done += n
    return AttractorDistance(d_min, 'ok', done, x)


def attractor_distance(system, params, saddle=None, transient=TRANSIENT, n_samples=SAMPLES, x0=None):
    """Minimum distance to the saddle over post-transient orbit samples."""
    center = _saddle_state(system, params, saddle)
    if x0 is None:
        x0 = center + unstable_plane_offset(system, params, center)
    n_samples = int(n_samples)

    if system.kind != FLOW:
        warm = iterate_map(system, x0, params, int(transient), keep=False)
        if warm.status == ESCAPED:
            return AttractorDistance(np.inf, ESCAPED, 0, warm.y[-1])
        return _map_distance(system, params, warm.y[-1], center, n_samples)

    cfg = IntegratorConfig.for_system(system, params, sweep=True)
    warm = integrate(system, x0, params, transient, cfg, record=False)
    if warm.status == ESCAPED:
        return AttractorDistance(np.inf, ESCAPED, 0, warm.final)
    tally = {'d_min': np.inf, 'n': 0}

    def observer(t, y):
        tally['d_min'] = min(tally['d_min'], float(np.linalg.norm(y[:3] - center)))
        tally['n'] += 1
        return tally['n'] >= n_samples

    run = integrate(system, warm.final, params, np.inf, cfg, observer=observer, record=False)
    if run.status == ESCAPED:
        return AttractorDistance(np.inf, ESCAPED, tally['n'], run.final)
    return AttractorDistance(tally['d_min'], 'ok', tally['n'], run.final)


def _require(eq, tag, varying, value):
    if eq.cls.tag != tag:
        raise PreconditionError(f'Tracked equilibrium is {eq.cls.tag}, not {tag}, at {varying}={value:.8g}')


def _binary_locate(score, lo, hi, tol, label, guess):
    f_lo, warm = score(lo, guess)
    f_hi, _ = score(hi, warm)
    if (f_lo > 0) == (f_hi > 0):
        return None
    return _bisect(score, lo, hi, f_lo, tol, label, warm)


def locate_homoclinic_12(system, params, varying, bounds, tol=1e-4, side=None,
                         ball_radius=BALL_RADIUS, guess=None, method='auto',
                         threshold=LOOP_THRESHOLD, transient=LOOP_TRANSIENT, n_samples=LOOP_SAMPLES):
    """
    Value where the one-dimensional stable separatrix of the tracked
    saddle-focus closes into a loop.

    ``separatrix`` bisects on whether the separatrix, traced backward,
    leaves the box or stays inside it. ``distance`` bisects on whether the
    attractor passes within ``threshold`` of the saddle-focus, which is
    how the loop shows when the separatrix leaves the box on both sides of
    it. ``auto`` tries the separatrix first.
    """
    if system.kind != FLOW:
        raise PreconditionError(f'{system.name} is not a flow')
    if method not in LOOP_METHODS:
        raise PreconditionError(f'Unknown method {method!r}, expected one of {", ".join(LOOP_METHODS)}')

    def scorer(s):
        def score(value, state):
            p = params.replace(**{varying: value})
            eq = tracked_equilibrium(system, p, state)
            _require(eq, SADDLE_FOCUS_12, varying, value)
            sep = track_separatrix(system, p, eq, STABLE, s, ball_radius=ball_radius)
            return (1.0 if sep.inside else -1.0), eq.state
        return score

    def closeness(value, state):
        p = params.replace(**{varying: value})
        eq = tracked_equilibrium(system, p, state)
        _require(eq, SADDLE_FOCUS_12, varying, value)
        found = attractor_distance(system, p, eq, transient, n_samples)
        logger.debug(f'{system.name}: {varying}={value:.8g} d_min={found.d_min:.3e}')
        return threshold - found.d_min, eq.state

    lo, hi = bounds
    if method != 'distance':
        for s in ((side,) if side else (1, -1)):
            found = _binary_locate(scorer(s), lo, hi, tol, 'homoclinic-12', guess)
            if found is not None:
                value, bracket = found
                logger.info(f'{system.name}: homoclinic (1,2) loop at {varying}={value:.8g} (side {s:+d})')
                return Located('homoclinic-12', value, bracket, details={'side': s, 'method': 'separatrix'})
        if method == 'separatrix':
            raise NotFound(f'Stable separatrix outcome does not change for {varying} in [{lo}, {hi}]',
                           varying=varying, range=[lo, hi])
        logger.info(f'{system.name}: separatrix outcome is constant, bisecting on the attractor distance')

    found = _binary_locate(closeness, lo, hi, tol, 'homoclinic-12', guess)
    if found is None:
        raise NotFound(f'Neither the separatrix outcome nor the attractor distance changes '
                       f'for {varying} in [{lo}, {hi}]', varying=varying, range=[lo, hi])
    value, bracket = found
    logger.info(f'{system.name}: homoclinic (1,2) loop at {varying}={value:.8g} (attractor distance)')
    return Located('homoclinic-12', value, bracket, details={'method': 'distance', 'threshold': threshold})


def _return_split(system, params, eq, side, ball_radius, max_time):
    """
    Signed component along the unstable direction at the separatrix's first
    return inside ``ball_radius`` of the equilibrium; the global closest
    approach if it never returns.
    """
    value = _one_dimensional_direction(eq, UNSTABLE)
    vec = eigenvector(system, params, eq, value)
    w, left = np.linalg.eig(system.jac(eq.state, params).T)
    ell = left[:, int(np.argmin(np.abs(w - value)))].real
    ell = ell / np.dot(ell, vec)
    start = eq.state + side * 1e-5 * vec
    lo, hi = system.box_lo, system.box_hi
    track = {'armed': False, 'prev': np.inf, 'prev_x': start, 'best': np.inf, 'best_x': start, 'hit': None}

    def observer(t, y):
        x = y[:3]
        if np.any(x < lo) or np.any(x > hi):
            return True
        dist = float(np.linalg.norm(x - eq.state))
        if not track['armed']:
            track['armed'] = dist > ball_radius
            return False
        if dist < track['best']:
            track['best'], track['best_x'] = dist, x.copy()
        if track['prev'] < ball_radius and dist > track['prev']:
            track['hit'] = track['prev_x']
            return True
        track['prev'], track['prev_x'] = dist, x.copy()
        return False

    cfg = IntegratorConfig.for_system(system, params, rtol=1e-10, atol=1e-13)
    integrate(system, start, params, max_time, cfg, observer=observer, record=False)
    point = track['hit'] if track['hit'] is not None else track['best_x']
    return side * float(np.dot(ell, point - eq.state))


def locate_homoclinic_21(system, params, varying, bounds, tol=1e-4, side=1,
                         ball_radius=RETURN_RADIUS, guess=None, max_time=SHOOT_TIME):
    """
    Value where the one-dimensional unstable separatrix of a (2,1)
    saddle-focus returns to it: the side of the unstable direction on which
    the separatrix passes the equilibrium changes sign there.
    """
    if system.kind != FLOW:
        raise PreconditionError(f'{system.name} is not a flow')
    if guess is None:
        guess = np.zeros(3)

    def score(value, state):
        p = params.replace(**{varying: value})
        eq = tracked_equilibrium(system, p, state)
        _require(eq, SADDLE_FOCUS_21, varying, value)
        return _return_split(system, p, eq, side, ball_radius, max_time), eq.state

    lo, hi = bounds
    found = _binary_locate(score, lo, hi, tol, 'homoclinic-21', guess)
    if found is None:
        raise NotFound(f'Unstable separatrix does not switch sides for {varying} in [{lo}, {hi}]',
                       varying=varying, range=[lo, hi])
    value, bracket = found
    logger.info(f'{system.name}: homoclinic (2,1) loop at {varying}={value:.8g}')
    return Located('homoclinic-21', value, bracket, details={'side': side})


def detect_shilnikov_attractor(system, params, saddle=None, threshold=THRESHOLD,
                               transient=TRANSIENT, n_samples=SAMPLES, horizon=None, iterates=None):
    """Chaotic attractor that passes within threshold of the saddle-focus."""
    eq = saddle if isinstance(saddle, Equilibrium) else tracked_equilibrium(system, params, saddle)
    if eq.cls.tag != SADDLE_FOCUS_12:
        raise PreconditionError(f'Saddle is {eq.cls.tag}, not {SADDLE_FOCUS_12}')
    distance = attractor_distance(system, params, eq, transient, n_samples)
    values = params.as_dict()
    if distance.diverged:
        return HomoclinicDiagnostic(values, distance.d_min, AttractorClass(DIVERGED, {'status': ESCAPED}),
                                    False, eq.cls.orientation)

    start = distance.endpoint
    if system.kind == FLOW:
        exponents = lyapunov_flow(system, params, start, horizon=horizon)
        orbit = None
    else:
        exponents = lyapunov_map(system, params, start, iterates=iterates)
        orbit = iterate_map(system, start, params, CLASSIFY_TAIL).y
    attractor = classify_attractor(system, params, orbit, exponents)
    flag = attractor.tag == CHAOTIC and distance.d_min < threshold
    logger.info(f'{system.name}: d_min={distance.d_min:.3e} class={attractor.tag} homoclinic={flag}')
    return HomoclinicDiagnostic(values, distance.d_min, attractor, flag, eq.cls.orientation,
                                [float(v) for v in exponents.exponents])
