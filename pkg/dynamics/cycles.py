"""
Periodic orbits: Poincare-section Newton refinement, Floquet multipliers,
continuation in one parameter, node-focus and period-doubling location, and
multipliers of periodic points of maps.
"""
import logging
import math
from dataclasses import dataclass, field

import numpy as np

from .equilibria import Located, _bisect, eigenvalues_3x3, locate_hopf, tracked_equilibrium
from .exceptions import NotFound, PreconditionError, SectionError
from .integrate import (
    ESCAPED, EVENT, EventSpec, IntegratorConfig, augmented_field, integrate, solve,
)
from .systems import FLOW, MAP

logger = logging.getLogger(__name__)

STALL_FACTOR = 100.0
NEWTON_MAX_ITER = 30
CONTINUATION_SUBSTEPS = 20
CRITICALITY_PERIODS = 200
TUBE_RADIUS = 0.5
BRANCH_STEP = 5e-3
MIN_BRANCH_STEP = 1e-5
HOPF_TRANSIENT = 2e3
HOPF_SEED_OFFSET = 1e-2


@dataclass
class PeriodicOrbit:
    anchor: np.ndarray
    period: float
    multipliers: tuple
    trivial_multiplier: complex
    section: EventSpec
    residual: float
    crossings: int = 1
    points: np.ndarray = field(default=None, repr=False)
    section_jacobian: np.ndarray = field(default=None, repr=False)

    @property
    def stability(self):
        moduli = [abs(r) for r in self.multipliers]
        if all(m < 1.0 for m in moduli):
            return 'stable'
        if all(m > 1.0 for m in moduli):
            return 'unstable'
        return 'saddle'

    @property
    def focal(self):
        return abs(self.multipliers[0].imag) > 1e-12

    @property
    def discriminant(self):
        r1, r2 = self.multipliers
        tr = (r1 + r2).real
        det = (r1 * r2).real
        return tr * tr - 4.0 * det


def default_section(system, params, point):
    """Plane through point with normal along the flow there."""
    f = system.rhs(np.asarray(point, dtype=float), params)
    norm = np.linalg.norm(f)
    if norm == 0:
        raise SectionError('Flow vanishes at the section point')
    return EventSpec(point, f / norm, direction=1, terminal=True)


def _plane_basis(normal):
    n = normal / np.linalg.norm(normal)
    a = np.eye(3)[int(np.argmin(np.abs(n)))]
    e1 = a - np.dot(a, n) * n
    e1 /= np.linalg.norm(e1)
    e2 = np.cross(n, e1)
    return np.column_stack([e1, e2])


def _cycle_config(system, params, config):
    return config or IntegratorConfig.for_system(system, params, rtol=1e-11, atol=1e-13)


def poincare_return(system, params, x, section, crossings=1, config=None, t_max=500.0):
    """k-th return to the section with the fundamental matrix along the way."""
    cfg = _cycle_config(system, params, config)
    fun = augmented_field(system, params)
    u = np.concatenate([np.asarray(x, dtype=float), np.eye(3).ravel(order='F')])
    event = EventSpec(section.point, section.normal, direction=1, terminal=True)
    elapsed = 0.0
    points = []
    for _ in range(crossings):
        run = solve(fun, u, t_max, cfg, events=(event,), record=False)
        if run.status != EVENT:
            raise NotFound(f'No return to section within t={t_max} (status {run.status})')
        u = run.y[-1]
        elapsed += run.t[-1]
        points.append(u[:3].copy())
    return u[:3].copy(), u[3:].reshape(3, 3, order='F'), elapsed, np.array(points)


def _section_derivative(system, params, p, phi, normal):
    f = system.rhs(p, params)
    nf = float(np.dot(normal, f))
    if abs(nf) < 1e-6 * np.linalg.norm(f):
        raise SectionError('Orbit crosses the section tangentially')
    return (np.eye(3) - np.outer(f, normal) / nf) @ phi


def refine_cycle(system, guess, params, section=None, crossings=1, config=None, t_max=500.0, tol=None):
    """
    Newton on the Poincare return map restricted to the section plane.

    Converged when the return residual drops below ``tol`` (the system's
    cycle tolerance by default), or when it stalls within STALL_FACTOR of it.
    """
    if system.kind != FLOW:
        raise PreconditionError(f'{system.name} is not a flow')
    tol = system.cycle_tol if tol is None else tol
    guess = np.asarray(guess, dtype=float)
    section = section or default_section(system, params, guess)
    normal = section.normal / np.linalg.norm(section.normal)
    basis = _plane_basis(normal)
    u = basis.T @ (guess - section.point)

    residual = previous = np.inf
    for iteration in range(NEWTON_MAX_ITER):
        x = section.point + basis @ u
        p, phi, period, points = poincare_return(system, params, x, section, crossings, config, t_max)
        dp = _section_derivative(system, params, p, phi, normal)
        m = basis.T @ dp @ basis
        residual = float(np.linalg.norm(p - x))
        logger.debug(f'refine_cycle iter {iteration}: residual={residual:.3e} T={period:.8g}')
        if residual < tol or (residual < STALL_FACTOR * tol and residual > 0.5 * previous):
            break
        previous = residual
        try:
            du = np.linalg.solve(m - np.eye(2), -(basis.T @ (p - section.point) - u))
        except np.linalg.LinAlgError:
            raise NotFound('Singular Newton system on the section')
        if not np.all(np.isfinite(du)) or np.linalg.norm(du) > 1.0:
            raise NotFound(f'Cycle Newton diverged (step {np.linalg.norm(du):.3g})')
        u = u + du
    else:
        raise NotFound(f'Cycle Newton did not converge (residual {residual:.3e})')

    rho = np.linalg.eigvals(m)
    rho = tuple(sorted((complex(r) for r in rho), key=lambda r: (-abs(r), -r.imag)))
    if abs(rho[0].imag) > 1e-12:
        rho = (complex(rho[0].real, abs(rho[0].imag)), complex(rho[0].real, -abs(rho[0].imag)))
    floquet = eigenvalues_3x3(phi, kind=MAP)
    trivial = min(floquet, key=lambda v: abs(v - 1.0))
    return PeriodicOrbit(x, period, rho, trivial, section, residual, crossings, points, m)


def cycle_seed(system, params, x0=None, transient=500.0, config=None):
    """Endpoint of a transient started near the tracked saddle-focus."""
    if x0 is None:
        eq = tracked_equilibrium(system, params)
        x0 = eq.state + unstable_plane_offset(system, params, eq.state)
    cfg = config or IntegratorConfig.for_system(system, params, sweep=True)
    run = integrate(system, x0, params, transient, cfg, record=False)
    if run.status == ESCAPED:
        raise NotFound('Transient escaped before reaching a cycle')
    return run.final[:3]


def unstable_plane_offset(system, params, state, offset=1e-4):
    """Offset along the real direction of the complex pair's eigenvector."""
    w, v = np.linalg.eig(system.jac(state, params))
    if system.kind == MAP:
        order = np.argsort(-np.abs(w))
    else:
        order = np.argsort(-w.real)
    vec = v[:, order[0]].real
    if np.linalg.norm(vec) == 0:
        vec = v[:, order[0]].imag
    return offset * vec / np.linalg.norm(vec)


def continue_cycle(system, params, varying, values, orbit):
    """Warm-started refinement along a parameter grid."""
    branch = []
    for value in values:
        p = params.replace(**{varying: value})
        orbit = refine_cycle(system, orbit.anchor, p, crossings=orbit.crossings,
                             t_max=max(10.0, 3.0 * orbit.period))
        branch.append(orbit)
    return branch


def follow_branch(system, params, varying, start, target, orbit, max_step=BRANCH_STEP):
    """
    Continue a cycle from varying=start to varying=target, halving the step
    whenever refinement fails.
    """
    value = start
    step = math.copysign(max_step, target - start)
    while (target - value) * step > 0:
        nxt = target if abs(target - value) < abs(step) else value + step
        try:
            orbit = refine_cycle(system, orbit.anchor, params.replace(**{varying: nxt}),
                                 crossings=orbit.crossings, t_max=max(10.0, 3.0 * orbit.period))
        except (NotFound, SectionError) as exc:
            step /= 2.0
            if abs(step) < MIN_BRANCH_STEP:
                raise NotFound(f'Cycle branch lost near {varying}={value:.8g}: {exc}',
                               varying=varying, range=[start, target])
            continue
        value = nxt
        step = math.copysign(min(2.0 * abs(step), max_step), step)
    return orbit


def hopf_born_cycle(system, params, varying, target):
    """
    The small cycle born at the Andronov-Hopf value of the tracked
    equilibrium, seeded just past it and continued to varying=target.
    """
    branch = system.hopf_branch.get(varying)
    if branch is None:
        raise PreconditionError(f'{system.name} has no registered Hopf branch in {varying}')
    hopf = locate_hopf(system, params, varying, branch['bounds'])
    start = hopf.value + math.copysign(branch['offset'], target - hopf.value)
    p = params.replace(**{varying: start})
    eq = tracked_equilibrium(system, p)
    pair = eq.spectrum.complex_pair
    growth = pair[0].real if pair is not None else 0.0
    if growth <= 0:
        raise NotFound(f'No unstable focus to seed from at {varying}={start:.8g}', varying=varying)
    seed = cycle_seed(system, p, x0=eq.state + unstable_plane_offset(system, p, eq.state, HOPF_SEED_OFFSET),
                      transient=min(HOPF_TRANSIENT, 30.0 / growth))
    orbit = refine_cycle(system, seed, p)
    logger.info(f'{system.name}: Hopf-born cycle at {varying}={start:.8g}, T={orbit.period:.6g}')
    return follow_branch(system, params, varying, start, target, orbit)


def _warm_orbit(system, params, varying, start, orbit, crossings):
    if orbit is not None:
        return orbit
    if crossings == 1 and varying in system.hopf_branch:
        return hopf_born_cycle(system, params, varying, start)
    p = params.replace(**{varying: start})
    return refine_cycle(system, cycle_seed(system, p), p, crossings=crossings)


def _locate_on_cycle(system, params, varying, bounds, tol, orbit, crossings, score_fn, label):
    lo, hi = bounds
    orbit = _warm_orbit(system, params, varying, lo, orbit, crossings)
    grid = np.linspace(lo, hi, CONTINUATION_SUBSTEPS + 1)
    branch = continue_cycle(system, params, varying, grid, orbit)
    scores = [score_fn(o) for o in branch]
    for i in range(CONTINUATION_SUBSTEPS):
        if (scores[i] > 0) != (scores[i + 1] > 0):
            break
    else:
        raise NotFound(f'No {label} for {varying} in [{lo}, {hi}]', varying=varying, range=[lo, hi])

    def score(value, warm):
        p = params.replace(**{varying: value})
        o = refine_cycle(system, warm.anchor, p, crossings=warm.crossings,
                         t_max=max(10.0, 3.0 * warm.period))
        return score_fn(o), o

    value, bracket = _bisect(score, grid[i], grid[i + 1], scores[i], tol, label, branch[i])
    logger.info(f'{system.name}: {label} at {varying}={value:.8g}')
    return value, bracket, branch[i], branch[i + 1]


def locate_node_focus_transition(system, params, varying, bounds, tol=1e-4, orbit=None, crossings=1):
    """Multipliers turn from real-distinct to complex: discriminant sign change."""
    value, bracket, _, _ = _locate_on_cycle(
        system, params, varying, bounds, tol, orbit, crossings,
        lambda o: o.discriminant, 'node-focus',
    )
    return Located('node-focus', value, bracket)


def _flip_score(orbit):
    if orbit.focal:
        return 1.0 + abs(orbit.multipliers[0])
    return min(r.real for r in orbit.multipliers) + 1.0


def locate_period_doubling(system, params, varying, bounds, tol=1e-4, orbit=None, crossings=1):
    """Real multiplier through -1, with criticality decided by simulation."""
    value, bracket, left, right = _locate_on_cycle(
        system, params, varying, bounds, tol, orbit, crossings, _flip_score, 'period-doubling',
    )
    past = bracket[1] if _flip_score(right) < 0 else bracket[0]
    unstable_side = right if _flip_score(right) < 0 else left
    offset = max(10 * tol, 1e-3)
    beyond = past + offset if past == bracket[1] else past - offset
    tag, evidence = period_doubling_criticality(system, params.replace(**{varying: beyond}),
                                                unstable_side)
    return Located('period-doubling', value, bracket, tag=tag,
                   details={'tested_at': beyond, **evidence})


def period_doubling_criticality(system, params, orbit):
    """
    Supercritical if an orbit started on the destabilized cycle settles onto a
    stable doubled cycle nearby; subcritical if it leaves the tube around the
    cycle or no doubled cycle can be refined.
    """
    try:
        cycle = refine_cycle(system, orbit.anchor, params, crossings=orbit.crossings,
                             t_max=max(10.0, 3.0 * orbit.period))
    except NotFound:
        cycle = orbit
    normal = cycle.section.normal / np.linalg.norm(cycle.section.normal)
    basis = _plane_basis(normal)
    w, v = np.linalg.eig(cycle.section_jacobian)
    flip = basis @ v[:, int(np.argmin(w.real))].real
    start = cycle.anchor + 1e-2 * flip / np.linalg.norm(flip)
    loop = sample_cycle(system, params, cycle)

    cfg = IntegratorConfig.for_system(system, params, rtol=1e-10, atol=1e-12)

    def observer(t, y):
        return float(np.min(np.linalg.norm(loop - y[:3], axis=1))) > TUBE_RADIUS

    run = integrate(system, start, params, CRITICALITY_PERIODS * cycle.period, cfg,
                    observer=observer, record=False)
    evidence = {'run_status': run.status}
    if run.status in ('stopped', ESCAPED):
        evidence['left_tube'] = True
        return 'subcritical', evidence

    end = run.final[:3]
    try:
        doubled = refine_cycle(system, end, params, crossings=2 * cycle.crossings,
                               t_max=max(10.0, 3.0 * cycle.period))
    except (NotFound, SectionError):
        evidence['doubled_cycle'] = None
        return 'subcritical', evidence
    split = float(np.linalg.norm(doubled.points[cycle.crossings - 1] - doubled.points[-1]))
    near = float(np.min(np.linalg.norm(loop - doubled.anchor, axis=1)))
    evidence.update({'doubled_period': doubled.period, 'split': split,
                     'doubled_stability': doubled.stability})
    if doubled.stability == 'stable' and split > 1e-6 and near < TUBE_RADIUS:
        return 'supercritical', evidence
    return 'subcritical', evidence


def sample_cycle(system, params, cycle, samples=400):
    """Points spread along one period of the cycle."""
    cfg = IntegratorConfig.for_system(system, params, rtol=1e-9)
    run = integrate(system, cycle.anchor, params, cycle.period, cfg, dense_output=True)
    ts = np.linspace(0.0, cycle.period, samples)
    return np.array([run.interpolate(t)[:3] for t in ts])


def map_cycle_multipliers(system, point, period, params, tol=1e-9):
    """Spectrum of D(T^k) along a period-k orbit."""
    if system.kind != MAP:
        raise PreconditionError(f'{system.name} is not a map')
    x = np.asarray(point, dtype=float)
    product = np.eye(3)
    y = x
    for _ in range(period):
        product = system.jac(y, params) @ product
        y = system.rhs(y, params)
    residual = float(np.linalg.norm(y - x))
    if residual > tol:
        raise PreconditionError(f'Not a periodic point of period {period} (residual {residual:.3e})')
    return eigenvalues_3x3(product, kind=MAP)
