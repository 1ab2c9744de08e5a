"""
Parameter sweeps, bifurcation-diagram samples, crisis detection and the
staged scenario reports of the shipped presets.
"""
import logging
from dataclasses import dataclass, field

import numpy as np

from . import chaos
from .cycles import locate_node_focus_transition, locate_period_doubling, unstable_plane_offset
from .equilibria import STABLE_FOCUS, STABLE_NODE, Located, _bisect, locate_hopf, locate_ns_and_fold, tracked_equilibrium
from .exceptions import DynamicsError, NotFound, PreconditionError
from .homoclinic import attractor_distance, detect_shilnikov_attractor, locate_homoclinic_12
from .integrate import ESCAPED, EventSpec, IntegratorConfig, integrate, iterate_map
from .manifolds import unstable_plane
from .systems import FLOW, get_system
from .workers import map_ordered

logger = logging.getLogger(__name__)

OBSERVABLES = ('lyapunov', 'distance', 'components', 'diagram')
DIAGRAM_SAMPLES = 200
DIAGRAM_TIME = 500.0
CRISIS_SEEDS = 8
CRISIS_HORIZON = 2e3
CRISIS_OFFSET = 1e-3


@dataclass
class SweepRow:
    value: float
    tag: str = None
    lambda1: float = None
    d_min: float = None
    components: int = None
    samples: list = field(default_factory=list)
    flags: list = field(default_factory=list)

    def as_dict(self):
        return {
            'value': self.value,
            'class': self.tag,
            'lambda1': self.lambda1,
            'd_min': self.d_min,
            'components': self.components,
            'samples': len(self.samples),
            'flags': ';'.join(self.flags),
        }


@dataclass
class SweepOptions:
    horizon: float = None
    iterates: int = None
    distance_samples: int = 100_000
    diagram_samples: int = DIAGRAM_SAMPLES
    tail: int = chaos.CHAIN_SAMPLES


def cold_seed(system, params):
    eq = tracked_equilibrium(system, params)
    return eq.state + unstable_plane_offset(system, params, eq.state)


def _section(system, params):
    """Plane through the tracked equilibrium normal to the y axis, crossed downward."""
    point = system.tracked_guess(params)
    return EventSpec(point, np.array([0.0, 1.0, 0.0]), direction=-1)


def _diagram_samples(system, params, x, options):
    if system.kind == FLOW:
        cfg = IntegratorConfig.for_system(system, params, sweep=True)
        run = integrate(system, x, params, DIAGRAM_TIME, cfg, events=(_section(system, params),), record=False)
        return [float(hit.state[0]) for hit in run.events[:options.diagram_samples]]
    orbit = iterate_map(system, x, params, options.diagram_samples)
    return [float(v) for v in orbit.y[1:, 0]]


def evaluate_point(system, params, x0, observables, options, value=None):
    """Classify the attractor reached from x0 and compute the requested observables."""
    row = SweepRow(value)
    if system.kind == FLOW:
        exponents = chaos.lyapunov_flow(system, params, x0, horizon=options.horizon)
        orbit = None
    else:
        exponents = chaos.lyapunov_map(system, params, x0, iterates=options.iterates)
        orbit = iterate_map(system, exponents.endpoint, params, options.tail).y if not exponents.diverged else None
    attractor = chaos.classify_attractor(system, params, orbit, exponents)
    row.tag = attractor.tag
    endpoint = exponents.endpoint
    if exponents.diverged:
        row.flags.append(ESCAPED)
        return row, None
    if 'lyapunov' in observables:
        row.lambda1 = exponents.leading
    if 'distance' in observables:
        distance = attractor_distance(system, params, None, 0 if system.kind != FLOW else 1.0,
                                      options.distance_samples, x0=endpoint)
        row.d_min = distance.d_min
    if 'components' in observables and attractor.tag == chaos.INVARIANT_CURVE:
        k, closed = chaos.count_curve_components(system, params, orbit)
        row.components = k
        if k is None:
            row.flags.append(chaos.UNRESOLVED)
        elif not all(closed):
            row.flags.append('open-chain')
    if 'diagram' in observables:
        row.samples = _diagram_samples(system, params, endpoint, options)
    return row, endpoint


def _sweep_chunk(task):
    name, values, varying, grid, observables, options = task
    system = get_system(name)
    base = system.params(values)
    rows = []
    warm = None
    for value in grid:
        try:
            p = base.replace(**{varying: value})
            x0 = warm if warm is not None else cold_seed(system, p)
            row, warm = evaluate_point(system, p, x0, observables, options, float(value))
        except DynamicsError as exc:
            row, warm = SweepRow(float(value), flags=[f'{type(exc).__name__}: {exc}']), None
            logger.warning(f'{name}: {varying}={value:.8g} failed: {exc}')
        row.value = float(value)
        rows.append(row)
    return rows


def sweep(system, params, varying, grid, observables=(), jobs=1, options=None):
    """
    One row per grid point, warm-started from the previous point's attractor.
    The grid is split into contiguous chunks, one per worker; chunks restart
    from a cold seed and rows are merged back in grid order.
    """
    grid = np.asarray(grid, dtype=float)
    if grid.size > 1:
        steps = np.diff(grid)
        if not (np.all(steps > 0) or np.all(steps < 0)):
            raise PreconditionError('Sweep grid must be strictly monotone')
    unknown = set(observables) - set(OBSERVABLES)
    if unknown:
        raise PreconditionError(f"Unknown observable(s): {', '.join(sorted(unknown))}")
    if varying not in system.parameters:
        raise PreconditionError(f'{system.name} has no parameter {varying}')
    options = options or SweepOptions()
    jobs = max(1, int(jobs))
    chunks = [c for c in np.array_split(grid, min(jobs, max(1, grid.size))) if c.size]
    tasks = [(system.name, params.as_dict(), varying, list(c), tuple(observables), options) for c in chunks]
    logger.info(f'{system.name}: sweeping {varying} over {grid.size} points in {len(tasks)} chunk(s)')
    rows = []
    for part in map_ordered(_sweep_chunk, tasks, jobs):
        rows.extend(part)
    return rows


def bifurcation_diagram(system, params, varying, grid, samples=DIAGRAM_SAMPLES, jobs=1, options=None):
    """(value, coordinate) pairs: section crossings for flows, a coordinate for maps."""
    options = options or SweepOptions()
    options.diagram_samples = samples
    rows = sweep(system, params, varying, grid, ('diagram',), jobs, options)
    return [(row.value, v) for row in rows for v in row.samples]


def _crisis_seeds(system, params, eq):
    e1, e2 = unstable_plane(system, params, eq)
    angles = 2.0 * np.pi * np.arange(CRISIS_SEEDS) / CRISIS_SEEDS
    return [eq.state + CRISIS_OFFSET * (np.cos(a) * e1 + np.sin(a) * e2) for a in angles]


def detect_crisis(system, params, varying, bounds, tol=1e-3, horizon=CRISIS_HORIZON, guess=None):
    """Value where orbits from every seed around the saddle-focus start escaping the box."""
    if system.kind != FLOW:
        raise PreconditionError(f'{system.name} is not a flow')

    def score(value, state):
        p = params.replace(**{varying: value})
        eq = tracked_equilibrium(system, p, state)
        cfg = IntegratorConfig.for_system(system, p, sweep=True)
        escaped = 0
        for seed in _crisis_seeds(system, p, eq):
            run = integrate(system, seed, p, horizon, cfg, record=False)
            if run.status == ESCAPED or not system.in_box(run.final[:3]):
                escaped += 1
        if 0 < escaped < CRISIS_SEEDS:
            logger.debug(f'crisis: {escaped}/{CRISIS_SEEDS} seeds escaped at {varying}={value:.8g}')
        return (1.0 if escaped == CRISIS_SEEDS else -1.0), eq.state

    lo, hi = bounds
    f_lo, warm = score(lo, guess)
    f_hi, _ = score(hi, warm)
    if f_lo > 0 or f_hi < 0:
        raise NotFound(f'No bounded-to-escaping change for {varying} in [{lo}, {hi}]',
                       varying=varying, range=[lo, hi])
    value, bracket = _bisect(score, lo, hi, f_lo, tol, 'crisis', warm)
    logger.info(f'{system.name}: crisis at {varying}={value:.8g}')
    return Located('crisis', value, bracket, details={'horizon': horizon, 'seeds': CRISIS_SEEDS})


# Scenario presets

SCENARIOS = {
    'act': {
        'system': 'act',
        'params': {'beta': 0.4},
        'varying': 'mu',
        'direction': 1,
        'stages': [
            {'stage': 'stable-point', 'op': 'stable-point', 'value': 0.3},
            {'stage': 'andronov-hopf', 'op': 'hopf', 'bounds': (0.2, 0.6)},
            {'stage': 'node-focus', 'op': 'node-focus', 'bounds': (0.45, 0.7)},
            {'stage': 'period-doubling', 'op': 'period-doubling', 'bounds': (0.6, 0.8)},
            {'stage': 'second-period-doubling', 'op': 'period-doubling', 'crossings': 2, 'bounds': (0.725, 0.78)},
            {'stage': 'chaotic', 'op': 'chaotic', 'value': 0.8},
            {'stage': 'homoclinic-attractor', 'op': 'homoclinic-12', 'bounds': (0.85, 0.87)},
            {'stage': 'crisis', 'op': 'crisis', 'bounds': (0.86, 0.90)},
        ],
    },
    'gaspard-nicolis': {
        'system': 'gaspard-nicolis',
        'params': {},
        'varying': 'beta',
        'direction': 1,
        'stages': [
            {'stage': 'stable-point', 'op': 'stable-point', 'value': 0.2},
            {'stage': 'andronov-hopf', 'op': 'hopf', 'bounds': (0.2, 0.3)},
            {'stage': 'node-focus', 'op': 'node-focus', 'bounds': (0.3, 0.38)},
            {'stage': 'period-doubling', 'op': 'period-doubling', 'bounds': (0.37, 0.39)},
            {'stage': 'chaotic', 'op': 'chaotic', 'value': 0.385},
            {'stage': 'homoclinic-attractor', 'op': 'homoclinic-12', 'bounds': (0.385, 0.40)},
        ],
    },
    'mira-orientable': {
        'system': 'mira',
        'params': {'A': 1.49, 'B': 0.5},
        'varying': 'C',
        'direction': -1,
        'stages': [
            {'stage': 'stable-point', 'op': 'map-boundary', 'label': 'fold', 'bounds': (-1.2, -0.8)},
            {'stage': 'neimark-sacker', 'op': 'map-boundary', 'label': 'neimark-sacker', 'bounds': (-1.6, -1.2)},
            {'stage': 'invariant-curve', 'op': 'components', 'value': -1.7, 'expected': 1},
            {'stage': 'curve-doubling', 'op': 'components', 'value': -1.73, 'expected': 2},
            {'stage': 'second-curve-doubling', 'op': 'components', 'value': -1.76, 'expected': 4},
            {'stage': 'third-curve-doubling', 'op': 'components', 'value': -1.77, 'expected': 8},
            {'stage': 'chaotic', 'op': 'chaotic', 'value': -1.8},
            {'stage': 'homoclinic-attractor', 'op': 'shilnikov', 'value': -1.82},
        ],
    },
    'mira-nonorientable': {
        'system': 'mira',
        'params': {'A': -2.786, 'B': -0.915},
        'varying': 'C',
        'direction': -1,
        'stages': [
            {'stage': 'stability-onset', 'op': 'map-boundary', 'label': 'flip', 'bounds': (-2.71, -2.69)},
            {'stage': 'stable-point', 'op': 'stable-point', 'value': -2.706},
            {'stage': 'neimark-sacker', 'op': 'map-boundary', 'label': 'neimark-sacker', 'bounds': (-2.74, -2.705)},
            {'stage': 'invariant-curve', 'op': 'components', 'value': -2.723, 'expected': 1},
            {'stage': 'curve-doubling', 'op': 'components', 'value': -2.733, 'expected': 2},
            {'stage': 'homoclinic-attractor', 'op': 'shilnikov', 'value': -2.743},
        ],
    },
}


@dataclass
class Stage:
    name: str
    status: str
    value: float = None
    bracket: tuple = None
    tag: str = None
    details: dict = field(default_factory=dict)

    def as_dict(self):
        return {
            'stage': self.name,
            'status': self.status,
            'value': self.value,
            'bracket': list(self.bracket) if self.bracket else None,
            'tag': self.tag,
            **self.details,
        }


@dataclass
class ScenarioReport:
    preset: str
    system: str
    varying: str
    direction: int
    stages: list
    violations: list = field(default_factory=list)

    @property
    def ok(self):
        return not self.violations

    @property
    def gaps(self):
        return [s.name for s in self.stages if s.status == 'gap']

    def as_dict(self):
        return {
            'preset': self.preset,
            'system': self.system,
            'varying': self.varying,
            'direction': self.direction,
            'stages': [s.as_dict() for s in self.stages],
            'gaps': self.gaps,
            'violations': self.violations,
            'ok': self.ok,
        }


def _value_stage(entry, system, params, varying, options):
    value = entry['value']
    p = params.replace(**{varying: value})
    op = entry['op']
    if op == 'stable-point':
        eq = tracked_equilibrium(system, p)
        matched = eq.cls.tag in (STABLE_NODE, STABLE_FOCUS)
        return Stage(entry['stage'], 'located' if matched else 'mismatch', value, tag=eq.cls.tag)
    if op == 'shilnikov':
        diag = detect_shilnikov_attractor(system, p, n_samples=options.distance_samples,
                                          horizon=options.horizon, iterates=options.iterates)
        status = 'located' if diag.homoclinic_attractor else 'mismatch'
        return Stage(entry['stage'], status, value, tag=diag.attractor.tag,
                     details={'d_min': diag.d_min, 'orientation': diag.orientation})
    row, _ = evaluate_point(system, p, cold_seed(system, p),
                            ('lyapunov', 'components') if op == 'components' else ('lyapunov',), options)
    if op == 'components':
        matched = row.components == entry['expected']
        return Stage(entry['stage'], 'located' if matched else 'mismatch', value, tag=row.tag,
                     details={'components': row.components, 'expected': entry['expected']})
    matched = row.tag == chaos.CHAOTIC
    return Stage(entry['stage'], 'located' if matched else 'mismatch', value, tag=row.tag,
                 details={'lambda1': row.lambda1})


def _locate_stage(entry, system, params, varying):
    op, bounds = entry['op'], entry['bounds']
    if op == 'hopf':
        return locate_hopf(system, params, varying, bounds)
    if op == 'map-boundary':
        found = [loc for loc in locate_ns_and_fold(system, params, varying, bounds) if loc.label == entry['label']]
        if not found:
            raise NotFound(f"No {entry['label']} for {varying} in {list(bounds)}", varying=varying)
        return found[0]
    if op == 'node-focus':
        return locate_node_focus_transition(system, params, varying, bounds)
    if op == 'period-doubling':
        return locate_period_doubling(system, params, varying, bounds, crossings=entry.get('crossings', 1))
    if op == 'homoclinic-12':
        return locate_homoclinic_12(system, params, varying, bounds)
    if op == 'crisis':
        return detect_crisis(system, params, varying, bounds)
    raise PreconditionError(f'Unknown stage operation {op}')


def _run_stage(task):
    preset, index, options = task
    scenario = SCENARIOS[preset]
    entry = scenario['stages'][index]
    system = get_system(scenario['system'])
    params = system.params(scenario['params'])
    varying = scenario['varying']
    try:
        if 'value' in entry:
            return _value_stage(entry, system, params, varying, options)
        loc = _locate_stage(entry, system, params, varying)
        return Stage(entry['stage'], 'located', loc.value, loc.bracket, loc.tag, loc.details)
    except DynamicsError as exc:
        logger.warning(f"{preset}: stage {entry['stage']} not located: {exc}")
        return Stage(entry['stage'], 'gap', details={'error': str(exc)})


def _ordering_violations(stages, direction):
    violations = []
    located = [s for s in stages if s.status == 'located']
    for before, after in zip(located, located[1:]):
        if direction * (after.value - before.value) <= 0:
            violations.append(f'{after.name} ({after.value:.6g}) does not follow {before.name} ({before.value:.6g})')
    for s in stages:
        if s.status == 'mismatch':
            violations.append(f'{s.name}: unexpected {s.tag} at {s.value:.6g}')
    return violations


def scenario_report(preset, jobs=1, options=None):
    """Locate every stage of a preset and check their order along the scan direction."""
    if preset not in SCENARIOS:
        raise PreconditionError(f"Unknown preset '{preset}'. Available: {', '.join(sorted(SCENARIOS))}")
    scenario = SCENARIOS[preset]
    options = options or SweepOptions()
    tasks = [(preset, i, options) for i in range(len(scenario['stages']))]
    stages = map_ordered(_run_stage, tasks, jobs)
    report = ScenarioReport(preset, scenario['system'], scenario['varying'], scenario['direction'],
                            stages, _ordering_violations(stages, scenario['direction']))
    for violation in report.violations:
        logger.warning(f'{preset}: {violation}')
    return report
