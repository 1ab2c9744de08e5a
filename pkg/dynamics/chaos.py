"""
Lyapunov spectra of flows and maps, attractor classification, and
component counting for doubled invariant curves.
"""
import logging
from dataclasses import dataclass, field

import numpy as np
from scipy.sparse import coo_matrix
from scipy.sparse.csgraph import connected_components, minimum_spanning_tree
from scipy.spatial import cKDTree

from .exceptions import PreconditionError
from .integrate import ESCAPED, IntegratorConfig, _settings_default, integrate_with_tangents
from .systems import FLOW, MAP

logger = logging.getLogger(__name__)

DEAD_BAND = 1e-3
RENORM_EVERY = 4
POINT_TOL = 1e-6
MAX_CYCLE_PERIOD = 64
CHAIN_SAMPLES = 16000
GRID_FRACTION = 1e-3
REPRESENTATIVES = 6000
LINK_CELLS = 10.0
GAP_RATIO = 4.0

FIXED_POINT = 'FixedPoint'
CYCLE = 'Cycle'
INVARIANT_CURVE = 'InvariantCurve'
CHAOTIC = 'Chaotic'
DIVERGED = 'Diverged'
UNRESOLVED = 'Unresolved'


@dataclass
class LyapunovResult:
    exponents: np.ndarray
    drift: float
    span: float
    status: str = 'ok'
    divergence_residual: float = None
    endpoint: np.ndarray = None

    @property
    def diverged(self):
        return self.status == ESCAPED

    @property
    def leading(self):
        return float(self.exponents[0])


@dataclass
class AttractorClass:
    tag: str
    evidence: dict = field(default_factory=dict)


def _finish(system, params, full, half, span, status, endpoint):
    exponents = np.sort(full)[::-1]
    drift = float(np.max(np.abs(np.sort(half)[::-1] - exponents)))
    residual = None
    if system.divergence is not None:
        residual = float(exponents.sum() - system.divergence(params))
    return LyapunovResult(exponents, drift, span, status, residual, endpoint)


def lyapunov_flow(system, params, x0, horizon=None, renorm_interval=1.0,
                  transient_fraction=None, config=None):
    """Benettin QR accumulation along a flow orbit."""
    if system.kind != FLOW:
        raise PreconditionError(f'{system.name} is not a flow')
    horizon = horizon or system.flow_horizon or _settings_default('FLOW_HORIZON', 2e4)
    fraction = _settings_default('TRANSIENT_FRACTION', 0.2) if transient_fraction is None else transient_fraction
    config = config or IntegratorConfig.for_system(system, params, sweep=True)
    run = integrate_with_tangents(system, x0, params, horizon, config=config,
                                  renorm_interval=renorm_interval, record=False)
    endpoint = run.trajectory.final[:3]
    n = len(run.log_stretches)
    if run.status == ESCAPED or n < 4:
        return LyapunovResult(np.full(3, np.nan), np.inf, 0.0, ESCAPED, None, endpoint)
    discard = int(fraction * n)
    full = run.exponents(discard)
    half = run.exponents(discard + (n - discard) // 2)
    span = float(run.times[-1] - (run.times[discard - 1] if discard else 0.0))
    logger.debug(f'{system.name}: flow exponents {full} over {span:.4g}')
    return _finish(system, params, full, half, span, 'ok', endpoint)


def lyapunov_map(system, params, x0, iterates=None, transient_fraction=None,
                 renorm_every=RENORM_EVERY):
    """Jacobian-product QR accumulation along a map orbit."""
    if system.kind != MAP:
        raise PreconditionError(f'{system.name} is not a map')
    iterates = int(iterates or _settings_default('MAP_ITERATES', 1_000_000))
    fraction = _settings_default('TRANSIENT_FRACTION', 0.2) if transient_fraction is None else transient_fraction
    rhs, jac = system.rhs, system.jac
    lo, hi = system.box_lo, system.box_hi
    discard = int(fraction * iterates)
    half_start = discard + (iterates - discard) // 2
    x = np.array(x0, dtype=float)
    q = np.eye(3)
    total = np.zeros(3)
    half = np.zeros(3)
    for n in range(1, iterates + 1):
        q = jac(x, params) @ q
        x = rhs(x, params)
        if not (np.all(np.isfinite(x)) and np.all(x >= lo) and np.all(x <= hi)):
            return LyapunovResult(np.full(3, np.nan), np.inf, 0.0, ESCAPED, None, x)
        if n % renorm_every == 0 or n == iterates:
            q, r = np.linalg.qr(q)
            logs = np.log(np.abs(np.diag(r)))
            if n > discard:
                total += logs
            if n > half_start:
                half += logs
    full = total / (iterates - discard)
    half = half / (iterates - half_start)
    return _finish(system, params, full, half, float(iterates - discard), 'ok', x)


def _cycle_period(orbit, tol=POINT_TOL, max_period=MAX_CYCLE_PERIOD):
    tail = orbit[-(max_period + 1):]
    last = tail[-1]
    for p in range(1, min(max_period, len(tail) - 1) + 1):
        if np.linalg.norm(tail[-1 - p] - last) < tol:
            return p
    return None


def classify_attractor(system, params, orbit, exponents):
    """Decision rules on the exponent signature plus orbit geometry."""
    if exponents.diverged:
        return AttractorClass(DIVERGED, {'status': exponents.status})
    lyap = exponents.exponents
    l1 = float(lyap[0])
    evidence = {'exponents': [float(v) for v in lyap], 'drift': exponents.drift}
    if l1 > DEAD_BAND:
        return AttractorClass(CHAOTIC, evidence)
    if abs(l1) <= 2 * DEAD_BAND and exponents.drift > DEAD_BAND:
        return AttractorClass(UNRESOLVED, evidence)

    if system.kind == MAP:
        if abs(l1) <= DEAD_BAND:
            return AttractorClass(INVARIANT_CURVE, evidence)
        if orbit is None:
            evidence['period'] = None
            evidence['note'] = 'period unknown without an orbit'
            return AttractorClass(CYCLE, evidence)
        period = _cycle_period(np.asarray(orbit))
        evidence['period'] = period
        if period == 1:
            return AttractorClass(FIXED_POINT, evidence)
        if period is not None and period > 4:
            evidence['note'] = 'resonant: finite point support on a locked curve'
        return AttractorClass(CYCLE, evidence)

    l2 = float(lyap[1])
    if l1 < -DEAD_BAND:
        return AttractorClass(FIXED_POINT, evidence)
    if l2 < -DEAD_BAND:
        return AttractorClass(CYCLE, evidence)
    evidence['note'] = 'torus signature (0, 0, -)'
    return AttractorClass(INVARIANT_CURVE, evidence)


def _thin(points):
    """Grid representatives of an orbit tail, at most REPRESENTATIVES of them."""
    lo = points.min(axis=0)
    spacing = GRID_FRACTION * float(np.linalg.norm(np.ptp(points, axis=0)))
    while True:
        cells = np.floor((points - lo) / spacing).astype(np.int64)
        _, index = np.unique(cells, axis=0, return_index=True)
        if len(index) <= REPRESENTATIVES:
            return points[np.sort(index)], spacing
        spacing *= 2.0


def _spanning_forest(tree, spacing):
    links = tree.sparse_distance_matrix(tree, LINK_CELLS * spacing, output_type='coo_matrix')
    return minimum_spanning_tree(links.tocsr()).tocoo()


def _cut(forest, n, pieces):
    """
    Labels of the representatives after removing the longest links so that
    exactly `pieces` parts remain, or None when the removed links are not
    separated from the kept ones by GAP_RATIO.
    """
    roots, _ = connected_components(forest, directed=False)
    if roots > pieces:
        return None, 0.0
    order = np.argsort(forest.data)[::-1]
    links = np.concatenate([np.full(roots - 1, np.inf), forest.data[order]])
    if pieces > 1 and not links[pieces - 2] > GAP_RATIO * links[pieces - 1]:
        return None, 0.0
    keep = order[pieces - roots:]
    pruned = coo_matrix((forest.data[keep], (forest.row[keep], forest.col[keep])), shape=(n, n))
    _, labels = connected_components(pruned, directed=False)
    longest = float(forest.data[keep].max()) if keep.size else 0.0
    return labels, longest


def count_curve_components(system, params, orbit, max_period=8, samples=CHAIN_SAMPLES):
    """
    Number of closed curves an invariant-curve orbit tail lies on.

    The tail is thinned on a grid and joined by a minimum spanning forest.
    A count k in 8, 4, 2 is accepted when cutting the k - 1 longest links
    leaves k parts, those links are GAP_RATIO longer than every kept one,
    and each residue class of iterates mod k stays inside its own part.
    Otherwise the tail is one curve, unless the forest itself falls apart.
    """
    orbit = np.asarray(orbit, dtype=float)[-samples:]
    distinct = np.unique(np.round(orbit, 9), axis=0)
    if len(distinct) < 50:
        raise PreconditionError('Orbit has finite point support, not an invariant curve')
    points, spacing = _thin(orbit)
    tree = cKDTree(points)
    forest = _spanning_forest(tree, spacing)
    _, nearest = tree.query(orbit)

    k = 1
    while k * 2 <= min(max_period, 8):
        k *= 2
    while k >= 1:
        labels, longest = _cut(forest, len(points), k)
        if labels is not None:
            visited = labels[nearest]
            owners = [np.unique(visited[i::k]) for i in range(k)]
            if all(len(owner) == 1 for owner in owners) and len({int(o[0]) for o in owners}) == k:
                counts = tree.query_ball_point(points, 1.5 * longest, return_length=True)
                closed = [bool(np.min(counts[labels == o[0]]) >= 3) for o in owners]
                logger.debug(f'{system.name}: {k} curve(s), longest kept link {longest:.3g}')
                return k, closed
        k //= 2
    return None, []
