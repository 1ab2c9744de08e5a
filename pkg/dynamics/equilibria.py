"""
Equilibria of flows and fixed points of maps: Newton search, closed-form
3x3 spectra, saddle-focus classification, and one-parameter location of
Andronov-Hopf, Neimark-Sacker, fold and flip boundaries.
"""
import logging
import math
from dataclasses import dataclass, field

import numpy as np
from scipy.stats import qmc

from .exceptions import NotFound, PreconditionError
from .systems import FLOW, MAP

logger = logging.getLogger(__name__)

HYPERBOLIC_TOL = 1e-8
NEWTON_MAX_ITER = 50
NEWTON_TOL = 1e-10
DEDUP_RADIUS = 1e-8

STABLE_NODE = 'StableNode'
STABLE_FOCUS = 'StableFocus'
SADDLE_FOCUS_21 = 'SaddleFocus21'
SADDLE_FOCUS_12 = 'SaddleFocus12'
SADDLE = 'Saddle'
REPELLER = 'Repeller'
NON_HYPERBOLIC = 'NonHyperbolic'


@dataclass(frozen=True)
class Spectrum3:
    values: tuple
    kind: str = FLOW

    def __iter__(self):
        return iter(self.values)

    def __getitem__(self, i):
        return self.values[i]

    @property
    def complex_pair(self):
        """The conjugate pair (positive imaginary part first) or None."""
        pair = [v for v in self.values if abs(v.imag) > _imag_tol(v)]
        if len(pair) != 2:
            return None
        return tuple(sorted(pair, key=lambda v: -v.imag))

    @property
    def real_value(self):
        reals = [v for v in self.values if abs(v.imag) <= _imag_tol(v)]
        return reals[0].real if len(reals) == 1 else None

    def as_list(self):
        return [[v.real, v.imag] for v in self.values]


@dataclass(frozen=True)
class EquilibriumClass:
    tag: str
    sigma: float = None
    orientation: int = None


@dataclass
class Equilibrium:
    state: np.ndarray
    spectrum: Spectrum3
    cls: EquilibriumClass
    residual: float


@dataclass
class Located:
    """Result of a one-parameter locator."""
    label: str
    value: float
    bracket: tuple
    tag: str = None
    details: dict = field(default_factory=dict)


def _imag_tol(v):
    return 1e-10 * (1.0 + abs(v))


def char_poly(m):
    """Monic cubic coefficients (a, b, c) of det(lambda I - m)."""
    m = np.asarray(m, dtype=float)
    a = -np.trace(m)
    b = (m[0, 0] * m[1, 1] - m[0, 1] * m[1, 0]
         + m[0, 0] * m[2, 2] - m[0, 2] * m[2, 0]
         + m[1, 1] * m[2, 2] - m[1, 2] * m[2, 1])
    c = -np.linalg.det(m)
    return float(a), float(b), float(c)


def _polish(root, a, b, c):
    p = ((root + a) * root + b) * root + c
    dp = (3 * root + 2 * a) * root + b
    if dp == 0:
        return root
    candidate = root - p / dp
    q = ((candidate + a) * candidate + b) * candidate + c
    return candidate if abs(q) < abs(p) else root


def cubic_roots(a, b, c):
    """Roots of x^3 + a x^2 + b x + c, closed form plus one Newton polish."""
    shift = a / 3.0
    p = b - a * a / 3.0
    q = 2.0 * a ** 3 / 27.0 - a * b / 3.0 + c
    disc = (q / 2.0) ** 2 + (p / 3.0) ** 3
    if disc < 0:
        # three distinct real roots, trigonometric form
        r = 2.0 * math.sqrt(-p / 3.0)
        arg = max(-1.0, min(1.0, 3.0 * q / (p * r)))
        phi = math.acos(arg) / 3.0
        roots = [complex(r * math.cos(phi - 2.0 * math.pi * k / 3.0) - shift) for k in range(3)]
        return [complex(_polish(x.real, a, b, c)) for x in roots]
    s = math.sqrt(disc)
    u = float(np.cbrt(-q / 2.0 + s))
    v = float(np.cbrt(-q / 2.0 - s))
    real = _polish(u + v - shift, a, b, c)
    pair = complex(-(u + v) / 2.0 - shift, math.sqrt(3.0) / 2.0 * (u - v))
    if pair.imag != 0:
        pair = _polish(pair, a, b, c)
        return [complex(real), pair, pair.conjugate()]
    return [complex(real), complex(_polish(pair.real, a, b, c)), complex(_polish(pair.real, a, b, c))]


def order_spectrum(values, kind=FLOW):
    if kind == MAP:
        key = lambda v: (-round(abs(v), 12), v.imag)
    else:
        key = lambda v: (-round(v.real, 12), v.imag)
    return Spectrum3(tuple(sorted(values, key=key)), kind)


def eigenvalues_3x3(m, kind=FLOW):
    return order_spectrum(cubic_roots(*char_poly(m)), kind)


def classify(spectrum, kind=FLOW):
    """Saddle-focus taxonomy for flows (real parts) and maps (moduli)."""
    values = list(spectrum)
    if kind == MAP:
        measure = [abs(v) - 1.0 for v in values]
        orientation = 1 if np.prod(values).real > 0 else -1
    else:
        measure = [v.real for v in values]
        orientation = None
    if any(abs(m) < HYPERBOLIC_TOL for m in measure):
        return EquilibriumClass(NON_HYPERBOLIC, orientation=orientation)

    pair = spectrum.complex_pair
    if pair is not None:
        real = spectrum.real_value
        pair_m = abs(pair[0]) - 1.0 if kind == MAP else pair[0].real
        real_m = abs(real) - 1.0 if kind == MAP else real
        sigma = None if kind == MAP else pair[0].real + real
        if pair_m < 0 and real_m > 0:
            return EquilibriumClass(SADDLE_FOCUS_21, sigma, orientation)
        if pair_m > 0 and real_m < 0:
            return EquilibriumClass(SADDLE_FOCUS_12, sigma, orientation)
        if pair_m < 0 and real_m < 0:
            return EquilibriumClass(STABLE_FOCUS, orientation=orientation)
        return EquilibriumClass(REPELLER, orientation=orientation)

    if all(m < 0 for m in measure):
        return EquilibriumClass(STABLE_NODE, orientation=orientation)
    if all(m > 0 for m in measure):
        return EquilibriumClass(REPELLER, orientation=orientation)
    return EquilibriumClass(SADDLE, orientation=orientation)


def _residual_fn(system, params):
    rhs, jac = system.rhs, system.jac
    if system.kind == MAP:
        return (lambda x: rhs(x, params) - x), (lambda x: jac(x, params) - np.eye(3))
    return (lambda x: rhs(x, params)), (lambda x: jac(x, params))


def newton(system, params, guess, max_iter=NEWTON_MAX_ITER, tol=NEWTON_TOL):
    """Damped Newton on the equilibrium/fixed-point equation; None if no convergence."""
    g, dg = _residual_fn(system, params)
    x = np.array(guess, dtype=float)
    gx = g(x)
    norm = float(np.linalg.norm(gx))
    for _ in range(max_iter):
        if norm < tol:
            return x, norm
        try:
            step = np.linalg.solve(dg(x), -gx)
        except np.linalg.LinAlgError:
            return None
        lam = 1.0
        while lam > 1e-6:
            trial = x + lam * step
            g_trial = g(trial)
            n_trial = float(np.linalg.norm(g_trial))
            if np.isfinite(n_trial) and n_trial < norm:
                break
            lam /= 2.0
        else:
            return None
        x, gx, norm = trial, g_trial, n_trial
    return (x, norm) if norm < tol else None


def equilibrium_at(system, params, state, residual=0.0):
    spectrum = eigenvalues_3x3(system.jac(np.asarray(state, dtype=float), params), system.kind)
    cls = classify(spectrum, system.kind)
    if system.kind == MAP:
        cls = EquilibriumClass(cls.tag, cls.sigma, system.orientation(params) or cls.orientation)
    return Equilibrium(np.asarray(state, dtype=float), spectrum, cls, residual)


def refine_equilibrium(system, params, guess):
    found = newton(system, params, guess)
    if found is None:
        raise NotFound(f'Newton did not converge from {list(np.round(guess, 6))}',
                       system=system.name)
    return equilibrium_at(system, params, *found)


def find_equilibria(system, params, seed_box=None, n_seeds=64):
    """Newton from a Halton seed grid; roots deduplicated and classified."""
    lo, hi = seed_box or system.seed_box
    lo, hi = np.asarray(lo, dtype=float), np.asarray(hi, dtype=float)
    if np.any(hi < lo):
        raise PreconditionError('Seed box is empty')
    seeds = qmc.scale(qmc.Halton(d=3, scramble=False).random(n_seeds), lo, hi) if np.any(hi > lo) else [lo]
    roots = []
    for seed in seeds:
        found = newton(system, params, seed)
        if found is None:
            continue
        x, res = found
        if any(np.linalg.norm(x - r[0]) < DEDUP_RADIUS for r in roots):
            continue
        roots.append((x, res))
    roots.sort(key=lambda r: tuple(np.round(r[0], 10)))
    logger.debug(f'{system.name}: {len(roots)} equilibria from {n_seeds} seeds')
    return [equilibrium_at(system, params, x, res) for x, res in roots]


def tracked_equilibrium(system, params, guess=None):
    """Equilibrium the scenarios follow (ACT O2, Gaspard-Nicolis O, map origin)."""
    if guess is None:
        guess = system.tracked_guess(params)
    return refine_equilibrium(system, params, guess)


def continue_equilibrium(system, params, varying, values, guess=None):
    """Newton warm starts along a parameter grid."""
    branch = []
    state = guess
    for value in values:
        p = params.replace(**{varying: value})
        eq = tracked_equilibrium(system, p, state)
        branch.append(eq)
        state = eq.state
    return branch


def check_o1_saddle_focus_grid(system, betas, mu=0.8):
    """Class of the ACT origin on a beta grid: {beta: tag}."""
    out = {}
    for beta in betas:
        p = system.params(mu=mu, beta=beta)
        out[float(beta)] = equilibrium_at(system, p, np.zeros(3)).cls.tag
    return out


def _bisect(fn, lo, hi, f_lo, tol, label, warm=None):
    """Bisection on the sign of fn; fn(value, warm) -> (score, warm)."""
    while abs(hi - lo) > tol:
        mid = 0.5 * (lo + hi)
        f_mid, warm = fn(mid, warm)
        logger.debug(f'{label}: bracket [{lo:.10g}, {hi:.10g}] f(mid)={f_mid:.3e}')
        if (f_mid > 0) == (f_lo > 0):
            lo, f_lo = mid, f_mid
        else:
            hi = mid
    return 0.5 * (lo + hi), (lo, hi)


def locate_hopf(system, params, varying, bounds, tol=1e-6, guess=None):
    """Andronov-Hopf value: sign change of the complex pair's real part."""
    if system.kind != FLOW:
        raise PreconditionError(f'{system.name} is not a flow')

    def score(value, state):
        p = params.replace(**{varying: value})
        eq = tracked_equilibrium(system, p, state)
        pair = eq.spectrum.complex_pair
        if pair is None:
            raise NotFound(f'Tracked equilibrium has no complex pair at {varying}={value:.8g}',
                           varying=varying)
        return pair[0].real, eq.state

    lo, hi = bounds
    f_lo, s_lo = score(lo, guess)
    f_hi, _ = score(hi, s_lo)
    if (f_lo > 0) == (f_hi > 0):
        raise NotFound(f'No Hopf crossing for {varying} in [{lo}, {hi}]',
                       varying=varying, range=[lo, hi])
    value, bracket = _bisect(score, lo, hi, f_lo, tol, 'hopf', s_lo)
    logger.info(f'{system.name}: Andronov-Hopf at {varying}={value:.8g}')
    return Located('andronov-hopf', value, bracket)


def map_test_functions(jac):
    """Fold, flip and Neimark-Sacker test values of a 3x3 map Jacobian."""
    a, b, c = char_poly(jac)
    fold = 1.0 + a + b + c
    flip = -1.0 + a - b + c
    cos_psi = (c - a) / 2.0
    ns = 1.0 + a * c - c * c - b if abs(cos_psi) < 1.0 else None
    return {'fold': fold, 'flip': flip, 'neimark-sacker': ns}


def locate_ns_and_fold(system, params, varying, bounds, tol=1e-6, guess=None, n_grid=64):
    """
    Boundaries where a fixed-point multiplier crosses the unit circle.

    Each crossing type has its own test function (characteristic polynomial at
    +1 and -1, and the unit-modulus-pair condition), so crossings are found
    even when another multiplier is already outside the circle.
    """
    if system.kind != MAP:
        raise PreconditionError(f'{system.name} is not a map')
    lo, hi = bounds
    grid = np.linspace(lo, hi, n_grid + 1)
    branch = continue_equilibrium(system, params, varying, grid, guess)
    tests = [map_test_functions(system.jac(eq.state, params.replace(**{varying: v})))
             for v, eq in zip(grid, branch)]

    def scorer(kind):
        def score(value, state):
            p = params.replace(**{varying: value})
            eq = tracked_equilibrium(system, p, state)
            t = map_test_functions(system.jac(eq.state, p))[kind]
            return (t if t is not None else math.nan), eq.state
        return score

    found = []
    for kind in ('neimark-sacker', 'fold', 'flip'):
        for i in range(n_grid):
            t0, t1 = tests[i][kind], tests[i + 1][kind]
            if t0 is None or t1 is None or (t0 > 0) == (t1 > 0):
                continue
            value, bracket = _bisect(scorer(kind), grid[i], grid[i + 1], t0, tol, kind,
                                     branch[i].state)
            p = params.replace(**{varying: value})
            eq = tracked_equilibrium(system, p, branch[i].state)
            left = equilibrium_at(system, params.replace(**{varying: bracket[0] - 10 * tol}), eq.state)
            right = equilibrium_at(system, params.replace(**{varying: bracket[1] + 10 * tol}), eq.state)
            found.append(Located(kind, value, bracket, details={
                'multipliers': eq.spectrum.as_list(),
                'stable_side': _stable_side(left, right),
            }))
            logger.info(f'{system.name}: {kind} at {varying}={value:.8g}')
    if not found:
        raise NotFound(f'No multiplier crosses the unit circle for {varying} in [{lo}, {hi}]',
                       varying=varying, range=[lo, hi])
    found.sort(key=lambda loc: loc.value)
    return found


def _stable_side(left, right):
    stable = {STABLE_NODE, STABLE_FOCUS}
    if left.cls.tag in stable:
        return 'below'
    if right.cls.tag in stable:
        return 'above'
    return None
