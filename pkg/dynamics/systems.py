"""
Registered three-dimensional flows and maps.

Every system is a compiled-in registration: an evaluator, its analytic
Jacobian, named parameters with defaults and an absorbing box.
"""
import logging
import math
from collections.abc import Mapping
from dataclasses import dataclass, field

import numpy as np

from .exceptions import ConfigurationError, DomainError

logger = logging.getLogger(__name__)

FLOW = 'flow'
MAP = 'map'


class ParameterSet(Mapping):
    """Immutable, validated mapping of parameter name to float."""

    def __init__(self, system, values):
        self.system = system
        self._values = dict(values)

    def __getitem__(self, key):
        return self._values[key]

    def __iter__(self):
        return iter(self.system.parameters)

    def __len__(self):
        return len(self._values)

    def __repr__(self):
        body = ', '.join(f'{k}={v!r}' for k, v in self.items())
        return f'ParameterSet({self.system.name}: {body})'

    def replace(self, **changes):
        return self.system.params(dict(self._values, **changes))

    def as_dict(self):
        return {name: self._values[name] for name in self.system.parameters}


@dataclass(frozen=True)
class SystemDef:
    name: str
    kind: str
    parameters: tuple
    defaults: dict
    rhs: object
    jac: object
    box: tuple
    description: str = ''
    seed_box: tuple = ((-1.0, -1.0, -1.0), (1.0, 1.0, 1.0))
    tracked_guess: object = None
    max_step: object = None
    constant_det: str = None
    check: object = None
    divergence: object = None
    demos: dict = field(default_factory=dict)
    cycle_tol: float = 1e-9
    flow_horizon: float = None
    hopf_branch: dict = field(default_factory=dict)

    @property
    def is_flow(self):
        return self.kind == FLOW

    @property
    def box_lo(self):
        return np.asarray(self.box[0], dtype=float)

    @property
    def box_hi(self):
        return np.asarray(self.box[1], dtype=float)

    def in_box(self, state):
        return bool(np.all(state >= self.box_lo) and np.all(state <= self.box_hi))

    def params(self, overrides=None, **kwargs):
        """Resolve defaults plus overrides into a validated ParameterSet."""
        values = dict(self.defaults)
        merged = dict(overrides or {}, **kwargs)
        unknown = set(merged) - set(self.parameters)
        if unknown:
            raise ConfigurationError(
                f"Unknown parameter(s) for {self.name}: {', '.join(sorted(unknown))}"
            )
        for key, value in merged.items():
            try:
                values[key] = float(value)
            except (TypeError, ValueError):
                raise ConfigurationError(f'Parameter {key} must be a real number, got {value!r}')
        missing = [p for p in self.parameters if p not in values]
        if missing:
            raise ConfigurationError(f"Missing parameter(s) for {self.name}: {', '.join(missing)}")
        for key, value in values.items():
            if not math.isfinite(value):
                raise DomainError(f'Parameter {key} is not finite: {value}')
        if self.check is not None:
            self.check(values)
        return ParameterSet(self, values)

    def orientation(self, params):
        """Sign of the constant Jacobian determinant for maps, else None."""
        if self.constant_det is None:
            return None
        return 1 if params[self.constant_det] > 0 else -1

    def describe(self):
        return {
            'name': self.name,
            'kind': self.kind,
            'parameters': list(self.parameters),
            'defaults': dict(self.defaults),
            'box': [list(self.box[0]), list(self.box[1])],
            'description': self.description,
            'demos': self.demos,
        }


def _as_params(system, params):
    if isinstance(params, ParameterSet):
        return params
    return system.params(params)


def _as_state(state):
    state = np.asarray(state, dtype=float)
    if state.shape != (3,):
        raise DomainError(f'State must have three components, got shape {state.shape}')
    if not np.all(np.isfinite(state)):
        raise DomainError(f'State is not finite: {state}')
    return state


def evaluate(system, state, params):
    """Right-hand side of a flow or image of a map at state."""
    params = _as_params(system, params)
    return system.rhs(_as_state(state), params)


def eval_jacobian(system, state, params):
    params = _as_params(system, params)
    return system.jac(_as_state(state), params)


def finite_difference_jacobian(system, state, params, h=1e-6):
    params = _as_params(system, params)
    state = _as_state(state)
    jac = np.empty((3, 3))
    for j in range(3):
        step = np.zeros(3)
        step[j] = h * max(1.0, abs(state[j]))
        jac[:, j] = (system.rhs(state + step, params) - system.rhs(state - step, params)) / (2 * step[j])
    return jac


# ACT system

def _act_rhs(s, p):
    x, y, z = s
    return np.array([y, z, -y - p['beta'] * z + p['mu'] * x * (1.0 - x)])


def _act_jac(s, p):
    x = s[0]
    return np.array([
        [0.0, 1.0, 0.0],
        [0.0, 0.0, 1.0],
        [p['mu'] * (1.0 - 2.0 * x), -1.0, -p['beta']],
    ])


# Gaspard-Nicolis chemical oscillator

def _gn_rhs(s, p):
    x, y, z = s
    return np.array([
        x * (p['beta'] * x - p['f'] * y - z + p['g']),
        y * (x + p['s'] * z - p['alpha']),
        (x - p['alpha'] * z ** 3 + p['b'] * z ** 2 - p['c'] * z) / p['eps'],
    ])


def _gn_jac(s, p):
    x, y, z = s
    eps = p['eps']
    return np.array([
        [2.0 * p['beta'] * x - p['f'] * y - z + p['g'], -p['f'] * x, -x],
        [y, x + p['s'] * z - p['alpha'], p['s'] * y],
        [1.0 / eps, 0.0, (-3.0 * p['alpha'] * z ** 2 + 2.0 * p['b'] * z - p['c']) / eps],
    ])


def _gn_check(values):
    if values['eps'] <= 0:
        raise ConfigurationError(f"Gaspard-Nicolis requires eps > 0, got {values['eps']}")


def _gn_guess(p):
    # positive equilibrium: y > 0 forces x = alpha - s z on the z-nullcline
    roots = np.roots([p['alpha'], -p['b'], p['c'] + p['s'], -p['alpha']])
    real = sorted(r.real for r in roots if abs(r.imag) < 1e-9 and r.real > 0)
    z = real[0] if real else 0.17
    x = p['alpha'] - p['s'] * z
    y = (p['beta'] * x - z + p['g']) / p['f']
    return np.array([x, y, z])


# Mira map, C-form and M-form

def _mira_rhs(s, p):
    x, y, z = s
    return np.array([y, z, p['B'] * x + p['C'] * y + p['A'] * z - y * y])


def _mira_jac(s, p):
    y = s[1]
    return np.array([
        [0.0, 1.0, 0.0],
        [0.0, 0.0, 1.0],
        [p['B'], p['C'] - 2.0 * y, p['A']],
    ])


def _mira_m_rhs(s, p):
    x, y, z = s
    return np.array([y, z, p['M1'] + p['B'] * x + p['M2'] * z - y * y])


def _mira_m_jac(s, p):
    y = s[1]
    return np.array([
        [0.0, 1.0, 0.0],
        [0.0, 0.0, 1.0],
        [p['B'], -2.0 * y, p['M2']],
    ])


def _mira_m_guess(p):
    # fixed points lie on the diagonal: w^2 + (1 - B - M2) w - M1 = 0
    k = 1.0 - p['B'] - p['M2']
    disc = k * k + 4.0 * p['M1']
    w = (-k + math.sqrt(disc)) / 2.0 if disc >= 0 else 0.0
    return np.array([w, w, w])


ACT = SystemDef(
    name='act',
    kind=FLOW,
    parameters=('mu', 'beta'),
    defaults={'mu': 0.8, 'beta': 0.4},
    rhs=_act_rhs,
    jac=_act_jac,
    box=((-2.0, -2.0, -2.0), (3.0, 3.0, 3.0)),
    description="x' = y, y' = z, z' = -y - beta z + mu x (1 - x)",
    seed_box=((-0.5, -0.5, -0.5), (1.5, 0.5, 0.5)),
    tracked_guess=lambda p: np.array([1.0, 0.0, 0.0]),
    divergence=lambda p: -p['beta'],
    demos={'whirlpool': {'mu': 0.02, 'beta': 0.01}},
)

GASPARD_NICOLIS = SystemDef(
    name='gaspard-nicolis',
    kind=FLOW,
    parameters=('beta', 'b', 'eps', 'f', 'g', 's', 'c', 'alpha'),
    defaults={
        'beta': 0.3, 'b': 3.0, 'eps': 0.01, 'f': 0.5,
        'g': 0.6, 's': 0.3, 'c': 4.8, 'alpha': 0.7825,
    },
    rhs=_gn_rhs,
    jac=_gn_jac,
    box=((-1.0, -1.0, -1.0), (10.0, 10.0, 10.0)),
    description="x' = x(beta x - f y - z + g), y' = y(x + s z - alpha), "
                "z' = (x - alpha z^3 + b z^2 - c z)/eps",
    seed_box=((0.05, 0.05, 0.05), (2.0, 2.0, 1.0)),
    tracked_guess=_gn_guess,
    max_step=lambda p: p['eps'] / 2.0,
    check=_gn_check,
    cycle_tol=1e-7,
    flow_horizon=2e3,
    hopf_branch={'beta': {'bounds': (0.25, 0.27), 'offset': 0.01}},
)

MIRA = SystemDef(
    name='mira',
    kind=MAP,
    parameters=('A', 'B', 'C'),
    defaults={'A': 1.49, 'B': 0.5, 'C': -1.82},
    rhs=_mira_rhs,
    jac=_mira_jac,
    box=((-100.0, -100.0, -100.0), (100.0, 100.0, 100.0)),
    description='x -> y, y -> z, z -> B x + C y + A z - y^2',
    seed_box=((-2.0, -2.0, -2.0), (2.0, 2.0, 2.0)),
    tracked_guess=lambda p: np.zeros(3),
    constant_det='B',
    divergence=lambda p: math.log(abs(p['B'])),
    demos={
        'orientable': {'A': 1.49, 'B': 0.5, 'C': -1.82},
        'nonorientable': {'A': -2.786, 'B': -0.915, 'C': -2.743},
    },
)

MIRA_M = SystemDef(
    name='mira-m',
    kind=MAP,
    parameters=('M1', 'M2', 'B'),
    defaults={'M1': 0.35, 'M2': 0.8, 'B': 0.7},
    rhs=_mira_m_rhs,
    jac=_mira_m_jac,
    box=((-100.0, -100.0, -100.0), (100.0, 100.0, 100.0)),
    description='x -> y, y -> z, z -> M1 + B x + M2 z - y^2',
    seed_box=((-2.0, -2.0, -2.0), (2.0, 2.0, 2.0)),
    tracked_guess=_mira_m_guess,
    constant_det='B',
    divergence=lambda p: math.log(abs(p['B'])),
    demos={
        'resonant-triangle': {'M1': 0.195, 'M2': -0.26, 'B': 0.7},
        'superspiral': {'M1': 0.35, 'M2': 0.8, 'B': 0.7},
    },
)

SYSTEMS = {system.name: system for system in (ACT, GASPARD_NICOLIS, MIRA, MIRA_M)}


def get_system(name):
    try:
        return SYSTEMS[name]
    except KeyError:
        raise ConfigurationError(f"Unknown system '{name}'. Available: {', '.join(sorted(SYSTEMS))}")


def list_systems():
    return [system.describe() for system in SYSTEMS.values()]
