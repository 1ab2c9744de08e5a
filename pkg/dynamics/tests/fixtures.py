"""Small flows with closed-form answers used across the test modules."""
import numpy as np

from dynamics.systems import FLOW, SystemDef

BOX = ((-50.0, -50.0, -50.0), (50.0, 50.0, 50.0))


def linear_flow(name, matrix):
    matrix = np.asarray(matrix, dtype=float)
    return SystemDef(
        name=name,
        kind=FLOW,
        parameters=(),
        defaults={},
        rhs=lambda s, p: matrix @ s,
        jac=lambda s, p: matrix,
        box=BOX,
        tracked_guess=lambda p: np.zeros(3),
        divergence=lambda p: float(np.trace(matrix)),
    )


# eigenvalues -1, -2, -3
DECAY = linear_flow('decay', np.diag([-1.0, -2.0, -3.0]))

# eigenvalues 0.5 +- i (unstable plane xy) and -1 (stable axis z)
SADDLE_FOCUS_12 = linear_flow('sf12', [[0.5, -1.0, 0.0], [1.0, 0.5, 0.0], [0.0, 0.0, -1.0]])

# eigenvalues -0.5 +- i (stable plane xy) and 1 (unstable axis z)
SADDLE_FOCUS_21 = linear_flow('sf21', [[-0.5, -1.0, 0.0], [1.0, -0.5, 0.0], [0.0, 0.0, 1.0]])

# rigid rotation in the xy plane: x = cos t, y = sin t from (1, 0, 0)
ROTATION = linear_flow('rotation', [[0.0, -1.0, 0.0], [1.0, 0.0, 0.0], [0.0, 0.0, 0.0]])


def _hopf_rhs(s, p):
    x, y, z = s
    r2 = x * x + y * y
    return np.array([x - y - x * r2, x + y - y * r2, -z])


def _hopf_jac(s, p):
    x, y, _ = s
    r2 = x * x + y * y
    return np.array([
        [1.0 - r2 - 2.0 * x * x, -1.0 - 2.0 * x * y, 0.0],
        [1.0 - 2.0 * x * y, 1.0 - r2 - 2.0 * y * y, 0.0],
        [0.0, 0.0, -1.0],
    ])


# stable limit cycle r = 1 of period 2 pi, nontrivial multipliers exp(-2 pi) and exp(-4 pi)
HOPF_NORMAL_FORM = SystemDef(
    name='hopf-normal-form',
    kind=FLOW,
    parameters=(),
    defaults={},
    rhs=_hopf_rhs,
    jac=_hopf_jac,
    box=BOX,
    tracked_guess=lambda p: np.zeros(3),
)

# no equilibria anywhere
DRIFT = SystemDef(
    name='drift',
    kind=FLOW,
    parameters=(),
    defaults={},
    rhs=lambda s, p: np.array([1.0, 0.0, 0.0]),
    jac=lambda s, p: np.zeros((3, 3)),
    box=BOX,
)


def no_params(system):
    return system.params({})


def _scaled_21(s, p):
    return np.array([-0.5 * s[0] - s[1], s[0] - 0.5 * s[1], p['k'] * s[2]])


# SADDLE_FOCUS_21 with the unstable rate as a parameter; the separatrix never returns
SCALED_SADDLE_FOCUS_21 = SystemDef(
    name='scaled-sf21',
    kind=FLOW,
    parameters=('k',),
    defaults={'k': 1.0},
    rhs=_scaled_21,
    jac=lambda s, p: np.array([[-0.5, -1.0, 0.0], [1.0, -0.5, 0.0], [0.0, 0.0, p['k']]]),
    box=BOX,
    tracked_guess=lambda p: np.zeros(3),
)
