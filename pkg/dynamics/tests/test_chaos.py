import math

import numpy as np
from django.test import SimpleTestCase, tag

from dynamics.chaos import (
    CHAOTIC, CYCLE, DIVERGED, FIXED_POINT, INVARIANT_CURVE, UNRESOLVED, LyapunovResult,
    classify_attractor, count_curve_components, lyapunov_flow, lyapunov_map,
)
from dynamics.exceptions import PreconditionError
from dynamics.integrate import ESCAPED, iterate_map
from dynamics.sweep import cold_seed
from dynamics.systems import ACT, GASPARD_NICOLIS, MIRA

GOLDEN_TURN = 2.0 * math.pi * (math.sqrt(5.0) - 1.0) / 2.0


def _circle(n, center=(0.0, 0.0, 0.0), radius=1.0):
    angles = GOLDEN_TURN * np.arange(n)
    points = np.zeros((n, 3))
    points[:, 0] = center[0] + radius * np.cos(angles)
    points[:, 1] = center[1] + radius * np.sin(angles)
    return points


def _result(*exponents, drift=0.0, status='ok'):
    return LyapunovResult(np.array(exponents, dtype=float), drift, 1e4, status)


class LyapunovTests(SimpleTestCase):

    def test_map_exponents_sum_to_log_determinant(self):
        params = MIRA.params(C=-1.2)
        result = lyapunov_map(MIRA, params, [0.1, 0.1, 0.1], iterates=20000)
        self.assertEqual(result.status, 'ok')
        self.assertAlmostEqual(float(result.exponents.sum()), math.log(0.5), delta=1e-3)
        self.assertAlmostEqual(result.divergence_residual, 0.0, delta=1e-3)
        self.assertTrue(np.all(np.diff(result.exponents) <= 0))

    def test_flow_exponents_sum_to_divergence(self):
        params = ACT.params(mu=0.5, beta=0.4)
        result = lyapunov_flow(ACT, params, cold_seed(ACT, params), horizon=2000.0)
        self.assertAlmostEqual(float(result.exponents.sum()), -0.4, delta=1e-2)
        self.assertAlmostEqual(result.divergence_residual, 0.0, delta=1e-2)
        self.assertAlmostEqual(result.leading, 0.0, delta=1e-2)

    def test_escaping_map_orbit(self):
        result = lyapunov_map(MIRA, MIRA.params(), [5.0, 5.0, 5.0], iterates=1000)
        self.assertTrue(result.diverged)
        self.assertTrue(np.all(np.isnan(result.exponents)))
        self.assertEqual(classify_attractor(MIRA, MIRA.params(), None, result).tag, DIVERGED)

    def test_kind_is_checked(self):
        with self.assertRaises(PreconditionError):
            lyapunov_flow(MIRA, MIRA.params(), np.zeros(3))
        with self.assertRaises(PreconditionError):
            lyapunov_map(ACT, ACT.params(), np.zeros(3))


class ClassifyAttractorTests(SimpleTestCase):

    def test_positive_leading_exponent_is_chaotic(self):
        self.assertEqual(classify_attractor(ACT, ACT.params(), None, _result(0.05, 0.0, -0.45)).tag, CHAOTIC)

    def test_drifting_marginal_exponent_is_unresolved(self):
        result = _result(5e-4, -0.1, -0.3, drift=1e-2)
        self.assertEqual(classify_attractor(ACT, ACT.params(), None, result).tag, UNRESOLVED)

    def test_flow_signatures(self):
        params = ACT.params()
        self.assertEqual(classify_attractor(ACT, params, None, _result(-0.1, -0.2, -0.1)).tag, FIXED_POINT)
        self.assertEqual(classify_attractor(ACT, params, None, _result(0.0, -0.2, -0.2)).tag, CYCLE)
        torus = classify_attractor(ACT, params, None, _result(0.0, 0.0, -0.4))
        self.assertEqual(torus.tag, INVARIANT_CURVE)
        self.assertIn('note', torus.evidence)

    def test_map_signatures(self):
        params = MIRA.params()
        still = np.zeros((100, 3))
        triangle = np.tile(np.eye(3), (40, 1))
        self.assertEqual(classify_attractor(MIRA, params, still, _result(-0.1, -0.3, -0.3)).tag, FIXED_POINT)
        cycle = classify_attractor(MIRA, params, triangle, _result(-0.1, -0.3, -0.3))
        self.assertEqual(cycle.tag, CYCLE)
        self.assertEqual(cycle.evidence['period'], 3)
        self.assertEqual(classify_attractor(MIRA, params, None, _result(2e-4, -0.3, -0.4)).tag, INVARIANT_CURVE)

    def test_map_without_orbit_has_unknown_period(self):
        unknown = classify_attractor(MIRA, MIRA.params(), None, _result(-0.1, -0.3, -0.3))
        self.assertEqual(unknown.tag, CYCLE)
        self.assertIsNone(unknown.evidence['period'])
        self.assertIn('unknown', unknown.evidence['note'])

    def test_stable_mira_fixed_point(self):
        params = MIRA.params(C=-1.2)
        result = lyapunov_map(MIRA, params, [0.1, 0.1, 0.1], iterates=5000)
        orbit = iterate_map(MIRA, result.endpoint, params, 100).y
        self.assertEqual(classify_attractor(MIRA, params, orbit, result).tag, FIXED_POINT)


class ComponentTests(SimpleTestCase):

    def test_single_circle(self):
        k, closed = count_curve_components(MIRA, MIRA.params(), _circle(4000))
        self.assertEqual(k, 1)
        self.assertEqual(len(closed), 1)

    def test_alternating_circles(self):
        left = _circle(2000, center=(-3.0, 0.0, 0.0))
        right = _circle(2000, center=(3.0, 0.0, 0.0))
        orbit = np.empty((4000, 3))
        orbit[0::2] = left
        orbit[1::2] = right
        k, closed = count_curve_components(MIRA, MIRA.params(), orbit)
        self.assertEqual(k, 2)
        self.assertEqual(len(closed), 2)

    def test_nested_circles_visited_alternately(self):
        orbit = np.empty((4000, 3))
        orbit[0::2] = _circle(2000, radius=1.0)
        orbit[1::2] = _circle(2000, radius=1.1)
        k, closed = count_curve_components(MIRA, MIRA.params(), orbit)
        self.assertEqual(k, 2)
        self.assertEqual(closed, [True, True])

    def test_unevenly_visited_circle_is_one_curve(self):
        angles = GOLDEN_TURN * np.arange(4000)
        angles = angles + 0.4 * np.sin(7.0 * angles) / 7.0
        orbit = np.zeros((4000, 3))
        orbit[:, 0] = np.cos(angles)
        orbit[:, 1] = np.sin(angles)
        k, closed = count_curve_components(MIRA, MIRA.params(), orbit)
        self.assertEqual(k, 1)
        self.assertEqual(closed, [True])

    def test_finite_support_is_rejected(self):
        with self.assertRaises(PreconditionError):
            count_curve_components(MIRA, MIRA.params(), np.tile(np.eye(3), (100, 1)))


@tag('slow')
class AttractorReproductionTests(SimpleTestCase):

    def _map_class(self, params):
        result = lyapunov_map(MIRA, params, cold_seed(MIRA, params), iterates=200000)
        orbit = iterate_map(MIRA, result.endpoint, params, 16000).y
        return classify_attractor(MIRA, params, orbit, result), orbit, result

    def test_act_spiral_chaos(self):
        params = ACT.params(mu=0.8, beta=0.4)
        result = lyapunov_flow(ACT, params, cold_seed(ACT, params))
        self.assertNotEqual(result.status, ESCAPED)
        self.assertGreater(result.leading, 0.01)

    def test_gaspard_nicolis_spiral_chaos(self):
        params = GASPARD_NICOLIS.params(beta=0.385)
        result = lyapunov_flow(GASPARD_NICOLIS, params, cold_seed(GASPARD_NICOLIS, params), horizon=2000.0)
        self.assertNotEqual(result.status, ESCAPED)
        self.assertGreater(result.leading, 0.0)

    def test_mira_invariant_curve_doubling(self):
        for c, expected in ((-1.7, 1), (-1.73, 2), (-1.76, 4), (-1.77, 8)):
            params = MIRA.params(C=c)
            attractor, orbit, _ = self._map_class(params)
            self.assertEqual(attractor.tag, INVARIANT_CURVE, msg=f'C={c}')
            k, _ = count_curve_components(MIRA, params, orbit)
            self.assertEqual(k, expected, msg=f'C={c}')

    def test_nonorientable_invariant_curves(self):
        for c, expected in ((-2.723, 1), (-2.733, 2)):
            params = MIRA.params(A=-2.786, B=-0.915, C=c)
            attractor, orbit, _ = self._map_class(params)
            self.assertEqual(attractor.tag, INVARIANT_CURVE, msg=f'C={c}')
            k, _ = count_curve_components(MIRA, params, orbit)
            self.assertEqual(k, expected, msg=f'C={c}')

    def test_mira_chaos(self):
        attractor, _, result = self._map_class(MIRA.params(C=-1.8))
        self.assertEqual(attractor.tag, CHAOTIC)
        self.assertAlmostEqual(float(result.exponents.sum()), math.log(0.5), delta=1e-3)
