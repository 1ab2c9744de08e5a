import numpy as np
from django.test import SimpleTestCase, tag

from dynamics.equilibria import equilibrium_at, tracked_equilibrium
from dynamics.exceptions import PreconditionError
from dynamics.manifolds import (
    LEFT_BOX, STABLE, UNSTABLE, eigenvector, grow_unstable_surface, track_separatrix, unstable_plane,
)
from dynamics.systems import ACT

from .fixtures import SADDLE_FOCUS_12, SADDLE_FOCUS_21, no_params


def _origin(system):
    return equilibrium_at(system, no_params(system), np.zeros(3))


class SeparatrixTests(SimpleTestCase):

    def test_linear_stable_separatrix_runs_along_the_axis(self):
        eq = _origin(SADDLE_FOCUS_12)
        for side in (1, -1):
            sep = track_separatrix(SADDLE_FOCUS_12, no_params(SADDLE_FOCUS_12), eq, STABLE, side=side)
            self.assertEqual(sep.status, LEFT_BOX)
            self.assertFalse(sep.inside)
            np.testing.assert_allclose(sep.points[:, :2], 0.0, atol=1e-12)
            self.assertEqual(np.sign(sep.points[-1, 2]), side)

    def test_linear_unstable_separatrix(self):
        eq = _origin(SADDLE_FOCUS_21)
        sep = track_separatrix(SADDLE_FOCUS_21, no_params(SADDLE_FOCUS_21), eq, UNSTABLE)
        self.assertEqual(sep.status, LEFT_BOX)
        self.assertGreater(sep.arc_length, 40.0)

    def test_wrong_class_is_rejected(self):
        eq = _origin(SADDLE_FOCUS_21)
        with self.assertRaises(PreconditionError):
            track_separatrix(SADDLE_FOCUS_21, no_params(SADDLE_FOCUS_21), eq, STABLE)

    def test_eigenvector_orientation_is_deterministic(self):
        eq = _origin(SADDLE_FOCUS_12)
        vec = eigenvector(SADDLE_FOCUS_12, no_params(SADDLE_FOCUS_12), eq, -1.0)
        np.testing.assert_allclose(vec, [0.0, 0.0, 1.0], atol=1e-12)


class UnstablePlaneTests(SimpleTestCase):

    def test_plane_of_the_linear_saddle_focus(self):
        e1, e2 = unstable_plane(SADDLE_FOCUS_12, no_params(SADDLE_FOCUS_12), _origin(SADDLE_FOCUS_12))
        self.assertAlmostEqual(e1[2], 0.0)
        self.assertAlmostEqual(e2[2], 0.0)
        self.assertAlmostEqual(float(np.dot(e1, e2)), 0.0)
        self.assertAlmostEqual(float(np.linalg.norm(e2)), 1.0)

    def test_needs_a_saddle_focus_12(self):
        with self.assertRaises(PreconditionError):
            unstable_plane(SADDLE_FOCUS_21, no_params(SADDLE_FOCUS_21), _origin(SADDLE_FOCUS_21))


class SurfaceTests(SimpleTestCase):

    def setUp(self):
        self.params = ACT.params(mu=0.8, beta=0.4)
        self.eq = tracked_equilibrium(ACT, self.params)

    def test_fan_needs_sixteen_trajectories(self):
        with self.assertRaises(PreconditionError):
            grow_unstable_surface(ACT, self.params, self.eq, n=8)

    def test_seeds_sit_on_a_circle_around_the_saddle_focus(self):
        surface = grow_unstable_surface(ACT, self.params, self.eq, n=16, horizon=5.0)
        self.assertEqual(surface.count, 16)
        radii = np.linalg.norm(surface.seeds - self.eq.state, axis=1)
        np.testing.assert_allclose(radii, 1e-3, rtol=1e-9)

    def test_parallel_fan_matches_serial(self):
        serial = grow_unstable_surface(ACT, self.params, self.eq, n=16, horizon=20.0, jobs=1)
        parallel = grow_unstable_surface(ACT, self.params, self.eq, n=16, horizon=20.0, jobs=2)
        for a, b in zip(serial.rings, parallel.rings):
            np.testing.assert_array_equal(a.states, b.states)


@tag('slow')
class ActSeparatrixTests(SimpleTestCase):

    def test_stable_separatrix_escapes_on_both_sides_near_the_loop(self):
        for mu in (0.855, 0.87):
            params = ACT.params(mu=mu, beta=0.4)
            eq = tracked_equilibrium(ACT, params)
            outcomes = [track_separatrix(ACT, params, eq, STABLE, side=s).inside for s in (1, -1)]
            self.assertEqual(outcomes, [False, False], msg=f'mu={mu}')
