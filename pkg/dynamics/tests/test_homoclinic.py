import numpy as np
from django.test import SimpleTestCase, tag

from dynamics.chaos import CHAOTIC
from dynamics.cycles import cycle_seed, refine_cycle, sample_cycle
from dynamics.exceptions import NotFound, PreconditionError
from dynamics.homoclinic import (
    RETURN_RADIUS, attractor_distance, detect_shilnikov_attractor, locate_homoclinic_12,
    locate_homoclinic_21,
)
from dynamics.systems import ACT, GASPARD_NICOLIS, MIRA

from .fixtures import SCALED_SADDLE_FOCUS_21


class AttractorDistanceTests(SimpleTestCase):

    def test_distance_from_the_act_cycle(self):
        params = ACT.params(mu=0.5, beta=0.4)
        orbit = refine_cycle(ACT, cycle_seed(ACT, params), params)
        loop = sample_cycle(ACT, params, orbit, samples=4000)
        expected = float(np.min(np.linalg.norm(loop - [1.0, 0.0, 0.0], axis=1)))
        found = attractor_distance(ACT, params, transient=500.0, n_samples=20000)
        self.assertEqual(found.status, 'ok')
        self.assertEqual(found.samples, 20000)
        self.assertAlmostEqual(found.d_min, expected, delta=5e-3)

    def test_orbit_falling_into_a_stable_fixed_point(self):
        params = MIRA.params(C=-1.2)
        found = attractor_distance(MIRA, params, transient=100, n_samples=1000)
        self.assertLess(found.d_min, 1e-6)

    def test_escaping_orbit(self):
        found = attractor_distance(MIRA, MIRA.params(), transient=10, n_samples=100, x0=[5.0, 5.0, 5.0])
        self.assertTrue(found.diverged)
        self.assertEqual(found.d_min, np.inf)


class LocatorPreconditionTests(SimpleTestCase):

    def test_returning_separatrix_is_required(self):
        with self.assertRaises(NotFound):
            locate_homoclinic_21(SCALED_SADDLE_FOCUS_21, SCALED_SADDLE_FOCUS_21.params(), 'k',
                                 (0.5, 2.0), max_time=50.0)

    def test_loops_of_maps_are_not_shot(self):
        with self.assertRaises(PreconditionError):
            locate_homoclinic_12(MIRA, MIRA.params(), 'C', (-1.85, -1.8))

    def test_unknown_loop_method(self):
        with self.assertRaises(PreconditionError):
            locate_homoclinic_12(ACT, ACT.params(beta=0.4), 'mu', (0.85, 0.87), method='shooting')

    def test_diagnostic_needs_a_saddle_focus_12(self):
        with self.assertRaises(PreconditionError):
            detect_shilnikov_attractor(ACT, ACT.params(mu=0.3))


@tag('slow')
class HomoclinicReproductionTests(SimpleTestCase):

    def test_act_homoclinic_12(self):
        params = ACT.params(beta=0.4)
        located = locate_homoclinic_12(ACT, params, 'mu', (0.85, 0.87))
        self.assertAlmostEqual(located.value, 0.86311, delta=1e-3)
        at_loop = attractor_distance(ACT, params.replace(mu=located.value), transient=2e3, n_samples=200_000)
        self.assertLess(at_loop.d_min, 1e-2)

    def test_act_attractor_keeps_away_from_the_saddle_before_the_loop(self):
        found = attractor_distance(ACT, ACT.params(mu=0.8, beta=0.4), transient=2e3, n_samples=200_000)
        self.assertGreater(found.d_min, 0.05)

    def test_act_homoclinic_21(self):
        params = ACT.params(beta=0.4)
        located = locate_homoclinic_21(ACT, params, 'mu', (1.55, 1.65))
        self.assertAlmostEqual(located.value, 1.6062, delta=5e-3)
        halved = locate_homoclinic_21(ACT, params, 'mu', (1.55, 1.65), ball_radius=RETURN_RADIUS / 2)
        self.assertAlmostEqual(halved.value, located.value, delta=5e-3)

    def test_gaspard_nicolis_homoclinic_12(self):
        located = locate_homoclinic_12(GASPARD_NICOLIS, GASPARD_NICOLIS.params(), 'beta', (0.385, 0.40))
        self.assertAlmostEqual(located.value, 0.3921, delta=2e-3)

    def test_orientable_spiral_attractor(self):
        diagnostic = detect_shilnikov_attractor(MIRA, MIRA.params(C=-1.82))
        self.assertEqual(diagnostic.attractor.tag, CHAOTIC)
        self.assertTrue(diagnostic.homoclinic_attractor)
        self.assertEqual(diagnostic.orientation, 1)

    def test_nonorientable_spiral_attractor(self):
        diagnostic = detect_shilnikov_attractor(MIRA, MIRA.params(A=-2.786, B=-0.915, C=-2.743))
        self.assertTrue(diagnostic.homoclinic_attractor)
        self.assertEqual(diagnostic.orientation, -1)

    def test_invariant_curve_is_not_homoclinic(self):
        diagnostic = detect_shilnikov_attractor(MIRA, MIRA.params(C=-1.7))
        self.assertFalse(diagnostic.homoclinic_attractor)
