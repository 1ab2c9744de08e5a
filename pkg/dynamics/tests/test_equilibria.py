import numpy as np
from django.test import SimpleTestCase

from dynamics.equilibria import (
    NON_HYPERBOLIC, SADDLE, SADDLE_FOCUS_12, SADDLE_FOCUS_21, STABLE_FOCUS, STABLE_NODE,
    check_o1_saddle_focus_grid, classify, continue_equilibrium, eigenvalues_3x3,
    equilibrium_at, find_equilibria, locate_hopf, locate_ns_and_fold, map_test_functions,
    order_spectrum, refine_equilibrium, tracked_equilibrium,
)
from dynamics.exceptions import NotFound, PreconditionError
from dynamics.systems import ACT, GASPARD_NICOLIS, MAP, MIRA

from .fixtures import DECAY, DRIFT, SADDLE_FOCUS_12 as SF12_FLOW, SADDLE_FOCUS_21 as SF21_FLOW, no_params


def _match(found, expected, tol):
    remaining = list(expected)
    for value in found:
        distances = [abs(value - other) for other in remaining]
        best = int(np.argmin(distances))
        if distances[best] > tol:
            return False
        remaining.pop(best)
    return True


class SpectrumTests(SimpleTestCase):

    def test_closed_form_matches_numpy(self):
        rng = np.random.default_rng(11)
        for _ in range(200):
            m = rng.normal(size=(3, 3))
            found = list(eigenvalues_3x3(m))
            expected = list(np.linalg.eigvals(m))
            scale = max(1.0, max(abs(v) for v in expected))
            self.assertTrue(_match(found, expected, 1e-9 * scale), msg=f'{found} vs {expected}')

    def test_flow_order_is_by_real_part(self):
        spectrum = order_spectrum([complex(-1.0), complex(0.5, 1.0), complex(0.5, -1.0)])
        self.assertEqual(spectrum[0].real, 0.5)
        self.assertEqual(spectrum.complex_pair[0], complex(0.5, 1.0))
        self.assertEqual(spectrum[2], complex(-1.0))
        self.assertEqual(spectrum.real_value, -1.0)

    def test_map_order_is_by_modulus(self):
        spectrum = order_spectrum([complex(0.2), complex(-3.0), complex(1.5)], MAP)
        self.assertEqual([v.real for v in spectrum], [-3.0, 1.5, 0.2])
        self.assertIsNone(spectrum.complex_pair)


class ClassifyTests(SimpleTestCase):

    def test_linear_saddle_foci(self):
        sf12 = equilibrium_at(SF12_FLOW, no_params(SF12_FLOW), np.zeros(3))
        sf21 = equilibrium_at(SF21_FLOW, no_params(SF21_FLOW), np.zeros(3))
        self.assertEqual(sf12.cls.tag, SADDLE_FOCUS_12)
        self.assertAlmostEqual(sf12.cls.sigma, -0.5)
        self.assertEqual(sf21.cls.tag, SADDLE_FOCUS_21)
        self.assertAlmostEqual(sf21.cls.sigma, 0.5)

    def test_real_spectra(self):
        self.assertEqual(equilibrium_at(DECAY, no_params(DECAY), np.zeros(3)).cls.tag, STABLE_NODE)
        spectrum = order_spectrum([complex(1.0), complex(-1.0), complex(-2.0)])
        self.assertEqual(classify(spectrum).tag, SADDLE)

    def test_zero_real_part_is_non_hyperbolic(self):
        spectrum = order_spectrum([complex(0.0, 1.0), complex(0.0, -1.0), complex(-1.0)])
        self.assertEqual(classify(spectrum).tag, NON_HYPERBOLIC)

    def test_act_equilibria(self):
        params = ACT.params(mu=0.8, beta=0.4)
        o1 = equilibrium_at(ACT, params, np.zeros(3))
        o2 = tracked_equilibrium(ACT, params)
        self.assertEqual(o1.cls.tag, SADDLE_FOCUS_21)
        self.assertEqual(o2.cls.tag, SADDLE_FOCUS_12)
        np.testing.assert_allclose(o2.state, [1.0, 0.0, 0.0], atol=1e-12)
        self.assertEqual(tracked_equilibrium(ACT, ACT.params(mu=0.3)).cls.tag, STABLE_FOCUS)

    def test_mira_origin_is_orientable_saddle_focus(self):
        eq = tracked_equilibrium(MIRA, MIRA.params())
        self.assertEqual(eq.cls.tag, SADDLE_FOCUS_12)
        self.assertEqual(eq.cls.orientation, 1)
        self.assertIsNone(eq.cls.sigma)

    def test_origin_saddle_focus_over_beta(self):
        tags = check_o1_saddle_focus_grid(ACT, [0.1, 0.4, 1.0])
        self.assertEqual(set(tags.values()), {SADDLE_FOCUS_21})


class SearchTests(SimpleTestCase):

    def test_act_has_two_equilibria(self):
        found = find_equilibria(ACT, ACT.params())
        self.assertEqual(len(found), 2)
        np.testing.assert_allclose(found[0].state, [0.0, 0.0, 0.0], atol=1e-10)
        np.testing.assert_allclose(found[1].state, [1.0, 0.0, 0.0], atol=1e-10)

    def test_empty_seed_box(self):
        with self.assertRaises(PreconditionError):
            find_equilibria(ACT, ACT.params(), seed_box=((1.0, 1.0, 1.0), (0.0, 0.0, 0.0)))

    def test_no_equilibrium(self):
        self.assertEqual(find_equilibria(DRIFT, no_params(DRIFT), n_seeds=8), [])
        with self.assertRaises(NotFound):
            refine_equilibrium(DRIFT, no_params(DRIFT), np.zeros(3))

    def test_continuation_follows_the_branch(self):
        branch = continue_equilibrium(ACT, ACT.params(), 'mu', [0.3, 0.5, 0.7])
        self.assertEqual([eq.cls.tag for eq in branch], [STABLE_FOCUS, SADDLE_FOCUS_12, SADDLE_FOCUS_12])


class BoundaryTests(SimpleTestCase):

    def test_act_hopf_at_mu_equal_beta(self):
        located = locate_hopf(ACT, ACT.params(beta=0.4), 'mu', (0.2, 0.6))
        self.assertEqual(located.label, 'andronov-hopf')
        self.assertAlmostEqual(located.value, 0.4, delta=1e-6)
        lo, hi = located.bracket
        self.assertLessEqual(hi - lo, 1e-6)

    def test_gaspard_nicolis_hopf(self):
        located = locate_hopf(GASPARD_NICOLIS, GASPARD_NICOLIS.params(), 'beta', (0.2, 0.3))
        self.assertAlmostEqual(located.value, 0.261, delta=2e-3)

    def test_hopf_needs_a_sign_change(self):
        with self.assertRaises(NotFound):
            locate_hopf(ACT, ACT.params(beta=0.4), 'mu', (0.5, 0.6))

    def test_hopf_rejects_maps(self):
        with self.assertRaises(PreconditionError):
            locate_hopf(MIRA, MIRA.params(), 'C', (-1.6, -1.2))

    def test_map_test_functions_at_the_mira_origin(self):
        params = MIRA.params(C=-0.99)
        tests = map_test_functions(MIRA.jac(np.zeros(3), params))
        self.assertAlmostEqual(tests['fold'], 0.0, delta=1e-12)

    def test_orientable_boundaries(self):
        found = locate_ns_and_fold(MIRA, MIRA.params(), 'C', (-1.6, -0.8))
        by_label = {loc.label: loc for loc in found}
        self.assertEqual(set(by_label), {'neimark-sacker', 'fold'})
        self.assertAlmostEqual(by_label['neimark-sacker'].value, -1.495, delta=1e-4)
        self.assertAlmostEqual(by_label['fold'].value, -0.99, delta=1e-4)
        self.assertEqual(by_label['neimark-sacker'].details['stable_side'], 'above')
        self.assertEqual(by_label['fold'].details['stable_side'], 'below')

    def test_nonorientable_boundaries(self):
        params = MIRA.params(A=-2.786, B=-0.915, C=-2.743)
        found = locate_ns_and_fold(MIRA, params, 'C', (-2.75, -2.69))
        values = {loc.label: loc.value for loc in found}
        self.assertAlmostEqual(values['neimark-sacker'], -2.712, delta=1e-3)
        self.assertAlmostEqual(values['flip'], -2.701, delta=1e-3)
        fold = locate_ns_and_fold(MIRA, params, 'C', (4.6, 4.8))
        self.assertAlmostEqual(fold[0].value, 4.701, delta=1e-3)

    def test_nonorientable_origin_is_stable_only_between_ns_and_flip(self):
        def radius(c):
            jac = MIRA.jac(np.zeros(3), MIRA.params(A=-2.786, B=-0.915, C=c))
            return float(np.max(np.abs(np.linalg.eigvals(jac))))

        self.assertLess(radius(-2.706), 1.0)
        for c in (-2.72, -2.69, 0.0, 4.0):
            self.assertGreater(radius(c), 1.0, msg=f'C={c}')
        found = locate_ns_and_fold(MIRA, MIRA.params(A=-2.786, B=-0.915), 'C', (-2.75, -2.69))
        sides = {loc.label: loc.details['stable_side'] for loc in found}
        self.assertEqual(sides['flip'], 'below')
        self.assertEqual(sides['neimark-sacker'], 'above')

    def test_no_crossing_in_range(self):
        with self.assertRaises(NotFound):
            locate_ns_and_fold(MIRA, MIRA.params(), 'C', (-1.3, -1.1))
