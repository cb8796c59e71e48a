import math
import unittest

import numpy as np

from models.channelModel import ComplexGain, Scenario
from models.leakageModel import (RelayControl, active_rate_d, active_rate_e, eavesdropper_snr, effective_snr_d,
                                 effective_snr_d_array, envelope_curves, passive_leakage, passive_rate_d, power_cap,
                                 relay_power_used, rho1, rho2, snr_d_max, snr_d_max_gamma, snr_d_min,
                                 snr_d_min_gamma, within_power_budget)
from utils.errors import DomainError, PowerConstraintError


def unit_scenario(g_sd, g_se, g_ed, ps_norm, pe_norm, phases=(0.0, 0.0, 0.0)):
    return Scenario.from_power_gains(g_sd, g_se, g_ed, ps_norm, pe_norm, phases=phases)


class TestLeakageModel(unittest.TestCase):

    def setUp(self):
        self.rng = np.random.default_rng(11)
        self.reference = unit_scenario(1.0, 1.0, 1.0, 10.0, 10.0)

    def random_scenario(self):
        gains = np.exp(self.rng.uniform(math.log(1e-3), math.log(10.0), 3))
        powers = np.exp(self.rng.uniform(math.log(0.1), math.log(1000.0), 2))
        phases = tuple(self.rng.uniform(-math.pi, math.pi, 3))
        return unit_scenario(gains[0], gains[1], gains[2], powers[0], powers[1], phases)

    def test_passive_leakage_rule(self):
        """
        Test that leakage is the legitimate rate when decodable and zero otherwise
        """
        decodable = unit_scenario(1.0, 2.0, 1.0, 10.0, 10.0)
        self.assertAlmostEqual(passive_leakage(decodable), math.log2(11.0))

        secure = unit_scenario(1.0, 0.5, 1.0, 10.0, 10.0)
        self.assertEqual(passive_leakage(secure), 0.0)

        tie = unit_scenario(1.0, 1.0, 1.0, 10.0, 10.0)
        self.assertAlmostEqual(passive_leakage(tie), passive_rate_d(tie))

    def test_effective_snr_reference(self):
        """
        Test the closed-form SNR at D for rho = 0.25 and v = 1
        """
        control = RelayControl(0.25, ComplexGain(1.0, 0.0))
        self.assertAlmostEqual(effective_snr_d(self.reference, control), 11.25, delta=1e-12)

    def test_effective_snr_no_relay(self):
        """
        Test that v = 0 gives the unattacked SNR for every rho
        """
        s = self.random_scenario()
        for rho in (0.0, 0.3, 1.0):
            result = effective_snr_d(s, RelayControl(rho))
            self.assertAlmostEqual(result / (s.ps_norm * s.g_sd), 1.0, delta=1e-12)

    def test_power_constraint(self):
        """
        Test that controls above the budget are rejected
        """
        cap = power_cap(self.reference, 0.5)
        self.assertAlmostEqual(cap, math.sqrt(10.0 / 6.0))

        at_cap = RelayControl(0.5, ComplexGain(cap, 0.0))
        self.assertTrue(within_power_budget(self.reference, at_cap))
        self.assertAlmostEqual(relay_power_used(self.reference, at_cap), 10.0)

        above = RelayControl(0.5, ComplexGain(1.01 * cap, 0.0))
        with self.assertRaises(PowerConstraintError):
            effective_snr_d(self.reference, above)

    def test_rho_domain(self):
        """
        Test rho outside [0, 1] is rejected
        """
        with self.assertRaises(DomainError):
            RelayControl(1.5)
        with self.assertRaises(DomainError):
            eavesdropper_snr(self.reference, -0.1)

    def test_eavesdropper_snr(self):
        """
        Test the eavesdropper SNR end points and linear decrease
        """
        s = unit_scenario(1.0, 2.0, 1.0, 10.0, 10.0)

        self.assertAlmostEqual(eavesdropper_snr(s, 0.0), 20.0)
        self.assertAlmostEqual(eavesdropper_snr(s, 0.25), 15.0)
        self.assertEqual(eavesdropper_snr(s, 1.0), 0.0)
        self.assertAlmostEqual(active_rate_e(s, 0.25), math.log2(16.0))

    def test_active_rate_d(self):
        """
        Test the active rate is the capacity of the effective SNR
        """
        control = RelayControl(0.25, ComplexGain(1.0, 0.0))
        self.assertAlmostEqual(active_rate_d(self.reference, control), math.log2(12.25))

    def test_rho1_reference(self):
        """
        Test the max-envelope breakpoint for the unit reference scenario
        """
        expected = (-1.0 + math.sqrt(401.0)) / 20.0
        self.assertAlmostEqual(rho1(self.reference), min(1.0, expected), delta=1e-12)

        small = unit_scenario(1.0, 1.0, 1.0, 10.0, 0.25)
        self.assertAlmostEqual(rho1(small), (-1.0 + math.sqrt(11.0)) / 20.0, delta=1e-12)

    def test_rho1_degenerate(self):
        """
        Test rho1 = 1 without an eavesdropper channel and 0 without relay power
        """
        self.assertEqual(rho1(unit_scenario(1.0, 0.0, 1.0, 10.0, 10.0)), 1.0)
        self.assertEqual(rho1(unit_scenario(1.0, 1.0, 1.0, 10.0, 0.0)), 0.0)

    def test_rho2_constant(self):
        """
        Test rho2 equals C inside [0, 1] and 1 otherwise
        """
        # C = 1 / (1 * (1 * 100 - 1 * 10)) = 1/90
        s = unit_scenario(1.0, 1.0, 1.0, 10.0, 100.0)
        self.assertAlmostEqual(rho2(s), 1.0 / 90.0, delta=1e-15)

        self.assertEqual(rho2(self.reference), 1.0)
        self.assertEqual(rho2(unit_scenario(1.0, 1.0, 1.0, 10.0, 1.0)), 1.0)

    def test_max_envelope_matches_maximiser(self):
        """
        Test that the returned maximiser reaches the returned maximum
        """
        for _ in range(50):
            s = self.random_scenario()
            for rho in (0.0, 0.1, 0.5, 0.9, 1.0):
                envelope = snr_d_max(s, rho)
                control = RelayControl(rho, envelope.v_opt)

                self.assertTrue(within_power_budget(s, control))
                self.assertAlmostEqual(effective_snr_d(s, control) / envelope.gamma, 1.0, delta=1e-9)

    def test_min_envelope_matches_minimiser(self):
        """
        Test that the returned minimiser reaches the returned minimum
        """
        for _ in range(50):
            s = self.random_scenario()
            for rho in (0.0, 0.1, 0.5, 0.9, 1.0):
                envelope = snr_d_min(s, rho)
                control = RelayControl(rho, envelope.v_opt)

                self.assertTrue(within_power_budget(s, control))
                achieved = effective_snr_d(s, control)
                self.assertAlmostEqual(achieved, envelope.gamma, delta=1e-9 * (1.0 + s.ps_norm * s.g_sd))

    def test_envelopes_contain_random_controls(self):
        """
        Test that random feasible controls stay inside [min, max]
        """
        for _ in range(20):
            s = self.random_scenario()
            for rho in np.linspace(0.0, 1.0, 5):
                cap = power_cap(s, rho)
                v = cap * np.sqrt(self.rng.random(500)) * np.exp(2j * np.pi * self.rng.random(500))
                values = effective_snr_d_array(s, rho, v)

                upper = snr_d_max_gamma(s, rho)
                lower = snr_d_min_gamma(s, rho)
                margin = 1e-9 * (1.0 + upper)
                self.assertTrue(np.all(values <= upper + margin))
                self.assertTrue(np.all(values >= lower - margin))

    def test_power_tightness(self):
        """
        Test that capped envelope maximisers and minimisers spend the whole relay budget
        """
        for _ in range(50):
            s = self.random_scenario()
            for rho in np.linspace(0.0, 1.0, 21):
                rho = float(rho)
                if rho > rho1(s):
                    control = RelayControl(rho, snr_d_max(s, rho).v_opt)
                    self.assertAlmostEqual(relay_power_used(s, control) / s.p_e, 1.0, delta=1e-9)
                if 0.0 < rho < rho2(s):
                    control = RelayControl(rho, snr_d_min(s, rho).v_opt)
                    self.assertAlmostEqual(relay_power_used(s, control) / s.p_e, 1.0, delta=1e-9)

    def test_max_envelope_nondecreasing(self):
        """
        Test the upper envelope never falls as rho grows
        """
        rho = np.linspace(0.0, 1.0, 2001)
        for _ in range(50):
            s = self.random_scenario()
            gamma = snr_d_max_gamma(s, rho)
            self.assertGreaterEqual(np.min(np.diff(gamma)), -1e-9 * (1.0 + np.max(gamma)))

    def test_min_envelope_nonincreasing_below_rho2(self):
        """
        Test the lower envelope never rises on [0, rho2] when the signal can be nulled
        """
        scenarios = [unit_scenario(1.0, 1.0, 1.0, 10.0, 100.0)]
        for _ in range(200):
            s = self.random_scenario()
            if rho2(s) < 1.0:
                scenarios.append(s)

        for s in scenarios:
            gamma = snr_d_min_gamma(s, np.linspace(0.0, rho2(s), 501))
            self.assertLessEqual(np.max(np.diff(gamma)), 1e-9 * (1.0 + np.max(gamma)))

    def test_min_envelope_may_rise_without_nulling(self):
        """
        Test that with rho2 = 1 the shrinking power cap lets the lower envelope rise
        """
        s = unit_scenario(0.4676, 1.493e-3, 3.59e-3, 711.7, 7.10)

        self.assertEqual(rho2(s), 1.0)
        self.assertGreater(snr_d_min_gamma(s, 0.5), snr_d_min_gamma(s, 0.3))
        self.assertGreater(snr_d_min_gamma(s, 1.0), 0.0)

    def test_max_envelope_interior_branch(self):
        """
        Test (|h_SD|^2 + rho |h_SE|^2) P_S below rho1
        """
        s = unit_scenario(1.0, 1.0, 1.0, 10.0, 10.0)
        rho = 0.5 * rho1(s)
        self.assertAlmostEqual(snr_d_max_gamma(s, rho), (1.0 + rho) * 10.0, delta=1e-12)

    def test_min_envelope_zero_beyond_rho2(self):
        """
        Test that the minimum is zero once the source signal can be nulled
        """
        s = unit_scenario(1.0, 1.0, 1.0, 10.0, 100.0)
        self.assertEqual(snr_d_min_gamma(s, 0.5), 0.0)
        self.assertAlmostEqual(snr_d_min_gamma(s, rho2(s)), 0.0, delta=1e-9)
        self.assertGreater(snr_d_min_gamma(s, 0.5 * rho2(s)), 0.0)

    def test_envelopes_continuous_at_breakpoints(self):
        """
        Test continuity of both envelopes across rho1 and rho2
        """
        r1 = rho1(self.reference)
        self.assertLess(r1, 1.0)
        self.assertAlmostEqual(snr_d_max_gamma(self.reference, r1 - 1e-9), snr_d_max_gamma(self.reference, r1 + 1e-9),
                               delta=1e-6)

        s = unit_scenario(1.0, 1.0, 1.0, 10.0, 100.0)

        r2 = rho2(s)
        self.assertAlmostEqual(snr_d_min_gamma(s, r2 - 1e-9), snr_d_min_gamma(s, r2 + 1e-9), delta=1e-6)

    def test_envelope_curves(self):
        """
        Test the sampled curves and their ordering
        """
        curves = envelope_curves(self.reference, 11)

        self.assertListEqual(sorted(curves), ["gamma_d_max", "gamma_d_min", "gamma_e", "rho"])
        self.assertEqual(curves["rho"].size, 11)
        self.assertTrue(np.all(curves["gamma_d_min"] <= curves["gamma_d_max"]))
        self.assertAlmostEqual(curves["gamma_e"][0], 10.0)

        with self.assertRaises(DomainError):
            envelope_curves(self.reference, 1)


if __name__ == '__main__':
    unittest.main(verbosity=2)
