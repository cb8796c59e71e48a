import math
import unittest

import numpy as np

from models.channelModel import (SPEED_OF_LIGHT, ComplexGain, GeometryConfig, Scenario, build_collinear_scenario,
                                 db_to_linear, friis_power_gain, gain_from_distance, linear_to_db, wavelength,
                                 wrap_phase)
from utils.errors import DomainError


class TestChannelModel(unittest.TestCase):

    def setUp(self):
        self.carrier = 1.8e9
        self.geometry = GeometryConfig(d_sd=1000.0, d_se=500.0, carrier_hz=self.carrier, snr_d_db=10.0,
                                       pe_over_ps=1.0)

    def test_friis_reference_value(self):
        """
        Test the power gain at 1000 m and 1.8 GHz
        """
        result = friis_power_gain(1000.0, self.carrier)
        expected = (SPEED_OF_LIGHT / (4 * math.pi * self.carrier * 1000.0)) ** 2

        self.assertAlmostEqual(result, expected, delta=1e-24)
        self.assertAlmostEqual(result / 1.757e-10, 1.0, delta=1e-3)

    def test_friis_inverse_square(self):
        """
        Test that doubling distance or frequency quarters the gain
        """
        base = friis_power_gain(700.0, self.carrier)

        self.assertAlmostEqual(friis_power_gain(1400.0, self.carrier) / base, 0.25, delta=1e-15)
        self.assertAlmostEqual(friis_power_gain(700.0, 2 * self.carrier) / base, 0.25, delta=1e-15)

    def test_friis_strictly_decreasing(self):
        """
        Test monotonicity in distance and frequency
        """
        distances = np.linspace(1.0, 5000.0, 200)
        gains = [friis_power_gain(d, self.carrier) for d in distances]
        self.assertTrue(all(later < earlier for earlier, later in zip(gains, gains[1:])))

        carriers = np.linspace(1e8, 6e9, 50)
        gains = [friis_power_gain(100.0, f) for f in carriers]
        self.assertTrue(all(later < earlier for earlier, later in zip(gains, gains[1:])))

    def test_friis_rejects_bad_input(self):
        """
        Test domain errors for non-positive distance and frequency
        """
        for d, f in ((0.0, self.carrier), (-5.0, self.carrier), (10.0, 0.0), (10.0, -1.0), (float("nan"), 1e9)):
            with self.assertRaises(DomainError):
                friis_power_gain(d, f)

    def test_gain_phase_convention(self):
        """
        Test phases at one wavelength and at half a wavelength
        """
        lam = wavelength(self.carrier)

        self.assertAlmostEqual(gain_from_distance(lam, self.carrier).phase, 0.0, delta=1e-9)

        half = gain_from_distance(lam / 2, self.carrier).phase
        self.assertAlmostEqual(abs(half), math.pi, delta=1e-9)
        self.assertGreater(half, -math.pi)

    def test_gain_magnitude_matches_friis(self):
        """
        Test |h|^2 against the Friis gain at random distances
        """
        rng = np.random.default_rng(3)
        for d in rng.uniform(1.0, 5000.0, 50):
            gain = gain_from_distance(d, self.carrier)
            self.assertAlmostEqual(gain.power / friis_power_gain(d, self.carrier), 1.0, delta=1e-12)

    def test_wrap_phase(self):
        """
        Test wrapping into (-pi, pi]
        """
        self.assertAlmostEqual(wrap_phase(-math.pi), math.pi)
        self.assertAlmostEqual(wrap_phase(math.pi), math.pi)
        self.assertAlmostEqual(wrap_phase(3 * math.pi / 2), -math.pi / 2)
        self.assertAlmostEqual(wrap_phase(4 * math.pi), 0.0)

    def test_db_conversions(self):
        """
        Test decibel round trip and the 10 dB reference
        """
        self.assertAlmostEqual(db_to_linear(10.0), 10.0)
        self.assertAlmostEqual(linear_to_db(db_to_linear(-3.5)), -3.5)
        with self.assertRaises(DomainError):
            linear_to_db(0.0)

    def test_complex_gain_validation(self):
        """
        Test that non-finite components are rejected and zero gains have phase 0
        """
        with self.assertRaises(DomainError):
            ComplexGain(float("inf"), 0.0)
        with self.assertRaises(DomainError):
            ComplexGain(0.0, float("nan"))

        self.assertEqual(ComplexGain().phase, 0.0)
        self.assertAlmostEqual(ComplexGain.from_polar(2.0, 0.3).magnitude, 2.0)

    def test_scenario_validation(self):
        """
        Test power and noise invariants
        """
        h = ComplexGain(1.0, 0.0)
        with self.assertRaises(DomainError):
            Scenario(h, h, h, p_s=0.0, p_e=1.0)
        with self.assertRaises(DomainError):
            Scenario(h, h, h, p_s=1.0, p_e=-1.0)
        with self.assertRaises(DomainError):
            Scenario(h, h, h, p_s=1.0, p_e=1.0, sigma2=0.0)

        s = Scenario(h, h, h, p_s=4.0, p_e=0.0, sigma2=2.0)
        self.assertEqual(s.ps_norm, 2.0)
        self.assertEqual(s.pe_norm, 0.0)

    def test_geometry_validation(self):
        """
        Test that distances and carrier must be positive
        """
        with self.assertRaises(DomainError):
            GeometryConfig(d_se=0.0)
        with self.assertRaises(DomainError):
            GeometryConfig(carrier_hz=-1.0)
        with self.assertRaises(DomainError):
            GeometryConfig(pe_over_ps=-0.5)

    def test_collinear_reference_snr(self):
        """
        Test that the unattacked destination SNR equals the configured 10 dB
        """
        s = build_collinear_scenario(self.geometry)

        self.assertEqual(s.sigma2, 1.0)
        self.assertAlmostEqual(s.ps_norm * s.g_sd, 10.0, delta=1e-12)
        self.assertAlmostEqual(s.p_e, s.p_s)

    def test_collinear_half_distance(self):
        """
        Test |h_SE|^2 = 4 |h_SD|^2 at half the source-destination distance
        """
        s = build_collinear_scenario(self.geometry)
        self.assertAlmostEqual(s.g_se / s.g_sd, 4.0, delta=1e-12)

    def test_collinear_colocation_clamp(self):
        """
        Test that the eavesdropper-destination distance is clamped when they coincide
        """
        geometry = GeometryConfig(d_sd=1000.0, d_se=1000.0, min_distance_m=1.0)
        s = build_collinear_scenario(geometry)

        self.assertEqual(geometry.d_ed, 1.0)
        self.assertAlmostEqual(s.g_ed / friis_power_gain(1.0, geometry.carrier_hz), 1.0, delta=1e-12)

    def test_collinear_fields_finite_over_sweep(self):
        """
        Test that every sweep distance yields a valid scenario
        """
        for d_se in np.arange(50.0, 3001.0, 25.0):
            s = build_collinear_scenario(GeometryConfig(d_se=float(d_se)))
            for value in (s.g_sd, s.g_se, s.g_ed, s.ps_norm, s.pe_norm):
                self.assertTrue(math.isfinite(value) and value > 0)

    def test_rotated_scenario_keeps_powers(self):
        """
        Test that phase rotations leave power gains unchanged
        """
        s = build_collinear_scenario(self.geometry)
        rotated = s.rotated(0.4, -1.2, 2.9)

        self.assertAlmostEqual(rotated.g_sd / s.g_sd, 1.0, delta=1e-12)
        self.assertAlmostEqual(rotated.g_se / s.g_se, 1.0, delta=1e-12)
        self.assertAlmostEqual(rotated.g_ed / s.g_ed, 1.0, delta=1e-12)


if __name__ == '__main__':
    unittest.main(verbosity=2)
