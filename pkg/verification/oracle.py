import csv
import math
import time
from dataclasses import dataclass

import numpy as np

from models.channelModel import ComplexGain, Scenario
from models.leakageModel import (eavesdropper_snr, effective_snr_d_array, power_cap, snr_d_max, snr_d_min,
                                 check_rho)
from utils.errors import DomainError
from utils.logger import setup_logger


GRID_CSV_HEADER = ["rho", "v_re", "v_im", "gamma_d", "gamma_e", "feasible"]


@dataclass(frozen=True)
class OracleResult:
    """
    Best leakage found by exhaustive search and the control achieving it
    """
    leakage_bps_hz: float
    rho_hat: float
    v_hat: ComplexGain
    resolution_bound: float
    gamma_d: float = 0.0
    gamma_e: float = 0.0
    n_feasible: int = 0


def make_rng(seed):
    """
    Counter-based generator with a documented stream per seed

    Args:
        seed (int): Non-negative seed

    Returns:
        np.random.Generator: A Philox-backed generator
    """
    return np.random.Generator(np.random.Philox(seed))


def cscg_samples(rng, n, variance=1.0):
    """
    Circularly-symmetric complex Gaussian samples CN(0, variance) by the
    Box-Muller transform of uniform draws

    Args:
        rng (np.random.Generator): Source of uniforms
        n (int): Number of samples
        variance (float): E|z|^2

    Returns:
        np.ndarray: Complex samples
    """
    u1 = rng.random(n)
    u2 = rng.random(n)

    # 1 - u1 lies in (0, 1], so the logarithm stays finite
    radius = np.sqrt(-variance * np.log1p(-u1))
    return radius * np.exp(2j * np.pi * u2)


def random_scenario(rng, gain_range=(1e-3, 10.0), power_range=(0.1, 1000.0)):
    """
    Draws a unit-noise scenario with log-uniform power gains and normalised
    powers and uniform channel phases

    Args:
        rng (np.random.Generator): Source of randomness
        gain_range (tuple): Range of |h|^2 for all three links
        power_range (tuple): Range of P_S / sigma2 and P_E / sigma2

    Returns:
        Scenario: The random scenario
    """
    log_gains = rng.uniform(math.log(gain_range[0]), math.log(gain_range[1]), 3)
    log_powers = rng.uniform(math.log(power_range[0]), math.log(power_range[1]), 2)
    phases = rng.uniform(-math.pi, math.pi, 3)

    gains = np.exp(log_gains)
    powers = np.exp(log_powers)

    return Scenario.from_power_gains(gains[0], gains[1], gains[2], powers[0], powers[1], phases=tuple(phases))


def random_controls(s, rho, n, rng):
    """
    Feasible amplification coefficients, uniform over the disc allowed by the power budget

    Args:
        s (Scenario): The scenario
        rho (float): Power splitting ratio
        n (int): Number of coefficients
        rng (np.random.Generator): Source of randomness

    Returns:
        np.ndarray: Complex coefficients
    """
    cap = power_cap(s, rho)
    magnitudes = cap * np.sqrt(rng.random(n))
    phases = rng.uniform(0.0, 2 * np.pi, n)
    return magnitudes * np.exp(1j * phases)


def envelope_samples(s, rho, n_samples, seed=0):
    """
    Effective SNRs at D for feasible controls at a fixed rho: no transmission,
    both envelope maximisers, then random coefficients

    Args:
        s (Scenario): The scenario
        rho (float): Power splitting ratio
        n_samples (int): Total number of samples
        seed (int): Seed of the random coefficients

    Returns:
        np.ndarray: The achieved SNRs
    """
    check_rho(rho)
    if n_samples < 1:
        raise DomainError(f"Need at least one sample, got {n_samples}")

    anchors = [0.0, snr_d_max(s, rho).v_opt.value, snr_d_min(s, rho).v_opt.value][:n_samples]
    random_part = random_controls(s, rho, n_samples - len(anchors), make_rng(seed))

    v = np.concatenate([np.asarray(anchors, dtype=complex), random_part])
    return effective_snr_d_array(s, rho, v)


def monte_carlo_snr_d(s, c, n_symbols, seed):
    """
    Estimates the SNR at D from simulated symbols: the relay transmits
    v (sqrt(rho) h_SE sqrt(P_S) d_S + n_R), D receives it together with the
    direct path and its own noise

    Args:
        s (Scenario): The scenario
        c (RelayControl): The relay action
        n_symbols (int): Number of simulated symbols
        seed (int): Generator seed

    Returns:
        float: Signal-coefficient power times empirical symbol power over empirical noise power
    """
    if n_symbols < 10000:
        raise DomainError(f"Monte-Carlo estimate needs at least 1e4 symbols, got {n_symbols}")

    rng = make_rng(seed)
    d_s = cscg_samples(rng, n_symbols, 1.0)
    n_relay = cscg_samples(rng, n_symbols, s.sigma2)
    n_d = cscg_samples(rng, n_symbols, s.sigma2)

    v = c.v.value
    amplitude = math.sqrt(s.p_s)

    x_e = v * (math.sqrt(c.rho) * s.h_se.value * amplitude * d_s + n_relay)
    y_d = s.h_sd.value * amplitude * d_s + s.h_ed.value * x_e + n_d

    coefficient = s.h_sd.value + v * math.sqrt(c.rho) * s.h_se.value * s.h_ed.value
    noise = y_d - coefficient * amplitude * d_s

    signal_power = abs(coefficient) ** 2 * s.p_s * np.mean(np.abs(d_s) ** 2)
    return float(signal_power / np.mean(np.abs(noise) ** 2))


class GridOracle:
    def __init__(self, n_rho=256, n_mag=256, n_phase=64):
        """
        Constructor for GridOracle class

        Args:
            n_rho (int): Uniform splitting ratios on [0, 1]
            n_mag (int): Uniform amplification magnitudes on [0, power cap(rho)]
            n_phase (int): Uniform amplification phases on [0, 2 pi)
        """
        self.logger = setup_logger(name="verification")

        for name, size in (("n_rho", n_rho), ("n_mag", n_mag), ("n_phase", n_phase)):
            if int(size) < 2:
                raise DomainError(f"Grid size {name} must be at least 2, got {size}")

        self.n_rho = int(n_rho)
        self.n_mag = int(n_mag)
        self.n_phase = int(n_phase)

        self.rho = np.linspace(0.0, 1.0, self.n_rho)
        self.unit_mags = np.linspace(0.0, 1.0, self.n_mag)
        self.phases = np.arange(self.n_phase) * (2 * np.pi / self.n_phase)

        self.logger.debug(f"Grid oracle with {self.n_rho} x {self.n_mag} x {self.n_phase} controls")

    @classmethod
    def from_cfg(cls, cfg):
        return cls(cfg.ORACLE.N_RHO, cfg.ORACLE.N_MAG, cfg.ORACLE.N_PHASE)

    def _slice_controls(self, s, rho):
        # Magnitudes are renormalised per rho so full-power controls are on the grid
        mags = self.unit_mags * power_cap(s, rho)
        return mags[:, None] * np.exp(1j * self.phases)[None, :]

    def evaluate(self, s):
        """
        Exhaustively searches the (rho, |v|, angle v) grid for the largest
        leakage among controls the eavesdropper can decode

        Args:
            s (Scenario): The scenario

        Returns:
            OracleResult: Best grid control, its leakage and an accuracy estimate
        """
        t_start = time.perf_counter()

        gamma_d = np.empty((self.n_rho, self.n_mag, self.n_phase))
        gamma_e = eavesdropper_snr(s, self.rho)

        for index, rho in enumerate(self.rho):
            gamma_d[index] = effective_snr_d_array(s, rho, self._slice_controls(s, rho))

        feasible = gamma_d <= gamma_e[:, None, None]
        n_feasible = int(feasible.sum())

        if n_feasible:
            # argmax returns the lowest flat index among ties
            flat = int(np.argmax(np.where(feasible, gamma_d, -np.inf)))
        else:
            flat = int(np.argmin(gamma_d - gamma_e[:, None, None]))
        i, j, k = np.unravel_index(flat, gamma_d.shape)

        bound = self._resolution_bound(gamma_d, gamma_e, (i, j, k))

        if n_feasible:
            rho_hat = float(self.rho[i])
            v_hat = ComplexGain.from_complex(self._slice_controls(s, rho_hat)[j, k])
            best_d = float(gamma_d[i, j, k])
            leakage = math.log2(1.0 + best_d)
        else:
            rho_hat, v_hat, best_d, leakage = 0.0, ComplexGain(), s.ps_norm * s.g_sd, 0.0

        t_finish = time.perf_counter()
        self.logger.debug(f"Grid oracle time: {t_finish - t_start:0.4f} seconds, {n_feasible} feasible points")

        return OracleResult(leakage_bps_hz=leakage,
                            rho_hat=rho_hat,
                            v_hat=v_hat,
                            resolution_bound=bound,
                            gamma_d=best_d,
                            gamma_e=float(eavesdropper_snr(s, rho_hat)),
                            n_feasible=n_feasible)

    def _resolution_bound(self, gamma_d, gamma_e, index):
        """
        Local Lipschitz estimate of how far the grid optimum can sit from the
        true optimum: one grid step of leakage change along every axis around
        the best point, plus the change of the eavesdropper rate along rho.
        Reported for diagnostics only, agreement is judged against a fixed tolerance

        Args:
            gamma_d (np.ndarray): D-side SNR on the full grid
            gamma_e (np.ndarray): Eavesdropper SNR per rho
            index (tuple): Grid index of the best (or least infeasible) point

        Returns:
            float: The resolution bound in bps/Hz
        """
        i, j, k = index
        rate = np.log2(1.0 + gamma_d)
        rate_e = np.log2(1.0 + gamma_e)

        rows = slice(max(i - 1, 0), min(i + 2, self.n_rho))
        mags = slice(max(j - 1, 0), min(j + 2, self.n_mag))
        phases = [(k - 1) % self.n_phase, k, (k + 1) % self.n_phase]
        block = rate[rows, mags][:, :, phases]

        bound = 0.0
        for axis in range(3):
            if block.shape[axis] > 1:
                bound += float(np.max(np.abs(np.diff(block, axis=axis))))
        bound += float(np.max(np.abs(np.diff(rate_e[rows])))) if rate_e[rows].size > 1 else 0.0

        return bound + 1e-12

    def dump_csv(self, s, path):
        """
        Writes every grid point with its SNRs and feasibility

        Args:
            s (Scenario): The scenario
            path (str): Output CSV path
        """
        with open(path, "w", newline="") as csvfile:
            writer = csv.writer(csvfile)
            writer.writerow(GRID_CSV_HEADER)

            for rho in self.rho:
                controls = self._slice_controls(s, rho).ravel()
                gamma_d = effective_snr_d_array(s, rho, controls)
                gamma_e = float(eavesdropper_snr(s, rho))

                for v, snr in zip(controls, gamma_d):
                    writer.writerow([f"{rho:.9g}", f"{v.real:.9g}", f"{v.imag:.9g}", f"{snr:.9g}",
                                     f"{gamma_e:.9g}", int(snr <= gamma_e)])
