import enum
import math
import time
from dataclasses import dataclass

import numpy as np

from models.channelModel import ComplexGain
from models.leakageModel import (RelayControl, effective_snr_d, eavesdropper_snr, snr_d_max, snr_d_min,
                                 snr_d_max_gamma, snr_d_min_gamma)
from optimisation.rootFinding import bisect, first_sign_change, polynomial_real_roots
from utils.errors import DomainError
from utils.logger import setup_logger


class StrategyClass(enum.Enum):
    CONSTRUCTIVE_FORWARDING = "constructive"
    JAMMING_ONLY = "jamming"
    DESTRUCTIVE_FORWARDING_PLUS_JAMMING = "destructive_jamming"
    INFEASIBLE = "infeasible"


@dataclass(frozen=True)
class AttackSolution:
    """
    Optimal spoofing relay action for a scenario and the leakage it achieves
    """
    strategy: StrategyClass
    rho_star: float
    v_star: ComplexGain
    gamma_d: float
    gamma_e: float
    leakage_bps_hz: float
    residual: float
    jam_power_used: float
    quartic_rho: float = None

    @property
    def feasible(self):
        return self.strategy is not StrategyClass.INFEASIBLE

    def to_dict(self):
        """
        Packages the solution with the field names used by the CSV outputs

        Returns:
            dict: A JSON-serialisable record
        """
        return {
            "strategy": self.strategy.value,
            "rho_star": self.rho_star,
            "v_mag": self.v_star.magnitude,
            "v_phase": self.v_star.phase,
            "gamma_d": self.gamma_d,
            "gamma_e": self.gamma_e,
            "leakage_bps_hz": self.leakage_bps_hz,
            "residual": self.residual,
            "jam_power": self.jam_power_used
        }


def classify_case(s):
    """
    Places a scenario in one of the three attack regimes by comparing |h_SE|^2
    with |h_SD|^2 and with the full-power-jamming threshold |h_SD|^2 / (1 + |h_ED|^2 P_E).
    Both thresholds belong to the jamming regime

    Args:
        s (Scenario): The scenario

    Returns:
        StrategyClass: The regime (never INFEASIBLE)
    """
    if s.g_sd < s.g_se:
        return StrategyClass.CONSTRUCTIVE_FORWARDING

    jamming_threshold = s.g_sd / (1.0 + s.g_ed * s.pe_norm)
    if s.g_se < jamming_threshold:
        return StrategyClass.DESTRUCTIVE_FORWARDING_PLUS_JAMMING

    return StrategyClass.JAMMING_ONLY


def quartic_coefficients(s):
    """
    Quartic in rho whose roots contain every crossing of the minimum D-side SNR
    with the eavesdropper SNR. Obtained by isolating the radical
    sqrt(rho (1 + rho |h_SE|^2 P_S)) and squaring, so it also carries spurious roots

    Args:
        s (Scenario): The scenario

    Returns:
        tuple: The quartic (highest degree first) and the quadratic left of the radical
    """
    a, b, c = s.g_sd, s.g_se, s.g_ed
    beta = b * s.ps_norm
    delta = 1.0 + c * s.pe_norm
    k = 4.0 * a * b * c * s.pe_norm

    l2 = b * beta
    l1 = a * beta + b * c * s.pe_norm - b * beta + b * delta
    l0 = a - b * delta

    quartic = (l2 * l2,
               2.0 * l2 * l1,
               l1 * l1 + 2.0 * l2 * l0 - k * beta,
               2.0 * l1 * l0 - k,
               l0 * l0)
    return quartic, (l2, l1, l0)


class AttackOptimiser:
    def __init__(self, n_scan=4096, atol=1e-12, rtol=1e-9, max_iter=200, quartic_cross_check=False):
        """
        Constructor for AttackOptimiser class

        Args:
            n_scan (int): Uniform points of the first sign-change scan for destructive forwarding
            atol (float): Bisection tolerance on the absolute SNR gap
            rtol (float): Bisection tolerance on the SNR gap, relative to 1 + eavesdropper SNR
            max_iter (int): Maximum bisection iterations
            quartic_cross_check (bool): Also solve the destructive crossing through its quartic
        """
        self.logger = setup_logger(name="optimisation")

        if n_scan < 2:
            raise DomainError(f"n_scan must be at least 2, got {n_scan}")

        self.n_scan = int(n_scan)
        self.atol = atol
        self.rtol = rtol
        self.max_iter = int(max_iter)
        self.quartic_cross_check = quartic_cross_check

        self.logger.debug(f"Solver scan {self.n_scan} points, bisection atol {atol:g}, rtol {rtol:g}, "
                          f"max {self.max_iter} iterations")

    @classmethod
    def from_cfg(cls, cfg):
        solver = cfg.SOLVER
        return cls(n_scan=solver.N_SCAN, atol=solver.ATOL, rtol=solver.RTOL,
                   max_iter=solver.MAX_ITER, quartic_cross_check=solver.QUARTIC_CROSS_CHECK)

    def solve_attack(self, s):
        """
        Maximises the information leakage rate over the splitting ratio and the
        amplification coefficient, subject to the eavesdropper decoding the rate
        the source adapts to

        Args:
            s (Scenario): The scenario

        Returns:
            AttackSolution: The optimal action, or an infeasible result with zero leakage
        """
        case = classify_case(s)
        self.logger.debug(f"Scenario classified as {case.value}")

        if case is StrategyClass.CONSTRUCTIVE_FORWARDING:
            return self.solve_case1(s)
        elif case is StrategyClass.JAMMING_ONLY:
            return self.solve_case2(s)
        return self.solve_case3(s)

    def solve_case1(self, s):
        """
        Eavesdropper already has the better channel: forward constructively up
        to the unique crossing of the maximum D-side SNR and the eavesdropper SNR

        Args:
            s (Scenario): A scenario with |h_SD|^2 < |h_SE|^2

        Returns:
            AttackSolution: Constructive forwarding at the crossing
        """
        gap = self._gap(s, snr_d_max_gamma)
        bracket = bisect(gap, 0.0, 1.0, atol=self.atol, rtol=self.rtol, max_iter=self.max_iter,
                         scale=lambda rho: 1.0 + eavesdropper_snr(s, rho))

        # The gap increases with rho, so the left end keeps D decodable by E
        rho_star = bracket.lo
        v_star = snr_d_max(s, rho_star).v_opt

        return self._package(s, StrategyClass.CONSTRUCTIVE_FORWARDING, rho_star, v_star)

    def solve_case2(self, s):
        """
        Jam with amplified noise only, just hard enough to pull the D-side SNR
        down to the eavesdropper's

        Args:
            s (Scenario): A scenario inside the jamming regime

        Returns:
            AttackSolution: Jamming with rho = 0
        """
        if s.g_se >= s.g_sd:
            jam_power = 0.0
        else:
            jam_power = (s.g_sd / s.g_se - 1.0) / s.g_ed
        jam_power = min(jam_power, s.pe_norm)

        phase = math.pi + s.h_sd.phase - s.h_se.phase - s.h_ed.phase
        v_star = ComplexGain.from_polar(math.sqrt(jam_power), phase)

        return self._package(s, StrategyClass.JAMMING_ONLY, 0.0, v_star)

    def solve_case3(self, s):
        """
        Forward destructively while jamming. The optimum is the smallest rho at
        which the minimum D-side SNR falls to the eavesdropper SNR; without such
        a crossing the attack cannot make the link decodable

        Args:
            s (Scenario): A scenario below the full-power-jamming threshold

        Returns:
            AttackSolution: Destructive forwarding plus jamming, or an infeasible result
        """
        grid = np.linspace(0.0, 1.0, self.n_scan)
        gaps = snr_d_min_gamma(s, grid) - eavesdropper_snr(s, grid)

        if gaps[0] <= 0.0:
            return self._package(s, StrategyClass.DESTRUCTIVE_FORWARDING_PLUS_JAMMING, 0.0,
                                 snr_d_min(s, 0.0).v_opt)

        index = first_sign_change(gaps)
        if index is None:
            self.logger.debug(f"No crossing on {self.n_scan} points, smallest gap {gaps.min():.6g}")
            return self._infeasible(s)

        gap = self._gap(s, snr_d_min_gamma)
        bracket = bisect(gap, float(grid[index]), float(grid[index + 1]), atol=self.atol, rtol=self.rtol,
                         max_iter=self.max_iter, scale=lambda rho: 1.0 + eavesdropper_snr(s, rho))

        # The gap falls through zero here, so the right end keeps D decodable by E
        rho_star = bracket.hi
        v_star = snr_d_min(s, rho_star).v_opt

        quartic_rho = None
        if self.quartic_cross_check:
            quartic_rho = self.quartic_root(s)
            if quartic_rho is None or abs(quartic_rho - rho_star) > 1e-6:
                self.logger.warning(f"Quartic root {quartic_rho} disagrees with bisection root {rho_star:.12g}")

        return self._package(s, StrategyClass.DESTRUCTIVE_FORWARDING_PLUS_JAMMING, rho_star, v_star,
                             quartic_rho=quartic_rho)

    def quartic_root(self, s):
        """
        Smallest genuine root in [0, 1] of the destructive crossing quartic.
        Roots introduced by squaring make the isolated quadratic negative and are dropped

        Args:
            s (Scenario): The scenario

        Returns:
            float: The smallest genuine root, or None
        """
        quartic, quadratic = quartic_coefficients(s)
        scale = max(abs(x) for x in quadratic) or 1.0

        for root in polynomial_real_roots(quartic, lo=-1e-9, hi=1.0 + 1e-9):
            if np.polyval(quadratic, root) >= -1e-9 * scale:
                return min(max(root, 0.0), 1.0)
        return None

    def _gap(self, s, envelope):
        return lambda rho: float(envelope(s, rho) - eavesdropper_snr(s, rho))

    def _package(self, s, strategy, rho_star, v_star, quartic_rho=None):
        control = RelayControl(rho_star, v_star)
        gamma_d = effective_snr_d(s, control)
        gamma_e = eavesdropper_snr(s, rho_star)

        return AttackSolution(strategy=strategy,
                              rho_star=rho_star,
                              v_star=v_star,
                              gamma_d=gamma_d,
                              gamma_e=gamma_e,
                              leakage_bps_hz=math.log2(1.0 + gamma_d),
                              residual=gamma_d - gamma_e,
                              jam_power_used=v_star.power * s.sigma2,
                              quartic_rho=quartic_rho)

    def _infeasible(self, s):
        gamma_d = s.ps_norm * s.g_sd
        gamma_e = s.ps_norm * s.g_se

        return AttackSolution(strategy=StrategyClass.INFEASIBLE,
                              rho_star=0.0,
                              v_star=ComplexGain(),
                              gamma_d=gamma_d,
                              gamma_e=gamma_e,
                              leakage_bps_hz=0.0,
                              residual=gamma_d - gamma_e,
                              jam_power_used=0.0)

    def timed_solve(self, s):
        """
        Solves a scenario and logs the solver time

        Args:
            s (Scenario): The scenario

        Returns:
            AttackSolution: As solve_attack
        """
        t_start = time.perf_counter()
        solution = self.solve_attack(s)
        t_finish = time.perf_counter()

        self.logger.info(f"Solve time: {t_finish - t_start:0.4f} seconds")
        if not solution.feasible:
            self.logger.warning("Spoofing relay attack is not sufficient for this scenario, leakage is zero")
        return solution
