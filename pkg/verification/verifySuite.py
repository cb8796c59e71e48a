import math
import os
import time
from dataclasses import dataclass, field

import numpy as np
from tqdm import tqdm

from models.leakageModel import RelayControl, effective_snr_d, snr_d_max_gamma, snr_d_min_gamma
from optimisation.attackOptimiser import AttackOptimiser, StrategyClass
from utils.errors import DomainError
from utils.logger import setup_logger
from utils.serialisation import save_scenario
from verification.oracle import GridOracle, envelope_samples, make_rng, monte_carlo_snr_d, random_controls, \
    random_scenario


# Grid sizes at which the agreement tolerance may not exceed ACCEPTANCE_TOL
ACCEPTANCE_GRID = (256, 256, 64)
ACCEPTANCE_TOL = 0.02


@dataclass(frozen=True)
class CheckFailure:
    """
    One failed check, with the scenario that reproduces it
    """
    check: str
    index: int
    message: str
    scenario: dict
    path: str = None


@dataclass
class VerifyReport:
    seed: int
    n_scenarios: int
    max_agreement_gap: float = 0.0
    max_resolution_bound: float = 0.0
    envelope_violations: int = 0
    max_mc_error: float = 0.0
    max_residual: float = 0.0
    strategies: dict = field(default_factory=dict)
    failures: list = field(default_factory=list)
    elapsed: float = 0.0

    @property
    def passed(self):
        return not self.failures

    def rows(self):
        return [
            ["seed", self.seed],
            ["scenarios", self.n_scenarios],
            ["max |solver - oracle| (bps/Hz)", f"{self.max_agreement_gap:.6g}"],
            ["max resolution bound (bps/Hz)", f"{self.max_resolution_bound:.6g}"],
            ["envelope violations", self.envelope_violations],
            ["max Monte-Carlo relative error", f"{self.max_mc_error:.6g}"],
            ["max intersection residual", f"{self.max_residual:.6g}"],
            ["strategies", ", ".join(f"{name}={count}" for name, count in sorted(self.strategies.items()))],
            ["failures", len(self.failures)],
            ["time (s)", f"{self.elapsed:.2f}"]
        ]


class VerifySuite:
    def __init__(self, cfg, optimiser=None, oracle=None, quiet=False):
        """
        Constructor for VerifySuite class. Runs the closed-form solver against
        the grid oracle, the envelope samplers and the Monte-Carlo SNR estimator
        on seeded random scenarios

        Args:
            cfg (CfgNode): A config created by config.get_cfg
            optimiser (AttackOptimiser): Solver under test, built from cfg if None
            oracle (GridOracle): Brute-force reference, built from cfg if None
            quiet (bool): Disables the progress bar
        """
        self.logger = setup_logger(name="verification")
        self.cfg = cfg
        self.optimiser = optimiser if optimiser is not None else AttackOptimiser.from_cfg(cfg)
        self.oracle = oracle if oracle is not None else GridOracle.from_cfg(cfg)
        self.quiet = quiet

        grid = (self.oracle.n_rho, self.oracle.n_mag, self.oracle.n_phase)
        if all(size >= minimum for size, minimum in zip(grid, ACCEPTANCE_GRID)) \
                and cfg.VERIFY.AGREEMENT_TOL > ACCEPTANCE_TOL:
            raise DomainError(f"Agreement tolerance {cfg.VERIFY.AGREEMENT_TOL} bps/Hz exceeds {ACCEPTANCE_TOL} "
                              f"on grid {grid}")

        self.logger.info(f"Verifying with seed {cfg.VERIFY.SEED}, {cfg.VERIFY.N_SCENARIOS} scenarios, "
                         f"grid ({self.oracle.n_rho}, {self.oracle.n_mag}, {self.oracle.n_phase})")

    def scenarios(self):
        """
        The seeded random scenarios of the suite

        Returns:
            list: Scenarios with log-uniform gains and powers
        """
        rng = make_rng(self.cfg.VERIFY.SEED)
        return [random_scenario(rng, tuple(self.cfg.VERIFY.GAIN_RANGE), tuple(self.cfg.VERIFY.POWER_RANGE))
                for _ in range(self.cfg.VERIFY.N_SCENARIOS)]

    def check_agreement(self, s):
        """
        Compares the solver with the grid oracle on one scenario. The grid may
        not beat the solver, and the solver may not claim more than the grid
        finds plus VERIFY.AGREEMENT_TOL

        Args:
            s (Scenario): The scenario

        Returns:
            tuple: (gap, resolution bound, solution, failure message or None)
        """
        solution = self.optimiser.solve_attack(s)
        result = self.oracle.evaluate(s)

        gap = abs(result.leakage_bps_hz - solution.leakage_bps_hz)
        tol = self.cfg.VERIFY.AGREEMENT_TOL

        if result.leakage_bps_hz > solution.leakage_bps_hz + 1e-9:
            message = (f"grid oracle leakage {result.leakage_bps_hz:.9g} beats solver {solution.leakage_bps_hz:.9g} "
                       f"at rho={result.rho_hat:.6g}")
        elif gap > tol and result.n_feasible == 0:
            message = (f"grid oracle has no decodable control but solver reports {solution.strategy.value} "
                       f"with leakage {solution.leakage_bps_hz:.9g}")
        elif gap > tol:
            message = (f"solver {solution.leakage_bps_hz:.9g} exceeds grid oracle {result.leakage_bps_hz:.9g} "
                       f"by {gap:.6g}, tolerance {tol:.6g}")
        else:
            message = None

        return gap, result.resolution_bound, solution, message

    def check_residual(self, solution):
        """
        Intersection solutions must sit on the crossing of both SNRs

        Returns:
            tuple: (scaled residual, failure message or None)
        """
        if solution.strategy not in (StrategyClass.CONSTRUCTIVE_FORWARDING,
                                     StrategyClass.DESTRUCTIVE_FORWARDING_PLUS_JAMMING):
            return 0.0, None

        scaled = abs(solution.residual) / (1.0 + solution.gamma_e)
        if scaled > 1e-9:
            return scaled, f"residual {solution.residual:.6g} at rho={solution.rho_star:.12g}"
        return scaled, None

    def check_envelopes(self, s, seed):
        """
        Samples random feasible controls at uniformly spaced rho and counts SNRs
        outside the closed-form envelope

        Args:
            s (Scenario): The scenario
            seed (int): Seed of the control samples

        Returns:
            tuple: (number of violations, failure message or None)
        """
        tol = self.cfg.VERIFY.ENVELOPE_TOL
        violations = 0
        message = None

        for offset, rho in enumerate(np.linspace(0.0, 1.0, self.cfg.ORACLE.ENVELOPE_RHOS)):
            samples = envelope_samples(s, rho, self.cfg.ORACLE.ENVELOPE_SAMPLES, seed=seed + offset)
            upper = snr_d_max_gamma(s, rho)
            lower = snr_d_min_gamma(s, rho)
            margin = tol * (1.0 + upper)

            outside = int(np.count_nonzero((samples > upper + margin) | (samples < lower - margin)))
            if outside and message is None:
                message = (f"{outside} samples outside [{lower:.9g}, {upper:.9g}] at rho={rho:.6g}, "
                           f"observed [{samples.min():.9g}, {samples.max():.9g}]")
            violations += outside

        return violations, message

    def check_monte_carlo(self, s, rng, seed):
        """
        Compares the closed-form SNR at D with a symbol-level simulation for a
        random feasible control

        Args:
            s (Scenario): The scenario
            rng (np.random.Generator): Source of the random control
            seed (int): Seed of the simulated symbols

        Returns:
            tuple: (relative error, failure message or None)
        """
        n_symbols = self.cfg.ORACLE.MC_SYMBOLS
        rho = float(rng.uniform(0.0, 1.0))
        v = random_controls(s, rho, 1, rng)[0]
        control = RelayControl.from_polar(rho, abs(v), float(np.angle(v)))

        expected = effective_snr_d(s, control, check_power=False)
        measured = monte_carlo_snr_d(s, control, n_symbols, seed)

        error = abs(measured - expected) / max(expected, np.finfo(float).tiny)
        tolerance = 5.0 * math.sqrt(2.0 / n_symbols)
        if error > tolerance:
            return error, (f"Monte-Carlo SNR {measured:.9g} differs from closed form {expected:.9g} "
                           f"by {error:.3g} relative at rho={rho:.6g}, |v|={abs(v):.6g}")
        return error, None

    def _record_failure(self, report, check, index, s, message):
        path = None
        directory = self.cfg.VERIFY.COUNTEREXAMPLE_DIR
        if directory:
            path = os.path.join(directory, f"counterexample_{check}_{report.seed}_{index}.json")
            save_scenario(s, path, extra={"check": check, "index": index, "seed": report.seed, "message": message})

        self.logger.warning(f"{check} check failed on scenario {index}: {message}")
        report.failures.append(CheckFailure(check, index, message, s.to_dict(), path))

    def run(self):
        """
        Runs every check on every scenario of the suite

        Returns:
            VerifyReport: Aggregated results and the failures with their scenarios
        """
        seed = int(self.cfg.VERIFY.SEED)
        report = VerifyReport(seed=seed, n_scenarios=int(self.cfg.VERIFY.N_SCENARIOS))

        t_start = time.perf_counter()
        scenarios = self.scenarios()
        mc_rng = make_rng(seed + 1)
        n_pairs = min(int(self.cfg.ORACLE.MC_PAIRS), len(scenarios))

        for index, s in enumerate(tqdm(scenarios, desc="scenarios", unit="sc", disable=self.quiet)):
            gap, bound, solution, message = self.check_agreement(s)
            report.max_agreement_gap = max(report.max_agreement_gap, gap)
            report.max_resolution_bound = max(report.max_resolution_bound, bound)
            report.strategies[solution.strategy.value] = report.strategies.get(solution.strategy.value, 0) + 1
            if message:
                self._record_failure(report, "agreement", index, s, message)

            residual, message = self.check_residual(solution)
            report.max_residual = max(report.max_residual, residual)
            if message:
                self._record_failure(report, "residual", index, s, message)

            violations, message = self.check_envelopes(s, seed=seed + 1000 * index)
            report.envelope_violations += violations
            if message:
                self._record_failure(report, "envelope", index, s, message)

            if index < n_pairs:
                error, message = self.check_monte_carlo(s, mc_rng, seed=seed + index)
                report.max_mc_error = max(report.max_mc_error, error)
                if message:
                    self._record_failure(report, "monte_carlo", index, s, message)

        t_finish = time.perf_counter()
        report.elapsed = t_finish - t_start
        self.logger.info(f"Verification time: {report.elapsed:0.4f} seconds")

        if report.passed:
            self.logger.info("All checks passed")
        else:
            self.logger.warning(f"{len(report.failures)} checks failed")
        return report
