import time
from dataclasses import dataclass, replace

import numpy as np
from tqdm import tqdm

from models.channelModel import GeometryConfig, build_collinear_scenario
from models.leakageModel import passive_leakage
from optimisation.attackOptimiser import AttackOptimiser, StrategyClass
from utils.errors import DomainError
from utils.logger import setup_logger
from utils.serialisation import write_csv


SWEEP_CSV_HEADER = ["d_se_m", "passive_bps_hz", "active_bps_hz", "strategy", "rho_star", "v_mag", "jam_power"]


@dataclass(frozen=True)
class SweepConfig:
    """
    Eavesdropper distances start, start + step, ... up to stop (inclusive) on
    the collinear geometry of a template
    """
    geometry: GeometryConfig
    start: float = 50.0
    stop: float = 3000.0
    step: float = 5.0
    output: str = None

    def __post_init__(self):
        if not self.start < self.stop:
            raise DomainError(f"Sweep start {self.start} must be below stop {self.stop}")
        if not self.step > 0:
            raise DomainError(f"Sweep step must be positive, got {self.step}")
        if not self.start > 0:
            raise DomainError(f"Sweep distances must be positive, got start {self.start}")

    @classmethod
    def from_cfg(cls, cfg, output=None):
        """
        Reads the GEOMETRY and SWEEP nodes of a config

        Args:
            cfg (CfgNode): A config created by config.get_cfg
            output (str): Optional override of SWEEP.OUTPUT

        Returns:
            SweepConfig: The sweep description
        """
        return cls(geometry=GeometryConfig.from_cfg(cfg),
                   start=float(cfg.SWEEP.START),
                   stop=float(cfg.SWEEP.STOP),
                   step=float(cfg.SWEEP.STEP),
                   output=output if output is not None else cfg.SWEEP.OUTPUT)

    def distances(self):
        n_points = int(np.floor((self.stop - self.start) / self.step + 1e-9)) + 1
        # Rounded so 5 m steps land exactly on round distances
        return np.round(self.start + self.step * np.arange(n_points), 9)


@dataclass(frozen=True)
class SweepRecord:
    d_se: float
    passive_leakage: float
    active_leakage: float
    strategy: StrategyClass
    rho_star: float
    v_mag: float
    jam_power: float

    def to_row(self):
        return [self.d_se, self.passive_leakage, self.active_leakage, self.strategy.value,
                self.rho_star, self.v_mag, self.jam_power]


def strategy_regions(records):
    """
    Groups consecutive sweep points that share a strategy

    Args:
        records (list): SweepRecords of a single sweep, ordered by distance

    Returns:
        list: (StrategyClass, (first d_se, last d_se)) for each maximal run
    """
    if not records:
        raise DomainError("Cannot extract strategy regions from an empty sweep")

    regions = []
    current = records[0].strategy
    first = last = records[0].d_se

    for record in records[1:]:
        if record.strategy is current:
            last = record.d_se
            continue

        regions.append((current, (first, last)))
        current = record.strategy
        first = last = record.d_se

    regions.append((current, (first, last)))
    return regions


def summarise(records):
    """
    Headline numbers of a sweep

    Args:
        records (list): SweepRecords of a single sweep

    Returns:
        dict: Peak active leakage and its distance, peak gain over passive and its
              distance, and the strategy regions
    """
    if not records:
        raise DomainError("Cannot summarise an empty sweep")

    peak = max(records, key=lambda record: record.active_leakage)
    gain = max(records, key=lambda record: record.active_leakage - record.passive_leakage)

    return {
        "max_active_bps_hz": peak.active_leakage,
        "max_active_d_se_m": peak.d_se,
        "max_gain_bps_hz": gain.active_leakage - gain.passive_leakage,
        "max_gain_d_se_m": gain.d_se,
        "regions": strategy_regions(records)
    }


class DistanceSweep:
    def __init__(self, optimiser=None, quiet=False):
        """
        Constructor for DistanceSweep class

        Args:
            optimiser (AttackOptimiser): Solver used at every point, default settings if None
            quiet (bool): Disables the progress bar
        """
        self.logger = setup_logger(name="experiments")
        self.optimiser = optimiser if optimiser is not None else AttackOptimiser()
        self.quiet = quiet

    def run_sweep(self, cfg):
        """
        Solves the attack at every eavesdropper distance of the sweep and, when
        cfg.output is set, writes the records as CSV

        Args:
            cfg (SweepConfig): The sweep

        Returns:
            list: One SweepRecord per distance, ordered by distance
        """
        distances = cfg.distances()
        if distances.size < 2:
            raise DomainError(f"Sweep needs at least 2 points, got {distances.size}")

        self.logger.info(f"Sweeping d_se over {distances.size} points from {distances[0]:g} m to {distances[-1]:g} m")

        t_start = time.perf_counter()
        records = []

        for d_se in tqdm(distances, desc="d_se", unit="pt", disable=self.quiet):
            scenario = build_collinear_scenario(replace(cfg.geometry, d_se=float(d_se)))
            solution = self.optimiser.solve_attack(scenario)

            records.append(SweepRecord(d_se=float(d_se),
                                       passive_leakage=passive_leakage(scenario),
                                       active_leakage=solution.leakage_bps_hz,
                                       strategy=solution.strategy,
                                       rho_star=solution.rho_star,
                                       v_mag=solution.v_star.magnitude,
                                       jam_power=solution.jam_power_used))

        t_finish = time.perf_counter()
        self.logger.info(f"Sweep time: {t_finish - t_start:0.4f} seconds")

        records.sort(key=lambda record: record.d_se)

        if cfg.output:
            self.save(records, cfg.output)
        return records

    def save(self, records, path):
        """
        Writes sweep records as CSV

        Args:
            records (list): SweepRecords
            path (str): Output path
        """
        self.logger.info(f"Writing {len(records)} records to {path}")
        write_csv(path, SWEEP_CSV_HEADER, (record.to_row() for record in records))
