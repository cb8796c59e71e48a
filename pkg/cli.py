import csv
import io
import os

import click
from tabulate import tabulate

from config import get_cfg
from experiments.distanceSweep import DistanceSweep, SweepConfig, summarise
from models.leakageModel import envelope_curves, passive_leakage
from optimisation.attackOptimiser import AttackOptimiser
from utils.errors import LeakageError
from utils.serialisation import SOLUTION_CSV_HEADER, format_value, load_scenario, solution_row, write_csv
from verification.oracle import GridOracle
from verification.verifySuite import VerifySuite


CURVES_CSV_HEADER = ["rho", "gamma_d_max", "gamma_d_min", "gamma_e"]


def load_cfg(path=None):
    """
    Default config merged with an optional YAML override file

    Args:
        path (str): YAML file in the format of resources/*.yaml

    Returns:
        CfgNode: The frozen config
    """
    cfg = get_cfg()
    if path:
        try:
            cfg.merge_from_file(path)
        except (KeyError, ValueError, AssertionError) as e:
            raise click.ClickException(f"{path}: {e}")
    cfg.freeze()
    return cfg


def parse_grid(ctx, param, value):
    if value is None:
        return None
    try:
        sizes = tuple(int(part) for part in value.split(","))
    except ValueError:
        raise click.BadParameter("expected three integers n_rho,n_mag,n_phase")
    if len(sizes) != 3 or min(sizes) < 2:
        raise click.BadParameter("expected three integers n_rho,n_mag,n_phase, each at least 2")
    return sizes


def _csv_line(header, row):
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(header)
    writer.writerow([format_value(value) for value in row])
    return buffer.getvalue()


@click.group()
def cli():
    """
    Spoofing relay attack leakage simulator
    """


@cli.command()
@click.option("--scenario", "scenario_path", required=True, type=click.Path(exists=True, dir_okay=False),
              help="JSON or YAML file holding scenario fields or a collinear geometry")
@click.option("--out", "out_path", type=click.Path(dir_okay=False), help="Write the solution record as CSV")
@click.option("--config", "config_path", type=click.Path(exists=True, dir_okay=False), help="YAML config overrides")
def solve(scenario_path, out_path, config_path):
    """
    Solve the attack for a single scenario
    """
    cfg = load_cfg(config_path)

    try:
        scenario, _ = load_scenario(scenario_path)
        solution = AttackOptimiser.from_cfg(cfg).timed_solve(scenario)
        passive = passive_leakage(scenario)

        row = solution_row(solution, passive)
        if out_path:
            write_csv(out_path, SOLUTION_CSV_HEADER, [row])
    except (LeakageError, OSError) as e:
        raise click.ClickException(str(e))

    table = [
        ["strategy", solution.strategy.value],
        ["rho*", format_value(solution.rho_star)],
        ["|v*|", format_value(solution.v_star.magnitude)],
        ["angle v* (rad)", format_value(solution.v_star.phase)],
        ["gamma_D", format_value(solution.gamma_d)],
        ["gamma_E", format_value(solution.gamma_e)],
        ["leakage (bps/Hz)", format_value(solution.leakage_bps_hz)],
        ["residual", format_value(solution.residual)],
        ["passive leakage (bps/Hz)", format_value(passive)],
        ["gain over passive (bps/Hz)", format_value(solution.leakage_bps_hz - passive)]
    ]
    if solution.quartic_rho is not None:
        table.append(["quartic rho", format_value(solution.quartic_rho)])

    click.echo(tabulate(table, tablefmt="plain"))
    click.echo()
    click.echo(_csv_line(SOLUTION_CSV_HEADER, row), nl=False)


@cli.command()
@click.option("--config", "config_path", type=click.Path(exists=True, dir_okay=False), help="YAML config overrides")
@click.option("--out", "out_path", required=True, type=click.Path(dir_okay=False), help="Output CSV path")
@click.option("--quiet", is_flag=True, help="Hide the progress bar")
def sweep(config_path, out_path, quiet):
    """
    Sweep the eavesdropper along the source-destination line
    """
    cfg = load_cfg(config_path)

    try:
        sweep_cfg = SweepConfig.from_cfg(cfg, output=out_path)
        records = DistanceSweep(AttackOptimiser.from_cfg(cfg), quiet=quiet).run_sweep(sweep_cfg)
        summary = summarise(records)
    except (LeakageError, OSError) as e:
        raise click.ClickException(str(e))

    regions = [[strategy.value, format_value(first), format_value(last)] for strategy, (first, last) in
               summary["regions"]]

    click.echo(f"Wrote {len(records)} rows to {out_path}")
    click.echo(tabulate(regions, headers=["strategy", "from d_se (m)", "to d_se (m)"]))
    click.echo()
    click.echo(tabulate([
        ["max active leakage (bps/Hz)", format_value(summary["max_active_bps_hz"]),
         format_value(summary["max_active_d_se_m"])],
        ["max gain over passive (bps/Hz)", format_value(summary["max_gain_bps_hz"]),
         format_value(summary["max_gain_d_se_m"])]
    ], headers=["", "value", "at d_se (m)"]))


@cli.command()
@click.option("--seed", type=click.IntRange(min=0), default=None, help="Seed of the random scenarios")
@click.option("--scenarios", "n_scenarios", type=click.IntRange(min=1), default=None, help="Number of scenarios")
@click.option("--grid", callback=parse_grid, default=None, help="Oracle grid sizes n_rho,n_mag,n_phase")
@click.option("--config", "config_path", type=click.Path(exists=True, dir_okay=False), help="YAML config overrides")
@click.option("--quiet", is_flag=True, help="Hide the progress bar")
def verify(seed, n_scenarios, grid, config_path, quiet):
    """
    Check the closed-form solver against brute-force and Monte-Carlo oracles
    """
    cfg = load_cfg(config_path)
    cfg.defrost()
    if seed is not None:
        cfg.VERIFY.SEED = seed
    if n_scenarios is not None:
        cfg.VERIFY.N_SCENARIOS = n_scenarios
    if grid is not None:
        cfg.ORACLE.N_RHO, cfg.ORACLE.N_MAG, cfg.ORACLE.N_PHASE = grid
    cfg.freeze()

    try:
        report = VerifySuite(cfg, oracle=GridOracle.from_cfg(cfg), quiet=quiet).run()
    except (LeakageError, OSError) as e:
        raise click.ClickException(str(e))

    click.echo(tabulate(report.rows(), tablefmt="plain"))

    if report.passed:
        click.echo("PASS")
        return

    for failure in report.failures:
        click.echo(f"FAIL [{failure.check}] scenario {failure.index}: {failure.message}", err=True)
        # repr keeps every digit for replay
        click.echo(tabulate([[key, repr(value)] for key, value in failure.scenario.items()],
                            tablefmt="plain", disable_numparse=True), err=True)
        if failure.path:
            click.echo(f"saved to {failure.path}", err=True)
    raise click.ClickException(f"{len(report.failures)} checks failed")


@cli.command()
@click.option("--scenario", "scenario_path", required=True, type=click.Path(exists=True, dir_okay=False),
              help="JSON or YAML file holding scenario fields or a collinear geometry")
@click.option("--out", "out_path", required=True, type=click.Path(dir_okay=False), help="Output CSV path")
@click.option("--points", type=click.IntRange(min=2), default=201, show_default=True, help="Number of rho values")
def curves(scenario_path, out_path, points):
    """
    Export the achievable SNR envelopes at D and the eavesdropper SNR over rho
    """
    try:
        scenario, _ = load_scenario(scenario_path)
        values = envelope_curves(scenario, points)
        rows = zip(*(values[column].tolist() for column in CURVES_CSV_HEADER))
        write_csv(out_path, CURVES_CSV_HEADER, rows)
    except (LeakageError, OSError) as e:
        raise click.ClickException(str(e))

    click.echo(f"Wrote {points} rows to {os.path.abspath(out_path)}")


if __name__ == '__main__':
    cli()
