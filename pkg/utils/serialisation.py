import csv
import json
import math
import os
import re

import yaml

from models.channelModel import ComplexGain, GeometryConfig, Scenario, build_collinear_scenario
from utils.errors import DomainError, ScenarioFileError


SCENARIO_FIELDS = ["h_sd_re", "h_sd_im", "h_se_re", "h_se_im", "h_ed_re", "h_ed_im", "p_s", "p_e", "sigma2"]
GEOMETRY_FIELDS = ["d_sd", "d_se", "carrier_hz", "snr_d_db", "pe_over_ps", "min_distance_m"]

# Geometry fields that may be omitted from a file
GEOMETRY_OPTIONAL = ["carrier_hz", "snr_d_db", "pe_over_ps", "min_distance_m"]

# Labels written next to the nested "scenario" of a counterexample file
COUNTEREXAMPLE_FIELDS = ["check", "index", "seed", "message"]

SOLUTION_CSV_HEADER = ["strategy", "rho_star", "v_mag", "v_phase", "gamma_d", "gamma_e", "leakage_bps_hz",
                       "residual", "jam_power", "passive_bps_hz"]


def format_value(value):
    """
    Formats numbers with 9 significant digits, passes everything else through
    """
    if isinstance(value, bool):
        return str(int(value))
    if isinstance(value, (int, float)):
        return f"{value:.9g}"
    return str(value)


def _field_line(text, field):
    # 1-based line of the first occurrence of a key, if any
    if text is None:
        return None
    match = re.search(r'^\s*"?' + re.escape(field) + r'"?\s*:', text, flags=re.MULTILINE)
    if match is None:
        return None
    return text.count("\n", 0, match.start()) + 1


def _to_float(mapping, field, source, text):
    value = mapping[field]
    if isinstance(value, bool):
        raise ScenarioFileError(source, f"expected a number, got {value!r}", field=field,
                                line=_field_line(text, field))
    try:
        number = float(value)
    except (TypeError, ValueError):
        raise ScenarioFileError(source, f"expected a number, got {value!r}", field=field,
                                line=_field_line(text, field))
    if not math.isfinite(number):
        raise ScenarioFileError(source, f"expected a finite number, got {value!r}", field=field,
                                line=_field_line(text, field))
    return number


def geometry_from_mapping(mapping, source="<mapping>", text=None):
    """
    Builds a GeometryConfig from a flat key-value mapping

    Args:
        mapping (dict): Keys d_sd, d_se and optionally carrier_hz, snr_d_db, pe_over_ps, min_distance_m
        source (str): Name used in diagnostics
        text (str): Raw file text used to locate offending lines

    Returns:
        GeometryConfig: The parsed geometry
    """
    unknown = sorted(set(mapping) - set(GEOMETRY_FIELDS))
    if unknown:
        raise ScenarioFileError(source, "unknown geometry field", field=unknown[0], line=_field_line(text, unknown[0]))

    for field in GEOMETRY_FIELDS:
        if field not in mapping and field not in GEOMETRY_OPTIONAL:
            raise ScenarioFileError(source, "missing required field", field=field)

    values = {field: _to_float(mapping, field, source, text) for field in GEOMETRY_FIELDS if field in mapping}
    try:
        return GeometryConfig(**values)
    except DomainError as e:
        raise ScenarioFileError(source, str(e))


def scenario_from_mapping(mapping, source="<mapping>", text=None):
    """
    Builds a Scenario from a flat key-value mapping holding either the nine
    scenario fields or a collinear geometry. Counterexample files written by
    save_scenario are read through their nested "scenario" key

    Args:
        mapping (dict): The parsed file content
        source (str): Name used in diagnostics
        text (str): Raw file text used to locate offending lines

    Returns:
        tuple: The Scenario and the GeometryConfig it came from (None for direct input)
    """
    if not isinstance(mapping, dict):
        raise ScenarioFileError(source, f"expected a key-value mapping, got {type(mapping).__name__}")

    if "scenario" in mapping:
        unknown = sorted(set(mapping) - set(COUNTEREXAMPLE_FIELDS) - {"scenario"})
        if unknown:
            raise ScenarioFileError(source, "unknown counterexample field", field=unknown[0],
                                    line=_field_line(text, unknown[0]))
        return scenario_from_mapping(mapping["scenario"], source, text)

    if any(field in mapping for field in GEOMETRY_FIELDS):
        geometry = geometry_from_mapping(mapping, source, text)
        return build_collinear_scenario(geometry), geometry

    unknown = sorted(set(mapping) - set(SCENARIO_FIELDS))
    if unknown:
        raise ScenarioFileError(source, "unknown scenario field", field=unknown[0], line=_field_line(text, unknown[0]))

    for field in SCENARIO_FIELDS:
        if field not in mapping and field != "sigma2":
            raise ScenarioFileError(source, "missing required field", field=field)

    values = {field: _to_float(mapping, field, source, text) for field in SCENARIO_FIELDS if field in mapping}
    try:
        scenario = Scenario(h_sd=ComplexGain(values["h_sd_re"], values["h_sd_im"]),
                            h_se=ComplexGain(values["h_se_re"], values["h_se_im"]),
                            h_ed=ComplexGain(values["h_ed_re"], values["h_ed_im"]),
                            p_s=values["p_s"],
                            p_e=values["p_e"],
                            sigma2=values.get("sigma2", 1.0))
    except DomainError as e:
        raise ScenarioFileError(source, str(e))

    return scenario, None


def load_mapping(path):
    """
    Reads a JSON (.json) or YAML file into a mapping, reporting syntax errors
    with their line number

    Args:
        path (str): The file

    Returns:
        tuple: The parsed content and the raw text
    """
    with open(path) as file:
        text = file.read()

    if path.lower().endswith(".json"):
        try:
            return json.loads(text), text
        except json.JSONDecodeError as e:
            raise ScenarioFileError(path, e.msg, line=e.lineno)

    try:
        return yaml.safe_load(text), text
    except yaml.YAMLError as e:
        mark = getattr(e, "problem_mark", None)
        line = mark.line + 1 if mark is not None else None
        raise ScenarioFileError(path, getattr(e, "problem", None) or str(e), line=line)


def load_scenario(path):
    """
    Loads a scenario file holding either the nine scenario fields or a geometry

    Args:
        path (str): JSON or YAML file

    Returns:
        tuple: The Scenario and its GeometryConfig (None for direct input)
    """
    mapping, text = load_mapping(path)
    return scenario_from_mapping(mapping, source=path, text=text)


def save_scenario(scenario, path, extra=None):
    """
    Writes a scenario as JSON, optionally with extra labelled content

    Args:
        scenario (Scenario): The scenario
        path (str): Output path
        extra (dict): Labels from COUNTEREXAMPLE_FIELDS written next to the nested scenario
    """
    content = dict(extra or {})
    content["scenario"] = scenario.to_dict()

    directory = os.path.dirname(path)
    if directory:
        os.makedirs(directory, exist_ok=True)

    with open(path, "w") as file:
        json.dump(content, file, indent=4, sort_keys=True)


def write_csv(path, header, rows):
    """
    Writes rows under a header with numbers at 9 significant digits

    Args:
        path (str): Output CSV path
        header (list): Column names
        rows (iterable): Sequences of values in header order
    """
    try:
        with open(path, "w", newline="") as csvfile:
            writer = csv.writer(csvfile)
            writer.writerow(header)
            for row in rows:
                writer.writerow([format_value(value) for value in row])
    except OSError as e:
        raise OSError(e.errno, f"Could not write {path}: {e.strerror}", path)


def solution_row(solution, passive_bps_hz):
    """
    Flattens an AttackSolution into SOLUTION_CSV_HEADER order

    Args:
        solution (AttackSolution): The optimiser output
        passive_bps_hz (float): Passive leakage of the same scenario

    Returns:
        list: The row values
    """
    record = solution.to_dict()
    record["passive_bps_hz"] = passive_bps_hz
    return [record[column] for column in SOLUTION_CSV_HEADER]
