from flask import Flask, Response, request
import csv
import io
import json

from config import get_cfg
from experiments.distanceSweep import DistanceSweep, SweepConfig, SWEEP_CSV_HEADER
from models.channelModel import GeometryConfig
from models.leakageModel import envelope_curves, passive_leakage
from optimisation.attackOptimiser import AttackOptimiser
from utils.errors import BracketError, LeakageError
from utils.serialisation import format_value, geometry_from_mapping, scenario_from_mapping


app = Flask(__name__)


def error_response(message, status=400):
    return Response(json.dumps({"error": message}), status=status, mimetype="application/json")


def json_response(content):
    return Response(json.dumps(content), mimetype="application/json")


def request_body():
    """
    Parses the JSON body of the current request

    Returns:
        dict: The body, empty if none was sent
    """
    body = request.get_json(silent=True)
    if body is None:
        if request.get_data():
            raise LeakageError("Request body is not valid JSON")
        return {}
    if not isinstance(body, dict):
        raise LeakageError("Request body must be a JSON object")
    return body


@app.route('/solve', methods=['POST'])
def solve():
    """
    POST ENDPOINT: Solves the spoofing relay attack for one scenario,
    given either the scenario fields or a collinear geometry as JSON

    Returns:
        json: The solution record and the passive leakage of the scenario
    """
    assert request.path == '/solve'
    assert request.method == 'POST'

    try:
        scenario, _ = scenario_from_mapping(request_body(), source="request")
        solution = AttackOptimiser.from_cfg(get_cfg()).solve_attack(scenario)
    except BracketError as e:
        return error_response(str(e), status=500)
    except LeakageError as e:
        return error_response(str(e))

    record = solution.to_dict()
    record["passive_bps_hz"] = passive_leakage(scenario)
    record["feasible"] = solution.feasible

    return json_response(record)


@app.route('/sweep', methods=['POST'])
def sweep():
    """
    POST ENDPOINT: Runs the distance sweep. The JSON body may override
    start, stop, step and any geometry field except d_se

    Returns:
        csv: One row per eavesdropper distance
    """
    assert request.path == '/sweep'
    assert request.method == 'POST'

    try:
        body = request_body()
        cfg = get_cfg()

        overrides = {key: body.pop(key) for key in ("start", "stop", "step") if key in body}
        for key, value in overrides.items():
            if isinstance(value, bool) or not isinstance(value, (int, float)):
                raise LeakageError(f"Sweep field {key} must be a number, got {value!r}")

        if "d_se" in body:
            raise LeakageError("d_se is swept and cannot be set")

        geometry = GeometryConfig.from_cfg(cfg)
        if body:
            template = geometry.to_dict()
            template.update(body)
            geometry = geometry_from_mapping(template, source="request")

        sweep_cfg = SweepConfig(geometry=geometry,
                                start=float(overrides.get("start", cfg.SWEEP.START)),
                                stop=float(overrides.get("stop", cfg.SWEEP.STOP)),
                                step=float(overrides.get("step", cfg.SWEEP.STEP)),
                                output=None)
        records = DistanceSweep(AttackOptimiser.from_cfg(cfg), quiet=True).run_sweep(sweep_cfg)
    except BracketError as e:
        return error_response(str(e), status=500)
    except LeakageError as e:
        return error_response(str(e))

    buffer = io.StringIO()
    writer = csv.writer(buffer)
    writer.writerow(SWEEP_CSV_HEADER)
    for record in records:
        writer.writerow([format_value(value) for value in record.to_row()])

    return Response(buffer.getvalue(), mimetype="text/csv")


@app.route('/envelopes', methods=['POST'])
def envelopes():
    """
    POST ENDPOINT: Samples the achievable SNR interval at D and the
    eavesdropper SNR over the power splitting ratio. An optional
    "points" key sets the number of samples

    Returns:
        json: Lists keyed rho, gamma_d_max, gamma_d_min, gamma_e
    """
    assert request.path == '/envelopes'
    assert request.method == 'POST'

    try:
        body = request_body()
        points = body.pop("points", 201)
        if isinstance(points, bool) or not isinstance(points, int):
            raise LeakageError(f"points must be an integer, got {points!r}")

        scenario, _ = scenario_from_mapping(body, source="request")
        curves = envelope_curves(scenario, points)
    except LeakageError as e:
        return error_response(str(e))

    return json_response({key: values.tolist() for key, values in curves.items()})


if __name__ == '__main__':
    app.run()
