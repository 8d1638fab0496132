"""JSON schemas for every document the package writes."""
from __future__ import annotations

import jsonschema

_num = {"type": "number"}
_num_or_inf = {"anyOf": [_num, {"enum": ["inf", "-inf"]}]}
_nullable_num = {"type": ["number", "null"]}

GAUSSIAN_PARAMS = {
    "type": "object",
    "required": ["nbar", "r", "phi", "alpha"],
    "properties": {
        "nbar": {"type": "number", "minimum": 0},
        "r": {"type": "number", "minimum": 0},
        "phi": {"type": "number", "minimum": 0},
        "alpha": {"type": "array", "items": _num, "minItems": 2, "maxItems": 2},
    },
}

MOMENT_FORM = {
    "type": "object",
    "required": ["mu", "V"],
    "properties": {
        "mu": {"type": "array", "items": _num},
        "V": {"type": "array", "items": {"type": "array", "items": _num}},
    },
}

_box_entry = {"type": "array", "items": _num, "minItems": 2, "maxItems": 2}

OPTIMIZER_CONFIG = {
    "type": "object",
    "required": ["starts", "max_evals", "xtol", "ftol", "seed"],
    "properties": {
        "starts": {"type": "integer", "minimum": 1},
        "max_evals": {"type": "integer", "minimum": 1},
        "xtol": _num,
        "ftol": _num,
        "seed": {"type": "integer"},
        "box": {"type": "object", "additionalProperties": _box_entry},
        "tail_tol": _num,
        "floor": _num,
        "sigma_pad": {"type": "integer", "minimum": 1},
        "sigma_min_cutoff": {"type": "integer", "minimum": 1},
    },
}

START_RECORD = {
    "type": "object",
    "required": ["index", "start", "best", "value", "nfev", "converged"],
    "properties": {
        "index": {"type": "integer"},
        "start": GAUSSIAN_PARAMS,
        "best": GAUSSIAN_PARAMS,
        "value": _num_or_inf,
        "nfev": {"type": "integer"},
        "converged": {"type": "boolean"},
    },
}

ROBUSTNESS_RESULT = {
    "type": "object",
    "required": ["value", "dmax", "argmin", "status", "label", "multistart_log"],
    "properties": {
        "value": {"type": "number", "minimum": 0},
        "dmax": _num,
        "sigma_cutoff": {"type": ["integer", "null"], "minimum": 1},
        "argmin": GAUSSIAN_PARAMS,
        "status": {"enum": ["converged", "budget-exhausted"]},
        "label": {"type": "string"},
        "multistart_log": {"type": "array", "items": START_RECORD},
    },
}

WITNESS_REPORT = {
    "type": "object",
    "required": ["m", "epsilon", "op_norm", "evaluations", "heuristic_flags"],
    "properties": {
        "m": {"enum": [2, 4]},
        "epsilon": {"type": "number", "exclusiveMinimum": 0},
        "op_norm": {"type": "number", "minimum": 0},
        "cutoff": {"type": "integer"},
        "state": {"type": "string"},
        "sha256": {"type": "string"},
        "evaluations": {
            "type": "array",
            "items": {
                "type": "object",
                "required": ["label", "value"],
                "properties": {"label": {"type": "string"}, "value": _num},
            },
        },
        "heuristic_flags": {"type": "array", "items": {"type": "string"}},
    },
}

TASK = {
    "type": "object",
    "required": ["m", "x_norm", "prior", "description", "provenance"],
    "properties": {
        "m": {"type": "integer"},
        "x_norm": _num,
        "prior": {"type": "array", "items": _num, "minItems": 2, "maxItems": 2},
        "description": {"type": "string"},
        "provenance": {"type": "object"},
    },
}

TABLE_OUTPUT = {
    "type": "object",
    "required": ["command", "run_config", "columns", "rows", "passed"],
    "properties": {
        "command": {"type": "string"},
        "run_config": {"type": "object"},
        "columns": {"type": "array", "items": {"type": "string"}},
        "rows": {"type": "array", "items": {"type": "object"}},
        "passed": {"type": "boolean"},
        "failures": {"type": "array", "items": {"type": "string"}},
    },
}

DEMO_OUTPUT = {
    "type": "object",
    "required": ["command", "run_config", "state", "witness", "passed"],
    "properties": {
        "command": {"type": "string"},
        "run_config": {"type": "object"},
        "state": {"type": "string"},
        "witness": WITNESS_REPORT,
        "task": TASK,
        "metrics": {"type": "object", "additionalProperties": _nullable_num},
        "soundness": {"type": ["object", "null"]},
        "passed": {"type": "boolean"},
        "failures": {"type": "array", "items": {"type": "string"}},
    },
}

ENTROPY_OUTPUT = {
    "type": "object",
    "required": ["command", "state", "unit", "entropy", "reference_entropy", "rel_entropy_nongaussianity"],
    "properties": {
        "unit": {"enum": ["nats", "bits"]},
        "entropy": _num,
        "reference_entropy": _num,
        "rel_entropy_nongaussianity": _num,
        "reference": MOMENT_FORM,
    },
}

OPERATOR_INFO = {
    "type": "object",
    "required": ["cutoff", "modes", "side", "hermitian", "trace"],
    "properties": {
        "cutoff": {"type": "integer", "minimum": 1},
        "modes": {"type": "integer", "minimum": 1},
        "side": {"type": "integer"},
        "hermitian": {"type": "boolean"},
        "trace": {"type": "array", "items": _num, "minItems": 2, "maxItems": 2},
    },
}

SCHEMAS = {
    "gaussian_params": GAUSSIAN_PARAMS,
    "moment_form": MOMENT_FORM,
    "optimizer_config": OPTIMIZER_CONFIG,
    "robustness_result": ROBUSTNESS_RESULT,
    "witness_report": WITNESS_REPORT,
    "task": TASK,
    "table_output": TABLE_OUTPUT,
    "demo_output": DEMO_OUTPUT,
    "entropy_output": ENTROPY_OUTPUT,
    "operator_info": OPERATOR_INFO,
}


def validate(obj, name: str):
    """Raise ``jsonschema.ValidationError`` unless ``obj`` matches schema ``name``."""
    jsonschema.validate(obj, SCHEMAS[name])
    return obj
