import json

import jsonschema
import pytest

from cvrl.discrimination import task_from_witness
from cvrl.fock import fock_state
from cvrl.gaussian import GaussianParams, params_to_moments
from cvrl.optimize import OptimizerConfig
from cvrl.robustness import robustness_gaussian
from cvrl.schemas import SCHEMAS, validate
from cvrl.witness import two_copy_witness


@pytest.fixture(scope="module")
def result():
    return robustness_gaussian(fock_state(1, 20), OptimizerConfig(starts=2, max_evals=100))


def test_core_objects_validate(result):
    p = GaussianParams(0.1, 0.2, 0.3, (0.4, 0.5))
    validate(p.to_json(), "gaussian_params")
    validate(params_to_moments(p).to_json(), "moment_form")
    validate(OptimizerConfig().to_json(), "optimizer_config")
    validate(result.to_json(), "robustness_result")
    w = two_copy_witness(fock_state(1, 5), 0.1)
    validate(w.to_json(), "witness_report")
    validate(task_from_witness(w).to_json(), "task")


def test_documents_survive_json(result):
    doc = json.loads(json.dumps(result.to_json(), allow_nan=False))
    assert doc["label"] == "upper bound (best found)"
    assert GaussianParams.from_json(doc["argmin"]) == result.argmin


def test_infinite_start_values_serialise_as_strings():
    from cvrl.optimize import StartRecord

    rec = StartRecord(0, GaussianParams(), GaussianParams(), float("inf"), 1, False)
    doc = rec.to_json()
    json.dumps(doc, allow_nan=False)
    assert doc["value"] == "inf"


def test_invalid_documents_rejected():
    with pytest.raises(jsonschema.ValidationError):
        validate({"nbar": -1, "r": 0, "phi": 0, "alpha": [0, 0]}, "gaussian_params")
    with pytest.raises(jsonschema.ValidationError):
        validate({"starts": 3}, "optimizer_config")


def test_every_schema_is_well_formed():
    for schema in SCHEMAS.values():
        jsonschema.Draft202012Validator.check_schema(schema)
