"""Grushin-plane Harnack inequality laboratory."""

import json

from ._core import (
    ConfigError,
    ConstantInconsistency,
    DegenerateInput,
    HarnackLabError,
    HypothesisViolation,
    InvalidParameter,
    SingularityError,
    SolverError,
    StructureViolation,
    barrier_alpha,
    barrier_constants,
    box_area,
    box_gauge,
    dilate,
    dtilde,
    ledger_json,
    region_measure,
    rho,
    run_suite,
    sigma,
    solve_manufactured,
    structure_constant,
    verify_run,
)


def ledger(**kwargs):
    """Constant ledger as a dict keyed by constant name."""
    doc = json.loads(ledger_json(**kwargs))
    return {e["name"]: e["value"] for e in doc["constants"]}


def suite(config_text=""):
    """Run the suite and return the parsed report."""
    return json.loads(run_suite(config_text))
