"""Generalised geometry toolkit: forms, spinors, generalised structures and
their field equations on left-invariant Lie-algebra models."""

from .cliffordspin import SpinModule, Spinor, charge_conj, clifford_act, fierz, fierz_trace, vector_act
from .exteriorcore import MetricData, MultiForm, contract, format_form, hat, hodge_star, parse_form, tilde, wedge
from .genalg import GenMetric, SUmStructure, build_su_m, rr_space, validate_structure
from .liegeom import LieAlgebraModel, parse_model, twisted_cohomology
from .scalars import EXACT, FLOAT, Arith, GaussRat
from .verify import Report, Scenario, load_scenario, parse_scenario, run_identity_suite, susy_roundtrip

__version__ = "0.1.0"

__all__ = [
    "Arith",
    "EXACT",
    "FLOAT",
    "GaussRat",
    "GenMetric",
    "LieAlgebraModel",
    "MetricData",
    "MultiForm",
    "Report",
    "SUmStructure",
    "Scenario",
    "SpinModule",
    "Spinor",
    "build_su_m",
    "charge_conj",
    "clifford_act",
    "contract",
    "fierz",
    "fierz_trace",
    "format_form",
    "hat",
    "hodge_star",
    "load_scenario",
    "parse_form",
    "parse_model",
    "parse_scenario",
    "rr_space",
    "run_identity_suite",
    "susy_roundtrip",
    "tilde",
    "twisted_cohomology",
    "validate_structure",
    "vector_act",
    "wedge",
]
