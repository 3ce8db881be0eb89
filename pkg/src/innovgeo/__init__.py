"""Two-region geography with vertical innovation: equilibria, thresholds and bifurcations."""

from innovgeo.core import (
    ADDITIVE,
    COBB_DOUGLAS,
    DiagnosticConstants,
    InnovationSpec,
    ModelParams,
    SpecKind,
    d_delta_v_db,
    delta_v,
    delta_v_prime,
    innovation_probability,
    innovation_weight,
    quartic_coefficients,
    quartic_polynomial,
    spec_from_name,
    wage,
)
from innovgeo.equilibria import (
    Equilibrium,
    EquilibriumSet,
    Kind,
    Stability,
    asymmetric_stability,
    find_equilibria,
    lambda_star,
)
from innovgeo.bifurcation import BifurcationDiagram, classify_scenario, hysteresis_windows, sweep
from innovgeo.thresholds import threshold_report

__version__ = "0.1.0"

__all__ = [
    "ADDITIVE",
    "COBB_DOUGLAS",
    "BifurcationDiagram",
    "DiagnosticConstants",
    "Equilibrium",
    "EquilibriumSet",
    "InnovationSpec",
    "Kind",
    "ModelParams",
    "SpecKind",
    "Stability",
    "asymmetric_stability",
    "classify_scenario",
    "d_delta_v_db",
    "delta_v",
    "delta_v_prime",
    "find_equilibria",
    "hysteresis_windows",
    "innovation_probability",
    "innovation_weight",
    "lambda_star",
    "quartic_coefficients",
    "quartic_polynomial",
    "spec_from_name",
    "sweep",
    "threshold_report",
    "wage",
]
