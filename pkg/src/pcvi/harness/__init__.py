"""Oracles, experiment drivers, CSV/plot output and the command line."""
from .oracles import exact_Ld_oracle, reference_flow, rk4_flow, sho_exact_Ld, sho_flow
from .studies import (ConvergenceReport, EnergyReport, ExperimentConfig, energy_study,
                      fit_slope, global_error_study, ldorder_study, endpoint_rates, work_precision)

__all__ = [
    "ConvergenceReport", "EnergyReport", "ExperimentConfig", "energy_study", "exact_Ld_oracle",
    "fit_slope", "global_error_study", "ldorder_study", "endpoint_rates", "reference_flow",
    "rk4_flow", "sho_exact_Ld", "sho_flow", "work_precision",
]
