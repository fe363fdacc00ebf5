"""Work and power statistics of closed, unitarily charged qubit batteries.

Builds collective charging models, evolves the battery ground state under
the quench Hamiltonian, and evaluates full-counting statistics of work and
power: means, variances, noise-to-signal ratios, Fisher-information
reliability bounds, the work/power trade-off product and state fidelity.
The command-line entry point writes plot-ready CSV datasets and renders the
companion figures.
"""

__version__ = "0.1.0"

from .analytic import (
    ClosedFormRecord,
    RegimeError,
    kbody_closed_form,
    kbody_period,
    kbody_scaling,
    single_qubit_closed_form,
)
from .bounds import (
    BoundSeries,
    FisherPoint,
    FisherSeries,
    bhattacharyya_angle,
    fisher_information,
    fisher_series,
    hellinger_check,
    nsr_lower_bound,
    overlap_angle,
)
from .dynamics import (
    ProjectorFamily,
    TimeGrid,
    eigenbasis_projectors,
    evolve_state,
    fidelity,
    heisenberg_observable,
    projective_probabilities,
)
from .operators import (
    BatteryModel,
    Custom,
    DimensionCapError,
    IsingS,
    KBody,
    PauliTerm,
    SingleQubit,
    build_battery_hamiltonian,
    build_charging_hamiltonian,
    power_counting_observable,
    total_hamiltonian,
)
from .pipeline import (
    CSV_HEADER,
    ScenarioConfig,
    ScenarioSeries,
    StatisticsRecord,
    evaluate_scenario,
    run_scenario,
    write_csv,
    write_manifest,
)
from .statistics import (
    MomentPair,
    correlation_f,
    fcs_moments,
    finite_difference_moments,
    generating_function,
    nsr,
    nsr_defined,
    tradeoff_terms,
)

__all__ = [
    "__version__",
    "BatteryModel",
    "BoundSeries",
    "ClosedFormRecord",
    "CSV_HEADER",
    "Custom",
    "DimensionCapError",
    "FisherPoint",
    "FisherSeries",
    "IsingS",
    "KBody",
    "MomentPair",
    "PauliTerm",
    "ProjectorFamily",
    "RegimeError",
    "ScenarioConfig",
    "ScenarioSeries",
    "SingleQubit",
    "StatisticsRecord",
    "TimeGrid",
    "bhattacharyya_angle",
    "build_battery_hamiltonian",
    "build_charging_hamiltonian",
    "correlation_f",
    "eigenbasis_projectors",
    "evaluate_scenario",
    "evolve_state",
    "fcs_moments",
    "fidelity",
    "finite_difference_moments",
    "fisher_information",
    "fisher_series",
    "generating_function",
    "heisenberg_observable",
    "hellinger_check",
    "kbody_closed_form",
    "kbody_period",
    "kbody_scaling",
    "nsr",
    "nsr_defined",
    "nsr_lower_bound",
    "overlap_angle",
    "power_counting_observable",
    "projective_probabilities",
    "run_scenario",
    "single_qubit_closed_form",
    "total_hamiltonian",
    "tradeoff_terms",
    "write_csv",
    "write_manifest",
]
