"""Simulation toolkit for small open quantum systems in oscillator baths.

Evolves reduced operator representations of system transition operators
coupled to discrete-mode or Lorentzian-peak baths, at two closure
orders, alongside an exact damped-mode Lindblad reference solver.
"""

__version__ = "0.1.0"

from .model import (
    DiscreteBath,
    DiscretizationConfig,
    IntegratorConfig,
    LorentzianPeak,
    PMConfig,
    Scenario,
    ScenarioError,
    SiteBath,
    correlation_function,
    discretize,
    dump_scenario,
    load_scenario,
    scenario_from_dict,
    scenario_to_dict,
    spectral_density,
    validate_scenario,
)
from .blockop import (
    block_adjoint,
    block_commutator,
    block_square,
    block_trace,
    hermitian_block_defect,
    initial_transition_blocks,
)
from .dynamics import (
    GeneralHighDynamics,
    GeneralLowDynamics,
    LorentzianHighDynamics,
    LorentzianLowDynamics,
    make_dynamics,
)
from .integrator import (
    STATUS_COMPLETED,
    STATUS_DIVERGED,
    STATUS_ERROR,
    IntegrationReport,
    integrate,
)
from .observables import (
    ObservableRecord,
    density_matrix_positive,
    density_matrix_trace_form,
    observe,
    purity,
    trace_residual,
)
from .pm import PMModel, Pseudomode, simulate_pm
from .presets import PRESET_NAMES, preset
from .runner import Trajectory, run_scenario

__all__ = [
    "__version__",
    "DiscreteBath",
    "DiscretizationConfig",
    "IntegratorConfig",
    "LorentzianPeak",
    "PMConfig",
    "Scenario",
    "ScenarioError",
    "SiteBath",
    "correlation_function",
    "discretize",
    "dump_scenario",
    "load_scenario",
    "scenario_from_dict",
    "scenario_to_dict",
    "spectral_density",
    "validate_scenario",
    "block_adjoint",
    "block_commutator",
    "block_square",
    "block_trace",
    "hermitian_block_defect",
    "initial_transition_blocks",
    "GeneralHighDynamics",
    "GeneralLowDynamics",
    "LorentzianHighDynamics",
    "LorentzianLowDynamics",
    "make_dynamics",
    "STATUS_COMPLETED",
    "STATUS_DIVERGED",
    "STATUS_ERROR",
    "IntegrationReport",
    "integrate",
    "ObservableRecord",
    "density_matrix_positive",
    "density_matrix_trace_form",
    "observe",
    "purity",
    "trace_residual",
    "PMModel",
    "Pseudomode",
    "simulate_pm",
    "PRESET_NAMES",
    "preset",
    "Trajectory",
    "run_scenario",
]
