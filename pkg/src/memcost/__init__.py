"""Retention-time and energy-cost analysis for small coupled-dipole memories."""

__version__ = "0.1.0"

from .costs import (
    CostBreakdown,
    CostParams,
    Scenario,
    coupling_cost,
    effective_replenishment,
    field_cost,
    generalized_cost,
    scenario_cost,
    scenario_system,
)
from .errors import (
    CapacityError,
    DegenerateThreshold,
    DomainError,
    EstimateError,
    MemcostError,
    ModelError,
    ValidationError,
)
from .exact import (
    AbsorptionRule,
    ClosedFormScenario,
    Method,
    RetentionResult,
    build_transition_matrix,
    retention_time_exact,
    tau_closed_form,
)
from .model import (
    SpinState,
    SystemSpec,
    Topology,
    delta_energy,
    flip_probability,
    total_energy,
    validate,
)
from .montecarlo import (
    LedgerResult,
    McConfig,
    McEstimate,
    estimate_retention,
    simulate_energy_ledger,
    simulate_trial,
)
from .sweeps import SweepSpec, SweepTable, emit, figure_table, run_sweep, write_table
from .thresholds import (
    ThresholdResult,
    critical_line_vs_triangle,
    critical_single,
    critical_three_uncoupled,
    generic_crossover,
)
