"""Toolkit for testing the minimal Hilbert-space dimension compatible with
bipartite correlations: Bell functionals, exact local bounds, fixed-dimension
see-saw lower bounds, and Grothendieck-constant vector searches."""

from .catalog import (
    WitnessReport,
    by_name,
    cglmp_C,
    cglmp_D,
    chsh,
    expression_E,
    gamma_state,
    i_phi,
    iphi_sweep,
    reference_bounds,
    theta_state,
    theta_state_violation,
    witness_report,
)
from .bellfmt import (
    parse_correlation_matrix,
    parse_functional,
    parse_table_csv,
    serialize_correlation_matrix,
    serialize_functional,
    serialize_table_csv,
)
from .grothendieck import (
    CorrelationFunctional,
    VectorStrategy,
    correlator_bell,
    local_norm,
    normalize,
    vector_seesaw,
)
from .localbound import DeterministicStrategy, local_bound, local_bound_min, strategy_table
from .scenario import (
    AVERAGE,
    PARTNER_SETTING_ZERO,
    BellFunctional,
    BellScenario,
    BoundRecord,
    ProbabilityTable,
    QuantumModel,
    bell_operator,
    evaluate,
    model_value,
    table_of,
    uniform_table,
)
from .seesaw import (
    SeesawConfig,
    SeesawResult,
    embed_model,
    refine,
    seeded_models,
    seesaw,
    update_measurement_binary,
    update_measurement_multi,
    update_state,
)

__version__ = "0.1.0"

__all__ = [
    "AVERAGE",
    "BellFunctional",
    "BellScenario",
    "BoundRecord",
    "CorrelationFunctional",
    "DeterministicStrategy",
    "PARTNER_SETTING_ZERO",
    "ProbabilityTable",
    "QuantumModel",
    "SeesawConfig",
    "SeesawResult",
    "VectorStrategy",
    "WitnessReport",
    "bell_operator",
    "by_name",
    "cglmp_C",
    "cglmp_D",
    "chsh",
    "correlator_bell",
    "embed_model",
    "evaluate",
    "expression_E",
    "gamma_state",
    "i_phi",
    "iphi_sweep",
    "local_bound",
    "local_bound_min",
    "local_norm",
    "model_value",
    "normalize",
    "parse_correlation_matrix",
    "parse_functional",
    "parse_table_csv",
    "reference_bounds",
    "refine",
    "seeded_models",
    "seesaw",
    "serialize_correlation_matrix",
    "serialize_functional",
    "serialize_table_csv",
    "strategy_table",
    "table_of",
    "theta_state",
    "theta_state_violation",
    "uniform_table",
    "update_measurement_binary",
    "update_measurement_multi",
    "update_state",
    "vector_seesaw",
    "witness_report",
]
