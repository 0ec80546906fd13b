"""Two-cell interference lab.

Exact bit-level (deterministic) channel schemes and rate formulas for the
two-cell interfering multiple-access and broadcast channels, an exact
search oracle over orthogonal coding schemes, Gaussian layered-lattice
achievable rates, and constant-gap comparisons between the two sides.
"""

from .ldm import (
    Conflict,
    DecodabilityReport,
    LdmConfig,
    LdmScheme,
    LevelVector,
    Model,
    RegimeError,
    end_to_end_check,
    random_payload,
    receive_height,
    receivers,
    transmit,
    verify_decodable,
)
from .rates import (
    ConstructionError,
    DualizationError,
    LdmRateReport,
    achievable_sum_rate,
    achievable_value,
    construct_scheme,
    dualize_to_ibc,
    phi,
    upper_bound,
)
from .oracle import OracleResult, grid_compare, solve, valid_configs
from .gauss import (
    Allocation,
    GapReport,
    GaussParams,
    LevelPartition,
    LinkSimReport,
    RateLayer,
    build_allocation,
    decoding_bound,
    gap_report,
    interference_margin,
    lemma1_margin,
    linksim_run,
    partition,
    section4_example,
    theorem1_lower_bound,
)

__all__ = [
    "Allocation",
    "Conflict",
    "ConstructionError",
    "DecodabilityReport",
    "DualizationError",
    "GapReport",
    "GaussParams",
    "LdmConfig",
    "LdmRateReport",
    "LdmScheme",
    "LevelPartition",
    "LevelVector",
    "LinkSimReport",
    "Model",
    "OracleResult",
    "RateLayer",
    "RegimeError",
    "achievable_sum_rate",
    "achievable_value",
    "build_allocation",
    "construct_scheme",
    "decoding_bound",
    "dualize_to_ibc",
    "end_to_end_check",
    "gap_report",
    "grid_compare",
    "interference_margin",
    "lemma1_margin",
    "linksim_run",
    "partition",
    "phi",
    "random_payload",
    "receive_height",
    "receivers",
    "section4_example",
    "solve",
    "theorem1_lower_bound",
    "transmit",
    "upper_bound",
    "valid_configs",
    "verify_decodable",
]
