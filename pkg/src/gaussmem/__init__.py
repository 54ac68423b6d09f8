"""Maximum-entropy density estimation with local Gaussian conditions."""

from ._backend import BACKEND
from .annealer import EstimateResult, anneal, estimate, moving_average, normalize
from .core import (
    AnnealSchedule,
    ConditionSet,
    EstimatorConfig,
    Grid,
    Selection,
    build_conditions,
    build_grid,
    build_selection,
    density_from_weights,
    read_sample,
)
from .objective import (
    CostBreakdown,
    condition_value,
    cost,
    empirical_average,
    entropy,
    gaussian,
    relative_condition_errors,
    simulated_average,
)

__version__ = "0.1.0"
