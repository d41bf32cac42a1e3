"""PSR-aware ordering of non-RTA uplinks for an overlapping real-time BSS."""

from .link import (
    ConfigurationError,
    Deployment,
    Floorplan,
    LinkBudgetConfig,
    MeasurementWindow,
    NodePosition,
    classify_favorability,
    classify_windowed,
    expected_psr_sinr,
    pathloss_db,
)
from .metrics import delay_quantile, jain_index, loss_ratio
from .objective import (
    FavorabilityMatrix,
    FavorabilityVector,
    InvalidInputError,
    lexicographically_less,
    max_circular_zero_run,
    objective_vector,
)
from .scenario import Scenario, ScenarioError, load_scenario, parse_scenario
from .sim import ScenarioConfig, SchedulePolicy, SimReport, airtime_fair_order, run_simulation
from .solvers import CapacityError, ScheduleSolution, brute_force_schedule, evaluate_gap, greedy_schedule

__version__ = "0.1.0"
