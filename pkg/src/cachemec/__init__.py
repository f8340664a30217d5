"""Joint result caching and transmission-time allocation for multi-user mobile edge computing."""
from .baselines import solve_baseline
from .dual import solve_optimal
from .heuristic import solve_nocache_multipliers, solve_suboptimal
from .oracle import solve_bruteforce
from .report import SolveReport, feasibility_violations
from .scenario import Scenario, TaskSpec, load_scenario, reference_scenario, state_space

__version__ = "0.1.0"

__all__ = ["Scenario", "SolveReport", "TaskSpec", "feasibility_violations", "load_scenario", "reference_scenario",
           "solve_baseline", "solve_bruteforce", "solve_nocache_multipliers", "solve_optimal",
           "solve_suboptimal", "state_space"]
