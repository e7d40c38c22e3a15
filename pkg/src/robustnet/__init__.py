"""Minmax and minmax-regret network optimization under discrete scenarios.

Includes exact and heuristic solvers, 3-SAT reductions with recursive
gap amplification, and finite-instance gap certification.
"""

from importlib.resources import files

from .cnf import CnfFormula, sample_formula, full_polarity_formula, parse_dimacs, to_dimacs
from .detsolve import det_solve, per_scenario_optima
from .estimators import GapAmplifier, MeanScenarioSolver, RobustSolver
from .exceptions import FormatError, InfeasibleError, InvalidInstanceError, RobustNetError, SizeLimitError
from .formats import parse_instance, parse_solution, serialize_instance, serialize_solution
from .model import (
    EvalReport,
    Graph,
    RobustInstance,
    ScenarioSet,
    Solution,
    check_instance,
    cost,
    evaluate,
    minmax_value,
    per_scenario_costs,
    regret_value,
    validate_instance,
    validate_solution,
)
from .reduce import (
    AmplifyParams,
    ImplicitInstance,
    PairIndex,
    amplify,
    decode_assignment,
    path_to_tree,
    sat_to_cut,
    sat_to_shortest_path,
    tree_to_path,
    witness_cut,
    witness_path,
)
from .robust import (
    SolverResult,
    enumerate_feasible,
    mean_scenario_heuristic,
    pareto_dp,
    pareto_front,
    solve_exact,
    solve_minmax_exact,
    solve_regret_exact,
)
from .verify import GapReport, check_gap, check_regret_equals_minmax, empirical_ratios, sat_oracle

__version__ = "0.1.0"


def load_fixture(name: str) -> CnfFormula:
    """Bundled formula: ``"sat3"`` (satisfiable) or ``"unsat8"``."""
    return parse_dimacs(files(__name__).joinpath("data", f"{name}.cnf").read_text())
