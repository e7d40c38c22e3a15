"""Estimator-style wrappers so solvers plug into parameter search tooling.

Instances are not feature matrices, so only the parameter protocol and
the fit/transform shape are borrowed; there is no ``predict``.
"""

from __future__ import annotations

from sklearn.base import BaseEstimator
from sklearn.utils.validation import check_is_fitted

from .model import RobustInstance, check_instance
from .reduce import Amplification, AmplifyParams, amplify
from .robust import DEFAULT_LABEL_CAP, DEFAULT_LIMIT, mean_scenario_heuristic, solve_exact


def _as_instance(inst):
    if not isinstance(inst, RobustInstance):
        raise TypeError(f"expected a RobustInstance, got {type(inst).__name__}")
    return check_instance(inst)


class RobustSolver(BaseEstimator):
    """Exact minmax or minmax-regret solver.

    After ``fit``: ``solution_``, ``value_``, ``method_`` and ``stats_``.
    """

    def __init__(self, objective="minmax", method="auto", limit=DEFAULT_LIMIT, label_cap=DEFAULT_LABEL_CAP):
        self.objective = objective
        self.method = method
        self.limit = limit
        self.label_cap = label_cap

    def fit(self, inst, y=None, fstar=None):
        inst = _as_instance(inst)
        res = solve_exact(
            inst, self.objective, self.method, fstar=fstar, limit=self.limit, label_cap=self.label_cap
        )
        self.solution_ = res.solution
        self.value_ = res.value
        self.method_ = res.method
        self.stats_ = dict(res.stats)
        return self

    def score(self, inst, y=None):
        """Negated optimum, so that larger is better."""
        check_is_fitted(self, "value_")
        return -self.value_


class MeanScenarioSolver(BaseEstimator):
    """Averaged-cost heuristic; ``value_`` is the true objective of its solution."""

    def __init__(self, objective="minmax"):
        self.objective = objective

    def fit(self, inst, y=None, fstar=None):
        inst = _as_instance(inst)
        res = mean_scenario_heuristic(inst, self.objective, fstar=fstar)
        self.solution_ = res.solution
        self.value_ = res.value
        return self


class GapAmplifier(BaseEstimator):
    """Fit on a level-0 instance and its pair index, transform to level ``levels``."""

    def __init__(self, levels=1, mode="faithful", materialize=True, max_entries=2_000_000):
        self.levels = levels
        self.mode = mode
        self.materialize = materialize
        self.max_entries = max_entries

    def fit(self, base, pairs):
        base = _as_instance(base)
        self.amplification_ = Amplification(base, pairs, self.mode)
        self.base_ = base
        self.pairs_ = pairs
        self.counts_ = self.amplification_.counts(self.levels)
        return self

    def transform(self, base=None):
        check_is_fitted(self, "amplification_")
        if base is not None and base != self.base_:
            raise ValueError("transform must receive the instance passed to fit")
        params = AmplifyParams(self.levels, self.mode, self.materialize, self.max_entries)
        return amplify(self.base_, self.pairs_, params)

    def fit_transform(self, base, pairs):
        return self.fit(base, pairs).transform()
