import pytest
from sklearn.base import clone
from sklearn.exceptions import NotFittedError

from robustnet.estimators import GapAmplifier, MeanScenarioSolver, RobustSolver


def test_solver_params_and_fit(sat3_path):
    inst, _ = sat3_path
    est = RobustSolver(objective="regret", method="brute")
    assert est.get_params()["objective"] == "regret"
    est.fit(inst)
    assert est.value_ == 1 and est.method_ == "brute"
    assert est.score(inst) == -1
    twin = clone(est).set_params(method="dp").fit(inst)
    assert twin.value_ == 1 and twin.method_ == "pareto_dp"


def test_solver_requires_instance():
    with pytest.raises(TypeError):
        RobustSolver().fit([[1, 2]])
    with pytest.raises(NotFittedError):
        RobustSolver().score(None)


def test_heuristic_estimator(sat3_path):
    inst, _ = sat3_path
    est = MeanScenarioSolver().fit(inst)
    assert 1 <= est.value_ <= 6


def test_amplifier(sat3_path):
    base, pairs = sat3_path
    amp = GapAmplifier(levels=1)
    inst = amp.fit_transform(base, pairs)
    assert (inst.edge_count, inst.scenario_count) == (400, 216)
    assert amp.counts_ == (275, 400, 216)
    imp = GapAmplifier(levels=2, materialize=False).fit(base, pairs).transform(base)
    assert imp.scenario_count == 6**7
    with pytest.raises(NotFittedError):
        GapAmplifier().transform()
