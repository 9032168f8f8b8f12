from __future__ import annotations

import pytest

from wheelcalc import checks
from wheelcalc.checks import SUITES, CheckConfig, run_suite

SMALL = CheckConfig(seed=3, max_len=3, scale=0.1)


@pytest.mark.parametrize("name", sorted(SUITES))
def test_every_suite_passes_at_small_scale(name) -> None:
    results = run_suite(name, SMALL)
    assert results
    for r in results:
        assert r.passed, (r.line(), r.counterexample)
        assert r.to_json()["passed"]


@pytest.mark.parametrize("name", ["wheel", "bialgebra", "diffops"])
def test_results_depend_only_on_the_seed(name) -> None:
    first = [r.to_json() for r in run_suite(name, SMALL)]
    assert first == [r.to_json() for r in run_suite(name, SMALL)]


def test_suites_do_not_depend_on_run_order() -> None:
    cfg = CheckConfig(seed=5, scale=0.05)
    together = [r.to_json() for r in run_suite("all", cfg) if r.suite == "weil" or r.suite == "wheel"]
    apart = [r.to_json() for n in ("wheel", "weil") for r in run_suite(n, cfg)]
    assert together == apart


def test_budget_scales_and_never_vanishes() -> None:
    assert CheckConfig().budget(210) == 210
    assert CheckConfig(scale=0.5).budget(210) == 105
    assert CheckConfig(scale=0.0001).budget(210) == 1


def test_unknown_suite() -> None:
    with pytest.raises(KeyError):
        run_suite("nope")


def test_a_broken_operator_is_caught(monkeypatch) -> None:
    monkeypatch.setattr(checks, "bv_trivial", lambda u: u)
    square = run_suite("bv", SMALL)[0]
    assert square.name == "square_zero"
    assert not square.passed and square.failures == square.cases
    assert set(square.counterexample) == {"u", "D2u"}


def test_a_trivialized_action_is_caught(monkeypatch) -> None:
    monkeypatch.setattr(checks, "wheel_act", lambda a, b, u: u)
    equiv = run_suite("wheel", CheckConfig(seed=1, scale=0.2))[1]
    assert equiv.name == "equivariance"
    assert equiv.failures > 0 and "lhs" in equiv.counterexample
