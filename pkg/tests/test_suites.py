from __future__ import annotations

import numpy as np
import pytest

from eplkit import suites
from eplkit.suites import SUITES, Suite, run_suite, run_suites, suite_key, total_trials
from eplkit.verifiers import make_report


def _flipped(rng: np.random.Generator) -> list:
    value = float(rng.uniform(1.0, 2.0))
    return [make_report("flipped", value, 0.0, 1e-12)]


def test_suite_weights_reach_default_trial_count() -> None:
    counts = {suite.name: suite.trial_count(10000) for suite in SUITES}
    assert counts["weyl"] + counts["trace_rotation"] >= 10**5 // 2
    assert sum(counts.values()) >= 10**5


def test_trial_count_never_zero() -> None:
    assert Suite("tiny", 0.0001, _flipped).trial_count(1) == 1


def test_suite_key_is_stable() -> None:
    assert suite_key("weyl") == suite_key("weyl")
    assert suite_key("weyl") != suite_key("jensen")


@pytest.mark.parametrize("suite", SUITES, ids=[suite.name for suite in SUITES])
def test_each_suite_passes_a_few_trials(suite: Suite) -> None:
    outcome = run_suite(suite, 2, seed=0)
    assert outcome.failures == 0
    assert outcome.first_failure is None
    assert outcome.reports
    assert all(report.passed for report in outcome.reports)


def test_run_suite_is_reproducible() -> None:
    suite = next(suite for suite in SUITES if suite.name == "jensen")
    first = run_suite(suite, 5, seed=3)
    second = run_suite(suite, 5, seed=3)
    assert first == second


def test_run_suite_records_first_failure() -> None:
    outcome = run_suite(Suite("broken", 1.0, _flipped), 4, seed=9)
    assert outcome.failures == 4
    assert outcome.first_failure == {
        "trial": 0,
        "seed": [9, suite_key("broken"), 0],
        "step": "flipped",
    }
    assert outcome.reports[0].step == "flipped"


def test_run_suites_uses_module_registry(monkeypatch: pytest.MonkeyPatch) -> None:
    monkeypatch.setattr(suites, "SUITES", [Suite("broken", 2.0, _flipped)])
    outcomes = run_suites(3, seed=0)
    assert [outcome.suite for outcome in outcomes] == ["broken"]
    assert total_trials(outcomes) == 6


def test_run_suites_rejects_zero_trials() -> None:
    with pytest.raises(ValueError):
        run_suites(0, seed=0)
