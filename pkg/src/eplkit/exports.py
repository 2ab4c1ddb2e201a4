from __future__ import annotations

import csv
import io
import json
from dataclasses import dataclass
from typing import Iterable, Sequence

from .accumulator import StepRecord
from .bandit import Trajectory, regret_curve
from .verifiers import ProofStepReport

RECORD_FIELDS = ["t", "i", "lambda_i", "eps_sq_i", "norm_before", "norm_after"]
TRAJECTORY_FIELDS = ["t", "arm_index", "reward", "instant_regret", "bonus", "cum_regret"]
BOUND_FIELDS = ["p", "regime", "bound"]


@dataclass(frozen=True)
class ExperimentRecord:
    t: int
    i: int
    lambda_i: float
    eps_sq_i: float
    norm_before: float
    norm_after: float


@dataclass(frozen=True)
class SuiteOutcome:
    suite: str
    trials: int
    failures: int
    reports: list[ProofStepReport]
    first_failure: dict[str, object] | None = None

    def to_dict(self) -> dict[str, object]:
        payload: dict[str, object] = {
            "suite": self.suite,
            "trials": self.trials,
            "failures": self.failures,
            "reports": [report.to_dict() for report in self.reports],
        }
        if self.first_failure is not None:
            payload["first_failure"] = self.first_failure
        return payload


def format_float(value: float) -> str:
    text = f"{value:.6f}"
    # Values that round to zero print unsigned.
    return "0.000000" if text == "-0.000000" else text


def build_records(steps: Iterable[StepRecord]) -> list[ExperimentRecord]:
    records: list[ExperimentRecord] = []
    for step in steps:
        for index, (value, eps) in enumerate(zip(step.eigenvalues, step.increments), start=1):
            records.append(
                ExperimentRecord(
                    t=step.t,
                    i=index,
                    lambda_i=float(value),
                    eps_sq_i=float(eps),
                    norm_before=step.norm_before,
                    norm_after=step.norm_after,
                )
            )
    return records


def records_to_csv(records: Iterable[ExperimentRecord]) -> str:
    buffer = io.StringIO(newline="")
    writer = csv.DictWriter(buffer, fieldnames=RECORD_FIELDS, lineterminator="\n")
    writer.writeheader()
    for record in records:
        writer.writerow(
            {
                "t": str(record.t),
                "i": str(record.i),
                "lambda_i": format_float(record.lambda_i),
                "eps_sq_i": format_float(record.eps_sq_i),
                "norm_before": format_float(record.norm_before),
                "norm_after": format_float(record.norm_after),
            }
        )
    return buffer.getvalue()


def trajectory_to_csv(trajectory: Trajectory) -> str:
    buffer = io.StringIO(newline="")
    writer = csv.DictWriter(buffer, fieldnames=TRAJECTORY_FIELDS, lineterminator="\n")
    writer.writeheader()
    curve = regret_curve(trajectory)
    for index, (t, cumulative) in enumerate(curve):
        writer.writerow(
            {
                "t": str(t),
                "arm_index": str(trajectory.arms[index]),
                "reward": format_float(trajectory.rewards[index]),
                "instant_regret": format_float(trajectory.regrets[index]),
                "bonus": format_float(trajectory.bonuses[index]),
                "cum_regret": format_float(cumulative),
            }
        )
    return buffer.getvalue()


def bounds_to_csv(rows: Sequence[tuple[float, str, float]]) -> str:
    buffer = io.StringIO(newline="")
    writer = csv.DictWriter(buffer, fieldnames=BOUND_FIELDS, lineterminator="\n")
    writer.writeheader()
    for power, regime, bound in rows:
        writer.writerow({"p": f"{power:g}", "regime": regime, "bound": format_float(bound)})
    return buffer.getvalue()


def verify_report_to_json(outcomes: Iterable[SuiteOutcome]) -> str:
    outcomes_list = list(outcomes)
    payload = {
        "suite": "all",
        "trials": sum(outcome.trials for outcome in outcomes_list),
        "failures": sum(outcome.failures for outcome in outcomes_list),
        "reports": [
            report.to_dict() for outcome in outcomes_list for report in outcome.reports
        ],
        "suites": [outcome.to_dict() for outcome in outcomes_list],
    }
    return json.dumps(payload, ensure_ascii=True, indent=2)
