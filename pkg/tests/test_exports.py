import csv
import io
import json
from pathlib import Path

import numpy as np

from eplkit.bandit import GeneralizedLinUCBPolicy, LinearBanditEnv, run_episode
from eplkit.bounds import run_sequence
from eplkit.exports import (
    RECORD_FIELDS,
    TRAJECTORY_FIELDS,
    SuiteOutcome,
    bounds_to_csv,
    build_records,
    format_float,
    records_to_csv,
    trajectory_to_csv,
    verify_report_to_json,
)
from eplkit.sequences import parse_sequence_file
from eplkit.verifiers import make_report


def test_format_float() -> None:
    assert format_float(14.14213562) == "14.142136"
    assert format_float(1e-7) == "0.000000"
    assert format_float(-1e-7) == "0.000000"
    assert format_float(-0.25) == "-0.250000"
    assert format_float(2.0) == "2.000000"


def test_build_records_one_row_per_eigenvalue() -> None:
    acc = run_sequence([[1.0, 0.0], [0.0, 0.5]], 1.0, 1.0)
    records = build_records(acc.records())
    assert [(record.t, record.i) for record in records] == [(1, 1), (1, 2), (2, 1), (2, 2)]
    assert records[0].lambda_i == 2.0
    assert records[0].eps_sq_i == 1.0
    assert records[1].eps_sq_i == 0.0
    assert records[2].norm_before == records[3].norm_before


def test_records_to_csv_matches_golden(fixtures_dir: Path) -> None:
    text = (fixtures_dir / "golden_d1_sequence.txt").read_text(encoding="utf-8")
    acc = run_sequence(parse_sequence_file(text), 1.0, 2.0)
    expected = (fixtures_dir / "golden_d1_expected.csv").read_text(encoding="utf-8")
    assert records_to_csv(build_records(acc.records())) == expected


def test_records_to_csv_header_only() -> None:
    assert records_to_csv([]) == ",".join(RECORD_FIELDS) + "\n"


def test_trajectory_to_csv() -> None:
    env = LinearBanditEnv(theta=np.array([0.0, 1.0]), arms=np.eye(2), noise=0.0, seed=0)
    trajectory = run_episode(env, GeneralizedLinUCBPolicy(2, 1.0, 1.0), 5)
    text = trajectory_to_csv(trajectory)
    rows = list(csv.DictReader(io.StringIO(text)))
    assert list(rows[0].keys()) == TRAJECTORY_FIELDS
    assert [row["t"] for row in rows] == ["1", "2", "3", "4", "5"]
    assert rows[0]["arm_index"] == "0"
    assert rows[0]["instant_regret"] == "1.000000"
    assert rows[-1]["cum_regret"] == format_float(trajectory.cumulative_regret)
    assert "\r" not in text


def test_bounds_to_csv() -> None:
    text = bounds_to_csv([(2.0, "p>1", 14.142135623730951), (0.5, "p<1", 44.83277)])
    assert text == "p,regime,bound\n2,p>1,14.142136\n0.5,p<1,44.832770\n"


def test_verify_report_to_json() -> None:
    failing = make_report("jensen", 2.0, 1.0, 0.0)
    outcomes = [
        SuiteOutcome(
            suite="jensen",
            trials=3,
            failures=1,
            reports=[failing],
            first_failure={"trial": 1, "seed": [0, 1, 1], "step": "jensen"},
        ),
        SuiteOutcome(suite="weyl", trials=2, failures=0, reports=[]),
    ]
    payload = json.loads(verify_report_to_json(outcomes))
    assert payload["suite"] == "all"
    assert payload["trials"] == 5
    assert payload["failures"] == 1
    assert payload["reports"][0]["pass"] is False
    assert payload["suites"][0]["first_failure"]["step"] == "jensen"
    assert "first_failure" not in payload["suites"][1]
