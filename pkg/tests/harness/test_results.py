import numpy as np
import pandas as pd
import pytest

from tvgp_bandit.algorithms.trace import RegretTrace
from tvgp_bandit.harness.results import (
    RESULT_COLUMNS,
    ResultTable,
    emit_csv,
    format_number,
    read_result_csv,
)
from tvgp_bandit.utils.errors import ConfigError, DatasetError

HEADER = "algorithm,t,mean_avg_regret,std_avg_regret,trials\n"


def _trace(label, regrets, trial=0):
    regrets = np.asarray(regrets, dtype=float)
    arms = np.zeros(regrets.size, dtype=int)
    return RegretTrace(label, arms, np.zeros(regrets.size), regrets, seed=0, trial=trial)


@pytest.fixture
def table():
    return ResultTable.from_traces(
        {
            "tv-gp-ucb": [
                _trace("tv-gp-ucb", [1.0, 0.0]),
                _trace("tv-gp-ucb", [3.0, 2.0], trial=1),
            ],
            "gp-ucb": [_trace("gp-ucb", [0.25, 0.25])],
        }
    )


def test_aggregates(table):
    row = table.at("tv-gp-ucb", 2)
    assert row.mean_avg_regret == 1.5
    assert row.std_avg_regret == pytest.approx(np.sqrt(2.0))
    assert row.trials == 2
    # a single trial has no spread
    assert table.at("gp-ucb", 1).std_avg_regret == 0.0


def test_rows_sorted_by_algorithm_then_step(table):
    labels = table.frame.algorithm.tolist()
    assert labels == ["gp-ucb", "gp-ucb", "tv-gp-ucb", "tv-gp-ucb"]
    assert table.final().algorithm.tolist() == ["gp-ucb", "tv-gp-ucb"]
    assert table.final().t.tolist() == [2, 2]


def test_missing_row(table):
    with pytest.raises(KeyError):
        table.at("random", 1)


def test_mixed_horizons():
    with pytest.raises(ConfigError):
        ResultTable.from_traces({"a": [_trace("a", [1.0]), _trace("a", [1.0, 2.0])]})


def test_format_number():
    assert format_number(2.0) == "2"
    assert format_number(1.5) == "1.5"
    assert format_number(np.sqrt(2.0)) == "1.41421356"
    assert format_number(0.0) == "0"


def test_golden_bytes(tmp_path, table):
    path = emit_csv(table, tmp_path / "out" / "results.csv")
    assert path.read_bytes() == (
        HEADER
        + "gp-ucb,1,0.25,0,1\n"
        + "gp-ucb,2,0.25,0,1\n"
        + "tv-gp-ucb,1,2,1.41421356,2\n"
        + "tv-gp-ucb,2,1.5,1.41421356,2\n"
    ).encode()


def test_empty_table_writes_header_only(tmp_path):
    path = emit_csv(ResultTable.empty(), tmp_path / "empty.csv")
    assert path.read_text() == HEADER
    assert len(ResultTable.from_traces({})) == 0


def test_read_back(tmp_path, table):
    path = emit_csv(table, tmp_path / "results.csv")
    again = read_result_csv(path)
    assert again.at("tv-gp-ucb", 2).mean_avg_regret == 1.5
    assert again.frame.columns.tolist() == RESULT_COLUMNS


def test_read_missing_file(tmp_path):
    with pytest.raises(DatasetError):
        read_result_csv(tmp_path / "absent.csv")


def test_table_needs_columns():
    with pytest.raises(ConfigError):
        ResultTable(pd.DataFrame({"algorithm": ["a"]}))


def test_equality(table):
    assert table == ResultTable(table.frame.copy())
    assert table != ResultTable.empty()
