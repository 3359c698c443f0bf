from dataclasses import dataclass
from pathlib import Path
from typing import Mapping, Sequence, Union

import numpy as np
import pandas as pd

from tvgp_bandit.algorithms.trace import RegretTrace
from tvgp_bandit.tracking.decorator import track_step_and_log
from tvgp_bandit.utils.errors import ConfigError, DatasetError

RESULT_COLUMNS = ["algorithm", "t", "mean_avg_regret", "std_avg_regret", "trials"]
SIGNIFICANT_DIGITS = 9


@dataclass(frozen=True, eq=False)
class ResultTable:
    """Mean and standard deviation across trials of the average regret R_t/t."""

    frame: pd.DataFrame

    def __post_init__(self):
        missing = set(RESULT_COLUMNS) - set(self.frame.columns)
        if missing:
            raise ConfigError(f"result table lacks columns {sorted(missing)}")
        ordered = (
            self.frame[RESULT_COLUMNS]
            .astype({"algorithm": str, "t": int, "trials": int})
            .astype({"mean_avg_regret": float, "std_avg_regret": float})
            .sort_values(["algorithm", "t"], kind="mergesort")
            .reset_index(drop=True)
        )
        object.__setattr__(self, "frame", ordered)

    def __len__(self) -> int:
        return len(self.frame)

    def __eq__(self, other: object) -> bool:
        return isinstance(other, ResultTable) and self.frame.equals(other.frame)

    @classmethod
    def empty(cls) -> "ResultTable":
        return cls(pd.DataFrame(columns=RESULT_COLUMNS))

    @classmethod
    def from_traces(cls, traces: Mapping[str, Sequence[RegretTrace]]) -> "ResultTable":
        """One row per (algorithm, t); every trace of an algorithm must share T."""
        frames = []
        for label, runs in traces.items():
            if not runs:
                continue
            horizons = {trace.horizon for trace in runs}
            if len(horizons) != 1:
                raise ConfigError(f"traces of '{label}' have different horizons")
            averages = np.vstack([trace.average for trace in runs])
            spread = averages.std(axis=0, ddof=1) if len(runs) > 1 else np.zeros(
                averages.shape[1]
            )
            frames.append(
                pd.DataFrame(
                    {
                        "algorithm": label,
                        "t": np.arange(1, averages.shape[1] + 1),
                        "mean_avg_regret": averages.mean(axis=0),
                        "std_avg_regret": spread,
                        "trials": len(runs),
                    }
                )
            )
        if not frames:
            return cls.empty()
        return cls(pd.concat(frames, ignore_index=True))

    def final(self) -> pd.DataFrame:
        """Last step of every algorithm."""
        return self.frame.groupby("algorithm", sort=True).tail(1).reset_index(drop=True)

    def at(self, algorithm: str, t: int) -> pd.Series:
        rows = self.frame[(self.frame.algorithm == algorithm) & (self.frame.t == t)]
        if rows.empty:
            raise KeyError(f"no result for {algorithm} at t={t}")
        return rows.iloc[0]


def format_number(value: float) -> str:
    """Fixed 9-significant-digit positional decimal, trailing zeros trimmed."""
    return np.format_float_positional(
        float(value),
        precision=SIGNIFICANT_DIGITS,
        unique=False,
        fractional=False,
        trim="-",
    )


@track_step_and_log(lambda table, path: f"Write results to {path}")
def emit_csv(table: ResultTable, path: Union[str, Path]) -> Path:
    path = Path(path)
    text = table.frame.copy()
    for column in ("mean_avg_regret", "std_avg_regret"):
        text[column] = text[column].map(format_number)
    try:
        if path.parent != Path(""):
            path.parent.mkdir(parents=True, exist_ok=True)
        text.to_csv(path, index=False, lineterminator="\n")
    except OSError as e:
        raise ConfigError(f"cannot write results to {path}: {e}") from e
    return path


def read_result_csv(path: Union[str, Path]) -> ResultTable:
    try:
        frame = pd.read_csv(path, dtype={"algorithm": str})
    except (OSError, pd.errors.ParserError) as e:
        raise DatasetError(f"cannot read results from {path}: {e}") from e
    return ResultTable(frame)
