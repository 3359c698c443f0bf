"""
Sensor reading panels: rows are time steps at a fixed interval, columns are
sensors.

CSV layout: a header `timestamp,<sensor id>,<sensor id>,...` and one row per time
step. An empty cell, `NA` or `NaN` marks a missing reading.
"""

from dataclasses import dataclass
from pathlib import Path
from typing import Sequence, Union

import numpy as np
import pandas as pd
from loguru import logger

from tvgp_bandit.kernel.kernels import EmpiricalKernel
from tvgp_bandit.tracking.decorator import track_step_and_log
from tvgp_bandit.utils.errors import (
    ConfigError,
    DatasetError,
    EmptyDatasetError,
    RaggedRowsError,
    UnparseableValueError,
)

TIMESTAMP_COLUMN = "timestamp"
MISSING_MARKERS = ("", "na", "nan")
# added to the covariance diagonal, relative to its largest entry
COVARIANCE_JITTER = 1e-8


@dataclass(frozen=True, eq=False)
class SensorDataset:
    readings: np.ndarray
    sensor_ids: list[str]
    timestamps: list[str]

    def __post_init__(self):
        readings = np.asarray(self.readings, dtype=float)
        if readings.ndim != 2:
            raise DatasetError(
                f"readings must be a (steps, sensors) matrix, got {readings.shape}"
            )
        if readings.shape[1] != len(self.sensor_ids):
            raise DatasetError("one sensor id is needed per reading column")
        if readings.shape[0] != len(self.timestamps):
            raise DatasetError("one timestamp is needed per reading row")
        if len(set(self.sensor_ids)) != len(self.sensor_ids):
            raise DatasetError("sensor ids must be distinct")
        object.__setattr__(self, "readings", readings)
        object.__setattr__(self, "sensor_ids", [str(s) for s in self.sensor_ids])
        object.__setattr__(self, "timestamps", [str(t) for t in self.timestamps])

    @property
    def n_rows(self) -> int:
        return self.readings.shape[0]

    @property
    def n_sensors(self) -> int:
        return self.readings.shape[1]

    def __eq__(self, other: object) -> bool:
        return (
            isinstance(other, SensorDataset)
            and self.sensor_ids == other.sensor_ids
            and self.timestamps == other.timestamps
            and np.array_equal(self.readings, other.readings, equal_nan=True)
        )

    def rows(self, start: int, stop: int) -> "SensorDataset":
        return SensorDataset(
            readings=self.readings[start:stop],
            sensor_ids=self.sensor_ids,
            timestamps=self.timestamps[start:stop],
        )

    def split(self, train_rows: int) -> tuple["SensorDataset", "SensorDataset"]:
        """First `train_rows` rows for learning, the rest for the bandit run."""
        if not 0 < train_rows < self.n_rows:
            raise ConfigError(
                f"train_rows must lie in 1..{self.n_rows - 1}, got {train_rows}"
            )
        return self.rows(0, train_rows), self.rows(train_rows, self.n_rows)

    def select_sensors(self, sensor_ids: Sequence[str]) -> "SensorDataset":
        wanted = [str(s) for s in sensor_ids]
        missing = [s for s in wanted if s not in self.sensor_ids]
        if missing:
            raise DatasetError(f"sensor ids not in the dataset: {missing}")
        columns = [self.sensor_ids.index(s) for s in wanted]
        return SensorDataset(self.readings[:, columns], wanted, self.timestamps)

    def drop_incomplete_rows(self) -> tuple["SensorDataset", int]:
        """Drop every row with a missing reading; returns the dataset and the count."""
        complete = ~np.isnan(self.readings).any(axis=1)
        dropped = int((~complete).sum())
        if dropped:
            logger.info(f"dropped {dropped} of {self.n_rows} rows with missing readings")
        kept = [stamp for stamp, keep in zip(self.timestamps, complete) if keep]
        return SensorDataset(self.readings[complete], self.sensor_ids, kept), dropped

    def day_labels(self, rows_per_day: int) -> np.ndarray:
        """Segment label of each row when every `rows_per_day` rows form one day."""
        if rows_per_day < 1:
            raise ConfigError(f"rows_per_day must be >= 1, got {rows_per_day}")
        return np.arange(self.n_rows) // rows_per_day


def _sort_key(timestamps: pd.Series) -> pd.Series:
    numeric = pd.to_numeric(timestamps, errors="coerce")
    if not numeric.isna().any():
        return numeric
    try:
        return pd.to_datetime(timestamps)
    except (ValueError, TypeError) as e:
        raise UnparseableValueError(f"unparseable timestamp: {e}") from e


@track_step_and_log(lambda path: f"Ingest sensor CSV {path}")
def ingest_sensor_csv(path: Union[str, Path]) -> SensorDataset:
    """
    Read a sensor CSV into a dataset with rows in timestamp order.

    :raises EmptyDatasetError: the file has no header or no data rows
    :raises RaggedRowsError: a row has more or fewer cells than the header
    :raises UnparseableValueError: a reading or timestamp is not a number/date
    """
    try:
        frame = pd.read_csv(path, dtype=str, keep_default_na=False)
    except pd.errors.EmptyDataError as e:
        raise EmptyDatasetError(f"{path} is empty") from e
    except pd.errors.ParserError as e:
        raise RaggedRowsError(f"{path}: {e}") from e
    except OSError as e:
        raise DatasetError(f"cannot read {path}: {e}") from e

    if frame.empty:
        raise EmptyDatasetError(f"{path} has a header but no rows")
    if frame.columns[0] != TIMESTAMP_COLUMN or frame.shape[1] < 2:
        raise DatasetError(f"{path}: header must be '{TIMESTAMP_COLUMN},<sensor ids>'")
    # short rows come back padded with NaN, explicit empty cells as ""
    short = frame.isna().any(axis=1)
    if short.any():
        line = int(np.flatnonzero(short.to_numpy())[0]) + 2
        raise RaggedRowsError(f"{path}:{line}: row has fewer cells than the header")

    cells = frame.iloc[:, 1:]
    stripped = cells.apply(lambda column: column.str.strip())
    missing = stripped.apply(lambda column: column.str.lower().isin(MISSING_MARKERS))
    numbers = stripped.apply(lambda column: pd.to_numeric(column, errors="coerce"))
    bad = numbers.isna() & ~missing
    if bad.to_numpy().any():
        row, col = np.argwhere(bad.to_numpy())[0]
        raise UnparseableValueError(
            f"{path}:{row + 2}: cannot parse {cells.iat[row, col]!r} "
            f"for sensor {cells.columns[col]}"
        )

    stamps = frame[TIMESTAMP_COLUMN].str.strip()
    order = np.argsort(_sort_key(stamps).to_numpy(), kind="stable")
    dataset = SensorDataset(
        readings=numbers.to_numpy(dtype=float)[order],
        sensor_ids=[str(c) for c in cells.columns],
        timestamps=stamps.to_numpy()[order].tolist(),
    )
    logger.debug(f"read {dataset.n_rows} rows × {dataset.n_sensors} sensors from {path}")
    return dataset


def write_sensor_csv(dataset: SensorDataset, path: Union[str, Path]) -> Path:
    path = Path(path)
    frame = pd.DataFrame(dataset.readings, columns=dataset.sensor_ids)
    frame.insert(0, TIMESTAMP_COLUMN, dataset.timestamps)
    try:
        frame.to_csv(path, index=False, na_rep="", lineterminator="\n")
    except OSError as e:
        raise ConfigError(f"cannot write {path}: {e}") from e
    return path


def sample_covariance(training: SensorDataset) -> np.ndarray:
    """Unbiased covariance across time rows, one row/column per sensor."""
    if training.n_rows < 2:
        raise ConfigError(f"need at least 2 training rows, got {training.n_rows}")
    if np.isnan(training.readings).any():
        raise DatasetError("training rows with missing readings must be dropped first")
    return np.atleast_2d(np.cov(training.readings, rowvar=False))


def empirical_covariance(
    training: SensorDataset, signal_variance: float = 1.0
) -> EmpiricalKernel:
    """
    Sample covariance of the training rows as a kernel over sensor indices:
    symmetrized, jittered on the diagonal, then rescaled so its largest variance
    equals `signal_variance`.
    """
    matrix = sample_covariance(training)
    constant = [
        sensor for sensor, var in zip(training.sensor_ids, np.diag(matrix)) if var <= 0.0
    ]
    if constant:
        logger.warning(f"sensors with constant training readings kept: {constant}")
    matrix = 0.5 * (matrix + matrix.T)
    top = float(np.max(np.diag(matrix)))
    matrix[np.diag_indices_from(matrix)] += COVARIANCE_JITTER * max(top, 1.0)
    return EmpiricalKernel.from_matrix(matrix, signal_variance=signal_variance)
