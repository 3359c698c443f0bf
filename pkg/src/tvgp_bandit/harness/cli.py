"""
Command line front end.

    tvgp-bandit synthetic --config experiment.yaml --seed 7 --out results.csv
    tvgp-bandit real --config temperature.cfg
    tvgp-bandit fit-eps | bounds | mi-check | genie [--config ...]

Exit codes: 0 success, 1 configuration or dataset error, 2 numerical failure,
3 failed inequality or acceptance check.
"""

import argparse
import sys
from pathlib import Path
from typing import Optional, Sequence

import numpy as np
import pandas as pd
from loguru import logger

from tvgp_bandit.harness.config_dataclass import MODES, ExperimentConfig
from tvgp_bandit.harness.real_data import run_real
from tvgp_bandit.harness.results import emit_csv
from tvgp_bandit.harness.sensors import empirical_covariance, ingest_sensor_csv
from tvgp_bandit.harness.synthetic import run_synthetic
from tvgp_bandit.hyperlearn.fitting import GradientAscent, GridSearch, Search, fit_eps
from tvgp_bandit.hyperlearn.training import TrainingSet
from tvgp_bandit.theory.checks import CHECKS, run_check_suite
from tvgp_bandit.theory.genie import genie_baseline, loglog_slope
from tvgp_bandit.tracking.tracker import step_tracker
from tvgp_bandit.utils.errors import (
    AcceptanceFailure,
    ConfigError,
    DatasetError,
    NumericalFailure,
)

EXIT_OK, EXIT_CONFIG, EXIT_NUMERICAL, EXIT_ACCEPTANCE = 0, 1, 2, 3
MI_CHECKS = ("mi_split", "mi_split_blockwise")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="tvgp-bandit", description="Time-varying GP bandit experiments"
    )
    parser.add_argument("mode", choices=MODES)
    parser.add_argument("--config", type=Path, help="YAML or key = value config file")
    parser.add_argument("--seed", type=int, help="master seed")
    parser.add_argument("--out", help="output CSV path")
    parser.add_argument("--trials", type=int)
    parser.add_argument("--workers", type=int)
    parser.add_argument(
        "--paper-scale",
        action="store_true",
        default=None,
        help="50 × 50 grid and 200 trials",
    )
    parser.add_argument("--verbose", action="store_true")
    return parser


def load_config(args: argparse.Namespace) -> ExperimentConfig:
    config = ExperimentConfig()
    if args.config:
        config = ExperimentConfig.from_file(args.config)
    return config.with_overrides(
        mode=args.mode,
        seed=args.seed,
        out=args.out,
        trials=args.trials,
        workers=args.workers,
        paper_scale=args.paper_scale,
    )


def configure_logging(verbose: bool) -> None:
    logger.remove()
    logger.add(sys.stderr, level="DEBUG" if verbose else "INFO")


def _require_data(config: ExperimentConfig) -> str:
    if not config.data_path:
        raise ConfigError(f"mode '{config.mode}' needs data_path in the config")
    return config.data_path


def run_synthetic_mode(config: ExperimentConfig) -> None:
    table = run_synthetic(config)
    emit_csv(table, config.out)
    print(table.final().to_string(index=False))


def run_real_mode(config: ExperimentConfig) -> None:
    table = run_real(config, ingest_sensor_csv(_require_data(config)))
    emit_csv(table, config.out)
    print(table.final().to_string(index=False))


def run_fit_eps_mode(config: ExperimentConfig) -> None:
    """Fit ε on sensor training rows, or on panels simulated at the configured ε."""
    search: Search = GridSearch(workers=config.workers)
    if config.eps_search == "ascent":
        search = GradientAscent()
    if config.data_path:
        dataset = ingest_sensor_csv(config.data_path)
        if config.sensor_ids:
            dataset = dataset.select_sensors(config.sensor_ids)
        if config.train_rows:
            dataset, _ = dataset.split(config.train_rows)
        dataset, _ = dataset.drop_incomplete_rows()
        kernel = empirical_covariance(dataset)
        scale = float(np.sqrt(kernel.raw_scale))
        centered = (dataset.readings - dataset.readings.mean(axis=0)) / scale
        labels = (
            dataset.day_labels(config.rows_per_day)
            if config.rows_per_day
            else np.zeros(dataset.n_rows, dtype=int)
        )
        panels = [centered[labels == day] for day in np.unique(labels)]
        data = TrainingSet.from_panels(panels, np.arange(dataset.n_sensors))
        noise_std = np.sqrt(config.assumed_noise_var or config.noise_var) / scale
        eps = fit_eps(data, kernel, noise_std, search)
    else:
        data = TrainingSet.simulated(
            config.grid(),
            config.kernel_spec(),
            config.eps,
            config.noise_var,
            days=config.panel_days,
            steps=config.horizon,
            seed=config.seed,
        )
        noise_std = np.sqrt(config.assumed_noise_var or config.noise_var)
        eps = fit_eps(data, config.kernel_spec(), noise_std, search)
    print(f"eps_hat = {eps:.9g}")


def _run_suites(config: ExperimentConfig, names: Sequence[str]) -> None:
    suites = [
        run_check_suite(name, config.check_instances, config.seed, progress=True)
        for name in names
    ]
    print(pd.DataFrame([suite.summary() for suite in suites]).to_string(index=False))
    failures = [failure for suite in suites for failure in suite.failures]
    if failures:
        first = failures[0]
        raise AcceptanceFailure(
            f"{len(failures)} inequality violations; first: {first.name} "
            f"{first.instance} margins {first.margins}"
        )


def run_genie_mode(config: ExperimentConfig) -> None:
    table = genie_baseline(
        config.grid(),
        config.kernel_spec(),
        config.eps_sweep,
        config.horizon,
        config.trials,
        seed=config.seed,
        progress=True,
    )
    table.to_csv(config.out, index=False, lineterminator="\n")
    print(table.to_string(index=False))
    positive = table[(table.eps > 0) & (table.mean_regret > 0)]
    if len(positive) >= 2:
        slope = loglog_slope(positive.eps.to_numpy(), positive.mean_regret.to_numpy())
        print(f"log-log slope = {slope:.4f}")


def run(config: ExperimentConfig) -> None:
    if config.mode == "synthetic":
        run_synthetic_mode(config)
    elif config.mode == "real":
        run_real_mode(config)
    elif config.mode == "fit-eps":
        run_fit_eps_mode(config)
    elif config.mode == "bounds":
        _run_suites(config, sorted(CHECKS))
    elif config.mode == "mi-check":
        _run_suites(config, MI_CHECKS)
    else:
        run_genie_mode(config)


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    configure_logging(args.verbose)
    try:
        run(load_config(args))
    except (ConfigError, DatasetError) as e:
        logger.error(f"configuration error: {e}")
        return EXIT_CONFIG
    except NumericalFailure as e:
        logger.error(f"numerical failure: {e}")
        return EXIT_NUMERICAL
    except AcceptanceFailure as e:
        logger.error(f"check failed: {e}")
        return EXIT_ACCEPTANCE
    finally:
        timings = step_tracker.timing_table().to_string(index=False)
        logger.debug(f"step timings:\n{timings}")
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
