from dataclasses import asdict, dataclass, field, fields, replace
from pathlib import Path
from typing import Any, Optional, Union, get_args, get_origin

from tvgp_bandit.algorithms.beta import PracticalBeta
from tvgp_bandit.algorithms.config import (
    RGPUCB,
    AlgorithmConfig,
    default_label,
    is_auto_block,
    parse_algorithm,
)
from tvgp_bandit.algorithms.policies import block_size
from tvgp_bandit.environment.grid import DomainGrid
from tvgp_bandit.harness.presets import get_preset
from tvgp_bandit.kernel.decay import validate_eps
from tvgp_bandit.kernel.kernels import KernelSpec, Matern, SquaredExponential
from tvgp_bandit.utils.errors import ConfigError
from tvgp_bandit.utils.utils import read_flat_config, read_from_yaml

MODES = ("synthetic", "real", "fit-eps", "bounds", "mi-check", "genie")
PAPER_SCALE = {"grid_resolution": 50, "trials": 200}


@dataclass(frozen=True)
class ExperimentConfig:
    mode: str = "synthetic"
    # synthetic domain and reward model
    grid_resolution: int = 30
    dim: int = 2
    box: float = 1.0
    kernel: str = "se"
    lengthscale: float = 0.2
    nu: float = 2.5
    eps: float = 0.01
    noise_var: float = 0.01
    # what the policies assume; None means the true noise variance
    assumed_noise_var: Optional[float] = None
    horizon: int = 200
    trials: int = 50
    seed: int = 0
    algorithms: list[str] = field(
        default_factory=lambda: ["gp-ucb", "r-gp-ucb", "tv-gp-ucb"]
    )
    beta_c1: float = 0.8
    beta_c2: float = 4.0
    workers: int = 1
    out: str = "results.csv"
    paper_scale: bool = False
    track_paths: bool = False
    # real data
    data_path: Optional[str] = None
    train_rows: int = 0
    rows_per_day: Optional[int] = None
    sensor_ids: list[str] = field(default_factory=list)
    preset: Optional[str] = None
    first_arms: int = 0
    block_size_cv: bool = True
    # ε fitting: "grid" or "ascent"
    eps_search: str = "grid"
    panel_days: int = 3
    # inequality checks and genie sweep
    check_instances: int = 200
    eps_sweep: list[float] = field(default_factory=lambda: [0.005, 0.01, 0.02, 0.04])

    def __post_init__(self):
        if self.mode not in MODES:
            raise ConfigError(f"mode must be one of {MODES}, got '{self.mode}'")
        if self.trials < 1 or self.horizon < 1:
            raise ConfigError(
                f"trials and horizon must be >= 1, got {self.trials}, {self.horizon}"
            )
        if self.grid_resolution < 1 or self.dim < 1 or not self.box > 0:
            raise ConfigError("grid resolution, dimension and box must be positive")
        if self.kernel not in ("se", "matern"):
            raise ConfigError(f"kernel must be 'se' or 'matern', got '{self.kernel}'")
        if not (self.lengthscale > 0 and self.nu > 0):
            raise ConfigError("lengthscale and nu must be positive")
        validate_eps(self.eps)
        for eps in self.eps_sweep:
            validate_eps(eps)
        if self.noise_var < 0:
            raise ConfigError(f"noise variance must be >= 0, got {self.noise_var}")
        if self.workers < 1 or self.check_instances < 1:
            raise ConfigError("workers and check_instances must be >= 1")
        if self.eps_search not in ("grid", "ascent"):
            raise ConfigError(f"eps_search must be grid or ascent, got {self.eps_search}")
        if not self.algorithms:
            raise ConfigError("at least one algorithm is required")
        labels = [default_label(parse_algorithm(entry)) for entry in self.algorithms]
        if len(set(labels)) != len(labels):
            raise ConfigError(f"algorithm list has duplicate entries: {self.algorithms}")
        if self.preset is not None:
            get_preset(self.preset)
        PracticalBeta(self.beta_c1, self.beta_c2)

    @classmethod
    def from_mapping(cls, values: dict[str, Any]) -> "ExperimentConfig":
        """Build from raw values; a `preset` supplies defaults under explicit values."""
        known = {f.name: f for f in fields(cls)}
        unknown = sorted(set(values) - set(known))
        if unknown:
            raise ConfigError(f"unknown config keys: {', '.join(unknown)}")
        merged: dict[str, Any] = {}
        preset = values.get("preset")
        if preset:
            chosen = get_preset(str(preset))
            merged.update(
                {
                    "noise_var": chosen.noise_var,
                    "beta_c1": chosen.beta_c1,
                    "beta_c2": chosen.beta_c2,
                    "rows_per_day": chosen.rows_per_day,
                }
            )
            if chosen.horizon is not None:
                merged["horizon"] = chosen.horizon
            if chosen.sensor_ids:
                merged["sensor_ids"] = list(chosen.sensor_ids)
        for key, raw in values.items():
            merged[key] = _coerce(raw, known[key].type, key)
        return cls(**merged)

    @classmethod
    def from_file(cls, path: Union[str, Path]) -> "ExperimentConfig":
        """YAML for `.yaml`/`.yml` files, the flat `key = value` format otherwise."""
        path = Path(path)
        if not path.is_file():
            raise ConfigError(f"config file {path} does not exist")
        if path.suffix in (".yaml", ".yml"):
            values = read_from_yaml(path)
            if not isinstance(values, dict):
                raise ConfigError(f"{path} must hold a mapping at the top level")
        else:
            values = read_flat_config(path)
        return cls.from_mapping(values)

    def with_overrides(self, **overrides: Any) -> "ExperimentConfig":
        """Replace fields whose override is not None (unset CLI flags)."""
        changes = {key: value for key, value in overrides.items() if value is not None}
        if changes.get("paper_scale"):
            changes = {**PAPER_SCALE, **changes}
        return replace(self, **changes)

    def to_dict(self) -> dict[str, Any]:
        return asdict(self)

    def grid(self) -> DomainGrid:
        return DomainGrid.regular(self.grid_resolution, dim=self.dim, box=self.box)

    def kernel_spec(self) -> KernelSpec:
        if self.kernel == "se":
            return SquaredExponential(self.lengthscale)
        return Matern(self.lengthscale, nu=self.nu)

    def algorithm_configs(
        self, kernel: KernelSpec, eps: float, fallback_block: Optional[int] = None
    ) -> list[AlgorithmConfig]:
        """
        Parsed algorithm list. A bare `r-gp-ucb` gets `fallback_block` if given,
        else the block-size rule for (kernel, ε, T).

        :raises ConfigError: if two entries resolve to the same label
        """
        schedule = PracticalBeta(self.beta_c1, self.beta_c2)
        configs = []
        for entry in self.algorithms:
            variant = parse_algorithm(entry)
            if is_auto_block(variant):
                size = fallback_block or block_size(kernel, eps, self.horizon, self.dim)
                variant = RGPUCB(size)
            configs.append(
                AlgorithmConfig(variant, beta=schedule, noise_var=self.assumed_noise_var)
            )
        labels = [config.label for config in configs]
        repeated = sorted({label for label in labels if labels.count(label) > 1})
        if repeated:
            raise ConfigError(f"algorithms resolve to the same run: {repeated}")
        return configs


def _split_list(raw: Any) -> list:
    if isinstance(raw, (list, tuple)):
        return list(raw)
    text = str(raw).strip()
    return [item.strip() for item in text.split(",") if item.strip()] if text else []


def _coerce(raw: Any, annotation: Any, key: str) -> Any:
    """Convert a raw config value (flat-file string or YAML scalar) to `annotation`."""
    origin = get_origin(annotation)
    if origin is Union:
        inner = [arg for arg in get_args(annotation) if arg is not type(None)][0]
        if raw is None or (isinstance(raw, str) and raw.strip().lower() in ("", "none")):
            return None
        return _coerce(raw, inner, key)
    if origin is list:
        (item_type,) = get_args(annotation)
        return [_coerce(item, item_type, key) for item in _split_list(raw)]
    try:
        if annotation is bool:
            if isinstance(raw, bool):
                return raw
            text = str(raw).strip().lower()
            if text not in ("true", "false", "1", "0", "yes", "no"):
                raise ValueError(f"not a boolean: {raw!r}")
            return text in ("true", "1", "yes")
        if annotation is int:
            if isinstance(raw, float) and not raw.is_integer():
                raise ValueError(f"not an integer: {raw!r}")
            return int(raw)
        if annotation is float:
            return float(raw)
        return str(raw).strip()
    except (TypeError, ValueError) as e:
        raise ConfigError(f"bad value for '{key}': {e}") from e
