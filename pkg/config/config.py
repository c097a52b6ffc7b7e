from pathlib import Path
from pydantic_settings import BaseSettings
from pydantic import Field, ConfigDict
import yaml


class PathsConfig(BaseSettings):
    log_dir: Path = Field(default=Path("logs"))
    output_dir: Path = Field(default=Path("output_data"))

    model_config = ConfigDict(arbitrary_types_allowed=True)


class NumericsConfig(BaseSettings):
    """Numerical tolerances shared by the linear-algebra and distance code."""

    symmetry_tol: float = Field(default=1e-10)
    psd_clamp_tol: float = Field(default=1e-9)
    inv_sqrt_floor: float = Field(default=1e-12)
    cholesky_pivot_floor: float = Field(default=1e-12)
    weight_sum_tol: float = Field(default=1e-9)
    degenerate_weight_sum: float = Field(default=1e-12)
    triangle_slack: float = Field(default=1e-12)
    bruteforce_max_k: int = Field(default=8)


class LearnerConfig(BaseSettings):
    max_iters: int = Field(default=200)
    restarts: int = Field(default=3)
    tol: float = Field(default=1e-6)
    reg_scale: float = Field(default=1e-6)
    min_points_factor: int = Field(default=10)


class PpeDefaults(BaseSettings):
    z: float = Field(default=1.5)
    r_cap: float = Field(default=1.0)
    selection_fraction: float = Field(default=0.6)
    pass_fraction: float = Field(default=0.8)
    c2: float = Field(default=10.0)
    mask_epsilon_cap: float = Field(default=0.2)


class AuditConfig(BaseSettings):
    min_expected_count: int = Field(default=25)
    histogram_bins: int = Field(default=40)
    starvation_rate: float = Field(default=0.999)
    concentration_min_trials: int = Field(default=100)
    indistinguishability_min_trials: int = Field(default=10000)


class ProcessingConfig(BaseSettings):
    max_workers: int = Field(default=4)
    show_progress: bool = Field(default=True)


class Config(BaseSettings):
    paths: PathsConfig = Field(default_factory=PathsConfig)
    numerics: NumericsConfig = Field(default_factory=NumericsConfig)
    learner: LearnerConfig = Field(default_factory=LearnerConfig)
    ppe: PpeDefaults = Field(default_factory=PpeDefaults)
    audit: AuditConfig = Field(default_factory=AuditConfig)
    processing: ProcessingConfig = Field(default_factory=ProcessingConfig)

    model_config = ConfigDict(
        env_file=".env", env_file_encoding="utf-8", arbitrary_types_allowed=True
    )

    @classmethod
    def load_from_yaml(cls, yaml_path: Path) -> "Config":
        with yaml_path.open("r") as f:
            yaml_data = yaml.safe_load(f)
        return cls(**yaml_data)


# Create a global config instance
config = Config.load_from_yaml(Path(__file__).parent / "config.yml")
