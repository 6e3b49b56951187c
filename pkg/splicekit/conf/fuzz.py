from pydantic import Field, model_validator
from pydantic_settings import BaseSettings, SettingsConfigDict


class FuzzSettings(BaseSettings):
    """Randomized cross-validation configuration."""

    model_config = SettingsConfigDict(
        env_file=".env",
        env_file_encoding="utf-8",
        extra="ignore",
    )

    fuzz_seeds: int = Field(
        default=500,
        ge=1,
        description="Number of seeded plumbing diagrams to generate per fuzz run",
    )
    fuzz_max_vertices: int = Field(
        default=12,
        ge=1,
        le=64,
        description="Upper bound on the vertex count of generated plumbing trees",
    )
    fuzz_concurrency: int = Field(
        default=1,
        ge=1,
        le=64,
        description="Worker processes used to shard seeds (1 runs in-process)",
    )
    fuzz_min_node_weight: int = Field(default=-5, description="Lowest Euler weight drawn for nodes")
    fuzz_max_node_weight: int = Field(default=-1, description="Highest Euler weight drawn for nodes")
    fuzz_min_string_weight: int = Field(
        default=-5,
        le=-2,
        description="Lowest Euler weight drawn for string and arm vertices (the highest is always -2)",
    )

    @model_validator(mode="after")
    def check_node_weight_range(self) -> "FuzzSettings":
        if self.fuzz_min_node_weight > self.fuzz_max_node_weight:
            raise ValueError("fuzz_min_node_weight must not exceed fuzz_max_node_weight")
        return self
