from pydantic import Field
from pydantic_settings import BaseSettings, SettingsConfigDict


class OutputSettings(BaseSettings):
    model_config = SettingsConfigDict(
        env_file=".env",
        env_file_encoding="utf-8",
        extra="ignore",
    )

    json_indent: int = Field(default=2, ge=0, description="Indentation of JSON reports (0 for compact output)")
    dot_graph_name: str = Field(default="splice", description="Graph name used in DOT renderings")
