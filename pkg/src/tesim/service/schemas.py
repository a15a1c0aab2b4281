"""Request/response models of the HTTP service."""

from __future__ import annotations

from pydantic import BaseModel, Field


class ConfigRequest(BaseModel):
    """A TOML experiment config, plus the directory its relative paths
    resolve from (the config file's directory when loaded from disk)."""

    config: str
    base_dir: str = "."


class RunRequest(ConfigRequest):
    """Run request; optional overrides replace the config's values."""

    seed: int | None = Field(
        default=None, description="override both the demand and tree seeds"
    )
    systems: list[str] | None = Field(
        default=None, description="run only this subset of the configured systems"
    )


class ValidateResponse(BaseModel):
    valid: bool
    resolved: dict
    config_hash: str


class PathSetDoc(BaseModel):
    """One serialized path set: algorithm label plus its JSON document."""

    name: str
    document: dict


class PathsResponse(BaseModel):
    path_sets: list[PathSetDoc]


class RunResponse(BaseModel):
    """CSV payloads keyed by canonical file name, plus the run manifest."""

    csvs: dict[str, str]
    manifest: dict
