"""Configuration: engine knobs, provider endpoints, service settings.

Values resolve in order: built-in defaults, then a JSON config file, then
PROMPTMAP_* environment variables.
"""

from __future__ import annotations

import json
import os
from dataclasses import dataclass, field, fields
from pathlib import Path

from .errors import FormatError


@dataclass
class EngineConfig:
    candidate_target: int = 200
    k: int = 4
    band_halfwidth: float = 0.2
    widen_step: float = 0.1
    max_kmeans_iters: int = 100
    # Novelty band is applied in distance space by default; "similarity"
    # applies it to similarity scores instead.
    band_space: str = "distance"
    seed: int | None = None


@dataclass
class ProviderConfig:
    mode: str = "mock"  # "mock" or "openai"
    base_url: str = "https://api.openai.com/v1"
    api_key: str = ""
    chat_model: str = "gpt-4o"
    embedding_model: str = "text-embedding-3-small"
    image_model: str = "dall-e-2"
    image_size: str = "1024x1024"
    temperature: float = 1.0
    batch_size: int = 256
    max_in_flight: int = 4
    embedding_dim: int = 32  # mock embedder only
    cache_dir: str | None = None
    fixtures_dir: str | None = None


@dataclass
class AppConfig:
    engine: EngineConfig = field(default_factory=EngineConfig)
    providers: ProviderConfig = field(default_factory=ProviderConfig)
    lexicon_path: str | None = None
    session_dir: str = "sessions"
    images_dir: str | None = None  # defaults to <session_dir>/images
    host: str = "127.0.0.1"
    port: int = 8000

    def resolved_images_dir(self) -> Path:
        if self.images_dir:
            return Path(self.images_dir)
        return Path(self.session_dir) / "images"


_ENV_OVERRIDES = {
    "PROMPTMAP_LEXICON": ("lexicon_path", str),
    "PROMPTMAP_SESSION_DIR": ("session_dir", str),
    "PROMPTMAP_IMAGES_DIR": ("images_dir", str),
    "PROMPTMAP_HOST": ("host", str),
    "PROMPTMAP_PORT": ("port", int),
}

_ENV_PROVIDER_OVERRIDES = {
    "PROMPTMAP_PROVIDER_MODE": ("mode", str),
    "PROMPTMAP_BASE_URL": ("base_url", str),
    "PROMPTMAP_API_KEY": ("api_key", str),
    "PROMPTMAP_CHAT_MODEL": ("chat_model", str),
    "PROMPTMAP_EMBEDDING_MODEL": ("embedding_model", str),
    "PROMPTMAP_IMAGE_MODEL": ("image_model", str),
}


def _apply_section(target, data: dict):
    known = {f.name for f in fields(target)}
    for key, value in data.items():
        if key not in known:
            raise FormatError(f"unknown config key: {key}")
        setattr(target, key, value)


def load_config(path: str | Path | None = None, env: dict | None = None) -> AppConfig:
    """Build an AppConfig from an optional JSON file plus environment overrides."""
    env = os.environ if env is None else env
    config = AppConfig()

    if path is not None:
        try:
            data = json.loads(Path(path).read_text(encoding="utf-8"))
        except json.JSONDecodeError as exc:
            raise FormatError(f"config file is not valid JSON: {exc}") from exc
        if not isinstance(data, dict):
            raise FormatError("config file must hold a JSON object")
        _apply_section(config.engine, data.pop("engine", {}))
        _apply_section(config.providers, data.pop("providers", {}))
        _apply_section(config, data)

    for var, (attr, cast) in _ENV_OVERRIDES.items():
        if var in env:
            setattr(config, attr, cast(env[var]))
    for var, (attr, cast) in _ENV_PROVIDER_OVERRIDES.items():
        if var in env:
            setattr(config.providers, attr, cast(env[var]))
    if "PROMPTMAP_SEED" in env:
        config.engine.seed = int(env["PROMPTMAP_SEED"])
    return config


def bundled_lexicon_path() -> Path:
    """Path of the small sample lexicon shipped with the package."""
    return Path(__file__).parent / "data" / "sample_lexicon.tsv"
