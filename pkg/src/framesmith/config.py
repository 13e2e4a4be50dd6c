"""Runtime configuration: JSON config file, environment overrides, flags.

Precedence, lowest to highest: built-in defaults, config file, environment
variables (``FRAMESMITH_`` prefix), explicit overrides (CLI flags).
"""

from __future__ import annotations

import json
import os
from dataclasses import dataclass, fields
from pathlib import Path
from typing import Any, Mapping

ENV_PREFIX = "FRAMESMITH_"


@dataclass
class AppConfig:
    store_path: str = "frames.db"
    lexicon_path: str | None = None
    token_file: str | None = None
    tutorials_path: str | None = None
    languages_path: str | None = None
    sessions_path: str | None = None
    host: str = "127.0.0.1"
    port: int = 8421
    similarity_threshold: float = 0.25
    session_ttl_days: int = 30

    @classmethod
    def load(
        cls,
        config_file: str | Path | None = None,
        env: Mapping[str, str] | None = None,
        overrides: Mapping[str, Any] | None = None,
    ) -> "AppConfig":
        values: dict[str, Any] = {}
        if config_file is not None:
            raw = json.loads(Path(config_file).read_text(encoding="utf-8"))
            if not isinstance(raw, dict):
                raise ValueError("config file must hold a JSON object")
            values.update(raw)
        env = os.environ if env is None else env
        for f in fields(cls):
            key = ENV_PREFIX + f.name.upper()
            if key in env:
                values[f.name] = env[key]
        if overrides:
            values.update({k: v for k, v in overrides.items() if v is not None})

        known = {f.name for f in fields(cls)}
        unknown = set(values) - known
        if unknown:
            raise ValueError(f"unknown config keys: {', '.join(sorted(unknown))}")
        config = cls(**values)
        config.port = int(config.port)
        config.similarity_threshold = float(config.similarity_threshold)
        config.session_ttl_days = int(config.session_ttl_days)
        return config
