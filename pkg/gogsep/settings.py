"""
Layered settings: defaults, YAML settings file, GOGSEP_* environment variables
"""

import logging
import os
from dataclasses import dataclass, fields, replace
from pathlib import Path
from typing import Any, Dict, Optional, Union

import dotenv
import yaml

from gogsep.errors import ProblemFileError

logger = logging.getLogger(__name__)

DEFAULT_SETTINGS_FILE = Path("configs") / "settings.yaml"
ENV_PREFIX = "GOGSEP_"


@dataclass(frozen=True)
class Settings:
    max_cosets: int = 64
    max_quotient_order: int = 512
    search_bound: int = 4
    search_max_exponent: int = 4
    search_max_candidates: int = 200000
    magnus_cap: int = 64
    tree_budget: int = 2000
    log_level: str = "WARNING"

    def override(self, **values: Any) -> "Settings":
        """Return a copy with every non-None value applied"""
        return replace(self, **{k: v for k, v in values.items() if v is not None})

    def to_dict(self) -> Dict[str, Any]:
        return {f.name: getattr(self, f.name) for f in fields(self)}


def _coerce(name: str, raw: Any) -> Any:
    kind = {f.name: f.type for f in fields(Settings)}[name]
    if kind in (int, "int"):
        try:
            return int(raw)
        except (TypeError, ValueError):
            raise ProblemFileError(f"Setting '{name}' expects an integer, got {raw!r}")
    return str(raw)


def load_settings(path: Optional[Union[str, Path]] = None) -> Settings:
    """Build settings from defaults, an optional YAML file and the environment"""
    dotenv.load_dotenv()
    values: Dict[str, Any] = {}
    known = {f.name for f in fields(Settings)}

    settings_file = Path(path) if path else DEFAULT_SETTINGS_FILE
    if path and not settings_file.exists():
        raise ProblemFileError(f"Settings file '{path}' not found")
    if settings_file.exists():
        with open(settings_file, "r") as f:
            data = yaml.safe_load(f) or {}
        if not isinstance(data, dict):
            raise ProblemFileError(f"Settings file '{settings_file}' must hold a mapping")
        unknown = sorted(set(data) - known)
        if unknown:
            raise ProblemFileError(f"Unknown settings in '{settings_file}': {', '.join(unknown)}")
        for name, raw in data.items():
            values[name] = _coerce(name, raw)
        logger.debug("Loaded settings file %s", settings_file)

    for name in known:
        raw = os.environ.get(ENV_PREFIX + name.upper())
        if raw is not None:
            values[name] = _coerce(name, raw)

    return Settings(**values)
