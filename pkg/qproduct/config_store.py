"""
Runtime defaults for the qproduct CLI.

Values are read from ``settings/qproduct_settings.json`` (or the file named by
``QPROD_SETTINGS_PATH``) and merged over ``DEFAULT_RUNTIME_CONFIG``. The
precision cap additionally honours ``QPROD_MAX_WORKING_DIGITS``.
"""

from __future__ import annotations

import json
import logging
import os
from pathlib import Path
from threading import Lock
from typing import Any, Dict, Optional

try:
    from dotenv import load_dotenv  # type: ignore
    _DOTENV_AVAILABLE = True
except ImportError:  # pragma: no cover - fallback if dependency missing
    _DOTENV_AVAILABLE = False

    def load_dotenv(*_args, **_kwargs):
        return False


LOGGER = logging.getLogger("qproduct.config_store")

ROOT_DIR = Path(__file__).resolve().parent.parent
DOTENV_PATH = ROOT_DIR / ".env"
ENV_SETTINGS_PATH = "QPROD_SETTINGS_PATH"
ENV_MAX_WORKING_DIGITS = "QPROD_MAX_WORKING_DIGITS"

_SETTINGS_PATH_OVERRIDE = os.environ.get(ENV_SETTINGS_PATH)
CONFIG_PATH = (
    Path(_SETTINGS_PATH_OVERRIDE)
    if _SETTINGS_PATH_OVERRIDE
    else ROOT_DIR / "settings" / "qproduct_settings.json"
)

DEFAULT_RUNTIME_CONFIG: Dict[str, Any] = {
    "max_working_digits": 10000,
    "default_digits": 25,
    "gatteschi_sigma": "1",
    "workers": 4,
    "validate_samples": 20,
}

_INT_KEYS = ("max_working_digits", "default_digits", "workers", "validate_samples")

_CONFIG_LOCK = Lock()


def load_environment() -> bool:
    """Load ``.env`` from the repository root if python-dotenv is available."""
    if not _DOTENV_AVAILABLE:
        LOGGER.debug("python-dotenv not installed; .env support disabled")
        return False
    loaded = load_dotenv(DOTENV_PATH)
    if loaded:
        LOGGER.info("Loaded environment variables from %s", DOTENV_PATH)
    return bool(loaded)


def _coerce(key: str, value: Any) -> Any:
    if key in _INT_KEYS:
        return int(value)
    return str(value)


def load_runtime_config() -> Dict[str, Any]:
    data: Dict[str, Any] = {}
    with _CONFIG_LOCK:
        if CONFIG_PATH.exists():
            try:
                with open(CONFIG_PATH, "r", encoding="utf-8") as fp:
                    loaded = json.load(fp)
                if isinstance(loaded, dict):
                    data = {
                        k: _coerce(k, v) for k, v in loaded.items() if k in DEFAULT_RUNTIME_CONFIG
                    }
            except (OSError, ValueError) as exc:
                LOGGER.warning("Failed to load runtime config from %s: %s", CONFIG_PATH, exc)
    merged = DEFAULT_RUNTIME_CONFIG.copy()
    merged.update(data)
    return merged


def save_runtime_config(config: Dict[str, Any]) -> None:
    with _CONFIG_LOCK:
        try:
            CONFIG_PATH.parent.mkdir(parents=True, exist_ok=True)
            payload = {k: config[k] for k in DEFAULT_RUNTIME_CONFIG if k in config}
            with open(CONFIG_PATH, "w", encoding="utf-8") as fp:
                json.dump(payload, fp, indent=2)
        except OSError as exc:  # pragma: no cover - persistence failure
            LOGGER.error("Failed to save runtime config: %s", exc)


def resolve_max_working_digits(explicit: Optional[int] = None) -> int:
    """
    Resolve the working-precision cap.

    Preference order:
    1. Explicit value supplied by the caller.
    2. ``QPROD_MAX_WORKING_DIGITS`` from the process environment.
    3. Value stored in the settings file.
    4. ``DEFAULT_RUNTIME_CONFIG`` (10000 digits).
    """
    if explicit is not None:
        cap = int(explicit)
    else:
        env_value = os.environ.get(ENV_MAX_WORKING_DIGITS, "").strip()
        if env_value:
            try:
                cap = int(env_value)
            except ValueError:
                LOGGER.warning("Ignoring non-integer %s=%r", ENV_MAX_WORKING_DIGITS, env_value)
                cap = int(load_runtime_config()["max_working_digits"])
        else:
            cap = int(load_runtime_config()["max_working_digits"])
    if cap < 1:
        raise ValueError("max working digits must be positive")
    return cap


__all__ = [
    "DEFAULT_RUNTIME_CONFIG",
    "CONFIG_PATH",
    "load_environment",
    "load_runtime_config",
    "save_runtime_config",
    "resolve_max_working_digits",
]
