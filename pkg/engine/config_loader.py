# engine/config_loader.py

import json
import logging
import os
from dataclasses import asdict, dataclass, replace
from fractions import Fraction

from errors import ConfigError
from linalg.rational import as_fraction

logger = logging.getLogger(__name__)

CONFIG_ENV = "MSA_CONFIG"

# ============================================================
# CONFIG
# ============================================================

@dataclass(frozen=True)
class AnalysisConfig:
    max_branches: int = 1_000_000
    tol: float = 1e-6
    kappa_tol: float = 1e-9
    hint_tol: float = 1e-6
    p: Fraction = Fraction(1)
    explore_orientations: bool = False
    run_prechecks: bool = True
    trace: bool = False

    def with_overrides(self, **overrides) -> "AnalysisConfig":
        """CLI flags win over file values; None means 'not given'."""
        given = {k: v for k, v in overrides.items() if v is not None}
        return replace(self, **given)

    def to_dict(self):
        out = asdict(self)
        out["p"] = str(self.p)
        return out


# ============================================================
# CACHE
# ============================================================

_cached_config = None
_cached_key = None

# ============================================================
# HELPERS
# ============================================================

def _norm(v):
    return str(v).strip().lower() if v is not None else None


def _parse_bool(v, default=False):
    if v is None:
        return default
    if isinstance(v, bool):
        return v
    return str(v).strip().upper() in ("TRUE", "YES", "1")


def _parse_int(v, default=0):
    try:
        return int(v)
    except (TypeError, ValueError):
        return default


def _parse_float(v, default=0.0):
    try:
        return float(v)
    except (TypeError, ValueError):
        return default


def _parse_rational(v, default=Fraction(1)):
    try:
        return as_fraction(v)
    except (TypeError, ValueError, ZeroDivisionError):
        return default


_PARSERS = {
    "max_branches": _parse_int,
    "tol": _parse_float,
    "kappa_tol": _parse_float,
    "hint_tol": _parse_float,
    "p": _parse_rational,
    "explore_orientations": _parse_bool,
    "run_prechecks": _parse_bool,
    "trace": _parse_bool,
}

# ============================================================
# LOADER
# ============================================================

def load_analysis_config(path):
    """
    Read a JSON object of AnalysisConfig fields.

    Unknown keys and invalid values are skipped with a warning; the
    defaults stay in place for them.
    """
    try:
        with open(path, "r", encoding="utf-8") as fh:
            raw = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    if not isinstance(raw, dict):
        raise ConfigError(f"config {path} must hold a JSON object")

    defaults = AnalysisConfig()
    values = {}
    for key, value in raw.items():
        name = _norm(key)
        if name not in _PARSERS:
            logger.warning(f"CONFIG SKIPPED | unknown key | key={key}")
            continue
        parsed = _PARSERS[name](value, getattr(defaults, name))

        if name == "max_branches" and parsed <= 0:
            logger.warning(f"CONFIG INVALID | {name} must be positive | value={value}")
            continue
        if name in ("tol", "kappa_tol", "hint_tol") and not parsed > 0:
            logger.warning(f"CONFIG INVALID | {name} must be positive | value={value}")
            continue
        if name == "p" and parsed <= 0:
            logger.warning(f"CONFIG INVALID | p must be positive | value={value}")
            continue
        values[name] = parsed

    config = replace(defaults, **values)
    logger.info(
        f"CONFIG LOADED | path={path} | max_branches={config.max_branches} | "
        f"tol={config.tol} | explore_orientations={config.explore_orientations}"
    )
    return config


# ============================================================
# PUBLIC API
# ============================================================

def get_analysis_config(path=None, *, force_reload=False):
    """
    Defaults, or the file at `path` (else $MSA_CONFIG). A file is parsed
    once per (path, mtime) unless force_reload=True.
    """
    global _cached_config, _cached_key

    path = path or os.environ.get(CONFIG_ENV)
    if not path:
        return AnalysisConfig()

    try:
        mtime = os.path.getmtime(path)
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc

    key = (os.path.abspath(path), mtime)
    if force_reload or _cached_key != key:
        _cached_config = load_analysis_config(path)
        _cached_key = key

    return _cached_config
