"""Run configuration files: flat sectioned text or JSON, with stable hashing.

The text form is an INI-style file with sections [run], [ensemble],
[reaction], [index], [component.<label>] and [estimator]; the JSON form
is an object with the same section names as keys.  Exactly one family of
model sections may be populated: ensemble+reaction for nuclear runs, or
index+components for index runs.
"""

from __future__ import annotations

import configparser
import hashlib
import json
from dataclasses import dataclass, field
from pathlib import Path

from .ensembles import EnsembleSpec
from .errors import ConfigError
from .estimator import (
    DEFAULT_DRIFT_THRESHOLD,
    DEFAULT_MIN_PROMINENCE,
    DEFAULT_RESIDUAL_CEILING,
)
from .fluctuations import AUTOCORR_MODES, MEAN_NORMALIZED
from .index_model import IndexModel, StructureSpec
from .rfunction import ReactionConfig

MODES = ("nuclear", "index", "stats")


@dataclass(frozen=True)
class EstimatorSettings:
    """Knobs shared by the estimate and predict commands."""

    max_lag: int | None = None
    threshold: float = DEFAULT_DRIFT_THRESHOLD
    detrend: bool = True
    autocorr_mode: str = MEAN_NORMALIZED
    min_prominence: float = DEFAULT_MIN_PROMINENCE
    residual_ceiling: float = DEFAULT_RESIDUAL_CEILING
    train_seconds: float | None = None

    def __post_init__(self):
        if self.autocorr_mode not in AUTOCORR_MODES:
            raise ConfigError(f"autocorr_mode must be one of {AUTOCORR_MODES}")
        if self.max_lag is not None and self.max_lag < 1:
            raise ConfigError("max_lag must be at least 1 when given")


@dataclass(frozen=True)
class RunConfig:
    """Everything a run needs: mode, seed, model sections, estimator knobs."""

    mode: str | None = None
    seed: int | None = None
    out_dir: str | None = None
    ensemble: EnsembleSpec | None = None
    reaction: ReactionConfig | None = None
    index_model: IndexModel | None = None
    estimator: EstimatorSettings = field(default_factory=EstimatorSettings)
    sections: dict = field(default_factory=dict)

    def require_mode(self, expected: str) -> None:
        if self.mode is not None and self.mode != expected:
            raise ConfigError(f"config mode is '{self.mode}' but the command needs '{expected}'")

    def require_seed(self) -> int:
        if self.seed is None:
            raise ConfigError("a seed is mandatory for sampling runs")
        return self.seed


def _bool(text: str) -> bool:
    lowered = str(text).strip().lower()
    if lowered in ("1", "true", "yes", "on"):
        return True
    if lowered in ("0", "false", "no", "off"):
        return False
    raise ConfigError(f"expected a boolean, got {text!r}")


def _sections_from_ini(text: str) -> dict:
    parser = configparser.ConfigParser()
    try:
        parser.read_string(text)
    except configparser.Error as exc:
        raise ConfigError(f"could not parse config: {exc}") from exc
    return {name: dict(parser.items(name)) for name in parser.sections()}


def _sections_from_json(text: str) -> dict:
    data = json.loads(text)
    if not isinstance(data, dict):
        raise ConfigError("JSON config must be an object of sections")
    out = {}
    for name, body in data.items():
        if not isinstance(body, dict):
            raise ConfigError(f"section {name!r} must be an object")
        out[str(name)] = {str(k): v for k, v in body.items()}
    return out


def load_sections(path) -> dict:
    """Load the raw section mapping from an INI or JSON file."""
    path = Path(path)
    if not path.exists():
        raise ConfigError(f"{path}: no such config file")
    text = path.read_text()
    stripped = text.lstrip()
    if path.suffix.lower() == ".json" or stripped.startswith("{"):
        return _sections_from_json(text)
    return _sections_from_ini(text)


def _get(section: dict, key: str, cast, default=None, required=False, where=""):
    if key not in section:
        if required:
            raise ConfigError(f"missing key '{key}' in section [{where}]")
        return default
    value = section[key]
    try:
        if cast is bool:
            return value if isinstance(value, bool) else _bool(value)
        return cast(value)
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"bad value for '{key}' in [{where}]: {value!r}") from exc


def _build_ensemble(section: dict, seed: int | None) -> EnsembleSpec:
    where = "ensemble"
    own_seed = _get(section, "seed", int, default=seed, where=where)
    if own_seed is None:
        raise ConfigError("ensemble needs a seed (in [ensemble] or [run])")
    return EnsembleSpec(
        n_levels=_get(section, "n_levels", int, required=True, where=where),
        mean_spacing=_get(section, "mean_spacing", float, required=True, where=where),
        mean_width_main=_get(section, "mean_width_main", float, required=True, where=where),
        eliminated_width=_get(section, "eliminated_width", float, required=True, where=where),
        width_dof=_get(section, "width_dof", int, default=1, where=where),
        seed=own_seed,
        window=(
            _get(section, "window_lo", float, required=True, where=where),
            _get(section, "window_hi", float, required=True, where=where),
        ),
    )


def _build_reaction(section: dict) -> ReactionConfig:
    where = "reaction"
    return ReactionConfig(
        grid=(
            _get(section, "grid_lo", float, required=True, where=where),
            _get(section, "grid_hi", float, required=True, where=where),
            _get(section, "grid_points", int, required=True, where=where),
        ),
        wave_number=_get(section, "wave_number", float, default=1.0, where=where),
        include_prefactor=_get(section, "include_prefactor", bool, default=True, where=where),
    )


def _build_component(label: str, section: dict) -> StructureSpec:
    where = f"component.{label}"
    kwargs = dict(
        label=label,
        mean_spacing=_get(section, "mean_spacing", float, required=True, where=where),
        mean_width=_get(section, "mean_width", float, required=True, where=where),
        width_dof=_get(section, "width_dof", int, default=1, where=where),
        amplitude_scale=_get(section, "amplitude_scale", float, default=1.0, where=where),
        seed=_get(section, "seed", int, where=where),
    )
    if "eliminated_fraction" in section:
        kwargs["eliminated_fraction"] = _get(section, "eliminated_fraction", float, where=where)
    return StructureSpec(**kwargs)


def _build_index(sections: dict) -> IndexModel:
    body = sections.get("index", {})
    where = "index"
    components = []
    for name, section in sections.items():
        if name.startswith("component."):
            label = name.split(".", 1)[1]
            components.append(_build_component(label, section))
    if not components:
        raise ConfigError("index mode needs at least one [component.<label>] section")
    return IndexModel(
        components=tuple(components),
        baseline=_get(body, "baseline", float, default=0.0, where=where),
        resolution=_get(body, "resolution", float, default=10.0, where=where),
        session_length=_get(body, "session_length", float, default=23400.0, where=where),
    )


def _build_estimator(section: dict) -> EstimatorSettings:
    where = "estimator"
    max_lag = _get(section, "max_lag", int, default=0, where=where)
    return EstimatorSettings(
        max_lag=None if not max_lag else max_lag,
        threshold=_get(section, "threshold", float, default=DEFAULT_DRIFT_THRESHOLD, where=where),
        detrend=_get(section, "detrend", bool, default=True, where=where),
        autocorr_mode=_get(section, "autocorr_mode", str, default=MEAN_NORMALIZED, where=where),
        min_prominence=_get(section, "min_prominence", float,
                            default=DEFAULT_MIN_PROMINENCE, where=where),
        residual_ceiling=_get(section, "residual_ceiling", float,
                              default=DEFAULT_RESIDUAL_CEILING, where=where),
        train_seconds=_get(section, "train_seconds", float, where=where),
    )


def parse_config(sections: dict) -> RunConfig:
    """Validate a section mapping and build the typed RunConfig."""
    run = sections.get("run", {})
    mode = _get(run, "mode", str, where="run")
    if mode is not None and mode not in MODES:
        raise ConfigError(f"mode must be one of {MODES}, got {mode!r}")
    seed = _get(run, "seed", int, where="run")
    out_dir = _get(run, "out_dir", str, where="run")

    has_nuclear = "ensemble" in sections or "reaction" in sections
    has_index = "index" in sections or any(s.startswith("component.") for s in sections)
    if has_nuclear and has_index:
        raise ConfigError("config mixes nuclear sections with index sections; pick one mode")
    if mode == "nuclear" and not has_nuclear:
        raise ConfigError("nuclear mode needs [ensemble] and [reaction] sections")
    if mode == "index" and not has_index:
        raise ConfigError("index mode needs [index] / [component.*] sections")
    if mode == "stats" and (has_nuclear or has_index):
        raise ConfigError("stats mode takes no model sections")

    ensemble = None
    reaction = None
    index_model = None
    if has_nuclear:
        if "ensemble" not in sections or "reaction" not in sections:
            raise ConfigError("nuclear runs need both [ensemble] and [reaction]")
        ensemble = _build_ensemble(sections["ensemble"], seed)
        reaction = _build_reaction(sections["reaction"])
        if mode is None:
            mode = "nuclear"
    elif has_index:
        index_model = _build_index(sections)
        if mode is None:
            mode = "index"

    estimator = _build_estimator(sections.get("estimator", {}))
    if mode in MODES and seed is None:
        raise ConfigError(f"mode '{mode}' samples randomness; a [run] seed is mandatory")

    return RunConfig(
        mode=mode,
        seed=seed,
        out_dir=out_dir,
        ensemble=ensemble,
        reaction=reaction,
        index_model=index_model,
        estimator=estimator,
        sections=sections,
    )


def load_config(path) -> RunConfig:
    """Load and validate a config file (INI or JSON)."""
    return parse_config(load_sections(path))


def ensemble_to_sections(spec: EnsembleSpec, reaction: ReactionConfig | None = None) -> dict:
    """Section mapping for a nuclear run, ready for dump_ini or JSON."""
    sections = {
        "run": {"mode": "nuclear", "seed": spec.seed},
        "ensemble": {
            "n_levels": spec.n_levels,
            "mean_spacing": spec.mean_spacing,
            "mean_width_main": spec.mean_width_main,
            "eliminated_width": spec.eliminated_width,
            "width_dof": spec.width_dof,
            "seed": spec.seed,
            "window_lo": spec.window[0],
            "window_hi": spec.window[1],
        },
    }
    if reaction is not None:
        lo, hi, n = reaction.grid
        sections["reaction"] = {
            "grid_lo": lo,
            "grid_hi": hi,
            "grid_points": int(n),
            "wave_number": reaction.wave_number,
            "include_prefactor": reaction.include_prefactor,
        }
    return sections


def index_model_to_sections(model: IndexModel, seed: int | None = None) -> dict:
    """Section mapping for an index run, ready for dump_ini or JSON."""
    sections = {
        "run": {"mode": "index"},
        "index": {
            "baseline": model.baseline,
            "resolution": model.resolution,
            "session_length": model.session_length,
        },
    }
    if seed is not None:
        sections["run"]["seed"] = seed
    for comp in model.components:
        body = {
            "mean_spacing": comp.mean_spacing,
            "mean_width": comp.mean_width,
            "width_dof": comp.width_dof,
            "amplitude_scale": comp.amplitude_scale,
            "eliminated_fraction": comp.eliminated_fraction,
        }
        if comp.seed is not None:
            body["seed"] = comp.seed
        sections[f"component.{comp.label}"] = body
    return sections


def dump_ini(sections: dict) -> str:
    """Render a section mapping as the flat text config format."""
    lines = []
    for name, body in sections.items():
        lines.append(f"[{name}]")
        for key, value in body.items():
            if isinstance(value, bool):
                value = "true" if value else "false"
            elif isinstance(value, float):
                value = repr(value)
            lines.append(f"{key} = {value}")
        lines.append("")
    return "\n".join(lines)


def config_hash(sections: dict, overrides: dict | None = None) -> str:
    """Stable short hash of the resolved configuration.

    Canonical JSON keeps the hash byte-stable across runs; CLI overrides
    (seed, thresholds) participate so different effective runs hash
    differently.
    """
    payload = {"sections": sections, "overrides": overrides or {}}
    canon = json.dumps(payload, sort_keys=True, separators=(",", ":"), default=str)
    return hashlib.sha256(canon.encode()).hexdigest()[:12]
