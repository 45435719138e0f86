"""Run configuration: waves, method parameters, and reporting latencies."""

from __future__ import annotations

from dataclasses import dataclass, field
from datetime import date
from pathlib import Path

import yaml

from .errors import ConfigError

_CADENCE_NAMES = {"daily": 1, "weekly": 7}


@dataclass(frozen=True)
class WaveSpec:
    """A named epidemic wave interval; every test runs per wave."""

    name: str
    start: date
    end: date

    def __post_init__(self) -> None:
        if self.start >= self.end:
            raise ConfigError(f"wave {self.name!r}: start {self.start} not before end {self.end}")


@dataclass(frozen=True)
class LatencySpec:
    """Operational availability of an indicator: reporting lag and release cadence."""

    reporting_lag_days: int
    release_cadence_days: int = 1

    def __post_init__(self) -> None:
        if self.reporting_lag_days < 0 or self.release_cadence_days < 1:
            raise ConfigError("latency lag must be >= 0 and cadence >= 1")


@dataclass(frozen=True)
class RunConfig:
    waves: tuple[WaveSpec, ...]
    horizon_days: int = 14
    granger_max_lag: int = 3
    ccf_window: int = 30
    dtw_window: int = 35
    dtw_warmup_days: int = 14
    dtw_mode: str = "multivariate"
    loess_span: float = 0.15
    loess_degree: int = 2
    loess_robustness_passes: int = 0
    trust_exclusions: tuple[str, ...] = ()
    min_annual_admissions: int = 10
    admissions_filter_start: date = date(2022, 1, 1)
    admissions_filter_end: date = date(2022, 12, 31)
    latencies: dict[str, LatencySpec] = field(default_factory=dict)
    indicator_mappings: dict[str, str] = field(default_factory=dict)

    def __post_init__(self) -> None:
        if not self.waves:
            raise ConfigError("at least one wave must be configured")
        for a, b in zip(self.waves, self.waves[1:]):
            if b.start <= a.end:
                raise ConfigError(
                    f"waves must be chronological and non-overlapping: "
                    f"{a.name!r} ends {a.end}, {b.name!r} starts {b.start}"
                )
        for attr in ("horizon_days", "granger_max_lag", "ccf_window",
                     "dtw_window", "min_annual_admissions"):
            if getattr(self, attr) < 1:
                raise ConfigError(f"{attr} must be positive")
        if self.dtw_warmup_days < 0:
            raise ConfigError("dtw_warmup_days must be >= 0")
        if self.dtw_mode not in ("multivariate", "univariate"):
            raise ConfigError(f"dtw_mode must be multivariate or univariate, got {self.dtw_mode!r}")


def _as_date(value, context: str) -> date:
    if isinstance(value, date):
        return value
    try:
        return date.fromisoformat(str(value))
    except ValueError as exc:
        raise ConfigError(f"{context}: invalid date {value!r}") from exc


def _as_cadence(value) -> int:
    if isinstance(value, str):
        try:
            return _CADENCE_NAMES[value.lower()]
        except KeyError:
            raise ConfigError(f"unknown release cadence {value!r}") from None
    return int(value)


def load_config(path: str | Path) -> RunConfig:
    """Parse a YAML run configuration file."""
    try:
        raw = yaml.safe_load(Path(path).read_text(encoding="utf-8"))
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    except yaml.YAMLError as exc:
        raise ConfigError(f"config {path} is not valid YAML: {exc}") from exc
    if not isinstance(raw, dict):
        raise ConfigError(f"config {path} must be a mapping")

    try:
        waves = tuple(
            WaveSpec(str(w["name"]), _as_date(w["start"], "wave start"),
                     _as_date(w["end"], "wave end"))
            for w in raw.get("waves", [])
        )
    except (KeyError, TypeError) as exc:
        raise ConfigError("each wave needs name, start and end") from exc

    latencies = {}
    for name, entry in (raw.get("latency") or {}).items():
        latencies[str(name)] = LatencySpec(
            reporting_lag_days=int(entry.get("reporting_lag_days", 0)),
            release_cadence_days=_as_cadence(entry.get("release_cadence", 1)),
        )

    kwargs = {}
    for key in ("horizon_days", "granger_max_lag", "ccf_window", "dtw_window",
                "dtw_warmup_days", "min_annual_admissions", "loess_degree",
                "loess_robustness_passes"):
        if key in raw:
            kwargs[key] = int(raw[key])
    if "loess_span" in raw:
        kwargs["loess_span"] = float(raw["loess_span"])
    if "dtw_mode" in raw:
        kwargs["dtw_mode"] = str(raw["dtw_mode"])
    if "trust_exclusions" in raw:
        kwargs["trust_exclusions"] = tuple(str(t) for t in raw["trust_exclusions"])
    if "admissions_filter_start" in raw:
        kwargs["admissions_filter_start"] = _as_date(raw["admissions_filter_start"],
                                                     "admissions_filter_start")
    if "admissions_filter_end" in raw:
        kwargs["admissions_filter_end"] = _as_date(raw["admissions_filter_end"],
                                                   "admissions_filter_end")
    if "indicator_mappings" in raw:
        kwargs["indicator_mappings"] = {
            str(k): str(v) for k, v in raw["indicator_mappings"].items()
        }

    return RunConfig(waves=waves, latencies=latencies, **kwargs)
