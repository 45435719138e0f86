"""Orchestration: trust filtering, preprocessing, and the method grid.

``run_analysis`` walks every (wave, trust, indicator) cell, applying the
shared preprocessing (LOCF at ingest, LOESS smoothing, per-trust scaling
over the whole study period) and running Granger tests at horizon zero and
at the configured horizon, the cross-correlation profile, and dynamic time
warping. Cells that cannot be computed yield rows carrying flags and an
error note rather than failing the run.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, replace
from datetime import date, timedelta

import numpy as np

from .config import LatencySpec, RunConfig
from .dtw import AlignmentQuery, dtw_align, lead_times_from_path
from .errors import CollinearDesignError, LeadLagError, ZeroVarianceError
from .geo import GeoMapping, apply_mapping
from .granger import granger_test
from .timeseries import Panel, TimeSeries, loess_smooth, minmax_scale, slice_window, zscore_scale
from .xcorr import ccf_result

logger = logging.getLogger(__name__)

DEFAULT_MAPPING = "__default__"
METHODS = ("granger", "ccf", "dtw")


@dataclass(frozen=True)
class ReportRow:
    """One method result for one (trust, indicator, wave) cell."""

    trust_id: str
    indicator: str
    wave: str
    method: str  # granger | granger14 | ccf | dtw
    horizon: int | None = None
    f_stat: float | None = None
    p_value: float | None = None
    df_num: int | None = None
    df_den: int | None = None
    optimal_lead: int | None = None
    ccf_at_optimal: float | None = None
    ccf_at_horizon: float | None = None
    dtw_median_lead: float | None = None
    dtw_normalized_distance: float | None = None
    effective_lead: float | None = None
    eroded: bool = False
    degenerate: bool = False
    truncated: bool = False
    provenance: str = ""
    error: str = ""

    def sort_key(self) -> tuple[str, str, str, str]:
        return (self.trust_id, self.indicator, self.wave, self.method)


def filter_trusts(panel: Panel, config: RunConfig) -> Panel:
    """Drop excluded trusts and those below the admissions threshold.

    The threshold window is configurable; a trust is kept when its total
    within the window is at least ``min_annual_admissions`` (strictly
    "fewer than" are removed).
    """
    start = max(config.admissions_filter_start, panel.start_date)
    end = min(config.admissions_filter_end, panel.end_date)
    excluded = set(config.trust_exclusions)
    kept: dict[tuple[str, str], TimeSeries] = {}
    removed: list[str] = []
    for (trust, var), ts in panel.series.items():
        if trust in excluded:
            removed.append(f"{trust} (excluded)")
            continue
        total = slice_window(ts, start, end).values.sum() if start <= end else 0.0
        if total < config.min_annual_admissions:
            removed.append(f"{trust} (total {total:g} in filter window)")
            continue
        kept[(trust, var)] = ts
    if removed:
        logger.warning("filter_trusts removed %d trust(s): %s",
                       len(removed), "; ".join(sorted(removed)))
    if not kept:
        raise LeadLagError("no trusts retained after filtering")
    return Panel(panel.level, kept)


def effective_lead(lead_days: float | None,
                   latency: LatencySpec | None) -> tuple[float | None, bool]:
    """Operational lead after reporting lag and worst-case release staleness.

    effective = lead - reporting_lag - (release_cadence - 1), floored at 0
    with an eroded flag when the latency consumes the whole lead. The floor
    only applies to non-negative statistical leads; a lagging indicator
    stays negative (effective lead never exceeds the statistical lead).
    """
    if lead_days is None or latency is None:
        return None, False
    eff = float(lead_days) - latency.reporting_lag_days - (latency.release_cadence_days - 1)
    if eff < 0 and lead_days >= 0:
        return 0.0, True
    return eff, False


def _smoother(config: RunConfig):
    return lambda ts: loess_smooth(ts, config.loess_span, config.loess_degree,
                                   config.loess_robustness_passes)


def _overlap(wave_start: date, wave_end: date,
             *series: TimeSeries) -> tuple[date, date] | None:
    start = max([wave_start] + [s.start_date for s in series])
    end = min([wave_end] + [s.end_date for s in series])
    if start > end:
        return None
    return start, end


class _CellErrors:
    """Collects per-cell failures without aborting the run."""

    def __init__(self) -> None:
        self.count = 0

    def note(self, trust: str, variable: str, wave: str, method: str, exc: Exception) -> str:
        self.count += 1
        logger.debug("cell (%s, %s, %s, %s) failed: %s", trust, variable, wave, method, exc)
        return str(exc)


def run_analysis(
    config: RunConfig,
    admissions: Panel,
    indicators: dict[str, Panel],
    mappings: GeoMapping | dict[str, GeoMapping],
    methods: tuple[str, ...] = METHODS,
    dtw_paths: list[tuple] | None = None,
) -> list[ReportRow]:
    """Run the configured methods over every (wave, trust, indicator) cell.

    Returns one row per cell and method (the Granger method yields a row at
    horizon 0 and one at the configured horizon). Rows are sorted by
    (trust, indicator, wave, method) so output is deterministic. Pass a list
    as ``dtw_paths`` to collect the matched warping pairs as
    (indicator, wave, scope, query_date, ref_date) records.
    """
    unknown = set(methods) - set(METHODS)
    if unknown:
        raise LeadLagError(f"unknown methods: {', '.join(sorted(unknown))}")
    if isinstance(mappings, GeoMapping):
        mappings = {DEFAULT_MAPPING: mappings}

    adm = filter_trusts(admissions, config)
    trusts = adm.geo_ids("admissions")
    smooth = _smoother(config)
    adm_smooth = adm.transform(smooth)
    adm_linear = adm_smooth.transform(minmax_scale)

    span, degree = config.loess_span, config.loess_degree
    provenance_linear = f"locf+loess(span={span:g},degree={degree})+minmax"
    provenance_dtw = f"locf+loess(span={span:g},degree={degree})+zscore(window)"

    errors = _CellErrors()
    rows: list[ReportRow] = []
    for variable in sorted(indicators):
        panel = indicators[variable]
        coverage = (panel.start_date, panel.end_date)
        if panel.level == "ltla":
            gm = mappings.get(variable, mappings.get(DEFAULT_MAPPING))
            if gm is None:
                raise LeadLagError(f"no mapping available for LTLA indicator {variable!r}")
            trust_panel = apply_mapping(panel, gm)
        else:
            trust_panel = panel
        ind_smooth = trust_panel.transform(smooth)
        ind_linear = ind_smooth.transform(minmax_scale)
        ind_trusts = set(trust_panel.geo_ids(variable))

        for wave in config.waves:
            truncated = coverage[0] > wave.start or coverage[1] < wave.end
            if truncated:
                logger.warning("indicator %s does not fully cover wave %s",
                               variable, wave.name)

            dtw_shared: dict | None = None
            if "dtw" in methods and config.dtw_mode == "multivariate":
                cols = [t for t in trusts if t in ind_trusts]
                dtw_shared = _dtw_cell(
                    config, wave,
                    [ind_smooth.get(t, variable) for t in cols],
                    [adm_smooth.get(t, "admissions") for t in cols],
                ) if cols else {"error": "no trusts shared with indicator panel"}
                if dtw_paths is not None and "pairs" in dtw_shared:
                    _record_path(dtw_paths, variable, wave.name, "all-trusts", dtw_shared)

            for trust in trusts:
                base = ReportRow(trust_id=trust, indicator=variable, wave=wave.name,
                                 method="", truncated=truncated)
                missing_trust = trust not in ind_trusts
                if "granger" in methods:
                    rows.extend(_granger_rows(
                        base, config, errors, missing_trust,
                        ind_linear, adm_linear, trust, variable, wave,
                        provenance_linear))
                if "ccf" in methods:
                    rows.append(_ccf_row(
                        base, config, errors, missing_trust,
                        ind_linear, adm_linear, trust, variable, wave,
                        provenance_linear))
                if "dtw" in methods:
                    rows.append(_dtw_row(
                        base, config, errors, missing_trust,
                        ind_smooth, adm_smooth, trust, variable, wave,
                        provenance_dtw, dtw_shared, dtw_paths))

    if errors.count:
        logger.warning("%d cell(s) recorded an error instead of statistics", errors.count)
    rows.sort(key=ReportRow.sort_key)
    return rows


def _linear_pair(ind_panel: Panel, adm_panel: Panel, trust: str, variable: str,
                 wave) -> tuple[TimeSeries, TimeSeries] | None:
    x_full = ind_panel.get(trust, variable)
    y_full = adm_panel.get(trust, "admissions")
    window = _overlap(wave.start, wave.end, x_full, y_full)
    if window is None:
        return None
    return (slice_window(x_full, *window), slice_window(y_full, *window))


def _granger_rows(base: ReportRow, config: RunConfig, errors: _CellErrors,
                  missing_trust: bool, ind_panel: Panel, adm_panel: Panel,
                  trust: str, variable: str, wave, provenance: str) -> list[ReportRow]:
    out = []
    for method, horizon in (("granger", 0), ("granger14", config.horizon_days)):
        row = replace(base, method=method, horizon=horizon, provenance=provenance)
        if missing_trust:
            out.append(replace(row, error="no indicator series for trust"))
            continue
        pair = _linear_pair(ind_panel, adm_panel, trust, variable, wave)
        if pair is None:
            out.append(replace(row, truncated=True, error="no coverage in wave"))
            continue
        x, y = pair
        degenerate = x.degenerate or y.degenerate
        try:
            res = granger_test(x, y, config.granger_max_lag, horizon)
            out.append(replace(row, f_stat=res.f_stat, p_value=res.p_value,
                               df_num=res.df_num, df_den=res.df_den,
                               degenerate=degenerate))
        except LeadLagError as exc:
            degenerate = degenerate or isinstance(exc, (CollinearDesignError,
                                                        ZeroVarianceError))
            out.append(replace(row, degenerate=degenerate,
                               error=errors.note(trust, variable, wave.name, method, exc)))
    return out


def _ccf_row(base: ReportRow, config: RunConfig, errors: _CellErrors,
             missing_trust: bool, ind_panel: Panel, adm_panel: Panel,
             trust: str, variable: str, wave, provenance: str) -> ReportRow:
    row = replace(base, method="ccf", horizon=config.horizon_days, provenance=provenance)
    if missing_trust:
        return replace(row, error="no indicator series for trust")
    pair = _linear_pair(ind_panel, adm_panel, trust, variable, wave)
    if pair is None:
        return replace(row, truncated=True, error="no coverage in wave")
    x, y = pair
    degenerate = x.degenerate or y.degenerate
    try:
        res = ccf_result(x, y, config.ccf_window, config.horizon_days)
        eff, eroded = effective_lead(res.optimal_lead, config.latencies.get(variable))
        return replace(row, optimal_lead=res.optimal_lead,
                       ccf_at_optimal=res.ccf_at_optimal,
                       ccf_at_horizon=res.ccf_at_horizon,
                       effective_lead=eff, eroded=eroded,
                       degenerate=degenerate)
    except LeadLagError as exc:
        degenerate = degenerate or isinstance(exc, ZeroVarianceError)
        return replace(row, degenerate=degenerate,
                       error=errors.note(trust, variable, wave.name, "ccf", exc))


def _dtw_cell(config: RunConfig, wave, queries: list[TimeSeries],
              references: list[TimeSeries]) -> dict:
    """Align indicator against admissions around one wave.

    The query covers the wave plus a warm-up prefix; the reference gets an
    extra tail of up to one band width so leading matches near the wave end
    are not forced to bunch. Columns are z-scored over the alignment window
    so a wave's alignment depends only on data within its own windows.
    Warm-up leads are excluded from the summary.
    """
    warm_start = wave.start - timedelta(days=config.dtw_warmup_days)
    window = _overlap(warm_start, wave.end, *(queries + references))
    if window is None:
        return {"error": "no coverage in wave"}
    q_start, q_end = window
    ref_end = min(min(r.end_date for r in references),
                  q_end + timedelta(days=config.dtw_window))
    try:
        q_cols = [zscore_scale(slice_window(s, q_start, q_end)) for s in queries]
        r_cols = [zscore_scale(slice_window(s, q_start, ref_end)) for s in references]
        degenerate = any(s.degenerate for s in q_cols + r_cols)
        q = np.column_stack([s.values for s in q_cols])
        r = np.column_stack([s.values for s in r_cols])
        if q.shape[1] == 1:
            q, r = q[:, 0], r[:, 0]
        alignment = dtw_align(AlignmentQuery(q, r, window=config.dtw_window,
                                             open_begin=True, open_end=True))
        leads = lead_times_from_path(alignment)
        reported = [lead for i, lead in leads
                    if q_start + timedelta(days=i) >= wave.start]
        if not reported:
            return {"error": "no reported indices after warm-up exclusion"}
        return {
            "median_lead": float(np.median(reported)),
            "normalized_distance": alignment.normalized,
            "degenerate": degenerate,
            "pairs": alignment.pairs,
            "window_start": q_start,
        }
    except LeadLagError as exc:
        return {"error": str(exc)}


def _record_path(sink: list[tuple], indicator: str, wave: str, scope: str,
                 cell: dict) -> None:
    start = cell["window_start"]
    for i, j in cell["pairs"]:
        sink.append((indicator, wave, scope,
                     start + timedelta(days=i), start + timedelta(days=j)))


def _dtw_row(base: ReportRow, config: RunConfig, errors: _CellErrors,
             missing_trust: bool, ind_panel: Panel, adm_panel: Panel,
             trust: str, variable: str, wave, provenance: str,
             shared: dict | None, dtw_paths: list[tuple] | None = None) -> ReportRow:
    mode = config.dtw_mode
    row = replace(base, method="dtw", provenance=f"{provenance}+{mode}")
    if missing_trust:
        return replace(row, error="no indicator series for trust")
    if mode == "multivariate":
        cell = shared if shared is not None else {"error": "dtw cell not computed"}
    else:
        cell = _dtw_cell(config, wave,
                         [ind_panel.get(trust, variable)],
                         [adm_panel.get(trust, "admissions")])
        if dtw_paths is not None and "pairs" in cell:
            _record_path(dtw_paths, variable, wave.name, trust, cell)
    if "error" in cell:
        exc = LeadLagError(cell["error"])
        return replace(row, error=errors.note(trust, variable, wave.name, "dtw", exc))
    eff, eroded = effective_lead(cell["median_lead"], config.latencies.get(variable))
    return replace(row, dtw_median_lead=cell["median_lead"],
                   dtw_normalized_distance=cell["normalized_distance"],
                   effective_lead=eff, eroded=eroded,
                   degenerate=cell["degenerate"])
