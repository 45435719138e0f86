"""File-based ingestion of admissions, indicator, mapping and population CSVs.

All readers are strict about schema (header row mandatory, ISO-8601 dates)
and report the offending line number on malformed input. Panels come out
rectangular over each variable's observed date range, with gaps imputed by
last observation carried forward.
"""

from __future__ import annotations

import csv
import logging
from datetime import date
from pathlib import Path

import numpy as np

from .errors import SchemaError
from .geo import GeoMapping, build_mapping
from .timeseries import Panel, TimeSeries, locf_impute

logger = logging.getLogger(__name__)


def _open_rows(path: str | Path, expected_header: list[str]):
    path = Path(path)
    try:
        handle = path.open(newline="", encoding="utf-8")
    except OSError as exc:
        raise SchemaError(f"cannot open file: {exc}", path=str(path)) from exc
    reader = csv.reader(handle)
    header = next(reader, None)
    if header != expected_header:
        handle.close()
        raise SchemaError(
            f"expected header {','.join(expected_header)!r}, got {header!r}",
            path=str(path), line=1,
        )
    return handle, reader


def _parse_date(text: str, path: str, line: int) -> date:
    try:
        return date.fromisoformat(text)
    except ValueError:
        raise SchemaError(f"invalid ISO date {text!r}", path=path, line=line) from None


def _build_series(
    per_geo: dict[str, dict[date, float]], variable: str
) -> dict[tuple[str, str], TimeSeries]:
    start = min(min(obs) for obs in per_geo.values())
    end = max(max(obs) for obs in per_geo.values())
    n = (end - start).days + 1
    out = {}
    for geo, obs in per_geo.items():
        values = np.full(n, np.nan)
        for d, v in obs.items():
            values[(d - start).days] = v
        out[(geo, variable)] = locf_impute(TimeSeries(start, values))
    return out


def read_admissions(path: str | Path) -> Panel:
    """Trust-level admissions panel from ``trust_id,date,admissions`` rows."""
    handle, reader = _open_rows(path, ["trust_id", "date", "admissions"])
    per_trust: dict[str, dict[date, float]] = {}
    spath = str(path)
    with handle:
        for lineno, row in enumerate(reader, start=2):
            if not row:
                continue
            if len(row) != 3:
                raise SchemaError(f"expected 3 fields, got {len(row)}", spath, lineno)
            trust, d_text, count_text = row
            d = _parse_date(d_text, spath, lineno)
            try:
                count = int(count_text)
            except ValueError:
                raise SchemaError(f"admissions {count_text!r} is not an integer",
                                  spath, lineno) from None
            if count < 0:
                raise SchemaError(f"negative admissions {count}", spath, lineno)
            obs = per_trust.setdefault(trust, {})
            if d in obs:
                raise SchemaError(f"duplicate record for ({trust}, {d})", spath, lineno)
            obs[d] = float(count)
    if not per_trust:
        raise SchemaError("no data rows", spath)
    return Panel("trust", _build_series(per_trust, "admissions"))


def read_indicator_file(path: str | Path, level: str = "ltla") -> dict[str, Panel]:
    """Panels per variable from ``geo_id,date,variable,value`` rows."""
    handle, reader = _open_rows(path, ["geo_id", "date", "variable", "value"])
    per_var: dict[str, dict[str, dict[date, float]]] = {}
    spath = str(path)
    with handle:
        for lineno, row in enumerate(reader, start=2):
            if not row:
                continue
            if len(row) != 4:
                raise SchemaError(f"expected 4 fields, got {len(row)}", spath, lineno)
            geo, d_text, variable, value_text = row
            d = _parse_date(d_text, spath, lineno)
            try:
                value = float(value_text)
            except ValueError:
                raise SchemaError(f"value {value_text!r} is not numeric",
                                  spath, lineno) from None
            obs = per_var.setdefault(variable, {}).setdefault(geo, {})
            if d in obs:
                raise SchemaError(f"duplicate record for ({geo}, {d}, {variable})",
                                  spath, lineno)
            obs[d] = value
    if not per_var:
        raise SchemaError("no data rows", spath)
    return {
        var: Panel(level, _build_series(per_geo, var))
        for var, per_geo in per_var.items()
    }


def read_indicator(path: str | Path, variable: str, level: str = "ltla") -> Panel:
    """Panel for one named variable from an indicator CSV."""
    panels = read_indicator_file(path, level=level)
    try:
        return panels[variable]
    except KeyError:
        raise SchemaError(
            f"variable {variable!r} not present (found: {', '.join(sorted(panels))})",
            path=str(path),
        ) from None


def read_indicator_dir(directory: str | Path, level: str = "ltla") -> dict[str, Panel]:
    """All indicator panels found in a directory of CSV files."""
    directory = Path(directory)
    panels: dict[str, Panel] = {}
    files = sorted(directory.glob("*.csv"))
    if not files:
        raise SchemaError("no indicator CSV files found", path=str(directory))
    for f in files:
        for var, panel in read_indicator_file(f, level=level).items():
            if var in panels:
                raise SchemaError(f"variable {var!r} appears in more than one file",
                                  path=str(f))
            panels[var] = panel
    return panels


def read_mapping(path: str | Path) -> GeoMapping:
    """LTLA->Trust mapping from ``ltla_id,trust_id,admissions`` count rows."""
    handle, reader = _open_rows(path, ["ltla_id", "trust_id", "admissions"])
    records: list[tuple[str, str, float]] = []
    spath = str(path)
    with handle:
        for lineno, row in enumerate(reader, start=2):
            if not row:
                continue
            if len(row) != 3:
                raise SchemaError(f"expected 3 fields, got {len(row)}", spath, lineno)
            ltla, trust, count_text = row
            try:
                count = float(count_text)
            except ValueError:
                raise SchemaError(f"count {count_text!r} is not numeric",
                                  spath, lineno) from None
            if count < 0:
                raise SchemaError(f"negative count {count}", spath, lineno)
            records.append((ltla, trust, count))
    if not records:
        raise SchemaError("no data rows", spath)
    return build_mapping(records)


def read_population(path: str | Path) -> dict[str, float]:
    """LTLA residential populations from ``ltla_id,population`` rows."""
    handle, reader = _open_rows(path, ["ltla_id", "population"])
    spath = str(path)
    populations: dict[str, float] = {}
    with handle:
        for lineno, row in enumerate(reader, start=2):
            if not row:
                continue
            if len(row) != 2:
                raise SchemaError(f"expected 2 fields, got {len(row)}", spath, lineno)
            ltla, pop_text = row
            try:
                pop = float(pop_text)
            except ValueError:
                raise SchemaError(f"population {pop_text!r} is not numeric",
                                  spath, lineno) from None
            if pop < 0:
                raise SchemaError(f"negative population {pop}", spath, lineno)
            if ltla in populations:
                raise SchemaError(f"duplicate LTLA {ltla}", spath, lineno)
            populations[ltla] = pop
    if not populations:
        raise SchemaError("no data rows", spath)
    return populations


def read_groupings(path: str | Path) -> dict[str, tuple[str, ...]]:
    """Variable grouping declarations from ``group,member_variable`` rows."""
    handle, reader = _open_rows(path, ["group", "member_variable"])
    spath = str(path)
    groups: dict[str, list[str]] = {}
    with handle:
        for lineno, row in enumerate(reader, start=2):
            if not row:
                continue
            if len(row) != 2:
                raise SchemaError(f"expected 2 fields, got {len(row)}", spath, lineno)
            group, member = row
            members = groups.setdefault(group, [])
            if member in members:
                raise SchemaError(f"member {member!r} repeated in group {group!r}",
                                  spath, lineno)
            members.append(member)
    if not groups:
        raise SchemaError("no data rows", spath)
    return {g: tuple(m) for g, m in groups.items()}


def apply_groupings(
    panels: dict[str, Panel], groupings: dict[str, tuple[str, ...]]
) -> dict[str, Panel]:
    """Sum member variables into grouped variables; members are consumed.

    Members must share geography level and ids; date ranges intersect.
    """
    out = dict(panels)
    for group, members in groupings.items():
        present = [m for m in members if m in out]
        if not present:
            logger.warning("grouping %s: no member variables present", group)
            continue
        first = out[present[0]]
        geos = set(first.geo_ids())
        start = first.start_date
        end = first.end_date
        for m in present[1:]:
            p = out[m]
            if p.level != first.level or set(p.geo_ids()) != geos:
                raise SchemaError(
                    f"grouping {group!r}: member {m!r} has a different geography")
            start = max(start, p.start_date)
            end = min(end, p.end_date)
        if start > end:
            raise SchemaError(f"grouping {group!r}: member date ranges do not overlap")
        n = (end - start).days + 1
        series = {}
        for geo in sorted(geos):
            total = np.zeros(n)
            for m in present:
                ts = out[m].get(geo, m)
                offset = (start - ts.start_date).days
                total += ts.values[offset : offset + n]
            series[(geo, group)] = TimeSeries(start, total)
        for m in present:
            del out[m]
        out[group] = Panel(first.level, series)
    return out
