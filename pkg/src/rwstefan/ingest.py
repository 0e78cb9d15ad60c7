"""Load measured surface-temperature series and turn them into boundary drivers."""

from __future__ import annotations

import csv
import math
import warnings
from dataclasses import dataclass
from importlib import resources
from pathlib import Path

import numpy as np

from .core import ConfigError, SampledFlux, SampledTemperature

__all__ = [
    "SeriesError",
    "TemperatureSeries",
    "TIME_UNITS",
    "load_series",
    "driver_from_series",
    "bundled_series_path",
    "BUNDLED_SERIES",
]

TIME_UNITS = {"s": 1.0, "min": 60.0, "h": 3600.0}
BUNDLED_SERIES = "orebro_2019-03-01_03.csv"


class SeriesError(ConfigError):
    """Malformed or invalid time series; ``line`` is 1-based when known."""

    def __init__(self, message, line=None):
        super().__init__(f"line {line}: {message}" if line is not None else message)
        self.line = line


@dataclass(frozen=True, eq=False)
class TemperatureSeries:
    times: np.ndarray  # seconds
    values: np.ndarray
    label: str = ""
    time_unit: str = "s"

    def __post_init__(self):
        times = np.asarray(self.times, dtype=float)
        values = np.asarray(self.values, dtype=float)
        if times.ndim != 1 or times.shape != values.shape:
            raise SeriesError("times and values must be 1-D and of equal length")
        if times.size < 2:
            raise SeriesError("a series needs at least two samples")
        if not (np.all(np.isfinite(times)) and np.all(np.isfinite(values))):
            raise SeriesError("series contains non-finite values")
        bad = np.flatnonzero(np.diff(times) <= 0)
        if bad.size:
            raise SeriesError(f"time does not increase at sample {bad[0] + 2}")
        object.__setattr__(self, "times", times)
        object.__setattr__(self, "values", values)

    @property
    def samples(self):
        return list(zip(self.times.tolist(), self.values.tolist()))

    def times_in(self, unit):
        return self.times / TIME_UNITS[unit]

    @property
    def span(self):
        return float(self.times[-1] - self.times[0])


def bundled_series_path(name=BUNDLED_SERIES):
    return Path(str(resources.files("rwstefan") / "data" / name))


def _parse_float(text, line):
    try:
        value = float(text)
    except ValueError:
        raise SeriesError(f"not a number: {text.strip()!r}", line) from None
    if not math.isfinite(value):
        raise SeriesError(f"non-finite value {text.strip()!r}", line)
    return value


def load_series(path, time_unit="s", delimiter=",", label=None):
    """Read a two-column (time, temperature) file; times are converted to seconds.

    A single non-numeric first line is taken as a header. Blank lines and
    lines starting with ``#`` are skipped.
    """
    if time_unit not in TIME_UNITS:
        raise SeriesError(f"unknown time unit {time_unit!r}; use one of {sorted(TIME_UNITS)}")
    path = Path(path)
    scale = TIME_UNITS[time_unit]
    times, values, lines = [], [], []
    with path.open(newline="", encoding="utf-8") as fh:
        for lineno, row in enumerate(csv.reader(fh, delimiter=delimiter), start=1):
            if not row or not "".join(row).strip() or row[0].lstrip().startswith("#"):
                continue
            if len(row) < 2:
                raise SeriesError("expected two columns (time, temperature)", lineno)
            if not times and not lines:
                try:
                    float(row[0])
                except ValueError:
                    lines.append(lineno)  # header
                    continue
            times.append(_parse_float(row[0], lineno) * scale)
            values.append(_parse_float(row[1], lineno))
            lines.append(lineno)
    data_lines = lines[1:] if len(lines) > len(times) else lines
    t = np.asarray(times)
    if t.size >= 2:
        bad = np.flatnonzero(np.diff(t) <= 0)
        if bad.size:
            raise SeriesError("time stamps must be strictly increasing", data_lines[bad[0] + 1])
    return TemperatureSeries(times=t, values=np.asarray(values),
                             label=label if label is not None else path.name, time_unit=time_unit)


def driver_from_series(series, t_max, mode="linear", flux=False):
    """Interpolating boundary driver over ``[0, t_max]``.

    Past the last sample the final value is held and the driver's
    ``extrapolated`` flag is set.
    """
    if t_max < series.times[0]:
        raise SeriesError(f"t_max={t_max!r} is before the first sample at {series.times[0]!r}")
    cls = SampledFlux if flux else SampledTemperature
    driver = cls(times=series.times, values=series.values, mode=mode, label=series.label, t_max=t_max)
    if driver.extrapolated:
        warnings.warn(
            f"series {series.label!r} ends at t={series.times[-1]:g}, holding last value to t_max={t_max:g}",
            stacklevel=2)
    return driver
