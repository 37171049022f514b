"""Time-series container and its CSV / JSON serialisation.

CSV files start with a single ``# metadata = {...}`` comment line holding the
run parameters as JSON, followed by the header ``t_s,<channel>,...`` and one
row per grid point. Floats are written with 17 significant digits, which
round-trips IEEE doubles exactly.
"""

from __future__ import annotations

import csv
import io
import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .errors import GridMismatch

TIME_COLUMN = "t_s"
METADATA_PREFIX = "# metadata = "


@dataclass
class TimeSeries:
    times: np.ndarray
    channels: dict = field(default_factory=dict)
    metadata: dict = field(default_factory=dict)

    def __post_init__(self):
        self.times = np.asarray(self.times, dtype=float)
        if self.times.ndim != 1:
            raise ValueError("times must be one-dimensional")
        if np.any(np.diff(self.times) <= 0):
            raise ValueError("times must be strictly increasing")
        chans = {}
        for name, values in self.channels.items():
            v = np.asarray(values, dtype=float)
            if v.shape != self.times.shape:
                raise ValueError(f"channel {name!r} has length {v.size}, expected {self.times.size}")
            chans[name] = v
        self.channels = chans

    def __getitem__(self, name: str) -> np.ndarray:
        return self.channels[name]

    def channel_names(self) -> list[str]:
        return list(self.channels)


def _fmt(x: float) -> str:
    return format(float(x), ".17g")


def to_csv(ts: TimeSeries) -> str:
    buf = io.StringIO()
    buf.write(METADATA_PREFIX + json.dumps(ts.metadata, sort_keys=True) + "\n")
    w = csv.writer(buf, lineterminator="\n")
    names = ts.channel_names()
    w.writerow([TIME_COLUMN, *names])
    cols = [ts.times] + [ts.channels[n] for n in names]
    for row in zip(*cols):
        w.writerow([_fmt(v) for v in row])
    return buf.getvalue()


def from_csv(text: str) -> TimeSeries:
    metadata = {}
    lines = text.splitlines()
    body = []
    for line in lines:
        if line.startswith(METADATA_PREFIX):
            metadata = json.loads(line[len(METADATA_PREFIX):])
        elif line.startswith("#") or not line.strip():
            continue
        else:
            body.append(line)
    rows = list(csv.reader(body))
    if not rows or rows[0][0] != TIME_COLUMN:
        raise ValueError(f"missing '{TIME_COLUMN}' header")
    header = rows[0]
    data = np.array([[float(v) for v in r] for r in rows[1:]], dtype=float).reshape(-1, len(header))
    channels = {name: data[:, i] for i, name in enumerate(header[1:], start=1)}
    return TimeSeries(data[:, 0], channels, metadata)


def to_json(ts: TimeSeries) -> str:
    series = {TIME_COLUMN: ts.times.tolist()}
    series.update({n: v.tolist() for n, v in ts.channels.items()})
    return json.dumps({"metadata": ts.metadata, "series": series}, sort_keys=True, indent=1) + "\n"


def from_json(text: str) -> TimeSeries:
    obj = json.loads(text)
    series = dict(obj["series"])
    times = series.pop(TIME_COLUMN)
    return TimeSeries(times, series, obj.get("metadata", {}))


def save(ts: TimeSeries, path, fmt: str | None = None) -> Path:
    path = Path(path)
    fmt = fmt or ("json" if path.suffix.lower() == ".json" else "csv")
    text = to_json(ts) if fmt == "json" else to_csv(ts)
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(text)
    return path


def load(path) -> TimeSeries:
    text = Path(path).read_text(encoding="utf-8")
    if text.lstrip().startswith("{"):
        return from_json(text)
    return from_csv(text)


def check_same_grid(a: TimeSeries, b: TimeSeries, tol: float = 1e-12) -> None:
    if a.times.shape != b.times.shape:
        raise GridMismatch(f"grids have {a.times.size} and {b.times.size} points")
    dev = float(np.max(np.abs(a.times - b.times))) if a.times.size else 0.0
    if dev > tol:
        raise GridMismatch(f"time grids differ by up to {dev:.3e} s")


def gaussian_rate(times, envelope) -> float:
    """Least-squares ``k`` in ``log(envelope) = -k t**2`` over points with t > 0."""
    t = np.asarray(times, dtype=float)
    y = np.asarray(envelope, dtype=float)
    keep = (t > 0) & (y > 0)
    x2 = t[keep] ** 2
    return float(-np.dot(x2, np.log(y[keep])) / np.dot(x2, x2))


def compare(a: TimeSeries, b: TimeSeries, channel: str, channel_b: str | None = None,
            fit_gaussian: bool = False) -> dict:
    """Difference statistics of ``a[channel]`` against ``b[channel_b or channel]``."""
    check_same_grid(a, b)
    channel_b = channel_b or channel
    for ts, name in ((a, channel), (b, channel_b)):
        if name not in ts.channels:
            raise KeyError(f"channel {name!r} not found; available: {ts.channel_names()}")
    d = b[channel_b] - a[channel]
    i = int(np.argmax(np.abs(d)))
    report = {
        "channel_a": channel,
        "channel_b": channel_b,
        "points": int(a.times.size),
        "rms_difference": float(np.sqrt(np.mean(d**2))),
        "max_abs_difference": float(abs(d[i])),
        "time_of_max_s": float(a.times[i]),
    }
    if fit_gaussian:
        ka = gaussian_rate(a.times, a[channel])
        kb = gaussian_rate(b.times, b[channel_b])
        report.update(gaussian_rate_a=ka, gaussian_rate_b=kb, gaussian_rate_ratio=kb / ka)
    return report
