"""Command-line front end.

Subcommands
-----------
figure1   Rabi-oscillation curves of both damping models for panel a (vacuum)
          or b (coherent state, nbar = 3).
evolve    One model over a uniform time grid.
compare   Difference statistics between two channels of saved series.

Parameters come from built-in defaults, then an optional ``--config`` file of
``key = value`` lines, then command-line flags. Frequencies are given in kHz
and times in microseconds; they are converted to rad/s and seconds on parse.

Exit codes: 0 success, 1 validation error, 2 numeric error, 3 I/O error.
"""

from __future__ import annotations

import argparse
import math
import os
import sys
import warnings
from dataclasses import asdict, dataclass, replace
from pathlib import Path

import numpy as np

from . import series as ts_io
from .errors import NumericError
from .liouville import (VALIDITY_THRESHOLD, Milburn, QExponential, QShortTime, Unitary,
                        validity_horizon)
from .series import TimeSeries
from .trapped_ion import (Coherent, EmpiricalDecay, Fock, IonConfig, envelope_empirical,
                          envelope_qmodel, pg_empirical, pg_from_propagator, pg_qmodel,
                          rabi_frequency)

EXIT_OK, EXIT_VALIDATION, EXIT_NUMERIC, EXIT_IO = 0, 1, 2, 3

FIGURE1_THRESHOLD = 0.17
MODELS = ("empirical", "qmodel", "unitary", "qexp", "qshort", "milburn")
Q_MODELS = {"qmodel", "qexp", "qshort"}


class ConfigError(ValueError):
    pass


@dataclass
class RunConfig:
    model: str = "qmodel"
    state: str = "fock"
    n0: int = 0
    nbar: float = 3.0
    q: float = 1.001
    eta: float = 0.202
    omega_over_2pi: float = 5e5  # Hz
    gamma0: float = 11.9e3  # 1/s
    exponent: float = 0.7
    tau: float = 0.0  # s
    t_max: float | None = None  # s
    steps: int = 2000
    dim: int = 30
    out: str | None = None
    format: str | None = None

    def ion(self) -> IonConfig:
        return IonConfig(self.omega_over_2pi, self.eta, self.dim)

    def decay(self) -> EmpiricalDecay:
        return EmpiricalDecay(self.gamma0, self.exponent)

    def initial_state(self):
        return Fock(self.n0) if self.state == "fock" else Coherent(self.nbar)

    def times(self) -> np.ndarray:
        return np.linspace(0.0, self.t_max, self.steps)


# key -> (RunConfig field, parser, unit scale)
_KEYS = {
    "model": ("model", str, None),
    "state": ("state", str, None),
    "n0": ("n0", int, None),
    "nbar": ("nbar", float, None),
    "q": ("q", float, None),
    "eta": ("eta", float, None),
    "omega-khz": ("omega_over_2pi", float, 1e3),
    "gamma0-khz": ("gamma0", float, 1e3),
    "exponent": ("exponent", float, None),
    "tau-us": ("tau", float, 1e-6),
    "tmax-us": ("t_max", float, 1e-6),
    "steps": ("steps", int, None),
    "dim": ("dim", int, None),
    "out": ("out", str, None),
    "format": ("format", str, None),
}


def _convert(key: str, raw: str):
    name, parse, scale = _KEYS[key]
    try:
        value = parse(raw)
    except ValueError:
        raise ConfigError(f"{key}: cannot parse {raw!r} as {parse.__name__}") from None
    return name, value * scale if scale else value


def read_config_file(path) -> dict:
    """Parse ``key = value`` lines into RunConfig field overrides."""
    values = {}
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ConfigError(f"{path}:{lineno}: expected 'key = value'")
            key, raw = (s.strip() for s in line.split("=", 1))
            key = key.replace("_", "-")
            if key not in _KEYS:
                raise ConfigError(f"{path}:{lineno}: unknown key {key!r}")
            try:
                name, value = _convert(key, raw)
            except ConfigError as exc:
                raise ConfigError(f"{path}:{lineno}: {exc}") from None
            values[name] = value
    return values


def validate(cfg: RunConfig) -> RunConfig:
    def bad(field_name, msg):
        raise ConfigError(f"{field_name}: {msg}")

    if cfg.model not in MODELS:
        bad("model", f"must be one of {', '.join(MODELS)}")
    if cfg.state not in ("fock", "coherent"):
        bad("state", "must be 'fock' or 'coherent'")
    if cfg.steps < 2:
        bad("steps", f"must be >= 2, got {cfg.steps}")
    if cfg.t_max is None or not cfg.t_max > 0:
        bad("tmax-us", "must be positive")
    if not math.isfinite(cfg.t_max):
        bad("tmax-us", "must be finite")
    if cfg.model in Q_MODELS and not cfg.q >= 1:
        bad("q", f"evolution requires q >= 1, got {cfg.q}")
    if cfg.format not in (None, "csv", "json"):
        bad("format", "must be 'csv' or 'json'")
    if cfg.n0 < 0 or cfg.n0 >= cfg.dim:
        bad("n0", f"must lie in [0, dim) = [0, {cfg.dim})")
    if cfg.nbar < 0:
        bad("nbar", "must be non-negative")
    if cfg.tau < 0:
        bad("tau-us", "must be non-negative")
    try:
        cfg.ion()
        cfg.decay()
    except ValueError as exc:
        raise ConfigError(str(exc)) from None
    return cfg


def build_config(args, base: RunConfig) -> RunConfig:
    values = {}
    if getattr(args, "config", None):
        values.update(read_config_file(args.config))
    for key in _KEYS:
        raw = getattr(args, key.replace("-", "_"), None)
        if raw is not None:
            name, value = _convert(key, str(raw))
            values[name] = value
    return replace(base, **values)


def horizon(cfg: RunConfig, threshold: float = VALIDITY_THRESHOLD) -> float | None:
    if cfg.q == 1:
        return None
    return validity_horizon(cfg.q, cfg.ion().omega, threshold)


def _metadata(cfg: RunConfig, command: str, **extra) -> dict:
    meta = {"command": command, "params": {k: v for k, v in asdict(cfg).items()
                                           if k not in ("out", "format")}}
    h = horizon(cfg)
    meta["validity_threshold"] = VALIDITY_THRESHOLD
    meta["validity_horizon_s"] = h
    meta["omega_0_rad_s"] = rabi_frequency(0, cfg.ion())
    meta.update(extra)
    return meta


def _horizon_warnings(cfg: RunConfig, times: np.ndarray, relevant: bool) -> list[str]:
    h = horizon(cfg)
    if not relevant or h is None:
        return []
    return [f"t = {t:.17g} s is past the validity horizon {h:.6g} s"
            for t in times if t > h]


def _emit(ts: TimeSeries, cfg: RunConfig) -> None:
    fmt = cfg.format
    if cfg.out and cfg.out != "-":
        ts_io.save(ts, cfg.out, fmt)
    else:
        sys.stdout.write(ts_io.to_json(ts) if fmt == "json" else ts_io.to_csv(ts))


def _default_tmax(cfg: RunConfig) -> RunConfig:
    """Fill a missing ``t_max`` with the horizon ``|1-q| Omega t = 0.17``."""
    if cfg.t_max is not None:
        return cfg
    h = horizon(cfg, FIGURE1_THRESHOLD)
    if h is None:
        raise ConfigError("tmax-us: required when q = 1")
    return replace(cfg, t_max=h)


def run_figure1(panel: str, cfg: RunConfig) -> TimeSeries:
    """Both damping models for panel ``a`` (vacuum) or ``b`` (coherent)."""
    if panel not in ("a", "b"):
        raise ConfigError("panel: must be 'a' or 'b'")
    cfg = replace(cfg, model="qmodel",
                  state="fock" if panel == "a" else "coherent",
                  n0=0, nbar=3.0 if panel == "b" else cfg.nbar)
    cfg = validate(_default_tmax(cfg))
    ion, times = cfg.ion(), cfg.times()
    dist = cfg.initial_state().distribution(cfg.dim)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        channels = {
            "pg_empirical": pg_empirical(dist, ion, cfg.decay(), times),
            "pg_qmodel": pg_qmodel(dist, ion, cfg.q, times),
            "envelope_empirical": envelope_empirical(dist, cfg.decay(), times),
            "envelope_qmodel": envelope_qmodel(dist, ion, cfg.q, times),
        }
    warn = _horizon_warnings(cfg, times, True)
    meta = _metadata(cfg, "figure1", panel=panel, t_max_s=cfg.t_max,
                     p0=float(dist.probs[0]), warnings=warn)
    return TimeSeries(times, channels, meta)


def _kind(cfg: RunConfig):
    return {"unitary": lambda: Unitary(), "qexp": lambda: QExponential(cfg.q),
            "qshort": lambda: QShortTime(cfg.q), "milburn": lambda: Milburn(cfg.tau)}[cfg.model]()


def run_evolve(cfg: RunConfig) -> TimeSeries:
    cfg = validate(_default_tmax(cfg))
    ion, times = cfg.ion(), cfg.times()
    state = cfg.initial_state()
    dist = state.distribution(cfg.dim)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        if cfg.model == "empirical":
            channels = {"pg": pg_empirical(dist, ion, cfg.decay(), times),
                        "envelope": envelope_empirical(dist, cfg.decay(), times)}
        elif cfg.model == "qmodel":
            channels = {"pg": pg_qmodel(dist, ion, cfg.q, times),
                        "envelope": envelope_qmodel(dist, ion, cfg.q, times)}
        else:
            channels = pg_from_propagator(state, ion, _kind(cfg), times).channels
    warn = _horizon_warnings(cfg, times, cfg.model in Q_MODELS)
    return TimeSeries(times, channels, _metadata(cfg, "evolve", t_max_s=cfg.t_max, warnings=warn))


# ---------------------------------------------------------------------------
# argument parsing
# ---------------------------------------------------------------------------

def _add_run_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--config", help="key = value parameter file")
    p.add_argument("--q", type=float, help="extensivity parameter (default 1.001)")
    p.add_argument("--eta", type=float, help="Lamb-Dicke parameter (default 0.202)")
    p.add_argument("--omega-khz", type=float, help="coupling Omega/2pi in kHz (default 500)")
    p.add_argument("--gamma0-khz", type=float, help="empirical gamma_0 in kHz (default 11.9)")
    p.add_argument("--exponent", type=float, help="empirical decay exponent (default 0.7)")
    p.add_argument("--tmax-us", type=float, help="end of the time grid in microseconds")
    p.add_argument("--steps", type=int, help="number of grid points (default 2000)")
    p.add_argument("--dim", type=int, help="Fock truncation (default 30)")
    p.add_argument("--out", help="output file; stdout when omitted")
    p.add_argument("--format", help="csv or json (default: from --out suffix, else csv)")


class _Parser(argparse.ArgumentParser):
    # usage errors are validation errors, not argparse's default exit code 2
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_VALIDATION, f"{self.prog}: error: {message}\n")


def make_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="qdecoherence",
                                     description="Nonextensive decoherence of trapped-ion Rabi oscillations")
    sub = parser.add_subparsers(dest="command", required=True)

    fig = sub.add_parser("figure1", help="regenerate the Figure 1 curves")
    fig.add_argument("--panel", default="a", help="a: vacuum state, b: coherent state nbar=3")
    _add_run_flags(fig)

    ev = sub.add_parser("evolve", help="run one model over a time grid")
    ev.add_argument("--model", help="|".join(MODELS))
    ev.add_argument("--state", help="fock or coherent")
    ev.add_argument("--n0", type=int, help="Fock level for --state fock")
    ev.add_argument("--nbar", type=float, help="mean excitation for --state coherent")
    ev.add_argument("--tau-us", type=float, help="Milburn time step in microseconds")
    _add_run_flags(ev)

    cmp_ = sub.add_parser("compare", help="compare a channel of two saved series")
    cmp_.add_argument("series_a")
    cmp_.add_argument("series_b")
    cmp_.add_argument("--channel", required=True)
    cmp_.add_argument("--channel-b", help="channel name in series_b (default: --channel)")
    cmp_.add_argument("--fit", choices=["gaussian"], help="also fit exp(-k t^2) rates")
    return parser


def _style(text: str, stream) -> str:
    if os.environ.get("NO_COLOR") or not getattr(stream, "isatty", lambda: False)():
        return text
    return f"\033[1m{text}\033[0m"


def print_report(report: dict, stream=None) -> None:
    stream = stream or sys.stdout
    stream.write(_style(f"compare {report['channel_a']} vs {report['channel_b']}", stream) + "\n")
    for key, value in report.items():
        if key in ("channel_a", "channel_b"):
            continue
        text = f"{value:.12g}" if isinstance(value, float) else str(value)
        stream.write(f"{key}: {text}\n")


def _run(args) -> int:
    if args.command == "compare":
        a, b = ts_io.load(args.series_a), ts_io.load(args.series_b)
        report = ts_io.compare(a, b, args.channel, args.channel_b, fit_gaussian=args.fit == "gaussian")
        print_report(report)
        return EXIT_OK

    cfg = build_config(args, RunConfig())
    if cfg.format is None and cfg.out and Path(cfg.out).suffix.lower() == ".json":
        cfg = replace(cfg, format="json")
    ts = run_figure1(args.panel, cfg) if args.command == "figure1" else run_evolve(cfg)
    for line in ts.metadata.get("warnings", []):
        print(f"warning: {line}", file=sys.stderr)
    _emit(ts, cfg)
    return EXIT_OK


def main(argv=None) -> int:
    try:
        args = make_parser().parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return _run(args)
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO
    except (NumericError, FloatingPointError) as exc:
        print(f"numeric error: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except (ValueError, IndexError, KeyError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION


if __name__ == "__main__":
    sys.exit(main())
