"""Experiment runner: closed-loop power regulation with trace and metrics.

One experiment wires the plant, the workload, the RLS identifier, and the
integral controller into the per-cycle loop: advance the plant one control
cycle, derive average power from the energy counter, refresh the model,
compute the next frequency, apply it. Each cycle appends one trace record.

Configuration is a flat key=value text format with dotted section prefixes
(see DEFAULT_CONFIG_TEXT for every key and its default). Traces round-trip
through a fixed-schema CSV.
"""

from __future__ import annotations

import csv
import math
import statistics
from dataclasses import dataclass, field, replace

from .controller import IntegralController, gain, tracking_error
from .freqset import DEFAULT_LEVELS, FrequencySet
from .plant import Plant, PlantParams
from .sysid import CubicModel, RlsEstimator
from .workload import KINDS, WorkloadProfile, make_profile


class ConfigError(ValueError):
    """Raised for unknown keys, bad values, or violated config invariants."""


@dataclass
class TraceRecord:
    """One control cycle: what ran, what was measured, what the loop computed."""

    t_ms: float
    freq_ghz: float
    power_w: float
    target_w: float
    error_w: float
    gain: float
    coeff_a: float
    coeff_b: float
    coeff_c: float
    coeff_d: float
    deriv_est: float
    settled: bool


@dataclass
class ExperimentConfig:
    target_w: float = 10.0
    cycle_ms: int = 10
    duration_ms: float = 4000.0
    omega: tuple[float, ...] = DEFAULT_LEVELS
    omega_continuous: bool = False
    u0: float = 2.0
    workload: WorkloadProfile = field(
        default_factory=lambda: make_profile("constant", seed=1))
    plant: PlantParams = field(default_factory=PlantParams)
    counter_phase_ms: float | None = None
    rls_forgetting: float = 0.98
    rls_p0: float = 1e3
    rls_x0: tuple[float, float, float, float] = (0.0, 0.0, 0.0, 0.0)
    deriv_floor: float = 0.1
    projected_state: bool = True
    settle_band_frac: float = 0.05
    seed: int = 1
    out_path: str | None = None

    def frequency_set(self) -> FrequencySet | None:
        return None if self.omega_continuous else FrequencySet.from_list(self.omega)

    def validate(self) -> None:
        if not (isinstance(self.cycle_ms, int) and self.cycle_ms >= 1):
            raise ConfigError("cycle_ms: must be an integer number of ms, >= 1")
        if not (math.isfinite(self.duration_ms) and self.duration_ms >= self.cycle_ms):
            raise ConfigError("duration_ms: must be at least one control cycle")
        if not (math.isfinite(self.target_w) and self.target_w > 0.0):
            raise ConfigError("target_w: must be positive and finite")
        if not 0.0 < self.settle_band_frac < 0.5:
            raise ConfigError("settle_band_frac: must be in (0, 0.5)")
        omega = self.frequency_set()
        if omega is not None and self.u0 not in omega:
            raise ConfigError(f"u0: {self.u0!r} is not a level of omega")
        if not (math.isfinite(self.u0) and self.u0 > 0.0):
            raise ConfigError("u0: must be positive and finite")


def run_experiment(config: ExperimentConfig) -> list[TraceRecord]:
    """Run one closed-loop experiment and return its per-cycle trace."""
    config.validate()
    omega = config.frequency_set()
    plant = Plant(
        config.plant,
        config.workload,
        u0=config.u0,
        omega=omega,
        seed=config.seed,
        counter_phase_ms=config.counter_phase_ms,
    )
    estimator = RlsEstimator(
        forgetting=config.rls_forgetting,
        p0=config.rls_p0,
        x0=CubicModel(*config.rls_x0),
    )
    controller = IntegralController(
        omega, config.u0,
        deriv_floor=config.deriv_floor,
        projected_state=config.projected_state,
    )
    n_cycles = int(config.duration_ms // config.cycle_ms)
    band_lo = config.target_w * (1.0 - config.settle_band_frac)
    band_hi = config.target_w * (1.0 + config.settle_band_frac)

    trace: list[TraceRecord] = []
    u = config.u0
    prev_energy = plant.read_energy()
    for k in range(n_cycles):
        # The first cycle just measures the starting power at u0; control
        # actions begin once there is a measurement to react to.
        plant.advance(config.cycle_ms)
        now_energy = plant.read_energy()
        y = (now_energy - prev_energy) / (config.cycle_ms * 1e-3)
        prev_energy = now_energy

        model = estimator.update(u, y)
        deriv = model.derivative(u)
        err = tracking_error(config.target_w, y)
        a_gain = gain(deriv, config.deriv_floor)
        u_next = controller.step(config.target_w, y, deriv)

        trace.append(TraceRecord(
            t_ms=float(k * config.cycle_ms),
            freq_ghz=u,
            power_w=y,
            target_w=config.target_w,
            error_w=err,
            gain=a_gain,
            coeff_a=model.a,
            coeff_b=model.b,
            coeff_c=model.c,
            coeff_d=model.d,
            deriv_est=deriv,
            settled=band_lo <= y <= band_hi,
        ))
        plant.apply_frequency(u_next)
        u = u_next
    return trace


# -- metrics ----------------------------------------------------------------

def settling_time(
    trace: list[TraceRecord], target_w: float, band_frac: float
) -> float | None:
    """First cycle time at which measured power enters the target band."""
    if not trace:
        raise ValueError("trace must be non-empty")
    lo = target_w * (1.0 - band_frac)
    hi = target_w * (1.0 + band_frac)
    for rec in trace:
        if lo <= rec.power_w <= hi:
            return rec.t_ms
    return None


def steady_error(
    trace: list[TraceRecord], target_w: float, settle_ms: float
) -> float:
    """Absolute gap between mean post-settling power and the target."""
    if not trace:
        raise ValueError("trace must be non-empty")
    if settle_ms > trace[-1].t_ms:
        raise ValueError(
            f"settle_ms {settle_ms!r} is beyond the end of the trace "
            f"({trace[-1].t_ms} ms)")
    tail = [rec.power_w for rec in trace if rec.t_ms >= settle_ms]
    return abs(statistics.fmean(tail) - target_w)


def mean_frequency(trace: list[TraceRecord], from_ms: float = 0.0) -> float:
    """Mean applied frequency from from_ms onward."""
    vals = [rec.freq_ghz for rec in trace if rec.t_ms >= from_ms]
    if not vals:
        raise ValueError("no records at or after from_ms")
    return statistics.fmean(vals)


# -- CSV --------------------------------------------------------------------

CSV_COLUMNS = (
    "t_ms", "freq_ghz", "power_w", "target_w", "error_w", "gain",
    "coeff_a", "coeff_b", "coeff_c", "coeff_d", "deriv_est", "settled",
)


def _fmt(value: float) -> str:
    return format(value, ".6g")


def write_csv(trace: list[TraceRecord], path: str) -> None:
    """Write a trace to CSV: header plus one row per cycle, 6 significant digits."""
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(CSV_COLUMNS)
        for rec in trace:
            writer.writerow([
                _fmt(rec.t_ms), _fmt(rec.freq_ghz), _fmt(rec.power_w),
                _fmt(rec.target_w), _fmt(rec.error_w), _fmt(rec.gain),
                _fmt(rec.coeff_a), _fmt(rec.coeff_b), _fmt(rec.coeff_c),
                _fmt(rec.coeff_d), _fmt(rec.deriv_est),
                "1" if rec.settled else "0",
            ])


def read_csv(path: str) -> list[TraceRecord]:
    """Parse a trace CSV written by write_csv."""
    trace = []
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader)
        if tuple(header) != CSV_COLUMNS:
            raise ValueError(f"unexpected CSV header in {path}")
        for row in reader:
            vals = [float(v) for v in row[:11]]
            trace.append(TraceRecord(*vals, settled=row[11] == "1"))
    return trace


# -- config parsing -----------------------------------------------------------

def _parse_float(text: str) -> float:
    v = float(text)
    if not math.isfinite(v):
        raise ValueError("must be finite")
    return v


def _parse_int(text: str) -> int:
    v = float(text)
    if not v.is_integer():
        raise ValueError("must be an integer")
    return int(v)


def _parse_bool(text: str) -> bool:
    t = text.strip().lower()
    if t in ("true", "1", "yes", "on"):
        return True
    if t in ("false", "0", "no", "off"):
        return False
    raise ValueError("must be a boolean (true/false)")


def _parse_float_list(text: str) -> tuple[float, ...]:
    return tuple(_parse_float(part) for part in text.split(",") if part.strip())


def _parse_kind(text: str) -> str:
    if text not in KINDS:
        raise ValueError(f"must be one of {', '.join(KINDS)}")
    return text


_PARSERS = {
    "target_w": _parse_float,
    "cycle_ms": _parse_int,
    "duration_ms": _parse_float,
    "omega": _parse_float_list,
    "omega_continuous": _parse_bool,
    "u0": _parse_float,
    "settle_band_frac": _parse_float,
    "seed": _parse_int,
    "out_path": str,
    "workload.kind": _parse_kind,
    "workload.alpha_mean": _parse_float,
    "workload.alpha_jitter": _parse_float,
    "workload.switch_period_ms": _parse_float,
    "workload.stall_fraction": _parse_float,
    "workload.stall_alpha_scale": _parse_float,
    "plant.cap": _parse_float,
    "plant.v0": _parse_float,
    "plant.m": _parse_float,
    "plant.sigma": _parse_float,
    "plant.kappa": _parse_float,
    "plant.t_amb": _parse_float,
    "plant.r_th": _parse_float,
    "plant.tau_th": _parse_float,
    "plant.latency_ms": _parse_float,
    "plant.counter_phase": _parse_float,
    "rls.lambda": _parse_float,
    "rls.p0": _parse_float,
    "rls.x0": _parse_float_list,
    "controller.deriv_floor": _parse_float,
    "controller.projected_state": _parse_bool,
}

# Keys whose defaults come from the selected workload preset.
_WORKLOAD_OVERRIDE_KEYS = (
    "alpha_mean", "alpha_jitter", "switch_period_ms",
    "stall_fraction", "stall_alpha_scale",
)

# One place listing every key and its default, also shipped as documentation.
DEFAULT_CONFIG_TEXT = """\
# experiment
target_w = 10.0
cycle_ms = 10
duration_ms = 4000
omega = 0.8,1.0,1.1,1.3,1.5,1.7,1.8,2.0,2.2,2.4,2.5,2.7,2.9,3.1,3.2,3.4
omega_continuous = false
u0 = 2.0
settle_band_frac = 0.05
seed = 1
# out_path = trace.csv

# workload (unset numeric fields fall back to the kind's preset)
workload.kind = constant
# workload.alpha_mean = 1.0
# workload.alpha_jitter = 0.05
# workload.switch_period_ms = 40.0
# workload.stall_fraction = 0.05
# workload.stall_alpha_scale = 0.6

# plant
plant.cap = 2.0
plant.v0 = 0.6
plant.m = 0.2
plant.sigma = 1.5
plant.kappa = 0.005
plant.t_amb = 40.0
plant.r_th = 2.0
plant.tau_th = 200.0
plant.latency_ms = 0.0
# plant.counter_phase = 0.0   (unset: drawn from the seed)

# identification
rls.lambda = 0.98
rls.p0 = 1e3
rls.x0 = 0,0,0,0

# controller
controller.deriv_floor = 0.1
controller.projected_state = true
"""


def parse_pairs(text: str) -> dict[str, str]:
    """Split config text into raw key/value strings; # starts a comment."""
    pairs: dict[str, str] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}: expected key = value, got {raw!r}")
        key, value = line.split("=", 1)
        pairs[key.strip()] = value.strip()
    return pairs


def parse_config(text: str) -> ExperimentConfig:
    """Parse flat key=value config text; unset keys take their defaults."""
    return config_from_pairs(parse_pairs(text))


def config_from_pairs(pairs: dict[str, str]) -> ExperimentConfig:
    """Build a validated config from raw key/value strings."""
    values: dict[str, object] = {}
    for key, raw in pairs.items():
        parser = _PARSERS.get(key)
        if parser is None:
            raise ConfigError(f"unknown config key {key!r}")
        try:
            values[key] = parser(raw)
        except ValueError as exc:
            raise ConfigError(f"{key}: {exc}") from None

    seed = values.get("seed", 1)
    kind = values.get("workload.kind", "constant")
    overrides = {
        name: values[f"workload.{name}"]
        for name in _WORKLOAD_OVERRIDE_KEYS
        if f"workload.{name}" in values
    }
    try:
        profile = make_profile(kind, seed=seed, **overrides)
    except ValueError as exc:
        raise ConfigError(f"workload: {exc}") from None

    plant_kwargs = {
        name: values[f"plant.{name}"]
        for name in ("cap", "v0", "m", "sigma", "kappa", "t_amb",
                     "r_th", "tau_th", "latency_ms")
        if f"plant.{name}" in values
    }
    try:
        plant = PlantParams(**plant_kwargs)
    except ValueError as exc:
        raise ConfigError(f"plant: {exc}") from None

    x0 = values.get("rls.x0", (0.0, 0.0, 0.0, 0.0))
    if len(x0) != 4:
        raise ConfigError("rls.x0: expected exactly 4 coefficients")

    config = ExperimentConfig(
        target_w=values.get("target_w", 10.0),
        cycle_ms=values.get("cycle_ms", 10),
        duration_ms=values.get("duration_ms", 4000.0),
        omega=values.get("omega", DEFAULT_LEVELS),
        omega_continuous=values.get("omega_continuous", False),
        u0=values.get("u0", 2.0),
        workload=profile,
        plant=plant,
        counter_phase_ms=values.get("plant.counter_phase"),
        rls_forgetting=values.get("rls.lambda", 0.98),
        rls_p0=values.get("rls.p0", 1e3),
        rls_x0=tuple(x0),
        deriv_floor=values.get("controller.deriv_floor", 0.1),
        projected_state=values.get("controller.projected_state", True),
        settle_band_frac=values.get("settle_band_frac", 0.05),
        seed=seed,
        out_path=values.get("out_path"),
    )
    try:
        config.validate()
        RlsEstimator(config.rls_forgetting, config.rls_p0, CubicModel(*config.rls_x0))
        if config.counter_phase_ms is not None and not 0.0 <= config.counter_phase_ms < 1.0:
            raise ConfigError("plant.counter_phase: must be in [0, 1)")
        if config.deriv_floor <= 0.0 or not math.isfinite(config.deriv_floor):
            raise ConfigError("controller.deriv_floor: must be positive and finite")
    except ConfigError:
        raise
    except ValueError as exc:
        raise ConfigError(str(exc)) from None
    return config


# -- sweep --------------------------------------------------------------------

SWEEP_KINDS = ("compute_bound", "graph_irregular", "memory_bound")
SWEEP_CYCLES = (10, 30)

SWEEP_COLUMNS = ("scenario", "cycle_ms", "settling_ms", "error_w", "mean_freq_ghz")


@dataclass
class SweepRow:
    scenario: str
    cycle_ms: int
    settling_ms: float | None
    error_w: float | None
    mean_freq_ghz: float


def run_sweep(
    base: ExperimentConfig,
    kinds: tuple[str, ...] = SWEEP_KINDS,
    cycles: tuple[int, ...] = SWEEP_CYCLES,
) -> list[SweepRow]:
    """Run the scenario grid and summarize each run's metrics.

    Output ordering is by (scenario, cycle_ms), independent of run order.
    """
    rows = []
    for kind in sorted(kinds):
        for cycle in sorted(cycles):
            cfg = replace(
                base,
                cycle_ms=cycle,
                workload=make_profile(kind, seed=base.seed),
                out_path=None,
            )
            trace = run_experiment(cfg)
            settled = settling_time(trace, cfg.target_w, cfg.settle_band_frac)
            err = None
            freq_from = 0.0
            if settled is not None:
                err = steady_error(trace, cfg.target_w, settled)
                freq_from = settled
            rows.append(SweepRow(
                scenario=kind,
                cycle_ms=cycle,
                settling_ms=settled,
                error_w=err,
                mean_freq_ghz=mean_frequency(trace, freq_from),
            ))
    return rows


def write_sweep_csv(rows: list[SweepRow], path: str) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(SWEEP_COLUMNS)
        for row in rows:
            writer.writerow([
                row.scenario,
                str(row.cycle_ms),
                _fmt(row.settling_ms) if row.settling_ms is not None else "",
                _fmt(row.error_w) if row.error_w is not None else "",
                _fmt(row.mean_freq_ghz),
            ])
