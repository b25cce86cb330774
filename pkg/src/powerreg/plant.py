"""Simulated multicore processor plant.

Power model: total power is dynamic switching power plus leakage. Dynamic
power is alpha * C * V^2 * phi with an affine voltage law V = v0 + m * phi,
which makes it a cubic polynomial in frequency for fixed activity. Leakage
scales with voltage and rises linearly with temperature above ambient, and
temperature follows a first-order law driven by total power, closing the
power/temperature loop.

Energy is exposed the way commodity hardware exposes it: a counter that
updates only on a 1 ms grid whose phase is unknown to the consumer. Callers
derive average power as delta(counter) / delta(time).

Time is tracked in integer microseconds and integration is event-driven:
activity switches, counter-grid instants, and pending frequency changes are
hit exactly, with forward-Euler sub-steps of at most 0.1 ms in between. The
class implements the same apply/advance/read seam a hardware driver would.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass

from .freqset import FrequencySet
from .workload import WorkloadProfile

# Integration sub-step (forward Euler) upper bound, microseconds.
_SUBSTEP_US = 100
# Energy counter grid period, microseconds.
_GRID_US = 1000


@dataclass(frozen=True)
class PlantParams:
    """Physical parameters of the simulated processor.

    cap: effective switched capacitance, scaled so alpha*cap*V^2*phi is watts
      with V in volts and phi in GHz.
    v0, m: affine voltage law V = v0 + m*phi (volts, volts/GHz).
    sigma: leakage scale (watts per volt).
    kappa: leakage temperature sensitivity (1/degC).
    t_amb: ambient temperature (degC).
    r_th: thermal resistance (degC per watt).
    tau_th: thermal time constant (ms).
    latency_ms: actuation delay between a frequency command and its effect.
    """

    cap: float = 2.0
    v0: float = 0.6
    m: float = 0.2
    sigma: float = 1.5
    kappa: float = 0.005
    t_amb: float = 40.0
    r_th: float = 2.0
    tau_th: float = 200.0
    latency_ms: float = 0.0

    def __post_init__(self) -> None:
        checks = [
            (self.cap > 0.0, "cap must be > 0"),
            (self.v0 > 0.0, "v0 must be > 0"),
            (self.m >= 0.0, "m must be >= 0"),
            (self.sigma >= 0.0, "sigma must be >= 0"),
            (self.tau_th > 0.0, "tau_th must be > 0"),
            (self.r_th >= 0.0, "r_th must be >= 0"),
            (0.0 <= self.latency_ms <= 5.0, "latency_ms must be in [0, 5]"),
        ]
        for ok, msg in checks:
            if not ok:
                raise ValueError(msg)
        for name in ("cap", "v0", "m", "sigma", "kappa", "t_amb", "r_th",
                     "tau_th", "latency_ms"):
            if not math.isfinite(getattr(self, name)):
                raise ValueError(f"{name} must be finite")

    def voltage(self, phi: float) -> float:
        """Supply voltage at frequency phi (GHz)."""
        if not phi > 0.0:
            raise ValueError("frequency must be positive")
        return self.v0 + self.m * phi

    def dynamic_power(self, alpha: float, phi: float) -> float:
        """Switching power alpha*cap*V(phi)^2*phi, watts."""
        if not alpha > 0.0:
            raise ValueError("activity factor must be positive")
        v = self.voltage(phi)
        return alpha * self.cap * v * v * phi


class Plant:
    """Simulated processor with an energy counter and a thermal state.

    Owned by a single experiment loop. A frequency set may be supplied to
    enforce legal operating points; omit it to run with continuous
    frequencies.
    """

    def __init__(
        self,
        params: PlantParams,
        profile: WorkloadProfile,
        u0: float,
        omega: FrequencySet | None = None,
        seed: int = 0,
        counter_phase_ms: float | None = None,
    ):
        self.params = params
        self.profile = profile
        self.omega = omega
        self._check_freq(u0)
        self.freq = u0
        self.alpha = profile.sample_alpha(0.0)
        self.temp = params.t_amb
        self.energy_acc = 0.0
        self.counter_joules = 0.0
        if counter_phase_ms is None:
            self._phase_us = random.Random(seed).randrange(_GRID_US)
        else:
            if not 0.0 <= counter_phase_ms < 1.0:
                raise ValueError("counter_phase_ms must be in [0, 1)")
            self._phase_us = int(round(counter_phase_ms * 1000.0))
        if self._phase_us == 0:
            self.counter_joules = self.energy_acc
        self._clock_us = 0
        self._pending: list[tuple[int, float]] = []
        self._next_alpha_us = self._alpha_change_after(0)
        self._substep_us = max(1, min(_SUBSTEP_US, int(params.tau_th * 1000.0)))

    # -- contract surface -------------------------------------------------

    @property
    def clock_ms(self) -> float:
        return self._clock_us / 1000.0

    @property
    def counter_phase_ms(self) -> float:
        return self._phase_us / 1000.0

    def static_power(self) -> float:
        """Leakage power at the current operating point and temperature."""
        v = self.params.voltage(self.freq)
        return self.params.sigma * v * (
            1.0 + self.params.kappa * (self.temp - self.params.t_amb))

    def apply_frequency(self, phi: float) -> None:
        """Command a frequency; takes effect after the configured latency."""
        self._check_freq(phi)
        if self.params.latency_ms <= 0.0:
            self.freq = phi
        else:
            due = self._clock_us + int(round(self.params.latency_ms * 1000.0))
            self._pending.append((due, phi))

    def read_energy(self) -> float:
        """Energy counter value: last grid-aligned snapshot, joules."""
        return self.counter_joules

    def advance(self, dt_ms: float) -> None:
        """Advance simulated time by dt_ms milliseconds."""
        if not (math.isfinite(dt_ms) and dt_ms > 0.0):
            raise ValueError("dt_ms must be positive and finite")
        dt_us = int(round(dt_ms * 1000.0))
        if dt_us < 1:
            raise ValueError("dt_ms must be at least 1 microsecond")
        end_us = self._clock_us + dt_us
        while self._clock_us < end_us:
            event_us = min(end_us, self._next_grid_us(), self._next_alpha_or(end_us),
                           self._next_pending_or(end_us))
            self._integrate_to(event_us)
            self._fire_events()

    # -- internals ---------------------------------------------------------

    def _check_freq(self, phi: float) -> None:
        if not (isinstance(phi, (int, float)) and math.isfinite(phi) and phi > 0.0):
            raise ValueError(f"frequency must be positive and finite, got {phi!r}")
        if self.omega is not None and phi not in self.omega:
            raise ValueError(f"frequency {phi!r} is not a legal level")

    def _alpha_change_after(self, clock_us: int) -> int | None:
        nxt_ms = self.profile.next_change_ms(clock_us / 1000.0)
        if math.isinf(nxt_ms):
            return None
        nxt_us = math.ceil(nxt_ms * 1000.0)
        return max(nxt_us, clock_us + 1)

    def _next_grid_us(self) -> int:
        if self._clock_us < self._phase_us:
            return self._phase_us
        k = (self._clock_us - self._phase_us) // _GRID_US + 1
        return self._phase_us + k * _GRID_US

    def _next_alpha_or(self, default: int) -> int:
        return self._next_alpha_us if self._next_alpha_us is not None else default

    def _next_pending_or(self, default: int) -> int:
        return self._pending[0][0] if self._pending else default

    def _integrate_to(self, event_us: int) -> None:
        p = self.params
        v = p.voltage(self.freq)
        p_dyn = self.alpha * p.cap * v * v * self.freq
        sv = p.sigma * v
        kappa, t_amb, r_th, tau = p.kappa, p.t_amb, p.r_th, p.tau_th
        clock, temp, energy = self._clock_us, self.temp, self.energy_acc
        while clock < event_us:
            step = min(self._substep_us, event_us - clock)
            # non-negative: extreme kappa configs must not drain the counter
            power = max(0.0, p_dyn + sv * (1.0 + kappa * (temp - t_amb)))
            energy += power * step * 1e-6
            temp += (power * r_th - (temp - t_amb)) * (step * 1e-3 / tau)
            clock += step
        self._clock_us, self.temp, self.energy_acc = clock, temp, energy

    def _fire_events(self) -> None:
        now = self._clock_us
        if now >= self._phase_us and (now - self._phase_us) % _GRID_US == 0:
            self.counter_joules = self.energy_acc
        if self._next_alpha_us is not None and now >= self._next_alpha_us:
            self.alpha = self.profile.sample_alpha(now / 1000.0)
            self._next_alpha_us = self._alpha_change_after(now)
        while self._pending and self._pending[0][0] <= now:
            _, phi = self._pending.pop(0)
            self.freq = phi
