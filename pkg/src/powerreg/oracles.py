"""Independent reference computations.

Everything here deliberately avoids the production code paths: brute-force
searches, closed forms, batch solves, and dumb fixed-step quadrature. These
are the cross-checks for the controller, estimator, and plant, exercised by
the test suite and by the `oracle` CLI subcommand.
"""

from __future__ import annotations

import math
from typing import Callable, Sequence

import numpy as np

from .plant import PlantParams
from .workload import WorkloadProfile


def nearest_level_brute(levels: Sequence[float], u: float) -> float:
    """Nearest level by exhaustive scan; lower level wins on a tie."""
    best = levels[0]
    for v in levels[1:]:
        if abs(v - u) < abs(best - u):
            best = v
        elif abs(v - u) == abs(best - u) and v < best:
            best = v
    return best


def newton_path(
    g: Callable[[float], float],
    dg: Callable[[float], float],
    target: float,
    u0: float,
    max_steps: int = 50,
    tol: float = 0.0,
) -> list[float]:
    """Iterates of the textbook Newton method for target - g(u) = 0."""
    us = [u0]
    u = u0
    for _ in range(max_steps):
        u = u + (target - g(u)) / dg(u)
        us.append(u)
        if abs(target - g(u)) <= tol:
            break
    return us


def batch_cubic_fit(
    phis: Sequence[float],
    powers: Sequence[float],
    forgetting: float = 1.0,
) -> np.ndarray:
    """Batch (weighted) least-squares fit of a cubic, coefficients (a, b, c, d).

    With forgetting < 1 sample i of n gets weight forgetting**(n - 1 - i),
    the most recent sample weighing 1.
    """
    phis = np.asarray(phis, dtype=float)
    ys = np.asarray(powers, dtype=float)
    h = np.vstack([phis**3, phis**2, phis, np.ones_like(phis)]).T
    if forgetting != 1.0:
        n = len(phis)
        w = np.sqrt(forgetting ** (n - 1 - np.arange(n)))
        h = h * w[:, None]
        ys = ys * w
    coeffs, *_ = np.linalg.lstsq(h, ys, rcond=None)
    return coeffs


def first_order_rise(power_w: float, r_th: float, tau_ms: float, t_ms: float) -> float:
    """Closed-form temperature rise above ambient under constant power."""
    return power_w * r_th * (1.0 - math.exp(-t_ms / tau_ms))


def steady_power(params: PlantParams, alpha: float, phi: float) -> float:
    """Closed-form thermal fixed point of total power at fixed alpha and phi.

    Solves P = P_dyn + sigma*V*(1 + kappa*r_th*P), which is linear in P.
    """
    v = params.voltage(phi)
    p_dyn = params.dynamic_power(alpha, phi)
    loop = params.sigma * v * params.kappa * params.r_th
    if loop >= 1.0:
        raise ValueError("thermal runaway: leakage feedback gain >= 1")
    return (p_dyn + params.sigma * v) / (1.0 - loop)


def true_cubic_coeffs(params: PlantParams, alpha: float) -> tuple[float, float, float, float]:
    """Expansion of total power in frequency for fixed alpha and kappa = 0.

    alpha*C*(v0 + m*phi)^2*phi + sigma*(v0 + m*phi) expands to
    a*phi^3 + b*phi^2 + c*phi + d with the returned coefficients.
    """
    ac = alpha * params.cap
    a = ac * params.m**2
    b = 2.0 * ac * params.v0 * params.m
    c = ac * params.v0**2 + params.sigma * params.m
    d = params.sigma * params.v0
    return a, b, c, d


def adjacent_power_gap(
    params: PlantParams,
    alpha: float,
    levels: Sequence[float],
    target_w: float,
) -> tuple[float, float, float]:
    """Adjacent levels whose steady powers bracket the target, plus the gap.

    Returns (lower level, upper level, power gap in watts), found by brute
    force over the level list.
    """
    ordered = sorted(levels)
    powers = [steady_power(params, alpha, v) for v in ordered]
    for (lo, hi), (p_lo, p_hi) in zip(
        zip(ordered, ordered[1:]), zip(powers, powers[1:])
    ):
        if p_lo <= target_w <= p_hi:
            return lo, hi, p_hi - p_lo
    raise ValueError("target power is not bracketed by any adjacent levels")


def reference_energy(
    params: PlantParams,
    profile: WorkloadProfile,
    schedule: Sequence[tuple[float, float]],
    duration_ms: float,
    dt_ms: float = 0.01,
) -> float:
    """Fixed-step quadrature of instantaneous power along a frequency schedule.

    schedule holds (start_ms, frequency) pairs, sorted, first at 0. The
    temperature path is integrated with the same small step. Actuation
    latency and counter quantization are intentionally ignored: this is the
    ground-truth integral the plant's accumulator is checked against.
    """
    if not schedule or schedule[0][0] != 0.0:
        raise ValueError("schedule must start at t=0")
    sched = list(schedule) + [(math.inf, schedule[-1][1])]
    idx = 0
    temp = params.t_amb
    energy = 0.0
    n = int(round(duration_ms / dt_ms))
    for i in range(n):
        t = i * dt_ms
        while sched[idx + 1][0] <= t:
            idx += 1
        phi = sched[idx][1]
        alpha = profile.sample_alpha(t)
        v = params.voltage(phi)
        power = alpha * params.cap * v * v * phi + params.sigma * v * (
            1.0 + params.kappa * (temp - params.t_amb))
        energy += power * dt_ms * 1e-3
        temp += (power * params.r_th - (temp - params.t_amb)) * (dt_ms / params.tau_th)
    return energy
