"""Runge-Kutta drivers for complex-valued ODE systems y' = f(t, y).

Two modes back every evolution in the package:

* ``adaptive``: Dormand-Prince 5(4) embedded pair, error-per-step control with
  the classic PI-free step adjustment (safety 0.9, growth clamped to [0.2, 5]).
* ``fixed``: classical 4th-order Runge-Kutta at a caller-supplied step, for
  bit-reproducible regression runs.

Sample times are hit exactly: the driver never steps across a requested output
point. An optional ``post_step`` hook transforms the accepted state in place
(used to re-symmetrize density matrices).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from .errors import RunFailedError

__all__ = ["IntegratorOptions", "StepStats", "integrate_adaptive", "integrate_fixed", "solve_ode"]

# Dormand-Prince 5(4) tableau; fifth-order solution is propagated,
# the difference row E gives the embedded fourth-order error estimate.
_DP_C = np.array([0.0, 1 / 5, 3 / 10, 4 / 5, 8 / 9, 1.0, 1.0])
_DP_A = [
    [],
    [1 / 5],
    [3 / 40, 9 / 40],
    [44 / 45, -56 / 15, 32 / 9],
    [19372 / 6561, -25360 / 2187, 64448 / 6561, -212 / 729],
    [9017 / 3168, -355 / 33, 46732 / 5247, 49 / 176, -5103 / 18656],
    [35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84],
]
_DP_B5 = np.array([35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84, 0.0])
_DP_B4 = np.array(
    [5179 / 57600, 0.0, 7571 / 16695, 393 / 640, -92097 / 339200, 187 / 2100, 1 / 40]
)
_DP_E = _DP_B5 - _DP_B4


@dataclass
class IntegratorOptions:
    mode: str = "adaptive"  # "adaptive" | "fixed"
    rtol: float = 1e-8
    atol: float = 1e-10
    fixed_step: float | None = None
    max_steps: int = 5_000_000
    safety: float = 0.9
    min_factor: float = 0.2
    max_factor: float = 5.0


@dataclass
class StepStats:
    n_accepted: int = 0
    n_rejected: int = 0
    n_rhs_evals: int = 0
    min_step: float = np.inf
    max_step: float = 0.0


def _error_norm(err: np.ndarray, y0: np.ndarray, y1: np.ndarray, rtol: float, atol: float) -> float:
    scale = atol + rtol * np.maximum(np.abs(y0), np.abs(y1))
    return float(np.sqrt(np.mean((np.abs(err) / scale) ** 2)))


def _initial_step(f, t0, y0, rtol, atol) -> float:
    # standard Hairer-Norsett-Wanner heuristic, simplified
    f0 = f(t0, y0)
    scale = atol + rtol * np.abs(y0)
    d0 = float(np.sqrt(np.mean((np.abs(y0) / scale) ** 2)))
    d1 = float(np.sqrt(np.mean((np.abs(f0) / scale) ** 2)))
    h0 = 1e-6 if d0 < 1e-5 or d1 < 1e-5 else 0.01 * d0 / d1
    y1 = y0 + h0 * f0
    f1 = f(t0 + h0, y1)
    d2 = float(np.sqrt(np.mean((np.abs(f1 - f0) / scale) ** 2))) / h0
    if max(d1, d2) <= 1e-15:
        h1 = max(1e-6, h0 * 1e-3)
    else:
        h1 = (0.01 / max(d1, d2)) ** 0.2
    return min(100 * h0, h1)


def integrate_adaptive(
    f: Callable[[float, np.ndarray], np.ndarray],
    y0: np.ndarray,
    sample_times: Sequence[float],
    options: IntegratorOptions,
    post_step: Callable[[np.ndarray], np.ndarray] | None = None,
    on_sample: Callable[[float, np.ndarray], None] | None = None,
) -> tuple[np.ndarray, StepStats]:
    """Integrate with the embedded 5(4) pair, landing exactly on sample_times."""
    times = np.asarray(sample_times, dtype=float)
    y = np.array(y0, dtype=complex)
    stats = StepStats()
    t = times[0]
    if on_sample is not None:
        on_sample(t, y)
    h = _initial_step(f, t, y, options.rtol, options.atol)
    stats.n_rhs_evals += 2
    k = [None] * 7
    for t_target in times[1:]:
        while t < t_target - 1e-14 * max(1.0, abs(t_target)):
            h = min(h, t_target - t)
            k[0] = f(t, y)
            for i in range(1, 7):
                yi = y + h * sum(a * k[j] for j, a in enumerate(_DP_A[i]))
                k[i] = f(t + _DP_C[i] * h, yi)
            stats.n_rhs_evals += 7
            y5 = y + h * sum(b * k[i] for i, b in enumerate(_DP_B5) if b)
            err = h * sum(e * k[i] for i, e in enumerate(_DP_E) if e)
            norm = _error_norm(err, y, y5, options.rtol, options.atol)
            if norm <= 1.0:
                t = t + h
                y = y5 if post_step is None else post_step(y5)
                stats.n_accepted += 1
                stats.min_step = min(stats.min_step, h)
                stats.max_step = max(stats.max_step, h)
            else:
                stats.n_rejected += 1
            factor = options.max_factor if norm == 0 else options.safety * norm ** (-0.2)
            h = h * min(options.max_factor, max(options.min_factor, factor))
            if stats.n_accepted + stats.n_rejected > options.max_steps:
                raise RunFailedError(
                    f"step budget exhausted at t = {t:.6g} (h = {h:.3e})"
                )
        t = t_target
        if on_sample is not None:
            on_sample(t, y)
    return y, stats


def integrate_fixed(
    f: Callable[[float, np.ndarray], np.ndarray],
    y0: np.ndarray,
    sample_times: Sequence[float],
    step: float,
    post_step: Callable[[np.ndarray], np.ndarray] | None = None,
    on_sample: Callable[[float, np.ndarray], None] | None = None,
) -> tuple[np.ndarray, StepStats]:
    """Classical RK4 with a fixed step, truncated to land on each sample time."""
    if step <= 0:
        raise RunFailedError(f"fixed step must be > 0, got {step}")
    times = np.asarray(sample_times, dtype=float)
    y = np.array(y0, dtype=complex)
    stats = StepStats()
    t = times[0]
    if on_sample is not None:
        on_sample(t, y)
    for t_target in times[1:]:
        span = t_target - t
        n_sub = max(1, int(np.ceil(span / step - 1e-12)))
        h = span / n_sub
        for _ in range(n_sub):
            k1 = f(t, y)
            k2 = f(t + h / 2, y + (h / 2) * k1)
            k3 = f(t + h / 2, y + (h / 2) * k2)
            k4 = f(t + h, y + h * k3)
            y = y + (h / 6) * (k1 + 2 * k2 + 2 * k3 + k4)
            if post_step is not None:
                y = post_step(y)
            t += h
            stats.n_accepted += 1
            stats.n_rhs_evals += 4
        t = t_target
        stats.min_step = min(stats.min_step, h)
        stats.max_step = max(stats.max_step, h)
        if on_sample is not None:
            on_sample(t, y)
    return y, stats


def solve_ode(
    f,
    y0,
    sample_times,
    options: IntegratorOptions,
    post_step=None,
    on_sample=None,
) -> tuple[np.ndarray, StepStats]:
    if options.mode == "fixed":
        if options.fixed_step is None:
            raise RunFailedError("fixed mode requires a step size")
        return integrate_fixed(f, y0, sample_times, options.fixed_step, post_step, on_sample)
    if options.mode != "adaptive":
        raise RunFailedError(f"unknown integrator mode {options.mode!r}")
    return integrate_adaptive(f, y0, sample_times, options, post_step, on_sample)
