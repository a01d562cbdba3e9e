"""Adaptive embedded Runge-Kutta time stepping with wall-aware step control.

The pair is the classic Fehlberg 4(5); the fourth-order solution is the one
propagated, the fifth-order weights serve only the error estimate.  Steps are
rejected (never clamped) when any internal stage leaves the open domain, so
the discrete flow never evaluates the potential at or behind a wall.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .dynamics import FlockModel, FlockState, acceleration
from .observables import DiagnosticsRecord, diagnostics, initial_energy
from .potentials import WallDomainError, check_domain, wall_distances


class StiffnessError(RuntimeError):
    """Step-size control collapsed below dt_min."""


@dataclass(frozen=True)
class IntegratorControl:
    dt_init: float = 1e-3
    abs_tol: float = 1e-8
    rel_tol: float = 1e-8
    dt_min: float = 1e-12
    dt_max: float = 0.1
    wall_safety: float = 0.25

    def __post_init__(self):
        for name in ("dt_init", "abs_tol", "rel_tol", "dt_min", "dt_max"):
            val = getattr(self, name)
            if not (math.isfinite(val) and val > 0):
                raise ValueError(f"{name} must be positive and finite")
        if not (self.dt_min <= self.dt_init <= self.dt_max):
            raise ValueError("dt_min <= dt_init <= dt_max required")
        if not (0.0 < self.wall_safety < 1.0):
            raise ValueError("wall_safety must lie in (0, 1)")


@dataclass
class Trajectory:
    sample_times: np.ndarray
    states: list
    records: list

    def __post_init__(self):
        if not (len(self.sample_times) == len(self.states) == len(self.records)):
            raise ValueError("sample_times, states, records must have equal length")


# Fehlberg tableau: nodes, stage coefficients, fourth-order weights, and
# fifth-minus-fourth weights for the error estimate.
_A = (
    np.array([]),
    np.array([1 / 4]),
    np.array([3 / 32, 9 / 32]),
    np.array([1932 / 2197, -7200 / 2197, 7296 / 2197]),
    np.array([439 / 216, -8.0, 3680 / 513, -845 / 4104]),
    np.array([-8 / 27, 2.0, -3544 / 2565, 1859 / 4104, -11 / 40]),
)
_B4 = np.array([25 / 216, 0.0, 1408 / 2565, 2197 / 4104, -1 / 5, 0.0])
_ERR = np.array([1 / 360, 0.0, -128 / 4275, -2197 / 75240, 1 / 50, 2 / 55])


def _attempt(m: FlockModel, x: np.ndarray, v: np.ndarray, dt: float):
    """One trial step; raises WallDomainError if a stage or the endpoint
    leaves the open domain."""
    n = x.shape[0]
    kx = np.empty((6, n))
    kv = np.empty((6, n))
    kx[0] = v
    kv[0] = acceleration(m, x, v)
    for i in range(1, 6):
        a = _A[i]
        xi = x + dt * (a @ kx[:i])
        vi = v + dt * (a @ kv[:i])
        kx[i] = vi
        kv[i] = acceleration(m, xi, vi)  # raises on domain violation
    x_new = x + dt * (_B4 @ kx)
    v_new = v + dt * (_B4 @ kv)
    check_domain(m.geometry, m.wall, x_new)
    err_x = dt * (_ERR @ kx)
    err_v = dt * (_ERR @ kv)
    return x_new, v_new, err_x, err_v


def step_embedded(m: FlockModel, s: FlockState, dt: float):
    """Single embedded step from s; returns (new_state, error_estimate).

    The estimate is the max-norm of the embedded difference over all
    position and velocity components.
    """
    if not dt > 0:
        raise ValueError("dt must be positive")
    x_new, v_new, err_x, err_v = _attempt(m, s.x, s.v, dt)
    err = max(float(np.max(np.abs(err_x))), float(np.max(np.abs(err_v))))
    return FlockState(t=s.t + dt, x=x_new, v=v_new), err


def _sample_grid(t0: float, t_end: float, sample_every: float) -> np.ndarray:
    if not sample_every > 0:
        raise ValueError("sample_every must be positive")
    span = t_end - t0
    n = int(math.floor(span / sample_every + 1e-9))
    times = t0 + sample_every * np.arange(n + 1)
    if times[-1] < t_end - 1e-9 * max(1.0, abs(t_end)):
        times = np.append(times, t_end)
    else:
        times[-1] = min(times[-1], t_end)
    return times


def _error_ratio(c: IntegratorControl, x, v, x_new, v_new, err_x, err_v) -> float:
    scale_x = c.abs_tol + c.rel_tol * np.maximum(np.abs(x), np.abs(x_new))
    scale_v = c.abs_tol + c.rel_tol * np.maximum(np.abs(v), np.abs(v_new))
    ratio = max(float(np.max(np.abs(err_x) / scale_x)), float(np.max(np.abs(err_v) / scale_v)))
    if not (math.isfinite(ratio) and np.all(np.isfinite(x_new)) and np.all(np.isfinite(v_new))):
        return math.inf
    return ratio


def integrate(
    m: FlockModel,
    s0: FlockState,
    t_end: float,
    c: IntegratorControl | None = None,
    sample_every: float = 0.1,
) -> Trajectory:
    """Advance s0 to t_end, sampling diagnostics on a uniform grid.

    Steps are clamped to land exactly on sample times.  dt is additionally
    capped at wall_safety * (nearest wall distance) / (max |v| + 1) so the
    stiff wall layer is resolved before it is entered.
    """
    c = c or IntegratorControl()
    if not t_end > s0.t:
        raise ValueError("t_end must exceed the initial time")
    if s0.n != m.n_agents:
        raise ValueError("state size does not match model n_agents")
    m.check_domain(s0.x)

    times = _sample_grid(s0.t, t_end, sample_every)
    G = initial_energy(m, s0)
    states = [s0]
    records = [diagnostics(m, s0, G)]

    x = s0.x.copy()
    v = s0.v.copy()
    t = s0.t
    dt_prop = min(c.dt_init, c.dt_max)
    prev_ratio = 1.0
    walls_on = not m.wall.disabled

    for tb in times[1:]:
        while True:
            gap = tb - t
            if gap <= 4e-16 * max(1.0, abs(tb)):
                break  # residual float gap; snap to the boundary
            h = min(dt_prop, gap, c.dt_max)
            if walls_on:
                dist = float(np.min(wall_distances(m.geometry, x)))
                cap = c.wall_safety * dist / (float(np.max(np.abs(v))) + 1.0)
                if cap < c.dt_min:
                    raise StiffnessError(f"wall layer forces dt below dt_min at t={t:.6g}")
                h = min(h, cap)
            clamped = h < dt_prop
            try:
                x_new, v_new, err_x, err_v = _attempt(m, x, v, h)
                ratio = _error_ratio(c, x, v, x_new, v_new, err_x, err_v)
            except WallDomainError:
                ratio = None  # stage left the domain: halve and retry
            if ratio is None:
                dt_prop = h / 2.0
            elif ratio > 1.0:
                dt_prop = h * max(0.1, 0.9 * ratio**-0.2)
            else:
                x, v = x_new, v_new
                t = tb if h >= gap * (1.0 - 1e-12) else t + h
                r = max(ratio, 1e-10)
                factor = min(5.0, max(0.2, 0.9 * r**-0.14 * prev_ratio**0.08))
                new_prop = min(h * factor, c.dt_max)
                # a clamp (boundary landing or wall cap) says nothing about
                # accuracy, so it may only grow the standing proposal
                dt_prop = max(dt_prop, new_prop) if clamped else new_prop
                prev_ratio = r
                if t == tb:
                    break
                continue
            if dt_prop < c.dt_min:
                raise StiffnessError(f"step size collapsed below dt_min at t={t:.6g}")
        t = tb
        s = FlockState(t=t, x=x.copy(), v=v.copy())
        states.append(s)
        records.append(diagnostics(m, s, G))

    return Trajectory(sample_times=times, states=states, records=records)


def reference_rk4(
    m: FlockModel,
    s0: FlockState,
    t_end: float,
    dt_fixed: float,
    sample_every: float = 0.1,
) -> Trajectory:
    """Classic fixed-step fourth-order integrator; the cross-check oracle.

    Each inter-sample span is covered by equal substeps of width as close to
    dt_fixed as divides evenly.  Domain violations are fatal here.
    """
    if not t_end > s0.t:
        raise ValueError("t_end must exceed the initial time")
    if not dt_fixed > 0:
        raise ValueError("dt_fixed must be positive")
    m.check_domain(s0.x)

    times = _sample_grid(s0.t, t_end, sample_every)
    G = initial_energy(m, s0)
    states = [s0]
    records = [diagnostics(m, s0, G)]

    x = s0.x.copy()
    v = s0.v.copy()
    for k in range(1, len(times)):
        gap = times[k] - times[k - 1]
        n_sub = max(1, round(gap / dt_fixed))
        h = gap / n_sub
        for _ in range(n_sub):
            kx1 = v
            kv1 = acceleration(m, x, v)
            kx2 = v + 0.5 * h * kv1
            kv2 = acceleration(m, x + 0.5 * h * kx1, v + 0.5 * h * kv1)
            kx3 = v + 0.5 * h * kv2
            kv3 = acceleration(m, x + 0.5 * h * kx2, v + 0.5 * h * kv2)
            kx4 = v + h * kv3
            kv4 = acceleration(m, x + h * kx3, v + h * kv3)
            x = x + (h / 6.0) * (kx1 + 2.0 * kx2 + 2.0 * kx3 + kx4)
            v = v + (h / 6.0) * (kv1 + 2.0 * kv2 + 2.0 * kv3 + kv4)
            check_domain(m.geometry, m.wall, x)
        s = FlockState(t=float(times[k]), x=x.copy(), v=v.copy())
        states.append(s)
        records.append(diagnostics(m, s, G))

    return Trajectory(sample_times=times, states=states, records=records)
