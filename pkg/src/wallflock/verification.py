"""Machine-checkable verdicts for the flocking limit theorems.

Infinite-time statements are checked through finite-horizon surrogates: tail
windows for settlement, least-squares rates for exponential decay, and
trajectory-wide budget inequalities with explicit tolerances.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

import numpy as np

from .dynamics import FlockModel, FlockState
from .integrator import IntegratorControl, StiffnessError, Trajectory, integrate
from .observables import record_series
from .potentials import Geometry, WallDomainError, WallPotential

_EPS = float(np.finfo(float).eps)


@dataclass(frozen=True)
class Thresholds:
    align_eps: float = 1e-2
    settle_eps: float = 1e-2
    tail_fraction: float = 0.25
    fit_min_points: int = 10
    budget_tol: float = 1e-3

    def __post_init__(self):
        for name in ("align_eps", "settle_eps", "budget_tol"):
            if not getattr(self, name) > 0:
                raise ValueError(f"{name} must be positive")
        if not (0.0 < self.tail_fraction < 1.0):
            raise ValueError("tail_fraction must lie in (0, 1)")
        if self.fit_min_points < 10:
            raise ValueError("fit_min_points must be at least 10")


@dataclass
class FitResult:
    C: float
    delta: float
    r_squared: float
    window: tuple


@dataclass
class Claim:
    name: str
    passed: bool
    value: float
    threshold: float
    applicable: bool = True
    detail: str = ""


@dataclass
class SettlementResult:
    passed: bool
    settled_positions: np.ndarray
    pairwise_limits: np.ndarray
    drift: bool
    max_variation: float
    max_pair_variation: float
    min_mean_position: float


@dataclass
class IntervalDecayResult:
    passed: bool
    kinetic_integral: float
    force_sq_integral: float
    final_K: float
    final_F_max: float
    kinetic_tail_share: float
    force_tail_share: float


@dataclass
class TheoremReport:
    variant: str
    claims: list
    min_wall_distance: float = math.nan
    final_A: float = math.nan
    final_D: float = math.nan
    fit: FitResult | None = None
    settled_positions: np.ndarray | None = None
    pairwise_limits: np.ndarray | None = None
    escape_time: float | None = None
    kinetic_integral: float = math.nan
    force_sq_integral: float = math.nan

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.claims if c.applicable)

    def claim(self, name: str) -> Claim:
        for c in self.claims:
            if c.name == name:
                return c
        raise KeyError(name)

    def to_dict(self) -> dict:
        def clean(obj):
            if isinstance(obj, np.ndarray):
                return obj.tolist()
            if isinstance(obj, (np.floating, np.integer)):
                return obj.item()
            return obj

        return {
            "variant": self.variant,
            "passed": self.passed,
            "claims": [
                {
                    "name": c.name,
                    "passed": bool(c.passed),
                    "value": clean(c.value),
                    "threshold": clean(c.threshold),
                    "applicable": bool(c.applicable),
                    "detail": c.detail,
                }
                for c in self.claims
            ],
            "min_wall_distance": clean(self.min_wall_distance),
            "final_A": clean(self.final_A),
            "final_D": clean(self.final_D),
            "fit": None
            if self.fit is None
            else {
                "C": clean(self.fit.C),
                "delta": clean(self.fit.delta),
                "r_squared": clean(self.fit.r_squared),
                "window": [clean(w) for w in self.fit.window],
            },
            "settled_positions": clean(self.settled_positions),
            "pairwise_limits": clean(self.pairwise_limits),
            "escape_time": clean(self.escape_time),
            "kinetic_integral": clean(self.kinetic_integral),
            "force_sq_integral": clean(self.force_sq_integral),
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True) + "\n"


def _tail_start_index(times: np.ndarray, tail_fraction: float) -> int:
    t_cut = times[0] + (1.0 - tail_fraction) * (times[-1] - times[0])
    idx = int(np.searchsorted(times, t_cut - 1e-12))
    return min(idx, len(times) - 2)


def check_no_collision(traj: Trajectory, geom: Geometry):
    """A completed trajectory plus a positive wall-distance infimum."""
    min_dist = float(np.min(record_series(traj.records, "x_min_wall")))
    return min_dist > 0.0, min_dist


def check_alignment(traj: Trajectory, th: Thresholds):
    times = np.asarray(traj.sample_times)
    A = record_series(traj.records, "A")
    final_A = float(A[-1])
    tail_max = float(np.max(A[_tail_start_index(times, th.tail_fraction):]))
    # the tail guard rejects a lucky dip sampled at the final instant
    return final_A < th.align_eps and tail_max < 2.0 * th.align_eps, final_A


def fit_exponential(traj: Trajectory, th: Thresholds, window_start: float | None = None):
    """Least-squares line on (t, log A) over the tail window.

    Samples with A below 100x machine epsilon sit in the round-off floor and
    are skipped.  Returns None when fewer than fit_min_points remain.
    """
    times = np.asarray(traj.sample_times, dtype=float)
    A = record_series(traj.records, "A")
    if window_start is None:
        window_start = times[_tail_start_index(times, th.tail_fraction)]
    mask = (times >= window_start - 1e-12) & (A >= 100.0 * _EPS)
    if int(mask.sum()) < th.fit_min_points:
        return None
    tt = times[mask]
    la = np.log(A[mask])
    slope, intercept = np.polyfit(tt, la, 1)
    fitted = slope * tt + intercept
    ss_res = float(np.sum((la - fitted) ** 2))
    ss_tot = float(np.sum((la - np.mean(la)) ** 2))
    if ss_tot == 0.0:
        r2 = 1.0 if ss_res <= 1e-28 else 0.0
    else:
        r2 = 1.0 - ss_res / ss_tot
    return FitResult(
        C=float(np.exp(intercept)),
        delta=float(-slope),
        r_squared=r2,
        window=(float(tt[0]), float(tt[-1])),
    )


def detect_escape(traj: Trajectory, geom: Geometry, wall: WallPotential):
    """Earliest sample time after which every agent stays at distance >= ell."""
    if geom.variant != "halfline":
        raise ValueError("escape detection applies to the half-line only")
    min_x = np.array([float(np.min(s.x)) for s in traj.states])
    outside = min_x >= wall.ell
    if not outside[-1]:
        return None
    inside = np.nonzero(~outside)[0]
    k0 = 0 if inside.size == 0 else int(inside[-1]) + 1
    return float(traj.sample_times[k0])


def check_settlement(traj: Trajectory, wall: WallPotential, th: Thresholds) -> SettlementResult:
    """Tail-window position convergence, absolute and pairwise.

    Absolute settlement asks every agent to stop moving and rest at wall
    distance >= ell - settle_eps.  A flock that aligned to a nonzero drift
    velocity cannot satisfy that; it is reported as drift mode, where only
    the pairwise (shape) convergence is meaningful.
    """
    times = np.asarray(traj.sample_times)
    k0 = _tail_start_index(times, th.tail_fraction)
    X = np.stack([s.x for s in traj.states[k0:]])  # (window, N)
    means = X.mean(axis=0)
    variation = X.max(axis=0) - X.min(axis=0)
    diffs = X[:, :, None] - X[:, None, :]
    pair_variation = diffs.max(axis=0) - diffs.min(axis=0)
    pairwise_limits = diffs.mean(axis=0)
    drift = abs(traj.records[-1].p) >= th.settle_eps
    passed = bool(
        np.all(variation < th.settle_eps) and np.all(means >= wall.ell - th.settle_eps)
    )
    return SettlementResult(
        passed=passed,
        settled_positions=means,
        pairwise_limits=pairwise_limits,
        drift=bool(drift),
        max_variation=float(np.max(variation)),
        max_pair_variation=float(np.max(pair_variation)),
        min_mean_position=float(np.min(means)),
    )


def _cumulative_trapezoid(y: np.ndarray, t: np.ndarray) -> np.ndarray:
    out = np.zeros_like(y)
    out[1:] = np.cumsum(0.5 * (y[1:] + y[:-1]) * np.diff(t))
    return out


def _cumulative_simpson(y: np.ndarray, h: float) -> np.ndarray:
    """Cumulative integral on a uniform grid, fourth-order at every prefix.

    Even prefixes use composite Simpson; odd ones close with a 3/8 block so
    no prefix falls back to a low-order rule (except the very first, where a
    trapezoid is exact to leading order since the run starts quiescent).
    """
    n = y.size
    out = np.zeros(n)
    if n > 1:
        out[1] = 0.5 * h * (y[0] + y[1])
    for k in range(2, n):
        if k % 2 == 0:
            out[k] = out[k - 2] + h * (y[k - 2] + 4.0 * y[k - 1] + y[k]) / 3.0
        else:
            out[k] = out[k - 3] + 3.0 * h * (y[k - 3] + 3.0 * y[k - 2] + 3.0 * y[k - 1] + y[k]) / 8.0
    return out


def _force_squares(m: FlockModel, traj: Trajectory) -> np.ndarray:
    return np.array([float(np.sum(np.atleast_1d(m.force(s.x)) ** 2)) for s in traj.states])


def check_interval_decay(m: FlockModel, traj: Trajectory, th: Thresholds) -> IntervalDecayResult:
    """Kinetic energy and wall forces must decay with leveled time integrals."""
    if m.geometry.variant != "interval":
        raise ValueError("interval decay check requires interval geometry")
    times = np.asarray(traj.sample_times, dtype=float)
    K = record_series(traj.records, "K")
    F2 = _force_squares(m, traj)

    def tail_share(series):
        total = float(np.trapezoid(series, times))
        mid = int(np.searchsorted(times, 0.5 * (times[0] + times[-1])))
        last = float(np.trapezoid(series[mid:], times[mid:]))
        return total, (0.0 if total == 0.0 else last / total)

    k_total, k_share = tail_share(K)
    f_total, f_share = tail_share(F2)
    final_K = float(K[-1])
    final_F = float(traj.records[-1].F_max)
    passed = bool(
        final_K < th.align_eps**2
        and final_F < th.align_eps
        and k_share <= 0.10
        and f_share <= 0.10
    )
    return IntervalDecayResult(
        passed=passed,
        kinetic_integral=k_total,
        force_sq_integral=f_total,
        final_K=final_K,
        final_F_max=final_F,
        kinetic_tail_share=k_share,
        force_tail_share=f_share,
    )


def check_work_of_force(m: FlockModel, traj: Trajectory):
    """|W| against its per-sample Cauchy-Schwarz envelope sqrt(2K) * N * F_max."""
    K = record_series(traj.records, "K")
    W = record_series(traj.records, "W")
    F_max = record_series(traj.records, "F_max")
    n = traj.states[0].n
    envelope = np.sqrt(2.0 * K) * n * F_max
    ok = bool(np.all(np.abs(W) <= envelope + 1e-12 * np.maximum(1.0, envelope)))
    return ok, float(np.max(np.abs(W)))


def budget_claims(m: FlockModel, traj: Trajectory, th: Thresholds) -> list:
    """Trajectory-wide inequality checks shared by both geometries."""
    times = np.asarray(traj.sample_times, dtype=float)
    rec = traj.records
    E = record_series(rec, "E")
    L = record_series(rec, "L")
    p = record_series(rec, "p")
    D = record_series(rec, "D")
    F_max = record_series(rec, "F_max")
    F_mean = record_series(rec, "F_mean")
    v_hi = np.maximum(np.abs(record_series(rec, "v_max")), np.abs(record_series(rec, "v_min")))
    G = rec[0].G
    n = traj.states[0].n
    claims = []

    tol_E = 1e-9 * max(1.0, abs(E[0]))
    worst_rise = float(np.max(E[1:] - E[:-1])) if len(E) > 1 else 0.0
    claims.append(Claim("energy_nonincreasing", worst_rise <= tol_E, worst_rise, tol_E))

    v_bound = math.sqrt(max(2.0 * n * G, 0.0)) + 1e-9
    v_peak = float(np.max(v_hi))
    claims.append(Claim("velocity_bound", v_peak <= v_bound, v_peak, v_bound))

    d_budget = 2.0 * math.sqrt(max(2.0 * n * G, 0.0)) * (times - times[0]) + D[0] + 1e-9
    d_excess = float(np.max(D - d_budget))
    claims.append(Claim("diameter_growth", d_excess <= 0.0, d_excess, 0.0))

    lyap_budget = L[0] + _cumulative_trapezoid(F_max, times) + th.budget_tol * max(1.0, abs(L[0]))
    l_excess = float(np.max(L - lyap_budget))
    claims.append(Claim("lyapunov_budget", l_excess <= 0.0, l_excess, 0.0))

    h = float(times[1] - times[0]) if len(times) > 1 else 0.0
    uniform = len(times) > 2 and np.allclose(np.diff(times), h, rtol=1e-9, atol=1e-12)
    impulse = _cumulative_simpson(F_mean, h) if uniform else _cumulative_trapezoid(F_mean, times)
    p_tol = 1e-4 * max(1.0, abs(p[0]) + 1.0)
    p_err = float(np.max(np.abs(p - p[0] - impulse)))
    claims.append(Claim("momentum_force_identity", p_err <= p_tol, p_err, p_tol))

    if m.geometry.variant == "halfline":
        worst_drop = float(np.max(p[:-1] - p[1:])) if len(p) > 1 else 0.0
        claims.append(Claim("momentum_nondecreasing", worst_drop <= 1e-9, worst_drop, 1e-9))

    return claims


def _failure_report(variant: str, exc: Exception) -> TheoremReport:
    claim = Claim(
        "integration_completed", False, math.nan, 0.0, detail=f"{type(exc).__name__}: {exc}"
    )
    return TheoremReport(variant=variant, claims=[claim])


def verify_halfline(
    m: FlockModel,
    s0: FlockState,
    control: IntegratorControl | None = None,
    th: Thresholds | None = None,
    t_end: float = 200.0,
    sample_every: float = 0.1,
) -> TheoremReport:
    """Run the half-line scenario and check every claimed limit behavior.

    The exponential-rate claim applies only when the initial momentum is
    positive (the escaping regime); absolute settlement only when the flock
    is not in drift mode.
    """
    th = th or Thresholds()
    try:
        traj = integrate(m, s0, t_end, control, sample_every)
    except (StiffnessError, WallDomainError, FloatingPointError) as exc:
        return _failure_report("halfline", exc)

    times = np.asarray(traj.sample_times, dtype=float)
    claims = [Claim("integration_completed", True, times[-1], times[-1])]

    ok, min_dist = check_no_collision(traj, m.geometry)
    claims.append(Claim("no_wall_collision", ok, min_dist, 0.0))

    ok, final_A = check_alignment(traj, th)
    claims.append(Claim("velocity_alignment", ok, final_A, th.align_eps))

    escape = detect_escape(traj, m.geometry, m.wall)
    settle = check_settlement(traj, m.wall, th)

    claims.append(
        Claim(
            "strong_flocking",
            settle.max_pair_variation < th.settle_eps,
            settle.max_pair_variation,
            th.settle_eps,
        )
    )
    claims.append(
        Claim(
            "positions_settle",
            settle.passed,
            settle.max_variation,
            th.settle_eps,
            applicable=not settle.drift,
            detail="drift mode: flock translates at its aligned velocity" if settle.drift else "",
        )
    )
    outside = escape is not None or settle.min_mean_position >= m.wall.ell - th.settle_eps
    claims.append(
        Claim(
            "outside_wall_range",
            outside,
            settle.min_mean_position if escape is None else float(escape),
            m.wall.ell,
            detail="escape time" if escape is not None else "tail-window mean position",
        )
    )

    p0 = traj.records[0].p
    fit = fit_exponential(traj, th, window_start=escape)
    rate_ok = fit is not None and fit.delta > 0.0 and fit.r_squared > 0.99
    claims.append(
        Claim(
            "exponential_rate",
            rate_ok,
            math.nan if fit is None else fit.delta,
            0.0,
            applicable=p0 > 0.0,
            detail="" if fit is not None else "fit unavailable",
        )
    )

    claims.extend(budget_claims(m, traj, th))

    K = record_series(traj.records, "K")
    return TheoremReport(
        variant="halfline",
        claims=claims,
        min_wall_distance=min_dist,
        final_A=final_A,
        final_D=float(traj.records[-1].D),
        fit=fit,
        settled_positions=settle.settled_positions,
        pairwise_limits=settle.pairwise_limits,
        escape_time=escape,
        kinetic_integral=float(np.trapezoid(K, times)),
        force_sq_integral=float(np.trapezoid(_force_squares(m, traj), times)),
    )


def verify_interval(
    m: FlockModel,
    s0: FlockState,
    control: IntegratorControl | None = None,
    th: Thresholds | None = None,
    t_end: float = 400.0,
    sample_every: float = 0.1,
) -> TheoremReport:
    """Run the interval scenario and check decay of energy and wall forces.

    The flock diameter is reported without a verdict: boundedness of the
    asymptotic shape carries no claim in this geometry.
    """
    th = th or Thresholds()
    try:
        traj = integrate(m, s0, t_end, control, sample_every)
    except (StiffnessError, WallDomainError, FloatingPointError) as exc:
        return _failure_report("interval", exc)

    times = np.asarray(traj.sample_times, dtype=float)
    claims = [Claim("integration_completed", True, times[-1], times[-1])]

    ok, min_dist = check_no_collision(traj, m.geometry)
    claims.append(Claim("no_wall_collision", ok, min_dist, 0.0))

    ok, final_A = check_alignment(traj, th)
    claims.append(Claim("velocity_alignment", ok, final_A, th.align_eps))

    decay = check_interval_decay(m, traj, th)
    claims.append(
        Claim(
            "kinetic_decay",
            decay.final_K < th.align_eps**2 and decay.kinetic_tail_share <= 0.10,
            decay.final_K,
            th.align_eps**2,
            detail=f"tail share {decay.kinetic_tail_share:.3g}",
        )
    )
    claims.append(
        Claim(
            "force_decay",
            decay.final_F_max < th.align_eps and decay.force_tail_share <= 0.10,
            decay.final_F_max,
            th.align_eps,
            detail=f"tail share {decay.force_tail_share:.3g}",
        )
    )

    ok, w_peak = check_work_of_force(m, traj)
    K = record_series(traj.records, "K")
    F_max = record_series(traj.records, "F_max")
    envelope = float(np.max(np.sqrt(2.0 * K) * s0.n * F_max)) if len(K) else 0.0
    claims.append(Claim("work_of_force_bounded", ok, w_peak, envelope))

    claims.extend(budget_claims(m, traj, th))

    return TheoremReport(
        variant="interval",
        claims=claims,
        min_wall_distance=min_dist,
        final_A=final_A,
        final_D=float(traj.records[-1].D),
        kinetic_integral=decay.kinetic_integral,
        force_sq_integral=decay.force_sq_integral,
    )
