"""Constructive approximations of entire, periodic, steady, and homogeneous
positive solutions, plus the stability experiments that probe uniqueness.

The pullback construction integrates from ever-earlier start times with the
anchor value M/2 (the interior of the invariant box) until successive
pullbacks agree on an anchor window; the periodic construction iterates the
period map u -> u(., T; 0, u) instead of reproducing the fixed-point
existence argument, and reports non-convergence rather than forcing it.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence

import numpy as np

from .coefficients import is_autonomous, is_periodic, temporal_values
from .elliptic import Field
from .envelopes import ScalarSeries, logistic_entire_solution
from .errors import (BlowUpDetected, HypothesisViolated, NoConvergence,
                     NotAutonomousCoefficients, NotPeriodicCoefficients)
from .hypotheses import Params, check_H2, compute_M, require_spatially_homogeneous
from .pde import StepController, integrate


@dataclass
class EntireSolutionApprox:
    """A numerically constructed special solution with its box certificates."""

    kind: str  # pullback | periodic | steady | homogeneous
    anchor_times: np.ndarray
    fields: list[Field]
    residual: float
    floor: float
    ceiling: float
    period: Optional[float] = None
    meta: dict = field(default_factory=dict)

    def at(self, t: float) -> np.ndarray:
        """Linear interpolation between stored snapshots (periodic wrap if set)."""
        ts = self.anchor_times
        if self.period is not None:
            t = self.anchor_times[0] + math.fmod(t - self.anchor_times[0], self.period)
        if t <= ts[0]:
            return self.fields[0].values
        if t >= ts[-1]:
            return self.fields[-1].values
        i = int(np.searchsorted(ts, t)) - 1
        w = (t - ts[i]) / (ts[i + 1] - ts[i])
        return (1.0 - w) * self.fields[i].values + w * self.fields[i + 1].values


def _advance(p: Params, u: Field, t0: float, t1: float, ctrl: StepController) -> Field:
    traj = integrate(p, u, t0, t1, ctrl, stride=10**9)
    if traj.outcome.kind == "blowup":
        raise BlowUpDetected(traj.outcome.t)
    if traj.outcome.kind == "step_failure":
        raise NoConvergence(f"integration failed at t={traj.outcome.t:g}: {traj.outcome.reason}")
    return traj.final().u


def _advance_sampling(p: Params, u: Field, times: Sequence[float],
                      ctrl: StepController) -> list[Field]:
    """March through the given times, returning the field at each of them."""
    out = [u]
    cur = u
    for a, b in zip(times[:-1], times[1:]):
        cur = _advance(p, cur, a, b, ctrl)
        out.append(cur)
    return out


def _require_h2(p: Params) -> None:
    margin = check_H2(p)
    if margin <= 0:
        raise HypothesisViolated(f"global-existence margin must be positive, got {margin:g}")


def _box_stats(fields: Sequence[Field]) -> tuple[float, float]:
    floor = min(f.min() for f in fields)
    ceiling = max(f.max() for f in fields)
    return floor, ceiling


def pullback_entire(p: Params, ctrl: StepController, n_max: int = 64,
                    window: float = 1.0, tol: float = 1e-8,
                    start_value: Optional[float] = None,
                    window_samples: int = 9) -> EntireSolutionApprox:
    """Approximate an entire positive solution by pullback.

    Starts from t = -n with the constant anchor field (default M/2) for
    n = 1, 2, 4, ..., n_max and stops when two successive pullbacks differ
    by less than `tol` in sup norm on the anchor window [0, window].

    Integration is chunked at whole time units with a fixed step so that
    successive pullbacks share their step sequences on common intervals.
    """
    _require_h2(p)
    big_m = compute_M(p)
    anchor = big_m / 2.0 if start_value is None else float(start_value)
    fixed = ctrl.fixed(ctrl.dt_init)
    window_times = np.linspace(0.0, window, window_samples)

    prev: Optional[list[Field]] = None
    diff = float("nan")
    n = 1
    while n <= n_max:
        u = Field.constant(p.grid, anchor)
        for k in range(n, 0, -1):  # unit chunks: -k -> -k+1
            u = _advance(p, u, -float(k), -float(k) + 1.0, fixed)
        fields = _advance_sampling(p, u, window_times, fixed)
        if prev is not None:
            diff = max(float(np.abs(a.values - b.values).max()) for a, b in zip(fields, prev))
            if diff < tol:
                floor, ceiling = _box_stats(fields)
                return EntireSolutionApprox(
                    kind="pullback", anchor_times=window_times, fields=fields,
                    residual=diff, floor=floor, ceiling=ceiling,
                    meta={"n_used": n, "M": big_m, "start_value": anchor})
        prev = fields
        n *= 2
    raise NoConvergence(f"pullback with n_max={n_max}", residual=diff)


def periodic_fixed_point(p: Params, period: float, ctrl: StepController,
                         tol: float = 1e-8, max_iter: int = 500,
                         record_samples: int = 17) -> EntireSolutionApprox:
    """Picard iteration of the period map from the anchor M/2.

    Convergence is expected only in stable regimes; the final residual is
    reported either way.
    """
    if not is_periodic(p.triple, period, p.grid):
        raise NotPeriodicCoefficients(f"coefficients are not {period:g}-periodic")
    _require_h2(p)
    big_m = compute_M(p)
    # fixed step subdividing the period keeps the map deterministic
    dt = period / math.ceil(period / ctrl.dt_max)
    fixed = ctrl.fixed(dt)

    u = Field.constant(p.grid, big_m / 2.0)
    residual = float("inf")
    for it in range(1, max_iter + 1):
        u_next = _advance(p, u, 0.0, period, fixed)
        residual = float(np.abs(u_next.values - u.values).max())
        u = u_next
        if residual < tol:
            break
    else:
        raise NoConvergence(f"period map after {max_iter} iterations", residual=residual)

    times = np.linspace(0.0, period, record_samples)
    fields = _advance_sampling(p, u, times, fixed)
    floor, ceiling = _box_stats(fields)
    return EntireSolutionApprox(
        kind="periodic", anchor_times=times, fields=fields, residual=residual,
        floor=floor, ceiling=ceiling, period=period,
        meta={"iterations": it, "M": big_m})


def steady_state(p: Params, ctrl: StepController, tol: float = 1e-9,
                 max_time: float = 2000.0, chunk: float = 1.0) -> EntireSolutionApprox:
    """Pseudo-time marching to a stationary profile."""
    if not is_autonomous(p.triple, p.grid):
        raise NotAutonomousCoefficients("coefficients depend on t")
    _require_h2(p)
    big_m = compute_M(p)
    u = Field.constant(p.grid, big_m / 2.0)
    t = 0.0
    residual = float("inf")
    while t < max_time:
        u_next = _advance(p, u, t, t + chunk, ctrl)
        residual = float(np.abs(u_next.values - u.values).max())
        u = u_next
        t += chunk
        if residual < tol:
            floor, ceiling = _box_stats([u])
            return EntireSolutionApprox(
                kind="steady", anchor_times=np.array([0.0]), fields=[u],
                residual=residual, floor=floor, ceiling=ceiling,
                meta={"march_time": t, "M": big_m})
    raise NoConvergence(f"pseudo-time marching after t={max_time:g}", residual=residual)


def homogeneous_entire(p: Params, t_range: tuple[float, float]) -> ScalarSeries:
    """Entire spatially homogeneous solution via the reduced logistic equation.

    With spatially constant coefficients the first equation collapses to
    u' = u [a0(t) - (a1(t) + |Omega| a2(t)) u], and v*(t) = u*(t).
    """
    require_spatially_homogeneous(p)
    w = p.omega_measure
    a_fn = lambda ts: temporal_values(p.triple.a0, ts)  # noqa: E731
    b_fn = lambda ts: temporal_values(p.triple.a1, ts) + w * temporal_values(p.triple.a2, ts)  # noqa: E731
    ts = np.linspace(p.horizon.t_lo, p.horizon.t_hi, 2048)
    b_inf = float(b_fn(ts).min())
    if not b_inf > 0:
        raise HypothesisViolated(f"inf_t (a1(t) + |Omega| a2(t)) = {b_inf:g} must be positive")
    return logistic_entire_solution(a_fn, b_fn, p.horizon, t_range)


@dataclass
class StabilityReport:
    times: np.ndarray
    distances: np.ndarray       # (n_initials, n_times)
    fitted_rates: np.ndarray
    final_distances: np.ndarray
    success: bool
    threshold: float

    def csv_header(self) -> list[str]:
        return ["t"] + [f"distance_{i}" for i in range(self.distances.shape[0])]

    def csv_rows(self) -> list[list]:
        rows: list[list] = [[t] + list(self.distances[:, j]) for j, t in enumerate(self.times)]
        rows.append(["fitted_rate"] + list(self.fitted_rates))
        return rows


def fit_decay_rate(ts: np.ndarray, ds: np.ndarray) -> float:
    """Exponential decay rate over the tail of a distance series.

    Least-squares slope of log d against t over the second half of the
    samples with d above round-off; NaN when too few usable points.
    """
    n = ts.size
    mask = ds > 1e-15
    mask[: n // 2] = False
    if mask.sum() < 3:
        return float("nan")
    slope = np.polyfit(ts[mask], np.log(ds[mask]), 1)[0]
    return float(-slope)


def stability_experiment(p: Params, initials: Sequence[Field], t_end: float,
                         ctrl: StepController,
                         reference: Callable[[float], np.ndarray],
                         t0: float = 0.0, n_snapshots: int = 81,
                         threshold: float = 1e-3) -> StabilityReport:
    """Integrate each initial field and track sup-norm distance to a reference.

    `reference(t)` returns the reference solution at time t, either as a
    grid-shaped array or a scalar (spatially homogeneous reference).
    Success means every final distance is below `threshold`.
    """
    times = np.linspace(t0, t_end, n_snapshots)
    all_d = []
    rates = []
    for u0 in initials:
        fields = _advance_sampling(p, u0, times, ctrl)
        ds = np.array([float(np.abs(f.values - np.asarray(reference(t))).max())
                       for f, t in zip(fields, times)])
        all_d.append(ds)
        rates.append(fit_decay_rate(times, ds))
    distances = np.vstack(all_d)
    final = distances[:, -1]
    return StabilityReport(times=times, distances=distances,
                           fitted_rates=np.array(rates), final_distances=final,
                           success=bool((final < threshold).all()), threshold=threshold)
