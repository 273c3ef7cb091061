"""IMEX time integration of the chemotaxis system.

One step treats diffusion implicitly through the cosine-transform solve of
(I - dt*Laplacian_h) and everything else explicitly: the chemotaxis flux
divergence in conservative face form (so it adds exactly zero total mass)
and the local/nonlocal logistic reaction evaluated at the step's start
time.  After every accepted step the chemoattractant is refreshed from the
quasi-static elliptic equation.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from typing import Optional

import numpy as np

from .coefficients import GridEvaluator
from .elliptic import Field, Grid, operator_for
from .errors import InvalidInitial, NonFiniteInput, StepRejected, ValidationError
from .hypotheses import Params, evaluator_for


@dataclass(frozen=True)
class StepController:
    """Adaptive step policy: halve on rejection, double after 20 accepts."""

    dt_init: float = 1e-3
    dt_min: float = 1e-8
    dt_max: float = 2e-2
    safety: float = 1.0
    growth_cap: float = 2.0
    negativity_tol: float = 1e-10
    blowup_factor: float = 1e6
    blowup_threshold: Optional[float] = None
    upwind: bool = False

    def __post_init__(self):
        if not (0 < self.dt_min <= self.dt_init <= self.dt_max):
            raise ValidationError("controller", "need 0 < dt_min <= dt_init <= dt_max")
        if not 0 < self.safety <= 1:
            raise ValidationError("safety", "must lie in (0, 1]")
        if not self.growth_cap > 1:
            raise ValidationError("growth_cap", "must exceed 1")
        if self.negativity_tol <= 0:
            raise ValidationError("negativity_tol", "must be positive")

    def fixed(self, dt: float) -> "StepController":
        """Variant that always steps with the same dt (forces identical sequences)."""
        return replace(self, dt_init=dt, dt_min=dt, dt_max=dt)

    def threshold_for(self, u0: Field) -> float:
        if self.blowup_threshold is not None:
            return self.blowup_threshold
        return self.blowup_factor * max(1.0, u0.max())


@dataclass
class SimState:
    """Snapshot of the coupled pair; v is always the elliptic solve of u."""

    t: float
    u: Field
    v: Field
    mass: float
    u_min: float
    u_max: float
    v_min: float
    v_max: float

    @classmethod
    def from_u(cls, t: float, u: Field) -> "SimState":
        v = Field(u.grid, operator_for(u.grid).solve_shifted(u.values, 1.0))
        return cls(t=t, u=u, v=v, mass=quadrature(u),
                   u_min=u.min(), u_max=u.max(), v_min=v.min(), v_max=v.max())


@dataclass(frozen=True)
class Outcome:
    kind: str  # completed | blowup | step_failure
    t: float = float("nan")
    reason: str = ""

    @property
    def completed(self) -> bool:
        return self.kind == "completed"


@dataclass
class Trajectory:
    times: list[float]
    states: list[SimState]
    dts: list[float]
    outcome: Outcome
    blowup_threshold: float

    def final(self) -> SimState:
        return self.states[-1]

    def csv_header(self) -> list[str]:
        return ["t", "mass", "u_min", "u_max", "v_min", "v_max", "dt_accepted"]

    def csv_rows(self) -> list[list[float]]:
        return [[s.t, s.mass, s.u_min, s.u_max, s.v_min, s.v_max, dt]
                for s, dt in zip(self.states, self.dts)]


def quadrature(u: Field) -> float:
    """Midpoint rule; exact for grid-constant fields."""
    if not np.all(np.isfinite(u.values)):
        raise NonFiniteInput("quadrature input contains non-finite entries")
    return float(u.grid.cell_volume * u.values.sum())


def chemotaxis_divergence(u: np.ndarray, v: np.ndarray, grid: Grid,
                          chi: float, upwind: bool) -> np.ndarray:
    """div(u grad v) with zero normal flux at the walls.

    Face flux u_f * dv/dn with arithmetic-mean face values (or first-order
    upwind against the drift velocity chi*grad v); the divergence of these
    fluxes telescopes, so the total over the grid vanishes identically.
    """
    total = np.zeros_like(u)
    for axis in range(grid.dim):
        h = grid.spacing[axis]
        uu = np.moveaxis(u, axis, 0)
        vv = np.moveaxis(v, axis, 0)
        dv = (vv[1:] - vv[:-1]) / h  # interior faces only
        if upwind:
            take_lower = (chi * dv) >= 0.0
            uf = np.where(take_lower, uu[:-1], uu[1:])
        else:
            uf = 0.5 * (uu[:-1] + uu[1:])
        flux = uf * dv
        div = np.zeros_like(uu)
        div[:-1] += flux / h
        div[1:] -= flux / h
        total += np.moveaxis(div, 0, axis)
    return total


def _explicit_rhs(state: SimState, p: Params, ev: GridEvaluator, upwind: bool) -> np.ndarray:
    u = state.u.values
    a0 = ev.field(0, state.t)
    a1 = ev.field(1, state.t)
    a2 = ev.field(2, state.t)
    reaction = u * (a0 - a1 * u - a2 * state.mass)
    if p.chi == 0.0:
        return reaction
    div = chemotaxis_divergence(u, state.v.values, p.grid, p.chi, upwind)
    return reaction - p.chi * div


def step(state: SimState, p: Params, dt: float, ctrl: StepController,
         ev: Optional[GridEvaluator] = None) -> SimState:
    """One IMEX Euler step; raises StepRejected on guard violations.

    No positivity clipping: an undershoot beyond tolerance rejects the step
    so that mass accounting is never silently broken.
    """
    if ev is None:
        ev = evaluator_for(p)
    rhs = _explicit_rhs(state, p, ev, ctrl.upwind)
    u_star = state.u.values + dt * rhs
    op = operator_for(p.grid)
    u_new = op.solve_shifted(u_star, dt)

    if not np.all(np.isfinite(u_new)):
        raise StepRejected("non-finite trial state")
    new_max = float(u_new.max())
    if state.u_max > 0.0 and new_max > ctrl.growth_cap * state.u_max:
        raise StepRejected(f"sup-norm growth {new_max / state.u_max:.3g} exceeds cap")
    new_min = float(u_new.min())
    if new_min < -ctrl.negativity_tol * max(1.0, new_max):
        raise StepRejected(f"negative undershoot {new_min:.3g}")

    u_field = Field(p.grid, u_new)
    v_new = op.solve_shifted(u_new, 1.0)
    v_field = Field(p.grid, v_new)
    return SimState(t=state.t + dt, u=u_field, v=v_field, mass=quadrature(u_field),
                    u_min=new_min, u_max=new_max,
                    v_min=float(v_new.min()), v_max=float(v_new.max()))


def integrate(p: Params, u0: Field, t0: float, t_end: float, ctrl: StepController,
              stride: int = 10) -> Trajectory:
    """March the system from t0 to t_end recording every `stride` accepted steps."""
    if t_end <= t0:
        raise ValidationError("t_end", "must exceed t0")
    vals = u0.values
    if vals.min() < -1e-14:
        raise InvalidInitial(f"u0 has negative entries down to {vals.min():.3g}")
    if not np.all(np.isfinite(vals)):
        raise InvalidInitial("u0 contains non-finite entries")
    u0 = Field(u0.grid, np.maximum(vals, 0.0))

    threshold = ctrl.threshold_for(u0)
    state = SimState.from_u(t0, u0)
    times, states, dts = [state.t], [state], [0.0]
    if state.u_max >= threshold:
        return Trajectory(times, states, dts, Outcome("blowup", t=t0), threshold)

    ev = evaluator_for(p)
    dt = min(max(ctrl.dt_init, ctrl.dt_min), ctrl.dt_max)
    accepted = 0
    since_change = 0
    while state.t < t_end - 1e-13 * max(1.0, abs(t_end)):
        dt_eff = min(dt, t_end - state.t)
        try:
            new_state = step(state, p, dt_eff, ctrl, ev)
        except StepRejected as rej:
            if dt <= ctrl.dt_min * (1 + 1e-12):
                outcome = Outcome("step_failure", t=state.t, reason=rej.reason)
                if times[-1] != state.t:
                    times.append(state.t)
                    states.append(state)
                    dts.append(dt_eff)
                return Trajectory(times, states, dts, outcome, threshold)
            dt = max(dt / 2.0, ctrl.dt_min)
            since_change = 0
            continue
        state = new_state
        accepted += 1
        since_change += 1
        record = (accepted % stride == 0)
        if state.u_max >= threshold or not math.isfinite(state.u_max):
            times.append(state.t)
            states.append(state)
            dts.append(dt_eff)
            return Trajectory(times, states, dts, Outcome("blowup", t=state.t), threshold)
        if record:
            times.append(state.t)
            states.append(state)
            dts.append(dt_eff)
        if since_change >= 20:
            dt = min(2.0 * ctrl.safety * dt, ctrl.dt_max)
            since_change = 0
    if times[-1] != state.t:
        times.append(state.t)
        states.append(state)
        dts.append(dt)
    return Trajectory(times, states, dts, Outcome("completed"), threshold)


def detect_blowup(traj: Trajectory) -> Optional[float]:
    """First snapshot time at or past the threshold (or with non-finite data)."""
    for t, s in zip(traj.times, traj.states):
        if s.u_max >= traj.blowup_threshold or not math.isfinite(s.u_max):
            return t
    return None
