"""Scalar and planar comparison ODEs: logistic, Lotka-Volterra, envelopes.

All integrations use the classic fixed-step fourth-order scheme with
dt = min(1e-3, span/1e5); the coefficient time series needed at the stage
times are precomputed in bulk, so the stepping loop is plain float
arithmetic.  Fixed steps keep oracle outputs bit-stable across runs.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from .errors import (HypothesisViolated, NoConvergence, OrderViolation,
                     ValidationError)
from .hypotheses import Params, evaluator_for, neg, pos


@dataclass(frozen=True)
class EnvelopeState:
    t: float
    u_bar: float
    u_under: float


@dataclass
class EnvelopeSeries:
    ts: np.ndarray
    u_bar: np.ndarray
    u_under: np.ndarray

    def at(self, t) -> tuple[np.ndarray, np.ndarray]:
        return np.interp(t, self.ts, self.u_bar), np.interp(t, self.ts, self.u_under)

    def csv_header(self) -> list[str]:
        return ["t", "u_bar", "u_under"]

    def csv_rows(self) -> list[list[float]]:
        return [[t, ub, uu] for t, ub, uu in zip(self.ts, self.u_bar, self.u_under)]


@dataclass
class ScalarSeries:
    ts: np.ndarray
    u: np.ndarray

    def at(self, t) -> np.ndarray:
        return np.interp(t, self.ts, self.u)

    def csv_header(self) -> list[str]:
        return ["t", "u_star"]

    def csv_rows(self) -> list[list[float]]:
        return [[t, u] for t, u in zip(self.ts, self.u)]


def _step_size(span: float) -> float:
    return min(1e-3, span / 1e5)


def _plan(t0: float, t_end: float) -> tuple[int, float]:
    span = t_end - t0
    if span <= 0:
        raise ValidationError("t_end", "must exceed t0")
    h = _step_size(span)
    n = max(1, int(math.ceil(span / h)))
    return n, span / n


def envelope_rhs(s: EnvelopeState, p: Params) -> tuple[float, float]:
    """Right-hand sides of the planar comparison system at one state."""
    ev = evaluator_for(p)
    t = np.array([s.t])
    a0_inf, a0_sup = (x[0] for x in ev.extrema_series(0, t))
    a1_inf, a1_sup = (x[0] for x in ev.extrema_series(1, t))
    a2_inf, a2_sup = (x[0] for x in ev.extrema_series(2, t))
    return _envelope_rhs_values(
        s.u_bar, s.u_under, pos(p.chi), p.omega_measure,
        a0_sup, a0_inf, a1_inf, a1_sup,
        pos(a2_inf), neg(a2_inf), pos(a2_sup), neg(a2_sup))


def _envelope_rhs_values(ub, uu, chip, w, a0s, a0i, a1i, a1s, a2i_p, a2i_n, a2s_p, a2s_n):
    dbar = chip * ub * (ub - uu) + ub * (a0s - a1i * ub - w * a2i_p * uu + w * a2i_n * ub)
    dund = chip * uu * (uu - ub) + uu * (a0i - a1s * uu - w * a2s_p * ub + w * a2s_n * uu)
    return dbar, dund


def _envelope_stage_series(p: Params, t0: float, h: float, n: int):
    ts = t0 + (h / 2.0) * np.arange(2 * n + 1)
    ev = evaluator_for(p)
    a0_inf, a0_sup = ev.extrema_series(0, ts)
    a1_inf, a1_sup = ev.extrema_series(1, ts)
    a2_inf, a2_sup = ev.extrema_series(2, ts)
    return (a0_sup.tolist(), a0_inf.tolist(), a1_inf.tolist(), a1_sup.tolist(),
            pos(a2_inf).tolist(), neg(a2_inf).tolist(),
            pos(a2_sup).tolist(), neg(a2_sup).tolist())


def integrate_envelope(p: Params, u_bar0: float, u_under0: float,
                       t0: float, t_end: float,
                       record_cap: int = 5001) -> EnvelopeSeries:
    """Integrate the comparison pair started from (max u0, min u0).

    Raises OrderViolation if the lower component overtakes the upper beyond
    1e-9, which signals a hypothesis violation or too large a step.
    """
    if not (u_bar0 >= u_under0 >= 0.0):
        raise ValidationError("envelope", "need u_bar0 >= u_under0 >= 0")
    n, h = _plan(t0, t_end)
    a0s, a0i, a1i, a1s, a2ip, a2in, a2sp, a2sn = _envelope_stage_series(p, t0, h, n)
    chip = pos(p.chi)
    w = p.omega_measure

    stride = max(1, n // (record_cap - 1))
    ts_out = [t0]
    ub_out = [u_bar0]
    uu_out = [u_under0]
    ub, uu = float(u_bar0), float(u_under0)
    h2, h6 = h / 2.0, h / 6.0
    for k in range(n):
        i0, im, i1 = 2 * k, 2 * k + 1, 2 * k + 2
        kb1, ku1 = _envelope_rhs_values(ub, uu, chip, w, a0s[i0], a0i[i0], a1i[i0], a1s[i0],
                                        a2ip[i0], a2in[i0], a2sp[i0], a2sn[i0])
        kb2, ku2 = _envelope_rhs_values(ub + h2 * kb1, uu + h2 * ku1, chip, w,
                                        a0s[im], a0i[im], a1i[im], a1s[im],
                                        a2ip[im], a2in[im], a2sp[im], a2sn[im])
        kb3, ku3 = _envelope_rhs_values(ub + h2 * kb2, uu + h2 * ku2, chip, w,
                                        a0s[im], a0i[im], a1i[im], a1s[im],
                                        a2ip[im], a2in[im], a2sp[im], a2sn[im])
        kb4, ku4 = _envelope_rhs_values(ub + h * kb3, uu + h * ku3, chip, w,
                                        a0s[i1], a0i[i1], a1i[i1], a1s[i1],
                                        a2ip[i1], a2in[i1], a2sp[i1], a2sn[i1])
        ub += h6 * (kb1 + 2.0 * kb2 + 2.0 * kb3 + kb4)
        uu += h6 * (ku1 + 2.0 * ku2 + 2.0 * ku3 + ku4)
        if uu > ub + 1e-9:
            raise OrderViolation(f"u_under {uu:.12g} exceeded u_bar {ub:.12g} at t={t0 + (k + 1) * h:.6g}")
        if (k + 1) % stride == 0 or k == n - 1:
            ts_out.append(t0 + (k + 1) * h)
            ub_out.append(ub)
            uu_out.append(uu)
    return EnvelopeSeries(np.array(ts_out), np.array(ub_out), np.array(uu_out))


def envelope_sup_bound(p: Params, u_bar0: float) -> float:
    """Guaranteed ceiling max{u_bar0, a0_sup / inf_t{a1_inf - |O|(a2_inf)_- - (chi)_+}}."""
    from .hypotheses import sampled_extrema
    s = sampled_extrema(p)
    denom = float((s.inf[1] - p.omega_measure * neg(s.inf[2])).min()) - pos(p.chi)
    if denom <= 0:
        raise HypothesisViolated("envelope bound needs inf_t{a1_inf - |O|(a2_inf)_-} > (chi)_+")
    return max(u_bar0, float(s.sup[0].max()) / denom)


# ---------------------------------------------------------------------------
# nonautonomous logistic equation u' = u (a(t) - b(t) u)

def integrate_logistic(a: Callable, b: Callable, t0: float, u0: float, t_end: float,
                       record_all: bool = False, record_cap: int = 4001) -> ScalarSeries:
    """Fixed-step RK4 for the scalar logistic equation; a, b must accept arrays."""
    n, h = _plan(t0, t_end)
    ts_stage = t0 + (h / 2.0) * np.arange(2 * n + 1)
    av = np.asarray(a(ts_stage), dtype=float).tolist()
    bv = np.asarray(b(ts_stage), dtype=float).tolist()
    stride = 1 if record_all else max(1, n // (record_cap - 1))
    ts_out = [t0]
    us_out = [float(u0)]
    u = float(u0)
    h2, h6 = h / 2.0, h / 6.0
    for k in range(n):
        i0, im, i1 = 2 * k, 2 * k + 1, 2 * k + 2
        k1 = u * (av[i0] - bv[i0] * u)
        y = u + h2 * k1
        k2 = y * (av[im] - bv[im] * y)
        y = u + h2 * k2
        k3 = y * (av[im] - bv[im] * y)
        y = u + h * k3
        k4 = y * (av[i1] - bv[i1] * y)
        u += h6 * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        if (k + 1) % stride == 0 or k == n - 1:
            ts_out.append(t0 + (k + 1) * h)
            us_out.append(u)
    return ScalarSeries(np.array(ts_out), np.array(us_out))


def _sample_bounds(fn: Callable, horizon) -> tuple[float, float]:
    n = max(16, int(math.ceil(horizon.length / horizon.sample_step)))
    ts = np.linspace(horizon.t_lo, horizon.t_hi, n + 1)
    vals = np.asarray(fn(ts), dtype=float)
    return float(vals.min()), float(vals.max())


def logistic_entire_solution(a: Callable, b: Callable, horizon,
                             t_range: tuple[float, float],
                             tol: float = 1e-10, s_cap: float = 200.0) -> ScalarSeries:
    """Pullback approximation of the unique bounded entire solution.

    Integrates from t_range[0] - S with the guaranteed floor inf a / sup b
    as the start value, doubling S until two successive pullbacks agree to
    `tol` on the evaluation range (whose time grid is shared across S).
    """
    a_lo, a_hi = _sample_bounds(a, horizon)
    b_lo, b_hi = _sample_bounds(b, horizon)
    if not (a_lo > 0 and b_lo > 0):
        raise ValidationError("logistic", f"need positive bounds, got inf a={a_lo:g}, inf b={b_lo:g}")
    t_start, t_end = t_range
    if not t_start < t_end:
        raise ValidationError("t_range", "must be increasing")
    u_init = a_lo / b_hi

    s_values = [10.0]
    while s_values[-1] * 2.0 <= s_cap:
        s_values.append(s_values[-1] * 2.0)
    if s_values[-1] < s_cap:
        s_values.append(float(s_cap))

    prev: Optional[ScalarSeries] = None
    diff = float("nan")
    for S in s_values:
        warm = integrate_logistic(a, b, t_start - S, u_init, t_start)
        series = integrate_logistic(a, b, t_start, float(warm.u[-1]), t_end, record_all=True)
        if prev is not None:
            diff = float(np.abs(series.u - prev.u).max())
            if diff < tol:
                return series
        prev = series
    raise NoConvergence("logistic pullback", residual=diff)


# ---------------------------------------------------------------------------
# Lotka-Volterra competition system

@dataclass(frozen=True)
class BoundedTimeFunction:
    """A time function together with its certified bounds f^L, f^M."""

    fn: Callable
    lo: float
    hi: float

    @staticmethod
    def constant(c: float) -> "BoundedTimeFunction":
        c = float(c)
        return BoundedTimeFunction(lambda t: c + 0.0 * np.asarray(t, dtype=float), c, c)

    @staticmethod
    def sampled(fn: Callable, horizon) -> "BoundedTimeFunction":
        lo, hi = _sample_bounds(fn, horizon)
        return BoundedTimeFunction(fn, lo, hi)


@dataclass(frozen=True)
class LVCoefficients:
    a1: BoundedTimeFunction
    b1: BoundedTimeFunction
    c1: BoundedTimeFunction
    a2: BoundedTimeFunction
    b2: BoundedTimeFunction
    c2: BoundedTimeFunction

    def __post_init__(self):
        for name in ("a1", "b1", "c1", "a2", "b2", "c2"):
            f = getattr(self, name)
            if not f.lo > 0:
                raise ValidationError(name, f"must be bounded below by a positive constant, got {f.lo:g}")


def lv_box(c: LVCoefficients) -> tuple[float, float, float, float]:
    """Coexistence box (u_lo, u_hi, v_lo, v_hi) of the competition system."""
    if not c.a1.lo > c.c1.hi * c.a2.hi / c.c2.lo:
        raise HypothesisViolated("a1^L > c1^M a2^M / c2^L fails")
    if not c.a2.lo > c.a1.hi * c.b2.hi / c.b1.lo:
        raise HypothesisViolated("a2^L > a1^M b2^M / b1^L fails")
    den_u_lo = c.b1.hi * c.c2.lo - c.c1.hi * c.b2.lo
    den_u_hi = c.b1.lo * c.c2.hi - c.c1.lo * c.b2.hi
    if den_u_lo <= 0:
        raise HypothesisViolated("b1^M c2^L - c1^M b2^L must be positive")
    if den_u_hi <= 0:
        raise HypothesisViolated("b1^L c2^M - c1^L b2^M must be positive")
    u_lo = (c.a1.lo * c.c2.lo - c.c1.hi * c.a2.hi) / den_u_lo
    u_hi = (c.a1.hi * c.c2.hi - c.c1.lo * c.a2.lo) / den_u_hi
    v_lo = (c.b1.lo * c.a2.lo - c.a1.hi * c.b2.hi) / den_u_hi
    v_hi = (c.b1.hi * c.a2.hi - c.a1.lo * c.b2.lo) / den_u_lo
    return u_lo, u_hi, v_lo, v_hi


@dataclass
class PlanarSeries:
    ts: np.ndarray
    u: np.ndarray
    v: np.ndarray

    def at(self, t) -> tuple[np.ndarray, np.ndarray]:
        return np.interp(t, self.ts, self.u), np.interp(t, self.ts, self.v)

    def csv_header(self) -> list[str]:
        return ["t", "u", "v"]

    def csv_rows(self) -> list[list[float]]:
        return [[t, u, v] for t, u, v in zip(self.ts, self.u, self.v)]


def integrate_lv(c: LVCoefficients, u0: float, v0: float, t0: float, t_end: float,
                 record_cap: int = 4001) -> PlanarSeries:
    """Fixed-step RK4 for the competition system."""
    n, h = _plan(t0, t_end)
    ts_stage = t0 + (h / 2.0) * np.arange(2 * n + 1)
    series = [np.asarray(getattr(c, name).fn(ts_stage), dtype=float).tolist()
              for name in ("a1", "b1", "c1", "a2", "b2", "c2")]
    a1v, b1v, c1v, a2v, b2v, c2v = series
    stride = max(1, n // (record_cap - 1))
    ts_out, us_out, vs_out = [t0], [float(u0)], [float(v0)]
    u, v = float(u0), float(v0)
    h2, h6 = h / 2.0, h / 6.0

    def rhs(i, uu, vv):
        return (uu * (a1v[i] - b1v[i] * uu - c1v[i] * vv),
                vv * (a2v[i] - b2v[i] * uu - c2v[i] * vv))

    for k in range(n):
        i0, im, i1 = 2 * k, 2 * k + 1, 2 * k + 2
        ku1, kv1 = rhs(i0, u, v)
        ku2, kv2 = rhs(im, u + h2 * ku1, v + h2 * kv1)
        ku3, kv3 = rhs(im, u + h2 * ku2, v + h2 * kv2)
        ku4, kv4 = rhs(i1, u + h * ku3, v + h * kv3)
        u += h6 * (ku1 + 2.0 * ku2 + 2.0 * ku3 + ku4)
        v += h6 * (kv1 + 2.0 * kv2 + 2.0 * kv3 + kv4)
        if (k + 1) % stride == 0 or k == n - 1:
            ts_out.append(t0 + (k + 1) * h)
            us_out.append(u)
            vs_out.append(v)
    return PlanarSeries(np.array(ts_out), np.array(us_out), np.array(vs_out))


def envelope_periodic_orbit(p: Params, period: float, transient_periods: int = 30,
                            ) -> EnvelopeSeries:
    """One period of the attracting orbit (M(t), m(t)) of the envelope system.

    Integrates through a transient long enough for the attraction of the
    comparison system to settle, then returns the final period re-based to
    [0, period].
    """
    from .hypotheses import compute_r1_r2
    r1, r2, _ = compute_r1_r2(p)
    t_end = transient_periods * period
    series = integrate_envelope(p, max(r1, r2), max(min(r1, r2), 1e-6) * 0.5, 0.0, t_end,
                                record_cap=200_001)
    mask = series.ts >= t_end - period - 1e-12
    ts = series.ts[mask] - (t_end - period)
    return EnvelopeSeries(ts, series.u_bar[mask], series.u_under[mask])
