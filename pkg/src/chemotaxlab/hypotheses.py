"""Named conditions and derived constants evaluated from a coefficient triple.

Everything here is sampled arithmetic: the quantifiers over all real t are
replaced by the configured horizon (snapped to a common period when the
family is periodic), and the outputs are signed margins rather than
booleans so near-boundary experiments can read off the distance.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Optional

import numpy as np

from .coefficients import CoefficientTriple, GridEvaluator, Horizon, horizon_samples
from .elliptic import Grid
from .errors import (DegenerateDenominator, DenominatorNotPositive, HorizonTooShort,
                     NotSpatiallyHomogeneous, ValidationError)

INF_SENTINEL = float("inf")


def pos(x):
    return np.maximum(x, 0.0)


def neg(x):
    return np.maximum(-x, 0.0)


@dataclass(frozen=True)
class Params:
    """Everything the condition arithmetic needs.

    `n` is the space dimension used by the dimension-dependent conditions;
    it may exceed the simulated grid dimension (conditions only).
    """

    chi: float
    n: int
    triple: CoefficientTriple
    grid: Grid
    horizon: Horizon

    def __post_init__(self):
        if self.n < 1:
            raise ValidationError("n", f"dimension must be >= 1, got {self.n}")
        if self.grid.measure <= 0:
            raise ValidationError("grid", "domain measure must be positive")

    @property
    def omega_measure(self) -> float:
        return self.grid.measure


@dataclass(frozen=True)
class SampledExtrema:
    """Per-coefficient spatial extrema series over the horizon samples."""

    ts: np.ndarray
    inf: tuple[np.ndarray, np.ndarray, np.ndarray]
    sup: tuple[np.ndarray, np.ndarray, np.ndarray]


@lru_cache(maxsize=64)
def sampled_extrema(p: Params) -> SampledExtrema:
    terms = p.triple.a0 + p.triple.a1 + p.triple.a2
    ts = horizon_samples(p.horizon, terms)
    ev = GridEvaluator(p.triple, p.grid)
    infs, sups = [], []
    for which in range(3):
        lo, hi = ev.extrema_series(which, ts)
        infs.append(lo)
        sups.append(hi)
    return SampledExtrema(ts, tuple(infs), tuple(sups))


def evaluator_for(p: Params) -> GridEvaluator:
    return _evaluator_cached(p.triple, p.grid)


@lru_cache(maxsize=64)
def _evaluator_cached(triple: CoefficientTriple, grid: Grid) -> GridEvaluator:
    return GridEvaluator(triple, grid)


def check_H2(p: Params) -> float:
    """Margin of the global-existence condition.

    Returns inf_t { a1_inf(t) - |Omega| (a2_inf(t))_- } - (chi)_+ ; positive
    means the condition holds on the sampled horizon.
    """
    s = sampled_extrema(p)
    series = s.inf[1] - p.omega_measure * neg(s.inf[2])
    return float(series.min() - pos(p.chi))


def check_H2_prime(p: Params) -> tuple[float, float]:
    """Margins of the weaker existence condition.

    margin_pos is inf_t { a1_inf(t) - |Omega| (a2_inf(t))_- }; margin_dim is
    a1_inf - chi (n-2)/n for n >= 3 and +inf otherwise.
    """
    s = sampled_extrema(p)
    series = s.inf[1] - p.omega_measure * neg(s.inf[2])
    margin_pos = float(series.min())
    if p.n >= 3:
        margin_dim = float(s.inf[1].min() - p.chi * (p.n - 2) / p.n)
    else:
        margin_dim = INF_SENTINEL
    return margin_pos, margin_dim


def require_spatially_homogeneous(p: Params) -> None:
    s = sampled_extrema(p)
    for which in range(3):
        gap = np.abs(s.sup[which] - s.inf[which]).max()
        if gap > 1e-13 * max(1.0, p.triple.global_bound(which)):
            raise NotSpatiallyHomogeneous(f"a{which} varies in space (gap {gap:g})")


def stability_margin_homogeneous(p: Params) -> float:
    """Margin of the homogeneous stability condition,
    inf_t { a1(t) - |Omega| |a2(t)| } - 2 (chi)_+."""
    require_spatially_homogeneous(p)
    s = sampled_extrema(p)
    series = s.inf[1] - p.omega_measure * np.abs(s.inf[2])
    return float(series.min() - 2.0 * pos(p.chi))


def _r_ingredients(p: Params):
    s = sampled_extrema(p)
    chip = pos(p.chi)
    w = p.omega_measure
    p_inf = float((s.inf[1] - w * neg(s.inf[2]) - chip).min())
    p_sup = float((s.sup[1] - w * neg(s.sup[2]) - chip).max())
    q_inf = chip + w * float(pos(s.inf[2]).min())
    q_sup = chip + w * float(pos(s.sup[2]).max())
    a0_inf = float(s.inf[0].min())
    a0_sup = float(s.sup[0].max())
    return p_inf, p_sup, q_inf, q_sup, a0_inf, a0_sup


def compute_r1_r2(p: Params) -> tuple[float, float, float]:
    """The attracting-interval endpoints and their shared denominator h(chi)."""
    p_inf, p_sup, q_inf, q_sup, a0_inf, a0_sup = _r_ingredients(p)
    h_chi = p_inf * p_sup - q_inf * q_sup
    scale = abs(p_inf * p_sup) + abs(q_inf * q_sup)
    if abs(h_chi) < 1e-14 * scale or scale == 0.0:
        raise DegenerateDenominator(f"h(chi)={h_chi:g} vanishes against scale {scale:g}")
    r1 = (p_sup * a0_sup - a0_inf * q_inf) / h_chi
    r2 = (p_inf * a0_inf - a0_sup * q_sup) / h_chi
    return float(r1), float(r2), float(h_chi)


def compute_L1_L2(p: Params, t: float,
                  r1: Optional[float] = None, r2: Optional[float] = None) -> tuple[float, float]:
    """Literal evaluation of the comparison rates L1(t), L2(t)."""
    if r1 is None or r2 is None:
        r1, r2, _ = compute_r1_r2(p)
    series = _l1_l2_series(p, np.array([float(t)]), r1, r2)
    return float(series[0][0]), float(series[1][0])


def _l1_l2_series(p: Params, ts: np.ndarray, r1: float, r2: float):
    ev = evaluator_for(p)
    w = p.omega_measure
    a0_sup = ev.extrema_series(0, ts)[1]
    a1_inf = ev.extrema_series(1, ts)[0]
    a2_inf, a2_sup = ev.extrema_series(2, ts)
    l1 = 2.0 * r2 * (a1_inf + w * pos(a2_inf))
    l2 = (a0_sup + 0.5 * p.chi * (r1 - r2) + 0.5 * (p.chi * r1) ** 2
          + w * r1 * (2.0 * neg(a2_inf) + pos(a2_sup)))
    return l1, l2


def check_time_average_condition(p: Params, min_window: Optional[float] = None) -> float:
    """Worst sliding-window average of L2 - L1 over the horizon.

    A negative return means the time-average stability condition plausibly
    holds.  Windows shorter than min_window (default: a tenth of the
    horizon) are ignored; the integral uses the composite trapezoid rule on
    the horizon sampling.
    """
    if min_window is None:
        min_window = p.horizon.length / 10.0
    if p.horizon.length < 2.0 * min_window:
        raise HorizonTooShort(
            f"horizon length {p.horizon.length:g} < 2 * min_window {min_window:g}")
    r1, r2, _ = compute_r1_r2(p)
    # window averages need the whole horizon, not the period-snapped range
    terms = p.triple.a0 + p.triple.a1 + p.triple.a2
    ts = horizon_samples(p.horizon, terms, snap=False)
    l1, l2 = _l1_l2_series(p, ts, r1, r2)
    diff = l2 - l1
    # cumulative trapezoid of diff
    cum = np.concatenate(([0.0], np.cumsum(0.5 * (diff[1:] + diff[:-1]) * np.diff(ts))))
    worst = -INF_SENTINEL
    for i in range(ts.size - 1):
        spans = ts[i + 1:] - ts[i]
        ok = spans >= min_window
        if not ok.any():
            continue
        avgs = (cum[i + 1:][ok] - cum[i]) / spans[ok]
        worst = max(worst, float(avgs.max()))
    if worst == -INF_SENTINEL:
        raise HorizonTooShort("no window of the requested length fits the sampling")
    return worst


def compute_M(p: Params) -> float:
    """Ceiling of the invariant box used by the entire-solution constructions.

    a0_sup / (inf_t { a1_inf(t) - |Omega| (a2_inf(t))_- } - (chi)_+); the
    positive part of chi drops out for chi <= 0.
    """
    s = sampled_extrema(p)
    denom = float((s.inf[1] - p.omega_measure * neg(s.inf[2])).min()) - pos(p.chi)
    if denom <= 0:
        raise DenominatorNotPositive(f"box denominator {denom:g} is not positive")
    a0_sup = float(s.sup[0].max())
    return float(a0_sup / denom)


def stability_margin_heterogeneous(p: Params) -> float:
    """Margin of the heterogeneous stability condition.

    The display mixes inf over t with horizon-global constants; it is
    evaluated literally: left side inf over t, right side with global
    a0_sup/a0_inf and sup_t (a2_sup(t))_+.
    """
    s = sampled_extrema(p)
    w = p.omega_measure
    lhs = float((s.inf[1] - w * neg(s.inf[2])).min())
    a0_inf = float(s.inf[0].min())
    a0_sup = float(s.sup[0].max())
    chip = pos(p.chi)
    rhs = chip + (a0_sup / a0_inf) * (chip + w * float(pos(s.sup[2]).max()))
    return float(lhs - rhs)


@dataclass
class HypothesisReport:
    """All computed condition quantities with pass/fail margins."""

    chi: float
    n: int
    omega_measure: float
    h1_ok: bool
    alpha: tuple[float, float, float]
    big_a: tuple[float, float, float]
    h2_margin: float
    h2_prime_margin_pos: float
    h2_prime_margin_dim: float
    homogeneous_stability_margin: Optional[float]
    heterogeneous_stability_margin: float
    worst_window_average: float
    r1: float
    r2: float
    h_chi: float
    big_m: float
    horizon: Horizon
    ts: np.ndarray = field(repr=False)
    L1_series: np.ndarray = field(repr=False)
    L2_series: np.ndarray = field(repr=False)

    _SCALAR_KEYS = ("chi", "n", "omega_measure", "h1_ok",
                    "alpha0", "A0", "alpha1", "A1", "alpha2", "A2",
                    "h2_margin", "h2_prime_margin_pos", "h2_prime_margin_dim",
                    "homogeneous_stability_margin", "heterogeneous_stability_margin",
                    "worst_window_average",
                    "r1", "r2", "h_chi", "M",
                    "horizon_t_lo", "horizon_t_hi", "horizon_sample_step")

    def scalars(self) -> dict:
        vals = {
            "chi": self.chi, "n": self.n, "omega_measure": self.omega_measure,
            "h1_ok": self.h1_ok,
            "alpha0": self.alpha[0], "A0": self.big_a[0],
            "alpha1": self.alpha[1], "A1": self.big_a[1],
            "alpha2": self.alpha[2], "A2": self.big_a[2],
            "h2_margin": self.h2_margin,
            "h2_prime_margin_pos": self.h2_prime_margin_pos,
            "h2_prime_margin_dim": self.h2_prime_margin_dim,
            "homogeneous_stability_margin": (self.homogeneous_stability_margin
                                             if self.homogeneous_stability_margin is not None
                                             else float("nan")),
            "heterogeneous_stability_margin": self.heterogeneous_stability_margin,
            "worst_window_average": self.worst_window_average,
            "r1": self.r1, "r2": self.r2, "h_chi": self.h_chi, "M": self.big_m,
            "horizon_t_lo": self.horizon.t_lo,
            "horizon_t_hi": self.horizon.t_hi,
            "horizon_sample_step": self.horizon.sample_step,
        }
        return {k: vals[k] for k in self._SCALAR_KEYS}

    def to_keyvalues(self) -> str:
        return "".join(f"{k}={_fmt(v)}\n" for k, v in self.scalars().items())

    def csv_header(self) -> list[str]:
        return list(self._SCALAR_KEYS)

    def csv_row(self) -> list:
        return list(self.scalars().values())


def _fmt(v) -> str:
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, (float, np.floating)):
        return repr(float(v))
    return str(v)


def build_report(p: Params, min_window: Optional[float] = None) -> HypothesisReport:
    """Evaluate every condition, swallowing per-quantity guard errors into NaN."""
    s = sampled_extrema(p)
    a_inf = [float(x.min()) for x in s.inf]
    a_sup = [float(x.max()) for x in s.sup]
    # alpha2/A2 bound |a2|: on each sample the modulus range follows from the
    # spatial extrema (0 is attained when the sign changes)
    abs_lo = np.where(s.inf[2] * s.sup[2] <= 0, 0.0,
                      np.minimum(np.abs(s.inf[2]), np.abs(s.sup[2])))
    abs_hi = np.maximum(np.abs(s.inf[2]), np.abs(s.sup[2]))
    alpha = (a_inf[0], a_inf[1], float(abs_lo.min()))
    big_a = (a_sup[0], a_sup[1], float(abs_hi.max()))
    h1_ok = alpha[0] > 0 and alpha[1] >= 0 and (alpha[1] + alpha[2]) > 0

    h2 = check_H2(p)
    h2p_pos, h2p_dim = check_H2_prime(p)
    try:
        homog = stability_margin_homogeneous(p)
    except NotSpatiallyHomogeneous:
        homog = None
    stab1 = stability_margin_heterogeneous(p)
    nan = float("nan")
    try:
        r1, r2, h_chi = compute_r1_r2(p)
    except DegenerateDenominator:
        r1 = r2 = h_chi = nan
    if math.isfinite(r1):
        l1, l2 = _l1_l2_series(p, s.ts, r1, r2)
        try:
            stab2 = check_time_average_condition(p, min_window)
        except HorizonTooShort:
            stab2 = nan
    else:
        l1 = np.full_like(s.ts, nan)
        l2 = np.full_like(s.ts, nan)
        stab2 = nan
    try:
        big_m = compute_M(p)
    except DenominatorNotPositive:
        big_m = nan
    return HypothesisReport(
        chi=p.chi, n=p.n, omega_measure=p.omega_measure,
        h1_ok=h1_ok, alpha=alpha, big_a=big_a,
        h2_margin=h2, h2_prime_margin_pos=h2p_pos, h2_prime_margin_dim=h2p_dim,
        homogeneous_stability_margin=homog, heterogeneous_stability_margin=stab1,
        worst_window_average=stab2,
        r1=r1, r2=r2, h_chi=h_chi, big_m=big_m,
        horizon=p.horizon, ts=s.ts, L1_series=l1, L2_series=l2)
