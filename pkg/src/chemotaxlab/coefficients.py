"""Closed-form time-space coefficient families and their sampled extrema.

Each coefficient (growth a0, local competition a1, nonlocal competition a2)
is a sum of separable terms

    term(t, x) = [sum_i amp_i * cos(omega_i t + phase_i)] * prod_a cos(m_a pi x_a / L_a)

so every representable family is smooth in t, bounded, and has zero normal
derivative on the domain boundary.  Infima/suprema over "all t" are
approximated by dense sampling over a finite horizon; purely periodic
families are snapped to one full common period first, which makes the
approximation exact up to the sampling step.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Optional

import numpy as np

from .elliptic import Grid
from .errors import HorizonTooCoarse, ValidationError

_TWO_PI = 2.0 * math.pi


@dataclass(frozen=True)
class CoefficientTerm:
    """One separable term of a coefficient.

    amps/omegas/phases describe the temporal factor (a single cosine, a
    constant via omega=0, or an almost-periodic finite trigonometric sum
    with pairwise incommensurate frequencies).  modes holds one nonnegative
    cosine mode index per axis; an empty tuple means spatially constant.
    """

    amps: tuple[float, ...]
    omegas: tuple[float, ...]
    phases: tuple[float, ...]
    modes: tuple[int, ...] = ()

    def __post_init__(self):
        if not (len(self.amps) == len(self.omegas) == len(self.phases)) or not self.amps:
            raise ValidationError("term", "amps/omegas/phases must be equal-length and nonempty")
        for a in self.amps + self.omegas + self.phases:
            if not np.isfinite(a):
                raise ValidationError("term", "non-finite term parameter")
        for m in self.modes:
            if m < 0 or m != int(m):
                raise ValidationError("mode", f"mode indices must be nonnegative integers, got {m}")

    @classmethod
    def constant(cls, c: float, modes: tuple[int, ...] = ()) -> "CoefficientTerm":
        return cls((float(c),), (0.0,), (0.0,), modes)

    @classmethod
    def cosine(cls, amp: float, omega: float, phase: float = 0.0,
               modes: tuple[int, ...] = ()) -> "CoefficientTerm":
        return cls((float(amp),), (float(omega),), (float(phase),), modes)

    @classmethod
    def almost_periodic(cls, components: Iterable[tuple[float, float, float]],
                        modes: tuple[int, ...] = ()) -> "CoefficientTerm":
        amps, omegas, phases = zip(*components)
        return cls(tuple(map(float, amps)), tuple(map(float, omegas)), tuple(map(float, phases)), modes)

    def bound(self) -> float:
        """Finite global bound: spatial factor has modulus <= 1."""
        return float(sum(abs(a) for a in self.amps))

    def temporal(self, t):
        """Temporal factor at scalar or array t."""
        out = None
        for a, w, p in zip(self.amps, self.omegas, self.phases):
            piece = a * np.cos(w * t + p)
            out = piece if out is None else out + piece
        return out

    def spatial(self, x, lengths: tuple[float, ...]):
        """Spatial profile at coordinates x (scalar / tuple / arrays)."""
        if not self.modes or all(m == 0 for m in self.modes):
            xs = x[0] if isinstance(x, (tuple, list)) else x
            return np.ones_like(np.asarray(xs, dtype=float)) if np.ndim(xs) else 1.0
        coords = x if isinstance(x, (tuple, list)) else (x,)
        if len(coords) < len(self.modes):
            raise ValidationError("x", f"need {len(self.modes)} coordinates, got {len(coords)}")
        out = None
        for m, xa, L in zip(self.modes, coords, lengths):
            piece = np.cos(m * math.pi * np.asarray(xa, dtype=float) / L)
            out = piece if out is None else out * piece
        return out

    def is_time_constant(self) -> bool:
        return all(w == 0.0 for w in self.omegas)

    def is_space_constant(self) -> bool:
        return not self.modes or all(m == 0 for m in self.modes)

    def temporal_periods(self) -> list[float]:
        return [_TWO_PI / abs(w) for w in self.omegas if w != 0.0]


@dataclass(frozen=True)
class CoefficientTriple:
    """The coefficient functions a0, a1, a2, each a sum of terms.

    `lengths` fixes the domain extents the spatial modes refer to;
    `declared_bounds` optionally records (alpha0, A0, alpha1, A1, alpha2, A2).
    """

    a0: tuple[CoefficientTerm, ...]
    a1: tuple[CoefficientTerm, ...]
    a2: tuple[CoefficientTerm, ...]
    lengths: tuple[float, ...]
    declared_bounds: Optional[tuple[float, float, float, float, float, float]] = None

    def __post_init__(self):
        if self.declared_bounds is not None:
            if len(self.declared_bounds) != 6:
                raise ValidationError("declared_bounds", "expected 6 entries")
            a1lo, a2lo = self.declared_bounds[2], self.declared_bounds[4]
            if not a1lo + a2lo > 0:
                raise ValidationError("declared_bounds", "alpha1 + alpha2 must be positive")

    def terms(self, which: int) -> tuple[CoefficientTerm, ...]:
        return (self.a0, self.a1, self.a2)[which]

    def is_time_constant(self, which: Optional[int] = None) -> bool:
        idx = range(3) if which is None else (which,)
        return all(t.is_time_constant() for i in idx for t in self.terms(i))

    def is_space_constant(self, which: Optional[int] = None) -> bool:
        idx = range(3) if which is None else (which,)
        return all(t.is_space_constant() for i in idx for t in self.terms(i))

    def global_bound(self, which: int) -> float:
        return sum(t.bound() for t in self.terms(which))


@dataclass(frozen=True)
class Horizon:
    """Finite stand-in for the quantifier 'for all t in R'."""

    t_lo: float
    t_hi: float
    sample_step: float

    def __post_init__(self):
        if not self.t_lo < self.t_hi:
            raise ValidationError("horizon", f"need t_lo < t_hi, got [{self.t_lo}, {self.t_hi}]")
        if not 0 < self.sample_step <= self.t_hi - self.t_lo:
            raise ValidationError("sample_step", "must be positive and at most the horizon length")

    @property
    def length(self) -> float:
        return self.t_hi - self.t_lo


def shortest_period(terms: Iterable[CoefficientTerm]) -> Optional[float]:
    periods = [p for t in terms for p in t.temporal_periods()]
    return min(periods) if periods else None


def _rational_ratio(r: float, max_den: int = 10_000, tol: float = 1e-9) -> Optional[tuple[int, int]]:
    """Approximate r by p/q via continued fractions; None if not commensurate."""
    from fractions import Fraction

    frac = Fraction(r).limit_denominator(max_den)
    if frac.numerator == 0:
        return None
    if abs(r - frac.numerator / frac.denominator) <= tol * abs(r):
        return frac.numerator, frac.denominator
    return None


def common_period(terms: Iterable[CoefficientTerm]) -> Optional[float]:
    """Least common period of all temporal components, or None (aperiodic)."""
    periods = [p for t in terms for p in t.temporal_periods()]
    if not periods:
        return None  # constant in time: no finite period needed
    common = periods[0]
    for p in periods[1:]:
        ratio = _rational_ratio(common / p)
        if ratio is None:
            return None
        num, den = ratio
        common = common * den  # = p * num
    return common


def horizon_samples(horizon: Horizon, terms: Iterable[CoefficientTerm],
                    snap: bool = True) -> np.ndarray:
    """Sample times for 'inf over t' quantifiers.

    Raises HorizonTooCoarse when the step cannot resolve the fastest
    oscillation; snaps purely periodic families to one common period so the
    sampled extrema match the true global ones up to the step (pass
    snap=False for quantities that need the whole horizon, like windowed
    time averages).  Halving the step yields a superset of sample points
    (refinement monotonicity).
    """
    terms = tuple(terms)
    shortest = shortest_period(terms)
    if shortest is not None and horizon.sample_step > shortest / 4.0:
        raise HorizonTooCoarse(
            f"sample_step {horizon.sample_step:g} exceeds a quarter of the shortest period {shortest:g}")
    span = horizon.length
    period = common_period(terms) if snap else None
    if period is not None and period <= span:
        span = period
    n = int(math.floor(span / horizon.sample_step))
    ts = horizon.t_lo + horizon.sample_step * np.arange(n + 1)
    if ts[-1] < horizon.t_lo + span:
        ts = np.append(ts, horizon.t_lo + span)
    return ts


def eval(c: CoefficientTriple, which: int, t: float, x) -> float:  # noqa: A001 - spec operation name
    """Evaluate a coefficient at one (t, x); deterministic closed form."""
    total = 0.0
    for term in c.terms(which):
        total += float(term.temporal(t)) * float(term.spatial(x, c.lengths))
    return total


class GridEvaluator:
    """Caches the grid-sampled spatial profile of every term of a triple.

    With the profiles fixed, a coefficient at time t costs one temporal
    evaluation per term plus a saxpy per term, which is what the PDE solver
    does once per accepted step.
    """

    def __init__(self, triple: CoefficientTriple, grid: Grid):
        if tuple(grid.lengths) != tuple(triple.lengths):
            raise ValidationError("grid", "grid lengths differ from the triple's domain lengths")
        self.triple = triple
        self.grid = grid
        meshes = grid.meshes()
        self._profiles: list[list[np.ndarray]] = []
        for which in range(3):
            profs = []
            for term in triple.terms(which):
                prof = term.spatial(meshes, triple.lengths)
                profs.append(np.broadcast_to(np.asarray(prof, dtype=float), grid.shape))
            self._profiles.append(profs)

    def field(self, which: int, t: float) -> np.ndarray:
        """Coefficient values on the full grid at time t."""
        out = np.zeros(self.grid.shape)
        for term, prof in zip(self.triple.terms(which), self._profiles[which]):
            out += float(term.temporal(t)) * prof
        return out

    def extrema_series(self, which: int, ts: np.ndarray,
                       chunk: int = 4096) -> tuple[np.ndarray, np.ndarray]:
        """Spatial (inf, sup) of a coefficient at every sample time."""
        ts = np.asarray(ts, dtype=float)
        terms = self.triple.terms(which)
        profs = self._profiles[which]
        if all(term.is_space_constant() for term in terms):
            vals = np.zeros_like(ts)
            for term in terms:
                vals += term.temporal(ts)
            return vals.copy(), vals.copy()
        flat = [p.reshape(-1) for p in profs]
        inf = np.empty_like(ts)
        sup = np.empty_like(ts)
        for lo in range(0, ts.size, chunk):
            sl = slice(lo, min(lo + chunk, ts.size))
            tt = ts[sl]
            fields = np.zeros((tt.size, flat[0].size))
            for term, p in zip(terms, flat):
                fields += np.asarray(term.temporal(tt))[:, None] * p[None, :]
            inf[sl] = fields.min(axis=1)
            sup[sl] = fields.max(axis=1)
        return inf, sup


def spatial_extrema(c: CoefficientTriple, which: int, t: float, grid: Grid) -> tuple[float, float]:
    """(inf, sup) over the grid sample of a coefficient at fixed t."""
    ev = GridEvaluator(c, grid)
    inf, sup = ev.extrema_series(which, np.array([t]))
    return float(inf[0]), float(sup[0])


def temporal_extrema(c: CoefficientTriple, which: int, grid: Grid, horizon: Horizon,
                     mode: str = "pointwise") -> tuple[float, float]:
    """Extrema over the sampled horizon.

    mode 'of_spatial_inf' reduces t -> a_inf(t), 'of_spatial_sup' reduces
    t -> a_sup(t), and 'pointwise' gives the joint extrema over (t, x).
    """
    if mode not in ("of_spatial_inf", "of_spatial_sup", "pointwise"):
        raise ValidationError("mode", f"unknown temporal_extrema mode '{mode}'")
    ts = horizon_samples(horizon, c.terms(which))
    inf_s, sup_s = GridEvaluator(c, grid).extrema_series(which, ts)
    if mode == "of_spatial_inf":
        return float(inf_s.min()), float(inf_s.max())
    if mode == "of_spatial_sup":
        return float(sup_s.min()), float(sup_s.max())
    return float(inf_s.min()), float(sup_s.max())


def temporal_values(terms: Iterable[CoefficientTerm], ts) -> np.ndarray:
    """Sum of the purely temporal factors; only valid for spatially constant terms."""
    ts = np.asarray(ts, dtype=float)
    out = np.zeros_like(ts)
    for term in terms:
        if not term.is_space_constant():
            raise ValidationError("terms", "temporal_values needs spatially constant terms")
        out += term.temporal(ts)
    return out


def is_periodic(c: CoefficientTriple, period: float, grid: Grid, tol: float = 1e-12) -> bool:
    """Sampled check that every a_i has the given period."""
    ev = GridEvaluator(c, grid)
    probe_ts = np.array([0.0, 0.31 * period, 0.77 * period, 1.13 * period])
    for which in range(3):
        for t in probe_ts:
            diff = ev.field(which, t + period) - ev.field(which, t)
            if np.abs(diff).max() > tol * max(1.0, c.global_bound(which)):
                return False
    return True


def is_autonomous(c: CoefficientTriple, grid: Grid, tol: float = 1e-12) -> bool:
    """Sampled check that every a_i is independent of t."""
    ev = GridEvaluator(c, grid)
    for which in range(3):
        base = ev.field(which, 0.0)
        for t in (0.37, 1.91, 13.7):
            if np.abs(ev.field(which, t) - base).max() > tol * max(1.0, c.global_bound(which)):
                return False
    return True


def validate_triple(c: CoefficientTriple, grid: Grid, horizon: Horizon) -> None:
    """Enforce the standing positivity/nonnegativity requirements.

    a0 must be strictly positive and a1 nonnegative on the sampled
    horizon x grid.
    """
    a0_inf, _ = temporal_extrema(c, 0, grid, horizon, "pointwise")
    if not a0_inf > 0:
        raise ValidationError("a0", f"must be strictly positive on the horizon x grid (inf={a0_inf:g})")
    a1_inf, _ = temporal_extrema(c, 1, grid, horizon, "pointwise")
    if a1_inf < -1e-14:
        raise ValidationError("a1", f"must be nonnegative on the horizon x grid (inf={a1_inf:g})")
