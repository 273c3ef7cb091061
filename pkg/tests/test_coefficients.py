import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from chemotaxlab.coefficients import (CoefficientTerm, CoefficientTriple, Horizon,
                                      common_period, eval as coeff_eval,
                                      horizon_samples, spatial_extrema,
                                      temporal_extrema, validate_triple)
from chemotaxlab.elliptic import Grid
from chemotaxlab.errors import HorizonTooCoarse, ValidationError

G1 = Grid(1, (1.0,), (128,))


def triple_1d(a0, a1=(), a2=()):
    return CoefficientTriple(a0=tuple(a0), a1=tuple(a1), a2=tuple(a2), lengths=(1.0,))


def test_eval_constant():
    c = triple_1d([CoefficientTerm.constant(1.0)])
    assert coeff_eval(c, 0, 3.7, 0.25) == 1.0


def test_eval_cosine_at_phase_zero():
    c = triple_1d([CoefficientTerm.constant(1.0), CoefficientTerm.cosine(0.5, 1.0)])
    assert coeff_eval(c, 0, 0.0, 0.5) == pytest.approx(1.5, abs=1e-15)


def test_eval_spatial_mode_at_right_boundary():
    # 0.2 cos(pi x) at x=1 is exactly -0.2
    c = triple_1d([CoefficientTerm.constant(1.0)], a2=[CoefficientTerm.constant(0.2, (1,))])
    assert coeff_eval(c, 2, 0.0, 1.0) == pytest.approx(-0.2, abs=1e-15)


def test_spatial_extrema_constant():
    c = triple_1d([CoefficientTerm.constant(1.0)], a1=[CoefficientTerm.constant(2.0)])
    assert spatial_extrema(c, 1, 12.3, G1) == (2.0, 2.0)


def test_spatial_extrema_cosine_range():
    c = triple_1d([CoefficientTerm.constant(1.0), CoefficientTerm.constant(0.3, (1,))])
    lo, hi = spatial_extrema(c, 0, 0.0, G1)
    # grid sampling misses the exact endpoints by O(h^2)
    assert lo == pytest.approx(0.7, abs=2e-4)
    assert hi == pytest.approx(1.3, abs=2e-4)


def test_spatial_extrema_vanishing_temporal_factor():
    c = triple_1d([CoefficientTerm.constant(1.0)],
                  a2=[CoefficientTerm.cosine(0.1, 1.0, 0.0, (2,))])
    lo, hi = spatial_extrema(c, 2, math.pi / 2.0, G1)
    assert abs(lo) < 1e-16 and abs(hi) < 1e-16


def test_temporal_extrema_constant():
    c = triple_1d([CoefficientTerm.constant(1.0)], a1=[CoefficientTerm.constant(3.0)])
    hz = Horizon(0.0, 50.0, 0.5)
    assert temporal_extrema(c, 1, G1, hz) == (3.0, 3.0)


def test_temporal_extrema_cosine_dense_sampling():
    c = triple_1d([CoefficientTerm.constant(1.0), CoefficientTerm.cosine(0.5, 1.0)])
    hz = Horizon(0.0, 2.0 * math.pi, 2.0 * math.pi / 1000.0)
    lo, hi = temporal_extrema(c, 0, G1, hz)
    assert lo == pytest.approx(0.5, abs=1e-4)
    assert hi == pytest.approx(1.5, abs=1e-4)


def test_temporal_extrema_time_independent_spatial_inf():
    c = triple_1d([CoefficientTerm.constant(1.0)], a2=[CoefficientTerm.constant(0.2, (1,))])
    lo, hi = temporal_extrema(c, 2, G1, Horizon(0.0, 10.0, 0.1), mode="of_spatial_inf")
    assert lo == hi  # no time dependence at all
    assert lo == pytest.approx(-0.2, rel=1e-3)


def test_horizon_too_coarse():
    c = triple_1d([CoefficientTerm.constant(1.0), CoefficientTerm.cosine(0.1, 20.0)])
    with pytest.raises(HorizonTooCoarse):
        temporal_extrema(c, 0, G1, Horizon(0.0, 10.0, 0.5))


def test_common_period():
    terms = (CoefficientTerm.cosine(1.0, 1.0), CoefficientTerm.cosine(1.0, 2.0))
    assert common_period(terms) == pytest.approx(2.0 * math.pi, rel=1e-12)
    aperiodic = (CoefficientTerm.cosine(1.0, 1.0), CoefficientTerm.cosine(1.0, math.sqrt(2.0)),)
    assert common_period(aperiodic) is None
    assert common_period((CoefficientTerm.constant(1.0),)) is None


def test_periodic_snapping_recovers_global_extrema():
    # horizon much longer than the period: snapped sampling still sees the full range
    c = triple_1d([CoefficientTerm.constant(2.0), CoefficientTerm.cosine(0.5, 2.0)])
    lo, hi = temporal_extrema(c, 0, G1, Horizon(0.0, 1000.0, 0.01))
    assert lo == pytest.approx(1.5, abs=1e-4)
    assert hi == pytest.approx(2.5, abs=1e-4)


def test_refinement_monotonicity():
    c = triple_1d([CoefficientTerm.constant(1.0),
                   CoefficientTerm.almost_periodic([(0.4, 1.0, 0.3), (0.3, math.sqrt(2.0), 0.0)])])
    hz1 = Horizon(0.0, 40.0, 0.2)
    hz2 = Horizon(0.0, 40.0, 0.1)
    lo1, hi1 = temporal_extrema(c, 0, G1, hz1)
    lo2, hi2 = temporal_extrema(c, 0, G1, hz2)
    assert lo2 <= lo1
    assert hi2 >= hi1


@settings(max_examples=50, deadline=None)
@given(st.floats(0.1, 3.0), st.floats(-1.0, 1.0), st.floats(0.0, 2.0 * math.pi),
       st.floats(0.0, 20.0), st.integers(0, 127))
def test_eval_within_spatial_extrema(base, amp, phase, t, node):
    c = triple_1d([CoefficientTerm.constant(base + 1.5),
                   CoefficientTerm.cosine(amp, 1.3, phase, (2,))])
    lo, hi = spatial_extrema(c, 0, t, G1)
    x = float(G1.axis_nodes(0)[node])
    v = coeff_eval(c, 0, t, x)
    assert lo - 1e-12 <= v <= hi + 1e-12


@settings(max_examples=30, deadline=None)
@given(st.floats(0.5, 4.0))
def test_constant_family_extrema_exact(c0):
    c = triple_1d([CoefficientTerm.constant(c0)])
    assert spatial_extrema(c, 0, 1.23, G1) == (c0, c0)
    assert temporal_extrema(c, 0, G1, Horizon(0.0, 10.0, 0.25)) == (c0, c0)


def test_validate_triple_rejects_nonpositive_a0():
    c = triple_1d([CoefficientTerm.constant(0.2), CoefficientTerm.cosine(0.5, 1.0)])
    with pytest.raises(ValidationError):
        validate_triple(c, G1, Horizon(0.0, 10.0, 0.05))


def test_validate_triple_rejects_negative_a1():
    c = triple_1d([CoefficientTerm.constant(1.0)], a1=[CoefficientTerm.constant(-0.5)])
    with pytest.raises(ValidationError):
        validate_triple(c, G1, Horizon(0.0, 10.0, 0.05))


def test_declared_bounds_guard():
    with pytest.raises(ValidationError):
        CoefficientTriple(a0=(CoefficientTerm.constant(1.0),), a1=(), a2=(),
                          lengths=(1.0,), declared_bounds=(0.5, 1.5, 0.0, 0.0, 0.0, 0.2))


def test_horizon_validation():
    with pytest.raises(ValidationError):
        Horizon(1.0, 1.0, 0.1)
    with pytest.raises(ValidationError):
        Horizon(0.0, 1.0, 2.0)


def test_horizon_samples_cover_snapped_period():
    terms = (CoefficientTerm.cosine(1.0, 2.0 * math.pi),)  # period 1
    ts = horizon_samples(Horizon(0.0, 100.0, 0.01), terms)
    assert ts[0] == 0.0
    assert ts[-1] == pytest.approx(1.0, abs=1e-12)


def test_term_bound():
    term = CoefficientTerm.almost_periodic([(0.4, 1.0, 0.0), (-0.3, 2.0, 1.0)], (1,))
    assert term.bound() == pytest.approx(0.7)
