import math

import numpy as np
import pytest

from chemotaxlab.acceptance import const, cos_t, make_params
from chemotaxlab.coefficients import Horizon
from chemotaxlab.envelopes import (BoundedTimeFunction, EnvelopeState, LVCoefficients,
                                   envelope_rhs, envelope_sup_bound, integrate_envelope,
                                   integrate_logistic, integrate_lv,
                                   logistic_entire_solution, lv_box)
from chemotaxlab.errors import HypothesisViolated, NoConvergence, ValidationError

HZ = Horizon(0.0, 60.0, 0.01)


def closed_form_logistic(u0, t):
    # u' = u(1-u) with a0 = a1 = 1
    return u0 * math.exp(t) / (1.0 + u0 * (math.exp(t) - 1.0))


def test_rhs_diagonal_collapse():
    p = make_params(0.0, [const(1.2)], [const(0.9)], [], counts=(16,),
                    horizon=(0.0, 10.0, 0.1))
    r = 0.8
    db, du = envelope_rhs(EnvelopeState(0.0, r, r), p)
    expected = r * (1.2 - 0.9 * r)
    assert db == pytest.approx(expected, rel=1e-14)
    assert du == pytest.approx(expected, rel=1e-14)


def test_rhs_vanishes_at_homogeneous_equilibrium():
    p = make_params(0.0, [const(1.0)], [const(2.0)], [const(0.5)], counts=(16,),
                    horizon=(0.0, 10.0, 0.1))
    r = 1.0 / 2.5
    db, du = envelope_rhs(EnvelopeState(0.0, r, r), p)
    assert abs(db) < 1e-15
    assert abs(du) < 1e-15


def test_rhs_hand_substitution():
    p = make_params(1.0, [const(1.0)], [const(2.0)], [], counts=(16,),
                    horizon=(0.0, 10.0, 0.1))
    db, du = envelope_rhs(EnvelopeState(0.0, 1.0, 0.0), p)
    assert db == pytest.approx(0.0, abs=1e-15)  # 1*1*1 + 1*(1-2)
    assert du == pytest.approx(0.0, abs=1e-15)


def test_envelope_fixed_point_series():
    p = make_params(0.0, [const(1.0)], [const(2.0)], [const(0.5)], counts=(16,),
                    horizon=(0.0, 10.0, 0.1))
    r = 1.0 / 2.5
    series = integrate_envelope(p, r, r, 0.0, 5.0)
    assert np.abs(series.u_bar - r).max() < 1e-12
    assert np.abs(series.u_under - r).max() < 1e-12


def test_envelope_logistic_attraction_with_closed_form_oracle():
    p = make_params(0.0, [const(1.0)], [const(1.0)], [], counts=(16,),
                    horizon=(0.0, 30.0, 0.1))
    series = integrate_envelope(p, 2.0, 0.5, 0.0, 20.0)
    ub, uu = series.at(20.0)
    assert abs(ub - closed_form_logistic(2.0, 20.0)) < 1e-9
    assert abs(uu - closed_form_logistic(0.5, 20.0)) < 1e-9
    assert abs(ub - 1.0) < 1e-6
    assert abs(uu - 1.0) < 1e-6


def test_envelope_order_never_violated():
    p = make_params(0.5, [const(1.0), cos_t(0.3, 1.0)], [const(2.0)], [const(-0.1)],
                    counts=(16,), horizon=(0.0, 60.0, 0.01))
    series = integrate_envelope(p, 1.7, 0.2, 0.0, 40.0)
    assert float((series.u_bar - series.u_under).min()) >= -1e-9


def test_envelope_sup_bound_guarantee():
    p = make_params(0.5, [const(1.0), cos_t(0.3, 1.0)], [const(2.0)], [const(-0.1)],
                    counts=(16,), horizon=(0.0, 60.0, 0.01))
    bound = envelope_sup_bound(p, 2.5)
    series = integrate_envelope(p, 2.5, 0.3, 0.0, 30.0)
    assert float(series.u_bar.max()) <= bound + 1e-9


def test_envelope_start_validation():
    p = make_params(0.0, [const(1.0)], [const(1.0)], [], counts=(16,),
                    horizon=(0.0, 10.0, 0.1))
    with pytest.raises(ValidationError):
        integrate_envelope(p, 0.5, 1.0, 0.0, 1.0)


def test_logistic_autonomous_equilibria():
    one = lambda t: 1.0 + 0.0 * np.asarray(t)  # noqa: E731
    two = lambda t: 2.0 + 0.0 * np.asarray(t)  # noqa: E731
    star = logistic_entire_solution(one, one, HZ, (0.0, 10.0))
    assert np.abs(star.u - 1.0).max() < 1e-9
    half = logistic_entire_solution(one, two, HZ, (0.0, 10.0))
    assert np.abs(half.u - 0.5).max() < 1e-9


def test_logistic_periodic_box():
    a = lambda t: 2.0 + np.sin(t)  # noqa: E731
    b = lambda t: 1.0 + 0.0 * np.asarray(t)  # noqa: E731
    star = logistic_entire_solution(a, b, HZ, (0.0, 25.0))
    assert star.u.min() >= 1.0 - 1e-9
    assert star.u.max() <= 3.0 + 1e-9
    # periodic coefficients produce a periodic entire solution
    u0 = float(star.at(2.0))
    u1 = float(star.at(2.0 + 2.0 * math.pi))
    assert abs(u0 - u1) < 1e-7


def test_logistic_attraction():
    a = lambda t: 2.0 + np.sin(t)  # noqa: E731
    b = lambda t: 1.0 + 0.0 * np.asarray(t)  # noqa: E731
    star = logistic_entire_solution(a, b, HZ, (0.0, 45.0))
    for u0 in (0.05, 0.7, 5.0):
        traj = integrate_logistic(a, b, 0.0, u0, 40.0)
        assert abs(float(traj.u[-1]) - float(star.at(40.0))) < 1e-6


def test_logistic_positivity_guard():
    bad = lambda t: 0.0 * np.asarray(t)  # noqa: E731
    one = lambda t: 1.0 + 0.0 * np.asarray(t)  # noqa: E731
    with pytest.raises(ValidationError):
        logistic_entire_solution(bad, one, HZ, (0.0, 10.0))


def test_logistic_no_convergence_cap():
    a = lambda t: 2.0 + np.sin(t)  # noqa: E731
    b = lambda t: 1.0 + 0.0 * np.asarray(t)  # noqa: E731
    with pytest.raises(NoConvergence):
        logistic_entire_solution(a, b, HZ, (0.0, 5.0), tol=1e-30, s_cap=20.0)


def test_lv_box_symmetric_constants_exact():
    sym = LVCoefficients(a1=BoundedTimeFunction.constant(3.0),
                         b1=BoundedTimeFunction.constant(2.0),
                         c1=BoundedTimeFunction.constant(1.0),
                         a2=BoundedTimeFunction.constant(3.0),
                         b2=BoundedTimeFunction.constant(1.0),
                         c2=BoundedTimeFunction.constant(2.0))
    assert lv_box(sym) == (1.0, 1.0, 1.0, 1.0)


def test_lv_box_hypothesis_guard():
    bad = LVCoefficients(a1=BoundedTimeFunction.constant(3.0),
                         b1=BoundedTimeFunction.constant(2.0),
                         c1=BoundedTimeFunction.constant(50.0),
                         a2=BoundedTimeFunction.constant(3.0),
                         b2=BoundedTimeFunction.constant(1.0),
                         c2=BoundedTimeFunction.constant(2.0))
    with pytest.raises(HypothesisViolated):
        lv_box(bad)


def test_lv_box_constant_coefficients_degenerate_to_equilibrium():
    # 2x2 linear solve oracle: b1 u + c1 v = a1, b2 u + c2 v = a2
    coeffs = dict(a1=2.5, b1=2.0, c1=0.5, a2=2.2, b2=0.4, c2=1.8)
    sys = np.array([[coeffs["b1"], coeffs["c1"]], [coeffs["b2"], coeffs["c2"]]])
    rhs = np.array([coeffs["a1"], coeffs["a2"]])
    u_eq, v_eq = np.linalg.solve(sys, rhs)
    lv = LVCoefficients(**{k: BoundedTimeFunction.constant(v) for k, v in coeffs.items()})
    u_lo, u_hi, v_lo, v_hi = lv_box(lv)
    assert u_lo == pytest.approx(u_hi, rel=1e-13) == pytest.approx(u_eq, rel=1e-13)
    assert v_lo == pytest.approx(v_hi, rel=1e-13) == pytest.approx(v_eq, rel=1e-13)


def test_lv_attraction():
    sym = LVCoefficients(a1=BoundedTimeFunction.constant(3.0),
                         b1=BoundedTimeFunction.constant(2.0),
                         c1=BoundedTimeFunction.constant(1.0),
                         a2=BoundedTimeFunction.constant(3.0),
                         b2=BoundedTimeFunction.constant(1.0),
                         c2=BoundedTimeFunction.constant(2.0))
    one = integrate_lv(sym, 0.3, 2.5, 0.0, 50.0)
    two = integrate_lv(sym, 2.0, 0.4, 0.0, 50.0)
    assert abs(float(one.u[-1] - two.u[-1])) < 1e-6
    assert abs(float(one.v[-1] - two.v[-1])) < 1e-6


def test_lv_positive_lower_bound_required():
    with pytest.raises(ValidationError):
        LVCoefficients(a1=BoundedTimeFunction.constant(0.0),
                       b1=BoundedTimeFunction.constant(2.0),
                       c1=BoundedTimeFunction.constant(1.0),
                       a2=BoundedTimeFunction.constant(3.0),
                       b2=BoundedTimeFunction.constant(1.0),
                       c2=BoundedTimeFunction.constant(2.0))


def test_envelope_log_ratio_decay_under_homogeneous_margin():
    p = make_params(0.4, [const(1.0)], [const(3.0)], [const(-0.2)], counts=(16,),
                    horizon=(0.0, 40.0, 0.02))
    series = integrate_envelope(p, 1.5, 0.4, 0.0, 30.0)
    ratio = np.log(series.u_bar / series.u_under)
    assert (np.diff(ratio) <= 1e-12).all()
    usable = ratio > 1e-13
    usable[0] = False
    rates = -np.log(ratio[usable] / ratio[0]) / series.ts[usable]
    assert rates.min() > 0


def test_series_csv_formats():
    one = lambda t: 1.0 + 0.0 * np.asarray(t)  # noqa: E731
    star = logistic_entire_solution(one, one, HZ, (0.0, 2.0))
    assert star.csv_header() == ["t", "u_star"]
    assert len(star.csv_rows()[0]) == 2
    sym = LVCoefficients(a1=BoundedTimeFunction.constant(3.0),
                         b1=BoundedTimeFunction.constant(2.0),
                         c1=BoundedTimeFunction.constant(1.0),
                         a2=BoundedTimeFunction.constant(3.0),
                         b2=BoundedTimeFunction.constant(1.0),
                         c2=BoundedTimeFunction.constant(2.0))
    lv = integrate_lv(sym, 0.5, 0.5, 0.0, 1.0)
    assert lv.csv_header() == ["t", "u", "v"]
    assert len(lv.csv_rows()[0]) == 3
