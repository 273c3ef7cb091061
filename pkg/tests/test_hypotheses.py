import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from chemotaxlab.acceptance import const, cos_t, make_params
from chemotaxlab.errors import (DegenerateDenominator, DenominatorNotPositive,
                                NotSpatiallyHomogeneous)
from chemotaxlab.hypotheses import (build_report, check_H2, check_H2_prime,
                                    check_time_average_condition, compute_L1_L2,
                                    compute_M, compute_r1_r2,
                                    stability_margin_homogeneous)

HZ = (0.0, 40.0, 0.02)


def constant_params(chi, a0, a1, a2, length=1.0, n=1):
    return make_params(chi, [const(a0)], [const(a1)], [const(a2)],
                       lengths=(length,), counts=(16,), n=n, horizon=(0.0, 10.0, 0.1))


def test_h2_margin_simple():
    assert check_H2(constant_params(0.0, 1.0, 1.0, 0.0)) == pytest.approx(1.0, abs=1e-14)


def test_h2_margin_with_negative_a2():
    p = constant_params(0.2, 1.0, 1.0, -0.5)
    assert check_H2(p) == pytest.approx(0.3, abs=1e-14)


def test_h2_margin_failing():
    assert check_H2(constant_params(2.0, 1.0, 1.0, 0.0)) == pytest.approx(-1.0, abs=1e-14)


def test_h2_prime_low_dimension_sentinel():
    _, margin_dim = check_H2_prime(constant_params(5.0, 1.0, 1.0, 0.0, n=2))
    assert margin_dim == float("inf")


def test_h2_prime_dimension_margin():
    _, margin_dim = check_H2_prime(constant_params(2.0, 1.0, 1.5, 0.0, n=4))
    assert margin_dim == pytest.approx(0.5, abs=1e-14)


def test_h2_prime_positivity_margin():
    pos_margin, _ = check_H2_prime(constant_params(0.0, 1.0, 0.3, -0.5))
    assert pos_margin == pytest.approx(-0.2, abs=1e-14)


def test_stability_margin_homogeneous():
    p = constant_params(1.0, 1.0, 3.0, 0.5)
    assert stability_margin_homogeneous(p) == pytest.approx(0.5, abs=1e-14)


def test_stability_margin_boundary_case():
    p = constant_params(1.0, 1.0, 2.0, 0.0)
    assert stability_margin_homogeneous(p) == pytest.approx(0.0, abs=1e-14)


def test_stability_margin_requires_homogeneous():
    p = make_params(0.5, [const(1.0)], [const(2.0), const(0.2, (1,))], [],
                    counts=(16,), horizon=(0.0, 10.0, 0.1))
    with pytest.raises(NotSpatiallyHomogeneous):
        stability_margin_homogeneous(p)


def test_r_reduction_matches_closed_form():
    r1, r2, _ = compute_r1_r2(constant_params(1.0, 1.0, 3.0, 0.0))
    assert r1 == pytest.approx(1.0 / 3.0, rel=1e-14)
    assert r2 == pytest.approx(1.0 / 3.0, rel=1e-14)
    r1, r2, _ = compute_r1_r2(constant_params(0.0, 2.0, 5.0, 1.0))
    assert r1 == pytest.approx(1.0 / 3.0, rel=1e-14)
    assert r2 == pytest.approx(1.0 / 3.0, rel=1e-14)


def test_r_with_time_varying_a1():
    # a1(t) = 3 + cos t gives a1_inf = 2, a1_sup = 4 -> r1 = 1/2, r2 = 1/4
    p = make_params(0.0, [const(1.0)], [const(3.0), cos_t(1.0, 1.0)], [],
                    counts=(16,), horizon=HZ)
    r1, r2, _ = compute_r1_r2(p)
    assert r1 == pytest.approx(0.5, rel=1e-6)
    assert r2 == pytest.approx(0.25, rel=1e-6)
    assert r1 >= r2 > 0


def test_degenerate_denominator():
    # a1 = 2 (chi)_+ makes the two products of h(chi) cancel exactly
    with pytest.raises(DegenerateDenominator):
        compute_r1_r2(constant_params(1.0, 1.0, 2.0, 0.0))


def test_l1_l2_closed_forms():
    p = constant_params(0.0, 1.0, 3.0, 0.0)
    l1, l2 = compute_L1_L2(p, 0.0)
    assert l1 == pytest.approx(2.0, rel=1e-14)
    assert l2 == pytest.approx(1.0, rel=1e-14)
    p = constant_params(1.0, 1.0, 3.0, 0.0)
    l1, l2 = compute_L1_L2(p, 0.0)
    assert l2 == pytest.approx(1.0 + 1.0 / 18.0, rel=1e-14)


def test_l1_nonnegative_when_a2_inf_nonnegative():
    p = constant_params(0.3, 1.2, 2.0, 0.4)
    l1, _ = compute_L1_L2(p, 4.2)
    assert l1 >= 0.0


def test_time_average_constant_integrand():
    # L2 - L1 = -1 identically for this triple
    p = constant_params(0.0, 1.0, 3.0, 0.0)
    assert check_time_average_condition(p, 1.0) == pytest.approx(-1.0, rel=1e-12)


def test_time_average_sin_integrand_matches_brute_force():
    # a0 = 2A + A cos(wt), a1 = 2, a2 = 0, chi = 0 makes L2 - L1 = A cos(wt)
    # exactly.  The sup over windows >= one period of the cosine average is
    # 2 sin(L/2)/L at L ~= 2.86 periods (~0.2172 A), pinned here against a
    # brute-force trapezoid oracle.
    A = 0.5
    p = make_params(0.0, [const(2 * A), cos_t(A, 1.0)], [const(2.0)], [],
                    counts=(16,), horizon=(0.0, 20.0 * math.pi, math.pi / 500.0))
    got = check_time_average_condition(p, 2.0 * math.pi)

    ts = np.linspace(0.0, 20.0 * math.pi, 10001)
    f = A * np.cos(ts)
    cum = np.concatenate(([0.0], np.cumsum(0.5 * (f[1:] + f[:-1]) * np.diff(ts))))
    best = -np.inf
    for i in range(ts.size - 1):
        spans = ts[i + 1:] - ts[i]
        ok = spans >= 2.0 * math.pi
        if ok.any():
            best = max(best, ((cum[i + 1:][ok] - cum[i]) / spans[ok]).max())
    assert got == pytest.approx(best, rel=1e-3)
    assert got == pytest.approx(A * 0.2172336, rel=1e-3)


def test_time_average_sign_equivalence_constant_triples():
    # sign(check) == sign(chi^2 a0 / (2 (a1 + |O| a2)) - (a1 - |O| (a2)_-))
    rng = np.random.default_rng(42)
    checked = 0
    while checked < 100:
        a0 = rng.uniform(0.2, 3.0)
        a1 = rng.uniform(0.5, 4.0)
        a2 = rng.uniform(-0.4, 0.4)
        chi = rng.uniform(-1.0, 1.5)
        if a1 - abs(a2) <= 2.0 * max(chi, 0.0) + 1e-3:
            continue
        p = constant_params(chi, a0, a1, a2)
        got = check_time_average_condition(p, 1.0)
        expected = chi**2 * a0 / (2.0 * (a1 + a2)) - (a1 - max(-a2, 0.0))
        if abs(expected) > 1e-10:
            assert math.copysign(1.0, got) == math.copysign(1.0, expected), \
                f"a0={a0} a1={a1} a2={a2} chi={chi}: {got} vs {expected}"
        checked += 1


def test_compute_m_examples():
    assert compute_M(constant_params(1.0, 1.0, 3.0, 0.0)) == pytest.approx(0.5, rel=1e-14)
    assert compute_M(constant_params(0.0, 1.0, 2.0, 0.0)) == pytest.approx(0.5, rel=1e-14)
    with pytest.raises(DenominatorNotPositive):
        compute_M(constant_params(1.0, 1.0, 1.0, 0.0))


@settings(max_examples=40, deadline=None)
@given(st.floats(-1.0, 2.0), st.floats(0.05, 1.0))
def test_h2_margin_monotone_in_chi(chi, dchi):
    base = constant_params(chi, 1.0, 2.0, -0.3)
    bumped = constant_params(chi + dchi, 1.0, 2.0, -0.3)
    assert check_H2(bumped) <= check_H2(base) + 1e-12


@settings(max_examples=40, deadline=None)
@given(st.floats(0.5, 3.0), st.floats(0.05, 2.0))
def test_h2_margin_monotone_in_a1(a1, bump):
    base = constant_params(0.4, 1.0, a1, -0.2)
    bumped = constant_params(0.4, 1.0, a1 + bump, -0.2)
    assert check_H2(bumped) >= check_H2(base) - 1e-12


def test_h2_implies_h2_prime():
    rng = np.random.default_rng(9)
    for _ in range(60):
        p = constant_params(rng.uniform(-1, 1), rng.uniform(0.2, 2), rng.uniform(0.5, 4),
                            rng.uniform(-0.4, 0.4), n=int(rng.integers(1, 5)))
        if check_H2(p) > 0:
            pos_margin, dim_margin = check_H2_prime(p)
            assert pos_margin > 0
            if p.n <= 2 or p.triple.terms(1)[0].amps[0] > p.chi * (p.n - 2) / p.n:
                assert dim_margin > 0


def test_report_constant_triple():
    p = constant_params(0.5, 1.0, 3.0, 0.2)
    report = build_report(p)
    assert report.h1_ok
    assert report.r1 == pytest.approx(report.r2, rel=1e-12)
    text = report.to_keyvalues()
    assert "h2_margin=" in text and "r1=" in text
    assert len(report.csv_header()) == len(report.csv_row())
