import math

import numpy as np
import pytest

from chemotaxlab.acceptance import const, cos_t, make_params, random_field
from chemotaxlab.elliptic import Field, Grid
from chemotaxlab.errors import InvalidInitial, StepRejected, ValidationError
from chemotaxlab.pde import (Outcome, SimState, StepController, Trajectory,
                             detect_blowup, integrate, quadrature, step)


def test_quadrature_constants():
    g1 = Grid(1, (1.0,), (32,))
    assert quadrature(Field.constant(g1, 2.0)) == pytest.approx(2.0, rel=1e-15)
    g2 = Grid(2, (2.0, 1.0), (16, 8))
    assert quadrature(Field.constant(g2, 3.0)) == pytest.approx(6.0, rel=1e-15)


def test_quadrature_cosine_mode_exactly_zero():
    g = Grid(1, (1.0,), (64,))
    u = Field(g, np.cos(math.pi * g.axis_nodes(0)))
    assert abs(quadrature(u)) < 1e-12


def test_step_controller_validation():
    with pytest.raises(ValidationError):
        StepController(dt_init=1e-3, dt_min=1e-2)
    with pytest.raises(ValidationError):
        StepController(growth_cap=0.5)


def test_step_reduces_to_explicit_logistic_for_constant_state():
    p = make_params(0.0, [const(1.2)], [const(0.8)], [], counts=(32,),
                    horizon=(0.0, 10.0, 0.1))
    r = 0.7
    state = SimState.from_u(0.0, Field.constant(p.grid, r))
    ctrl = StepController()
    dt = 1e-3
    new = step(state, p, dt, ctrl)
    expected = r + dt * r * (1.2 - 0.8 * r)
    assert np.abs(new.u.values - expected).max() < 1e-12


def test_step_keeps_homogeneous_steady_state():
    # u = a0/(a1 + a2 |Omega|) is stationary for any chi
    p = make_params(1.3, [const(1.0)], [const(2.0)], [const(0.5)], counts=(32,),
                    horizon=(0.0, 10.0, 0.1))
    eq = 1.0 / 2.5
    state = SimState.from_u(0.0, Field.constant(p.grid, eq))
    new = step(state, p, 5e-3, StepController())
    assert np.abs(new.u.values - eq).max() < 1e-10


def test_trivial_solution_stays_zero():
    p = make_params(0.7, [const(1.0)], [const(1.0)], [], counts=(32,),
                    horizon=(0.0, 10.0, 0.1))
    traj = integrate(p, Field.constant(p.grid, 0.0), 0.0, 1.0, StepController(), stride=5)
    assert traj.outcome.completed
    assert traj.final().u_max == 0.0


def test_integrate_fisher_kpp_converges_to_one():
    p = make_params(0.0, [const(1.0)], [const(1.0)], [], counts=(128,),
                    horizon=(0.0, 30.0, 0.1))
    x = p.grid.axis_nodes(0)
    u0 = Field(p.grid, 1.0 + 0.5 * np.cos(math.pi * x))
    traj = integrate(p, u0, 0.0, 20.0, StepController(dt_max=1e-2), stride=50)
    assert traj.outcome.completed
    err = np.abs(traj.final().u.values - 1.0).max()
    # oracle: the same run at dt/8 on a doubled grid also lands on the
    # constant equilibrium, confirming the discrete steady state is 1
    p_fine = make_params(0.0, [const(1.0)], [const(1.0)], [], counts=(256,),
                         horizon=(0.0, 30.0, 0.1))
    xf = p_fine.grid.axis_nodes(0)
    fine = integrate(p_fine, Field(p_fine.grid, 1.0 + 0.5 * np.cos(math.pi * xf)),
                     0.0, 20.0, StepController(dt_init=1.25e-4, dt_max=1.25e-3), stride=10**9)
    assert np.abs(fine.final().u.values - 1.0).max() < 1e-5
    assert err < 1e-4


def test_integrate_respects_explicit_boundedness_ceiling():
    p = make_params(0.5, [const(1.0)], [const(2.0)], [const(0.1)], counts=(128,),
                    horizon=(0.0, 40.0, 0.02))
    u0 = random_field(p.grid, 0.2, 1.5, 3)
    bound = max(u0.max(), 1.0 / (2.0 - 0.5))
    traj = integrate(p, u0, 0.0, 20.0, StepController(dt_max=1e-2), stride=1)
    assert traj.outcome.completed
    assert max(s.u_max for s in traj.states) <= bound * (1.0 + 1e-4)


def test_immediate_blowup_on_threshold():
    p = make_params(0.0, [const(1.0)], [const(1.0)], [], counts=(32,),
                    horizon=(0.0, 10.0, 0.1))
    ctrl = StepController(blowup_threshold=0.5)
    traj = integrate(p, Field.constant(p.grid, 2.0), 0.0, 1.0, ctrl, stride=5)
    assert traj.outcome.kind == "blowup"
    assert traj.outcome.t == 0.0
    assert detect_blowup(traj) == 0.0


def test_invalid_initial():
    p = make_params(0.0, [const(1.0)], [const(1.0)], [], counts=(32,),
                    horizon=(0.0, 10.0, 0.1))
    bad = Field.constant(p.grid, 1.0)
    bad.values[3] = -1e-12
    with pytest.raises(InvalidInitial):
        integrate(p, bad, 0.0, 1.0, StepController(), stride=5)
    # tiny round-off negatives are clamped instead
    ok = Field.constant(p.grid, 1.0)
    ok.values[3] = -5e-15
    traj = integrate(p, ok, 0.0, 0.1, StepController(), stride=5)
    assert traj.outcome.completed
    assert traj.final().u_min >= 0.0


def test_step_failure_when_dt_min_insufficient():
    # an absurd growth cap rejects every step; with a pinned dt the
    # controller cannot halve and must report failure
    p = make_params(0.0, [const(2.0)], [const(0.1)], [], counts=(32,),
                    horizon=(0.0, 10.0, 0.1))
    ctrl = StepController(dt_init=0.01, dt_min=0.01, dt_max=0.01, growth_cap=1.0 + 1e-12)
    traj = integrate(p, Field.constant(p.grid, 0.5), 0.0, 5.0, ctrl, stride=5)
    assert traj.outcome.kind == "step_failure"


def test_step_rejects_blowup_scale_growth():
    p = make_params(0.0, [const(2.0)], [const(0.1)], [], counts=(32,),
                    horizon=(0.0, 10.0, 0.1))
    state = SimState.from_u(0.0, Field.constant(p.grid, 0.5))
    with pytest.raises(StepRejected):
        step(state, p, 1e-3, StepController(growth_cap=1.0 + 1e-12), None)


def test_detect_blowup_classification():
    g = Grid(1, (1.0,), (8,))

    def mk(vals, t):
        return SimState.from_u(t, Field.constant(g, vals))

    states = [mk(1.0, 0.0), mk(3.0, 1.0), mk(9.0, 2.0), mk(27.0, 3.0)]
    traj = Trajectory(times=[0.0, 1.0, 2.0, 3.0], states=states, dts=[0.0] * 4,
                      outcome=Outcome("blowup", t=3.0), blowup_threshold=9.0)
    assert detect_blowup(traj) == 2.0  # first crossing, not the last state
    ok = Trajectory(times=[0.0, 1.0], states=states[:2], dts=[0.0, 0.1],
                    outcome=Outcome("completed"), blowup_threshold=100.0)
    assert detect_blowup(ok) is None
    failed = Trajectory(times=[0.0, 1.0], states=states[:2], dts=[0.0, 0.1],
                        outcome=Outcome("step_failure", t=1.0, reason="x"),
                        blowup_threshold=100.0)
    assert detect_blowup(failed) is None  # failure is not blow-up


def test_nonnegativity_along_accepted_steps():
    p = make_params(1.0, [const(1.0), cos_t(0.3, 1.0)], [const(3.0)], [const(-0.2)],
                    counts=(128,), horizon=(0.0, 40.0, 0.02))
    u0 = random_field(p.grid, 0.0, 2.0, 12)
    ctrl = StepController(dt_max=1e-2)
    traj = integrate(p, u0, 0.0, 10.0, ctrl, stride=1)
    assert traj.outcome.completed
    for s in traj.states:
        assert s.u_min >= -ctrl.negativity_tol * max(1.0, s.u_max)


def test_mass_bound_invariant():
    p = make_params(0.6, [const(1.0)], [const(2.0)], [const(-0.3)], counts=(128,),
                    horizon=(0.0, 40.0, 0.02))
    u0 = random_field(p.grid, 0.1, 1.0, 13)
    traj = integrate(p, u0, 0.0, 15.0, StepController(dt_max=1e-2), stride=1)
    cap = max(traj.states[0].mass, 1.0 / (2.0 - 0.3))
    assert traj.outcome.completed
    assert max(s.mass for s in traj.states) <= cap + 1e-6 * max(1.0, cap)


def test_chemotaxis_flux_conserves_mass():
    # with no reaction, the chemotaxis + diffusion step leaves mass unchanged
    p = make_params(1.5, [const(1.0)], [const(1e9)], [], counts=(64,),
                    horizon=(0.0, 10.0, 0.1))
    rng = np.random.default_rng(14)
    u = Field(p.grid, rng.uniform(0.5, 1.5, size=p.grid.shape))
    state = SimState.from_u(0.0, u)
    from chemotaxlab.pde import chemotaxis_divergence
    div = chemotaxis_divergence(u.values, state.v.values, p.grid, p.chi, upwind=False)
    assert abs(div.sum() * p.grid.cell_volume) < 1e-13
    div_up = chemotaxis_divergence(u.values, state.v.values, p.grid, p.chi, upwind=True)
    assert abs(div_up.sum() * p.grid.cell_volume) < 1e-13


def test_cocycle_property_fixed_steps():
    p = make_params(0.8, [const(1.0), cos_t(0.3, 2.0)], [const(2.5)], [const(-0.1)],
                    counts=(128,), horizon=(0.0, 10.0, 0.01))
    ctrl = StepController(dt_init=0.01, dt_min=0.01, dt_max=0.01)
    u0 = random_field(p.grid, 0.3, 1.2, 55)
    direct = integrate(p, u0, 0.0, 3.0, ctrl, stride=10**9).final().u
    mid = integrate(p, u0, 0.0, 1.5, ctrl, stride=10**9).final().u
    restart = integrate(p, mid, 1.5, 3.0, ctrl, stride=10**9).final().u
    assert np.abs(direct.values - restart.values).max() <= 1e-8


def test_temporal_convergence_first_order():
    def run(counts, dt):
        p = make_params(0.5, [const(1.0), cos_t(0.5, 3.0)], [const(2.0)], [const(0.1)],
                        counts=(counts,), horizon=(0.0, 10.0, 0.01))
        x = p.grid.axis_nodes(0)
        u0 = Field(p.grid, 1.0 + 0.4 * np.cos(math.pi * x))
        ctrl = StepController(dt_init=dt, dt_min=dt, dt_max=dt)
        return integrate(p, u0, 0.0, 2.0, ctrl, stride=10**9).final().u.values

    ref = run(256, 0.01 / 16.0)
    ref = 0.5 * (ref[0::2] + ref[1::2])
    errs = [np.abs(run(128, dt) - ref).max() for dt in (0.04, 0.02, 0.01)]
    slope = np.polyfit(np.log([0.04, 0.02, 0.01]), np.log(errs), 1)[0]
    assert slope >= 0.9


def test_trajectory_csv_shape():
    p = make_params(0.0, [const(1.0)], [const(1.0)], [], counts=(32,),
                    horizon=(0.0, 10.0, 0.1))
    traj = integrate(p, Field.constant(p.grid, 0.5), 0.0, 0.5, StepController(), stride=100)
    assert traj.csv_header() == ["t", "mass", "u_min", "u_max", "v_min", "v_max", "dt_accepted"]
    rows = traj.csv_rows()
    assert len(rows) == len(traj.states)
    assert all(len(r) == 7 for r in rows)


def test_upwind_switch_runs_and_stays_bounded():
    p = make_params(1.2, [const(1.0)], [const(2.5)], [], counts=(128,),
                    horizon=(0.0, 40.0, 0.02))
    u0 = random_field(p.grid, 0.1, 1.5, 91)
    ctrl = StepController(dt_max=1e-2, upwind=True)
    traj = integrate(p, u0, 0.0, 10.0, ctrl, stride=5)
    assert traj.outcome.completed
    bound = max(u0.max(), 1.0 / (2.5 - 1.2))
    assert max(s.u_max for s in traj.states) <= bound * (1.0 + 1e-3)
