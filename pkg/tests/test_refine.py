"""Tests for the spline refinement QP.

Optimality is checked from the outside: feasible (constraint-null-space)
perturbations must not decrease the effort integral, and the finite
difference gradient of the objective must vanish along every feasible
direction. The effort integral used by these oracles goes through
integral_of_square, not through the solver's Hessian assembly.
"""

import random

import numpy as np
import pytest

from kinoplan.gridmap import DynBounds, random_grid
from kinoplan.lattice import make_control_set
from kinoplan.lti import State
from kinoplan.polyalg import Interval, integral_of_square
from kinoplan.refine import (
    NotSolvedError,
    RefineSpec,
    SingularKktError,
    SplineTrajectory,
    refine,
    refine_constraints,
    spline_effort,
    waypoints_from_plan,
)
from kinoplan.search import GoalSpec, Heuristic, PlanResult, PlanStatus, \
    PlannerConfig, plan


def rest_to_rest_spec(n_prime=3, target=(1.0, 0.0, 0.0), tau=1.0):
    return RefineSpec(
        n_prime=n_prime,
        waypoints=(target,),
        seg_times=(tau,),
        s0=State.rest(n_prime),
        sg=State.rest(n_prime, target),
    )


def random_chain_spec(rng, n_prime=3, n_segs=4):
    pos = [(0.0, 0.0, 0.0)]
    for _ in range(n_segs):
        pos.append(tuple(pos[-1][i] + rng.uniform(-2, 2) for i in range(3)))
    times = tuple(rng.uniform(0.5, 2.0) for _ in range(n_segs))
    return RefineSpec(
        n_prime=n_prime,
        waypoints=tuple(pos[1:]),
        seg_times=times,
        s0=State.rest(n_prime, pos[0]),
        sg=State.rest(n_prime, pos[-1]),
    )


def coeff_vectors(traj: SplineTrajectory):
    """Per-axis stacked coefficient vectors, segment-major."""
    width = len(traj.segments[0][0].coeffs)
    out = []
    for ax in range(3):
        c = []
        for seg in traj.segments:
            coeffs = list(seg[ax].coeffs)
            coeffs += [0.0] * (width - len(coeffs))
            c.extend(coeffs)
        out.append(np.array(c))
    return out, width


def effort_of_coeffs(c, width, n_prime, seg_times):
    """Effort integral recomputed from raw coefficients."""
    from kinoplan.polyalg import Poly1
    total = 0.0
    for k, tau in enumerate(seg_times):
        coeffs = tuple(float(v) for v in c[k * width:(k + 1) * width])
        p = Poly1(coeffs).derivative(n_prime)
        if p.is_zero():
            continue
        total += integral_of_square(p, Interval(0.0, tau))
    return total


# ------------------------------------------------------- frozen splines


def test_min_jerk_rest_to_rest():
    traj = refine(rest_to_rest_spec())
    px = traj.segments[0][0]
    assert px.coeffs == pytest.approx((0.0, 0.0, 0.0, 10.0, -15.0, 6.0),
                                      abs=1e-8)
    assert px.eval(0.5) == pytest.approx(0.5, abs=1e-10)
    for ax in (1, 2):
        for c in traj.segments[0][ax].coeffs:
            assert abs(c) <= 1e-9


def test_min_snap_rest_to_rest():
    traj = refine(rest_to_rest_spec(n_prime=4))
    px = traj.segments[0][0]
    want = (0.0, 0.0, 0.0, 0.0, 35.0, -84.0, 70.0, -20.0)
    assert px.coeffs == pytest.approx(want, abs=1e-7)


def test_constant_velocity_chain_has_zero_effort():
    v = (0.5, -0.25, 0.0)
    times = (1.0, 2.0, 1.5)
    pos = [(0.0, 0.0, 0.0)]
    for tau in times:
        pos.append(tuple(pos[-1][i] + v[i] * tau for i in range(3)))
    spec = RefineSpec(
        n_prime=3,
        waypoints=tuple(pos[1:]),
        seg_times=times,
        s0=State.of(pos[0], v, (0.0, 0.0, 0.0)),
        sg=State.of(pos[-1], v, (0.0, 0.0, 0.0)),
    )
    traj = refine(spec)
    assert spline_effort(traj) == pytest.approx(0.0, abs=1e-9)
    mid = traj.state_at(1.7)
    assert mid.vel == pytest.approx(v, abs=1e-7)


# ------------------------------------------------- constraint satisfied


@pytest.mark.parametrize("n_prime", [2, 3, 4])
def test_random_chains_meet_all_constraints(n_prime):
    rng = random.Random(600 + n_prime)
    for _ in range(8):
        spec = random_chain_spec(rng, n_prime=n_prime,
                                 n_segs=rng.randint(1, 6))
        traj = refine(spec)
        # Waypoint interpolation.
        t_acc = 0.0
        for k, tau in enumerate(spec.seg_times):
            t_acc += tau
            for ax in range(3):
                got = traj.segments[k][ax].eval(tau)
                assert got == pytest.approx(spec.waypoints[k][ax], abs=1e-6)
        # Junction continuity of derivatives 0 .. n_prime - 1.
        for k in range(len(spec.seg_times) - 1):
            tau = spec.seg_times[k]
            for ax in range(3):
                for d in range(n_prime):
                    left = traj.segments[k][ax].derivative(d).eval(tau)
                    right = traj.segments[k + 1][ax].derivative(d).eval(0.0)
                    assert left == pytest.approx(right, abs=1e-8)
        # Boundary states.
        for ax in range(3):
            for d in range(n_prime):
                assert traj.segments[0][ax].derivative(d).eval(0.0) == \
                    pytest.approx(spec.s0.derivs[d][ax], abs=1e-8)
                last = traj.segments[-1][ax].derivative(d)
                assert last.eval(spec.seg_times[-1]) == \
                    pytest.approx(spec.sg.derivs[d][ax], abs=1e-8)
        # The assembled equality system holds at the returned coefficients.
        A, b = refine_constraints(spec)
        cs, _w = coeff_vectors(traj)
        for ax in range(3):
            r = A @ cs[ax] - b[:, ax]
            assert np.max(np.abs(r)) <= 1e-8 * (1 + np.max(np.abs(b)))


# ------------------------------------------------------------ optimality


def test_null_space_perturbations_never_improve():
    rng = random.Random(700)
    np_rng = np.random.default_rng(700)
    for _ in range(5):
        spec = random_chain_spec(rng, n_prime=3, n_segs=3)
        traj = refine(spec)
        A, _b = refine_constraints(spec)
        cs, width = coeff_vectors(traj)
        _u, s, vh = np.linalg.svd(A)
        null = vh[np.sum(s > 1e-9 * s[0]):].T
        assert null.shape[1] > 0
        base = [effort_of_coeffs(c, width, 3, spec.seg_times) for c in cs]
        for _ in range(100):
            ax = np_rng.integers(0, 3)
            w = np_rng.normal(size=null.shape[1])
            step = null @ w
            step *= 1e-3 / np.linalg.norm(step)
            perturbed = effort_of_coeffs(cs[ax] + step, width, 3,
                                         spec.seg_times)
            assert perturbed >= base[ax] - 1e-12 * (1 + abs(base[ax]))


def test_fd_gradient_vanishes_in_feasible_directions():
    rng = random.Random(701)
    spec = random_chain_spec(rng, n_prime=3, n_segs=3)
    traj = refine(spec)
    A, _b = refine_constraints(spec)
    cs, width = coeff_vectors(traj)
    _u, s, vh = np.linalg.svd(A)
    null = vh[np.sum(s > 1e-9 * s[0]):].T
    c = cs[0]
    h = 1e-6
    grad = np.zeros_like(c)
    for i in range(len(c)):
        e = np.zeros_like(c)
        e[i] = h
        grad[i] = (effort_of_coeffs(c + e, width, 3, spec.seg_times)
                   - effort_of_coeffs(c - e, width, 3, spec.seg_times)) \
            / (2 * h)
    feasible_component = null.T @ grad
    scale = 1 + np.linalg.norm(grad)
    assert np.linalg.norm(feasible_component) <= 1e-5 * scale


# ------------------------------------------------------ plan hand-off


def solved_plan():
    grid = random_grid((40, 40, 1), 0.5, 0.0, seed=0,
                       origin=(-10.0, -10.0, 0.0))
    cfg = PlannerConfig(order=2, tau=1.0, rho=1.0,
                        control_set=make_control_set(1.0, 1, 2),
                        bounds=DynBounds(v_max=2.0), goal_pos_tol=0.25,
                        goal_requires_rest=True, heuristic=Heuristic.LQMT)
    return plan(State.rest(2, (0.0, 0.0, 0.25)), GoalSpec((2.0, 0.0, 0.25)),
                cfg, grid)


def test_waypoints_from_plan_layout():
    res = solved_plan()
    assert res.status is PlanStatus.SOLVED
    spec = waypoints_from_plan(res, n_prime=3)
    assert len(spec.waypoints) == len(res.primitives)
    assert len(spec.seg_times) == len(res.primitives)
    for prim, w in zip(res.primitives, spec.waypoints):
        assert w == pytest.approx(prim.end_state().pos)
    # Boundary lift: order-2 plans carry constant acceleration u per
    # segment, so the refined boundary acceleration is the first / last u.
    assert spec.s0.derivs[2] == res.primitives[0].u
    assert spec.sg.derivs[2] == res.primitives[-1].u
    assert spec.s0.derivs[0] == pytest.approx((0.0, 0.0, 0.25))
    assert spec.s0.derivs[1] == pytest.approx((0.0, 0.0, 0.0))
    traj = refine(spec)
    assert traj.duration == pytest.approx(sum(spec.seg_times))


def test_waypoints_from_plan_rejects_unsolved():
    bad = PlanResult(PlanStatus.NO_PATH, (), float("inf"), 10, 0.0)
    with pytest.raises(NotSolvedError):
        waypoints_from_plan(bad)
    degenerate = PlanResult(PlanStatus.SOLVED, (), 0.0, 0, 0.0)
    with pytest.raises(NotSolvedError):
        waypoints_from_plan(degenerate)


# -------------------------------------------------------------- errors


def test_refine_rejects_tiny_segment():
    spec = rest_to_rest_spec(tau=1e-9)
    with pytest.raises(SingularKktError):
        refine(spec)


def test_spec_validation():
    with pytest.raises(ValueError):
        RefineSpec(n_prime=5, waypoints=((1.0, 0.0, 0.0),),
                   seg_times=(1.0,), s0=State.rest(5),
                   sg=State.rest(5, (1.0, 0.0, 0.0)))
    with pytest.raises(ValueError):
        RefineSpec(n_prime=3, waypoints=((1.0, 0.0, 0.0),),
                   seg_times=(1.0, 1.0), s0=State.rest(3),
                   sg=State.rest(3, (1.0, 0.0, 0.0)))
    with pytest.raises(ValueError):
        # Final waypoint disagrees with the end state.
        RefineSpec(n_prime=3, waypoints=((1.0, 0.0, 0.0),),
                   seg_times=(1.0,), s0=State.rest(3),
                   sg=State.rest(3, (2.0, 0.0, 0.0)))


def test_state_at_spans_segments():
    rng = random.Random(702)
    spec = random_chain_spec(rng, n_prime=3, n_segs=3)
    traj = refine(spec)
    t_edge = spec.seg_times[0]
    before = traj.state_at(t_edge - 1e-9)
    after = traj.state_at(t_edge + 1e-9)
    for a, b in zip(before.as_vector(), after.as_vector()):
        assert a == pytest.approx(b, abs=1e-6)
    end = traj.state_at(traj.duration)
    assert end.pos == pytest.approx(spec.sg.pos, abs=1e-7)
