import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from gradcheck import fd_gradient
from spherepart.catalog import build_named_net
from spherepart.geom import GeometryError, SpherePoint, circle_for_area, isoperimetric_profile
from spherepart.net import EdgeRec, Face, Net, RegionRec, Tolerances, validate
from spherepart.optimizer import (OptimizerConfig, constraint_residuals, discretize,
                                  estimate_edge_structure, fit_circle, gradient, minimize,
                                  perimeter, perturb, region_area_array, to_net)

TETRA = 6 * math.acos(-1 / 3)


@pytest.fixture(scope="module")
def tetra64():
    return discretize(build_named_net("tetrahedral").net, 64)


@pytest.fixture(scope="module")
def tetra_run(tetra64):
    return minimize(perturb(tetra64, 0.05, 1))


def rotation(seed):
    q, _ = np.linalg.qr(np.random.default_rng(seed).normal(size=(3, 3)))
    return q * np.sign(np.linalg.det(q))


def cap_net(area):
    """A single circle of the given enclosed area around the north pole."""
    c = circle_for_area(area)
    edge = EdgeRec(1, None, None, c.kappa, 0, 1, True, SpherePoint(0.0, 0.0, 1.0))
    return Net((), (edge,), (RegionRec(0, area), RegionRec(1, 4 * math.pi - area)),
               (Face(0, 0, (1,)), Face(1, 1, (-1,))))


# ---- objective and residuals


def test_objective_examples(tetra64):
    assert perimeter(tetra64) == pytest.approx(TETRA, abs=1e-6)
    gc = discretize(build_named_net("great_circle").net, 360)
    # vertices of a polyline on a great circle are joined by arcs of that same circle
    assert perimeter(gc) == pytest.approx(2 * math.pi, abs=2e-4)


def test_refining_a_fixed_edge_changes_length_at_second_order():
    net = cap_net(1.0)
    for m in (16, 32, 64):
        coarse, fine = perimeter(discretize(net, m)), perimeter(discretize(net, 2 * m))
        assert fine >= coarse
        assert fine - coarse < 4.0 / m ** 2


def test_residual_examples(tetra64):
    assert max(abs(r.value) for r in constraint_residuals(tetra64)) < 1e-8
    gc = constraint_residuals(discretize(build_named_net("great_circle").net, 16))
    assert [r.region for r in gc] == [0, 1]
    assert all(abs(r.value) < 1e-12 and r.reliable for r in gc)


@settings(max_examples=20)
@given(st.sampled_from(["great_circle", "three_semicircles", "tetrahedral", "cubical"]),
       st.integers(0, 10_000), st.floats(0.0, 0.1))
def test_residuals_sum_to_zero_and_rotate(name, seed, mag):
    d = perturb(discretize(build_named_net(name).net, 12), mag, seed)
    res = np.array([r.value for r in constraint_residuals(d)])
    assert abs(res.sum()) < 1e-9
    rot = d.with_points(d.points @ rotation(seed).T)
    res_rot = np.array([r.value for r in constraint_residuals(rot)])
    np.testing.assert_allclose(res_rot, res, atol=1e-10)


def test_folded_polyline_is_unreliable():
    d = discretize(build_named_net("tetrahedral").net, 8)
    X = d.points.copy()
    path = d.edge_paths[1]
    X[path[2]], X[path[4]] = X[path[4]].copy(), X[path[2]].copy()
    flags = {r.region: r.reliable for r in constraint_residuals(d.with_points(X))}
    e = d.net.edge_map[1]
    assert not flags[e.left_region] and not flags[e.right_region]


# ---- gradient


def test_exact_nets_are_stationary(tetra64):
    gc = discretize(build_named_net("great_circle").net, 64)
    assert np.linalg.norm(gradient(gc)) < 1e-10
    assert np.linalg.norm(gradient(tetra64)) < 1e-8


@pytest.mark.parametrize("name", ["great_circle", "three_semicircles", "tetrahedral"])
def test_gradient_matches_finite_differences(name):
    rng = np.random.default_rng(5)
    base = discretize(build_named_net(name).net, 6)
    for k in range(10):
        d = perturb(base, 0.15, 100 + k)
        lam, mu = rng.normal(size=len(d.targets)), float(rng.uniform(0, 50))
        an, fd = gradient(d, lam, mu), fd_gradient(d, lam, mu)
        # error relative to the largest gradient component
        assert np.max(np.abs(an - fd)) / np.max(np.abs(an)) < 1e-5


# ---- perturbation


def test_perturb_examples(tetra64):
    same = perturb(tetra64, 0.0, 3)
    assert np.array_equal(same.points, tetra64.points)
    a, b = perturb(tetra64, 0.05, 7), perturb(tetra64, 0.05, 7)
    assert np.array_equal(a.points, b.points)
    moved = np.arccos(np.clip(np.einsum("ij,ij->i", a.points, tetra64.points), -1, 1))
    assert moved.max() <= 0.05 + 1e-12
    assert moved.max() > 0.01
    assert not np.array_equal(perturb(tetra64, 0.05, 8).points, a.points)
    with pytest.raises(ValueError):
        perturb(tetra64, -1.0, 0)


# ---- minimization


def test_exact_start_terminates_immediately(tetra64):
    out, trace = minimize(tetra64)
    assert trace.converged
    assert trace.records == []
    np.testing.assert_allclose(out.points, tetra64.points, rtol=0, atol=4e-16)


def test_tetrahedral_recovery(tetra_run):
    out, trace = tetra_run
    assert trace.converged
    assert perimeter(out) == pytest.approx(TETRA, abs=1e-5)
    assert max(abs(r.value) for r in constraint_residuals(out)) < 1e-6
    s = estimate_edge_structure(out)
    assert s.max_abs_kappa < 1e-3
    assert s.max_angle_error_deg < 0.01
    assert s.max_pressure_mismatch < 1e-3
    assert out.pressures.min() == 0.0


@pytest.mark.parametrize("seed", range(5))
def test_regularity_emerges_for_every_seed(seed):
    d = perturb(discretize(build_named_net("tetrahedral").net, 32), 0.05, 40 + seed)
    out, trace = minimize(d)
    assert trace.converged
    s = estimate_edge_structure(out)
    assert s.max_angle_error_deg < 0.01
    assert s.max_deviation < 1e-3
    assert s.max_pressure_mismatch < 1e-3


def test_merit_never_increases_within_an_outer_iteration(tetra_run):
    _, trace = tetra_run
    recs = trace.records
    assert len(recs) > 10
    for a, b in zip(recs, recs[1:]):
        if a.outer == b.outer:
            # the line search may accept a change below merit rounding noise
            assert b.merit <= a.merit + 1e-14 * abs(a.merit)


def test_circle_and_semicircles_converge():
    gc = perturb(discretize(build_named_net("great_circle").net, 64), 0.05, 2)
    out, trace = minimize(gc)
    assert trace.converged and perimeter(out) == pytest.approx(2 * math.pi, abs=1e-6)
    s3 = perturb(discretize(build_named_net("three_semicircles").net, 64), 0.05, 2)
    out, trace = minimize(s3)
    assert trace.converged and perimeter(out) == pytest.approx(3 * math.pi, abs=1e-5)


def test_rotated_start_gives_same_perimeter():
    d = perturb(discretize(build_named_net("tetrahedral").net, 16), 0.05, 4)
    out, _ = minimize(d)
    rot, _ = minimize(d.with_points(d.points @ rotation(9).T))
    assert perimeter(rot) == pytest.approx(perimeter(out), abs=1e-8)


def test_runs_are_deterministic():
    d = perturb(discretize(build_named_net("cubical").net, 12), 0.05, 6)
    a, ta = minimize(d)
    b, tb = minimize(d)
    assert np.array_equal(a.points, b.points)
    assert ta.to_csv() == tb.to_csv()


def test_refinement_ratio():
    # a single cap of area pi: polyline error against B(pi) should fall 4x per doubling
    errs = []
    for m in (16, 32, 64):
        out, trace = minimize(discretize(cap_net(math.pi), m))
        assert trace.converged
        errs.append(perimeter(out) - isoperimetric_profile(math.pi))
    for coarse, fine in zip(errs, errs[1:]):
        assert 3.0 <= coarse / fine <= 5.0


def test_unequal_targets_give_pressure_consistent_arcs():
    d = discretize(build_named_net("tetrahedral").net, 32)
    d = d.with_targets(np.array([1.3, 1.1, 0.9, 0.7]) * math.pi)
    out, trace = minimize(d)
    assert trace.converged
    np.testing.assert_allclose(region_area_array(out), d.targets, atol=1e-8)
    s = estimate_edge_structure(out)
    assert s.max_abs_kappa > 0.05
    assert s.max_pressure_mismatch < 1e-3
    assert s.max_angle_error_deg < 0.05
    assert s.max_deviation < 1e-3


def test_collision_is_flagged():
    d = discretize(build_named_net("great_circle").net, 16)
    X = d.points.copy()
    X[1] = X[0]
    out, trace = minimize(d.with_points(X))
    assert trace.status == "collision"
    assert trace.flagged_edges == (1,)


def test_config_rejects_nonpositive_tolerances():
    with pytest.raises(ValueError):
        OptimizerConfig(tol_g=0.0)
    with pytest.raises(ValueError):
        OptimizerConfig(tol_c=-1.0)


def test_trace_csv(tetra_run):
    _, trace = tetra_run
    lines = trace.to_csv().splitlines()
    assert lines[0] == "iter,outer,perimeter,residual,grad_norm,merit"
    assert len(lines) == len(trace.records) + 1


# ---- edge structure


def test_fit_recovers_small_circle_curvature():
    d = discretize(cap_net(math.pi), 64)
    _, kappa, dev = fit_circle(d.points[d.edge_paths[1]], closed=True)
    assert kappa == pytest.approx(1 / math.sqrt(3), abs=1e-6)
    assert dev < 1e-12


def test_fit_needs_three_points():
    with pytest.raises(GeometryError, match="too short"):
        fit_circle(np.eye(3)[:2])


def test_to_net_reproduces_optimum(tetra_run):
    out, _ = tetra_run
    net = to_net(out)
    loose = Tolerances(angle=1e-4, curvature=1e-4, area=1e-7)
    assert validate(net, loose).ok
    assert all(e.kappa == 0.0 for e in net.edges)
