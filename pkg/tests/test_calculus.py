"""Metric, shape operator, curvatures, Laplace-Beltrami and the identity suite."""

import numpy as np
import pytest

from contactgeom import (GridSpec, build_analysis, first_fundamental_form,
                         frame_gradient, gaussian_curvature_intrinsic,
                         laplace_beltrami, refinement_study, sample,
                         shape_operator, verify_curvature_identity,
                         verify_laplacian_identity, verify_minimality)
from contactgeom.calculus import MetricField, observed_order, refinement_passed
from contactgeom.catalog import clifford, geodesic_sphere, r_torus
from contactgeom.surface import contact_angle_field

RNG = np.random.default_rng(11)


@pytest.fixture(scope="module")
def cliff64():
    grid = clifford().sample(n=64)
    return grid, build_analysis(grid)


@pytest.fixture(scope="module")
def sphere64():
    grid = geodesic_sphere().sample(n=64)
    return grid, build_analysis(grid)


# ---------------------------------------------------------------- metric

def test_metric_clifford_diagonal(cliff64):
    grid, an = cliff64
    assert np.max(np.abs(an.metric.E - 0.5)) < 1e-14
    assert np.max(np.abs(an.metric.G - 0.5)) < 1e-14
    assert np.max(np.abs(an.metric.F)) < 1e-14


def test_metric_sphere_round(sphere64):
    grid, an = sphere64
    theta = grid.spec.mesh()[0]
    assert np.max(np.abs(an.metric.E - 1.0)) < 1e-12
    assert np.max(np.abs(an.metric.G - np.sin(theta) ** 2)) < 1e-12
    assert np.max(np.abs(an.metric.F)) < 1e-12
    assert np.all(an.metric.det > 0)


# ---------------------------------------------------------- shape operator

def test_shape_operator_clifford(cliff64):
    _, an = cliff64
    target = np.array([[0.0, -1.0], [-1.0, 0.0]])
    assert np.max(np.abs(an.shape.S - target)) < 1e-6
    assert np.max(np.abs(an.shape.H)) < 1e-8
    assert np.max(np.abs(an.shape.det + 1.0)) < 1e-6
    assert an.shape.symmetry_defect < 1e-7


def test_shape_operator_sphere_vanishes(sphere64):
    _, an = sphere64
    assert np.max(np.abs(an.shape.S)) < 5e-6
    assert np.max(np.abs(an.shape.H)) < 5e-6


def test_r_torus_mean_curvature():
    grid = r_torus(np.pi / 3).sample(n=64)
    an = build_analysis(grid)
    expected = (np.tan(np.pi / 3) - 1.0 / np.tan(np.pi / 3)) / 2.0
    assert abs(expected - (np.sqrt(3) - 1 / np.sqrt(3)) / 2) < 1e-15
    assert np.max(np.abs(np.abs(an.shape.H) - abs(expected))) < 1e-4


# ------------------------------------------------------------- curvature

def test_gaussian_curvature_clifford(cliff64):
    _, an = cliff64
    assert np.max(np.abs(an.K_int)) < 2e-6
    assert np.max(np.abs(an.K_ext)) < 1e-6


def test_gaussian_curvature_sphere(sphere64):
    _, an = sphere64
    assert np.max(np.abs(an.K_int - 1.0)) < 2e-5
    assert np.max(np.abs(an.K_ext - 1.0)) < 2e-5


def test_flat_metric_gives_zero_at_roundoff():
    grid = clifford().sample(n=32)
    flat = MetricField(E=np.ones((32, 32)), F=np.zeros((32, 32)),
                       G=np.ones((32, 32)))
    K = gaussian_curvature_intrinsic(flat, grid)
    assert np.max(np.abs(K)) < 1e-13


def test_intrinsic_extrinsic_agreement_128():
    for entry in (clifford(), geodesic_sphere()):
        grid = entry.sample(n=128)
        an = build_analysis(grid)
        assert np.max(np.abs(an.K_int - an.K_ext)) < 5e-5


# ---------------------------------------------------------- frame gradient

def test_frame_gradient_constant_field(cliff64):
    grid, an = cliff64
    g = frame_gradient(np.full((64, 64), 0.37), an.frames, grid)
    assert np.max(np.abs(g.beta1)) < 1e-12
    assert np.max(np.abs(g.beta2)) < 1e-12


def test_frame_gradient_clifford_beta(cliff64):
    grid, an = cliff64
    assert np.max(np.abs(an.grad_beta.beta1)) < 1e-9
    assert np.max(np.abs(an.grad_beta.beta2)) < 1e-9


def test_frame_gradient_sphere_analytic(sphere64):
    grid, an = sphere64
    # beta = pi/2 - theta and e1 = +X_theta, so d beta(e1) = -1, d beta(e2) = 0
    assert np.max(np.abs(an.grad_beta.beta1 + 1.0)) < 1e-6
    assert np.max(np.abs(an.grad_beta.beta2)) < 1e-6


# --------------------------------------------------------- Laplace-Beltrami

def test_laplace_constant_zero(sphere64):
    grid, an = sphere64
    lap = laplace_beltrami(np.full((64, 64), 1.234), an.metric, grid)
    assert np.max(np.abs(lap)) < 1e-10


def test_laplace_sphere_eigenfunction():
    grid = geodesic_sphere().sample(n=128)
    metric = first_fundamental_form(grid)
    theta = grid.spec.mesh()[0]
    f = np.cos(theta)
    lap = laplace_beltrami(f, metric, grid)
    assert np.max(np.abs(lap + 2.0 * np.cos(theta))) < 1e-4


def test_laplace_linear_field_flat_chart():
    # exact flat torus metric on a chart-topology grid: linear fields are
    # harmonic and every stencil (one-sided rows included) is exact on them
    spec = GridSpec(32, 32, (0.0, 2.0), (0.0, 2.0), "chart", "chart")
    c = np.sqrt(2) / 2

    def patch(U, V):
        return np.stack([c * np.cos(U), c * np.sin(U),
                         c * np.cos(V), c * np.sin(V)], axis=-1)

    grid = sample(patch, spec)
    flat = MetricField(E=np.full((32, 32), 0.5), F=np.zeros((32, 32)),
                       G=np.full((32, 32), 0.5))
    U, _ = grid.spec.mesh()
    lap = laplace_beltrami(0.7 * U, flat, grid)
    assert np.max(np.abs(lap)) < 1e-8


def test_laplace_self_adjoint_periodic():
    grid = clifford().sample(n=32)
    metric = first_fundamental_form(grid)
    w = grid.calc.quad_weights()
    a = RNG.normal(size=(32, 32))
    b = RNG.normal(size=(32, 32))
    la = laplace_beltrami(a, metric, grid)
    lb = laplace_beltrami(b, metric, grid)
    s1 = np.sum(a * lb * metric.sqrt_det * w)
    s2 = np.sum(b * la * metric.sqrt_det * w)
    assert abs(s1 - s2) < 1e-8


# ------------------------------------------------------------- identities

def test_curvature_identity_clifford(cliff64):
    grid, an = cliff64
    rep = verify_curvature_identity(grid, analysis=an)
    assert rep.linf < 1e-8


def test_curvature_identity_sphere_refines():
    rep = refinement_study(geodesic_sphere(), "curvature", [32, 64, 128])
    assert rep.order is not None and rep.order >= 1.7
    assert refinement_passed(rep)


def test_curvature_identity_gauge_invariant():
    # flipping the e1 gauge flips beta to pi - beta but leaves the residual
    grid = geodesic_sphere().sample(n=32)
    an = build_analysis(grid)
    ff = contact_angle_field(grid)
    ff.e1, ff.e2 = -ff.e1, -ff.e2
    ff.coeff1, ff.coeff2 = -ff.coeff1, -ff.coeff2
    ff.beta = np.pi - ff.beta
    shape = shape_operator(grid, ff)
    gb = frame_gradient(ff.beta, ff, grid)
    K = gaussian_curvature_intrinsic(an.metric, grid)
    res_flipped = K - (1.0 - (gb.beta1 + 1.0) ** 2 - gb.beta2 ** 2)
    assert np.max(np.abs(res_flipped - an.res_curvature)) < 1e-9
    # H is gauge-invariant as well
    assert np.max(np.abs(shape.H - an.shape.H)) < 1e-12


def test_laplacian_identity_clifford_exact(cliff64):
    grid, an = cliff64
    rep = verify_laplacian_identity(grid, analysis=an)
    assert rep.linf < 1e-12
    assert rep.n_excluded == 0


def test_laplacian_identity_sphere_refines():
    rep = refinement_study(geodesic_sphere(), "laplacian", [32, 64, 128],
                           band=0.05)
    assert rep.order is not None and rep.order >= 1.7
    assert refinement_passed(rep)


def test_laplacian_forms_agree_algebraically():
    b1 = RNG.normal(size=1000)
    b2 = RNG.normal(size=1000)
    lhs = (b1 + 2.0) ** 2 + b2 ** 2
    rhs = (b1 ** 2 + b2 ** 2) + 4.0 * (b1 + 1.0)
    assert np.max(np.abs(lhs - rhs)) < 1e-12


def test_connection_identity_clifford(cliff64):
    grid, an = cliff64
    r1, r2 = an.res_connection
    assert np.max(np.abs(r1)) < 1e-7
    assert np.max(np.abs(r2)) < 1e-7


def test_connection_identity_sphere_refines():
    rep = refinement_study(geodesic_sphere(), "connection", [32, 64, 128],
                           band=0.05)
    assert rep.order is not None and rep.order >= 1.7
    assert rep.linf < 1e-4


def test_connection_constant_angle_r_torus():
    # with constant beta the components reduce to 0 and -2 tan(beta); here
    # beta = 0 identically so both vanish
    grid = r_torus(np.pi / 3).sample(n=64)
    an = build_analysis(grid)
    r1, r2 = an.res_connection
    assert np.max(np.abs(r1)) < 1e-4
    assert np.max(np.abs(r2)) < 1e-4


def test_minimality_summary():
    rep = verify_minimality(clifford().sample(n=64))
    assert rep["max"] < 1e-8
    rep = verify_minimality(geodesic_sphere().sample(n=64))
    assert rep["max"] < 5e-6
    grid = r_torus(np.pi / 3).sample(n=64)
    rep = verify_minimality(grid)
    expected = (np.sqrt(3) - 1 / np.sqrt(3)) / 2
    assert abs(rep["max"] - expected) < 1e-4


def test_observed_order_floor():
    assert observed_order([32, 64, 128], [1e-14, 2e-14, 1.5e-14]) is None


def test_refinement_needs_three_levels():
    with pytest.raises(ValueError):
        refinement_study(geodesic_sphere(), "curvature", [32, 64])
