"""Area, Willmore energy, flow steps, descent and the rigidity probes."""

import numpy as np
import pytest

from contactgeom import (FlowConfig, StepTooLarge, area, clifford, descend,
                         descend_r_family, flow_step, geodesic_sphere, perturb,
                         r_torus, theorem_probe, willmore_energy)
from contactgeom.flow import _state


def test_area_clifford():
    grid = clifford().sample(n=64)
    assert abs(area(grid) - 2.0 * np.pi ** 2) < 1e-6


def test_area_r_torus_family():
    for r in (0.4, 0.9):
        grid = r_torus(r).sample(n=64)
        assert abs(area(grid) - 4.0 * np.pi ** 2 * np.sin(r) * np.cos(r)) < 1e-6


def test_area_minimum_grid_positive():
    grid = clifford().sample(n=8)
    assert area(grid) > 0


def test_willmore_zero_on_minimal():
    assert willmore_energy(clifford().sample(n=64)) < 1e-10


def test_willmore_r_torus_closed_form():
    for r in (0.4, 0.6, np.pi / 4, 1.0):
        grid = r_torus(r).sample(n=128)
        h = (np.tan(r) - 1.0 / np.tan(r)) / 2.0
        expected = 4.0 * np.pi ** 2 * np.sin(r) * np.cos(r) * h ** 2
        assert abs(willmore_energy(grid) - expected) < 1e-6


def test_willmore_family_matches_closed_form_across_bracket():
    for r in np.linspace(0.3, 1.2, 7):
        grid = r_torus(float(r)).sample(n=128)
        h = (np.tan(r) - 1.0 / np.tan(r)) / 2.0
        expected = 4.0 * np.pi ** 2 * np.sin(r) * np.cos(r) * h ** 2
        assert abs(willmore_energy(grid) - expected) < 1e-6


def test_willmore_positive_after_bump():
    grid = perturb(clifford(), (1, 2), 0.05).sample(n=32)
    assert willmore_energy(grid) > 1e-4


def test_flow_step_identity():
    grid = clifford().sample(n=16)
    moved = flow_step(grid, np.zeros((16, 16)), 1.0)
    assert np.max(np.abs(moved.points - grid.points)) < 1e-15


def test_flow_step_constant_displacement_moves_along_family():
    # a constant normal displacement of the flat torus lands on a nearby
    # product torus r = pi/4 - c + O(c^2) under this orientation convention
    grid = clifford().sample(n=32)
    c = 0.01
    moved = flow_step(grid, np.full((32, 32), c), 1.0)
    assert np.max(np.abs(np.linalg.norm(moved.points, axis=-1) - 1)) < 1e-14
    r_new = np.pi / 4 - c
    target = r_torus(r_new).sample(n=32)
    assert np.max(np.abs(moved.points - target.points)) < 5.0 * c ** 2


def test_fixed_step_variant_descends():
    grid = perturb(clifford(), (1, 2), 0.05).sample(n=32)
    cfg = FlowConfig(step=0.05, max_iter=3, tol=1e-9, variant="fixed-step")
    rep, _ = descend(grid, cfg)
    assert rep.iterations == 3
    assert rep.energy[-1] < rep.energy[0]


def test_gradient_deterministic_across_thread_counts():
    from contactgeom.flow import _control_basis, _control_gradient, _state
    grid = perturb(clifford(), (1, 2), 0.05).sample(n=32)
    frames = _state(grid)[0]
    basis = _control_basis((8, 8), (32, 32))
    cfg1 = FlowConfig(control=(8, 8), threads=1)
    cfg2 = FlowConfig(control=(8, 8), threads=4)
    g1 = _control_gradient(grid.points, frames.e3, grid, cfg1, basis)
    g2 = _control_gradient(grid.points, frames.e3, grid, cfg2, basis)
    assert np.array_equal(g1, g2)


def test_flow_step_too_large():
    # psi = 1 drives the flat torus onto the circle (e^{iu}, 0): the
    # v-direction degenerates and the step must be rejected
    grid = clifford().sample(n=16)
    with pytest.raises(StepTooLarge):
        flow_step(grid, np.ones((16, 16)), 1.0)


def test_descend_already_minimal():
    grid = clifford().sample(n=32)
    rep, final = descend(grid, FlowConfig(max_iter=10, tol=1e-3))
    assert rep.converged
    assert rep.iterations == 0
    assert rep.final_max_H < 1e-8


def test_descend_requires_compact():
    grid = geodesic_sphere().sample(n=32)
    with pytest.raises(ValueError):
        descend(grid, FlowConfig())


def test_descend_zero_steps_not_converged():
    grid = perturb(clifford(), (1, 2), 0.05).sample(n=32)
    rep, _ = descend(grid, FlowConfig(max_iter=0, tol=1e-3))
    assert not rep.converged
    assert rep.iterations == 0


def test_r_only_descent_recovers_quarter_pi():
    rep, grid = descend_r_family(np.pi / 4 + 0.1, n=32)
    assert rep.converged
    assert abs(rep.r_final - np.pi / 4) < 1e-6
    assert rep.energy[-1] < 1e-12


def test_full_descent_from_bump(flow_run):
    rep, final = flow_run
    assert rep.converged
    assert rep.iterations <= 500
    assert rep.final_max_H < 1e-3
    # accepted backtracking steps decrease the energy strictly
    diffs = np.diff(rep.energy)
    assert np.all(diffs < 0)


def test_theorem_probe_pass_chain(flow_run):
    rep, final = flow_run
    probe = theorem_probe(rep, final)
    assert probe["status"] == "pass"
    assert probe["beta_spread"] < 5e-3
    assert probe["K_inf"] < 5e-3


def test_theorem_probe_not_applicable_on_sphere():
    grid = geodesic_sphere().sample(n=32)
    frames, metric, shape, E, maxH = _state(grid)
    from contactgeom.flow import FlowReport
    rep = FlowReport(converged=True, iterations=0, energy=[E], final_max_H=maxH,
                     beta_max=0.0, beta_mean=0.0, beta_spread=0.0)
    probe = theorem_probe(rep, grid)
    assert probe["status"] == "not_applicable"


def test_theorem_probe_inconclusive():
    grid = perturb(clifford(), (1, 2), 0.05).sample(n=32)
    rep, final = descend(grid, FlowConfig(max_iter=0))
    probe = theorem_probe(rep, final)
    assert probe["status"] == "inconclusive"


@pytest.fixture(scope="session")
def flow_run():
    grid = perturb(clifford(), (1, 2), 0.05).sample(n=32)
    return descend(grid, FlowConfig(step=1.0, max_iter=500, tol=1e-3))
