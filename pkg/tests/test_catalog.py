"""Catalog entries, perturbations, and sample-file round trips."""

import numpy as np
import pytest

from contactgeom import (AmplitudeTooLarge, OffSphere, ParseError, RangeError,
                         clifford, contact_angle_field, geodesic_sphere,
                         load_samples, perturb, r_torus, willmore_energy)
from contactgeom.catalog import build, describe
from contactgeom.sampleio import write_samples
from contactgeom.surface import sample, tangent_fields

RNG = np.random.default_rng(3)


def test_clifford_point_values():
    ent = clifford()
    c = np.sqrt(2) / 2
    p = ent.point(np.array(0.0), np.array(0.0))
    assert np.allclose(p, [c, 0, c, 0])
    U = RNG.uniform(0, 2 * np.pi, size=100)
    V = RNG.uniform(0, 2 * np.pi, size=100)
    pts = ent.point(U, V)
    z1 = np.hypot(pts[..., 0], pts[..., 1])
    z2 = np.hypot(pts[..., 2], pts[..., 3])
    assert np.max(np.abs(z1 - c)) < 1e-15
    assert np.max(np.abs(z2 - c)) < 1e-15


def test_clifford_ground_truth_beta():
    ent = clifford()
    assert ent.ground_truth["beta"] == 0.0
    ff = contact_angle_field(ent.sample(n=32))
    assert np.max(np.abs(ff.beta)) < 1e-12


def test_geodesic_sphere_on_y2_zero():
    ent = geodesic_sphere()
    grid = ent.sample(n=32)
    assert np.max(np.abs(grid.points[..., 3])) == 0.0
    # angle at the equator row: x2=0 gives beta = 0 under the signed convention
    ff = contact_angle_field(grid)
    x2 = grid.points[..., 2]
    beta_truth = ent.ground_truth["beta"](grid.points)
    assert np.max(np.abs(ff.beta - beta_truth)) < 1e-10


def test_geodesic_sphere_e1_closed_form():
    ent = geodesic_sphere()
    grid = ent.sample(n=32)
    ff = contact_angle_field(grid)
    pts = grid.points
    x1, y1, x2 = pts[..., 0], pts[..., 1], pts[..., 2]
    denom = np.sqrt(1 - x2 ** 2)
    e1_closed = np.stack([-x1 * x2 / denom, -y1 * x2 / denom, denom,
                          np.zeros_like(x1)], axis=-1)
    dots = np.abs(np.sum(ff.e1 * e1_closed, -1))
    assert np.max(np.abs(dots - 1.0)) < 1e-10  # matches up to sign


def test_analytic_partials_match_fd():
    for ent in (clifford(), geodesic_sphere(), r_torus(0.9)):
        grid = ent.sample(n=64)
        fd = sample(lambda U, V: ent.point(U, V), grid.spec)
        Xu_a, Xv_a = tangent_fields(grid)
        Xu_f, Xv_f = tangent_fields(fd)
        assert np.max(np.abs(Xu_a - Xu_f)) < 1e-7
        assert np.max(np.abs(Xv_a - Xv_f)) < 1e-7


def test_r_torus_matches_clifford_at_quarter_pi():
    a = r_torus(np.pi / 4).sample(n=16)
    b = clifford().sample(n=16)
    assert np.max(np.abs(a.points - b.points)) < 1e-15


def test_r_torus_mean_curvature_value():
    ent = r_torus(np.pi / 3)
    assert ent.ground_truth["H_abs"] == pytest.approx(0.5773502691896257, abs=1e-12)


def test_r_torus_range_error():
    with pytest.raises(RangeError):
        r_torus(0.01)
    with pytest.raises(RangeError):
        r_torus(np.pi / 2)


def test_perturb_identity_at_zero():
    base = clifford()
    ent = perturb(base, (1, 2), 0.0)
    g0 = base.sample(n=16)
    g1 = ent.sample(g0.spec)
    assert np.max(np.abs(g0.points - g1.points)) < 1e-15


def test_perturb_positive_energy():
    ent = perturb(clifford(), (1, 2), 0.05)
    assert ent.partials_are_fd
    grid = ent.sample(n=32)
    assert grid.partials is None
    assert willmore_energy(grid) > 1e-4


def test_perturb_amplitude_guard():
    with pytest.raises(AmplitudeTooLarge):
        perturb(clifford(), (1, 1), 0.5)
    with pytest.raises(RangeError):
        perturb(geodesic_sphere(), (1, 1), 0.05)  # not doubly periodic


def test_blend_build_registry():
    assert build("rtorus", {"r": 0.9}).params["r"] == 0.9
    assert build("r_torus", {}).name == "rtorus"
    with pytest.raises(KeyError):
        build("nosuch")
    pert = build("clifford", {"eps": 0.05})
    assert "bump" in pert.name
    listing = describe()
    assert {e["name"] for e in listing} == {"clifford", "geodesic_sphere", "rtorus"}


# ------------------------------------------------------------- sample files

def test_sample_file_round_trip(tmp_path):
    grid = clifford().sample(n=32)
    path = tmp_path / "clifford.s3"
    write_samples(grid, str(path))
    back = load_samples(str(path))
    assert back.spec.topology_u == "periodic"
    assert back.spec.n_u == 32 and back.spec.n_v == 32
    assert np.max(np.abs(back.points - grid.points)) < 1e-12
    ff0 = contact_angle_field(grid)
    ff1 = contact_angle_field(back)
    assert np.max(np.abs(ff0.beta - ff1.beta)) < 1e-6


def test_sample_file_chart_round_trip(tmp_path):
    grid = geodesic_sphere().sample(n=32)
    path = tmp_path / "sphere.s3"
    write_samples(grid, str(path))
    back = load_samples(str(path))
    assert back.spec.topology_u == "chart"
    assert back.spec.topology_v == "periodic"
    ff0 = contact_angle_field(grid)
    ff1 = contact_angle_field(back)
    assert np.max(np.abs(ff0.beta - ff1.beta)) < 1e-6


def test_sample_file_wrong_columns(tmp_path):
    path = tmp_path / "bad.s3"
    grid = clifford().sample(n=8)
    write_samples(grid, str(path))
    lines = path.read_text().splitlines()
    lines[3] = "0.0 1.0 2.0"
    path.write_text("\n".join(lines) + "\n")
    with pytest.raises(ParseError) as err:
        load_samples(str(path))
    assert err.value.line == 4


def test_sample_file_off_sphere_names_node(tmp_path):
    path = tmp_path / "bad.s3"
    grid = clifford().sample(n=8)
    pts = grid.points.copy()
    pts[2, 3] *= 0.9
    write_samples(grid.with_points(pts), str(path))
    with pytest.raises(OffSphere) as err:
        load_samples(str(path))
    assert err.value.node == (2, 3)


def test_sample_file_bad_header(tmp_path):
    path = tmp_path / "bad.s3"
    path.write_text("NOTAFORMAT\n")
    with pytest.raises(ParseError):
        load_samples(str(path))
