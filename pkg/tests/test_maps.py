import numpy as np
import pytest

from diskmin.errors import ParameterError
from diskmin.geometry import det2, make_grid, unit_radial, unit_tangent
from diskmin.maps import (
    TabulatedCurve,
    VectorField,
    bump_test_fields,
    cofactor_gradient_u,
    field_from_map,
    gradient_u,
    j_rotate,
    load_curve_csv,
    ncover,
    sample_field,
)


def test_ncover_values_at_zero():
    u = ncover(2)
    assert np.allclose(u.g(0.0), [1.0 / np.sqrt(2.0), 0.0])
    assert np.allclose(u.g_prime(0.0), [0.0, np.sqrt(2.0)])


def test_ncover_incompressibility(rng):
    for N in (2, 3, 5):
        u = ncover(N)
        theta = rng.uniform(0.0, 2.0 * np.pi, 1000)
        wronskian = np.einsum("ti,ti->t", j_rotate(u.g(theta)), u.g_prime(theta))
        assert np.max(np.abs(wronskian - 1.0)) < 1e-12
        assert np.max(np.abs(np.linalg.norm(u.g(theta), axis=1) - 1.0 / np.sqrt(N))) < 1e-12
        u.validate()


def test_ncover_winding_precondition():
    with pytest.raises(ParameterError):
        ncover(1)


def test_gradient_polar_components(rng):
    for N in (2, 3):
        u = ncover(N)
        theta = rng.uniform(0.0, 2.0 * np.pi, 200)
        G = gradient_u(u, theta)
        eR, et = unit_radial(theta), unit_tangent(theta)
        tp = (N - 1) * theta
        rn = np.sqrt(N)
        assert np.max(np.abs(np.einsum("ti,tij,tj->t", eR, G, eR) - np.cos(tp) / rn)) < 1e-12
        assert np.max(np.abs(np.einsum("ti,tij,tj->t", eR, G, et) - (-rn * np.sin(tp)))) < 1e-12
        assert np.max(np.abs(np.einsum("ti,tij,tj->t", et, G, eR) - np.sin(tp) / rn)) < 1e-12
        assert np.max(np.abs(np.einsum("ti,tij,tj->t", et, G, et) - rn * np.cos(tp))) < 1e-12
        assert np.max(np.abs(det2(G) - 1.0)) < 1e-12
        assert np.max(np.abs(np.sum(G**2, axis=(1, 2)) - (1.0 / N + N))) < 1e-12


def test_cofactor_gradient_formula(rng):
    from diskmin.geometry import cofactor

    u = ncover(3)
    theta = rng.uniform(0.0, 2.0 * np.pi, 100)
    assert np.max(np.abs(cofactor(gradient_u(u, theta)) - cofactor_gradient_u(u, theta))) < 1e-13


def test_gradient_has_no_limit_at_origin():
    for N in (2, 3):
        u = ncover(N)
        gap = np.abs(gradient_u(u, 0.0) - gradient_u(u, np.pi / (N - 1)))
        assert np.max(gap) > 0.5  # fixed positive jump independent of R


def test_field_from_map_r_independence(grid_small):
    f = field_from_map(ncover(2), grid_small)
    assert np.max(np.abs(f.grads - f.grads[0])) == 0.0
    assert np.max(np.abs(det2(f.grads) - 1.0)) < 1e-12


class _SwirlDefinition:
    """Closed-form test map with analytic gradient."""

    def value(self, R, theta):
        R = np.asarray(R, dtype=float)
        return np.stack([R**2 * np.cos(theta), R**2 * np.sin(theta)], axis=-1)

    def gradient(self, R, theta):
        # grad = u,_R x e_R + (1/R) u,_theta x e_t
        R = np.asarray(R, dtype=float)
        eR, et = unit_radial(theta), unit_tangent(theta)
        u_r = np.stack([2.0 * R * np.cos(theta), 2.0 * R * np.sin(theta)], axis=-1)
        u_t = np.stack([-(R**2) * np.sin(theta), R**2 * np.cos(theta)], axis=-1)
        return u_r[..., :, None] * eR[..., None, :] + (u_t / R[..., None])[..., :, None] * et[..., None, :]


def test_sample_field_analytic_and_numeric(grid_small):
    analytic = sample_field(_SwirlDefinition(), grid_small)
    numeric = sample_field(_SwirlDefinition().value, grid_small)
    assert np.max(np.abs(analytic.values - numeric.values)) == 0.0
    assert np.max(np.abs(analytic.grads - numeric.grads)) < 1e-8
    assert not analytic.boundary_flag  # |u| = 1 on the boundary circle


def test_sample_field_ncover_det(grid_small):
    u = ncover(2)

    class Def:
        def value(self, R, theta):
            return np.asarray(R)[..., None] * u.g(theta)

        def gradient(self, R, theta):
            return np.broadcast_to(gradient_u(u, theta), np.shape(R) + (2, 2))

    f = sample_field(Def(), grid_small)
    assert np.max(np.abs(det2(f.grads) - 1.0)) < 1e-12


def test_sample_field_constant_is_gradient_free(grid_small):
    f = sample_field(lambda R, theta: np.broadcast_to([0.3, -1.2], np.shape(R) + (2,)), grid_small)
    assert np.max(np.abs(f.grads)) < 1e-10
    assert not f.boundary_flag


def test_bump_battery_support_and_determinism(grid_med):
    fields = bump_test_fields(grid_med, 4, seed=11)
    again = bump_test_fields(grid_med, 4, seed=11)
    for f, g in zip(fields, again):
        assert np.array_equal(f.values, g.values)
        assert f.boundary_flag
        inner = grid_med.radial_nodes <= 2.0 * grid_med.annulus_floor
        assert np.max(np.abs(f.values[inner])) == 0.0
    different = bump_test_fields(grid_med, 4, seed=12)
    assert not np.array_equal(fields[0].values, different[0].values)


def test_bump_battery_gradients_match_finite_differences(grid_med, rng):
    from diskmin.maps import bump_field_map

    spec = bump_field_map(grid_med, [3, 0])
    sampled = bump_test_fields(grid_med, 1, seed=3)[0]
    R = rng.uniform(0.3, 0.8, 60)
    T = rng.uniform(0.0, 2.0 * np.pi, 60)
    h = 1e-6
    ex = np.array([1.0, 0.0])
    ey = np.array([0.0, 1.0])
    scale = 1.0 + np.max(np.abs(spec.gradient(R, T)))
    for axis, step in ((0, ex), (1, ey)):
        x = R * np.cos(T) + h * step[0]
        y = R * np.sin(T) + h * step[1]
        rp, tp = np.hypot(x, y), np.arctan2(y, x)
        x = R * np.cos(T) - h * step[0]
        y = R * np.sin(T) - h * step[1]
        rm, tm = np.hypot(x, y), np.arctan2(y, x)
        fd = (spec.value(rp, tp) - spec.value(rm, tm)) / (2.0 * h)
        assert np.max(np.abs(fd - spec.gradient(R, T)[..., axis])) < 1e-6 * scale
    # the sampled lattice carries exactly the spec's values and gradients
    Rm, Tm = grid_med.node_mesh()
    assert np.array_equal(sampled.values, spec.value(Rm, Tm))
    assert np.array_equal(sampled.grads, spec.gradient(Rm, Tm))


def test_tabulated_curve_matches_closed_form(rng, tmp_path):
    u = ncover(3)
    theta = np.arange(256) * (2.0 * np.pi / 256)
    table = TabulatedCurve(theta, u.g(theta))
    probe = rng.uniform(0.0, 2.0 * np.pi, 100)
    assert np.max(np.abs(table.g(probe) - u.g(probe))) < 1e-12
    assert np.max(np.abs(table.g_prime(probe) - u.g_prime(probe))) < 1e-10
    assert np.max(np.abs(table.g_second(probe) - u.g_second(probe))) < 1e-8
    table.validate()

    import csv

    path = tmp_path / "trace.csv"
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["theta", "g1", "g2"])
        for th, (g1, g2) in zip(theta, u.g(theta)):
            writer.writerow([repr(float(th)), repr(float(g1)), repr(float(g2))])
    loaded = load_curve_csv(path)
    assert np.max(np.abs(loaded.g(probe) - u.g(probe))) < 1e-12

    bad = tmp_path / "bad.csv"
    bad.write_text("theta,g1\n0.0,1.0\n")
    with pytest.raises(ParameterError):
        load_curve_csv(bad)


def test_vector_field_shape_validation(grid_small):
    with pytest.raises(ParameterError):
        VectorField(grid_small, np.zeros((3, 3, 2)), np.zeros(grid_small.shape + (2, 2)))
