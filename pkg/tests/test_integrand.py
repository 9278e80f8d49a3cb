import numpy as np
import pytest

from diskmin.errors import ParameterError
from diskmin.geometry import make_grid
from diskmin.integrand import (
    ConstantTensorField,
    QuadraticIntegrand,
    assemble_cartesian,
    assemble_cartesian_dtheta,
    coercivity_floor,
    eval_bilinear,
    eval_f,
    grad_xi_f,
    seminorm_divergence_probe,
    sobolev_seminorm_M,
)
from diskmin.maps import gradient_u, ncover


def theta_varying_integrand():
    return QuadraticIntegrand.from_callables(
        (lambda th: 2.0 + np.cos(np.asarray(th)), lambda th: -np.sin(np.asarray(th))),
        1.0,
        1.0,
        1.0,
        nu=1.0,
    )


def test_eval_f_identity_matrix():
    m = QuadraticIntegrand.constant(3.0, 1.0)
    for theta in (0.0, 0.9, 4.2):
        assert abs(eval_f(m, theta, np.eye(2)) - 4.0) < 1e-14


def test_eval_f_ncover_constant_density(rng):
    for N in (2, 3, 5):
        a, nu = 3.0, 0.7
        m = QuadraticIntegrand.constant(a, nu)
        theta = rng.uniform(0.0, 2.0 * np.pi, 1000)
        vals = eval_f(m, theta, gradient_u(ncover(N), theta))
        assert np.max(np.abs(vals - nu * (a / N + N))) < 1e-12


def test_eval_f_zero_and_homogeneity(rng):
    m = QuadraticIntegrand.constant(3.0, 1.0)
    assert eval_f(m, 0.3, np.zeros((2, 2))) == 0.0
    xi = rng.standard_normal((100, 2, 2))
    theta = rng.uniform(0.0, 2.0 * np.pi, 100)
    t = rng.standard_normal(100)
    assert np.max(np.abs(eval_f(m, theta, t[:, None, None] * xi) - t**2 * eval_f(m, theta, xi))) < 1e-10


def test_coercivity_pointwise(rng):
    m = theta_varying_integrand()
    theta = rng.uniform(0.0, 2.0 * np.pi, 300)
    xi = rng.standard_normal((300, 2, 2))
    assert np.all(eval_f(m, theta, xi) >= 1.0 * np.sum(xi**2, axis=(1, 2)) - 1e-12)


def test_grad_xi_f_finite_differences(rng):
    m = theta_varying_integrand()
    theta = rng.uniform(0.0, 2.0 * np.pi, 20)
    xi = rng.standard_normal((20, 2, 2))
    H = rng.standard_normal((20, 2, 2))
    step = 1e-4
    fd = (eval_f(m, theta, xi + step * H) - eval_f(m, theta, xi - step * H)) / (2.0 * step)
    pairing = np.einsum("nij,nij->n", grad_xi_f(m, theta, xi), H)
    assert np.max(np.abs(fd - pairing) / (1.0 + np.abs(pairing))) < 1e-8


def test_grad_xi_f_special_cases(rng):
    m = QuadraticIntegrand.constant(3.0, 1.0)
    assert np.allclose(grad_xi_f(m, 1.1, np.zeros((2, 2))), 0.0)
    iso = QuadraticIntegrand.constant(1.0, 2.0)
    xi = rng.standard_normal((10, 2, 2))
    theta = rng.uniform(0.0, 2.0 * np.pi, 10)
    assert np.max(np.abs(grad_xi_f(iso, theta, xi) - 2.0 * 2.0 * xi)) < 1e-13
    # f = grad . xi / 2 for the quadratic form
    m2 = theta_varying_integrand()
    half = 0.5 * np.einsum("nij,nij->n", grad_xi_f(m2, theta, xi), xi)
    assert np.max(np.abs(half - eval_f(m2, theta, xi))) < 1e-12


def test_eval_bilinear_polarization(rng):
    m = theta_varying_integrand()
    theta = rng.uniform(0.0, 2.0 * np.pi, 50)
    xi = rng.standard_normal((50, 2, 2))
    zeta = rng.standard_normal((50, 2, 2))
    via_f = 0.5 * (eval_f(m, theta, xi + zeta) - eval_f(m, theta, xi) - eval_f(m, theta, zeta))
    assert np.max(np.abs(eval_bilinear(m, theta, xi, zeta) - via_f)) < 1e-12


def test_coercivity_floor_examples():
    assert abs(coercivity_floor(QuadraticIntegrand.constant(3.0, 1.0)) - 1.0) < 1e-14
    assert abs(coercivity_floor(QuadraticIntegrand.constant(1.0, 2.0)) - 2.0) < 1e-14
    assert abs(coercivity_floor(theta_varying_integrand(), samples=4096) - 1.0) < 1e-8
    with pytest.raises(ParameterError):
        coercivity_floor(QuadraticIntegrand.constant(3.0, 1.0), samples=4)


def test_non_periodic_inputs_rejected():
    with pytest.raises(ParameterError):
        QuadraticIntegrand.from_callables(lambda th: np.asarray(th), 1.0, 1.0, 1.0, nu=1.0)
    theta = np.linspace(0.0, 2.0 * np.pi, 32)  # endpoint included: not a periodic table
    with pytest.raises(ParameterError):
        QuadraticIntegrand.from_table(theta, theta * 0 + 2, theta * 0 + 1, theta * 0 + 2, theta * 0 + 1, nu=1.0)


def test_assemble_cartesian_isotropic(rng):
    m = QuadraticIntegrand.constant(1.0, 0.8)
    xi = rng.standard_normal((100, 2, 2))
    theta = rng.uniform(0.0, 2.0 * np.pi, 100)
    tensor = assemble_cartesian(m, theta)
    assert np.max(np.abs(tensor.quadratic_form(xi) - 0.8 * np.sum(xi**2, axis=(1, 2)))) < 1e-12


def test_assemble_cartesian_matches_polar_form(rng):
    m = theta_varying_integrand()
    theta = rng.uniform(0.0, 2.0 * np.pi, 1000)
    xi = rng.standard_normal((1000, 2, 2))
    tensor = assemble_cartesian(m, theta)
    assert np.max(np.abs(tensor.quadratic_form(xi) - eval_f(m, theta, xi))) < 1e-12
    assert tensor.major_symmetry_gap() < 1e-14


def test_origin_discontinuity():
    a, nu = 3.0, 1.0
    m = QuadraticIntegrand.constant(a, nu)
    m1111_axis = assemble_cartesian(m, 0.0).components[0, 0, 0, 0]
    m1111_perp = assemble_cartesian(m, np.pi / 2.0).components[0, 0, 0, 0]
    assert abs(m1111_axis - a * nu) < 1e-14
    assert abs(m1111_perp - nu) < 1e-14
    assert abs((m1111_axis - m1111_perp) - (a - 1.0) * nu) < 1e-14


def test_cartesian_dtheta_finite_differences(rng):
    m = theta_varying_integrand()
    theta = rng.uniform(0.0, 2.0 * np.pi, 10)
    h = 1e-6
    fd = (assemble_cartesian(m, theta + h).components - assemble_cartesian(m, theta - h).components) / (2.0 * h)
    assert np.max(np.abs(fd - assemble_cartesian_dtheta(m, theta).components)) < 1e-7


def frame_rotation_norm(a, nu):
    """|d(theta) M| for constant coefficients, verified against FD in the test."""
    return 2.0 * nu * abs(a - 1.0)


def test_sobolev_seminorm_constant_coefficients():
    a, nu = 3.0, 1.0
    m = QuadraticIntegrand.constant(a, nu)
    grid = make_grid(64, 128)
    # independent check of the frame-rotation norm by finite differences
    h = 1e-6
    fd = (assemble_cartesian(m, 0.4 + h).components - assemble_cartesian(m, 0.4 - h).components) / (2.0 * h)
    assert abs(np.sqrt(np.sum(fd**2)) - frame_rotation_norm(a, nu)) < 1e-6
    for q in (1.0, 1.5, 1.9):
        expected = frame_rotation_norm(a, nu) ** q * 2.0 * np.pi / (2.0 - q)
        assert abs(sobolev_seminorm_M(m, q, grid) - expected) < 1e-9 * expected


def test_sobolev_seminorm_isotropic_zero():
    m = QuadraticIntegrand.constant(1.0, 1.0)
    grid = make_grid(32, 64)
    assert sobolev_seminorm_M(m, 1.0, grid) < 1e-14
    assert sobolev_seminorm_M(m, 1.5, grid) < 1e-14


def test_sobolev_seminorm_growth_toward_two():
    m = QuadraticIntegrand.constant(3.0, 1.0)
    grid = make_grid(32, 64)
    vals = {q: sobolev_seminorm_M(m, q, grid) for q in (1.5, 1.9, 1.99)}
    norm = frame_rotation_norm(3.0, 1.0)
    for q, v in vals.items():
        assert abs(v * (2.0 - q) / norm**q - 2.0 * np.pi) < 1e-9
    assert vals[1.99] > vals[1.9] > vals[1.5]
    with pytest.raises(ParameterError):
        sobolev_seminorm_M(m, 2.0, grid)


def test_seminorm_divergence_probe():
    m = QuadraticIntegrand.constant(3.0, 1.0)
    floors = [1e-1, 1e-2, 1e-4, 1e-8]
    vals = seminorm_divergence_probe(m, floors)
    assert vals[1] / vals[0] == pytest.approx(2.0, rel=1e-12)
    assert vals[3] / vals[2] == pytest.approx(2.0, rel=1e-12)
    assert vals[0] > 0.0


def test_constant_tensor_field_shapes():
    comp = assemble_cartesian(QuadraticIntegrand.constant(1.0, 1.0), 0.0).components
    field = ConstantTensorField(comp)
    theta = np.zeros(5)
    assert field.tensor(theta).shape == (5, 2, 2, 2, 2)
    assert np.all(field.dtheta(theta) == 0.0)


def test_csv_roundtrip(tmp_path):
    import csv

    path = tmp_path / "coeffs.csv"
    theta = np.arange(64) * (2.0 * np.pi / 64)
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["theta", "alpha", "beta", "gamma", "delta"])
        for th in theta:
            writer.writerow([repr(float(th)), 3.0, repr(float(1.0 + 0.1 * np.sin(2 * th))), 3.0, 1.0])
    m = QuadraticIntegrand.from_csv(path, nu=1.0)
    probe = np.array([0.0, 0.3, 1.7])
    _, beta, _, _ = m.coefficients(probe)
    assert np.max(np.abs(beta - (1.0 + 0.1 * np.sin(2 * probe)))) < 1e-12
    _, dbeta, _, _ = m.coefficient_derivatives(probe)
    assert np.max(np.abs(dbeta - 0.2 * np.cos(2 * probe))) < 1e-11

    bad = tmp_path / "bad.csv"
    bad.write_text("theta,alpha\n0.0,1.0\n")
    with pytest.raises(ParameterError):
        QuadraticIntegrand.from_csv(bad, nu=1.0)
