"""Angular mode decomposition and the identity/inequality checks built on it.

The convention is reconstruction-exact: the zero mode is the plain angular
mean and, for j >= 1, field = zero_mode + sum_j (A_j cos j theta +
B_j sin j theta) holds at the nodes for band-limited fields.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import AliasingError, ParameterError, SupportError
from .geometry import PolarGrid, cofactor, det2, outer, unit_radial
from .maps import VectorField
from .pressure import ClosedFormPressure


@dataclass(frozen=True)
class FourierDecomposition:
    grid: PolarGrid
    zero_mode: np.ndarray  # (n_radial, 2)
    cos_modes: np.ndarray  # (j_max, n_radial, 2)
    sin_modes: np.ndarray  # (j_max, n_radial, 2)
    j_max: int

    def reconstruct(self) -> np.ndarray:
        theta = self.grid.angular_nodes
        out = np.repeat(self.zero_mode[:, None, :], theta.size, axis=1)
        for j in range(1, self.j_max + 1):
            out += self.cos_modes[j - 1][:, None, :] * np.cos(j * theta)[None, :, None]
            out += self.sin_modes[j - 1][:, None, :] * np.sin(j * theta)[None, :, None]
        return out

    def mode_values(self, j: int) -> np.ndarray:
        """Node values of the single-mode field (j = 0 gives the zero mode)."""
        theta = self.grid.angular_nodes
        if j == 0:
            return np.repeat(self.zero_mode[:, None, :], theta.size, axis=1)
        if not 1 <= j <= self.j_max:
            raise ParameterError(f"mode {j} outside the decomposition range")
        return (
            self.cos_modes[j - 1][:, None, :] * np.cos(j * theta)[None, :, None]
            + self.sin_modes[j - 1][:, None, :] * np.sin(j * theta)[None, :, None]
        )


def _angular_modes(values: np.ndarray, j_max: int):
    """(a0, A, B) along axis 1 of (n_radial, n_angular, 2) samples."""
    n = values.shape[1]
    coef = np.fft.rfft(values, axis=1) / n
    a0 = coef[:, 0, :].real
    A = 2.0 * coef[:, 1 : j_max + 1, :].real
    B = -2.0 * coef[:, 1 : j_max + 1, :].imag
    return a0, np.swapaxes(A, 0, 1), np.swapaxes(B, 0, 1)


def decompose(f: VectorField, j_max: int) -> FourierDecomposition:
    if j_max < 1:
        raise ParameterError("j_max must be at least 1")
    if f.grid.angular_count < 2 * j_max + 2:
        raise AliasingError(
            f"{f.grid.angular_count} angular nodes cannot resolve modes up to {j_max}"
        )
    a0, A, B = _angular_modes(f.values, j_max)
    return FourierDecomposition(f.grid, a0, A, B, int(j_max))


def zero_mode_radial_slope(f: VectorField) -> np.ndarray:
    """Exact d/dR of the zero mode: the angular mean of (grad f) e_R."""
    return f.radial_derivative().mean(axis=1)


def zero_mode_det(f: VectorField) -> float:
    """Max |det grad| of the zero-mode field; rank-one gradients make it 0."""
    slope = zero_mode_radial_slope(f)
    eR = unit_radial(f.grid.angular_nodes)
    grad0 = outer(slope[:, None, :], eR[None, :, :])
    return float(np.max(np.abs(det2(grad0))))


def parseval_gradient(f: VectorField, j_max: int):
    """Dirichlet energy of f versus the sum over its angular-mode fields.

    Radial derivatives of the mode amplitudes come from decomposing the
    sampled radial derivative (exact for band-limited fields), so both sides
    share the same radial quadrature.
    """
    grid = f.grid
    lhs = grid.integrate(np.sum(f.grads**2, axis=(2, 3)))
    a0, A, B = _angular_modes(f.values, j_max)
    da0, dA, dB = _angular_modes(f.radial_derivative(), j_max)
    wr = grid.radial_weights
    r = grid.radial_nodes
    rhs = 2.0 * np.pi * float(np.sum(wr * r * np.sum(da0**2, axis=1)))
    for j in range(1, j_max + 1):
        slope_sq = np.sum(dA[j - 1] ** 2 + dB[j - 1] ** 2, axis=1)
        amp_sq = np.sum(A[j - 1] ** 2 + B[j - 1] ** 2, axis=1)
        rhs += np.pi * float(np.sum(wr * (r * slope_sq + j**2 * amp_sq / r)))
    return lhs, rhs


def _require_inner_support(f: VectorField) -> None:
    scale = 1.0 + float(np.max(np.abs(f.values)))
    if np.max(np.abs(f.values[0])) > 1e-10 * scale:
        raise SupportError(
            "field is nonzero at the innermost radial ring; weighted integrals "
            "need support above the annulus floor"
        )


def buckling_check(f: VectorField):
    """Both sides of the angular-mode lower bound

        int_B R^-2 |f~,_theta|^2 dx >= int_B R^-2 |f~|^2 dx

    for the zero-mode-free part f~; equality exactly on pure first modes.
    """
    _require_inner_support(f)
    grid = f.grid
    ftheta = f.angular_derivative()  # zero mode is theta-free, so f~,_theta = f,_theta
    ftilde = f.values - f.values.mean(axis=1, keepdims=True)
    lhs = grid.integrate(np.sum(ftheta**2, axis=2), inverse_radial_power=2)
    rhs = grid.integrate(np.sum(ftilde**2, axis=2), inverse_radial_power=2)
    return lhs, rhs


def identity_v_check(phi: VectorField, lam: ClosedFormPressure, grid: PolarGrid) -> float:
    """Residual of int lambda det grad(phi) dx =
    -1/2 int (cof grad(phi) grad lambda) . phi dx for boundary-vanishing phi."""
    if not phi.boundary_flag:
        raise ParameterError("identity requires a boundary-vanishing field")
    _require_inner_support(phi)
    R, T = grid.node_mesh()
    lhs = grid.integrate(lam.value(R) * det2(phi.grads))
    grad_lam = lam.cartesian_gradient(R, T)
    pushed = np.einsum("rtij,rtj->rti", cofactor(phi.grads), grad_lam)
    rhs = -0.5 * grid.integrate(np.einsum("rti,rti->rt", pushed, phi.values))
    return abs(lhs - rhs) / (1.0 + abs(lhs))


def identity_vi_check(phi: VectorField, lam: ClosedFormPressure, grid: PolarGrid) -> float:
    """Residual of the zero-mode-split variant:

    int lambda det grad(phi) dx = -1/2 int (cof grad(phi^0) grad lambda) . phi~ dx
                                  -1/2 int (cof grad(phi) grad lambda) . phi~ dx
    """
    if not phi.boundary_flag:
        raise ParameterError("identity requires a boundary-vanishing field")
    _require_inner_support(phi)
    R, T = grid.node_mesh()
    lhs = grid.integrate(lam.value(R) * det2(phi.grads))
    grad_lam = lam.cartesian_gradient(R, T)
    slope = zero_mode_radial_slope(phi)
    grad0 = outer(slope[:, None, :], unit_radial(grid.angular_nodes)[None, :, :])
    phitilde = phi.values - phi.values.mean(axis=1, keepdims=True)
    pushed0 = np.einsum("rtij,rtj->rti", cofactor(grad0), grad_lam)
    pushed = np.einsum("rtij,rtj->rti", cofactor(phi.grads), grad_lam)
    rhs = -0.5 * grid.integrate(np.einsum("rti,rti->rt", pushed0 + pushed, phitilde))
    return abs(lhs - rhs) / (1.0 + abs(lhs))


def dump_modes_csv(path, decomposition: FourierDecomposition) -> None:
    """Write the `R,j,A1,A2,B1,B2` mode table."""
    import csv

    def fmt(x):
        return repr(float(x))

    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["R", "j", "A1", "A2", "B1", "B2"])
        r = decomposition.grid.radial_nodes
        for i, radius in enumerate(r):
            writer.writerow([fmt(radius), 0, fmt(decomposition.zero_mode[i, 0]),
                             fmt(decomposition.zero_mode[i, 1]), fmt(0.0), fmt(0.0)])
            for j in range(1, decomposition.j_max + 1):
                A = decomposition.cos_modes[j - 1, i]
                B = decomposition.sin_modes[j - 1, i]
                writer.writerow([fmt(radius), j, fmt(A[0]), fmt(A[1]), fmt(B[0]), fmt(B[1])])
