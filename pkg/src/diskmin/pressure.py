"""Pressure representation, closed forms, and smallness certificates.

For a one-homogeneous stationary point u = R g(theta) the multiplier field
lambda solves a pointwise 2x2 linear system whose right-hand side (h1, h2) is
a contraction of the coefficient tensor, its derivatives, and (g, g', g'').
The polar gradient components are abbreviated s = lambda,_R R and
t = lambda,_theta throughout.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import (
    CompatibilityError,
    InternalConsistencyError,
    ModeError,
    ParameterError,
    SingularSystemError,
)
from .geometry import PolarGrid, outer, power_radial_rule, unit_radial, unit_tangent
from .integrand import PolarDiagonalField, QuadraticIntegrand, TensorField
from .maps import BoundaryCurve, j_rotate
from .maps import ncover as _make_ncover

GENERAL_BOUND_FACTOR = math.sqrt(3.0) / (2.0 * math.sqrt(2.0))

_SINGULAR_TOL = 1e-8


@dataclass(frozen=True)
class PressureGradient:
    """Per-node polar pressure-gradient samples on a grid."""

    grid: PolarGrid
    s: np.ndarray  # lambda,_R * R
    t: np.ndarray  # lambda,_theta

    def __post_init__(self):
        if self.s.shape != self.grid.shape or self.t.shape != self.grid.shape:
            raise ParameterError("pressure-gradient samples do not match the grid")

    @classmethod
    def from_angular_profiles(cls, grid: PolarGrid, s_theta, t_theta) -> "PressureGradient":
        """Broadcast R-independent profiles (the one-homogeneous case)."""
        s = np.broadcast_to(np.asarray(s_theta, dtype=float), grid.shape).copy()
        t = np.broadcast_to(np.asarray(t_theta, dtype=float), grid.shape).copy()
        return cls(grid, s, t)

    def scale(self) -> float:
        return 1.0 + max(float(np.max(np.abs(self.s))), float(np.max(np.abs(self.t))))


@dataclass(frozen=True)
class ClosedFormPressure:
    """lambda(R) = c + k ln R; the gradient has constant polar components
    (s, t) = (k, 0)."""

    c: float = 0.0
    k: float = 0.0

    def value(self, R):
        return self.c + self.k * np.log(np.asarray(R, dtype=float))

    def cartesian_gradient(self, R, theta):
        """grad lambda = (k/R) e_R at the given nodes."""
        R = np.asarray(R, dtype=float)
        return (self.k / R)[..., None] * unit_radial(theta)


@dataclass(frozen=True)
class SampledPressure:
    """Pressure reconstructed on a grid when no closed form applies."""

    grid: PolarGrid
    values: np.ndarray


@dataclass(frozen=True)
class Certificate:
    mode: str
    bound: float
    measured: float
    verdict: str

    @property
    def passed(self) -> bool:
        return self.verdict in ("strict_pass", "boundary_pass")


def _as_tensor_field(m) -> TensorField:
    if isinstance(m, TensorField):
        return m
    if isinstance(m, QuadraticIntegrand):
        return PolarDiagonalField(m)
    raise ParameterError("expected a QuadraticIntegrand or TensorField")


def _contract(T, X, v, w):
    """T_ijkl X_ij (v x w)_kl with batched leading axes."""
    return np.einsum("...ijkl,...ij,...kl->...", T, X, outer(v, w))


def assemble_h_general(m, g: BoundaryCurve, theta, R=1.0):
    """Right-hand side (h1, h2) of the pressure system for general M and g.

    Requires theta-derivatives of the Cartesian tensor and, when M carries
    radial dependence, its R-derivative (zero for the shipped coefficients).
    """
    field = _as_tensor_field(m)
    theta = np.asarray(theta, dtype=float)
    R = np.asarray(R, dtype=float)
    eR = unit_radial(theta)
    et = unit_tangent(theta)
    gv = g.g(theta)
    gp = g.g_prime(theta)
    gpp = g.g_second(theta)

    T = field.tensor(theta, R)
    Tt = field.dtheta(theta, R)
    Tr = field.dr(theta, R)

    X_Rt = outer(eR, et)
    X_tt = outer(et, et)
    X_RR = outer(eR, eR)
    X_tR = outer(et, eR)

    h1 = -(
        _contract(T, X_Rt, gv + gpp, et)
        + _contract(Tt, X_Rt, gv, eR)
        + _contract(Tt, X_Rt, gp, et)
        + R * (_contract(Tr, X_RR, gv, eR) + _contract(Tr, X_RR, gp, et))
    )
    h2 = -(
        _contract(T, X_tt, gv + gpp, et)
        + _contract(Tt, X_tt, gv, eR)
        + _contract(Tt, X_tt, gp, et)
        + R * (_contract(Tr, X_tR, gv, eR) + _contract(Tr, X_tR, gp, et))
    )
    return h1, h2


def assemble_h_ncover(m: QuadraticIntegrand, winding: int, theta):
    """Specialized (h1, h2) for the N-cover trace and diagonal M(theta):

        h1 = sqrt(N) beta' sin(th') + [sqrt(N)(N-1) beta + sqrt(N) delta
             - alpha/sqrt(N)] cos(th')
        h2 = -sqrt(N) delta' cos(th') + [sqrt(N) beta + sqrt(N)(N-1) delta
             - gamma/sqrt(N)] sin(th')

    with th' = (N-1) theta.
    """
    if winding < 2:
        raise ParameterError("winding number must be an integer >= 2")
    theta = np.asarray(theta, dtype=float)
    rn = math.sqrt(float(winding))
    a, b, g, d = m.coefficients(theta)
    _, db, _, dd = m.coefficient_derivatives(theta)
    tp = (winding - 1) * theta
    H1 = rn * (winding - 1) * b + rn * d - a / rn
    H2 = rn * b + rn * (winding - 1) * d - g / rn
    h1 = rn * db * np.sin(tp) + H1 * np.cos(tp)
    h2 = -rn * dd * np.cos(tp) + H2 * np.sin(tp)
    return h1, h2


def closed_form_st_ncover(m: QuadraticIntegrand, winding: int, theta):
    """Explicit solution of the N-cover pressure system:

        s = (beta'-delta') sin(2 th')/2 + (H1 cos^2 th' + H2 sin^2 th')/sqrt(N)
        t = sqrt(N)(H2-H1) sin(2 th')/2 - N (beta' sin^2 th' + delta' cos^2 th')
    """
    if winding < 2:
        raise ParameterError("winding number must be an integer >= 2")
    theta = np.asarray(theta, dtype=float)
    rn = math.sqrt(float(winding))
    a, b, g, d = m.coefficients(theta)
    _, db, _, dd = m.coefficient_derivatives(theta)
    tp = (winding - 1) * theta
    H1 = rn * (winding - 1) * b + rn * d - a / rn
    H2 = rn * b + rn * (winding - 1) * d - g / rn
    sin2, cos2 = np.sin(tp) ** 2, np.cos(tp) ** 2
    half_sin_double = np.sin(2.0 * tp) / 2.0
    s = (db - dd) * half_sin_double + (H1 * cos2 + H2 * sin2) / rn
    t = rn * (H2 - H1) * half_sin_double - winding * (db * sin2 + dd * cos2)
    return s, t


def solve_pointwise(g: BoundaryCurve, h, theta):
    """Solve the 2x2 pressure system for (s, t) at the given angles.

    The system matrix has determinant -(J g . g') = -1 for admissible traces;
    anything smaller than the singular tolerance flags a bad trace.
    """
    h1, h2 = (np.asarray(x, dtype=float) for x in h)
    theta = np.asarray(theta, dtype=float)
    eR = unit_radial(theta)
    et = unit_tangent(theta)
    jg = j_rotate(g.g(theta))
    jgp = j_rotate(g.g_prime(theta))
    a11 = np.einsum("...i,...i->...", jg, eR)
    a12 = -np.einsum("...i,...i->...", jgp, eR)
    a21 = np.einsum("...i,...i->...", jg, et)
    a22 = -np.einsum("...i,...i->...", jgp, et)
    det = a11 * a22 - a12 * a21
    if np.min(np.abs(det)) < _SINGULAR_TOL:
        raise SingularSystemError(
            "pressure system is singular; the trace does not satisfy J g . g' = 1"
        )
    t = (h1 * a22 - a12 * h2) / det
    s = (a11 * h2 - h1 * a21) / det
    return s, t


def pressure_gradient_ncover(m: QuadraticIntegrand, winding: int, grid: PolarGrid) -> PressureGradient:
    """Assemble and solve the N-cover system on the grid's angular nodes."""
    theta = grid.angular_nodes
    h = assemble_h_ncover(m, winding, theta)
    s, t = solve_pointwise(_make_ncover(winding), h, theta)
    return PressureGradient.from_angular_profiles(grid, s, t)


def admissible_a_range(winding: int):
    """Open interval of radial stiffness values with a strictly small pressure."""
    if winding < 2:
        raise ParameterError("winding number must be an integer >= 2")
    return (float(winding**2 - winding), float(winding**2 + winding))


def _angular_cumulative_integral(samples):
    """Antiderivative in theta on uniform nodes, spectral, zero at theta = 0.

    The mean must vanish for the result to be single-valued; the caller
    checks that before integrating.
    """
    n = samples.shape[-1]
    coef = np.fft.rfft(samples, axis=-1) / n
    j = np.arange(1, coef.shape[-1])
    theta = np.arange(n) * (2.0 * np.pi / n)
    A = 2.0 * coef[..., 1:].real
    B = -2.0 * coef[..., 1:].imag
    if n % 2 == 0:
        A[..., -1] *= 0.5
        B[..., -1] = 0.0
    sin_part = np.sin(np.outer(theta, j))
    cos_part = 1.0 - np.cos(np.outer(theta, j))
    return (A / j) @ sin_part.T + (B / j) @ cos_part.T


def reconstruct_lambda(pg: PressureGradient, c: float = 0.0):
    """Recover lambda from its polar gradient samples.

    Returns a ClosedFormPressure when (s, t) = (const, 0); otherwise a
    SampledPressure from path integration, after checking that the data are
    the gradient of a single-valued function.
    """
    grid = pg.grid
    scale = pg.scale()
    loop = np.abs(np.mean(pg.t, axis=1)) * (2.0 * np.pi)
    if np.max(loop) > 1e-9 * scale:
        raise CompatibilityError("angular mean of lambda,_theta is nonzero: lambda would be multivalued")

    r_indep = (
        np.max(np.abs(pg.s - pg.s[0])) <= 1e-10 * scale
        and np.max(np.abs(pg.t - pg.t[0])) <= 1e-10 * scale
    )
    if r_indep:
        s_prof, t_prof = pg.s[0], pg.t[0]
        t_zero = np.max(np.abs(t_prof)) <= 1e-10 * scale
        s_const = np.max(np.abs(s_prof - s_prof.mean())) <= 1e-10 * scale
        if t_zero and s_const:
            return ClosedFormPressure(c=float(c), k=float(s_prof.mean()))
        # mixed partials: d(s)/dtheta must equal R d(t)/dR = 0 here
        if not s_const:
            raise CompatibilityError(
                "lambda,_R R varies with theta while lambda,_theta is R-independent"
            )
        log_r = np.log(grid.radial_nodes)
        values = c + s_prof.mean() * log_r[:, None] + _angular_cumulative_integral(t_prof)[None, :]
        return SampledPressure(grid, values)

    # genuinely R-dependent samples: two trapezoid/spectral paths must agree
    log_r = np.log(grid.radial_nodes)
    radial = np.zeros(grid.shape)
    incr = 0.5 * (pg.s[1:] + pg.s[:-1]) * np.diff(log_r)[:, None]
    radial[:-1] = -np.cumsum(incr[::-1], axis=0)[::-1]
    angular = _angular_cumulative_integral(pg.t)
    lam_a = c + angular[-1][None, :] + radial
    lam_b = c + radial[:, :1] + angular
    if np.max(np.abs(lam_a - lam_b)) > 1e-8 * scale:
        raise CompatibilityError("path integrals of the pressure gradient disagree")
    return SampledPressure(grid, lam_a)


def _single_variable_kind(pg: PressureGradient, tol: float) -> str | None:
    """Return 'radial', 'angular', or None for two-variable data."""
    t_zero = np.max(np.abs(pg.t)) <= tol
    s_theta_indep = np.max(np.abs(pg.s - pg.s.mean(axis=1, keepdims=True))) <= tol
    if t_zero and s_theta_indep:
        return "radial"
    s_zero = np.max(np.abs(pg.s)) <= tol
    t_r_indep = np.max(np.abs(pg.t - pg.t[0])) <= tol
    if s_zero and t_r_indep:
        return "angular"
    return None


def certify(pg: PressureGradient, nu: float, mode: str = "general") -> Certificate:
    """Compare the pressure gradient against the smallness bound.

    The measured quantity is the component-max sup norm of (s, t); the bound
    is sqrt(3)/(2 sqrt(2)) nu in general and nu when lambda provably depends
    on a single variable (checked numerically before the larger bound is
    allowed).
    """
    if nu <= 0.0:
        raise ParameterError("nu must be positive")
    if mode not in ("general", "single_variable"):
        raise ParameterError(f"unknown certificate mode {mode!r}")
    pointwise = np.maximum(np.abs(pg.s), np.abs(pg.t))
    if mode == "single_variable":
        if _single_variable_kind(pg, 1e-9 * pg.scale()) is None:
            raise ModeError(
                "single_variable mode requested but the pressure depends on both R and theta"
            )
        bound = float(nu)
    else:
        bound = GENERAL_BOUND_FACTOR * float(nu)
    eq_tol = 1e-12 * max(1.0, bound)
    if np.all(pointwise <= bound + eq_tol):
        if np.all(np.abs(pointwise - bound) <= eq_tol):
            verdict = "boundary_pass"
        else:
            verdict = "strict_pass"
    else:
        verdict = "fail"
    return Certificate(mode=mode, bound=bound, measured=float(pointwise.max()), verdict=verdict)


def sobolev_norm_pressure(p: ClosedFormPressure, q: float, n_radial: int = 64) -> float:
    """int_B |grad lambda|^q dx = |k|^q 2 pi / (2 - q) for 1 <= q < 2.

    The closed form is cross-checked against a graded radial quadrature of
    |grad lambda|^q (|grad lambda| = |k|/R exactly); disagreement beyond 1e-6
    relative means the quadrature itself is broken.
    """
    if not 1.0 <= q < 2.0:
        raise ParameterError("q must lie in [1, 2)")
    closed = abs(p.k) ** q * 2.0 * np.pi / (2.0 - q)
    _, wr = power_radial_rule(n_radial, q)
    quad = abs(p.k) ** q * 2.0 * np.pi * float(np.sum(wr))
    if closed > 0.0 and abs(quad - closed) > 1e-6 * closed:
        raise InternalConsistencyError(
            f"radial quadrature {quad!r} disagrees with closed form {closed!r}"
        )
    return closed
