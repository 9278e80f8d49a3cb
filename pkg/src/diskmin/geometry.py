"""Polar frames, quadrature grids on the unit disk, and 2x2 matrix algebra.

Grids are tensor products of a radial rule on (0, 1) and uniformly spaced
angles on [0, 2pi).  The radial nodes never touch R = 0 because downstream
integrands carry dx/R and dx/R^2 weights that are integrable but pointwise
singular at the origin.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import ParameterError

J = np.array([[0.0, -1.0], [1.0, 0.0]])


def unit_radial(theta):
    """Unit vector (cos theta, sin theta); theta may be an array."""
    theta = np.asarray(theta, dtype=float)
    return np.stack([np.cos(theta), np.sin(theta)], axis=-1)


def unit_tangent(theta):
    """Unit vector (-sin theta, cos theta), the J-rotation of unit_radial."""
    theta = np.asarray(theta, dtype=float)
    return np.stack([-np.sin(theta), np.cos(theta)], axis=-1)


@dataclass(frozen=True)
class Frame:
    """Orthonormal polar frame at one angle, plus its N-fold winding."""

    theta: float
    winding: int
    e_R: np.ndarray
    e_theta: np.ndarray
    e_NR: np.ndarray
    e_Ntheta: np.ndarray

    @classmethod
    def at(cls, theta: float, winding: int = 1) -> "Frame":
        if winding < 1:
            raise ParameterError("winding number must be a positive integer")
        return cls(
            theta=float(theta),
            winding=int(winding),
            e_R=unit_radial(theta),
            e_theta=unit_tangent(theta),
            e_NR=unit_radial(winding * theta),
            e_Ntheta=unit_tangent(winding * theta),
        )


@dataclass(frozen=True)
class PolarGrid:
    """Tensor-product quadrature grid on the unit disk, open at the origin.

    radial_nodes/radial_weights give a rule for integrals dR over (0, 1);
    angles are uniform with weight 2pi/angular_count each, which integrates
    trigonometric polynomials below the node count exactly.
    """

    radial_nodes: np.ndarray
    radial_weights: np.ndarray
    angular_count: int
    rule: str = "gauss"
    annulus_floor: float = field(init=False)

    def __post_init__(self):
        r = np.asarray(self.radial_nodes, dtype=float)
        w = np.asarray(self.radial_weights, dtype=float)
        if r.ndim != 1 or r.shape != w.shape:
            raise ParameterError("radial nodes and weights must be matching 1d arrays")
        if not (np.all(r > 0.0) and np.all(r <= 1.0)):
            raise ParameterError("radial nodes must lie in (0, 1]")
        if not np.all(np.diff(r) > 0.0):
            raise ParameterError("radial nodes must be strictly increasing")
        if self.angular_count < 4:
            raise ParameterError("angular_count must be at least 4")
        object.__setattr__(self, "radial_nodes", r)
        object.__setattr__(self, "radial_weights", w)
        object.__setattr__(self, "annulus_floor", float(r[0]))

    @property
    def n_radial(self) -> int:
        return self.radial_nodes.size

    @property
    def shape(self) -> tuple:
        return (self.n_radial, self.angular_count)

    @property
    def angular_nodes(self) -> np.ndarray:
        return np.arange(self.angular_count) * (2.0 * np.pi / self.angular_count)

    @property
    def angular_weight(self) -> float:
        return 2.0 * np.pi / self.angular_count

    def node_mesh(self):
        """(R, theta) arrays of shape (n_radial, angular_count)."""
        return np.meshgrid(self.radial_nodes, self.angular_nodes, indexing="ij")

    def integrate(self, samples, inverse_radial_power: int = 0) -> float:
        """Quadrature of samples (n_radial, angular_count) against dx/R^k.

        dx is the area element R dR dtheta; inverse_radial_power k shifts the
        radial weight to R^(1-k).
        """
        samples = np.asarray(samples)
        if samples.shape[:2] != self.shape:
            raise ParameterError(
                f"samples shaped {samples.shape} do not match grid {self.shape}"
            )
        wr = self.radial_weights * self.radial_nodes ** (1 - inverse_radial_power)
        return float(np.einsum("i,ij->", wr, samples) * self.angular_weight)


def make_grid(n_radial: int, n_angular: int, rule: str = "gauss") -> PolarGrid:
    """Build a disk quadrature grid.

    gauss puts Gauss-Legendre nodes on (0, 1) (exact for radial polynomials of
    degree <= 2*n_radial - 1); midpoint puts cell midpoints (order 2, useful
    for convergence ladders with a visible rate).
    """
    if n_radial < 2:
        raise ParameterError("n_radial must be at least 2")
    if n_angular < 4:
        raise ParameterError("n_angular must be at least 4")
    if rule == "gauss":
        x, w = np.polynomial.legendre.leggauss(n_radial)
        nodes = 0.5 * (x + 1.0)
        weights = 0.5 * w
    elif rule == "midpoint":
        nodes = (np.arange(n_radial) + 0.5) / n_radial
        weights = np.full(n_radial, 1.0 / n_radial)
    else:
        raise ParameterError(f"unknown radial rule {rule!r}")
    return PolarGrid(nodes, weights, int(n_angular), rule=rule)


def cofactor(A):
    """Cofactor of a 2x2 matrix (batched over leading axes).

    Satisfies A cof(A)^T = det(A) I and the polarization identity
    det(A+B) = det A + cof A . B + det B.
    """
    A = np.asarray(A)
    out = np.empty_like(A)
    out[..., 0, 0] = A[..., 1, 1]
    out[..., 0, 1] = -A[..., 1, 0]
    out[..., 1, 0] = -A[..., 0, 1]
    out[..., 1, 1] = A[..., 0, 0]
    return out


def det2(A):
    """Determinant of a 2x2 matrix (batched over leading axes)."""
    A = np.asarray(A)
    return A[..., 0, 0] * A[..., 1, 1] - A[..., 0, 1] * A[..., 1, 0]


def polar_components(xi, theta):
    """Components of xi in the rotating matrix basis at angle theta.

    Returns (xi_RR, xi_Rt, xi_tR, xi_tt) with xi_ab = e_a . (xi e_b); theta
    broadcasts against the leading axes of xi.
    """
    eR = unit_radial(theta)
    et = unit_tangent(theta)
    xi = np.asarray(xi, dtype=float)
    xi_RR = np.einsum("...i,...ij,...j->...", eR, xi, eR)
    xi_Rt = np.einsum("...i,...ij,...j->...", eR, xi, et)
    xi_tR = np.einsum("...i,...ij,...j->...", et, xi, eR)
    xi_tt = np.einsum("...i,...ij,...j->...", et, xi, et)
    return xi_RR, xi_Rt, xi_tR, xi_tt


def outer(u, v):
    """Tensor product u (x) v for batched 2-vectors."""
    return np.asarray(u)[..., :, None] * np.asarray(v)[..., None, :]


def power_radial_rule(n: int, q: float):
    """Nodes/weights for integrals of the form int_0^1 f(R) R^(1-q) dR, q < 2.

    Substituting R = u^(2/(2-q)) turns the pure power into a linear integrand,
    so Gauss-Legendre in u handles the endpoint singularity; the rule is exact
    for f constant and spectrally accurate for smooth f.
    """
    if not 0.0 <= q < 2.0:
        raise ParameterError("exponent q must lie in [0, 2)")
    s = 2.0 / (2.0 - q)
    x, w = np.polynomial.legendre.leggauss(max(n, 2))
    u = 0.5 * (x + 1.0)
    uw = 0.5 * w
    nodes = u**s
    weights = uw * s * u ** (s * (2.0 - q) - 1.0)
    return nodes, weights
