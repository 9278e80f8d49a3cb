"""One-homogeneous maps u = R g(theta), the N-cover, and sampled vector fields."""

from __future__ import annotations

import csv
from dataclasses import dataclass

import numpy as np

from .errors import ParameterError
from .geometry import PolarGrid, outer, unit_radial, unit_tangent
from .periodic import TrigSeries, validate_uniform_angles


def j_rotate(v):
    """Apply the quarter-turn J to batched 2-vectors."""
    v = np.asarray(v)
    return np.stack([-v[..., 1], v[..., 0]], axis=-1)


class BoundaryCurve:
    """2pi-periodic boundary trace g with first and second derivatives.

    The one-homogeneous extension u = R g(theta) is area-preserving exactly
    when J g . g' = 1, which validate() checks on a dense sample.
    """

    winding: int | None = None

    def g(self, theta):  # pragma: no cover - interface
        raise NotImplementedError

    def g_prime(self, theta):  # pragma: no cover - interface
        raise NotImplementedError

    def g_second(self, theta):  # pragma: no cover - interface
        raise NotImplementedError

    def validate(self, samples: int = 720, tol: float = 1e-10) -> None:
        theta = np.arange(samples) * (2.0 * np.pi / samples)
        wronskian = np.einsum("ti,ti->t", j_rotate(self.g(theta)), self.g_prime(theta))
        gap = np.max(np.abs(wronskian - 1.0))
        if gap > tol:
            raise ParameterError(f"trace violates J g . g' = 1 (max gap {gap:.3e})")
        h = 1e-5
        fd1 = (self.g(theta + h) - self.g(theta - h)) / (2.0 * h)
        fd2 = (self.g_prime(theta + h) - self.g_prime(theta - h)) / (2.0 * h)
        scale = 1.0 + np.max(np.abs(self.g_prime(theta)))
        if np.max(np.abs(fd1 - self.g_prime(theta))) > 1e-6 * scale:
            raise ParameterError("g' inconsistent with finite differences of g")
        scale2 = 1.0 + np.max(np.abs(self.g_second(theta)))
        if np.max(np.abs(fd2 - self.g_second(theta))) > 1e-6 * scale2:
            raise ParameterError("g'' inconsistent with finite differences of g'")


class NCoverMap(BoundaryCurve):
    """Trace of the map wrapping the disk N times: g = e_R(N theta)/sqrt(N)."""

    def __init__(self, winding: int):
        self.winding = int(winding)
        self._root = np.sqrt(float(winding))

    def g(self, theta):
        return unit_radial(self.winding * np.asarray(theta, dtype=float)) / self._root

    def g_prime(self, theta):
        return self._root * unit_tangent(self.winding * np.asarray(theta, dtype=float))

    def g_second(self, theta):
        return -self.winding * self._root * unit_radial(self.winding * np.asarray(theta, dtype=float))


def ncover(winding: int) -> NCoverMap:
    if winding < 2:
        raise ParameterError("winding number must be an integer >= 2")
    return NCoverMap(winding)


class CallableCurve(BoundaryCurve):
    """Closed-form trace; missing derivatives fall back to spectral fits."""

    def __init__(self, g, g_prime=None, g_second=None, samples: int = 1024, winding=None):
        self.winding = winding
        self._g = g
        if g_prime is None or g_second is None:
            nodes = np.arange(samples) * (2.0 * np.pi / samples)
            vals = np.asarray(g(nodes), dtype=float)
            series = [TrigSeries.fit(vals[:, i]) for i in range(2)]
            if g_prime is None:
                g_prime = lambda th: np.stack([s.derivative(th, 1) for s in series], axis=-1)
            if g_second is None:
                g_second = lambda th: np.stack([s.derivative(th, 2) for s in series], axis=-1)
        self._g1 = g_prime
        self._g2 = g_second

    def g(self, theta):
        return np.asarray(self._g(theta), dtype=float)

    def g_prime(self, theta):
        return np.asarray(self._g1(theta), dtype=float)

    def g_second(self, theta):
        return np.asarray(self._g2(theta), dtype=float)


class TabulatedCurve(BoundaryCurve):
    """Trace sampled on uniform angles, interpolated spectrally."""

    def __init__(self, theta, values, winding=None):
        theta = np.asarray(theta, dtype=float)
        values = np.asarray(values, dtype=float)
        validate_uniform_angles(theta)
        if values.shape != (theta.size, 2):
            raise ParameterError("trace table must provide two components per angle")
        self.winding = winding
        self._series = [TrigSeries.fit(values[:, i]) for i in range(2)]

    def g(self, theta):
        return np.stack([s.value(theta) for s in self._series], axis=-1)

    def g_prime(self, theta):
        return np.stack([s.derivative(theta, 1) for s in self._series], axis=-1)

    def g_second(self, theta):
        return np.stack([s.derivative(theta, 2) for s in self._series], axis=-1)


def load_curve_csv(path) -> TabulatedCurve:
    """Load a boundary trace from a `theta,g1,g2` table."""
    with open(path, newline="") as fh:
        reader = csv.DictReader(fh)
        required = {"theta", "g1", "g2"}
        if reader.fieldnames is None or not required.issubset(reader.fieldnames):
            missing = sorted(required - set(reader.fieldnames or []))
            raise ParameterError(f"trace table missing columns: {missing}")
        rows = [(float(r["theta"]), float(r["g1"]), float(r["g2"])) for r in reader]
    if not rows:
        raise ParameterError("trace table is empty")
    arr = np.array(rows)
    return TabulatedCurve(arr[:, 0], arr[:, 1:])


def gradient_u(m: BoundaryCurve, theta):
    """Gradient of the one-homogeneous extension: g x e_R + g' x e_t.

    Independent of R; its determinant equals J g . g' = 1 for admissible g.
    """
    return outer(m.g(theta), unit_radial(theta)) + outer(m.g_prime(theta), unit_tangent(theta))


def cofactor_gradient_u(m: BoundaryCurve, theta):
    """cof(grad u) = Jg x e_t - Jg' x e_R."""
    return outer(j_rotate(m.g(theta)), unit_tangent(theta)) - outer(
        j_rotate(m.g_prime(theta)), unit_radial(theta)
    )


def map_values(m: BoundaryCurve, R, theta):
    R = np.asarray(R, dtype=float)
    return R[..., None] * m.g(theta)


@dataclass
class VectorField:
    """A planar map sampled on a PolarGrid with Cartesian gradients."""

    grid: PolarGrid
    values: np.ndarray  # (n_radial, angular_count, 2)
    grads: np.ndarray  # (n_radial, angular_count, 2, 2)
    boundary_flag: bool = False

    def __post_init__(self):
        if self.values.shape != self.grid.shape + (2,):
            raise ParameterError("field values do not match the grid")
        if self.grads.shape != self.grid.shape + (2, 2):
            raise ParameterError("field gradients do not match the grid")

    def radial_derivative(self):
        """d(field)/dR at the nodes, i.e. (grad f) e_R."""
        eR = unit_radial(self.grid.angular_nodes)
        return np.einsum("rtij,tj->rti", self.grads, eR)

    def angular_derivative(self):
        """d(field)/dtheta at the nodes, i.e. R (grad f) e_t."""
        et = unit_tangent(self.grid.angular_nodes)
        return self.grid.radial_nodes[:, None, None] * np.einsum("rtij,tj->rti", self.grads, et)

    def __sub__(self, other: "VectorField") -> "VectorField":
        if other.grid is not self.grid and other.grid.shape != self.grid.shape:
            raise ParameterError("fields live on different grids")
        return VectorField(
            self.grid,
            self.values - other.values,
            self.grads - other.grads,
            boundary_flag=self.boundary_flag and other.boundary_flag,
        )

    def __add__(self, other: "VectorField") -> "VectorField":
        if other.grid is not self.grid and other.grid.shape != self.grid.shape:
            raise ParameterError("fields live on different grids")
        return VectorField(
            self.grid,
            self.values + other.values,
            self.grads + other.grads,
            boundary_flag=self.boundary_flag and other.boundary_flag,
        )


def field_from_map(m: BoundaryCurve, grid: PolarGrid) -> VectorField:
    """Sample u = R g(theta) with its exact (R-independent) gradient."""
    theta = grid.angular_nodes
    values = grid.radial_nodes[:, None, None] * m.g(theta)[None, :, :]
    grads = np.broadcast_to(gradient_u(m, theta), grid.shape + (2, 2)).copy()
    return VectorField(grid, values, grads, boundary_flag=False)


def _barycentric_diff_matrix(x):
    """Spectral differentiation matrix for arbitrary distinct nodes.

    Barycentric weights are computed in log space so large node counts do not
    underflow; only weight ratios enter the matrix.
    """
    x = np.asarray(x, dtype=float)
    diff = x[:, None] - x[None, :]
    np.fill_diagonal(diff, 1.0)
    logw = -np.sum(np.log(np.abs(diff)), axis=1)
    sign = np.prod(np.sign(diff), axis=1)
    logw -= logw.mean()
    w = sign * np.exp(logw)
    D = (w[None, :] / w[:, None]) / diff
    np.fill_diagonal(D, 0.0)
    np.fill_diagonal(D, -D.sum(axis=1))
    return D


def _spectral_theta_derivative(values):
    """d/dtheta along axis 1 for fields sampled on uniform angles."""
    n = values.shape[1]
    coef = np.fft.rfft(values, axis=1)
    k = np.arange(coef.shape[1])
    coef = coef * (1j * k)[None, :, None]
    if n % 2 == 0:
        coef[:, -1, :] = 0.0  # odd-derivative Nyquist mode is not recoverable
    return np.fft.irfft(coef, n=n, axis=1)


def sample_field(definition, grid: PolarGrid) -> VectorField:
    """Sample a closed-form map on the grid.

    `definition` is either a callable value(R, theta) -> (..., 2) or an object
    with value() and gradient() methods.  Without an analytic gradient the
    Cartesian gradient is reconstructed spectrally in theta and with a
    barycentric differentiation matrix in R.
    """
    R, T = grid.node_mesh()
    if hasattr(definition, "value"):
        values = np.asarray(definition.value(R, T), dtype=float)
        boundary_vals = np.asarray(definition.value(np.ones_like(grid.angular_nodes), grid.angular_nodes))
    else:
        values = np.asarray(definition(R, T), dtype=float)
        boundary_vals = np.asarray(definition(np.ones_like(grid.angular_nodes), grid.angular_nodes))
    if values.shape != grid.shape + (2,):
        raise ParameterError("definition must return one 2-vector per node")
    if hasattr(definition, "gradient"):
        grads = np.asarray(definition.gradient(R, T), dtype=float)
    else:
        d_r = np.einsum("rs,stj->rtj", _barycentric_diff_matrix(grid.radial_nodes), values)
        d_t = _spectral_theta_derivative(values)
        eR = unit_radial(grid.angular_nodes)
        et = unit_tangent(grid.angular_nodes)
        grads = outer(d_r, eR[None, :, :]) + outer(d_t / R[..., None], et[None, :, :])
    flag = bool(np.max(np.abs(boundary_vals)) <= 1e-12)
    return VectorField(grid, values, grads, boundary_flag=flag)


class RadialBump:
    """Bump (1 - z^2)^8 supported on [lo, hi].

    The high-order polynomial touchdown keeps Gauss quadrature of bump
    integrands at rounding level from ~128 radial nodes on, which an
    exp(-1/(1-z^2)) profile would not.
    """

    ORDER = 8

    def __init__(self, lo: float, hi: float):
        if not 0.0 <= lo < hi <= 1.0:
            raise ParameterError("bump support must satisfy 0 <= lo < hi <= 1")
        self.lo = float(lo)
        self.hi = float(hi)

    def _z(self, R):
        return (2.0 * np.asarray(R, dtype=float) - (self.lo + self.hi)) / (self.hi - self.lo)

    def value(self, R):
        z = self._z(R)
        return np.where(np.abs(z) < 1.0, np.maximum(0.0, 1.0 - z**2) ** self.ORDER, 0.0)

    def derivative(self, R):
        z = self._z(R)
        chain = 2.0 / (self.hi - self.lo)
        core = -2.0 * self.ORDER * z * np.maximum(0.0, 1.0 - z**2) ** (self.ORDER - 1)
        return np.where(np.abs(z) < 1.0, core * chain, 0.0)


class HarmonicBumpMap:
    """Closed-form field: a sum of radial bumps times single angular
    harmonics, each weighted by a fixed direction vector."""

    def __init__(self, terms):
        self.terms = list(terms)  # (RadialBump, j, p, q, direction)

    def value(self, R, theta):
        R = np.asarray(R, dtype=float)
        theta = np.asarray(theta, dtype=float)
        out = np.zeros(np.broadcast_shapes(R.shape, theta.shape) + (2,))
        for bump, j, p, q, c in self.terms:
            ang = p * np.cos(j * theta) + q * np.sin(j * theta)
            out += (bump.value(R) * ang)[..., None] * c
        return out

    def gradient(self, R, theta):
        R = np.asarray(R, dtype=float)
        theta = np.asarray(theta, dtype=float)
        shape = np.broadcast_shapes(R.shape, theta.shape)
        d_r = np.zeros(shape + (2,))
        d_t = np.zeros(shape + (2,))
        for bump, j, p, q, c in self.terms:
            ang = p * np.cos(j * theta) + q * np.sin(j * theta)
            dang = j * (-p * np.sin(j * theta) + q * np.cos(j * theta))
            d_r += (bump.derivative(R) * ang)[..., None] * c
            d_t += (bump.value(R) * dang)[..., None] * c
        eR = unit_radial(theta)
        et = unit_tangent(theta)
        return outer(d_r, eR) + outer(d_t / np.broadcast_to(R, shape)[..., None], et)


def bump_field_map(grid: PolarGrid, seed, modes=None, max_terms: int = 4) -> HarmonicBumpMap:
    """Draw one deterministic battery member, compactly supported in
    [2 * annulus_floor, 1 - 1/16]."""
    rng = np.random.default_rng(seed)
    lo_min = 2.0 * grid.annulus_floor
    hi_max = 1.0 - 1.0 / 16.0
    if lo_min >= hi_max:
        raise ParameterError("grid too coarse for the bump battery support window")
    if modes is None:
        modes = list(range(0, 9))
    terms = []
    for _ in range(int(rng.integers(2, max_terms + 1))):
        span = hi_max - lo_min
        width = rng.uniform(0.4, 1.0) * span
        lo = lo_min + rng.uniform(0.0, span - width)
        j = int(rng.choice(modes))
        p, q = rng.standard_normal(2)
        if j == 0:
            q = 0.0  # sin(0 theta) carries nothing
        c = rng.standard_normal(2)
        terms.append((RadialBump(lo, lo + width), j, p, q, c))
    return HarmonicBumpMap(terms)


def bump_field(grid: PolarGrid, seed, modes=None, max_terms: int = 4) -> VectorField:
    """Sample one battery member on the grid with analytic gradients."""
    spec = bump_field_map(grid, seed, modes=modes, max_terms=max_terms)
    R, T = grid.node_mesh()
    return VectorField(
        grid, spec.value(R, T), spec.gradient(R, T), boundary_flag=True
    )


def bump_test_fields(grid: PolarGrid, count: int, seed: int, modes=None):
    """Deterministic battery of compactly supported smooth test fields."""
    if count < 1:
        raise ParameterError("battery needs at least one field")
    return [bump_field(grid, [seed, i], modes=modes) for i in range(count)]


def iter_bump_fields(grid: PolarGrid, count: int, seed: int, modes=None):
    """Streaming variant of bump_test_fields for large grids."""
    if count < 1:
        raise ParameterError("battery needs at least one field")
    for i in range(count):
        yield bump_field(grid, [seed, i], modes=modes)
