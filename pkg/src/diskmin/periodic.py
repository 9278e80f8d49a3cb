"""2pi-periodic scalar functions with values and derivatives.

Constants and closed-form callables are wrapped directly; uniformly sampled
tables get trigonometric interpolation through the FFT, exact for band-limited
data.
"""

from __future__ import annotations

import numpy as np

from .errors import ParameterError

_EVAL_CHUNK = 16384


class TrigSeries:
    """Finite cosine/sine series a0 + sum_j (A_j cos j theta + B_j sin j theta)."""

    def __init__(self, a0: float, cos_coef, sin_coef):
        self.a0 = float(a0)
        self.cos_coef = np.asarray(cos_coef, dtype=float)
        self.sin_coef = np.asarray(sin_coef, dtype=float)

    @classmethod
    def fit(cls, samples) -> "TrigSeries":
        """Interpolate uniform samples on [0, 2pi) exactly."""
        v = np.asarray(samples, dtype=float)
        m = v.size
        if m < 4:
            raise ParameterError("need at least 4 samples for a periodic table")
        c = np.fft.rfft(v) / m
        a0 = c[0].real
        cos_coef = 2.0 * c[1:].real
        sin_coef = -2.0 * c[1:].imag
        if m % 2 == 0:
            cos_coef[-1] *= 0.5  # Nyquist mode appears once in the DFT
            sin_coef[-1] = 0.0
        return cls(a0, cos_coef, sin_coef)

    def _eval(self, theta, order: int):
        theta = np.asarray(theta, dtype=float)
        flat = np.ravel(theta)
        out = np.empty_like(flat)
        j = np.arange(1, self.cos_coef.size + 1, dtype=float)
        if order == 0:
            ca, sa = self.cos_coef, self.sin_coef
            base = self.a0
        elif order == 1:
            # d/dth [A cos j th + B sin j th] = jB cos j th - jA sin j th
            ca, sa = j * self.sin_coef, -j * self.cos_coef
            base = 0.0
        elif order == 2:
            ca, sa = -(j**2) * self.cos_coef, -(j**2) * self.sin_coef
            base = 0.0
        else:
            raise ParameterError("derivative order must be 0, 1, or 2")
        for lo in range(0, flat.size, _EVAL_CHUNK):
            th = flat[lo : lo + _EVAL_CHUNK]
            ang = np.outer(th, j)
            out[lo : lo + _EVAL_CHUNK] = base + np.cos(ang) @ ca + np.sin(ang) @ sa
        return out.reshape(theta.shape) if theta.shape else float(out[0])

    def value(self, theta):
        return self._eval(theta, 0)

    def derivative(self, theta, order: int = 1):
        return self._eval(theta, order)


class Coefficient:
    """Periodic scalar coefficient with a first derivative."""

    def value(self, theta):  # pragma: no cover - interface
        raise NotImplementedError

    def derivative(self, theta):  # pragma: no cover - interface
        raise NotImplementedError


class ConstantCoefficient(Coefficient):
    def __init__(self, c: float):
        self.c = float(c)

    def value(self, theta):
        return np.full(np.shape(theta), self.c) if np.ndim(theta) else self.c

    def derivative(self, theta):
        return np.zeros(np.shape(theta)) if np.ndim(theta) else 0.0


class CallableCoefficient(Coefficient):
    """Closed-form coefficient; derivative analytic if given, else spectral."""

    def __init__(self, func, deriv=None, samples: int = 512):
        self.func = func
        probe = np.linspace(0.0, 2.0 * np.pi, 17)
        gap = np.max(np.abs(np.asarray(func(probe)) - np.asarray(func(probe + 2.0 * np.pi))))
        if not gap <= 1e-9 * (1.0 + np.max(np.abs(func(probe)))):
            raise ParameterError("coefficient function is not 2pi-periodic")
        if deriv is not None:
            self.deriv = deriv
        else:
            nodes = np.arange(samples) * (2.0 * np.pi / samples)
            series = TrigSeries.fit(np.asarray(func(nodes), dtype=float))
            self.deriv = lambda th: series.derivative(th)

    def value(self, theta):
        return self.func(theta)

    def derivative(self, theta):
        return self.deriv(theta)


class TableCoefficient(Coefficient):
    """Uniformly sampled periodic table with spectral interpolation."""

    def __init__(self, theta, values):
        theta = np.asarray(theta, dtype=float)
        values = np.asarray(values, dtype=float)
        validate_uniform_angles(theta)
        if theta.shape != values.shape:
            raise ParameterError("table angles and values must match in length")
        self.series = TrigSeries.fit(values)

    def value(self, theta):
        return self.series.value(theta)

    def derivative(self, theta):
        return self.series.derivative(theta)


def validate_uniform_angles(theta) -> None:
    """Require strictly increasing uniform nodes covering [0, 2pi)."""
    theta = np.asarray(theta, dtype=float)
    if theta.ndim != 1 or theta.size < 4:
        raise ParameterError("angle column must be 1d with at least 4 entries")
    if not np.all(np.diff(theta) > 0.0):
        raise ParameterError("angles must be strictly increasing")
    if theta[0] < 0.0 or theta[-1] >= 2.0 * np.pi:
        raise ParameterError("angles must lie in [0, 2pi)")
    step = 2.0 * np.pi / theta.size
    expected = theta[0] + step * np.arange(theta.size)
    if np.max(np.abs(theta - expected)) > 1e-9:
        raise ParameterError("angles must be uniformly spaced (non-periodic table)")


def as_coefficient(obj) -> Coefficient:
    if isinstance(obj, Coefficient):
        return obj
    if np.isscalar(obj):
        return ConstantCoefficient(float(obj))
    if callable(obj):
        return CallableCoefficient(obj)
    raise ParameterError(f"cannot interpret {obj!r} as a periodic coefficient")
