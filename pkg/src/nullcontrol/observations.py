"""Observation values B* phi as elements of the control space U.

Two representations cover the whole model gallery: plain scalars (U = C,
boundary/pointwise observations) and finite series over sqrt(2) sin(m pi x)
restricted to a subinterval (internal observations in L^2(omega)).  All
inner products are exact sine-product integrals; quadrature appears only
as an oracle in the tests.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

VANISH_TOL = 1e-13
_SQRT2 = math.sqrt(2.0)


def _cos_primitive(d: np.ndarray, a: float, b: float) -> np.ndarray:
    """int_a^b cos(d pi x) dx, elementwise, with the d = 0 limit."""
    d = np.asarray(d, dtype=float)
    out = np.empty_like(d)
    zero = d == 0
    out[zero] = b - a
    dz = d[~zero]
    out[~zero] = (np.sin(dz * math.pi * b) - np.sin(dz * math.pi * a)) / (dz * math.pi)
    return out


def sine_cross_integral(m, n, a: float, b: float):
    """2 int_a^b sin(m pi x) sin(n pi x) dx (the sqrt(2)-normalized product)."""
    m = np.asarray(m, dtype=float)
    n = np.asarray(n, dtype=float)
    return _cos_primitive(m - n, a, b) - _cos_primitive(m + n, a, b)


@dataclass(frozen=True)
class Scalar:
    """Observation in U = C."""

    value: complex

    def inner(self, other: "Scalar") -> complex:
        if not isinstance(other, Scalar):
            raise TypeError("cannot pair scalar with series observation")
        return complex(self.value) * complex(other.value).conjugate()

    def norm(self) -> float:
        return abs(complex(self.value))

    def scaled(self, c) -> "Scalar":
        return Scalar(complex(c) * complex(self.value))

    def plus(self, other: "Scalar") -> "Scalar":
        return Scalar(complex(self.value) + complex(other.value))

    @property
    def unobservable(self) -> bool:
        return self.norm() < VANISH_TOL


@dataclass(frozen=True)
class SineSeries:
    """sum_m c_m sqrt(2) sin(m pi x) restricted to omega = (a, b)."""

    ms: np.ndarray
    cs: np.ndarray
    interval: tuple

    def __post_init__(self):
        ms = np.asarray(self.ms, dtype=int)
        cs = np.asarray(self.cs, dtype=complex)
        if ms.shape != cs.shape:
            raise ValueError("index/coefficient shape mismatch")
        a, b = self.interval
        if not (0.0 <= a < b <= 1.0):
            raise ValueError("interval must satisfy 0 <= a < b <= 1")
        order = np.argsort(ms)
        object.__setattr__(self, "ms", ms[order])
        object.__setattr__(self, "cs", cs[order])
        object.__setattr__(self, "interval", (float(a), float(b)))

    @classmethod
    def single(cls, m: int, c, interval) -> "SineSeries":
        return cls(np.array([m]), np.array([c], dtype=complex), interval)

    def inner(self, other: "SineSeries") -> complex:
        if not isinstance(other, SineSeries):
            raise TypeError("cannot pair series with scalar observation")
        if self.interval != other.interval:
            raise ValueError("observations live on different intervals")
        a, b = self.interval
        cross = sine_cross_integral(self.ms[:, None], other.ms[None, :], a, b)
        return complex(self.cs @ cross @ other.cs.conj())

    def norm(self) -> float:
        return math.sqrt(max(0.0, self.inner(self).real))

    def scaled(self, c) -> "SineSeries":
        return SineSeries(self.ms.copy(), complex(c) * self.cs, self.interval)

    def plus(self, other: "SineSeries") -> "SineSeries":
        if self.interval != other.interval:
            raise ValueError("observations live on different intervals")
        acc: dict[int, complex] = {}
        for m, c in zip(self.ms.tolist(), self.cs.tolist()):
            acc[m] = acc.get(m, 0.0 + 0.0j) + c
        for m, c in zip(other.ms.tolist(), other.cs.tolist()):
            acc[m] = acc.get(m, 0.0 + 0.0j) + c
        ms = np.array(sorted(acc))
        return SineSeries(ms, np.array([acc[m] for m in ms]), self.interval)

    def evaluate(self, x) -> np.ndarray:
        """Pointwise values (used by the quadrature oracle and CSV export)."""
        x = np.asarray(x, dtype=float)
        return (self.cs[:, None] * _SQRT2 * np.sin(self.ms[:, None] * math.pi * x)).sum(axis=0)

    @property
    def unobservable(self) -> bool:
        return self.norm() < VANISH_TOL


def combine(observations, weights):
    """sum_i weights[i] * observations[i], all of one representation."""
    obs = None
    for w, o in zip(weights, observations):
        term = o.scaled(w)
        obs = term if obs is None else obs.plus(term)
    if obs is None:
        raise ValueError("empty combination")
    return obs
