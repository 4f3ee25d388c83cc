"""Observation algebra: exact sine-product integrals versus quadrature."""

import math
import warnings

import numpy as np
import pytest
from scipy.integrate import quad

from nullcontrol import Scalar, SineSeries


class TestScalar:
    def test_inner_and_norm(self):
        a, b = Scalar(2.0 + 1.0j), Scalar(1.0 - 1.0j)
        assert a.inner(b) == (2 + 1j) * (1 + 1j)
        assert a.norm() == pytest.approx(math.sqrt(5.0))

    def test_unobservable_flag(self):
        assert Scalar(0.0).unobservable
        assert Scalar(1e-14).unobservable
        assert not Scalar(1e-12).unobservable

    def test_mixing_with_series_rejected(self):
        with pytest.raises(TypeError):
            Scalar(1.0).inner(SineSeries.single(1, 1.0, (0.0, 1.0)))


class TestSineSeries:
    def test_full_interval_orthonormality(self):
        f = SineSeries.single(3, 1.0, (0.0, 1.0))
        g = SineSeries.single(4, 1.0, (0.0, 1.0))
        assert f.inner(f).real == pytest.approx(1.0, abs=1e-14)
        assert f.inner(g).real == pytest.approx(0.0, abs=1e-14)

    def test_restricted_interval_against_quadrature(self):
        rng = np.random.default_rng(11)
        for _ in range(50):
            a = float(rng.uniform(0.0, 0.6))
            b = float(rng.uniform(a + 0.05, 1.0))
            ms = rng.choice(np.arange(1, 40), size=4, replace=False)
            cf = rng.normal(size=4)
            cg = rng.normal(size=4)
            f = SineSeries(ms, cf.astype(complex), (a, b))
            g = SineSeries(ms, cg.astype(complex), (a, b))
            with warnings.catch_warnings():
                warnings.simplefilter("ignore")  # oscillatory quadrature chatter
                want, err = quad(lambda x: f.evaluate(x).real * g.evaluate(x).real,
                                 a, b, limit=200)
            assert f.inner(g).real == pytest.approx(want, abs=max(1e-10, 10 * err))

    def test_plus_and_scale(self):
        f = SineSeries.single(2, 1.0, (0.2, 0.9))
        g = SineSeries.single(5, -2.0, (0.2, 0.9))
        h = f.plus(g.scaled(0.5))
        assert h.ms.tolist() == [2, 5]
        np.testing.assert_allclose(h.cs, [1.0, -1.0])

    def test_interval_mismatch_rejected(self):
        f = SineSeries.single(1, 1.0, (0.0, 0.5))
        g = SineSeries.single(1, 1.0, (0.5, 1.0))
        with pytest.raises(ValueError):
            f.inner(g)

    def test_norm_squared_consistency(self):
        f = SineSeries(np.array([1, 2, 7]), np.array([1.0, -0.5, 0.25], dtype=complex),
                       (0.1, 0.8))
        assert f.norm() ** 2 == pytest.approx(f.inner(f).real, rel=1e-12)
