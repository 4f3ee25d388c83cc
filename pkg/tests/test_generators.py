"""Sequence rules: merge correctness, precision heads, float views."""

import math

import mpmath as mp
import numpy as np
import pytest

from nullcontrol.generators import make_rule


class TestTwoDiffusionMerge:
    @pytest.mark.parametrize("d", [0.037, 0.3, 2.0, 7.0, 55.0])
    def test_merge_matches_brute_force(self, d):
        rule = make_rule("two_diffusion", d=d, scale=1.0)
        n = 200
        got = [float(v) for v in rule.mp_entries(n)]
        big = sorted([k * k for k in range(1, 400)] + [d * k * k for k in range(1, 400)])
        np.testing.assert_allclose(got, big[:n], rtol=1e-12)
        np.testing.assert_allclose(np.real(rule.float_entries(n)), big[:n], rtol=1e-12)

    def test_float_and_mp_views_agree(self):
        rule = make_rule("two_diffusion", d=2.0, scale=math.pi**2)
        mp_vals = [float(v) for v in rule.mp_entries(60)]
        np.testing.assert_allclose(np.real(rule.float_entries(60)), mp_vals, rtol=1e-12)


class TestPairRules:
    def test_appendix_pairs_resolved_at_head_precision(self):
        rule = make_rule("appendixB", tau=1.0)
        vals = rule.mp_entries(60)
        with mp.workdps(rule.head_dps(60) + 10):
            gap = vals[59] - vals[58]  # pair 30: e^{-900}
            assert float(mp.log(gap)) == pytest.approx(-900.0, rel=1e-12)

    def test_academic_pairs_ordered(self):
        rule = make_rule("academic_lf", tau=0.2)
        vals = rule.mp_entries(12)
        with mp.workdps(rule.head_dps(12) + 10):
            assert all(b > a for a, b in zip(vals, vals[1:]))

    def test_float_view_collapses_harmlessly(self):
        rule = make_rule("appendixB", tau=1.0)
        f = np.real(rule.float_entries(60))
        assert f[58] == f[59]  # pair gap under float resolution

    def test_power_rule_complex(self):
        c = (1 + 1j) / math.sqrt(2.0)
        rule = make_rule("power", c=c, p=2.0)
        v = rule.float_entries(5)
        np.testing.assert_allclose(v[2], 9 * c, rtol=1e-15)

    def test_explicit_rule_bounds(self):
        rule = make_rule("explicit", values=[1.0, 2.0, 5.0])
        assert len(rule.mp_entries(3)) == 3
        with pytest.raises(IndexError):
            rule.mp_entries(4)
