"""Model gallery: spectra, observations, coupling integrals, closed forms."""

import math
import warnings

import numpy as np
import pytest
from scipy.integrate import quad

from nullcontrol import (
    PiecewiseConstant,
    academic_lf,
    block_2x2,
    cascade_boundary_q,
    cascade_internal_q,
    check_hypotheses,
    harmonic_oscillator,
    pointwise_heat,
    two_diffusion_boundary,
    two_diffusion_pointwise,
)
from nullcontrol.errors import DegenerateB, RationalRootWarning, SupportOverlap, SynthesisUnsupported

PI2 = math.pi**2
SQRT2 = math.sqrt(2.0)


class TestPointwiseHeat:
    def test_half_point_kills_even_modes(self):
        model = pointwise_heat(0.5)
        modes = model.modes(4)
        assert modes[1].unobservable and modes[3].unobservable
        assert not modes[0].unobservable

    def test_third_point_kills_multiples_of_three(self):
        model = pointwise_heat(1.0 / 3.0)
        modes = model.modes(9)
        for m in modes:
            assert m.unobservable == (m.k % 3 == 0)

    def test_quadratic_irrational_tail_small(self):
        model = pointwise_heat(math.sqrt(2.0) - 1.0)
        prof = model.tmin_profile(200)
        assert np.all(np.isfinite(prof.values))
        assert prof.tail_estimate <= 0.05

    def test_rejects_bad_point(self):
        with pytest.raises(ValueError):
            pointwise_heat(0.0)


class TestPiecewiseConstant:
    def test_sin2_integral_closed_form(self):
        q = PiecewiseConstant(((0.0, 0.2, 1.0),))
        for k in (1, 2, 9):
            want = 0.2 - math.sin(0.4 * k * math.pi) / (2 * k * math.pi)
            assert q.integral_sin2(k) == pytest.approx(want, abs=1e-14)

    def test_integrals_against_quadrature(self):
        q = PiecewiseConstant(((0.0, 0.15, 2.0), (0.3, 0.45, -1.0)))
        for k, m in [(1, 1), (2, 5), (3, 3), (7, 2)]:
            with warnings.catch_warnings():
                warnings.simplefilter("ignore")
                want, _ = quad(lambda x: q.evaluate(x) * 2 * math.sin(k * math.pi * x)
                               * math.sin(m * math.pi * x), 0, 1, limit=300)
            got = q.integral_sin2(k) if k == m else q.integral_cross(k, m)
            assert got == pytest.approx(want, abs=1e-10)

    def test_breakpoints_constructor(self):
        q = PiecewiseConstant.from_breakpoints([0.0, 0.5, 1.0], [1.0, 2.0])
        assert q.segments == ((0.0, 0.5, 1.0), (0.5, 1.0, 2.0))


class TestCascadeInternal:
    def test_support_overlap_rejected(self):
        q = PiecewiseConstant(((0.1, 0.6, 1.0),))
        with pytest.raises(SupportOverlap):
            cascade_internal_q(q, (0.5, 0.7))

    def test_zero_coupling_flags_not_approx_controllable(self):
        q = PiecewiseConstant(((0.0, 0.2, 0.0),))
        model = cascade_internal_q(q, (0.5, 0.7))
        modes = model.modes(3)
        assert all(m.kind == "multiple" for m in modes)
        assert all(not m.meta["approx_controllable"] for m in modes)
        assert model.tmin_profile(3).values[0] == math.inf

    def test_jordan_coupling_closed_form(self):
        q = PiecewiseConstant(((0.0, 0.2, 1.0),))
        model = cascade_internal_q(q, (0.5, 0.7))
        for k in (1, 2, 5):
            mode = model.modes(k)[k - 1]
            want = 0.2 - math.sin(0.4 * k * math.pi) / (2 * k * math.pi)
            assert mode.kind == "jordan"
            assert mode.mu.real == pytest.approx(want, abs=1e-14)

    def test_solvability_residual_vanishes(self):
        q = PiecewiseConstant(((0.0, 0.2, 1.0), (0.9, 1.0, -2.0)))
        model = cascade_internal_q(q, (0.5, 0.7))
        for m in model.modes(8):
            assert abs(m.meta["solvability_residual"]) <= 1e-12

    def test_xi_bound_stable_over_modes(self):
        # ||xi_k|| <= C (|I_k| + |I1_k|) with a stable fitted constant
        q = PiecewiseConstant(((0.0, 0.2, 1.0),))
        model = cascade_internal_q(q, (0.5, 0.7))
        ratios = []
        for m in model.modes(30):
            denom = abs(m.meta["I_k"]) + abs(m.meta["I1_k"])
            ratios.append(m.meta["xi_norm"] / denom)
        assert max(ratios) < 10 * np.median(ratios)

    def test_psi_tail_bound_reported(self):
        q = PiecewiseConstant(((0.0, 0.2, 1.0),))
        model = cascade_internal_q(q, (0.5, 0.7), M=150)
        assert 0 < model.modes(1)[0].meta["psi_tail_bound"] < 1e-6


class TestCascadeBoundary:
    def test_coupling_closed_form_and_nonvanishing(self):
        q = PiecewiseConstant(((0.2, 0.8, 1.0),))
        model = cascade_boundary_q(q)
        for k in range(1, 51):
            want = 0.6 + (math.sin(0.4 * k * math.pi) - math.sin(1.6 * k * math.pi)) \
                / (2 * k * math.pi)
            I_k = model.coupling(k)
            assert I_k == pytest.approx(want, abs=1e-14)
            assert abs(I_k) > 0

    def test_first_observation_value(self):
        model = cascade_boundary_q(PiecewiseConstant(((0.2, 0.8, 1.0),)))
        mode = model.modes(3)[2]
        assert mode.obs[0].value == pytest.approx(3 * SQRT2 * math.pi, abs=1e-12)

    def test_gamma_consistency(self):
        model = cascade_boundary_q(PiecewiseConstant(((0.2, 0.8, 1.0),)))
        for m in model.modes(6):
            assert m.obs[1].value == pytest.approx(m.gamma * m.obs[0].value, abs=1e-10)

    def test_tmin_tail_vanishes(self):
        model = cascade_boundary_q(PiecewiseConstant(((0.2, 0.8, 1.0),)))
        prof = model.tmin_profile(40)
        assert prof.tail_estimate == pytest.approx(0.0, abs=0.01)


class TestTwoDiffusion:
    def test_boundary_observations_first_pair(self):
        model = two_diffusion_boundary(2.0)
        modes = model.modes(2)
        lams = sorted(m.lam.real for m in modes)
        assert lams == pytest.approx([PI2, 2 * PI2])
        slow = next(m for m in modes if m.meta["family"] == 1)
        fast = next(m for m in modes if m.meta["family"] == 2)
        assert slow.obs[0].value == pytest.approx(SQRT2, abs=1e-14)
        assert fast.obs[0].value == pytest.approx(SQRT2 * PI2, abs=1e-12)

    def test_rational_root_warning(self):
        with pytest.warns(RationalRootWarning):
            two_diffusion_boundary(4.0)

    def test_rational_root_spectrum_collides(self):
        from nullcontrol.errors import DuplicateEntry

        with warnings.catch_warnings():
            warnings.simplefilter("ignore", RationalRootWarning)
            model = two_diffusion_boundary(4.0)
        with pytest.raises(DuplicateEntry):
            model.spectrum(10)  # 4 * k^2 = (2k)^2 collide exactly

    def test_random_irrational_spectra_valid(self):
        rng = np.random.default_rng(5)
        for _ in range(20):
            d = float(rng.uniform(0.3, 5.0))
            if abs(d - 1.0) < 0.05 or abs(math.sqrt(d) - round(math.sqrt(d))) < 1e-6:
                continue
            with warnings.catch_warnings():
                warnings.simplefilter("ignore", RationalRootWarning)
                model = two_diffusion_boundary(d)
            seq = model.spectrum(40)  # construction validates the invariants
            mods = np.abs(seq.float_values(40))
            assert np.all(np.diff(mods) > 0)

    def test_condensation_tail_matches_closed_form_profile(self):
        from nullcontrol import log_eprime_two_family

        model = two_diffusion_boundary(2.0)
        prof = model.tmin_profile(30)
        seq = model.spectrum(30)
        floats = np.real(seq.float_values(30))
        # closed-form-based profile at the slow-family entries
        vals = []
        for k in range(1, 12):
            idx = int(np.searchsorted(floats, k * k * PI2 * (1 - 1e-12)))
            if idx >= 30:
                break
            vals.append(-log_eprime_two_family(k, 2.0, scale=PI2) / (k * k * PI2))
        slow_profile = [prof.values[int(np.searchsorted(floats, k * k * PI2 * (1 - 1e-12)))]
                        for k in range(1, len(vals) + 1)]
        np.testing.assert_allclose(slow_profile, vals, atol=5e-3)

    def test_pointwise_unobservable_even_modes(self):
        model = two_diffusion_pointwise(2.0, 0.5)
        for m in model.modes(12):
            assert m.unobservable == (m.meta["underlying_k"] % 2 == 0)

    def test_pointwise_profile_tracks_condensation(self):
        from nullcontrol import condensation_profile

        model = two_diffusion_pointwise(2.0, math.sqrt(2.0) - 1.0)
        prof = model.tmin_profile(30)
        cond = condensation_profile(model.spectrum(30), 30)
        # sine factor contributes -ln|sin(k pi x0)| / lam -> 0
        assert abs(prof.tail_estimate - cond.tail_estimate) < 0.05

    def test_pointwise_cap_reports_unbounded(self):
        model = two_diffusion_pointwise(2.0, 0.5)
        prof = model.tmin_profile(12, cap=10.0)
        assert prof.unbounded


class TestAcademicLf:
    def test_pair_gap(self):
        model = academic_lf(0.2)
        seq = model.spectrum(6)
        with warnings.catch_warnings():
            warnings.simplefilter("ignore")
            for k in (1, 2, 3):
                gap = float(seq.values[2 * k - 1] - seq.values[2 * k - 2])
                lam = k * k * PI2
                assert gap == pytest.approx(2 * math.exp(-0.2 * lam), rel=1e-10)

    def test_observation_norms_exact(self):
        model = academic_lf(0.2)
        for m in model.modes(8):
            assert m.obs[0].norm() == pytest.approx(1 / SQRT2, abs=1e-15)

    def test_pair_sum_in_kernel(self):
        # B*(phi^+ + phi^-) = 0: the two branch observations cancel
        model = academic_lf(0.2)
        modes = model.modes(2)
        both = modes[0].obs[0].plus(modes[1].obs[0])
        assert both.norm() <= 1e-15

    def test_tmin_profile_constant(self):
        prof = academic_lf(0.3).tmin_profile(10)
        assert np.all(prof.values == 0.3)


class TestHarmonicOscillator:
    def test_eigenvalues(self):
        model = harmonic_oscillator()
        assert model.modes(5)[4].lam.real == 9.0

    def test_summability_diagnostic_fails(self):
        model = harmonic_oscillator()
        rep = check_hypotheses(model.spectrum(100), 100)
        assert not rep.summable
        assert "HYP_SUMMABILITY_FAIL" in rep.warnings

    def test_synthesis_refused(self):
        with pytest.raises(SynthesisUnsupported):
            harmonic_oscillator().require_synthesizable()

    def test_caveat_recorded(self):
        assert "caveat" in harmonic_oscillator().metadata


class TestBlock2x2:
    @pytest.mark.parametrize("lam1,lam2,b", [
        (1.0, 2.0, (1.0, 1.0)),
        (1.0, 1.01, (1.0, 1.0)),
        (PI2, 2 * PI2, (1.0, -1.0)),
    ])
    def test_valid_parameterizations(self, lam1, lam2, b):
        blk = block_2x2(lam1, lam2, b)
        assert blk.lam1 < blk.lam2

    def test_degenerate_b(self):
        with pytest.raises(DegenerateB):
            block_2x2(1.0, 2.0, (0.0, 1.0))

    def test_ordering_required(self):
        with pytest.raises(ValueError):
            block_2x2(2.0, 1.0, (1.0, 1.0))
