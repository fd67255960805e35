import math

import numpy as np
import pytest
from scipy.special import ellipe

import stochastic_billiards as sb
from stochastic_billiards.geometry import InputError
from stochastic_billiards.spectral2d import CircleCurve, EllipseCurve, StadiumCurve


@pytest.fixture(scope="module")
def circle_tm(circle):
    return sb.build_transition_matrix(circle, 512)


@pytest.fixture(scope="module")
def stadium_tms():
    return {
        L: sb.build_transition_matrix(sb.Capsule(2, L, 1.0), 256) for L in (2.0, 4.0, 8.0)
    }


class TestCurves:
    def test_ellipse_perimeter_matches_elliptic_integral(self, ellipse):
        curve = sb.boundary_curve(ellipse)
        oracle = 4.0 * 2.0 * float(ellipe(1.0 - 0.25))
        assert curve.perimeter == pytest.approx(oracle, abs=1e-10)

    def test_stadium_perimeter(self, stadium):
        curve = sb.boundary_curve(stadium)
        assert curve.perimeter == pytest.approx(4 * 2.0 + 2 * math.pi, abs=1e-12)

    def test_rounded_polygon_perimeter(self, rounded_square):
        curve = sb.boundary_curve(rounded_square)
        assert curve.perimeter == pytest.approx(8.0 + 2 * math.pi * 0.5, abs=1e-9)

    @pytest.mark.parametrize("maker", [
        lambda: CircleCurve([0.0, 0.0], 1.0),
        lambda: EllipseCurve(2.0, 1.0),
        lambda: StadiumCurve(2.0, 1.0),
    ])
    def test_arclength_roundtrip(self, maker):
        curve = maker()
        s = np.linspace(0.0, curve.perimeter, 211, endpoint=False)
        back = curve.arclengths(curve.points(s))
        assert np.abs(back - s).max() < 1e-9

    def test_rounded_polygon_roundtrip(self, rounded_square):
        curve = sb.boundary_curve(rounded_square)
        s = np.linspace(0.0, curve.perimeter, 173, endpoint=False)
        back = curve.arclengths(curve.points(s))
        err = np.minimum(np.abs(back - s), curve.perimeter - np.abs(back - s))
        assert err.max() < 1e-9

    def test_points_on_boundary_with_inward_normals(self, all_bodies):
        for body in all_bodies:
            if body.dim != 2:
                continue
            curve = sb.boundary_curve(body)
            s = np.linspace(0.0, curve.perimeter, 97, endpoint=False)
            P = curve.points(s)
            assert np.abs(body.level_many(P)).max() < 1e-9
            N = curve.normals(s)
            np.testing.assert_allclose(N, body.normal_many(P), atol=1e-9)

    def test_3d_body_rejected(self, sphere):
        with pytest.raises(InputError):
            sb.boundary_curve(sphere)


class TestTransitionMatrix:
    def test_row_stochastic_nonnegative(self, circle_tm, stadium_tms):
        for tm in [circle_tm, *stadium_tms.values()]:
            assert np.abs(tm.P.sum(axis=1) - 1.0).max() < 1e-9
            assert tm.P.min() >= 0.0

    def test_detailed_balance(self, circle_tm, stadium_tms):
        # equal bin lengths, so detailed balance is plain symmetry
        for tm in [circle_tm, *stadium_tms.values()]:
            assert np.abs(tm.P - tm.P.T).max() < 1e-9

    def test_circle_matrix_is_circulant(self, circle_tm):
        P = circle_tm.P
        rolled = np.roll(np.roll(P, 1, axis=0), 1, axis=1)
        assert np.abs(P - rolled).max() < 1e-9

    def test_circle_row_matches_angular_density(self, circle_tm):
        # P_0j averages the separation CDF F(psi) = (1 - cos(psi/2))/2 over the
        # source bin, giving the second difference of G(psi) = (psi - 2 sin(psi/2))/2
        m = circle_tm.bins
        h = 2 * math.pi / m
        j = np.arange(1, m)

        def G(psi):
            return (psi - 2.0 * np.sin(psi / 2.0)) / 2.0

        exact = (G((j + 1) * h) - 2.0 * G(j * h) + G((j - 1) * h)) / h
        np.testing.assert_allclose(circle_tm.P[0][1:], exact, atol=1e-9)

    def test_small_bin_count_rejected(self, circle):
        with pytest.raises(InputError):
            sb.build_transition_matrix(circle, 4)

    def test_3d_rejected(self, sphere):
        with pytest.raises(InputError):
            sb.build_transition_matrix(sphere, 64)


class TestStationary:
    def test_circle_uniform(self, circle):
        tm = sb.build_transition_matrix(circle, 64)
        pi = sb.stationary_distribution(tm)
        assert np.abs(pi - 1.0 / 64).max() < 1e-12

    def test_ellipse_uniform(self, ellipse):
        tm = sb.build_transition_matrix(ellipse, 256)
        pi = sb.stationary_distribution(tm)
        assert np.abs(pi - 1.0 / 256).max() < 1e-6

    def test_stadium_uniform(self, stadium_tms):
        pi = sb.stationary_distribution(stadium_tms[2.0])
        assert np.abs(pi - 1.0 / 256).max() < 1e-5

    def test_rounded_polygon_uniform(self, rounded_square):
        tm = sb.build_transition_matrix(rounded_square, 128)
        pi = sb.stationary_distribution(tm)
        assert np.abs(pi - 1.0 / 128).max() < 1e-5


class TestSpectralSummary:
    def test_circle_eigenvalues_closed_form(self, circle_tm):
        # Fourier coefficients of sin(psi/2)/4: lambda_k = 1/(1-4k^2), each twice
        lam = np.sort(sb.spectral_summary(circle_tm).eigenvalues)
        for k in range(1, 6):
            expect = 1.0 / (1.0 - 4.0 * k * k)
            assert lam[2 * (k - 1)] == pytest.approx(expect, abs=1e-3)
            assert lam[2 * (k - 1) + 1] == pytest.approx(expect, abs=1e-3)

    def test_circle_gap(self, circle_tm):
        summ = sb.spectral_summary(circle_tm)
        assert summ.spectral_gap == pytest.approx(2.0 / 3.0, abs=1e-3)

    def test_top_eigenvalue_is_one(self, circle_tm, stadium_tms):
        for tm in [circle_tm, *stadium_tms.values()]:
            summ = sb.spectral_summary(tm)
            assert summ.eigenvalues[0] == pytest.approx(1.0, abs=1e-9)
            assert np.abs(summ.eigenvalues).max() <= 1.0 + 1e-9

    def test_cheeger_sandwich(self, circle_tm, stadium_tms, ellipse):
        tms = [circle_tm, *stadium_tms.values(), sb.build_transition_matrix(ellipse, 128)]
        for tm in tms:
            s = sb.spectral_summary(tm)
            assert s.cheeger_lower <= s.conductance <= s.cheeger_upper + 1e-6
            assert s.spectral_gap / 2.0 <= s.conductance
            assert s.conductance <= math.sqrt(2.0 * s.spectral_gap) + 1e-6

    def test_circle_sweep_conductance(self, circle_tm):
        # half-circle cut: average escape probability 2/pi
        s = sb.spectral_summary(circle_tm)
        assert s.conductance == pytest.approx(2.0 / math.pi, abs=1e-3)
        length, value = s.best_cut()
        assert length == circle_tm.bins // 2

    def test_refinement_consistency(self, circle, circle_tm):
        g512 = sb.spectral_summary(circle_tm).spectral_gap
        g1024 = sb.spectral_summary(sb.build_transition_matrix(circle, 1024)).spectral_gap
        assert abs(g512 - g1024) < 1e-3

    def test_stadium_gap_and_conductance_decrease_with_length(self, stadium_tms):
        summs = [sb.spectral_summary(stadium_tms[L]) for L in (2.0, 4.0, 8.0)]
        gaps = [s.spectral_gap for s in summs]
        conds = [s.conductance for s in summs]
        assert gaps[0] > gaps[1] > gaps[2]
        assert conds[0] > conds[1] > conds[2]
