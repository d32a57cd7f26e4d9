import math

import numpy as np
import pytest

from dirichlet_lab import (
    ApproxFunction,
    BracketError,
    DimensionFunction,
    DomainError,
    Hyperrectangle,
    IntegerVector,
    WeightVector,
    gamma_u,
    gamma_via_cover,
    neighborhood_cover_count,
    rect_content_closed,
    rect_content_oracle,
    t_of_u,
)


def _random_valid_f(rng, d):
    """Draw (s, tau) so that some k in [0, d-1] brackets f."""
    while True:
        s = rng.uniform(0.2, d - 0.05)
        tau = rng.uniform(-0.8, 0.8)
        f = DimensionFunction.power_log(s, tau, d)
        try:
            rect_content_closed(f, Hyperrectangle.from_sides([0.5] * d))
        except BracketError:
            continue
        return f


class TestClosedForm:
    def test_cube_equal_sides(self):
        f = DimensionFunction.power(2.0, 2)
        est = rect_content_closed(f, Hyperrectangle.from_sides([0.5, 0.5]))
        assert est.value == 0.25
        assert est.argmin_index == 1  # smallest index wins the tie

    def test_two_branch_min(self):
        f = DimensionFunction.power(1.5, 2)
        est = rect_content_closed(f, Hyperrectangle.from_sides([0.5, 0.25]))
        # branches: 0.5^1.5 = 0.35355..., 0.25^1.5 * 2 = 0.25
        assert est.value == pytest.approx(0.25, rel=1e-14)
        assert est.argmin_index == 2

    def test_volume_recovery(self):
        f = DimensionFunction.power(2.0, 2)
        est = rect_content_closed(f, Hyperrectangle.from_sides([0.5, 0.25]))
        assert est.value == pytest.approx(0.125, rel=1e-14)
        assert est.argmin_index == 2

    def test_bracket_violation_reported(self):
        f = DimensionFunction.power(3.5, 2)
        with pytest.raises(BracketError):
            rect_content_closed(f, Hyperrectangle.from_sides([0.5, 0.25]))

    def test_monotone_in_sides(self):
        rng = np.random.default_rng(21)
        for _ in range(200):
            d = int(rng.integers(1, 4))
            f = _random_valid_f(rng, d)
            sides = sorted(rng.uniform(0.05, 0.9, size=d), reverse=True)
            small = rect_content_closed(f, Hyperrectangle.from_sides(sides)).value
            i = int(rng.integers(0, d))
            sides[i] *= rng.uniform(1.0, 3.0)
            big = rect_content_closed(f, Hyperrectangle.from_sides(sides)).value
            assert big >= small * (1 - 1e-12)

    def test_power_scaling_exact(self):
        rng = np.random.default_rng(22)
        for _ in range(100):
            d = int(rng.integers(1, 4))
            s = rng.uniform(0.2, d - 0.05)
            f = DimensionFunction.power(s, d)
            sides = sorted(rng.uniform(0.05, 0.9, size=d), reverse=True)
            c = rng.uniform(0.2, 1.5)
            base = rect_content_closed(f, Hyperrectangle.from_sides(sides)).value
            scaled = rect_content_closed(
                f, Hyperrectangle.from_sides([c * a for a in sides])
            ).value
            assert scaled == pytest.approx(c ** s * base, rel=1e-12)


class TestCoverOracle:
    def test_hand_counted_square_law(self):
        f = DimensionFunction.power(2.0, 2)
        rect = Hyperrectangle.from_sides([0.5, 0.25])
        est = rect_content_oracle(f, rect, radius_grid=[0.25, 0.5])
        # independent count: balls of diameter r contain cubes of side r/sqrt(2)
        def cover_value(r):
            h = r / math.sqrt(2.0)
            return r ** 2 * math.ceil(0.5 / h) * math.ceil(0.25 / h)

        expected = min(cover_value(0.25), cover_value(0.5))
        assert est.value == pytest.approx(expected, rel=1e-14)
        assert 0.125 <= est.value <= 0.5

    def test_hand_counted_s15(self):
        f = DimensionFunction.power(1.5, 2)
        rect = Hyperrectangle.from_sides([0.5, 0.25])
        est = rect_content_oracle(f, rect, radius_grid=[0.25, 0.5])
        assert 0.25 <= est.value <= 1.0

    def test_cube_single_ball_scale(self):
        f = DimensionFunction.power(1.7, 2)
        rect = Hyperrectangle.from_sides([0.3, 0.3])
        est = rect_content_oracle(f, rect)
        fa = 0.3 ** 1.7
        assert fa <= est.value <= 16.0 * fa

    def test_oracle_brackets_closed_form(self):
        rng = np.random.default_rng(31)
        for _ in range(200):
            d = int(rng.integers(1, 4))
            f = _random_valid_f(rng, d)
            sides = sorted(rng.uniform(0.02, 0.9, size=d), reverse=True)
            rect = Hyperrectangle.from_sides(sides)
            closed = rect_content_closed(f, rect).value
            oracle = rect_content_oracle(f, rect).value
            ratio = oracle / closed
            assert 1.0 - 1e-12 <= ratio <= 4.0 ** d

    def test_dimension_limit(self):
        f = DimensionFunction.power(2.0, 4)
        with pytest.raises(DomainError):
            rect_content_oracle(f, Hyperrectangle.from_sides([0.5] * 4))

    def test_empty_grid_rejected(self):
        f = DimensionFunction.power(1.5, 2)
        with pytest.raises(DomainError):
            rect_content_oracle(f, Hyperrectangle.from_sides([0.5, 0.25]),
                                radius_grid=[])


class TestNeighborhoodCover:
    def test_m1_thin_direction_is_one(self):
        psi = ApproxFunction.power(1.0, 1.0)
        alpha = WeightVector.alpha([1.0])
        beta = WeightVector.beta([0.6, 0.4])
        u = IntegerVector((5,))
        assert neighborhood_cover_count(2, 1, u, psi, alpha, beta) == 1.0

    def test_branch_agreement_at_equal_indices(self):
        psi = ApproxFunction.power(1.0, 1.0)
        alpha = WeightVector.alpha([0.5, 0.5])
        beta = WeightVector.beta([0.6, 0.4])
        u = IntegerVector((3, 4))
        # at ell = j both branch formulas coincide
        t = t_of_u(psi, alpha, u)
        x = t ** (-beta[1]) / u.sup_norm
        got = neighborhood_cover_count(2, 2, u, psi, alpha, beta)
        assert got == pytest.approx(x ** (1 - 2), rel=1e-12)

    def test_weighted_numeric_value(self):
        psi = ApproxFunction.power(1.0, 1.0)
        alpha = WeightVector.alpha([0.5, 0.5])
        beta = WeightVector.beta([0.6, 0.4])
        u = IntegerVector((3, 4))
        t = t_of_u(psi, alpha, u)
        assert t == pytest.approx(16.0, rel=1e-12)
        got = neighborhood_cover_count(2, 1, u, psi, alpha, beta)
        assert got == pytest.approx((16.0 ** -0.4 / 4.0) ** -1, rel=1e-10)

    def test_index_range_checked(self):
        psi = ApproxFunction.power(1.0, 1.0)
        alpha = WeightVector.alpha([1.0])
        beta = WeightVector.beta([0.5, 0.5])
        with pytest.raises(DomainError):
            neighborhood_cover_count(3, 1, IntegerVector((2,)), psi, alpha, beta)


class TestGammaViaCover:
    def test_closed_form_exponent_m1(self):
        psi = ApproxFunction.power(1.0, 0.5)
        alpha = WeightVector.alpha([1.0])
        beta = WeightVector.beta([0.5, 0.5])
        f = DimensionFunction.power(1.8, 2)
        u = IntegerVector((7,))
        got = gamma_via_cover(u, psi, alpha, beta, f)
        # t(u) = 49, x = 49^{-1/2}/7 = 1/49, gamma = (1/49)^{1.8}
        assert got == pytest.approx((1.0 / 49.0) ** 1.8, rel=1e-12)

    def test_antipodal_invariance(self):
        psi = ApproxFunction.power(1.0, 1.2)
        alpha = WeightVector.alpha([0.3, 0.7])
        beta = WeightVector.beta([0.5, 0.3, 0.2])
        f = DimensionFunction.power(4.5, 6)
        u = IntegerVector((4, -9))
        assert gamma_via_cover(u, psi, alpha, beta, f) == gamma_via_cover(
            -u, psi, alpha, beta, f
        )

    def test_matches_direct_path(self):
        rng = np.random.default_rng(77)
        for _ in range(300):
            m = int(rng.integers(1, 4))
            n = int(rng.integers(2, 4))
            aw = rng.uniform(0.2, 1.0, size=m)
            aw /= aw.sum()
            aw[-1] = 1.0 - aw[:-1].sum()
            bw = np.sort(rng.uniform(0.2, 1.0, size=n))[::-1]
            bw /= bw.sum()
            bw[-1] = 1.0 - bw[:-1].sum()
            bw = np.sort(bw)[::-1]
            alpha = WeightVector.alpha(list(aw))
            beta = WeightVector.beta(list(bw))
            psi = ApproxFunction.power(rng.uniform(0.5, 1.5), rng.uniform(0.3, 2.0))
            mn = m * n
            s = rng.uniform(mn - n + 1.05, mn - 0.05)
            f = DimensionFunction.power(s, mn)
            entries = tuple(int(e) for e in rng.integers(-200, 201, size=m))
            if not any(entries):
                continue
            u = IntegerVector(entries)
            direct = gamma_u(psi, alpha, beta, f, u)
            cover = gamma_via_cover(u, psi, alpha, beta, f)
            assert cover == pytest.approx(direct.gamma, rel=1e-12)
