import math

import numpy as np
import pytest

from gldlm import (
    GldParams,
    Region,
    cdf,
    classify_region,
    pdf,
    quantile,
    quantile_density,
    sample,
    support,
    validate,
)
from gldlm.core import shape_pair_valid, shape_valid_mask
from gldlm.errors import DomainError, InvalidParamsError

from conftest import draw_params

UNIFORM = GldParams(0.0, 1.0, 1.0, 1.0)
NEAR_NORMAL = GldParams(0.0, 0.19, 0.14, 0.14)
TABLE_R4 = GldParams(-1.62, -0.157, -0.014, -0.212)
TABLE_R6 = GldParams(-7.04, -0.194, 11.905, -0.306)


class TestQuantile:
    def test_symmetric_median_is_location(self):
        assert quantile(UNIFORM, 0.5) == 0.0
        assert quantile(NEAR_NORMAL, 0.5) == 0.0

    def test_uniform_endpoints(self):
        assert quantile(UNIFORM, 0.0) == -1.0
        assert quantile(UNIFORM, 1.0) == 1.0

    def test_unbounded_region4_endpoints(self):
        assert quantile(TABLE_R4, 0.0) == -math.inf
        assert quantile(TABLE_R4, 1.0) == math.inf

    def test_one_sided_support(self):
        # region 6: bounded on the left, unbounded on the right
        lo, hi = support(TABLE_R6)
        assert math.isfinite(lo) and hi == math.inf

    def test_domain_errors(self):
        with pytest.raises(DomainError):
            quantile(UNIFORM, -0.1)
        with pytest.raises(DomainError):
            quantile(UNIFORM, 1.1)
        with pytest.raises(InvalidParamsError):
            quantile(GldParams(0, 1, -0.5, -0.5), 0.5)

    def test_vectorized_matches_scalar(self):
        u = np.linspace(0.05, 0.95, 7)
        vec = quantile(NEAR_NORMAL, u)
        assert vec == pytest.approx([quantile(NEAR_NORMAL, v) for v in u])


class TestQuantileDensity:
    def test_uniform_density(self):
        assert quantile_density(UNIFORM, 0.3) == 2.0

    def test_quadratic_shape(self):
        assert quantile_density(GldParams(0, 1, 2, 2), 0.5) == pytest.approx(2.0)

    def test_against_finite_difference(self):
        expected = (0.14 * 0.5 ** (-0.86) * 2) / 0.19
        got = quantile_density(NEAR_NORMAL, 0.5)
        assert got == pytest.approx(expected, rel=1e-12)
        h = 1e-7
        fd = (quantile(NEAR_NORMAL, 0.5 + h) - quantile(NEAR_NORMAL, 0.5 - h)) / (2 * h)
        assert got == pytest.approx(fd, rel=1e-6)

    def test_infinite_endpoint_raises(self):
        with pytest.raises(DomainError):
            quantile_density(NEAR_NORMAL, 0.0)
        # exponents >= 1 stay finite at the endpoints
        assert quantile_density(UNIFORM, 0.0) == 2.0


class TestValidate:
    def test_examples(self):
        assert validate(NEAR_NORMAL)
        assert not validate(GldParams(0, 1, -0.5, -0.5))
        assert validate(TABLE_R4)
        assert validate(TABLE_R6)

    def test_zero_scale_is_invalid(self):
        assert not validate(GldParams(0, 0, 0.14, 0.14))

    def test_degenerate_point_mass_is_invalid(self):
        assert not validate(GldParams(0, 1, 0.0, 0.0))

    def test_sign_must_match_orientation(self):
        assert validate(GldParams(0, -1, -0.1, -0.1))
        assert not validate(GldParams(0, 1, -0.1, -0.1))
        assert not validate(GldParams(0, -1, 1, 1))

    def test_region5_needs_long_right_exponent(self):
        assert not shape_pair_valid(-0.5, 0.9)
        assert not shape_pair_valid(-0.5, 1.0)
        assert shape_pair_valid(-0.5, 5.0)

    def test_agrees_with_brute_force(self, rng):
        # random draws per region quadrant, valid and invalid alike
        boxes = {
            3: ((0.01, 30.0), (0.01, 30.0), 1.0),
            4: ((-0.95, -0.01), (-0.95, -0.01), -1.0),
            5: ((-0.95, -0.01), (0.1, 60.0), -1.0),
            6: ((0.1, 60.0), (-0.95, -0.01), -1.0),
        }
        u = rng.random(1_000_000)
        for (lo3, hi3), (lo4, hi4), lam2 in boxes.values():
            for _ in range(100):
                l3 = float(rng.uniform(lo3, hi3))
                l4 = float(rng.uniform(lo4, hi4))
                numer = l3 * u ** (l3 - 1.0) + l4 * (1.0 - u) ** (l4 - 1.0)
                brute = bool((numer * lam2 >= 0.0).all())
                assert validate(GldParams(0.0, lam2, l3, l4)) == brute, (l3, l4)

    def test_vectorized_mask_matches_scalar(self, rng):
        l3 = rng.uniform(-0.95, 3.0, 500)
        l4 = rng.uniform(-0.95, 3.0, 500)
        l4[::3] = np.exp(rng.uniform(0.0, 4.0, l4[::3].size))
        mask = shape_valid_mask(l3, l4)
        for a, b, m in zip(l3, l4, mask):
            assert shape_pair_valid(float(a), float(b)) == bool(m)


class TestClassifyRegion:
    @pytest.mark.parametrize(
        "params,region",
        [
            (NEAR_NORMAL, Region.R3),
            (TABLE_R6, Region.R6),
            (TABLE_R4, Region.R4),
            (GldParams(0, -1, -0.5, 5.0), Region.R5),
            (GldParams(0, 1, 0.0, 0.5), Region.R3),
            (GldParams(0, 1, 0.5, 0.0), Region.R3),
            (GldParams(0, -1, -1.5, 2.0), Region.R1),
            (GldParams(0, -1, 2.0, -1.5), Region.R2),
            (GldParams(0, 1, -0.5, -0.5), Region.INVALID),
        ],
    )
    def test_assignment(self, params, region):
        assert classify_region(params).region is region

    def test_lmoment_existence_flag(self):
        assert classify_region(NEAR_NORMAL).lmoments_exist
        assert not classify_region(GldParams(0, -1, -1.5, 2.0)).lmoments_exist
        assert not classify_region(GldParams(0, 1, -0.5, -0.5)).lmoments_exist

    def test_boundedness_by_region(self, rng):
        # R3 bounded, R4 unbounded, R5 right-bounded, R6 left-bounded
        for region, left_finite, right_finite in [
            (3, True, True),
            (4, False, False),
            (5, False, True),
            (6, True, False),
        ]:
            for _ in range(20):
                p = draw_params(rng, region)
                lo, hi = support(p)
                assert math.isfinite(lo) == left_finite, p
                assert math.isfinite(hi) == right_finite, p


class TestCdfPdf:
    def test_uniform_inverse(self):
        assert cdf(UNIFORM, 0.0) == pytest.approx(0.5, abs=1e-12)

    def test_support_clamp(self):
        assert cdf(UNIFORM, -1.5) == 0.0
        assert cdf(UNIFORM, 2.0) == 1.0

    def test_roundtrip(self):
        x = quantile(NEAR_NORMAL, 0.25)
        assert cdf(NEAR_NORMAL, x) == pytest.approx(0.25, abs=1e-11)

    def test_pdf_uniform(self):
        assert pdf(UNIFORM, 0.3) == pytest.approx(0.5)
        assert pdf(UNIFORM, 5.0) == 0.0

    def test_pdf_near_normal_mode(self):
        expected = 0.19 / (0.28 * 0.5 ** (-0.86))
        assert pdf(NEAR_NORMAL, 0.0) == pytest.approx(expected, rel=1e-9)
        # numerical derivative of the cdf as an independent oracle
        h = 1e-6
        fd = (cdf(NEAR_NORMAL, h) - cdf(NEAR_NORMAL, -h)) / (2 * h)
        assert pdf(NEAR_NORMAL, 0.0) == pytest.approx(fd, rel=1e-5)

    def test_pdf_integrates_to_one(self, rng):
        p = draw_params(rng, 3)
        lo, hi = support(p)
        x = np.linspace(lo, hi, 20001)[1:-1]
        mass = np.trapezoid(pdf(p, x), x)
        assert mass == pytest.approx(1.0, abs=5e-3)

    def test_density_consistency(self, rng):
        for region in (3, 4, 5, 6):
            p = draw_params(rng, region)
            for u in (0.12, 0.5, 0.88):
                x = quantile(p, u)
                prod = pdf(p, x) * quantile_density(p, cdf(p, x))
                assert prod == pytest.approx(1.0, abs=1e-8)


class TestSample:
    def test_forced_median(self):
        assert quantile(UNIFORM, 0.5) == 0.0  # the u=0.5 draw maps to the location

    def test_determinism(self):
        a = sample(NEAR_NORMAL, 100, seed=9)
        b = sample(NEAR_NORMAL, 100, seed=9)
        assert np.array_equal(a, b)
        c = sample(NEAR_NORMAL, 100, seed=10)
        assert not np.array_equal(a, c)

    def test_errors(self):
        with pytest.raises(DomainError):
            sample(UNIFORM, 0, seed=1)
        with pytest.raises(InvalidParamsError):
            sample(GldParams(0, 1, -0.5, -0.5), 10, seed=1)

    def test_large_sample_lmoments_near_theory(self):
        from gldlm import sample_lmoments

        data = sample(NEAR_NORMAL, 100_000, seed=123)
        m = sample_lmoments(data, 4)
        assert m.l1 == pytest.approx(0.0, abs=0.02)
        assert m.l2 == pytest.approx(0.60407, abs=0.01)
        assert m.tau3 == pytest.approx(0.0, abs=0.01)
        assert m.tau4 == pytest.approx(0.12305, abs=0.01)
