import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from pytest import approx
from scipy import stats

from epicorr.errors import (
    DegenerateWindow,
    InputError,
    InvalidDof,
    LagOrderViolation,
    LagOutOfRange,
)
from epicorr.portmanteau import (
    WindowConfig,
    chi_square_sf,
    default_ar_max_order,
    fit_ar_ladder,
    h_xx,
    h_xxx,
    h_xxx_dof,
    prewhiten,
    sample_bicorrelation,
    sample_correlation,
    select_ar_order_bic,
    standardize,
    window_test,
)
from naive_reference import (
    naive_bicorrelation,
    naive_correlation,
    naive_h_xx,
    naive_h_xxx,
    naive_standardize,
)

window_arrays = st.lists(
    st.floats(min_value=-50, max_value=50, allow_nan=False),
    min_size=8,
    max_size=64,
).filter(lambda w: max(w) > min(w))


class TestStandardize:
    def test_two_point_window(self):
        assert standardize([1.0, -1.0]).values.tolist() == [1.0, -1.0]

    def test_constant_window_raises(self):
        with pytest.raises(DegenerateWindow):
            standardize([5.0, 5.0, 5.0])

    def test_single_value_rejected(self):
        with pytest.raises(InputError):
            standardize([1.0])

    def test_against_two_pass_oracle(self):
        rng = np.random.default_rng(11)
        w = rng.standard_normal(64) * 3.0 + 2.0
        got = standardize(w).values
        expected = naive_standardize(list(w))
        assert np.abs(got - np.array(expected)).max() < 1e-12

    @given(window_arrays)
    @settings(max_examples=60, deadline=None)
    def test_moment_invariants(self, w):
        x = standardize(w).values
        n = x.size
        assert abs(x.mean()) < 1e-10
        sd = math.sqrt(float(x @ x) / n)
        assert sd == approx(1.0, rel=1e-8)

    def test_offset_recorded(self):
        assert standardize([1.0, 2.0], offset=17).offset == 17


class TestSampleCorrelation:
    def test_alternating_lag1(self):
        assert sample_correlation([1, -1, 1, -1], 1) == -1.0

    def test_alternating_lag2(self):
        assert sample_correlation([1, -1, 1, -1], 2) == 1.0

    def test_lag_out_of_range(self):
        with pytest.raises(LagOutOfRange):
            sample_correlation([1.0, 2.0, 3.0], 3)
        with pytest.raises(LagOutOfRange):
            sample_correlation([1.0, 2.0, 3.0], 0)

    def test_matches_oracle(self):
        rng = np.random.default_rng(3)
        x = standardize(rng.standard_normal(50)).values
        for r in (1, 2, 3):
            assert sample_correlation(x, r) == approx(
                naive_correlation(list(x), r), abs=1e-12
            )

    def test_time_reversal_invariance(self):
        rng = np.random.default_rng(5)
        x = rng.standard_normal(40)
        for r in (1, 2, 5):
            assert sample_correlation(x, r) == approx(
                sample_correlation(x[::-1], r), abs=1e-12
            )

    @given(window_arrays, st.integers(min_value=1, max_value=4))
    @settings(max_examples=60, deadline=None)
    def test_bound_for_standardized_input(self, w, r):
        x = standardize(w).values
        n = x.size
        assert abs(sample_correlation(x, r)) <= n / (n - r) + 1e-12


class TestSampleBicorrelation:
    def test_all_ones(self):
        assert sample_bicorrelation([1.0, 1.0, 1.0], 1, 2) == 1.0

    def test_odd_symmetry_exact(self):
        rng = np.random.default_rng(7)
        x = rng.standard_normal(30)
        assert sample_bicorrelation(-x, 1, 2) == -sample_bicorrelation(x, 1, 2)

    def test_lag_order_violation(self):
        with pytest.raises(LagOrderViolation):
            sample_bicorrelation([1.0] * 10, 2, 2)

    def test_lag_out_of_range(self):
        with pytest.raises(LagOutOfRange):
            sample_bicorrelation([1.0] * 4, 1, 4)

    def test_matches_oracle(self):
        rng = np.random.default_rng(9)
        x = standardize(rng.standard_normal(50)).values
        assert sample_bicorrelation(x, 1, 2) == approx(
            naive_bicorrelation(list(x), 1, 2), abs=1e-12
        )


class TestPortmanteauStatistics:
    def test_h_xx_alternating(self):
        # C(1) = -1, C(2) = 1 on +-1 alternation: 3*1 + 2*1
        assert h_xx([1, -1, 1, -1], 2) == 5.0

    def test_h_xx_nonnegative(self):
        rng = np.random.default_rng(13)
        for _ in range(20):
            assert h_xx(rng.standard_normal(16), 2) >= 0.0

    def test_h_xxx_single_term(self):
        x = [1.0, 1.0, 1.0, 1.0]
        expected = (4 - 2) * naive_bicorrelation(x, 1, 2) ** 2
        assert h_xxx(x, 2) == approx(expected, abs=1e-15)

    def test_sign_flip_invariance_exact(self):
        rng = np.random.default_rng(17)
        x = rng.standard_normal(32)
        assert h_xx(-x, 2) == h_xx(x, 2)
        assert h_xxx(-x, 3) == h_xxx(x, 3)

    def test_h_xxx_requires_two_lags(self):
        with pytest.raises(LagOutOfRange):
            h_xxx([1.0] * 8, 1)

    def test_dof_rule(self):
        assert h_xxx_dof(2) == 1
        assert h_xxx_dof(3) == 3
        assert h_xxx_dof(5) == 10

    def test_oracle_equivalence_many_windows(self):
        # 200 seeded windows, lengths 8..64, all four statistics
        rng = np.random.default_rng(2024)
        for _ in range(200):
            n = int(rng.integers(8, 65))
            x = standardize(rng.standard_normal(n)).values
            xs = list(x)
            for r in (1, 2, 3):
                assert sample_correlation(x, r) == approx(
                    naive_correlation(xs, r), abs=1e-12
                )
            for r, s in ((1, 2), (1, 3), (2, 3)):
                assert sample_bicorrelation(x, r, s) == approx(
                    naive_bicorrelation(xs, r, s), abs=1e-12
                )
            for L in (2, 3):
                assert h_xx(x, L) == approx(naive_h_xx(xs, L), abs=1e-12)
                assert h_xxx(x, L) == approx(naive_h_xxx(xs, L), abs=1e-12)


class TestChiSquareSf:
    def test_dof2_closed_form(self):
        for h in np.linspace(0.0, 100.0, 101):
            expected = math.exp(-h / 2.0)
            assert chi_square_sf(float(h), 2) == approx(expected, rel=1e-12)

    def test_quantile_dof1(self):
        assert chi_square_sf(3.841459, 1) == approx(0.05, abs=1e-6)

    def test_zero_value(self):
        assert chi_square_sf(0.0, 5) == 1.0

    def test_invalid_dof(self):
        for dof in (0, -1, 1.5, "2"):
            with pytest.raises(InvalidDof):
                chi_square_sf(1.0, dof)

    def test_negative_value(self):
        with pytest.raises(InputError):
            chi_square_sf(-0.5, 2)

    def test_against_scipy_grid(self):
        for dof in (1, 2, 3, 5, 10, 32, 64):
            for value in (0.01, 0.5, 1.0, 3.0, 10.0, 50.0, 120.0, 500.0):
                assert chi_square_sf(value, dof) == approx(
                    stats.chi2.sf(value, dof), rel=1e-10
                )

    @given(
        st.floats(min_value=0.0, max_value=400.0),
        st.floats(min_value=0.01, max_value=99.0),
        st.integers(min_value=1, max_value=64),
    )
    @settings(max_examples=100, deadline=None)
    def test_monotone_decreasing(self, value, bump, dof):
        assert chi_square_sf(value + bump, dof) <= chi_square_sf(value, dof)


class TestARLadder:
    def test_first_coefficient_is_lag1_autocorrelation(self):
        rng = np.random.default_rng(19)
        x = standardize(rng.standard_normal(128)).values
        ladder = fit_ar_ladder(x, 4)
        rho1 = sample_correlation(x, 1) * (x.size - 1) / x.size
        assert ladder[0].coefficients[0] == approx(rho1, abs=1e-12)

    def test_recovers_ar1_coefficient(self):
        rng = np.random.default_rng(23)
        e = rng.standard_normal(5000) * 0.01
        x = np.empty(5000)
        x[0] = e[0]
        for t in range(1, 5000):
            x[t] = 0.5 * x[t - 1] + e[t]
        ladder = fit_ar_ladder(standardize(x[500:]).values, 3)
        assert ladder[0].coefficients[0] == approx(0.5, abs=0.05)

    def test_variance_ladder_identity(self):
        rng = np.random.default_rng(29)
        x = standardize(rng.standard_normal(256)).values
        ladder = fit_ar_ladder(x, 12)
        prev = 1.0  # lag-0 autocovariance of standardized data
        for model in ladder:
            k = model.coefficients[-1]
            assert model.residual_variance == approx(prev * (1 - k * k), abs=1e-10)
            assert model.residual_variance <= prev + 1e-12
            prev = model.residual_variance

    def test_zero_window_raises(self):
        with pytest.raises(DegenerateWindow):
            fit_ar_ladder(np.zeros(32), 4)

    def test_p_max_bounds(self):
        with pytest.raises(InputError):
            fit_ar_ladder(np.arange(8.0), 7)


class TestOrderSelection:
    def test_flat_ladder_selects_one(self):
        x = standardize(np.random.default_rng(31).standard_normal(256)).values
        ladder = fit_ar_ladder(x, 8)
        assert select_ar_order_bic(ladder, 256) == 1

    def test_recovers_ar3_in_majority_of_trials(self):
        hits = 0
        for seed in range(10):
            rng = np.random.default_rng(100 + seed)
            e = rng.standard_normal(1200)
            x = np.zeros(1200)
            for t in range(3, 1200):
                x[t] = 0.5 * x[t - 1] - 0.4 * x[t - 2] + 0.3 * x[t - 3] + e[t]
            window = standardize(x[-512:]).values
            ladder = fit_ar_ladder(window, 12)
            if select_ar_order_bic(ladder, 512) == 3:
                hits += 1
        assert hits >= 6

    def test_tie_goes_to_smaller_order(self):
        from epicorr.portmanteau import ARModel

        ladder = [
            ARModel(1, (0.0,), 1.0, 0.0),
            ARModel(2, (0.0, 0.0), 1.0 * math.exp(-math.log(64) / 64), 0.0),
        ]
        # orders 1 and 2 then have identical BIC at n=64
        assert select_ar_order_bic(ladder, 64) == 1


class TestPrewhiten:
    def test_zero_coefficient_is_shift_plus_restandardize(self):
        from epicorr.portmanteau import ARModel

        rng = np.random.default_rng(37)
        x = standardize(rng.standard_normal(64)).values
        out = prewhiten(x, ARModel(1, (0.0,), 1.0, 0.0))
        expected = standardize(x[1:]).values
        assert np.abs(out - expected).max() < 1e-12

    def test_recovers_injected_innovations(self):
        from epicorr.portmanteau import ARModel

        rng = np.random.default_rng(41)
        e = rng.standard_normal(512)
        x = np.zeros(512)
        for t in range(2, 512):
            x[t] = 0.6 * x[t - 1] - 0.2 * x[t - 2] + e[t]
        out = prewhiten(x, ARModel(2, (0.6, -0.2), 1.0, 0.0))
        expected = standardize(e[2:]).values
        assert np.abs(out - expected).max() < 1e-10

    def test_output_length(self):
        rng = np.random.default_rng(43)
        x = standardize(rng.standard_normal(32)).values
        for p in (1, 2, 5):
            ladder = fit_ar_ladder(x, p)
            assert prewhiten(x, ladder[-1]).size == 32 - p


class TestWindowConfig:
    def test_default_ar_max(self):
        assert default_ar_max_order(256) == 24
        assert default_ar_max_order(64) == 16
        assert default_ar_max_order(8) == 2
        assert default_ar_max_order(4) == 1

    def test_validation(self):
        with pytest.raises(InputError):
            WindowConfig(n=3)
        with pytest.raises(InputError):
            WindowConfig(n=16, L=16)
        with pytest.raises(InputError):
            WindowConfig(n=16, alpha=1.5)
        with pytest.raises(InputError):
            WindowConfig(n=16, ar_max_order=14)

    def test_b_equivalent(self):
        assert WindowConfig(n=16, L=2).b_equivalent == approx(0.25)


class TestWindowTest:
    def test_constant_window_degenerate(self):
        rec = window_test([3.0] * 16, WindowConfig(16), end_index=16)
        assert rec.degenerate
        assert rec.p_xx == 1.0 and rec.p_xxx == 1.0
        assert rec.h_xx == 0.0 and rec.h_xxx == 0.0

    def test_alternating_window_composes(self):
        rec = window_test([1.0, -1.0, 1.0, -1.0], WindowConfig(4), end_index=4)
        assert rec.h_xx == approx(5.0)
        assert rec.p_xx == approx(math.exp(-2.5), rel=1e-12)

    def test_wrong_length_rejected(self):
        with pytest.raises(InputError):
            window_test([1.0] * 10, WindowConfig(16))

    def test_c_xx_lag1_from_raw_window(self):
        rng = np.random.default_rng(47)
        w = rng.standard_normal(64)
        rec = window_test(w, WindowConfig(64), end_index=64)
        assert rec.c_xx_lag1 == approx(
            sample_correlation(standardize(w).values, 1), abs=1e-15
        )

    def test_rejection_rate_on_independent_windows(self):
        # size of the H_xx test: 20,000 disjoint N(0,1) windows at alpha=0.05
        rng = np.random.default_rng(53)
        n, count = 256, 20_000
        draws = rng.standard_normal(n * count).reshape(count, n)
        rejections = 0
        for row in draws:
            x = standardize(row).values
            if chi_square_sf(h_xx(x, 2), 2) < 0.05:
                rejections += 1
        assert 0.04 <= rejections / count <= 0.06
