"""
Szego Lab - Zero Mode Tests
Spectral scan, power iteration, inverse-coefficient decay and root analysis
"""

import math
import sys
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent.parent))

from services.core.errors import (  # noqa: E402
    GaplessSymbolError,
    InsufficientDataError,
    PreconditionError,
    UnderflowError,
    ValidationError,
)
from services.fixtures import example2_evaluator  # noqa: E402
from services.structured import build_toeplitz, eigensystem  # noqa: E402
from services.symbols import inverse_symbol, sample_to_series, scalar_symbol  # noqa: E402
from services.zero_modes import (  # noqa: E402
    circulant_gap,
    det_ratio_bound,
    inverse_coefficient_decay,
    power_iteration_mode,
    root_analysis,
    site_profile,
    spectral_hausdorff_distance,
    spectrum_row,
    zero_mode_scan,
)

LN_HALF = math.log(0.5)


def within(a, b, rel):
    return abs(a - b) <= rel * abs(b)


class TestZeroModeScan:
    """Tests for zero_mode_scan"""

    def test_example2_one_pair(self, example2):
        report = zero_mode_scan(example2.symbol, range(6, 17))
        assert report.pair_count == 1
        assert report.mode_count == 2
        assert report.fitted_rate == pytest.approx(LN_HALF, rel=0.05)
        assert report.n_values == list(range(6, 17))

    def test_example1_trivial(self, example1_small):
        report = zero_mode_scan(example1_small.symbol, range(6, 17))
        assert report.pair_count == 0
        assert report.fitted_rate is None

    def test_example1b_two_pairs(self, example1b):
        report = zero_mode_scan(example1b.symbol, range(10, 17))
        assert report.pair_count == 2

    def test_epsilons_sorted(self, example2):
        report = zero_mode_scan(example2.symbol, range(6, 10))
        for eps in report.epsilons:
            assert eps == sorted(eps)
            assert abs(eps[0] - eps[1]) <= 1e-10

    def test_default_range(self, example1_large):
        report = zero_mode_scan(example1_large.symbol)
        assert report.n_values == list(range(6, 17))

    def test_profile_peaks_at_boundary(self, example2):
        report = zero_mode_scan(example2.symbol, range(6, 17))
        profile = report.profile
        assert len(profile) == 16
        assert max(profile[0], profile[-1]) > 10 * profile[8]

    def test_to_dict(self, example1_large):
        data = zero_mode_scan(example1_large.symbol, range(6, 12)).to_dict()
        assert data["pair_count"] == 1
        assert len(data["gap_circulant"]) == 6
        assert data["det_ratio_trace"][0]["n"] == 6

    def test_underflow(self, example2):
        with pytest.raises(UnderflowError):
            zero_mode_scan(example2.symbol, range(50, 57))

    def test_gapless(self):
        s = sample_to_series(example2_evaluator(0.5, 0.5), 2)
        with pytest.raises(GaplessSymbolError):
            zero_mode_scan(s, range(6, 10))

    def test_single_n(self, example2):
        with pytest.raises(InsufficientDataError):
            zero_mode_scan(example2.symbol, [8])

    def test_spectrum_row_threshold(self, example1_large):
        row = spectrum_row(example1_large.symbol, 10)
        assert row.gap == pytest.approx(circulant_gap(example1_large.symbol, 10))
        assert row.epsilons[1] < row.threshold < row.epsilons[2]
        assert row.candidate_pairs == 1


class TestConsistency:
    """Splitting rate, inverse-coefficient decay and nearest root agree"""

    def test_example2_triangle(self, example2):
        report = zero_mode_scan(example2.symbol, range(6, 17))
        rate, _ = inverse_coefficient_decay(example2.symbol)
        assert within(abs(report.fitted_rate), abs(rate), 0.05)
        assert report.coeff_decay_rate == pytest.approx(rate)
        assert report.root_gap is None

    def test_example1_triangle(self, example1_large):
        report = zero_mode_scan(example1_large.symbol, range(6, 17))
        rate, _ = inverse_coefficient_decay(example1_large.symbol)
        root_gap = root_analysis(example1_large.symbol)[0][1]
        assert within(abs(report.fitted_rate), abs(rate), 0.05)
        assert within(abs(rate), root_gap, 0.05)
        assert within(abs(report.fitted_rate), root_gap, 0.05)
        assert report.root_gap == pytest.approx(root_gap)

    def test_det_ratio_bounded(self, example2):
        report = zero_mode_scan(example2.symbol, range(6, 17))
        assert det_ratio_bound(report) < 0.5

    def test_hausdorff_shrinks(self, example1_large):
        small = spectral_hausdorff_distance(example1_large.symbol, 6, pair_count=1)
        large = spectral_hausdorff_distance(example1_large.symbol, 16, pair_count=1)
        assert large < small


class TestPowerIteration:
    """Tests for power_iteration_mode"""

    def test_example2_finds_mode(self, example2):
        result = power_iteration_mode(example2.symbol, 14)
        assert result.is_zero_mode
        assert result.residual <= 1e-6 * result.gap
        assert result.solves >= 1
        assert abs(result.energy) < result.gap / 2

    def test_matches_eigenvector(self, example2):
        n = 16
        result = power_iteration_mode(example2.symbol, n)
        pair = eigensystem(build_toeplitz(example2.symbol, n)).vectors[:, :2]
        assert float(np.max(np.abs(pair.conj().T @ result.vector))) >= 0.999

    def test_identity(self):
        result = power_iteration_mode(scalar_symbol({0: 1.0}), 5)
        assert result.residual == pytest.approx(0.0, abs=1e-14)
        assert result.eigenvalue == pytest.approx(1.0)
        assert not result.is_zero_mode

    def test_trivial_reports_absence(self, example1_small):
        result = power_iteration_mode(example1_small.symbol, 12)
        assert not result.is_zero_mode
        assert abs(result.energy) >= result.gap / 2

    def test_seed_outside_chain(self, example2):
        with pytest.raises(ValidationError):
            power_iteration_mode(example2.symbol, 8, seed_site=8)

    def test_site_profile(self):
        assert site_profile(np.array([3.0, 4.0, 0.0, 0.0]), 2) == [5.0, 0.0]


class TestInverseCoefficientDecay:
    """Tests for inverse_coefficient_decay"""

    def test_example2(self, example2):
        rate, per_entry = inverse_coefficient_decay(example2.symbol)
        assert rate == pytest.approx(LN_HALF, abs=0.02)
        assert per_entry.shape == (2, 2)

    def test_example1(self, example1_large):
        rate, per_entry = inverse_coefficient_decay(example1_large.symbol)
        assert rate == pytest.approx(LN_HALF, abs=1e-3)
        # the inverse is off-diagonal: diagonal entries have no usable points
        assert np.isnan(per_entry[0, 0]) and np.isnan(per_entry[1, 1])
        assert per_entry[0, 1] == pytest.approx(LN_HALF, abs=1e-3)

    def test_identity(self, identity):
        with pytest.raises(InsufficientDataError):
            inverse_coefficient_decay(identity)

    def test_reuses_given_inverse(self, example2):
        inverse = inverse_symbol(example2.symbol)
        rate, _ = inverse_coefficient_decay(example2.symbol, inverse=inverse)
        assert rate == inverse_coefficient_decay(example2.symbol)[0]

    def test_scan_reports_ratio_per_side(self, example2):
        """(phi^-1)_k falls off as (u/v)^|k| on both sides"""
        report = zero_mode_scan(example2.symbol, range(6, 15))
        assert set(report.coeff_decay_ratios) == {"plus", "minus"}
        for ratio in report.coeff_decay_ratios.values():
            assert ratio == pytest.approx(0.5, abs=0.03)
        assert report.to_dict()["coeff_decay_ratios"] == report.coeff_decay_ratios


class TestRootAnalysis:
    """Tests for root_analysis"""

    def test_example1(self, example1_large):
        roots = root_analysis(example1_large.symbol)
        assert sorted(abs(r) for r, _ in roots) == pytest.approx([0.5, 2.0])
        assert roots[0][1] == pytest.approx(math.log(2.0))

    def test_scalar(self):
        roots = root_analysis(scalar_symbol({0: 1.0, 1: -0.5}))
        assert len(roots) == 1
        assert roots[0][0] == pytest.approx(0.5)

    def test_evaluator_symbol(self, example2):
        with pytest.raises(PreconditionError):
            root_analysis(example2.symbol)

    def test_root_on_circle(self):
        with pytest.raises(GaplessSymbolError):
            root_analysis(scalar_symbol({0: 1.0, 1: -1.0}))
