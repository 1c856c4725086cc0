"""
Szego Lab - Symbol Tests
Fourier convention, sampling, series re-expansion and inversion
"""

import json
import math
import sys
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent.parent))

from services.core.errors import (  # noqa: E402
    DimensionMismatchError,
    DuplicateIndexError,
    SingularSampleError,
    SymbolFileError,
    ValidationError,
)
from services.fixtures import example2_evaluator  # noqa: E402
from services.structured import build_toeplitz  # noqa: E402
from services.symbols import (  # noqa: E402
    decay_ratio,
    det_on_grid,
    evaluate,
    evaluate_many,
    identity_symbol,
    inverse_symbol,
    reflect_symbol,
    sample,
    sample_to_series,
    scalar_coefficients,
    scalar_symbol,
    shift_symbol,
    symbol_from_coefficients,
    symbol_from_dict,
    symbol_to_dict,
)


def random_banded(rng, N=2, k_lo=-5, k_hi=5):
    coeffs = {
        k: rng.standard_normal((N, N)) + 1j * rng.standard_normal((N, N))
        for k in range(k_lo, k_hi + 1)
    }
    return symbol_from_coefficients(N, coeffs, name="random")


class TestSymbolConstruction:
    """Tests for symbol_from_coefficients"""

    def test_band_and_block_size(self):
        s = symbol_from_coefficients(2, {0: np.eye(2), 3: np.eye(2), -1: np.eye(2)})
        assert s.block_size == 2
        assert s.band == (-1, 3)

    def test_missing_zero_coefficient_is_filled(self):
        s = scalar_symbol({2: 1.0})
        assert 0 in s.coefficients
        assert s.coefficient(0)[0, 0] == 0

    def test_shape_mismatch(self):
        with pytest.raises(DimensionMismatchError):
            symbol_from_coefficients(2, {0: [[1, 0, 0], [0, 1, 0], [0, 0, 1]]})

    def test_duplicate_index(self):
        with pytest.raises(DuplicateIndexError):
            symbol_from_coefficients(1, [(1, [[1.0]]), (1, [[2.0]])])

    def test_coefficients_are_immutable(self):
        s = identity_symbol(2)
        with pytest.raises(ValueError):
            s.coefficients[0][0, 0] = 5.0

    def test_absent_coefficient_is_zero_block(self, example1_large):
        assert np.all(example1_large.symbol.coefficient(7) == 0)


class TestEvaluate:
    """Tests for evaluate and the Fourier convention"""

    def test_example1_at_zero(self, example1_large):
        assert np.allclose(evaluate(example1_large.symbol, 0.0), [[0, -1], [1, 0]], atol=1e-14)

    def test_example3_at_pi(self, example3):
        assert np.allclose(evaluate(example3.symbol, math.pi), [[0, -1], [-1, 0]], atol=1e-14)

    def test_identity_everywhere(self):
        values = evaluate_many(identity_symbol(3), np.linspace(0, 2 * math.pi, 9))
        assert np.allclose(values, np.eye(3))

    def test_positive_index_multiplies_e_minus_i_theta(self):
        s = scalar_symbol({1: 1.0})
        theta = 0.7
        assert evaluate(s, theta)[0, 0] == pytest.approx(np.exp(-1j * theta))

    def test_toeplitz_block_is_coefficient(self):
        """block (i, j) of T_n is phi_{i-j}, bit for bit"""
        rng = np.random.default_rng(3)
        s = random_banded(rng, k_lo=-2, k_hi=3)
        T = build_toeplitz(s, 6)
        for i in range(6):
            for j in range(6):
                assert np.array_equal(T.block(i, j), s.coefficient(i - j))


class TestSampling:
    """Tests for sample, sample_to_series and det_on_grid"""

    def test_grid_must_be_power_of_two(self, identity):
        with pytest.raises(ValidationError):
            sample(identity, 100)

    def test_fft_sampling_matches_direct_sum(self):
        rng = np.random.default_rng(11)
        s = random_banded(rng)
        sampled = sample(s, 64)
        assert np.allclose(sampled.samples, evaluate_many(s, sampled.thetas), atol=1e-12)

    def test_round_trip(self):
        """sample_to_series(evaluate(s, .)) reproduces the coefficients"""
        rng = np.random.default_rng(5)
        for band in (3, 17, 64):
            s = random_banded(rng, k_lo=-(band // 2), k_hi=band - band // 2 - 1)
            series = sample_to_series(lambda th: evaluate_many(s, th), 2)
            for k in range(s.k_min - 2, s.k_max + 3):
                assert np.max(np.abs(series.coefficient(k) - s.coefficient(k))) < 1e-10

    def test_scalar_angle_evaluator(self):
        series = sample_to_series(lambda th: [[1.0]], 1)
        assert series.indices() == [0]
        assert series.coefficient(0)[0, 0] == pytest.approx(1.0)
        assert series.tail_bound < 1e-14

    def test_example2_coefficients(self, example2):
        s = example2.symbol
        u, v = 0.3, 0.6
        assert np.allclose(s.coefficient(0), [[0, u], [-u, 0]], atol=1e-10)
        assert np.allclose(s.coefficient(-1), [[u * v, u * u * v], [v, u * v]], atol=1e-10)

    def test_example2_decay(self, example2):
        """coefficients of z^k fall off as (uv)^k"""
        assert decay_ratio(example2.symbol, side=-1) == pytest.approx(0.18, abs=1e-3)

    def test_det_on_grid_example1(self, example1_large):
        dets = det_on_grid(example1_large.symbol, 16)
        assert dets[0] == pytest.approx(1.0)
        thetas = 2 * np.pi * np.arange(16) / 16
        assert np.allclose(dets, 1 + 4 - 4 * np.cos(thetas))

    def test_det_on_grid_identity(self, identity):
        assert np.allclose(det_on_grid(identity, 8), 1.0)

    def test_det_on_grid_example2(self, example2):
        u, v = 0.3, 0.6
        expected = ((u / v + v / u) / 2 - 1) / ((u * v + 1 / (u * v)) / 2 - 1)
        assert det_on_grid(example2.symbol, 32)[0] == pytest.approx(expected, rel=1e-10)


class TestInverse:
    """Tests for inverse_symbol"""

    def test_constant(self):
        inv = inverse_symbol(scalar_symbol({0: 2.0}))
        assert inv.indices() == [0]
        assert inv.coefficient(0)[0, 0] == pytest.approx(0.5)

    def test_example1_zeroth_coefficient(self, example1_small):
        inv = inverse_symbol(example1_small.symbol)
        assert np.allclose(inv.coefficient(0), [[0, -1], [1, 0]], atol=1e-12)

    def test_pointwise_inverse(self, example1_large, example2):
        rng = np.random.default_rng(17)
        thetas = rng.uniform(0, 2 * math.pi, 17)
        for fixture in (example1_large, example2):
            inv = inverse_symbol(fixture.symbol)
            product = evaluate_many(inv, thetas) @ evaluate_many(fixture.symbol, thetas)
            assert np.max(np.abs(product - np.eye(2))) < 1e-10

    def test_tail_bound_certified(self, example2):
        assert inverse_symbol(example2.symbol).tail_bound < 1e-12

    def test_singular_sample(self):
        s = scalar_symbol({0: 1.0, 1: -1.0})
        with pytest.raises(SingularSampleError):
            inverse_symbol(s)

    def test_example2_gapless(self):
        """u = v makes det phi vanish at theta = 0"""
        s = sample_to_series(example2_evaluator(0.5, 0.5), 2)
        with pytest.raises(SingularSampleError):
            inverse_symbol(s)


class TestTransforms:
    """Tests for shift, reflect and the JSON form"""

    def test_shift(self):
        s = shift_symbol(scalar_symbol({0: 1.0, -1: 2.0}), 3)
        assert scalar_coefficients(s) == {2: 2.0, 3: 1.0, 0: 0.0}

    def test_reflect_transposes_toeplitz(self):
        rng = np.random.default_rng(8)
        s = random_banded(rng, N=1, k_lo=-2, k_hi=4)
        T = build_toeplitz(s, 7).data
        R = build_toeplitz(reflect_symbol(s), 7).data
        assert np.array_equal(R, T.T)

    def test_scalar_coefficients_rejects_blocks(self, example1_large):
        with pytest.raises(DimensionMismatchError):
            scalar_coefficients(example1_large.symbol)

    def test_json_round_trip(self, example3):
        data = json.loads(json.dumps(symbol_to_dict(example3.symbol)))
        back = symbol_from_dict(data)
        for k in (-1, 0, 1):
            assert np.array_equal(back.coefficient(k), example3.symbol.coefficient(k))

    def test_json_missing_field(self):
        with pytest.raises(SymbolFileError):
            symbol_from_dict({"coefficients": []})

    def test_json_wrong_shape(self):
        with pytest.raises(DimensionMismatchError):
            symbol_from_dict({"block_size": 2, "coefficients": [{"k": 0, "re": [[1.0]], "im": [[0.0]]}]})
