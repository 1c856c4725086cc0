"""
Szego Lab - Structured Matrix Tests
Toeplitz/circulant assembly, sign-tracked determinants, Pfaffians, solves, spectra
"""

import math
import sys
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent.parent))

from services.core.errors import (  # noqa: E402
    AsymmetryError,
    BandTooWideError,
    SingularMatrixError,
    SizeCapExceededError,
    StructureError,
    ValidationError,
)
from services.core.signed_log import SignedLogValue  # noqa: E402
from services.structured import (  # noqa: E402
    MatrixKind,
    build_circulant,
    build_toeplitz,
    circulant_log_det,
    circulant_spectrum,
    eigensystem,
    log_det,
    pfaffian,
    solve,
    spectrum,
)
from services.symbols import identity_symbol, scalar_symbol, symbol_from_coefficients  # noqa: E402


def random_antisymmetric(rng, size):
    a = rng.standard_normal((size, size))
    return a - a.T


class TestSignedLogValue:
    """Tests for SignedLogValue arithmetic"""

    def test_from_value(self):
        x = SignedLogValue.from_value(-8.0)
        assert x.sign == -1.0
        assert x.log_abs == pytest.approx(math.log(8.0))
        assert x.real_value == pytest.approx(-8.0)

    def test_multiply_adds_logs(self):
        x = SignedLogValue.from_value(-2.0) * SignedLogValue.from_value(3.0)
        assert x.isclose(-6.0)

    def test_power_beyond_double_range(self):
        x = SignedLogValue.from_value(0.3) ** 1000
        assert x.log_abs == pytest.approx(1000 * math.log(0.3))
        assert x.value == 0 or abs(x.value) < 1e-300

    def test_zero(self):
        zero = SignedLogValue.zero()
        assert zero.is_zero
        assert (zero * 5.0).is_zero
        assert zero.sign == 0.0
        with pytest.raises(ZeroDivisionError):
            SignedLogValue.one() / zero

    def test_complex_phase(self):
        x = SignedLogValue.from_value(1j)
        assert not x.is_real
        with pytest.raises(ValueError):
            x.sign
        assert (x * x).isclose(-1.0)

    def test_to_dict(self):
        data = SignedLogValue.from_value(-1.0).to_dict()
        assert data == {"log_abs": 0.0, "phase_re": -1.0, "phase_im": 0.0}


class TestBuildToeplitz:
    """Tests for build_toeplitz"""

    def test_example1_corner(self, example1_large):
        T = build_toeplitz(example1_large.symbol, 2)
        expected = [[0, 1, 0, 0], [-1, 0, 2, 0], [0, -2, 0, 1], [0, 0, -1, 0]]
        assert T.kind == MatrixKind.TOEPLITZ
        assert np.array_equal(T.data, np.array(expected, dtype=float))

    def test_identity(self, identity):
        assert np.array_equal(build_toeplitz(identity, 5).data, np.eye(5))

    def test_example2_upper_block(self, example2):
        T = build_toeplitz(example2.symbol, 2)
        assert np.allclose(T.block(0, 1), [[0.18, 0.054], [0.6, 0.18]], atol=1e-10)

    def test_example2_upper_left_entries(self, example2):
        """upper-left entry of block (i, j), j > i, is (uv)^{j-i}"""
        T = build_toeplitz(example2.symbol, 6)
        for d in range(1, 6):
            assert T.block(0, d)[0, 0] == pytest.approx(0.18**d, abs=1e-11)

    def test_real_symbol_gives_real_matrix(self, example1_large, example3):
        assert not np.iscomplexobj(build_toeplitz(example1_large.symbol, 3).data)
        assert not np.iscomplexobj(build_toeplitz(example3.symbol, 3).data)

    def test_size_cap(self, identity):
        with pytest.raises(SizeCapExceededError):
            build_toeplitz(identity, 10, size_cap=5)

    def test_size_cap_from_environment(self, monkeypatch, example1_large):
        from backend.config import reload_config

        monkeypatch.setenv("SZEGO_LAB_SIZE_CAP", "8")
        reload_config()
        with pytest.raises(SizeCapExceededError):
            build_toeplitz(example1_large.symbol, 5)

    def test_nonpositive_n(self, identity):
        with pytest.raises(ValidationError):
            build_toeplitz(identity, 0)


class TestBuildCirculant:
    """Tests for build_circulant"""

    def test_wrapped_block(self, example1_large):
        C = build_circulant(example1_large.symbol, 4)
        assert C.kind == MatrixKind.CIRCULANT
        assert np.array_equal(C.block(0, 3), [[0, -2], [0, 0]])

    def test_block_rows_are_cyclic_shifts(self, example1_large):
        C = build_circulant(example1_large.symbol, 6)
        for i in range(6):
            for j in range(6):
                assert np.array_equal(C.block(i, j), C.block(0, (j - i) % 6))

    def test_identity(self, identity):
        assert np.array_equal(build_circulant(identity, 7).data, np.eye(7))

    def test_band_too_wide(self, example1_large):
        with pytest.raises(BandTooWideError):
            build_circulant(example1_large.symbol, 2)

    def test_circulant_determinant_is_product_over_momenta(self, example1_large, example3):
        for fixture in (example1_large, example3):
            for n in range(3, 17):
                direct = log_det(build_circulant(fixture.symbol, n))
                assert direct.isclose(circulant_log_det(fixture.symbol, n), rel_tol=1e-9)


class TestLogDet:
    """Tests for log_det"""

    def test_example1_unit_determinant(self, example1_large):
        det = log_det(build_toeplitz(example1_large.symbol, 10))
        assert det.phase == 1.0
        assert abs(det.log_abs) < 1e-10

    def test_identity(self):
        assert log_det(np.eye(7)).isclose(1.0)

    def test_example2(self, example2):
        det = log_det(build_toeplitz(example2.symbol, 8))
        assert det.sign == 1.0
        assert det.log_abs == pytest.approx(16 * math.log(0.3), abs=1e-6)

    def test_permutation_sign(self):
        swap = np.array([[0.0, 1.0], [1.0, 0.0]])
        assert log_det(swap).isclose(-1.0)

    def test_exact_zero(self):
        det = log_det(np.zeros((3, 3)))
        assert det.is_zero
        assert det.log_abs == -math.inf

    def test_complex_matrix(self):
        rng = np.random.default_rng(2)
        a = rng.standard_normal((6, 6)) + 1j * rng.standard_normal((6, 6))
        assert log_det(a).isclose(np.linalg.det(a), rel_tol=1e-10)


class TestPfaffian:
    """Tests for pfaffian"""

    def test_two_by_two(self):
        assert pfaffian(np.array([[0.0, 3.0], [-3.0, 0.0]])) == pytest.approx(3.0)

    def test_canonical_form(self):
        J = np.array([[0.0, 1.0], [-1.0, 0.0]])
        assert pfaffian(np.kron(np.eye(2), J)) == pytest.approx(1.0)

    def test_squares_to_determinant(self):
        rng = np.random.default_rng(0)
        for trial in range(200):
            size = 2 * (1 + trial % 8)
            a = random_antisymmetric(rng, size)
            pf = pfaffian(a)
            det = np.linalg.det(a)
            assert abs(pf * pf - det) <= 1e-8 * abs(det)

    def test_input_untouched(self):
        rng = np.random.default_rng(4)
        a = random_antisymmetric(rng, 6)
        before = a.copy()
        pfaffian(a)
        assert np.array_equal(a, before)

    def test_odd_dimension(self):
        rng = np.random.default_rng(6)
        assert pfaffian(random_antisymmetric(rng, 5)) == 0.0

    def test_asymmetric_rejected(self):
        with pytest.raises(AsymmetryError):
            pfaffian(np.array([[0.0, 1.0], [2.0, 0.0]]))


class TestSolve:
    """Tests for solve"""

    def test_identity(self):
        e1 = np.array([1.0, 0.0, 0.0])
        assert np.array_equal(solve(np.eye(3), e1), e1)

    def test_example1_residual(self, example1_large):
        T = build_toeplitz(example1_large.symbol, 2)
        b = np.array([1.0, 0.0, 0.0, 0.0])
        x = solve(T, b)
        assert np.linalg.norm(T.data @ x - b) <= 1e-12

    def test_singular(self):
        with pytest.raises(SingularMatrixError):
            solve(np.array([[1.0, 1.0], [1.0, 1.0]]), np.array([1.0, 0.0]))


class TestSpectrum:
    """Tests for spectrum and eigensystem"""

    def test_two_by_two(self):
        values = spectrum(np.array([[0.0, 1.0], [-1.0, 0.0]]))
        assert np.allclose(sorted(values.imag), [-1.0, 1.0])
        assert np.allclose(values.real, 0.0)

    def test_antisymmetric_pairs(self):
        rng = np.random.default_rng(9)
        energies = eigensystem(random_antisymmetric(rng, 10)).energies
        assert np.allclose(np.sort(energies), -np.sort(energies)[::-1], atol=1e-10)
        assert np.all(np.diff(np.abs(energies)) >= -1e-12)

    def test_circulant_example1(self, example1_large):
        u, n = 2.0, 12
        values = spectrum(build_circulant(example1_large.symbol, n))
        thetas = 2 * np.pi * np.arange(n) / n
        moduli = np.abs(1 - u * np.exp(1j * thetas))
        assert np.allclose(np.sort(values.imag), np.sort(np.concatenate([moduli, -moduli])), atol=1e-10)

    def test_circulant_matches_symbol_eigenvalues(self, example3):
        n = 10
        direct = np.sort(spectrum(build_circulant(example3.symbol, n)).real)
        from_symbol = np.sort(circulant_spectrum(example3.symbol, n).real)
        assert np.allclose(direct, from_symbol, atol=1e-10)

    def test_hermitian_is_real(self, example3):
        es = eigensystem(build_toeplitz(example3.symbol, 6))
        assert es.structure == "hermitian"
        assert np.all(np.isreal(es.values))

    def test_example2_smallest_pair_decays(self, example2):
        smallest = [abs(eigensystem(build_toeplitz(example2.symbol, n)).energies[0]) for n in range(8, 15)]
        slope = np.polyfit(np.arange(8, 15), np.log(smallest), 1)[0]
        assert math.exp(slope) == pytest.approx(0.5, abs=0.03)

    def test_unstructured_rejected(self):
        with pytest.raises(StructureError):
            spectrum(np.array([[1.0, 2.0], [3.0, 4.0]]))

    def test_complex_block_symbol(self):
        s = symbol_from_coefficients(1, {0: [[1.0]], 1: [[0.5j]], -1: [[-0.5j]]})
        assert eigensystem(build_toeplitz(s, 4)).structure == "hermitian"

    def test_scalar_identity_spectrum(self):
        values = spectrum(build_toeplitz(identity_symbol(1), 3))
        assert np.allclose(values, 1.0)
        assert scalar_symbol({0: 1.0}).is_real()
