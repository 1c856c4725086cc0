"""
Szego Lab - Wiener-Hopf Tests
Scalar factorization and determinants of symbols with nonzero winding
"""

import sys
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent.parent))

from services.asymptotics import (  # noqa: E402
    brute_force_winding_det,
    laurent_roots,
    scalar_winding_theorem,
    wiener_hopf_scalar,
    winding_theorem_log,
)
from services.core.errors import GaplessSymbolError, NonzeroWindingError, ValidationError  # noqa: E402
from services.core.signed_log import SignedLogValue  # noqa: E402
from services.fixtures import example1_split  # noqa: E402
from services.structured import as_array, build_toeplitz, log_det  # noqa: E402
from services.symbols import grid_angles, scalar_coefficients, scalar_symbol, shift_symbol  # noqa: E402

THETAS = grid_angles(256)


def laurent_values(coeffs, thetas=THETAS):
    return sum(c * np.exp(-1j * k * thetas) for k, c in coeffs.items())


def laurent_product(*factors):
    out = {0: 1.0 + 0j}
    for factor in factors:
        product = {}
        for k1, c1 in out.items():
            for k2, c2 in factor.items():
                product[k1 + k2] = product.get(k1 + k2, 0) + c1 * c2
        out = product
    return out


def random_winding_free(rng, n_inside, n_outside, margin=0.05):
    """c * prod(1 - r e^{-i theta}) * prod(1 - e^{i theta}/R), roots at least ``margin`` off the circle"""
    inside = rng.uniform(margin, 1.0 - margin, n_inside) * np.exp(2j * np.pi * rng.uniform(size=n_inside))
    outside = rng.uniform(1.0 + margin, 3.0, n_outside) * np.exp(2j * np.pi * rng.uniform(size=n_outside))
    factors = [{0: 1.0, 1: -r} for r in inside] + [{0: 1.0, -1: -1.0 / R} for R in outside]
    scale = complex(rng.uniform(0.5, 2.0), rng.uniform(-1.0, 1.0))
    return {k: scale * c for k, c in laurent_product(*factors).items()}


def determinant_tolerance(p, m, n):
    """1e-7, widened by the conditioning of both sides of the comparison"""
    shifted = as_array(build_toeplitz(shift_symbol(scalar_symbol(p), m), n))
    base = as_array(build_toeplitz(scalar_symbol(p), n + abs(m)))
    kappa = np.linalg.cond(shifted) * np.linalg.cond(base)
    return max(1e-7, 1e4 * np.finfo(float).eps * kappa)


class TestLaurentRoots:
    """Tests for laurent_roots"""

    def test_single_root(self):
        assert np.allclose(laurent_roots({0: 1.0, 1: -0.5}), [0.5])

    def test_monomial_has_no_roots(self):
        assert laurent_roots({-1: 1.0}).size == 0


class TestWienerHopfScalar:
    """Tests for wiener_hopf_scalar"""

    def test_root_inside(self):
        f = wiener_hopf_scalar({0: 1.0, 1: -0.5})
        assert f.winding == 0
        assert f.phi_plus == {0: 1.0}
        assert f.phi_minus == pytest.approx({0: 1.0, 1: -0.5})
        alpha = scalar_coefficients(f.alpha)
        assert alpha[0] == pytest.approx(1.0)
        assert alpha[1] == pytest.approx(-0.5)

    def test_pure_winding(self):
        f = wiener_hopf_scalar({-1: 1.0})
        assert f.winding == 1
        assert f.roots_inside == [] and f.roots_outside == []
        assert np.allclose(f.reconstruct(THETAS), np.exp(1j * THETAS))

    def test_psi_winds_once(self):
        f = wiener_hopf_scalar({0: -1.0, -1: 2.0})
        assert f.winding == 1

    def test_lambda_winds_backwards(self):
        f = wiener_hopf_scalar({0: 1.0, 1: -2.0})
        assert f.winding == -1
        assert f.roots_outside == pytest.approx([2.0])

    def test_reconstruction(self):
        rng = np.random.default_rng(31)
        for n_in, n_out in ((1, 2), (3, 0), (0, 3), (2, 2)):
            p = random_winding_free(rng, n_in, n_out, margin=0.1)
            f = wiener_hopf_scalar(p)
            assert f.winding == 0
            assert np.max(np.abs(f.reconstruct(THETAS) - laurent_values(p))) < 1e-10

    def test_factor_supports(self):
        """phi_minus lives on k >= 0, phi_plus on k <= 0"""
        rng = np.random.default_rng(32)
        f = wiener_hopf_scalar(random_winding_free(rng, 2, 2, margin=0.1))
        assert all(k >= 0 for k in f.phi_minus)
        assert all(k <= 0 for k in f.phi_plus)
        assert f.alpha.tail_bound < 1e-12

    def test_shifted_reconstruction(self):
        p = {2: 1.0, 3: -0.5}
        f = wiener_hopf_scalar(p)
        assert f.winding == -2
        assert np.max(np.abs(f.reconstruct(THETAS) - laurent_values(p))) < 1e-12

    def test_root_on_circle(self):
        with pytest.raises(GaplessSymbolError):
            wiener_hopf_scalar({0: 1.0, 1: -1.0})

    def test_zero_polynomial(self):
        with pytest.raises(ValidationError):
            wiener_hopf_scalar({0: 0.0})

    def test_to_dict(self):
        data = wiener_hopf_scalar({0: 1.0, 1: -2.0}).to_dict()
        assert data["winding"] == -1
        assert len(data["roots_outside"]) == 1


class TestWindingTheorem:
    """Tests for scalar_winding_theorem"""

    def test_psi_alternates(self):
        """psi = -1 + 2 e^{i theta} = e^{i theta} (2 - e^{-i theta})"""
        p = {0: 2.0, 1: -1.0}
        for n in range(3, 10):
            expected = (-1.0) ** n
            assert scalar_winding_theorem(p, -1, n) == pytest.approx(expected, abs=1e-10)
            assert scalar_winding_theorem(p, -1, n, method="exact") == pytest.approx(expected, abs=1e-10)
            assert brute_force_winding_det(p, -1, n).isclose(expected)

    def test_single_outside_root(self):
        """e^{-i theta} (1 - e^{i theta}/2) is lower bidiagonal"""
        p = {0: 1.0, -1: -0.5}
        for n in range(3, 10):
            assert scalar_winding_theorem(p, 1, n) == pytest.approx((-0.5) ** n, rel=1e-10)

    def test_m_zero(self):
        p = {0: 1.0, 1: 0.3, -1: 0.2}
        value = winding_theorem_log(p, 0, 6)
        assert value.isclose(log_det(build_toeplitz(scalar_symbol(p), 6)))

    def test_matches_brute_force(self):
        """50 random symbols of degree <= 3, roots 0.05 off the circle, n in 3..12, |m| <= 3"""
        rng = np.random.default_rng(41)
        compared = 0
        for trial in range(50):
            n_inside = int(rng.integers(0, 4))
            n_outside = int(rng.integers(0 if n_inside else 1, 4 - n_inside))
            p = random_winding_free(rng, n_inside, n_outside)
            # shifts that push the whole band off the diagonal give a triangular, singular T_n
            shifts = [m for m in (1, 2, 3, -1, -2, -3) if min(p) + m <= 0 <= max(p) + m]
            assert shifts, trial
            for n in range(3, 13):
                for m in shifts:
                    exact = winding_theorem_log(p, m, n, method="exact")
                    brute = brute_force_winding_det(p, m, n)
                    tol = determinant_tolerance(p, m, n)
                    assert exact.isclose(brute, rel_tol=tol), (trial, n, m, tol)
                    compared += 1
        assert compared >= 500

    def test_asymptotic_form_at_large_n(self):
        p = laurent_product({0: 1.0, 1: -0.3}, {0: 1.0, -1: -1.0 / 3.0})
        for m in (1, -1):
            approx = winding_theorem_log(p, m, 12)
            assert approx.isclose(brute_force_winding_det(p, m, 12), rel_tol=1e-6)

    def test_rejects_winding_input(self):
        with pytest.raises(NonzeroWindingError):
            winding_theorem_log({1: 1.0}, 1, 4)

    def test_unknown_method(self):
        with pytest.raises(ValidationError):
            winding_theorem_log({0: 1.0}, 1, 4, method="guess")


class TestExample1Split:
    """det T_n(phi) = (-1)^n det T_n(lambda) det T_n(psi)"""

    def test_split_reproduces_determinant(self, example1_large):
        lam, psi = example1_split(2.0)
        for n in range(3, 11):
            split = log_det(build_toeplitz(lam, n)) * log_det(build_toeplitz(psi, n)) * (-1.0) ** n
            assert split.isclose(log_det(build_toeplitz(example1_large.symbol, n)))
            assert split.isclose(SignedLogValue.one())

    def test_factor_windings(self):
        lam, psi = example1_split(2.0)
        assert wiener_hopf_scalar(lam).winding == -1
        assert wiener_hopf_scalar(psi).winding == 1
