#!/usr/bin/env python3
"""
Test Script for Special Functions

Pochhammer symbols, monic Laguerre polynomials, Bessel I and Bell
polynomials, checked against closed forms and scipy.
"""

import math
import os
import sys

import numpy as np
import pytest
from scipy import integrate
from scipy.special import eval_genlaguerre, factorial, iv, poch

# Add src to path
sys.path.insert(0, os.path.join(os.path.dirname(__file__), '..', 'src'))

from gcrm import DomainError, PolyIndex, RangeError
from gcrm.specfun import (
    bell_complete,
    bell_partial,
    bessel_i,
    hyp1f1_laguerre,
    laguerre_generating_function,
    laguerre_laplace,
    laguerre_norm,
    laguerre_quadrature,
    laguerre_table,
    laguerre_tilde,
    log_pochhammer,
    pochhammer,
)


def test_pochhammer_values():
    """(alpha)_n on the documented examples and against scipy."""
    assert pochhammer(3.7, 0) == 1.0
    assert pochhammer(1.0, 4) == pytest.approx(24.0, rel=1e-14)
    assert pochhammer(2.5, 3) == pytest.approx(39.375, rel=1e-14)
    for alpha in (0.3, 1.0, 7.5):
        for n in (1, 5, 20):
            assert math.exp(log_pochhammer(alpha, n)) == pytest.approx(poch(alpha, n), rel=1e-12)


def test_pochhammer_domain():
    with pytest.raises(DomainError):
        pochhammer(0.0, 2)
    with pytest.raises(DomainError):
        pochhammer(1.0, -1)
    with pytest.raises(RangeError):
        pochhammer(10.0, 400)


def test_laguerre_tilde_examples():
    assert laguerre_tilde(PolyIndex(0, 1.0), 7.3) == 1.0
    assert laguerre_tilde(PolyIndex(1, 2.0), 5.0) == pytest.approx(3.0)
    assert laguerre_tilde(PolyIndex(2, 1.0), 0.0) == pytest.approx(2.0)


def test_laguerre_matches_hypergeometric_and_scipy():
    """Recurrence equals the 1F1 series and (-1)^n n! L_n^(alpha-1)."""
    x = np.linspace(0.0, 12.0, 25)
    for alpha in (0.5, 1.0, 2.5):
        table = laguerre_table(8, alpha, x)
        for n in range(9):
            idx = PolyIndex(n, alpha)
            scipy_value = (-1) ** n * factorial(n) * eval_genlaguerre(n, alpha - 1.0, x)
            np.testing.assert_allclose(table[n], hyp1f1_laguerre(idx, x), rtol=1e-10, atol=1e-8)
            np.testing.assert_allclose(table[n], scipy_value, rtol=1e-10, atol=1e-8)


def test_laguerre_at_zero():
    """L~_{n,alpha}(0) = (-1)^n (alpha)_n."""
    for n in range(6):
        assert laguerre_tilde(PolyIndex(n, 1.7), 0.0) == pytest.approx((-1) ** n * poch(1.7, n), rel=1e-12)


def test_laguerre_norm_examples():
    assert laguerre_norm(PolyIndex(0, 3.0)) == 1.0
    assert laguerre_norm(PolyIndex(2, 1.0)) == pytest.approx(4.0)
    assert laguerre_norm(PolyIndex(3, 2.0)) == pytest.approx(144.0)


def test_quadrature_orthogonality():
    """Gram matrix under Gamma(alpha, 1) is diag(n! (alpha)_n) for n, m <= 10."""
    for alpha in (0.5, 1.0, 2.5):
        points, weights = laguerre_quadrature(alpha, 60)
        assert weights.sum() == pytest.approx(1.0, rel=1e-12)
        table = laguerre_table(10, alpha, points)
        gram = (table * weights) @ table.T
        norms = np.sqrt([laguerre_norm(PolyIndex(n, alpha)) for n in range(11)])
        np.testing.assert_allclose(gram / np.outer(norms, norms), np.eye(11), atol=1e-8)
    print("✓ Laguerre orthogonality holds for alpha in {0.5, 1, 2.5}")


def test_laguerre_laplace_examples():
    assert laguerre_laplace(PolyIndex(0, 2.0), 1.0) == pytest.approx(0.25)
    assert laguerre_laplace(PolyIndex(3, 1.3), 0.0) == 0.0
    assert laguerre_laplace(PolyIndex(1, 1.0), 1.0) == pytest.approx(-0.25)
    with pytest.raises(DomainError):
        laguerre_laplace(PolyIndex(1, 1.0), -0.5)


def test_laguerre_laplace_against_integration():
    alpha, t = 1.5, 0.5
    for n in range(5):
        idx = PolyIndex(n, alpha)
        integrand = lambda x: (
            math.exp(-t * x) * laguerre_tilde(idx, x) * x ** (alpha - 1) * math.exp(-x) / math.gamma(alpha)
        )
        value, _ = integrate.quad(integrand, 0, np.inf, limit=200)
        assert laguerre_laplace(idx, t) == pytest.approx(value, rel=1e-8, abs=1e-10)


def test_generating_function():
    """sum_n L~_n(x) r^n / n! matches (1+r)^(-alpha) exp(xr/(1+r))."""
    alpha = 2.0
    x = np.array([0.0, 1.0, 3.0])
    table = laguerre_table(80, alpha, x)
    for r in (-0.4, 0.3):
        coeffs = np.array([r ** n / math.factorial(n) for n in range(81)])
        np.testing.assert_allclose(coeffs @ table, laguerre_generating_function(alpha, x, r), rtol=1e-10)
    with pytest.raises(DomainError):
        laguerre_generating_function(alpha, 1.0, 1.0)


def test_bessel_examples():
    assert bessel_i(0.0, 0.0) == 1.0
    assert bessel_i(1.5, 0.0) == 0.0
    assert bessel_i(0.5, 1.0) == pytest.approx(math.sqrt(2.0 / math.pi) * math.sinh(1.0), rel=1e-13)
    assert bessel_i(1.0, 2.0) == pytest.approx(1.590636854637329, rel=1e-13)


def test_bessel_against_scipy():
    x = np.array([0.05, 1.0, 10.0, 100.0, 650.0])
    for nu in (-0.5, 0.0, 0.5, 2.5):
        np.testing.assert_allclose(bessel_i(nu, x), iv(nu, x), rtol=1e-12)


def test_bessel_guards():
    with pytest.raises(RangeError):
        bessel_i(0.0, 701.0)
    with pytest.raises(DomainError):
        bessel_i(-1.0, 1.0)
    with pytest.raises(DomainError):
        bessel_i(0.0, -1.0)


def test_bell_partial_examples():
    xs = [2.0, 3.0, 5.0, 7.0]
    assert bell_partial(4, 1, xs) == 7.0
    assert bell_partial(2, 2, [3.0]) == 9.0
    assert bell_partial(3, 2, [2.0, 3.0]) == pytest.approx(3 * 2.0 * 3.0)
    assert bell_partial(4, 2, [2.0, 3.0, 5.0]) == pytest.approx(4 * 2.0 * 5.0 + 3 * 3.0 ** 2)


def test_bell_numbers():
    """Complete Bell polynomials at x = 1 are the Bell numbers."""
    assert [bell_complete(n, [1.0] * n) for n in range(6)] == [1.0, 1.0, 2.0, 5.0, 15.0, 52.0]


def test_bell_malformed_lengths():
    with pytest.raises(DomainError):
        bell_partial(3, 2, [1.0, 2.0, 3.0])
    with pytest.raises(DomainError):
        bell_partial(3, 4, [1.0])


def set_partitions(items):
    """Every partition of ``items`` into nonempty blocks."""
    if not items:
        yield []
        return
    first, rest = items[0], items[1:]
    for partition in set_partitions(rest):
        yield [[first]] + partition
        for i in range(len(partition)):
            yield partition[:i] + [[first] + partition[i]] + partition[i + 1:]


def test_bell_partial_against_set_partitions():
    """B_{n,k}(x) sums prod x_{|block|} over partitions of n items into k blocks."""
    xs = [1.3, -0.7, 2.9, 0.45, -1.6, 3.1]
    for n in range(1, 7):
        brute = [0.0] * (n + 1)
        for partition in set_partitions(list(range(n))):
            brute[len(partition)] += math.prod(xs[len(block) - 1] for block in partition)
        for k in range(1, n + 1):
            assert bell_partial(n, k, xs[: n - k + 1]) == pytest.approx(brute[k], rel=1e-12, abs=1e-12)


def test_generating_function_grid():
    """60-term sums match the closed form for alpha in {0.5, 1, 2.5}, x in [0, 10], |r| <= 0.5."""
    x = np.linspace(0.0, 10.0, 21)
    for alpha in (0.5, 1.0, 2.5):
        table = laguerre_table(59, alpha, x)
        for r in (-0.5, -0.25, 0.25, 0.5):
            coeffs = np.array([r ** n / math.factorial(n) for n in range(60)])
            np.testing.assert_allclose(
                coeffs @ table, laguerre_generating_function(alpha, x, r), rtol=1e-9, atol=1e-12
            )
