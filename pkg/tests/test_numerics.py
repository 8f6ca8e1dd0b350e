import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

import oracles
from qbounce.numerics import (
    Bracket,
    QuadratureError,
    TridiagonalSystem,
    cumulative_integral,
    derivative,
    eigenvalues_tridiagonal,
    integrate,
    integrate_to_infinity,
    refine_root,
    sturm_count,
)
from qbounce import airy

A1 = 2.338107410459767  # oracle bisection on the mpmath series
AIP_A1_SQUARED = 0.49169661790062885  # Ai'(-a_1)^2 from the series oracle


# ---------------------------------------------------------------- integrate


def test_integrate_constant_is_exact():
    r = integrate(lambda s: np.ones_like(s), 0.0, 1.0)
    assert r.value == 1.0
    assert r.abs_error_estimate >= 0
    assert r.evaluations >= 1


def test_integrate_linear():
    assert integrate(lambda s: s, 0.0, 1.0).value == pytest.approx(0.5, abs=1e-15)


def test_integrate_airy_squared_matches_normalisation_oracle():
    r = integrate(lambda s: airy.ai(s - 2.33810741) ** 2, 0.0, 10.0)
    assert abs(r.value - 0.491697) < 1e-6
    assert abs(r.value - AIP_A1_SQUARED) < 1e-8


def test_integrate_airy_squared_against_richardson_simpson():
    want = oracles.richardson_simpson(lambda s: oracles.ai(s - A1) ** 2, 0.0, 10.0, 400)
    got = integrate(lambda s: airy.ai(s - A1) ** 2, 0.0, 10.0).value
    assert abs(got - want) < 1e-10


def test_integrate_rejects_nan_with_abscissa():
    with pytest.raises(QuadratureError) as info:
        integrate(lambda s: np.where(s > 0.5, np.nan, s), 0.0, 1.0)
    assert info.value.abscissa is not None and info.value.abscissa > 0.5


def test_integrate_rejects_bad_interval_and_tolerances():
    with pytest.raises(ValueError):
        integrate(lambda s: s, 1.0, 0.0)
    with pytest.raises(ValueError):
        integrate(lambda s: s, 0.0, math.inf)
    with pytest.raises(ValueError):
        integrate(lambda s: s, 0.0, 1.0, abs_tol=0.0)


def test_integrate_nonconvergence_carries_best_estimate():
    with pytest.raises(QuadratureError) as info:
        integrate(lambda s: np.sin(1.0 / s), 1e-9, 1.0, abs_tol=1e-14, rel_tol=1e-14, max_depth=3)
    assert math.isfinite(info.value.value)


def test_integrate_scalar_only_callable():
    assert integrate(lambda s: math.exp(s), 0.0, 1.0).value == pytest.approx(math.e - 1, abs=1e-13)


_coeffs = st.lists(st.floats(-5, 5), min_size=1, max_size=6)


@settings(max_examples=40, deadline=None)
@given(_coeffs, _coeffs, st.floats(-3, 3), st.floats(-3, 3))
def test_integrate_is_linear(p, q, alpha, beta):
    f = np.polynomial.Polynomial(p)
    g = np.polynomial.Polynomial(q)
    lhs = integrate(lambda s: alpha * f(s) + beta * g(s), -1.0, 2.0).value
    rhs = alpha * integrate(f, -1.0, 2.0).value + beta * integrate(g, -1.0, 2.0).value
    scale = 1 + abs(alpha) * 3 * sum(abs(c) * 2 ** i for i, c in enumerate(p)) \
        + abs(beta) * 3 * sum(abs(c) * 2 ** i for i, c in enumerate(q))
    assert abs(lhs - rhs) <= 1e-11 * scale


@settings(max_examples=40, deadline=None)
@given(st.floats(-2, 0), st.floats(0.01, 2), st.floats(0.01, 2))
def test_integrate_is_additive(a, d1, d2):
    f = lambda s: np.exp(-s * s) * np.cos(3 * s)
    b, c = a + d1, a + d1 + d2
    whole = integrate(f, a, c).value
    parts = integrate(f, a, b).value + integrate(f, b, c).value
    assert abs(whole - parts) < 1e-11


def test_cumulative_integral_matches_pointwise():
    grid = np.linspace(0.0, 3.0, 31)
    got = cumulative_integral(np.cos, grid)
    assert got[0] == 0.0
    np.testing.assert_allclose(got, np.sin(grid), atol=1e-13)


# ---------------------------------------------------------------- semi-infinite


def test_integrate_to_infinity_exponential():
    r = integrate_to_infinity(lambda s: np.exp(-s), 0.0, 1e-10)
    assert abs(r.value - 1.0) < 1e-10
    assert r.cutoff is not None and r.cutoff > 0


def test_integrate_to_infinity_zero():
    assert integrate_to_infinity(lambda s: np.zeros_like(s), 0.0, 1e-10).value == 0.0


def test_integrate_to_infinity_ground_state_normalisation():
    n1 = 1.0 / abs(airy.ai_prime(-A1))
    r = integrate_to_infinity(lambda s: (n1 * airy.ai(s - A1)) ** 2, 0.0, 1e-12)
    assert abs(r.value - 1.0) < 1e-8


def test_integrate_to_infinity_hard_cutoff():
    with pytest.raises(QuadratureError):
        integrate_to_infinity(lambda s: 1.0 / (1.0 + s) ** 2, 0.0, 1e-14)


# ---------------------------------------------------------------- roots


def test_refine_root_linear():
    assert refine_root(lambda s: s - 1.0, Bracket.around(lambda s: s - 1.0, 0.0, 2.0)) == pytest.approx(1.0, abs=1e-12)


def test_refine_root_sqrt2():
    f = lambda s: s * s - 2.0
    r = refine_root(f, Bracket.around(f, 1.0, 2.0), tol=1e-12)
    assert abs(r - math.sqrt(2.0)) < 1e-10


def test_refine_root_airy_zero():
    f = lambda s: airy.ai(-s)
    r = refine_root(f, Bracket.around(f, 2.0, 3.0), tol=1e-12)
    assert abs(r - 2.33810741) < 1e-8
    assert abs(r - A1) < 1e-9


def test_bracket_rejects_invalid():
    with pytest.raises(ValueError):
        Bracket(1.0, 0.0, -1.0, 1.0)
    with pytest.raises(ValueError):
        Bracket(0.0, 1.0, 1.0, 2.0)
    with pytest.raises(ValueError):
        Bracket.around(lambda s: s * s + 1.0, -1.0, 1.0)


@settings(max_examples=60, deadline=None)
@given(st.floats(-10, 10), st.floats(0.01, 5), st.floats(0.01, 5), st.sampled_from([1, 3, 5]))
def test_refine_root_stays_in_bracket(root, left, right, power):
    f = lambda s: (s - root) ** power + 0.1 * (s - root)
    lo, hi = root - left, root + right
    r = refine_root(f, Bracket.around(f, lo, hi), tol=1e-12)
    assert lo <= r <= hi
    assert abs(r - root) < 1e-9


# ---------------------------------------------------------------- derivative


def test_derivative_of_square_is_exact():
    assert derivative(lambda s: s * s, 3.0, 1) == pytest.approx(6.0, abs=1e-9)
    assert derivative(lambda s: s * s, 3.0, 2) == pytest.approx(2.0, abs=1e-6)


def test_derivative_of_airy_at_zero():
    assert abs(derivative(airy.ai, 0.0, 1, 1e-4) - (-0.25881940)) < 1e-6


def test_derivative_rejects_bad_order_and_step():
    with pytest.raises(ValueError):
        derivative(math.sin, 0.0, 3)
    with pytest.raises(ValueError):
        derivative(math.sin, 0.0, 1, step=0.0)


@settings(max_examples=50, deadline=None)
@given(st.integers(-1000, 1000), st.integers(-1000, 1000), st.integers(-4096, 4096))
def test_derivative_of_constant_and_linear_is_exactly_zero(c, m, k):
    # dyadic abscissa and power-of-two step keep every sample exact
    s, h = k / 64.0, 2.0 ** -10
    assert derivative(lambda x: float(c), s, 1, h) == 0.0
    assert derivative(lambda x: m * x + c, s, 2, h) == 0.0


@settings(max_examples=50, deadline=None)
@given(*(st.floats(-100, 100, allow_subnormal=False),) * 3)
def test_derivative_of_linear_default_step_is_rounding_small(c, m, s):
    assert derivative(lambda x: c, s, 1) == 0.0
    bound = 4 * np.finfo(float).eps * (abs(m) * (abs(s) + 1) + abs(c)) / 1e-8
    assert abs(derivative(lambda x: m * x + c, s, 2)) <= bound


# ---------------------------------------------------------------- eigenvalues


def test_eigenvalues_two_by_two():
    np.testing.assert_allclose(eigenvalues_tridiagonal(TridiagonalSystem([2.0, 2.0], [-1.0]), 2), [1.0, 3.0], atol=1e-14)


def test_eigenvalues_one_by_one():
    assert eigenvalues_tridiagonal(TridiagonalSystem([4.5], []), 1)[0] == pytest.approx(4.5, abs=1e-15)


def test_eigenvalues_laplacian():
    n = 1000
    h = 1.0 / (n + 1)
    system = TridiagonalSystem(np.full(n, 2.0 / h ** 2), np.full(n - 1, -1.0 / h ** 2))
    lowest = eigenvalues_tridiagonal(system, 3)
    assert abs(lowest[0] - math.pi ** 2) < 1e-3
    exact = [4 / h ** 2 * math.sin(j * math.pi * h / 2) ** 2 for j in (1, 2, 3)]
    # backward-stable accuracy is a few eps times the matrix norm 4/h^2
    np.testing.assert_allclose(lowest, exact, atol=50 * np.finfo(float).eps * 4 / h ** 2)


def test_eigenvalues_k_out_of_range():
    system = TridiagonalSystem([1.0, 2.0], [0.5])
    for k in (0, -1, 3):
        with pytest.raises(ValueError):
            eigenvalues_tridiagonal(system, k)


def test_tridiagonal_shape_validation():
    with pytest.raises(ValueError):
        TridiagonalSystem([1.0, 2.0], [0.5, 0.5])


@settings(max_examples=40, deadline=None)
@given(st.lists(st.floats(-50, 50), min_size=1, max_size=30))
def test_diagonal_matrix_gives_sorted_diagonal(diag):
    system = TridiagonalSystem(diag, [0.0] * (len(diag) - 1))
    got = eigenvalues_tridiagonal(system, len(diag))
    np.testing.assert_allclose(got, sorted(diag), atol=1e-12)


@settings(max_examples=40, deadline=None)
@given(st.integers(2, 40), st.integers(0, 2 ** 32 - 1))
def test_eigenvalues_match_dense_oracle(n, seed):
    rng = np.random.default_rng(seed)
    d, e = rng.normal(size=n), rng.normal(size=n - 1)
    system = TridiagonalSystem(d, e)
    got = eigenvalues_tridiagonal(system, n)
    assert np.all(np.diff(got) >= 0)
    want = np.linalg.eigvalsh(system.to_dense())
    np.testing.assert_allclose(got, want, atol=1e-10)
    assert sturm_count(system, float(want[-1]) + 1.0) == n
