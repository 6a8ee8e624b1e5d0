"""Tests for the torus quadrature, the dimer matrix, and its symbol."""

import numpy as np
import pytest

from dimerdet import (
    DimerParams,
    ParameterOutOfRange,
    kernel_symbols,
    coefficient_Q,
    coefficient_R,
    correlation_finite,
    correlation_limit,
    dimer_coefficients,
    dimer_matrix,
    flip_conjugate,
    fourier_coefficients,
    log_determinant,
    phi_table,
    symbol_phi,
    toeplitz_matrix,
)


def fft_coeffs(sym, m=256):
    x = 2 * np.pi * np.arange(m) / m
    return np.fft.fft(sym(x)) / m, m


def test_params_reject_nonpositive_real_part():
    with pytest.raises(ParameterOutOfRange):
        DimerParams(-0.3)
    with pytest.raises(ParameterOutOfRange):
        DimerParams(0.5j)


def test_integrand_denominator_nonzero_spot():
    # direct substitution at t=1, x=y=pi/2
    t, x, y = 1.0, np.pi / 2, np.pi / 2
    den = np.cos(x) ** 2 + np.cos(y) ** 2 + t ** 2 * np.cos(x + y) ** 2
    assert abs(den - 1.0) < 1e-15


def test_q_vanishes_for_even_k():
    rng = np.random.default_rng(3)
    for _ in range(5):
        t = complex(rng.uniform(0.1, 1.4), rng.uniform(-0.4, 0.4))
        params = DimerParams(t, quad_grid=128)
        for k in (-4, -2, 0, 2, 6):
            assert abs(coefficient_Q(params, k)) < 1e-14


def test_q_symmetry_in_k():
    params = DimerParams(0.8)
    for k in (1, 3, 5):
        assert abs(coefficient_Q(params, k) - coefficient_Q(params, -k)) < 1e-12


def test_quadrature_grid_convergence():
    coarse = DimerParams(0.45, quad_grid=128)
    fine = DimerParams(0.45, quad_grid=256)
    for k in range(-8, 9):
        assert abs(coefficient_R(coarse, k) - coefficient_R(fine, k)) < 1e-10
        assert abs(coefficient_Q(coarse, k) - coefficient_Q(fine, k)) < 1e-10


@pytest.mark.parametrize("t", [0.5, 0.7])
def test_sum_kernel_coefficients_match_r(t):
    # S_k + T_k = (-1)^[-k/2] R_{-k+1}: the sum-kernel closed form against
    # the 2-D quadrature
    params = DimerParams(t)
    st = kernel_symbols(params).st_closed
    coeffs, m = fft_coeffs(st)
    for k in range(-4, 5):
        sign = 1.0 if (((-k) // 2) % 2 == 0) else -1.0
        assert abs(coeffs[k % m] - sign * coefficient_R(params, -k + 1)) < 1e-9


def test_antisymmetric_kernel_coefficients_match_q():
    # with the global sign dropped, V_k = i (-1)^{1+floor(k/2)} Q_k (odd k)
    params = DimerParams(0.5)
    v = kernel_symbols(params).v_closed
    coeffs, m = fft_coeffs(v)
    for k in (-3, -1, 1, 3):
        sign = 1.0 if ((1 + (k // 2)) % 2 == 0) else -1.0
        assert abs(coeffs[k % m] - 1j * sign * coefficient_Q(params, k)) < 1e-9


def test_kernel_quadrature_vs_closed_forms():
    params = DimerParams(0.7, quad_grid=128)
    syms = kernel_symbols(params)
    x = 2 * np.pi * np.arange(32) / 32 - np.pi
    assert np.max(np.abs(syms.st_quadrature(x) - syms.st_closed(x))) < 1e-9
    assert np.max(np.abs(syms.v_quadrature(x) - syms.v_closed(x))) < 1e-9


def test_kernel_spot_values():
    params = DimerParams(0.5)
    st = kernel_symbols(params).st_closed
    assert abs(st(np.array([0.0]))[0]) < 1e-12
    v = kernel_symbols(DimerParams(0.3)).v_closed
    assert abs(abs(v(np.array([np.pi / 2]))[0]) - 0.34585723193303733) < 1e-12


def test_dimer_matrix_n1_structure():
    params = DimerParams(0.4)
    m1 = dimer_matrix(params, 1)
    r1 = coefficient_R(params, 1)
    # Q index n+1-j-k = 0 at n=1, and Q_0 = 0, so M_1 is 2 R_1 times I_2
    assert np.max(np.abs(m1 - 2.0 * r1 * np.eye(2))) < 1e-13
    # and it matches the symbol side
    tab = phi_table(DimerParams(0.4))
    assert abs(np.linalg.det(m1) - log_determinant(toeplitz_matrix(tab, 1)).value) < 1e-10


@pytest.mark.parametrize("t", [0.3, 0.7])
@pytest.mark.parametrize("n", [2, 4, 8])
def test_dimer_toeplitz_equivalence_small(t, n):
    params = DimerParams(t)
    det_m = log_determinant(dimer_matrix(params, n)).value
    det_t = log_determinant(toeplitz_matrix(phi_table(params), n)).value
    assert abs(det_m - det_t) <= 1e-8 * abs(det_t)


def test_flip_conjugate_preserves_determinant():
    rng = np.random.default_rng(5)
    n = 3
    m = rng.standard_normal((2 * n, 2 * n)) + 1j * rng.standard_normal((2 * n, 2 * n))
    flipped = flip_conjugate(m, n)
    assert abs(np.linalg.det(flipped) - np.linalg.det(m)) < 1e-12 * abs(np.linalg.det(m))


def test_flip_conjugate_is_involution():
    rng = np.random.default_rng(6)
    m = rng.standard_normal((8, 8)) + 0j
    assert np.array_equal(flip_conjugate(flip_conjugate(m, 4), 4), m)


def test_flip_conjugate_dimension_check():
    from dimerdet import DimensionMismatch
    with pytest.raises(DimensionMismatch):
        flip_conjugate(np.eye(6), 4)


def test_flip_conjugate_makes_off_diagonal_toeplitz():
    params = DimerParams(0.5)
    n = 4
    flipped = flip_conjugate(dimer_matrix(params, n), n)
    q_block = flipped[:n, n:]
    for j in range(n - 1):
        for k in range(n - 1):
            assert abs(q_block[j, k] - q_block[j + 1, k + 1]) < 1e-12
    q_block2 = flipped[n:, :n]
    for j in range(n - 1):
        for k in range(n - 1):
            assert abs(q_block2[j, k] - q_block2[j + 1, k + 1]) < 1e-12


def test_correlation_triangular_lattice_headline():
    params = DimerParams(1.0)
    assert abs(correlation_finite(params, 16) - 0.1494) < 0.05
    assert abs(correlation_finite(params, 32) - 0.1494) < 0.02


def test_correlation_sequence_contracts():
    params = DimerParams(0.5)
    vals = [correlation_finite(params, n) for n in (4, 8, 16, 32)]
    diffs = [abs(b - a) for a, b in zip(vals, vals[1:])]
    assert all(d2 < d1 for d1, d2 in zip(diffs, diffs[1:]))


def test_correlation_approaches_limit():
    value = correlation_finite(DimerParams(0.3), 24)
    assert abs(value - correlation_limit(0.3)) < 5e-3
    assert abs(correlation_limit(0.3) - 0.15918115688259285) < 1e-12


def test_dimer_coefficients_bundle():
    params = DimerParams(0.6, quad_grid=128)
    bundle = dimer_coefficients(params, -3, 3)
    assert bundle.t == params.t
    assert set(bundle.R) == set(range(-3, 4))
    for k in (-2, 0, 2):
        assert bundle.Q[k] == coefficient_Q(params, k)


def test_symbol_phi_domain():
    with pytest.raises(ParameterOutOfRange):
        symbol_phi(DimerParams(1.0))
    with pytest.raises(ParameterOutOfRange):
        symbol_phi(DimerParams(0.5 + 0.2j))


def test_symbol_phi_spot_values():
    params = DimerParams(0.5)
    phi = symbol_phi(params)
    v = phi.sample(np.array([0.0]))[0]
    # det phi(0) = 1/(t^2 - 2t + 1) = 4 at t = 0.5, and d(1) = 0
    assert abs(np.linalg.det(v) - 4.0) < 1e-12
    assert abs(v[0, 1]) < 1e-14


def test_fourier_d_t07_matches_example():
    # d is an odd real function: coefficient at 0 vanishes, c_{-k} = -c_k
    params = DimerParams(0.7)
    tab = fourier_coefficients(symbol_phi(params), 4096, 128)
    assert np.max(np.abs(tab.coeff(0)[0, 1])) < 1e-14
    for k in (1, 2, 3):
        assert abs(tab.coeff(-k)[0, 1] + tab.coeff(k)[0, 1]) < 1e-13
