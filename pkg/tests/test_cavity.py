import math

import numpy as np
import pytest
from scipy.integrate import quad

from casimir import (
    CavityParams,
    ModeIndexError,
    PositionDomainError,
    ResonanceUndefinedError,
    UserInputError,
    coupling_g,
    coupling_matrix,
    drive_coefficient,
    drive_matrix,
    instantaneous_basis,
    mode_frequency,
    mode_function_eval,
    wall_accel_ratio,
    wall_log_derivative,
    wall_position,
)
from casimir.cavity import SIGMAS, component_index, sign_slot, slot_sign


@pytest.fixture
def p():
    # gamma=2, L0=1: Omega = 2 pi, drive period 1
    return CavityParams(epsilon=1e-3, gamma=2.0, T=4.0, K=8)


# ------------------------------------------------------------ wall motion

def test_wall_position_at_zero(p):
    assert wall_position(0.0, p) == p.L0


def test_wall_position_static_wall():
    p0 = CavityParams(epsilon=0.0, gamma=2.0, T=5.0, K=4)
    for t in (0.0, 0.31, 2.7):
        assert wall_position(t, p0) == p0.L0


def test_wall_position_quarter_period(p):
    # Omega t = pi/2  ->  L = L0 (1 + eps)
    t = 0.25 * p.drive_period
    assert wall_position(t, p) == pytest.approx(1.001, rel=1e-14)


def test_wall_position_strictly_positive():
    rng = np.random.default_rng(7)
    for eps in (0.0, 0.1, 0.5, 0.999):
        q = CavityParams(epsilon=eps, gamma=3.0, T=10.0, K=4)
        t = rng.uniform(-50, 50, size=200)
        assert np.all(wall_position(t, q) > 0.0)


def test_wall_log_derivative_values(p):
    assert wall_log_derivative(0.3, CavityParams(0.0, 2.0, 1.0, K=4)) == 0.0
    assert wall_log_derivative(0.0, p) == pytest.approx(
        p.epsilon * p.Omega, rel=1e-14)
    assert wall_log_derivative(0.25 * p.drive_period, p) == pytest.approx(
        0.0, abs=1e-12)


def test_wall_log_derivative_matches_finite_difference():
    # exact in the amplitude, so probe at large eps where the log's
    # roundoff floor (ulp(1)/2h ~ 1e-10) sits far below the 1e-8 window
    q = CavityParams(epsilon=0.1, gamma=2.0, T=4.0, K=8)
    h = 1e-6 * q.drive_period
    for t in (0.1, 0.37, 1.9, 3.3):
        fd = (math.log(wall_position(t + h, q))
              - math.log(wall_position(t - h, q))) / (2 * h)
        assert wall_log_derivative(t, q) == pytest.approx(fd, rel=1e-8)


def test_wall_accel_ratio_values(p):
    assert wall_accel_ratio(0.0, p) == pytest.approx(0.0, abs=1e-12)
    assert wall_accel_ratio(0.1, CavityParams(0.0, 2.0, 1.0, K=4)) == 0.0
    expected = -1e-3 * (2 * math.pi) ** 2 / 1.001
    assert wall_accel_ratio(0.25 * p.drive_period, p) == pytest.approx(
        expected, rel=1e-12)


def test_wall_accel_ratio_matches_finite_difference(p):
    h = 1e-5 * p.drive_period
    for t in (0.21, 1.12):
        second = (wall_position(t + h, p) - 2 * wall_position(t, p)
                  + wall_position(t - h, p)) / h ** 2
        assert wall_accel_ratio(t, p) == pytest.approx(
            second / wall_position(t, p), rel=1e-5)


def test_mode_frequency(p):
    p0 = CavityParams(epsilon=0.0, gamma=2.0, T=1.0, K=4)
    assert mode_frequency(3, 0.7, p0) == pytest.approx(3 * math.pi)
    assert mode_frequency(2, 0.0, p) == pytest.approx(2 * math.pi / p.L0)
    assert mode_frequency(1, 0.25 * p.drive_period, p) == pytest.approx(
        math.pi / 1.001, rel=1e-14)
    with pytest.raises(ModeIndexError):
        mode_frequency(0, 0.0, p)
    with pytest.raises(ModeIndexError):
        mode_frequency(p.K + 1, 0.0, p)


# ------------------------------------------------------------- couplings

def test_coupling_values():
    assert coupling_g(1, 1) == 0.0
    assert coupling_g(1, 2) == pytest.approx(-4.0 / 3.0, rel=1e-15)
    assert coupling_g(2, 1) == pytest.approx(4.0 / 3.0, rel=1e-15)
    assert coupling_g(1, 3) == pytest.approx(0.75, rel=1e-15)


def test_coupling_antisymmetry_exact():
    for k in range(1, 13):
        for j in range(1, 13):
            assert coupling_g(k, j) == -coupling_g(j, k)


def test_coupling_matrix_consistent():
    cm = coupling_matrix(6)
    assert cm.size == 6
    for k in range(1, 7):
        assert cm[k, k] == 0.0
        for j in range(1, 7):
            assert cm[k, j] == coupling_g(k, j)
    assert not cm.values.flags.writeable


def test_coupling_index_errors():
    with pytest.raises(ModeIndexError):
        coupling_g(0, 1)


def test_drive_coefficient_diagonal(p):
    # the g term vanishes on the diagonal: value = -s sigma k/2, any sigma'
    assert drive_coefficient(+1, 1, -1, 1, -1, p) == pytest.approx(0.5)
    assert drive_coefficient(-1, 1, -1, 1, -1, p) == pytest.approx(-0.5)
    for s in SIGMAS:
        for sigma in SIGMAS:
            for sigma_p in SIGMAS:
                for k in (1, 2, 5):
                    assert drive_coefficient(s, k, sigma, k, sigma_p, p) == \
                        pytest.approx(-s * sigma * k / 2.0)


def test_drive_coefficient_off_diagonal(p):
    # gamma=2, s=+, k=1, sigma=-, j=3, sigma'=-:
    # (-1)(2) g13 sqrt(3) (-1/2 + 2/12) with g13 = 3/4  ->  sqrt(3)/2
    value = drive_coefficient(+1, 1, -1, 3, -1, p)
    assert value == pytest.approx(math.sqrt(3.0) / 2.0, rel=1e-14)


def test_drive_coefficient_finite_everywhere(p):
    for s in SIGMAS:
        for sigma in SIGMAS:
            for sigma_p in SIGMAS:
                for k in range(1, p.K + 1):
                    for j in range(1, p.K + 1):
                        assert math.isfinite(
                            drive_coefficient(s, k, sigma, j, sigma_p, p))


def test_drive_coefficient_bad_sign(p):
    with pytest.raises(UserInputError):
        drive_coefficient(2, 1, -1, 1, -1, p)


def test_drive_matrix_layout(p):
    v = drive_matrix(+1, p)
    assert v.shape == (2 * p.K, 2 * p.K)
    a = component_index(2, -1)
    b = component_index(4, +1)
    assert v[a, b] == drive_coefficient(+1, 2, -1, 4, +1, p)


# ---------------------------------------------------------------- basis

def test_basis_boundary_zeros():
    assert instantaneous_basis(3, 0.0, 2.0) == 0.0
    assert instantaneous_basis(3, 2.0, 2.0) == pytest.approx(0.0, abs=1e-15)


def test_basis_orthonormal():
    # independent quadrature oracle
    L = 1.3
    for k in range(1, 7):
        for j in range(k, 7):
            val, err = quad(
                lambda x: instantaneous_basis(k, x, L)
                * instantaneous_basis(j, x, L), 0.0, L, limit=200)
            assert abs(val - (1.0 if k == j else 0.0)) < 1e-10


def test_basis_domain_error():
    with pytest.raises(PositionDomainError):
        instantaneous_basis(1, -0.1, 1.0)
    with pytest.raises(PositionDomainError):
        instantaneous_basis(1, 1.1, 1.0)


def test_mode_function_initial_row(p):
    # initial amplitudes put mode n entirely in basis function n
    n = 2
    Q_row = np.zeros(p.K, dtype=complex)
    Q_row[n - 1] = 1.0 / math.sqrt(2 * p.omega_k(n))
    for x in (0.0, 0.21, 0.6, 1.0):
        want = instantaneous_basis(n, x, p.L0) / math.sqrt(2 * p.omega_k(n))
        assert mode_function_eval(n, x, 0.0, Q_row, p) == pytest.approx(want)


def test_mode_function_vanishes_at_walls(p):
    rng = np.random.default_rng(3)
    Q_row = rng.standard_normal(p.K) + 1j * rng.standard_normal(p.K)
    t = 0.33
    L = wall_position(t, p)
    assert abs(mode_function_eval(1, 0.0, t, Q_row, p)) == 0.0
    assert abs(mode_function_eval(1, L, t, Q_row, p)) < 1e-12


def test_mode_function_row_length(p):
    with pytest.raises(UserInputError):
        mode_function_eval(1, 0.5, 0.0, np.zeros(p.K + 1), p)


# ------------------------------------------------------------ parameters

def test_params_validation():
    with pytest.raises(UserInputError):
        CavityParams(epsilon=-0.1, gamma=2.0, T=1.0)
    with pytest.raises(UserInputError):
        CavityParams(epsilon=1.0, gamma=2.0, T=1.0)
    with pytest.raises(UserInputError):
        CavityParams(epsilon=0.1, gamma=0.0, T=1.0)
    with pytest.raises(UserInputError):
        CavityParams(epsilon=0.1, gamma=2.0, T=-1.0)
    with pytest.raises(UserInputError):
        CavityParams(epsilon=0.1, gamma=2.0, T=1.0, L0=0.0)
    with pytest.raises(UserInputError):
        CavityParams(epsilon=0.1, gamma=2.0, T=1.0, K=0)


def test_params_derived(p):
    assert p.omega1 == pytest.approx(math.pi)
    assert p.Omega == pytest.approx(2 * math.pi)
    assert p.drive_period == pytest.approx(1.0)
    assert p.omega_k(3) == pytest.approx(3 * math.pi)
    assert p.pump_parameter == pytest.approx(1e-3 * math.pi * 4.0)
    assert not p.perturbative_limit_exceeded


def test_params_default_truncation():
    assert CavityParams(epsilon=0.0, gamma=2.0, T=1.0).K == 16
    assert CavityParams(epsilon=0.0, gamma=5.0, T=1.0).K == 20
    assert CavityParams(epsilon=0.0, gamma=2.5, T=1.0).K == 16


def test_params_perturbative_flag():
    q = CavityParams(epsilon=1e-2, gamma=2.0, T=10.0, K=4)
    assert q.pump_parameter > 0.2
    assert q.perturbative_limit_exceeded


def test_from_periods():
    q = CavityParams.from_periods(1e-3, 2.0, 16, K=16)
    assert q.T == pytest.approx(16.0)
    assert q.periods == pytest.approx(16.0)
    with pytest.raises(UserInputError):
        CavityParams.from_periods(1e-3, 2.0, 2.5)


def test_gamma_int():
    assert CavityParams(epsilon=0.0, gamma=3.0, T=1.0).gamma_int() == 3
    with pytest.raises(ResonanceUndefinedError):
        CavityParams(epsilon=0.0, gamma=2.5, T=1.0).gamma_int()


def test_sign_helpers():
    assert sign_slot(-1) == 0 and sign_slot(+1) == 1
    assert slot_sign(0) == -1 and slot_sign(1) == +1
    assert component_index(1, -1) == 0
    assert component_index(1, +1) == 1
    assert component_index(3, -1) == 4
    with pytest.raises(UserInputError):
        sign_slot(0)
