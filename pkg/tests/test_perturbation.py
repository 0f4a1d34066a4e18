import math

import numpy as np
import pytest
from scipy.integrate import quad

from casimir import (
    CavityParams,
    IntegratorConfig,
    LINEARIZED,
    PerturbativeSolution,
    ResonanceUndefinedError,
    UserInputError,
    drive_coefficient,
    e_kernel,
    integrate,
    q_first_order,
    q_resonant,
    x_first_order,
    x_second_order_resonant,
    x_zeroth,
)
from casimir.cavity import component_index
from casimir.perturbation import (
    first_order_trajectory,
    x_first_order_resonant,
    zeroth_order_trajectory,
)


@pytest.fixture
def p():
    return CavityParams(epsilon=1e-3, gamma=2.0, T=40.0, K=6)


# --------------------------------------------------------------- E kernel

def test_e_kernel_vanishes_at_zero(p):
    for m in (0.0, 1e-10, 1e-6, 0.5, 3.0):
        assert e_kernel(m, 2, 0.0, p) == 0.0


def test_e_kernel_resonant_magnitude(p):
    for t in (0.1, 1.0, 7.3):
        assert abs(e_kernel(0.0, 3, t, p)) == pytest.approx(p.omega1 * t)


def test_e_kernel_unit_detuning(p):
    # m=1, k=1, omega1 t = pi: (i/1)(e^(-2 pi i) - e^(-pi i)) = 2i
    t = math.pi / p.omega1
    assert e_kernel(1.0, 1, t, p) == pytest.approx(2j, abs=1e-14)


def test_e_kernel_continuous_at_resonance(p):
    wt = np.linspace(0.01, 100.0, 300)
    t = wt / p.omega1
    base = e_kernel(0.0, 1, t, p)
    for m in (1e-6, 1e-8):
        gap = np.abs(e_kernel(m, 1, t, p) - base) / np.abs(base)
        assert gap.max() < 1e-4


def test_e_kernel_branch_crossover(p):
    # expansion and exact branches agree near the threshold
    t = 5.0
    for m in (9e-5, 1.1e-4):
        exact = (1j / m) * (np.exp(-1j * (m + 1) * p.omega1 * t)
                            - np.exp(-1j * p.omega1 * t))
        assert e_kernel(m, 1, t, p) == pytest.approx(exact, rel=1e-6)


def test_e_kernel_negative_superscript(p):
    t = 0.8
    want = (1j / 2.0) * (np.exp(-1j * (2 - 3) * p.omega1 * t)
                         - np.exp(1j * 3 * p.omega1 * t))
    assert e_kernel(2.0, -3, t, p) == pytest.approx(want, rel=1e-13)


# ------------------------------------------------------------ order zero

def test_x_zeroth(p):
    assert x_zeroth(2, 2, -1, 0.0, p) == 1.0
    assert x_zeroth(2, 2, +1, 0.5, p) == 0.0
    assert x_zeroth(1, 2, -1, 0.5, p) == 0.0
    t = 0.5 / p.omega1 * math.pi  # omega1 t = pi/2
    assert x_zeroth(1, 1, -1, t, p) == pytest.approx(-1j, abs=1e-15)


# ------------------------------------------------------------- order one

def quadrature_first_order(n, k, sigma, t, p):
    """Independent oracle: numerical quadrature of the driven integral,
    with the drive coefficients taken at the component's own sign."""
    vm = drive_coefficient(-1, k, sigma, n, -1, p)
    vp = drive_coefficient(+1, k, sigma, n, -1, p)
    w1, g = p.omega1, p.gamma

    def integrand(tp):
        return (vm * np.exp(-1j * (sigma * k + g + n) * w1 * tp)
                + vp * np.exp(1j * (-sigma * k + g - n) * w1 * tp))

    re, _ = quad(lambda tp: integrand(tp).real, 0.0, t, limit=400)
    im, _ = quad(lambda tp: integrand(tp).imag, 0.0, t, limit=400)
    return w1 * np.exp(1j * sigma * k * w1 * t) * (re + 1j * im)


@pytest.mark.parametrize("gamma", [2.0, 2.5])
@pytest.mark.parametrize("n,k,sigma", [(1, 1, +1), (1, 1, -1), (2, 3, -1),
                                       (1, 3, +1), (3, 1, -1)])
def test_x_first_order_against_quadrature(gamma, n, k, sigma):
    q = CavityParams(epsilon=1e-3, gamma=gamma, T=10.0, K=4)
    for t in (0.3, 2.0, 7.7):
        want = quadrature_first_order(n, k, sigma, t, q)
        got = x_first_order(n, k, sigma, t, q)
        assert got == pytest.approx(want, rel=1e-8, abs=1e-10)


def test_x_first_order_zero_at_start(p):
    for n in range(1, p.K + 1):
        for k in range(1, p.K + 1):
            for sigma in (-1, +1):
                assert x_first_order(n, k, sigma, 0.0, p) == 0.0


def test_x_first_order_resonant_structure(p):
    # gamma=2, (n,k)=(1,1): the secular term lives in the sigma=+ component
    # with coefficient -v+ = -1/2; what remains is bounded by the other
    # kernel's envelope |E| <= 2/|m| = 1/2 times |v-| = 1/2
    for wt in (20.0, 50.0, 90.0):
        t = wt / p.omega1
        resonant = x_first_order_resonant(1, 1, +1, t, p)
        assert resonant == pytest.approx(-0.5 * wt * np.exp(1j * wt))
        rest = x_first_order(1, 1, +1, t, p) - resonant
        assert abs(rest) <= 0.25 + 1e-12


def test_x_first_order_matches_linearized(p):
    # (X_lin - X0)/eps converges to the first-order coefficient at rate eps
    times = np.linspace(0.0, 3.0, 31)
    cfg = IntegratorConfig(scheme="adaptive", rtol=1e-12, atol=1e-14)

    def residue(eps):
        q = CavityParams(epsilon=eps, gamma=2.0, T=3.0, K=6)
        states = integrate(LINEARIZED, q, cfg, sample_times=times)
        numeric = np.stack([s.X for s in states])
        x0 = zeroth_order_trajectory(times, q)
        x1 = first_order_trajectory(times, q)
        return np.abs((numeric - x0) / eps - x1).max()

    r1, r2 = residue(1e-3), residue(5e-4)
    assert 1.7 < r1 / r2 < 2.3


def test_resonant_dominance(p):
    # past omega1 t = 50 the secular part exceeds the bounded remainder
    # wherever a resonance line fires (gamma=2: (1,1,+) and (1,3,-))
    t = 60.0 / p.omega1
    for n, k, sigma in ((1, 1, +1), (1, 3, -1)):
        sec = x_first_order_resonant(n, k, sigma, t, p)
        rest = x_first_order(n, k, sigma, t, p) - sec
        assert abs(sec) > abs(rest)


def test_detuned_first_order_bounded():
    q = CavityParams(epsilon=1e-3, gamma=2.5, T=200.0 / math.pi, K=4)
    wt = np.linspace(0.0, 200.0, 400)
    t = wt / q.omega1
    worst_early = 0.0
    worst_late = 0.0
    for n in range(1, 5):
        for k in range(1, 5):
            for sigma in (-1, +1):
                vals = np.abs(x_first_order(n, k, sigma, t, q))
                worst_early = max(worst_early, vals[wt <= 100.0].max())
                worst_late = max(worst_late, vals[wt > 100.0].max())
    assert worst_late <= worst_early * 1.05


# ------------------------------------------------------ amplitude assembly

def test_q_first_order_trivials(p):
    p0 = CavityParams(epsilon=0.0, gamma=2.0, T=1.0, K=4)
    t = 0.37
    want = np.exp(-1j * p0.omega_k(2) * t) / math.sqrt(2 * p0.omega_k(2))
    assert q_first_order(2, 2, t, p0) == pytest.approx(want, rel=1e-14)
    assert q_first_order(2, 3, t, p0) == 0.0
    assert q_first_order(1, 1, 0.0, p) == pytest.approx(
        1 / math.sqrt(2 * p.omega1))


def test_q_first_order_matches_full_oracle():
    # against the exact truncated evolution: residual scales as eps^2
    times = np.linspace(0.0, 5.0 / math.pi, 26)
    cfg = IntegratorConfig(scheme="adaptive", rtol=1e-12, atol=1e-14)

    def gap(eps):
        q = CavityParams(epsilon=eps, gamma=2.0, T=times[-1], K=6)
        states = integrate("full", q, cfg, sample_times=times,
                           start_matched=False)
        worst = 0.0
        for i, s in enumerate(states):
            for n in range(1, 7):
                for k in range(1, 7):
                    worst = max(worst, abs(
                        q_first_order(n, k, times[i], q) - s.Q[n - 1, k - 1]))
        return worst

    ratio = gap(1e-3) / gap(5e-4)
    assert 3.0 <= ratio <= 5.0


def test_q_resonant_values(p):
    t = 10.0 / p.omega1
    w1 = p.omega1
    expected = (np.exp(-1j * w1 * t)
                + p.epsilon * 10.0 * (-0.5) * np.exp(1j * w1 * t)) \
        / math.sqrt(2 * w1)
    assert q_resonant(1, 1, t, p) == pytest.approx(expected, rel=1e-13)
    # off every resonance line: zeroth order only
    assert q_resonant(2, 6, t, p) == pytest.approx(
        x_zeroth(2, 6, -1, t, p) / math.sqrt(2 * p.omega_k(6)), rel=1e-13)


def test_q_resonant_requires_integer_gamma():
    q = CavityParams(epsilon=1e-3, gamma=2.5, T=1.0, K=4)
    with pytest.raises(ResonanceUndefinedError):
        q_resonant(1, 1, 0.5, q)


def test_q_resonant_close_to_first_order(p):
    # the dropped oscillatory kernels are bounded by 2/|m| each
    n, k = 1, 1
    vm = abs(drive_coefficient(-1, k, -1, n, -1, p))
    vp = abs(drive_coefficient(+1, k, -1, n, -1, p))
    min_m = 2.0  # smallest nonzero |detuning index| among the four kernels
    bound = 2 * p.epsilon * (vm + vp) / (min_m * math.sqrt(2 * p.omega_k(k)))
    wt = np.linspace(0.5, 120.0, 240)
    gaps = [abs(q_resonant(n, k, t, p) - q_first_order(n, k, t, p))
            for t in wt / p.omega1]
    assert max(gaps) <= bound * (1 + 1e-9)


# ------------------------------------------------------------- order two

def test_second_order_zero_at_start(p):
    assert x_second_order_resonant(1, 1, -1, 0.0, p) == 0.0


def test_second_order_chain_value(p):
    # (1,1,-) at gamma=2: paths through j=1 (+1/4) and j=3 (-3/4) sum to -1/2
    for wt in (1.0, 5.0, 12.0):
        t = wt / p.omega1
        want = 0.5 * wt * wt * np.exp(-1j * wt) * (-0.5)
        assert x_second_order_resonant(1, 1, -1, t, p) == pytest.approx(
            want, rel=1e-13)


def test_second_order_single_chain(p):
    # (2,2,-) at gamma=2: only the j=4 path survives (the other needs j=0);
    # v+[(2,-),(4,-)] v-[(4,-),(2,-)] = sqrt(2) * (-sqrt(2)) = -2
    wt = 3.0
    t = wt / p.omega1
    want = 0.5 * wt * wt * np.exp(-2j * wt) * (-2.0)
    assert x_second_order_resonant(2, 2, -1, t, p) == pytest.approx(
        want, rel=1e-13)


def test_second_order_truncation_filter():
    # with K=3 the j=4 intermediate is dropped and the chain vanishes
    q = CavityParams(epsilon=1e-3, gamma=2.0, T=1.0, K=3)
    assert x_second_order_resonant(2, 2, -1, 0.7, q) == 0.0


def test_second_order_no_path(p):
    # (1,2,-): 2 + 2(s1+s2) - 1 is odd, never zero
    assert x_second_order_resonant(1, 2, -1, 0.9, p) == 0.0


def test_second_order_requires_integer_gamma():
    q = CavityParams(epsilon=1e-3, gamma=2.5, T=1.0, K=4)
    with pytest.raises(ResonanceUndefinedError):
        x_second_order_resonant(1, 1, -1, 0.5, q)


# -------------------------------------------------------- solution object

def test_perturbative_solution_orders(p):
    t = 2.3
    s0 = PerturbativeSolution(params=p, order=0)
    assert s0.x(1, 1, -1, t) == x_zeroth(1, 1, -1, t, p)
    s1 = PerturbativeSolution(params=p, order=1)
    want = x_zeroth(1, 1, -1, t, p) + p.epsilon * x_first_order(1, 1, -1, t, p)
    assert s1.x(1, 1, -1, t) == pytest.approx(want, rel=1e-14)
    s2 = PerturbativeSolution(params=p, order=2)
    want2 = want + p.epsilon ** 2 * x_second_order_resonant(1, 1, -1, t, p)
    assert s2.x(1, 1, -1, t) == pytest.approx(want2, rel=1e-14)


def test_perturbative_solution_reduces_to_zeroth_at_start(p):
    for order in (1, 2):
        sol = PerturbativeSolution(params=p, order=order)
        X = sol.x_array(0.0)
        for n in range(1, p.K + 1):
            for k in range(1, p.K + 1):
                for sigma in (-1, +1):
                    assert X[n - 1, component_index(k, sigma)] == \
                        x_zeroth(n, k, sigma, 0.0, p)


def test_perturbative_solution_validation(p):
    with pytest.raises(UserInputError):
        PerturbativeSolution(params=p, order=3)
    q = CavityParams(epsilon=1e-3, gamma=2.5, T=1.0, K=4)
    with pytest.raises(ResonanceUndefinedError):
        PerturbativeSolution(params=q, order=2)
    with pytest.raises(ResonanceUndefinedError):
        PerturbativeSolution(params=q, order=1, resonant_only=True)


def test_trajectory_helpers_match_pointwise(p):
    times = np.array([0.0, 0.4, 1.1])
    x0 = zeroth_order_trajectory(times, p)
    x1 = first_order_trajectory(times, p)
    for i, t in enumerate(times):
        assert x0[i, 0, component_index(1, -1)] == pytest.approx(
            x_zeroth(1, 1, -1, t, p))
        assert x1[i, 1, component_index(3, -1)] == pytest.approx(
            x_first_order(2, 3, -1, t, p))
