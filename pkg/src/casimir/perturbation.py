"""Closed-form perturbation solution of the linearized system.

Order zero is free rotation of the initial components.  Order one is an
explicit quadrature over the drive and is expressed through the kernel

    E(m, k, t) = omega1 t e^(-i k omega1 t)                           m = 0
               = (i / m) (e^(-i (m+k) omega1 t) - e^(-i k omega1 t))  m != 0

whose m = 0 branch is the secular (resonant) term growing linearly in time.
The detuning index m is a real number; near m = 0 the oscillatory branch is
numerically ill-conditioned, so a two-term expansion in m is used there (the
branch thresholds are module constants).

The resonance-dominant approximation keeps only the secular terms, which
requires an integer drive ratio.  At second order only the doubly-resonant
chain is implemented: the coefficient of epsilon^2 growing like t^2, a sum
over sign paths through one intermediate mode; chains whose intermediate
mode falls outside the truncation are dropped.

Coefficient-of-epsilon convention: x_first_order and x_second_order_resonant
return the bare expansion coefficients (no epsilon factors); assembly into
amplitudes happens in q_first_order / PerturbativeSolution, which keeps the
epsilon-scaling laws directly testable.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .cavity import (
    CavityParams,
    SIGMAS,
    component_index,
    drive_coefficient,
    sign_slot,
)
from .errors import UserInputError

#: |m| at or below this is treated as exactly resonant.
M_RESONANT_TOL = 1e-9
#: |m| below this (and above M_RESONANT_TOL) uses the small-m expansion.
M_EXPANSION_TOL = 1e-4


def e_kernel(m: float, k: int, t, p: CavityParams):
    """Drive-response kernel E(m, k, t); vectorized over t.

    k enters only through the phase e^(-i k omega1 t) and may be negative
    (the first-order solution needs both signs).
    """
    wt = p.omega1 * np.asarray(t, dtype=float)
    phase = np.exp(-1j * k * wt)
    am = abs(m)
    if am <= M_RESONANT_TOL:
        out = wt * phase
    elif am < M_EXPANSION_TOL:
        # two-term expansion of (i/m)(e^(-i m wt) - 1), stable for small m
        out = phase * (wt - 0.5j * m * wt * wt)
    else:
        out = (1j / m) * (np.exp(-1j * (m + k) * wt) - phase)
    return complex(out) if out.ndim == 0 else out


def x_zeroth(n: int, k: int, sigma: int, t, p: CavityParams):
    """Zeroth order: delta_nk delta_(sigma,-) e^(-i w_k t)."""
    p.check_mode(n)
    p.check_mode(k)
    if sign_slot(sigma) == 1 or n != k:
        return 0.0 * np.asarray(t) + 0.0j if np.ndim(t) else 0.0j
    out = np.exp(-1j * p.omega_k(k) * np.asarray(t, dtype=float))
    return complex(out) if out.ndim == 0 else out


def _v_pair(n, k, p):
    vm = drive_coefficient(-1, k, -1, n, -1, p)
    vp = drive_coefficient(+1, k, -1, n, -1, p)
    return vm, vp


def x_first_order(n: int, k: int, sigma: int, t, p: CavityParams):
    """Coefficient of epsilon in X[n,(k,sigma)]; gamma may be non-integer.

    sigma = +1:  -v^- E(n+gamma+k, -k, t) - v^+ E(n-gamma+k, -k, t)
    sigma = -1:  +v^- E(n+gamma-k, +k, t) + v^+ E(n-gamma-k, +k, t)
    """
    p.check_mode(n)
    p.check_mode(k)
    vm, vp = _v_pair(n, k, p)
    g = p.gamma
    if sign_slot(sigma) == 1:
        return (-vm * e_kernel(n + g + k, -k, t, p)
                - vp * e_kernel(n - g + k, -k, t, p))
    return (vm * e_kernel(n + g - k, k, t, p)
            + vp * e_kernel(n - g - k, k, t, p))


def x_first_order_resonant(n: int, k: int, sigma: int, t, p: CavityParams):
    """Secular part of x_first_order (integer gamma only)."""
    p.check_mode(n)
    p.check_mode(k)
    g = p.gamma_int()
    vm, vp = _v_pair(n, k, p)
    wt = p.omega1 * np.asarray(t, dtype=float)
    out = np.zeros_like(wt, dtype=complex)
    if sign_slot(sigma) == 1:
        if k == g - n:
            out = -vp * wt * np.exp(1j * k * wt)
    else:
        if k == n + g:
            out = vm * wt * np.exp(-1j * k * wt)
        elif k == n - g:
            out = vp * wt * np.exp(-1j * k * wt)
    return complex(out) if out.ndim == 0 else out


def x_second_order_resonant(n: int, k: int, sigma: int, t, p: CavityParams):
    """Doubly-secular coefficient of epsilon^2 in X[n,(k,sigma)].

    (1/2) (omega1 t)^2 e^(i sigma k omega1 t) summed over sign paths
    (s1, s2, sigma1) satisfying -sigma k + (s1+s2) gamma - n = 0 with the
    intermediate mode j = sigma1 (s1 gamma - n) inside 1..K; each path
    contributes v^(s2)[(k,sigma),(j,sigma1)] * v^(s1)[(j,sigma1),(n,-)].
    """
    p.check_mode(n)
    p.check_mode(k)
    sign_slot(sigma)
    g = p.gamma_int()
    total = 0.0
    for s1 in SIGMAS:
        for s2 in SIGMAS:
            if -sigma * k + (s1 + s2) * g - n != 0:
                continue
            for sigma1 in SIGMAS:
                j = sigma1 * (s1 * g - n)
                if not 1 <= j <= p.K:
                    continue
                total += (drive_coefficient(s2, k, sigma, j, sigma1, p)
                          * drive_coefficient(s1, j, sigma1, n, -1, p))
    wt = p.omega1 * np.asarray(t, dtype=float)
    out = 0.5 * wt * wt * np.exp(1j * sigma * k * wt) * total
    return complex(out) if out.ndim == 0 else out


def q_first_order(n: int, k: int, t, p: CavityParams):
    """Mode amplitude Q[n,k] through first order in epsilon."""
    wk = p.omega_k(k)
    zeroth = x_zeroth(n, k, -1, t, p)
    first = (x_first_order(n, k, -1, t, p) + x_first_order(n, k, +1, t, p))
    return (zeroth + p.epsilon * first) / np.sqrt(2.0 * wk)


def q_resonant(n: int, k: int, t, p: CavityParams):
    """Resonance-dominant Q[n,k]: zeroth order plus the secular terms only.

    Requires an integer drive ratio; away from the three resonance lines
    k = gamma - n, k = n + gamma, k = n - gamma the result is pure zeroth
    order.
    """
    g = p.gamma_int()
    wk = p.omega_k(k)
    vm, vp = _v_pair(n, k, p)
    wt = p.omega1 * np.asarray(t, dtype=float)
    secular = np.zeros_like(wt, dtype=complex)
    if k == g - n:
        secular = secular - vp * np.exp(1j * wk * np.asarray(t, dtype=float))
    if k == n + g:
        secular = secular + vm * np.exp(-1j * wk * np.asarray(t, dtype=float))
    if k == n - g:
        secular = secular + vp * np.exp(-1j * wk * np.asarray(t, dtype=float))
    out = (x_zeroth(n, k, -1, t, p)
           + p.epsilon * wt * secular) / np.sqrt(2.0 * wk)
    return complex(out) if np.ndim(out) == 0 else out


@dataclass(frozen=True)
class PerturbativeSolution:
    """Perturbation series for one parameter set, truncated at `order`.

    order          0, 1 or 2 (order 2 adds the doubly-resonant chain and
                   therefore requires an integer drive ratio)
    resonant_only  keep only secular terms at first order
    """

    params: CavityParams
    order: int = 1
    resonant_only: bool = False

    def __post_init__(self):
        if self.order not in (0, 1, 2):
            raise UserInputError(f"order must be 0, 1 or 2, got {self.order}")
        if self.order == 2 or self.resonant_only:
            self.params.gamma_int()

    def x(self, n: int, k: int, sigma: int, t):
        """Series value of X[n,(k,sigma)] at time t."""
        p = self.params
        total = np.asarray(x_zeroth(n, k, sigma, t, p), dtype=complex)
        if self.order >= 1:
            first = (x_first_order_resonant(n, k, sigma, t, p)
                     if self.resonant_only
                     else x_first_order(n, k, sigma, t, p))
            total = total + p.epsilon * np.asarray(first)
        if self.order >= 2:
            total = total + p.epsilon ** 2 * np.asarray(
                x_second_order_resonant(n, k, sigma, t, p))
        return complex(total) if total.ndim == 0 else total

    def x_array(self, t: float) -> np.ndarray:
        """Series value of the whole component matrix, shape (K, 2K)."""
        p = self.params
        X = np.empty((p.K, 2 * p.K), dtype=complex)
        for n in range(1, p.K + 1):
            for k in range(1, p.K + 1):
                for sigma in SIGMAS:
                    X[n - 1, component_index(k, sigma)] = self.x(n, k, sigma, t)
        return X


def zeroth_order_trajectory(times, p: CavityParams) -> np.ndarray:
    """X at order zero on a time grid, shape (len(times), K, 2K)."""
    times = np.asarray(times, dtype=float)
    out = np.zeros((times.size, p.K, 2 * p.K), dtype=complex)
    for n in range(1, p.K + 1):
        out[:, n - 1, component_index(n, -1)] = np.exp(
            -1j * p.omega_k(n) * times)
    return out


def first_order_trajectory(times, p: CavityParams) -> np.ndarray:
    """Coefficient of epsilon in X on a time grid, shape (len(times), K, 2K)."""
    times = np.asarray(times, dtype=float)
    out = np.empty((times.size, p.K, 2 * p.K), dtype=complex)
    for n in range(1, p.K + 1):
        for k in range(1, p.K + 1):
            for sigma in SIGMAS:
                out[:, n - 1, component_index(k, sigma)] = x_first_order(
                    n, k, sigma, times, p)
    return out
