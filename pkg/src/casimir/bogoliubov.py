"""Bogoliubov coefficients at wall-stop time and photon spectra.

When the drive stops at t = T with the wall back at its rest position
(L(T) = L0, enforced by requiring an integer number of drive periods), the
evolved amplitudes are matched onto the static-cavity mode basis:

    alpha[n,k] = (i w_k Q - Qdot + lam_T sum_l g_kl Q[n,l]) e^(+i w_k T) / (i sqrt(2 w_k))
    beta[n,k]  = (i w_k Q + Qdot - lam_T sum_l g_kl Q[n,l]) e^(-i w_k T) / (i sqrt(2 w_k))

with w_k = k pi / L0 and lam_T = Ldot/L at the stop time; the g-correction
accounts for the wall velocity being nonzero there.  |beta[n,k]|^2 counts
photons created in mode k out of initial vacuum mode n, so the spectrum is
N_k = sum_n |beta[n,k]|^2.

Resonant closed forms (integer drive ratio gamma, short pump): the dominant
beta lives on the line k = gamma - n and gives

    N_k = (1/4) (gamma - k) k (epsilon omega1 T)^2       for k < gamma,
    N_k = 0 otherwise,

peaking at k = gamma/2 for even gamma (half the drive frequency) and at the
neighbouring pair k = (gamma +- 1)/2 for odd gamma.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .cavity import CavityParams, coupling_matrix, drive_coefficient, wall_log_derivative
from .errors import MatchingDomainError, ModeIndexError, UserInputError
from .evolution import QPState

#: Provenance tags carried by every spectrum and coefficient pair.
NUMERIC_FULL = "numeric-full"
NUMERIC_LINEARIZED = "numeric-linearized"
ANALYTIC_RESONANT = "analytic-resonant"
ANALYTIC_FIRST_ORDER = "analytic-first-order"
PROVENANCES = (NUMERIC_FULL, NUMERIC_LINEARIZED, ANALYTIC_RESONANT,
               ANALYTIC_FIRST_ORDER)

#: Normalization-defect budget of first-order analytic pairs is
#: C * (epsilon omega1 T)^2 with this calibrated constant.
FIRST_ORDER_DEFECT_SCALE = 50.0

#: Allowed relative misfit of T from the period grid.
STOP_TIME_RTOL = 1e-9


@dataclass(frozen=True)
class BogoliubovPair:
    """Mode-basis matching coefficients (alpha, beta) at stop time T."""

    alpha: np.ndarray
    beta: np.ndarray
    T: float
    provenance: str

    def __post_init__(self):
        if self.alpha.shape != self.beta.shape or self.alpha.ndim != 2 \
                or self.alpha.shape[0] != self.alpha.shape[1]:
            raise UserInputError(
                f"alpha and beta must be square with equal shape, got "
                f"{self.alpha.shape} and {self.beta.shape}")
        if self.provenance not in PROVENANCES:
            raise UserInputError(
                f"unknown provenance {self.provenance!r}")
        alpha = np.ascontiguousarray(self.alpha, dtype=complex)
        beta = np.ascontiguousarray(self.beta, dtype=complex)
        alpha.setflags(write=False)
        beta.setflags(write=False)
        object.__setattr__(self, "alpha", alpha)
        object.__setattr__(self, "beta", beta)

    @property
    def K(self) -> int:
        return self.alpha.shape[0]


@dataclass(frozen=True)
class PhotonSpectrum:
    """Per-mode created photon numbers N_k, k = 1..K.

    Modes beyond the truncation are unavailable rather than zero;
    value_at(k) enforces that.
    """

    values: np.ndarray
    provenance: str

    def __post_init__(self):
        values = np.ascontiguousarray(self.values, dtype=float)
        if values.ndim != 1:
            raise UserInputError("spectrum must be one-dimensional")
        if np.any(values < 0):
            raise UserInputError("photon numbers must be nonnegative")
        if self.provenance not in PROVENANCES:
            raise UserInputError(f"unknown provenance {self.provenance!r}")
        values.setflags(write=False)
        object.__setattr__(self, "values", values)

    @property
    def K(self) -> int:
        return self.values.size

    @property
    def total(self) -> float:
        return float(self.values.sum())

    def value_at(self, k: int) -> float:
        if not 1 <= k <= self.K:
            raise ModeIndexError(
                f"N_{k} is unavailable: spectrum retains modes 1..{self.K}")
        return float(self.values[k - 1])


def _require_stop_time(T: float, p: CavityParams) -> None:
    if p.epsilon == 0.0:
        return
    periods = T / p.drive_period
    misfit = abs(periods - round(periods))
    if misfit > STOP_TIME_RTOL * max(1.0, abs(periods)):
        nearest = round(periods) * p.drive_period
        raise MatchingDomainError(
            f"stop time T={T} does not return the wall to L0; nearest "
            f"valid duration is {nearest} ({round(periods)} drive periods)")


def project_bogoliubov(state: QPState, p: CavityParams,
                       lambda_T: float | None = None,
                       provenance: str = NUMERIC_FULL) -> BogoliubovPair:
    """Match an evolved (Q, P) state onto static-cavity modes at t = state.t.

    lambda_T defaults to the wall's logarithmic velocity at the stop time;
    pass it explicitly to test the matching in isolation.
    """
    if state.K != p.K:
        raise UserInputError(
            f"state truncation {state.K} does not match parameters (K={p.K})")
    T = state.t
    _require_stop_time(T, p)
    if lambda_T is None:
        lambda_T = float(wall_log_derivative(T, p))
    w = p.omega_static()[np.newaxis, :]
    G = coupling_matrix(p.K).values
    corr = lambda_T * (state.Q @ G.T)
    phase_a = np.exp(1j * w * T) / (1j * np.sqrt(2.0 * w))
    phase_b = np.exp(-1j * w * T) / (1j * np.sqrt(2.0 * w))
    alpha = (1j * w * state.Q - state.P + corr) * phase_a
    beta = (1j * w * state.Q + state.P - corr) * phase_b
    return BogoliubovPair(alpha=alpha, beta=beta, T=float(T),
                          provenance=provenance)


def beta_resonant_analytic(n: int, k: int, p: CavityParams) -> complex:
    """Dominant beta[n,k] for integer gamma and short pump.

    Supported only on the line k = gamma - n:
    beta = -epsilon omega1 T v^+[(k,-),(n,-)] e^(-i w_k T), whose squared
    magnitude is (1/4) n k (epsilon omega1 T)^2 there.
    """
    p.check_mode(n)
    p.check_mode(k)
    g = p.gamma_int()
    if k != g - n:
        return 0.0j
    vp = drive_coefficient(+1, k, -1, n, -1, p)
    return (-p.pump_parameter * vp
            * np.exp(-1j * p.omega_k(k) * p.T))


def bogoliubov_resonant_analytic(p: CavityParams) -> BogoliubovPair:
    """Secular-order analytic pair for integer gamma.

    beta from beta_resonant_analytic and alpha at its zeroth-order value
    (the identity).  The secular alpha corrections on the k = n +- gamma
    lines cancel pairwise in the normalization identity at this order, so
    the pair's defect is the uncompensated beta^2 term, of order
    (epsilon omega1 T)^2.
    """
    g = p.gamma_int()
    K = p.K
    alpha = np.eye(K, dtype=complex)
    beta = np.zeros((K, K), dtype=complex)
    for n in range(1, K + 1):
        k = g - n
        if 1 <= k <= K:
            beta[n - 1, k - 1] = beta_resonant_analytic(n, k, p)
    return BogoliubovPair(alpha=alpha, beta=beta, T=p.T,
                          provenance=ANALYTIC_RESONANT)


def photon_number(b: BogoliubovPair) -> PhotonSpectrum:
    """Created photons per mode, N_k = sum_n |beta[n,k]|^2."""
    values = np.sum(np.abs(b.beta) ** 2, axis=0)
    return PhotonSpectrum(values=values, provenance=b.provenance)


def photon_number_analytic(k: int, p: CavityParams) -> float:
    """Closed-form N_k = (1/4)(gamma - k) k (epsilon omega1 T)^2, 0 for k >= gamma."""
    if k < 1:
        raise ModeIndexError(f"mode index must be >= 1, got {k}")
    g = p.gamma_int()
    if k >= g:
        return 0.0
    return 0.25 * (g - k) * k * p.pump_parameter ** 2


def analytic_spectrum(p: CavityParams) -> PhotonSpectrum:
    """Closed-form spectrum over the retained modes."""
    values = np.array([photon_number_analytic(k, p)
                       for k in range(1, p.K + 1)])
    return PhotonSpectrum(values=values, provenance=ANALYTIC_RESONANT)


def peak_mode(s: PhotonSpectrum, rel_tol: float = 0.0) -> set[int]:
    """Mode indices carrying the maximal photon number.

    Ties within rel_tol (relative to the maximum) are all reported; an
    all-zero spectrum yields the empty set, distinct from an error.
    """
    if s.K == 0:
        raise UserInputError("spectrum is empty")
    top = float(s.values.max())
    if top == 0.0:
        return set()
    cut = top * (1.0 - rel_tol)
    return {k for k in range(1, s.K + 1) if s.values[k - 1] >= cut}


def unitarity_defect(b: BogoliubovPair, max_index: int | None = None) -> float:
    """Largest normalization defect of the pair.

    max over (n, m) of |sum_k (alpha[n,k] alpha*[m,k] - beta*[n,k] beta[m,k])
    - delta_nm|, optionally restricted to n, m <= max_index (modes well
    inside the truncation band).
    """
    D = (b.alpha @ b.alpha.conj().T - b.beta.conj() @ b.beta.T
         - np.eye(b.K))
    if max_index is not None:
        if not 1 <= max_index <= b.K:
            raise UserInputError(
                f"max_index must be in 1..{b.K}, got {max_index}")
        D = D[:max_index, :max_index]
    return float(np.abs(D).max())


def first_order_defect_budget(p: CavityParams) -> float:
    """Acceptable normalization defect of first-order analytic pairs."""
    return FIRST_ORDER_DEFECT_SCALE * p.pump_parameter ** 2


def expected_peak_modes(gamma: int) -> set[int]:
    """Peak location of the closed-form spectrum: gamma/2, or the pair
    (gamma +- 1)/2 for odd gamma."""
    if gamma < 2:
        return set()
    if gamma % 2 == 0:
        return {gamma // 2}
    return {(gamma - 1) // 2, (gamma + 1) // 2}
