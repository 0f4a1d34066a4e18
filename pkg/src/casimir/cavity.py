"""Geometry, mode couplings and drive coefficients for a vibrating-wall cavity.

The cavity has a fixed perfect mirror at x = 0 and a driven one at

    L(t) = L0 * (1 + epsilon * sin(Omega * t)),      Omega = gamma * omega1,

with omega1 = pi / L0 the fundamental frequency of the static cavity
(units c = 1 throughout, default L0 = 1 so omega1 = pi).  The field is
expanded on the instantaneous sine basis

    phi_k(x, L) = sqrt(2 / L) * sin(k * pi * x / L),        k = 1, 2, ...

Moving-boundary mixing between modes k and j enters through the antisymmetric
coupling g_kj; the harmonic drive feeds the rotating field components
X_(k, sigma) through the coefficients v^s_(k sigma, j sigma') built from g.

Everything in this module is a pure function of its arguments and all types
are immutable values, safe to share across parallel workers.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .errors import (
    ModeIndexError,
    PositionDomainError,
    ResonanceUndefinedError,
    UserInputError,
)

# Sign labels for the two rotating components of each mode.  They are stored
# at array offsets 0 (minus) and 1 (plus); every formula consumes them as the
# integers -1 / +1 so sign bookkeeping stays explicit.
SIGMA_MINUS = -1
SIGMA_PLUS = +1
SIGMAS = (SIGMA_MINUS, SIGMA_PLUS)

# First-order closed forms are advisory beyond this pump strength
# (epsilon * omega1 * T); runs past it carry a warning, never an error.
PERTURBATIVE_PUMP_LIMIT = 0.2

# |gamma - round(gamma)| below this counts as an integer drive ratio.
GAMMA_INTEGER_TOL = 1e-9


def sign_slot(sigma: int) -> int:
    """Array offset (0 or 1) of a sign label.  See module docstring."""
    if sigma == SIGMA_MINUS:
        return 0
    if sigma == SIGMA_PLUS:
        return 1
    raise UserInputError(f"sign label must be -1 or +1, got {sigma!r}")


def slot_sign(slot: int) -> int:
    """Inverse of sign_slot."""
    if slot in (0, 1):
        return SIGMAS[slot]
    raise UserInputError(f"sign slot must be 0 or 1, got {slot!r}")


def component_index(k: int, sigma: int) -> int:
    """Flat index of component (k, sigma) in a length-2K component axis.

    Components are ordered (1,-), (1,+), (2,-), (2,+), ...
    """
    return 2 * (k - 1) + sign_slot(sigma)


@dataclass(frozen=True)
class CavityParams:
    """Physical and drive configuration of one run.

    epsilon  dimensionless wall oscillation amplitude, 0 <= epsilon < 1
    gamma    drive ratio Omega / omega1 (real; integer values are resonant)
    T        drive duration (same units as L0)
    L0       rest cavity length
    K        mode truncation; defaults to max(16, ceil(4 * gamma))

    Derived quantities (omega1, Omega, mode frequencies, drive period) are
    exposed read-only so they cannot drift from the stored fields.
    """

    epsilon: float
    gamma: float
    T: float
    L0: float = 1.0
    K: int | None = None

    def __post_init__(self):
        if not self.L0 > 0:
            raise UserInputError(f"L0 must be positive, got {self.L0}")
        if not 0.0 <= self.epsilon < 1.0:
            raise UserInputError(
                f"epsilon must satisfy 0 <= epsilon < 1 (wall must never "
                f"reach x = 0), got {self.epsilon}")
        if not self.gamma > 0:
            raise UserInputError(f"gamma must be positive, got {self.gamma}")
        if not self.T >= 0:
            raise UserInputError(f"T must be nonnegative, got {self.T}")
        if self.K is None:
            object.__setattr__(self, "K", max(16, math.ceil(4 * self.gamma)))
        if not (isinstance(self.K, (int, np.integer)) and self.K >= 1):
            raise UserInputError(f"K must be a positive integer, got {self.K}")
        object.__setattr__(self, "K", int(self.K))

    @classmethod
    def from_periods(cls, epsilon: float, gamma: float, periods: int,
                     L0: float = 1.0, K: int | None = None) -> "CavityParams":
        """Build parameters with T = periods * (2 pi / Omega).

        Integer period counts guarantee L(T) = L0, the wall-stop condition
        required when reading off Bogoliubov coefficients.
        """
        if periods != int(periods) or periods < 0:
            raise UserInputError(
                f"periods must be a nonnegative integer, got {periods}")
        omega1 = math.pi / L0
        period = 2.0 * math.pi / (gamma * omega1)
        return cls(epsilon=epsilon, gamma=gamma, T=int(periods) * period,
                   L0=L0, K=K)

    @property
    def omega1(self) -> float:
        """Fundamental frequency pi / L0 of the static cavity."""
        return math.pi / self.L0

    @property
    def Omega(self) -> float:
        """Wall drive frequency gamma * omega1."""
        return self.gamma * self.omega1

    @property
    def drive_period(self) -> float:
        return 2.0 * math.pi / self.Omega

    @property
    def periods(self) -> float:
        """Duration in drive periods (not necessarily an integer)."""
        return self.T / self.drive_period

    @property
    def pump_parameter(self) -> float:
        """Dimensionless pump strength epsilon * omega1 * T."""
        return self.epsilon * self.omega1 * self.T

    @property
    def perturbative_limit_exceeded(self) -> bool:
        """True when first-order closed forms are no longer trustworthy."""
        return self.pump_parameter > PERTURBATIVE_PUMP_LIMIT

    def omega_k(self, k: int) -> float:
        """Static frequency k * omega1 of mode k."""
        self.check_mode(k)
        return k * self.omega1

    def omega_static(self) -> np.ndarray:
        """Static frequencies of all retained modes, shape (K,)."""
        return np.arange(1, self.K + 1, dtype=float) * self.omega1

    def gamma_int(self) -> int:
        """Drive ratio as an integer, required by resonant closed forms."""
        g = round(self.gamma)
        if abs(self.gamma - g) > GAMMA_INTEGER_TOL or g < 1:
            raise ResonanceUndefinedError(
                f"resonance undefined for non-integer gamma = {self.gamma}")
        return int(g)

    def check_mode(self, k: int) -> None:
        if not 1 <= k <= self.K:
            raise ModeIndexError(
                f"mode index {k} outside the retained range 1..{self.K}")


def wall_position(t, p: CavityParams):
    """Driven wall position L(t) = L0 (1 + epsilon sin(Omega t))."""
    return p.L0 * (1.0 + p.epsilon * np.sin(p.Omega * t))


def wall_log_derivative(t, p: CavityParams):
    """Logarithmic wall velocity Ldot / L, exact in epsilon."""
    s = np.sin(p.Omega * t)
    return p.epsilon * p.Omega * np.cos(p.Omega * t) / (1.0 + p.epsilon * s)


def wall_accel_ratio(t, p: CavityParams):
    """Wall acceleration ratio Lddot / L, exact in epsilon."""
    s = np.sin(p.Omega * t)
    return -p.epsilon * p.Omega ** 2 * s / (1.0 + p.epsilon * s)


def mode_frequency(k: int, t, p: CavityParams):
    """Instantaneous frequency k pi / L(t) of mode k."""
    p.check_mode(k)
    return k * math.pi / wall_position(t, p)


def coupling_g(k: int, j: int) -> float:
    """Boundary-motion coupling between modes k and j.

    g_kj = (-1)^(k-j) * 2 k j / (j^2 - k^2) for j != k and 0 on the diagonal;
    antisymmetric by construction.
    """
    if k < 1 or j < 1:
        raise ModeIndexError(f"mode indices must be >= 1, got ({k}, {j})")
    if k == j:
        return 0.0
    return (-1.0) ** ((k - j) % 2) * 2.0 * k * j / (j * j - k * k)


@dataclass(frozen=True)
class CouplingMatrix:
    """Antisymmetric matrix of g_kj for 1 <= k, j <= size (read-only)."""

    size: int
    values: np.ndarray

    def __post_init__(self):
        self.values.setflags(write=False)

    def __getitem__(self, kj):
        k, j = kj
        return self.values[k - 1, j - 1]


@lru_cache(maxsize=64)
def coupling_matrix(K: int) -> CouplingMatrix:
    """All couplings up to truncation K."""
    if K < 1:
        raise UserInputError(f"truncation must be >= 1, got {K}")
    g = np.zeros((K, K))
    for k in range(1, K + 1):
        for j in range(1, K + 1):
            g[k - 1, j - 1] = coupling_g(k, j)
    return CouplingMatrix(size=K, values=g)


def drive_coefficient(s: int, k: int, sigma: int, j: int, sigma_p: int,
                      p: CavityParams) -> float:
    """Drive coefficient v^s coupling components (k, sigma) and (j, sigma').

        v^s = sigma gamma g_kj sqrt(j/k) (sigma'/2 + s gamma / (4 j))
              - s sigma (k / 2) delta_kj

    s labels the e^(+-i Omega t) harmonic of the drive.  On the diagonal the
    g term vanishes and the value reduces to -s sigma k / 2 independent of
    sigma'.
    """
    p.check_mode(k)
    p.check_mode(j)
    s = _check_sign(s, "s")
    sigma = _check_sign(sigma, "sigma")
    sigma_p = _check_sign(sigma_p, "sigma_p")
    value = -s * sigma * 0.5 * k if k == j else 0.0
    gkj = coupling_g(k, j)
    if gkj != 0.0:
        value += (sigma * p.gamma * gkj * math.sqrt(j / k)
                  * (0.5 * sigma_p + s * p.gamma / (4.0 * j)))
    return value


def _check_sign(sigma, name):
    if sigma not in (-1, 1):
        raise UserInputError(f"{name} must be -1 or +1, got {sigma!r}")
    return int(sigma)


@lru_cache(maxsize=64)
def drive_matrix(s: int, p: CavityParams) -> np.ndarray:
    """Matrix of v^s over all components; rows (k, sigma), columns (j, sigma').

    Component ordering follows component_index.  Read-only, cached per
    parameter set.
    """
    K = p.K
    v = np.zeros((2 * K, 2 * K))
    for k in range(1, K + 1):
        for sigma in SIGMAS:
            a = component_index(k, sigma)
            for j in range(1, K + 1):
                for sigma_p in SIGMAS:
                    v[a, component_index(j, sigma_p)] = drive_coefficient(
                        s, k, sigma, j, sigma_p, p)
    v.setflags(write=False)
    return v


def instantaneous_basis(k: int, x, L: float):
    """Basis function sqrt(2/L) sin(k pi x / L) of the length-L cavity."""
    if k < 1:
        raise ModeIndexError(f"mode index must be >= 1, got {k}")
    if not L > 0:
        raise UserInputError(f"cavity length must be positive, got {L}")
    x = np.asarray(x, dtype=float)
    if np.any(x < 0.0) or np.any(x > L):
        raise PositionDomainError(
            f"position outside the cavity interior [0, {L}]")
    out = np.sqrt(2.0 / L) * np.sin(k * np.pi * x / L)
    return float(out) if out.ndim == 0 else out


def mode_function_eval(n: int, x, t: float, Q_row, p: CavityParams):
    """Field mode n at position x and time t given its amplitude row.

    Q_row holds the K amplitudes of mode n on the instantaneous basis at
    time t; the result vanishes at both walls by construction.
    """
    p.check_mode(n)
    Q_row = np.asarray(Q_row)
    if Q_row.shape != (p.K,):
        raise UserInputError(
            f"amplitude row must have length K={p.K}, got {Q_row.shape}")
    L = wall_position(t, p)
    total = 0.0 + 0.0j
    for k in range(1, p.K + 1):
        total = total + Q_row[k - 1] * instantaneous_basis(k, x, L)
    return total
