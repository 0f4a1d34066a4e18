"""Direct numerical time evolution from the vacuum initial condition.

Two systems are integrated:

* the full truncated mode equations (the oracle), second order in time and
  exact in the drive amplitude,

      Qddot[n,k] + w_k(t)^2 Q[n,k] = 2 lam sum_j g_kj Qdot[n,j]
                                     + lamdot sum_j g_kj Q[n,j]
                                     + lam^2 sum_(j,l) g_jk g_jl Q[n,l]

  with lam = Ldot/L and w_k(t) = k pi / L(t), integrated as the first-order
  pair (Q, P = Qdot);

* the drive-linearized system for the rotating components X[n, (k, sigma)],

      dX/dt = V0 X + epsilon V1(t) X,
      V0 diagonal with entries i w_k sigma,
      V1(t) = omega1 (v^+ e^(i Omega t) + v^- e^(-i Omega t)),

  which keeps only terms first order in the wall amplitude.  The rotating
  components use the static frequencies w_k = k omega1; all time dependence
  lives in V1.

Initial condition in both cases: mode n starts as the pure static-cavity
mode n, Q[n,k](0) = delta_nk / sqrt(2 w_k), P = -i sqrt(w_k/2) delta_nk,
equivalently X[n,(k,-)] = delta_nk, X[n,(k,+)] = 0.  The full system
additionally applies, by default, the sudden-start velocity correction of
matched_start_qp, which keeps the field time derivative continuous when
the wall starts moving at t = 0 (the drive velocity jumps there).

The default integrator is a fixed-step classical 4th-order scheme with
(2 pi / Omega) / 200 steps, chosen for bit-reproducible output; an adaptive
8th-order embedded pair (scipy's DOP853) is available for tight-tolerance
work.  integrate() is a pure function of its arguments; independent calls
may run in parallel freely.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy.integrate import solve_ivp

from . import _kernels_py, backend
from .cavity import CavityParams, SIGMAS, component_index, coupling_matrix, drive_matrix
from .errors import IntegrationError, NonFiniteStateError, UserInputError

FULL = "full"
LINEARIZED = "linearized"
_SYSTEMS = (FULL, LINEARIZED)

#: Relative tolerance of the X <-> (Q, P) round trip, asserted in tests.
ROUND_TRIP_RTOL = 1e-12


@dataclass(frozen=True)
class IntegratorConfig:
    """Scheme selection and accuracy controls.

    scheme            "fixed" (classical 4th order) or "adaptive" (DOP853)
    step_per_period   fixed-scheme steps per drive period
    rtol, atol        adaptive-scheme tolerances
    max_steps         hard cap on fixed-scheme steps per integrate() call
    """

    scheme: str = "fixed"
    step_per_period: int = 200
    rtol: float = 1e-10
    atol: float = 1e-12
    max_steps: int = 5_000_000

    def __post_init__(self):
        if self.scheme not in ("fixed", "adaptive"):
            raise UserInputError(
                f"scheme must be 'fixed' or 'adaptive', got {self.scheme!r}")
        if self.step_per_period < 1:
            raise UserInputError("step_per_period must be >= 1")
        if not (self.rtol > 0 and self.atol > 0):
            raise UserInputError("tolerances must be positive")
        if self.max_steps < 1:
            raise UserInputError("max_steps must be >= 1")


def _finite_or_raise(name, *arrays):
    for a in arrays:
        if not np.all(np.isfinite(a.view(float))):
            raise NonFiniteStateError(
                f"{name} state acquired non-finite entries")


@dataclass(frozen=True)
class QPState:
    """Mode amplitudes Q and momenta P = Qdot at one instant.

    Shape (K, K), row = initial mode n, column = instantaneous mode k.
    Arrays are stored read-only; states are immutable values.
    """

    t: float
    Q: np.ndarray
    P: np.ndarray

    def __post_init__(self):
        Q = np.ascontiguousarray(self.Q, dtype=complex)
        P = np.ascontiguousarray(self.P, dtype=complex)
        if Q.shape != P.shape or Q.ndim != 2 or Q.shape[0] != Q.shape[1]:
            raise UserInputError(
                f"Q and P must be square with equal shape, got "
                f"{Q.shape} and {P.shape}")
        _finite_or_raise("full-system", Q, P)
        Q.setflags(write=False)
        P.setflags(write=False)
        object.__setattr__(self, "Q", Q)
        object.__setattr__(self, "P", P)

    @property
    def K(self) -> int:
        return self.Q.shape[0]


@dataclass(frozen=True)
class XState:
    """Rotating components X[n, (k, sigma)] at one instant, shape (K, 2K).

    Component ordering along the second axis follows
    cavity.component_index: (1,-), (1,+), (2,-), (2,+), ...
    """

    t: float
    X: np.ndarray

    def __post_init__(self):
        X = np.ascontiguousarray(self.X, dtype=complex)
        if X.ndim != 2 or X.shape[1] != 2 * X.shape[0]:
            raise UserInputError(
                f"X must have shape (K, 2K), got {X.shape}")
        _finite_or_raise("linearized-system", X)
        X.setflags(write=False)
        object.__setattr__(self, "X", X)

    @property
    def K(self) -> int:
        return self.X.shape[0]

    def amplitude(self, n: int, k: int, sigma: int) -> complex:
        """Entry X[n, (k, sigma)] with 1-based mode indices."""
        return complex(self.X[n - 1, component_index(k, sigma)])


def vacuum_qp_state(p: CavityParams) -> QPState:
    """Initial condition: each mode n is the static mode n of the cavity."""
    w = p.omega_static()
    Q = np.diag(1.0 / np.sqrt(2.0 * w)).astype(complex)
    P = np.diag(-1j * np.sqrt(w / 2.0))
    return QPState(t=0.0, Q=Q, P=P)


def vacuum_x_state(p: CavityParams) -> XState:
    """Initial rotating components: X[n,(k,-)] = delta_nk, X[n,(k,+)] = 0."""
    X = np.zeros((p.K, 2 * p.K), dtype=complex)
    for n in range(1, p.K + 1):
        X[n - 1, component_index(n, -1)] = 1.0
    return XState(t=0.0, X=X)


def x_from_qp(state: QPState, p: CavityParams) -> XState:
    """Rotating components of a (Q, P) state, using static frequencies.

        X[n,(k,-)] = sqrt(w_k/2) (Q + i P / w_k)
        X[n,(k,+)] = sqrt(w_k/2) (Q - i P / w_k)
    """
    _check_K(state.K, p)
    w = p.omega_static()[np.newaxis, :]
    root = np.sqrt(w / 2.0)
    X = np.empty((p.K, 2 * p.K), dtype=complex)
    X[:, 0::2] = root * (state.Q + 1j * state.P / w)
    X[:, 1::2] = root * (state.Q - 1j * state.P / w)
    return XState(t=state.t, X=X)


def qp_from_x(state: XState, p: CavityParams) -> QPState:
    """Inverse of x_from_qp.

        Q = (X_- + X_+) / sqrt(2 w_k),   P = i sqrt(w_k/2) (X_+ - X_-)
    """
    _check_K(state.K, p)
    w = p.omega_static()[np.newaxis, :]
    Xm = state.X[:, 0::2]
    Xp = state.X[:, 1::2]
    Q = (Xm + Xp) / np.sqrt(2.0 * w)
    P = 1j * np.sqrt(w / 2.0) * (Xp - Xm)
    return QPState(t=state.t, Q=Q, P=P)


def _check_K(K, p):
    if K != p.K:
        raise UserInputError(
            f"state truncation {K} does not match parameters (K={p.K})")


@lru_cache(maxsize=64)
def _full_operators(p: CavityParams):
    # writable private copies: the compiled kernels take plain buffers
    G = coupling_matrix(p.K).values.copy()
    M2 = np.ascontiguousarray(G.T @ G)
    omk0 = np.ascontiguousarray(p.omega_static())
    return G, M2, omk0


@lru_cache(maxsize=64)
def _linear_operators(p: CavityParams):
    w0 = np.empty(2 * p.K, dtype=complex)
    for k in range(1, p.K + 1):
        for sigma in SIGMAS:
            w0[component_index(k, sigma)] = 1j * p.omega_k(k) * sigma
    Vp = np.ascontiguousarray(p.omega1 * drive_matrix(+1, p))
    Vm = np.ascontiguousarray(p.omega1 * drive_matrix(-1, p))
    return w0, Vp, Vm


def rhs_full(t: float, state: QPState, p: CavityParams):
    """Time derivative (dQ, dP) of the full system at time t."""
    _check_K(state.K, p)
    G, M2, omk0 = _full_operators(p)
    dQ, dP = _kernels_py._rhs_full(t, state.Q, state.P,
                                   np.ascontiguousarray(G.T), M2, omk0,
                                   p.epsilon, p.Omega)
    return dQ.copy(), dP


def rhs_linearized(t: float, state: XState, p: CavityParams) -> np.ndarray:
    """Time derivative dX of the linearized system at time t."""
    _check_K(state.K, p)
    w0, Vp, Vm = _linear_operators(p)
    return _kernels_py._rhs_linear(t, state.X, w0[np.newaxis, :],
                                   np.ascontiguousarray(Vp.T),
                                   np.ascontiguousarray(Vm.T),
                                   p.epsilon, p.Omega)


def _validate_sample_times(times, T):
    times = np.atleast_1d(np.asarray(times, dtype=float))
    if times.size == 0:
        raise UserInputError("sample_times must not be empty")
    if np.any(np.diff(times) < 0):
        raise UserInputError("sample_times must be sorted ascending")
    slack = 1e-9 * max(1.0, T)
    if times[0] < -slack or times[-1] > T + slack:
        raise UserInputError(
            f"sample_times must lie within [0, T={T}]")
    return times


def matched_start_qp(p: CavityParams) -> QPState:
    """Vacuum start with the sudden-start velocity correction.

    The wall's velocity jumps from 0 to eps Omega L0 at t = 0.  The field
    and its time derivative stay continuous across the jump, but the mode
    velocities measured against the instantaneous basis do not: they pick
    up the same g-coupling term that the wall-stop matching removes at
    t = T,

        P[n,k](0+) = P_vac[n,k] + lam(0+) sum_j g_kj Q_vac[n,j],

    with lam(0+) = eps Omega.  Starting here makes the evolved pair
    (alpha, beta) satisfy the Bogoliubov normalization identity to
    integrator accuracy; starting from the bare vacuum leaves an O(eps)
    normalization offset inherited from the uncompensated jump.
    """
    state = vacuum_qp_state(p)
    G, _, _ = _full_operators(p)
    lam0 = p.epsilon * p.Omega
    P = state.P + lam0 * (state.Q @ G.T)
    return QPState(t=0.0, Q=state.Q.copy(), P=P)


def integrate(system: str, p: CavityParams, cfg: IntegratorConfig | None = None,
              sample_times=None, start_matched: bool = True):
    """Evolve from the vacuum initial condition, returning sampled states.

    system is "full" (returns QPState list) or "linearized" (XState list).
    sample_times defaults to [p.T].  Fixed-scheme runs are deterministic to
    the byte; each inter-sample interval is covered by an integer number of
    equal steps no larger than the nominal (2 pi / Omega) / step_per_period.

    start_matched applies the sudden-start velocity correction to the full
    system (see matched_start_qp); disable it to start from the bare vacuum
    state, which is what the drive-linearized closed forms assume.  The
    linearized system always starts from the bare vacuum components.
    """
    if system not in _SYSTEMS:
        raise UserInputError(
            f"system must be one of {_SYSTEMS}, got {system!r}")
    cfg = cfg or IntegratorConfig()
    times = _validate_sample_times(
        sample_times if sample_times is not None else [p.T], p.T)
    if cfg.scheme == "fixed":
        return _integrate_fixed(system, p, cfg, times, start_matched)
    return _integrate_adaptive(system, p, cfg, times, start_matched)


def _start_qp(p, start_matched):
    return matched_start_qp(p) if start_matched else vacuum_qp_state(p)


def _integrate_fixed(system, p, cfg, times, start_matched):
    h_nom = p.drive_period / cfg.step_per_period
    plan = []
    total = 0
    t_prev = 0.0
    for ts in times:
        delta = ts - t_prev
        if delta > 0:
            n = max(1, math.ceil(delta / h_nom - 1e-9))
            total += n
            plan.append((t_prev, ts, n))
        else:
            plan.append((t_prev, ts, 0))
        t_prev = ts
    if total > cfg.max_steps:
        raise IntegrationError(
            f"fixed-step plan needs {total} steps, exceeding the limit "
            f"{cfg.max_steps}")

    if system == FULL:
        state = _start_qp(p, start_matched)
        Q = state.Q.copy()
        P = state.P.copy()
        G, M2, omk0 = _full_operators(p)
        out = []
        for t0, t1, n in plan:
            if n:
                backend.rk4_full(Q, P, G, M2, omk0, p.epsilon, p.Omega,
                                 t0, (t1 - t0) / n, n)
            out.append(QPState(t=float(t1), Q=Q.copy(), P=P.copy()))
        return out

    state = vacuum_x_state(p)
    X = state.X.copy()
    w0, Vp, Vm = _linear_operators(p)
    out = []
    for t0, t1, n in plan:
        if n:
            backend.rk4_linear(X, w0, Vp, Vm, p.epsilon, p.Omega,
                               t0, (t1 - t0) / n, n)
        out.append(XState(t=float(t1), X=X.copy()))
    return out


def _integrate_adaptive(system, p, cfg, times, start_matched):
    K = p.K
    if system == FULL:
        G, M2, omk0 = _full_operators(p)
        Gt = np.ascontiguousarray(G.T)
        eps, Omega = p.epsilon, p.Omega
        state = _start_qp(p, start_matched)
        y0 = np.concatenate([state.Q.ravel(), state.P.ravel()])

        def fun(t, y):
            Q = y[:K * K].reshape(K, K)
            P = y[K * K:].reshape(K, K)
            s = math.sin(Omega * t)
            c = math.cos(Omega * t)
            denom = 1.0 + eps * s
            lam = eps * Omega * c / denom
            lam2 = lam * lam
            lamdot = -eps * Omega * Omega * s / denom - lam2
            w2 = (omk0 / denom) ** 2
            dP = (-(Q * w2) + (2.0 * lam) * (P @ Gt) + lamdot * (Q @ Gt)
                  + lam2 * (Q @ M2))
            return np.concatenate([P.ravel(), dP.ravel()])
    else:
        w0, Vp, Vm = _linear_operators(p)
        w0row = w0[np.newaxis, :]
        VpT = np.ascontiguousarray(Vp.T)
        VmT = np.ascontiguousarray(Vm.T)
        eps, Omega = p.epsilon, p.Omega
        state = vacuum_x_state(p)
        y0 = state.X.ravel().copy()

        def fun(t, y):
            X = y.reshape(K, 2 * K)
            cp = complex(math.cos(Omega * t), math.sin(Omega * t))
            V1T = cp * VpT + cp.conjugate() * VmT
            return (X * w0row + eps * (X @ V1T)).ravel()

    if times[-1] <= 0.0:
        if system == FULL:
            s0 = _start_qp(p, start_matched)
            return [QPState(t=float(t), Q=s0.Q.copy(), P=s0.P.copy())
                    for t in times]
        s0 = vacuum_x_state(p)
        return [XState(t=float(t), X=s0.X.copy()) for t in times]

    sol = solve_ivp(fun, (0.0, float(times[-1])), y0, method="DOP853",
                    t_eval=times, rtol=cfg.rtol, atol=cfg.atol)
    if not sol.success:
        raise IntegrationError(f"adaptive integration failed: {sol.message}")

    out = []
    for i, t in enumerate(times):
        y = sol.y[:, i]
        if system == FULL:
            out.append(QPState(t=float(t),
                               Q=y[:K * K].reshape(K, K).copy(),
                               P=y[K * K:].reshape(K, K).copy()))
        else:
            out.append(XState(t=float(t), X=y.reshape(K, 2 * K).copy()))
    return out
