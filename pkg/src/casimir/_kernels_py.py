"""Fixed-step classical 4th-order stepping loops, numpy implementation.

Reference semantics for the compiled extension (casimir._kernels); the two
share a calling convention and must stay interchangeable.  Both advance the
state arrays in place over nsteps equal steps of size h starting at t0.

Full system state: complex matrices Q, P of shape (K, K), row = initial mode,
column = instantaneous mode.  Evolution (exact in the drive amplitude):

    dQ/dt = P
    dP[n,k]/dt = -w_k(t)^2 Q[n,k] + 2 lam sum_j G[k,j] P[n,j]
                 + lamdot sum_j G[k,j] Q[n,j] + lam^2 sum_j M2[k,j] Q[n,j]

with lam = Ldot/L, lamdot its time derivative, w_k(t) = omk0[k] / (1 + eps
sin(Omega t)) and M2 = G^T G.

Linearized system state: complex matrix X of shape (K, 2K) of rotating
components; dX[n,a]/dt = w0[a] X[n,a] + eps sum_b V1[a,b] X[n,b] with
V1(t) = Vp e^(i Omega t) + Vm e^(-i Omega t).
"""

import math

import numpy as np


def _rhs_full(t, Q, P, Gt, M2, omk0, eps, Omega):
    s = math.sin(Omega * t)
    c = math.cos(Omega * t)
    denom = 1.0 + eps * s
    lam = eps * Omega * c / denom
    lam2 = lam * lam
    lamdot = -eps * Omega * Omega * s / denom - lam2
    w2 = (omk0 / denom) ** 2
    dP = -(Q * w2) + (2.0 * lam) * (P @ Gt) + lamdot * (Q @ Gt) + lam2 * (Q @ M2)
    return P, dP


def rk4_full(Q, P, G, M2, omk0, eps, Omega, t0, h, nsteps):
    """Advance the full system in place by nsteps steps of size h."""
    Gt = np.ascontiguousarray(G.T)
    for i in range(nsteps):
        t = t0 + i * h
        k1q, k1p = _rhs_full(t, Q, P, Gt, M2, omk0, eps, Omega)
        k2q, k2p = _rhs_full(t + 0.5 * h, Q + (0.5 * h) * k1q,
                             P + (0.5 * h) * k1p, Gt, M2, omk0, eps, Omega)
        k3q, k3p = _rhs_full(t + 0.5 * h, Q + (0.5 * h) * k2q,
                             P + (0.5 * h) * k2p, Gt, M2, omk0, eps, Omega)
        k4q, k4p = _rhs_full(t + h, Q + h * k3q, P + h * k3p,
                             Gt, M2, omk0, eps, Omega)
        Q += (h / 6.0) * (k1q + 2.0 * k2q + 2.0 * k3q + k4q)
        P += (h / 6.0) * (k1p + 2.0 * k2p + 2.0 * k3p + k4p)


def _rhs_linear(t, X, w0, VpT, VmT, eps, Omega):
    cp = complex(math.cos(Omega * t), math.sin(Omega * t))
    V1T = cp * VpT + cp.conjugate() * VmT
    return X * w0 + eps * (X @ V1T)


def rk4_linear(X, w0, Vp, Vm, eps, Omega, t0, h, nsteps):
    """Advance the linearized system in place by nsteps steps of size h."""
    VpT = np.ascontiguousarray(Vp.T)
    VmT = np.ascontiguousarray(Vm.T)
    w0 = w0[np.newaxis, :]
    for i in range(nsteps):
        t = t0 + i * h
        k1 = _rhs_linear(t, X, w0, VpT, VmT, eps, Omega)
        k2 = _rhs_linear(t + 0.5 * h, X + (0.5 * h) * k1, w0, VpT, VmT, eps, Omega)
        k3 = _rhs_linear(t + 0.5 * h, X + (0.5 * h) * k2, w0, VpT, VmT, eps, Omega)
        k4 = _rhs_linear(t + h, X + h * k3, w0, VpT, VmT, eps, Omega)
        X += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
