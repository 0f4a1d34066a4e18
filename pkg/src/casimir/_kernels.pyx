# cython: boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled fixed-step stepping loops.

Same calling convention as casimir._kernels_py (the pure-Python reference
implementation); see that module for the state layout and the equations.
The time stepping runs in C, matrix products go straight to BLAS (zgemm),
and the elementwise stage arithmetic runs over flat double views so the
compiler can vectorize it.
"""

import numpy as np

from libc.math cimport cos, sin
from scipy.linalg.cython_blas cimport zgemm


cdef void _matmul(double complex[:, ::1] A, double complex[:, ::1] B,
                  double complex[:, ::1] C,
                  double complex alpha, double complex beta) noexcept nogil:
    # C-order product C = alpha * A @ B + beta * C via column-major zgemm
    # (swap operands: C^T = B^T A^T)
    cdef char trans = b'N'
    cdef int m = <int> B.shape[1]
    cdef int n = <int> A.shape[0]
    cdef int k = <int> B.shape[0]
    zgemm(&trans, &trans, &m, &n, &k, &alpha, &B[0, 0], &m,
          &A[0, 0], &k, &beta, &C[0, 0], &m)


cdef inline void _stage(double* out, double* y, double* dy, double w,
                        Py_ssize_t n2) noexcept nogil:
    # out = y + w * dy over interleaved re/im doubles
    cdef Py_ssize_t i
    for i in range(n2):
        out[i] = y[i] + w * dy[i]


cdef inline void _copy(double* out, double* y, Py_ssize_t n2) noexcept nogil:
    cdef Py_ssize_t i
    for i in range(n2):
        out[i] = y[i]


cdef inline void _combine(double* y, double* k1, double* k2, double* k3,
                          double* k4, double h, Py_ssize_t n2) noexcept nogil:
    cdef Py_ssize_t i
    cdef double w = h / 6.0
    for i in range(n2):
        y[i] = y[i] + w * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i])


cdef void _rhs_full(double t,
                    double complex[:, ::1] Q, double complex[:, ::1] P,
                    double complex[:, ::1] Gt, double complex[:, ::1] M2,
                    double[::1] omk0, double eps, double Omega,
                    double complex[:, ::1] dQ, double complex[:, ::1] dP) noexcept nogil:
    cdef Py_ssize_t K = Q.shape[0]
    cdef Py_ssize_t n, k
    cdef double s = sin(Omega * t)
    cdef double c = cos(Omega * t)
    cdef double denom = 1.0 + eps * s
    cdef double lam = eps * Omega * c / denom
    cdef double lam2 = lam * lam
    cdef double lamdot = -eps * Omega * Omega * s / denom - lam2
    cdef double wk, w2
    cdef double* q = <double*> &Q[0, 0]
    cdef double* dp = <double*> &dP[0, 0]
    _matmul(P, Gt, dP, 2.0 * lam, 0.0)
    _matmul(Q, Gt, dP, lamdot, 1.0)
    _matmul(Q, M2, dP, lam2, 1.0)
    for n in range(K):
        for k in range(K):
            wk = omk0[k] / denom
            w2 = wk * wk
            dp[2 * (n * K + k)] -= w2 * q[2 * (n * K + k)]
            dp[2 * (n * K + k) + 1] -= w2 * q[2 * (n * K + k) + 1]
    _copy(<double*> &dQ[0, 0], <double*> &P[0, 0], 2 * K * K)


def rk4_full(double complex[:, ::1] Q, double complex[:, ::1] P,
             G, M2, omk0_in,
             double eps, double Omega, double t0, double h, Py_ssize_t nsteps):
    """Advance the full system in place by nsteps steps of size h."""
    cdef Py_ssize_t K = Q.shape[0]
    Gt_arr = np.ascontiguousarray(np.asarray(G).T, dtype=np.complex128)
    M2_arr = np.ascontiguousarray(M2, dtype=np.complex128)
    omk_arr = np.ascontiguousarray(omk0_in, dtype=np.float64)
    cdef double complex[:, ::1] Gt = Gt_arr
    cdef double complex[:, ::1] M2v = M2_arr
    cdef double[::1] omk0 = omk_arr
    scratch = [np.empty((K, K), dtype=np.complex128) for _ in range(10)]
    cdef double complex[:, ::1] qa = scratch[0]
    cdef double complex[:, ::1] pa = scratch[1]
    cdef double complex[:, ::1] k1q = scratch[2]
    cdef double complex[:, ::1] k1p = scratch[3]
    cdef double complex[:, ::1] k2q = scratch[4]
    cdef double complex[:, ::1] k2p = scratch[5]
    cdef double complex[:, ::1] k3q = scratch[6]
    cdef double complex[:, ::1] k3p = scratch[7]
    cdef double complex[:, ::1] k4q = scratch[8]
    cdef double complex[:, ::1] k4p = scratch[9]
    cdef Py_ssize_t i, n2 = 2 * K * K
    cdef double t
    with nogil:
        for i in range(nsteps):
            t = t0 + i * h
            _rhs_full(t, Q, P, Gt, M2v, omk0, eps, Omega, k1q, k1p)
            _stage(<double*> &qa[0, 0], <double*> &Q[0, 0],
                   <double*> &k1q[0, 0], 0.5 * h, n2)
            _stage(<double*> &pa[0, 0], <double*> &P[0, 0],
                   <double*> &k1p[0, 0], 0.5 * h, n2)
            _rhs_full(t + 0.5 * h, qa, pa, Gt, M2v, omk0, eps, Omega,
                      k2q, k2p)
            _stage(<double*> &qa[0, 0], <double*> &Q[0, 0],
                   <double*> &k2q[0, 0], 0.5 * h, n2)
            _stage(<double*> &pa[0, 0], <double*> &P[0, 0],
                   <double*> &k2p[0, 0], 0.5 * h, n2)
            _rhs_full(t + 0.5 * h, qa, pa, Gt, M2v, omk0, eps, Omega,
                      k3q, k3p)
            _stage(<double*> &qa[0, 0], <double*> &Q[0, 0],
                   <double*> &k3q[0, 0], h, n2)
            _stage(<double*> &pa[0, 0], <double*> &P[0, 0],
                   <double*> &k3p[0, 0], h, n2)
            _rhs_full(t + h, qa, pa, Gt, M2v, omk0, eps, Omega, k4q, k4p)
            _combine(<double*> &Q[0, 0], <double*> &k1q[0, 0],
                     <double*> &k2q[0, 0], <double*> &k3q[0, 0],
                     <double*> &k4q[0, 0], h, n2)
            _combine(<double*> &P[0, 0], <double*> &k1p[0, 0],
                     <double*> &k2p[0, 0], <double*> &k3p[0, 0],
                     <double*> &k4p[0, 0], h, n2)


cdef void _rhs_linear(double t, double complex[:, ::1] X,
                      double[::1] w_im,
                      double[:, ::1] Vsum, double[:, ::1] Vdif,
                      double eps, double Omega,
                      double complex[:, ::1] V1T,
                      double complex[:, ::1] dX) noexcept nogil:
    # V1(t)^T = cos(Omega t) (Vp + Vm)^T + i sin(Omega t) (Vp - Vm)^T and
    # the diagonal part is i * w_im (frequencies, sign-weighted)
    cdef Py_ssize_t K = X.shape[0]
    cdef Py_ssize_t M = X.shape[1]
    cdef Py_ssize_t n, a, i
    cdef double th = Omega * t
    cdef double c = cos(th)
    cdef double s = sin(th)
    cdef double* v1 = <double*> &V1T[0, 0]
    cdef double* vs = &Vsum[0, 0]
    cdef double* vd = &Vdif[0, 0]
    cdef double* x = <double*> &X[0, 0]
    cdef double* dx = <double*> &dX[0, 0]
    cdef double w
    for i in range(M * M):
        v1[2 * i] = c * vs[i]
        v1[2 * i + 1] = s * vd[i]
    _matmul(X, V1T, dX, eps, 0.0)
    for n in range(K):
        for a in range(M):
            w = w_im[a]
            dx[2 * (n * M + a)] -= w * x[2 * (n * M + a) + 1]
            dx[2 * (n * M + a) + 1] += w * x[2 * (n * M + a)]


def rk4_linear(double complex[:, ::1] X, w0_in, Vp, Vm,
               double eps, double Omega, double t0, double h, Py_ssize_t nsteps):
    """Advance the linearized system in place by nsteps steps of size h."""
    cdef Py_ssize_t K = X.shape[0]
    cdef Py_ssize_t M = X.shape[1]
    w0_arr = np.ascontiguousarray(w0_in, dtype=np.complex128)
    if np.abs(w0_arr.real).max(initial=0.0) != 0.0:
        raise ValueError("diagonal generator must be purely imaginary")
    wim_arr = np.ascontiguousarray(w0_arr.imag, dtype=np.float64)
    VpT = np.asarray(Vp, dtype=np.float64).T
    VmT = np.asarray(Vm, dtype=np.float64).T
    Vsum_arr = np.ascontiguousarray(VpT + VmT)
    Vdif_arr = np.ascontiguousarray(VpT - VmT)
    cdef double[::1] w_im = wim_arr
    cdef double[:, ::1] Vsum = Vsum_arr
    cdef double[:, ::1] Vdif = Vdif_arr
    scratch = [np.empty((K, M), dtype=np.complex128) for _ in range(5)]
    cdef double complex[:, ::1] xa = scratch[0]
    cdef double complex[:, ::1] k1 = scratch[1]
    cdef double complex[:, ::1] k2 = scratch[2]
    cdef double complex[:, ::1] k3 = scratch[3]
    cdef double complex[:, ::1] k4 = scratch[4]
    V1_arr = np.empty((M, M), dtype=np.complex128)
    cdef double complex[:, ::1] V1T = V1_arr
    cdef Py_ssize_t i, n2 = 2 * K * M
    cdef double t
    with nogil:
        for i in range(nsteps):
            t = t0 + i * h
            _rhs_linear(t, X, w_im, Vsum, Vdif, eps, Omega, V1T, k1)
            _stage(<double*> &xa[0, 0], <double*> &X[0, 0],
                   <double*> &k1[0, 0], 0.5 * h, n2)
            _rhs_linear(t + 0.5 * h, xa, w_im, Vsum, Vdif, eps, Omega,
                        V1T, k2)
            _stage(<double*> &xa[0, 0], <double*> &X[0, 0],
                   <double*> &k2[0, 0], 0.5 * h, n2)
            _rhs_linear(t + 0.5 * h, xa, w_im, Vsum, Vdif, eps, Omega,
                        V1T, k3)
            _stage(<double*> &xa[0, 0], <double*> &X[0, 0],
                   <double*> &k3[0, 0], h, n2)
            _rhs_linear(t + h, xa, w_im, Vsum, Vdif, eps, Omega, V1T, k4)
            _combine(<double*> &X[0, 0], <double*> &k1[0, 0],
                     <double*> &k2[0, 0], <double*> &k3[0, 0],
                     <double*> &k4[0, 0], h, n2)
