# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled implementations of the hot kernels.

Mirror of ``_kernels_py``; the two backends must expose identical
signatures and agree numerically (tests/test_backends.py).
"""

import numpy as np

from libc.math cimport fabs, fmax, log, sqrt

BACKEND_NAME = "compiled"


def householder_basis(psi):
    """Unitary matrix whose column 0 is ``psi`` exactly.

    Same reflector construction as the numpy backend: w = psi + s e0
    with s = psi_0 / |psi_0| (s = 1 when psi_0 = 0), H = I - 2 w w^H
    / |w|^2, column 0 overwritten with psi.
    """
    cdef const double complex[::1] v = np.ascontiguousarray(psi, dtype=np.complex128)
    cdef Py_ssize_t d = v.shape[0]
    cdef Py_ssize_t i, j
    out = np.empty((d, d), dtype=np.complex128)
    cdef double complex[:, ::1] U = out
    w_arr = np.empty(d, dtype=np.complex128)
    cdef double complex[::1] w = w_arr
    cdef double complex a0 = v[0]
    cdef double r = sqrt(a0.real * a0.real + a0.imag * a0.imag)
    cdef double complex s
    if r > 0.0:
        s = a0 / r
    else:
        s = 1.0
    for i in range(d):
        w[i] = v[i]
    w[0] = w[0] + s
    cdef double scale = 2.0 / (2.0 * (1.0 + r))
    cdef double complex wjc, t
    for j in range(d):
        wjc = w[j].conjugate()
        for i in range(d):
            t = w[i] * wjc
            U[i, j] = -(scale * t)
        U[j, j] = U[j, j] + 1.0
    for i in range(d):
        U[i, 0] = v[i]
    return out


cdef double _loglike(
    const double complex[:, ::1] bras,
    const double[::1] counts,
    const double complex[::1] psi,
    double floor,
) noexcept nogil:
    cdef Py_ssize_t m = bras.shape[0]
    cdef Py_ssize_t d = bras.shape[1]
    cdef Py_ssize_t i, j
    cdef double total = 0.0
    cdef double p
    cdef double complex c
    for j in range(m):
        c = 0
        for i in range(d):
            c = c + bras[j, i] * psi[i]
        p = c.real * c.real + c.imag * c.imag
        if p < floor:
            p = floor
        total = total + counts[j] * log(p)
    return total


cdef void _grad(
    const double complex[:, ::1] bras,
    const double[::1] counts,
    const double complex[::1] psi,
    double floor,
    double complex[::1] gout,
) noexcept nogil:
    cdef Py_ssize_t m = bras.shape[0]
    cdef Py_ssize_t d = bras.shape[1]
    cdef Py_ssize_t i, j
    cdef double complex c, wc
    cdef double p
    for i in range(d):
        gout[i] = 0
    for j in range(m):
        c = 0
        for i in range(d):
            c = c + bras[j, i] * psi[i]
        p = c.real * c.real + c.imag * c.imag
        if p < floor:
            p = floor
        wc = (counts[j] / p) * c
        for i in range(d):
            gout[i] = gout[i] + bras[j, i].conjugate() * wc


def log_likelihood(bras, counts, psi, double floor):
    """Sum of counts[j] * log(max(p_j, floor)) with p_j = |<b_j|psi>|^2."""
    cdef const double complex[:, ::1] b = np.ascontiguousarray(bras, dtype=np.complex128)
    cdef const double[::1] n = np.ascontiguousarray(counts, dtype=np.float64)
    cdef const double complex[::1] v = np.ascontiguousarray(psi, dtype=np.complex128)
    return _loglike(b, n, v, floor)


def likelihood_gradient(bras, counts, psi, double floor):
    """Conjugate (Wirtinger) gradient of ``log_likelihood`` in psi*."""
    cdef const double complex[:, ::1] b = np.ascontiguousarray(bras, dtype=np.complex128)
    cdef const double[::1] n = np.ascontiguousarray(counts, dtype=np.float64)
    cdef const double complex[::1] v = np.ascontiguousarray(psi, dtype=np.complex128)
    out = np.empty(v.shape[0], dtype=np.complex128)
    cdef double complex[::1] g = out
    _grad(b, n, v, floor, g)
    return out


def refine_pure_state(
    bras,
    counts,
    start,
    int max_iter,
    double tol,
    double floor,
    double init_step,
    strategy="gradient",
    bint return_trace=False,
):
    """Maximize the accumulated log-likelihood over unit vectors.

    Same two strategies and acceptance rules as the numpy backend.
    Returns (psi, trace) with trace the accepted objective values (or
    None unless requested).
    """
    cdef const double complex[:, ::1] b = np.ascontiguousarray(bras, dtype=np.complex128)
    cdef const double[::1] n = np.ascontiguousarray(counts, dtype=np.float64)
    psi_arr = np.array(start, dtype=np.complex128)
    cdef double complex[::1] psi = psi_arr
    cdef Py_ssize_t d = psi.shape[0]
    cdef Py_ssize_t i
    cdef int strat = 0 if strategy == "gradient" else 1
    cdef double nrm = 0.0
    for i in range(d):
        nrm += psi[i].real * psi[i].real + psi[i].imag * psi[i].imag
    nrm = sqrt(nrm)
    for i in range(d):
        psi[i] = psi[i] / nrm
    g_arr = np.empty(d, dtype=np.complex128)
    gt_arr = np.empty(d, dtype=np.complex128)
    trial_arr = np.empty(d, dtype=np.complex128)
    cdef double complex[::1] g = g_arr
    cdef double complex[::1] gt = gt_arr
    cdef double complex[::1] trial = trial_arr
    trace_arr = np.empty(max_iter + 1, dtype=np.float64)
    cdef double[::1] trace = trace_arr
    cdef double ll = _loglike(b, n, psi, floor)
    cdef Py_ssize_t n_acc = 1
    trace[0] = ll
    cdef int it, bt
    cdef double complex ip
    cdef double gt2, step, ll_t, rel, tn, gn, beta
    cdef bint accepted
    for it in range(max_iter):
        _grad(b, n, psi, floor, g)
        if strat == 0:
            ip = 0
            for i in range(d):
                ip = ip + psi[i].conjugate() * g[i]
            gt2 = 0.0
            for i in range(d):
                gt[i] = g[i] - ip * psi[i]
                gt2 += gt[i].real * gt[i].real + gt[i].imag * gt[i].imag
            if gt2 <= 1e-30:
                break
            step = init_step
            accepted = False
            for bt in range(60):
                tn = 0.0
                for i in range(d):
                    trial[i] = psi[i] + step * gt[i]
                    tn += trial[i].real * trial[i].real + trial[i].imag * trial[i].imag
                tn = sqrt(tn)
                for i in range(d):
                    trial[i] = trial[i] / tn
                ll_t = _loglike(b, n, trial, floor)
                if ll_t >= ll + 1e-4 * step * gt2:
                    accepted = True
                    break
                step = step * 0.5
            if not accepted:
                break
        else:
            gn = 0.0
            for i in range(d):
                gn += g[i].real * g[i].real + g[i].imag * g[i].imag
            gn = sqrt(gn)
            if gn <= 1e-150:
                break
            beta = 1.0
            accepted = False
            for bt in range(60):
                tn = 0.0
                for i in range(d):
                    trial[i] = psi[i] + beta * (g[i] / gn - psi[i])
                    tn += trial[i].real * trial[i].real + trial[i].imag * trial[i].imag
                tn = sqrt(tn)
                if tn < 1e-12:
                    beta = beta * 0.5
                    continue
                for i in range(d):
                    trial[i] = trial[i] / tn
                ll_t = _loglike(b, n, trial, floor)
                if ll_t >= ll:
                    accepted = True
                    break
                beta = beta * 0.5
            if not accepted:
                break
        rel = fabs(ll_t - ll) / fmax(1.0, fabs(ll))
        for i in range(d):
            psi[i] = trial[i]
        ll = ll_t
        trace[n_acc] = ll
        n_acc += 1
        if rel < tol:
            break
    if return_trace:
        return psi_arr, trace_arr[:n_acc].copy()
    return psi_arr, None
