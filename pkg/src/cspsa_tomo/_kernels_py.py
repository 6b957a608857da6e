"""numpy implementations of the hot kernels.

This is the fallback backend; ``_kernels.pyx`` compiles the same four
functions with identical signatures.  Keep the two files in sync: any
change here must be mirrored there, and ``tests/test_backends.py``
checks the numerical agreement.
"""

from __future__ import annotations

import math

import numpy as np

BACKEND_NAME = "python"


def householder_basis(psi: np.ndarray) -> np.ndarray:
    """Unitary matrix whose column 0 is ``psi`` exactly.

    Built from the Householder reflector H = I - 2 w w^H / |w|^2 with
    w = psi + s e0 and s = psi_0 / |psi_0| (s = 1 when psi_0 = 0).  The
    sign choice makes w_0 = s (1 + |psi_0|), so the construction never
    cancels.  H maps e0 to -conj(s) psi; column 0 is overwritten with
    psi itself to fix the phase, which leaves the matrix unitary.
    """
    v = np.ascontiguousarray(psi, dtype=np.complex128)
    d = v.shape[0]
    a0 = v[0]
    r = math.sqrt(a0.real * a0.real + a0.imag * a0.imag)
    s = a0 / r if r > 0.0 else complex(1.0, 0.0)
    w = v.copy()
    w[0] += s
    scale = 2.0 / (2.0 * (1.0 + r))
    out = np.eye(d, dtype=np.complex128) - scale * np.outer(w, w.conj())
    out[:, 0] = v
    return out


def log_likelihood(bras, counts, psi, floor: float) -> float:
    """Sum of counts[j] * log(max(p_j, floor)) with p_j = |<b_j|psi>|^2."""
    c = bras @ psi
    p = c.real * c.real + c.imag * c.imag
    return float(counts @ np.log(np.maximum(p, floor)))


def likelihood_gradient(bras, counts, psi, floor: float) -> np.ndarray:
    """Conjugate (Wirtinger) gradient of ``log_likelihood`` in psi*."""
    c = bras @ psi
    p = c.real * c.real + c.imag * c.imag
    w = counts / np.maximum(p, floor)
    return bras.conj().T @ (w * c)


def refine_pure_state(
    bras,
    counts,
    start,
    max_iter: int,
    tol: float,
    floor: float,
    init_step: float,
    strategy: str = "gradient",
    return_trace: bool = False,
):
    """Maximize the accumulated log-likelihood over unit vectors.

    ``gradient`` runs projected gradient ascent on the sphere with an
    Armijo backtracking line search, so every accepted step increases
    the objective.  ``fixed_point`` damps the classical R psi iteration
    toward the normalized gradient until the objective stops improving.
    Returns (psi, trace) where trace is the array of accepted objective
    values (or None unless requested).
    """
    psi = np.array(start, dtype=np.complex128)
    psi /= np.linalg.norm(psi)
    ll = log_likelihood(bras, counts, psi, floor)
    trace = [ll]
    for _ in range(max_iter):
        c = bras @ psi
        p = c.real * c.real + c.imag * c.imag
        w = counts / np.maximum(p, floor)
        g = bras.conj().T @ (w * c)
        if strategy == "gradient":
            overlap = np.vdot(psi, g)
            gt = g - overlap * psi
            gt2 = float(np.real(np.vdot(gt, gt)))
            if gt2 <= 1e-30:
                break
            step = init_step
            accepted = False
            for _bt in range(60):
                trial = psi + step * gt
                trial /= np.linalg.norm(trial)
                ll_t = log_likelihood(bras, counts, trial, floor)
                if ll_t >= ll + 1e-4 * step * gt2:
                    accepted = True
                    break
                step *= 0.5
            if not accepted:
                break
        else:
            gn = float(np.linalg.norm(g))
            if gn <= 1e-150:
                break
            cand = g / gn
            beta = 1.0
            accepted = False
            for _bt in range(60):
                trial = psi + beta * (cand - psi)
                tn = float(np.linalg.norm(trial))
                if tn < 1e-12:
                    beta *= 0.5
                    continue
                trial = trial / tn
                ll_t = log_likelihood(bras, counts, trial, floor)
                if ll_t >= ll:
                    accepted = True
                    break
                beta *= 0.5
            if not accepted:
                break
        rel = abs(ll_t - ll) / max(1.0, abs(ll))
        psi = trial
        ll = ll_t
        trace.append(ll)
        if rel < tol:
            break
    return psi, (np.asarray(trace) if return_trace else None)
