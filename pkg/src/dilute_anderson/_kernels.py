"""Numba-compiled inner loops for orbit generation and matrix products.

The phase recursions are inherently sequential, so these are the only hot
loops in the package; everything else is vectorized numpy. All kernels release
the GIL so replica- and sweep-level threading gets real parallelism.
"""

from __future__ import annotations

import math

import numpy as np
from numba import njit


@njit(cache=True, nogil=True)
def pruefer_chain(theta0, k, sin_k, v, psi, thetas, log_norms, increments):
    """Iterate the phase lift theta -> theta + k + kick(theta, v/sin k) + psi.

    v and psi are pre-sampled per-step arrays (psi may be all zeros for the
    physical chain). The v == 0 branch is exact: increment k + psi, log-norm 0.
    Outputs are written into the preallocated arrays.
    """
    n = v.size
    th = theta0
    thetas[0] = th
    for i in range(n):
        vi = v[i]
        if vi == 0.0:
            dphi = 0.0
            ln = 0.0
        else:
            c = vi / sin_k
            ct = math.cos(th)
            st = math.sin(th)
            if ct == 0.0:
                dphi = 0.0
            else:
                t = st / ct
                dphi = math.atan(t - c) - math.atan(t)
            u = st - c * ct
            ln = 0.5 * math.log(ct * ct + u * u)
        inc = k + dphi + psi[i]
        log_norms[i] = ln
        increments[i] = inc
        th = th + inc
        thetas[i + 1] = th


@njit(cache=True, nogil=True)
def matrix_product_chain(E, v, renorm_every, block_logs, block_steps):
    """Accumulate log ||prod T(E, v_n)|| with periodic Frobenius renormalization.

    Writes one log-factor per renormalization block; the final partial block is
    renormalized too, so the block logs sum exactly to the total log-norm.
    Returns -1 if the running product overflows before a renormalization,
    otherwise the number of blocks written.
    """
    b11 = 1.0
    b12 = 0.0
    b21 = 0.0
    b22 = 1.0
    jb = 0
    count = 0
    n = v.size
    for i in range(n):
        d = v[i] - E
        n11 = d * b11 - b21
        n12 = d * b12 - b22
        b21 = b11
        b22 = b12
        b11 = n11
        b12 = n12
        count += 1
        if count == renorm_every or i == n - 1:
            f = math.sqrt(b11 * b11 + b12 * b12 + b21 * b21 + b22 * b22)
            if not math.isfinite(f) or f == 0.0:
                return -1
            block_logs[jb] = math.log(f)
            block_steps[jb] = count
            inv = 1.0 / f
            b11 *= inv
            b12 *= inv
            b21 *= inv
            b22 *= inv
            jb += 1
            count = 0
    return jb


@njit(cache=True, nogil=True)
def sturm_negative_count(diag):
    """Negative-eigenvalue count of the symmetric tridiagonal with unit
    off-diagonals, by the stabilized shifted-ratio recurrence.

    Exact zeros in the pivot sequence are replaced by a tiny negative number
    (the standard underflow guard for inertia counts).
    """
    count = 0
    d = diag[0]
    if d == 0.0:
        d = -1e-300
    if d < 0.0:
        count += 1
    for i in range(1, diag.size):
        d = diag[i] - 1.0 / d
        if d == 0.0:
            d = -1e-300
        if d < 0.0:
            count += 1
    return count
