"""Compiled inner loop of the Poincare series."""

import numpy as np
from numba import njit


@njit(cache=True)
def poincare_sum(zr, zi, Ar, Ai, Br, Bi, q, m, w0r, w0i):
    """sum_g (C(g z) - w0)^m / (A z + B)^(2q) for each z, without the (2i)^q factor.

    Here A = a + ic, B = b + id for g = [[a, b], [c, d]], so that the disk
    point is C(g z) = (conj(A) z + conj(B)) / (A z + B).
    """
    K = zr.shape[0]
    G = Ar.shape[0]
    out_r = np.zeros(K)
    out_i = np.zeros(K)
    for k in range(K):
        x = zr[k]
        y = zi[k]
        sr = 0.0
        si = 0.0
        for g in range(G):
            ar = Ar[g]
            ai = Ai[g]
            dr = ar * x - ai * y + Br[g]
            di = ar * y + ai * x + Bi[g]
            inv = 1.0 / (dr * dr + di * di)
            # e = 1/den, then e^2 = 1/den^2
            er = dr * inv
            ei = -di * inv
            ir = er * er - ei * ei
            ii = 2.0 * er * ei
            pr = ir
            pi = ii
            for _ in range(q - 1):
                t = pr * ir - pi * ii
                pi = pr * ii + pi * ir
                pr = t
            if m > 0:
                nr = ar * x + ai * y + Br[g]
                ni = ar * y - ai * x - Bi[g]
                cr = nr * er - ni * ei - w0r
                ci = nr * ei + ni * er - w0i
                for _ in range(m):
                    t = pr * cr - pi * ci
                    pi = pr * ci + pi * cr
                    pr = t
            sr += pr
            si += pi
        out_r[k] = sr
        out_i[k] = si
    return out_r, out_i
