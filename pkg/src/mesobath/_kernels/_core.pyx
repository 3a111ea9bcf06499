# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled Bloch integrator: the hot loop of the trajectory Monte Carlo."""

import numpy as np

cimport numpy as cnp

cnp.import_array()


def bloch_rk4_batch(double[:, ::1] delta_half, double dt, double omega,
                    double gamma1, double gamma2, s0, out_idx):
    """See mesobath._kernels._fallback.bloch_rk4_batch for the contract."""
    cdef Py_ssize_t n = delta_half.shape[0]
    cdef Py_ssize_t m = delta_half.shape[1]
    cdef Py_ssize_t n_steps = (m - 1) // 2
    cdef cnp.intp_t[::1] idx = np.ascontiguousarray(out_idx, dtype=np.intp)
    cdef Py_ssize_t n_out = idx.shape[0]

    out_arr = np.empty((n, n_out, 3), dtype=np.float64)
    cdef double[:, :, ::1] out = out_arr
    s0_arr = np.asarray(s0, dtype=np.float64)
    cdef double s0x = s0_arr[0], s0y = s0_arr[1], s0z = s0_arr[2]

    cdef Py_ssize_t p, i, j
    cdef double sx, sy, sz, d0, dm, d1
    cdef double k1x, k1y, k1z, k2x, k2y, k2z, k3x, k3y, k3z, k4x, k4y, k4z
    cdef double ax, ay, az, h2 = 0.5 * dt, h6 = dt / 6.0

    for p in range(n):
        sx, sy, sz = s0x, s0y, s0z
        j = 0
        if n_out > 0 and idx[0] == 0:
            out[p, 0, 0] = sx
            out[p, 0, 1] = sy
            out[p, 0, 2] = sz
            j = 1
        for i in range(n_steps):
            d0 = delta_half[p, 2 * i]
            dm = delta_half[p, 2 * i + 1]
            d1 = delta_half[p, 2 * i + 2]

            k1x = -d0 * sy - gamma2 * sx
            k1y = d0 * sx - omega * sz - gamma2 * sy
            k1z = omega * sy - gamma1 * (sz + 0.5)

            ax = sx + h2 * k1x
            ay = sy + h2 * k1y
            az = sz + h2 * k1z
            k2x = -dm * ay - gamma2 * ax
            k2y = dm * ax - omega * az - gamma2 * ay
            k2z = omega * ay - gamma1 * (az + 0.5)

            ax = sx + h2 * k2x
            ay = sy + h2 * k2y
            az = sz + h2 * k2z
            k3x = -dm * ay - gamma2 * ax
            k3y = dm * ax - omega * az - gamma2 * ay
            k3z = omega * ay - gamma1 * (az + 0.5)

            ax = sx + dt * k3x
            ay = sy + dt * k3y
            az = sz + dt * k3z
            k4x = -d1 * ay - gamma2 * ax
            k4y = d1 * ax - omega * az - gamma2 * ay
            k4z = omega * ay - gamma1 * (az + 0.5)

            sx = sx + h6 * (k1x + 2.0 * k2x + 2.0 * k3x + k4x)
            sy = sy + h6 * (k1y + 2.0 * k2y + 2.0 * k3y + k4y)
            sz = sz + h6 * (k1z + 2.0 * k2z + 2.0 * k3z + k4z)

            if j < n_out and idx[j] == i + 1:
                out[p, j, 0] = sx
                out[p, j, 1] = sy
                out[p, j, 2] = sz
                j += 1
    return out_arr
