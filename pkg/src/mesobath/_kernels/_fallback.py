"""Pure-numpy Bloch integrator, vectorized over trajectories.

Same contract as the compiled kernel in `_core.pyx`; selected at import
time when the extension is unavailable (or MESOBATH_PURE=1 is set).
"""

from __future__ import annotations

import numpy as np


def bloch_rk4_batch(delta_half: np.ndarray, dt: float, omega: float,
                    gamma1: float, gamma2: float, s0: np.ndarray,
                    out_idx: np.ndarray) -> np.ndarray:
    """Integrate dS/dt = (Omega, 0, Delta(t)) x S - damping for many paths.

    delta_half holds the time-dependent detuning on the half-step grid,
    shape (n_paths, 2 * n_steps + 1).  Damping is -gamma2 on the transverse
    components and -gamma1 (S_z + 1/2) on the longitudinal one (decay toward
    the ground state).  Returns Bloch vectors (n_paths, len(out_idx), 3) at
    the requested step indices.
    """
    delta_half = np.ascontiguousarray(delta_half, dtype=np.float64)
    out_idx = np.asarray(out_idx, dtype=np.intp)
    n, m = delta_half.shape
    n_steps = (m - 1) // 2
    s = np.tile(np.asarray(s0, dtype=np.float64), (n, 1))
    out = np.empty((n, out_idx.size, 3))
    pos = {int(step): j for j, step in enumerate(out_idx)}

    def deriv(d, sv):
        sx, sy, sz = sv[:, 0], sv[:, 1], sv[:, 2]
        return np.stack(
            [-d * sy - gamma2 * sx,
             d * sx - omega * sz - gamma2 * sy,
             omega * sy - gamma1 * (sz + 0.5)],
            axis=1,
        )

    if 0 in pos:
        out[:, pos[0]] = s
    for i in range(n_steps):
        d0 = delta_half[:, 2 * i]
        dm = delta_half[:, 2 * i + 1]
        d1 = delta_half[:, 2 * i + 2]
        k1 = deriv(d0, s)
        k2 = deriv(dm, s + 0.5 * dt * k1)
        k3 = deriv(dm, s + 0.5 * dt * k2)
        k4 = deriv(d1, s + dt * k3)
        s = s + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        j = pos.get(i + 1)
        if j is not None:
            out[:, j] = s
    return out
