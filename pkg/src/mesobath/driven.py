"""Driven (Rabi) dynamics over the quasi-static bath.

Each frozen bath eigenvalue Lambda rotates the Bloch vector about a tilted
axis at omega = sqrt((Lambda + delta)^2 + Omega^2); averaging over the bath
law produces the reduced-contrast oscillations, the steady-state lineshape,
the quadratic short-time decay and (with decorrelating noise) the Magnus
quadratic-noise envelope.  The trajectory Monte Carlo integrates the damped
Bloch equations along sampled noise paths using the compiled kernel when
available.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np

from . import _kernels
from .bath import BathSpec, DensityOfStates, NoiseModel, az_distribution, continuum_dos, sample_az
from .free_evolution import QubitParams

GH_NODES = 200


@dataclass(frozen=True)
class BlochVector:
    sx: float
    sy: float
    sz: float


@dataclass(frozen=True)
class RotationFrame:
    """Effective rotation frequency and unit axis for one bath eigenvalue."""

    omega_eff: float
    axis: np.ndarray


@dataclass(frozen=True)
class ZetaF:
    f: float
    zeta: complex


@dataclass(frozen=True)
class RabiEnvelope:
    """Bath-averaged population/coherence oscillation.

    2<S_z(t)> = f + Re zeta(t) and 2<S_y(t)> = Im zeta(t) by construction.
    """

    t: np.ndarray
    f: float
    zeta: np.ndarray
    sz2_err: np.ndarray | None = None
    sy2_err: np.ndarray | None = None

    @property
    def sz2(self) -> np.ndarray:
        return self.f + self.zeta.real

    @property
    def sy2(self) -> np.ndarray:
        return self.zeta.imag


@dataclass(frozen=True)
class BlochTrajectory:
    """Averaged Bloch vector path (T, 3) with optional standard errors."""

    t: np.ndarray
    s: np.ndarray
    s_err: np.ndarray | None = None


@dataclass(frozen=True)
class MagnusEnvelope:
    t: np.ndarray
    values: np.ndarray
    valid: bool
    reason: str = ""


def rotation_frame(az_eigenvalue: float, qp: QubitParams) -> RotationFrame:
    """Rotation axis/frequency for effective detuning Lambda + delta."""
    d = az_eigenvalue + qp.delta
    omega_eff = math.hypot(d, qp.omega_rabi)
    if omega_eff == 0:
        raise ValueError("degenerate frame: Omega = 0 and zero effective detuning")
    return RotationFrame(omega_eff=omega_eff,
                         axis=np.array([qp.omega_rabi, 0.0, d]) / omega_eff)


def propagator(frame: RotationFrame, t: float) -> np.ndarray:
    """Quasi-static 2x2 propagator cos(wt/2) 1 - i sin(wt/2) n.sigma."""
    half = 0.5 * frame.omega_eff * t
    nx, _, nz = frame.axis
    c, s = math.cos(half), math.sin(half)
    return np.array([[c - 1j * s * nz, -1j * s * nx],
                     [-1j * s * nx, c + 1j * s * nz]])


def zeta_f_at_eigenvalue(az_eigenvalue: float, qp: QubitParams, t: float) -> ZetaF:
    """Per-eigenvalue steady part f and oscillatory part zeta(t)."""
    d = az_eigenvalue + qp.delta
    w2 = d * d + qp.omega_rabi**2
    if w2 == 0:
        raise ValueError("f and zeta undefined at Omega = 0 with zero detuning")
    f = d * d / w2
    zeta = qp.omega_rabi**2 * np.exp(-1j * math.sqrt(w2) * t) / w2
    return ZetaF(f=float(f), zeta=complex(zeta))


def _gauss_hermite_law(dos: DensityOfStates, delta: float):
    x, w = np.polynomial.hermite.hermgauss(GH_NODES)
    return dos.mean + delta + math.sqrt(2.0) * dos.sigma * x, w / math.sqrt(math.pi)


def _tabulated_law(dos: DensityOfStates, delta: float, points: int = 4001):
    lo, hi = dos.mean - 12 * dos.sigma, dos.mean + 12 * dos.sigma
    grid = np.linspace(lo, hi, points)
    w = dos.pdf(grid)
    w = w / w.sum()
    return grid + delta, w


def bath_law(bath, qp: QubitParams, method: str = "exact",
             samples: int = 10000, seed=0):
    """Effective detunings and weights for bath averaging.

    `bath` is a BathSpec or a DensityOfStates.  Methods: 'exact' (eigenvalue
    pmf), 'mc' (sampled configurations, equal weights) or 'continuum'
    (Gauss-Hermite over the Gaussian density of states).
    """
    if isinstance(bath, DensityOfStates):
        if bath.kind == "gaussian":
            return _gauss_hermite_law(bath, qp.delta)
        return _tabulated_law(bath, qp.delta)
    spec: BathSpec = bath
    if method == "exact":
        dist = az_distribution(spec)
        return spec.lam * dist.values + qp.delta, dist.probs
    if method == "mc":
        az = sample_az(spec, samples, seed)
        return spec.lam * az + qp.delta, np.full(samples, 1.0 / samples)
    if method == "continuum":
        return _gauss_hermite_law(continuum_dos(spec), qp.delta)
    raise ValueError(f"unknown averaging method {method!r}")


def rabi_average(bath, qp: QubitParams, t_grid, method: str = "exact",
                 samples: int = 10000, seed=0, chunk: int = 65536) -> RabiEnvelope:
    """Bath-averaged f and zeta(t) by the requested method.

    The 'mc' method also reports per-time-point standard errors of
    2<S_z> and 2<S_y>.
    """
    t = np.asarray(t_grid, dtype=float)
    detuning, weights = bath_law(bath, qp, method=method, samples=samples, seed=seed)
    om2 = qp.omega_rabi**2
    track_err = method == "mc" and not isinstance(bath, DensityOfStates)

    f_sum = 0.0
    zeta_sum = np.zeros(t.size, dtype=complex)
    sz_sum = np.zeros(t.size)
    sz_sq = np.zeros(t.size)
    sy_sq = np.zeros(t.size)
    for lo in range(0, detuning.size, chunk):
        d = detuning[lo:lo + chunk]
        w = weights[lo:lo + chunk]
        w2 = d * d + om2
        f_i = d * d / w2
        f_sum += float(np.dot(w, f_i))
        zeta_i = (om2 / w2)[:, None] * np.exp(-1j * np.sqrt(w2)[:, None] * t)
        zeta_sum += w @ zeta_i
        if track_err:
            sz_i = f_i[:, None] + zeta_i.real
            sz_sum += sz_i.sum(axis=0)
            sz_sq += (sz_i**2).sum(axis=0)
            sy_sq += (zeta_i.imag**2).sum(axis=0)
    if track_err:
        m = detuning.size
        sz_var = sz_sq / m - (sz_sum / m) ** 2
        sy_var = sy_sq / m - zeta_sum.imag**2
        sz2_err = np.sqrt(np.maximum(sz_var, 0.0) / m)
        sy2_err = np.sqrt(np.maximum(sy_var, 0.0) / m)
    else:
        sz2_err = sy2_err = None
    return RabiEnvelope(t=t, f=f_sum, zeta=zeta_sum, sz2_err=sz2_err, sy2_err=sy2_err)


def rough_lineshape(delta_tilde: float, qp: QubitParams, lambda_var: float) -> float:
    """Lorentzian estimate of <f> vs detuning from the observed maximum."""
    return 1.0 - qp.omega_rabi**2 / (delta_tilde**2 + lambda_var + qp.omega_rabi**2)


def short_time_rate(bath, qp: QubitParams, method: str = "exact",
                    samples: int = 10000, seed=0) -> float:
    """Quadratic decay rate of the renormalized oscillation envelope.

    gamma = Omega^2/(1-<f>) * sqrt(<1/w^2> - <1/w>^2) with w the effective
    rotation frequency; diverges (rejected) for a frozen bath.
    """
    detuning, weights = bath_law(bath, qp, method=method, samples=samples, seed=seed)
    w2 = detuning**2 + qp.omega_rabi**2
    f_mean = float(np.dot(weights, detuning**2 / w2))
    one_minus_f = 1.0 - f_mean
    if one_minus_f <= 1e-15:
        raise ValueError("frozen bath: 1 - <f> = 0, short-time rate undefined")
    inv2 = float(np.dot(weights, 1.0 / w2))
    inv1 = float(np.dot(weights, 1.0 / np.sqrt(w2)))
    var = max(inv2 - inv1 * inv1, 0.0)
    return qp.omega_rabi**2 / one_minus_f * math.sqrt(var)


def damped_rabi(bath, qp: QubitParams, t_grid, initial: str = "up",
                method: str = "continuum", samples: int = 10000, seed=0,
                chunk: int = 4096) -> BlochTrajectory:
    """Bloch evolution with Markovian damping, averaged over the bath law.

    Per eigenvalue the affine system dS/dt = M S + u (rotation plus decay
    toward the ground state) is solved in closed form through the
    eigendecomposition of M; no integrator bias.  initial 'up' starts at
    S_z = +1/2, 'down' at -1/2.
    """
    t = np.asarray(t_grid, dtype=float)
    detuning, weights = bath_law(bath, qp, method=method, samples=samples, seed=seed)
    s0 = np.array([0.0, 0.0, 0.5 if initial == "up" else -0.5])
    u = np.array([0.0, 0.0, -0.5 * qp.gamma1])
    out = np.zeros((t.size, 3))
    for lo in range(0, detuning.size, chunk):
        d = detuning[lo:lo + chunk]
        w = weights[lo:lo + chunk]
        k = d.size
        m_mat = np.zeros((k, 3, 3))
        m_mat[:, 0, 1] = -d
        m_mat[:, 1, 0] = d
        m_mat[:, 1, 2] = -qp.omega_rabi
        m_mat[:, 2, 1] = qp.omega_rabi
        m_mat[:, 0, 0] = m_mat[:, 1, 1] = -qp.gamma2
        m_mat[:, 2, 2] = -qp.gamma1
        if qp.gamma1 > 0:
            s_inf = np.linalg.solve(m_mat, np.broadcast_to(-u, (k, 3))[..., None])[..., 0]
        else:
            s_inf = np.zeros((k, 3))
        evals, vecs = np.linalg.eig(m_mat)
        c = np.linalg.solve(vecs, (s0 - s_inf)[..., None].astype(complex))[..., 0]
        phases = np.exp(np.multiply.outer(t, evals))  # (T, k, 3)
        s_t = np.einsum("kij,kj,tkj->tki", vecs, c, phases).real + s_inf
        out += np.einsum("tki,k->ti", s_t, w)
    return BlochTrajectory(t=t, s=out)


def damped_lineshape(bath, qp: QubitParams, method: str = "exact",
                     samples: int = 10000, seed=0) -> float:
    """Steady-state lineshape with Markovian damping, Lorentzian closed form."""
    if qp.gamma2 <= 0:
        raise ValueError("damped lineshape needs gamma2 > 0")
    detuning, weights = bath_law(bath, qp, method=method, samples=samples, seed=seed)
    g = qp.gamma2
    val = 1.0 - float(np.dot(weights, qp.omega_rabi * g /
                             ((0.5 * g) ** 2 + detuning**2 + qp.omega_rabi**2)))
    if not 0.0 <= val <= 1.0:
        warnings.warn(f"damped lineshape {val:.4g} outside [0, 1]; the closed "
                      "form is uncontrolled at this drive strength", stacklevel=2)
    return val


def magnus_envelope(noise: NoiseModel, lam: float, omega_rabi: float,
                    t_grid, tau_points: int = 4000) -> MagnusEnvelope:
    """Oscillation envelope from quadratic (A_z^2) noise, Magnus picture.

    For frozen noise the exact Gaussian average of the accumulated S_y
    rotation gives the 1/sqrt(t) tail |1 + 4i lam^2 v t / Omega|^{-1/2}.
    For decorrelating noise the perturbative exponent
    (4 lam^4 / Omega^2) int S_{A^2} sin^2(wt/2)/(w/2)^2 dw is evaluated in
    the equivalent time-domain form 4 int_0^t (t - tau) C(tau)^2 dtau with
    C the A_z autocovariance (Gaussian statistics).
    """
    t = np.asarray(t_grid, dtype=float)
    v = noise.variance
    small = lam**4 * v**2 / max(omega_rabi, 1e-300) ** 4
    valid = small <= 0.1
    reason = "" if valid else f"lam^4 <A^2>^2 / Omega^4 = {small:.3g} > 0.1"
    if v == 0:
        return MagnusEnvelope(t=t, values=np.ones_like(t), valid=valid, reason=reason)
    if noise.kind == "static" or (noise.kind == "ou" and noise.gamma_c == 0):
        x = 4.0 * lam**2 * v * t / omega_rabi
        values = (1.0 + x * x) ** -0.25
        return MagnusEnvelope(t=t, values=values, valid=valid, reason=reason)
    t_max = float(t.max())
    tau = np.linspace(0.0, t_max, tau_points)
    c2 = noise.autocovariance(tau) ** 2
    # cumulative int (t - tau) C^2 dtau = t * I0(t) - I1(t)
    i0 = np.concatenate([[0.0], np.cumsum(0.5 * (c2[1:] + c2[:-1]) * np.diff(tau))])
    i1 = np.concatenate([[0.0], np.cumsum(0.5 * (tau[1:] * c2[1:] + tau[:-1] * c2[:-1])
                                          * np.diff(tau))])
    i0_t = np.interp(t, tau, i0)
    i1_t = np.interp(t, tau, i1)
    exponent = (4.0 * lam**4 / omega_rabi**2) * 4.0 * (t * i0_t - i1_t)
    return MagnusEnvelope(t=t, values=np.exp(-exponent), valid=valid, reason=reason)


def trajectory_rabi_mc(noise: NoiseModel, qp: QubitParams, t_grid, samples: int,
                       seed, lam: float = 1.0, dt: float | None = None,
                       chunk: int = 2048) -> BlochTrajectory:
    """Monte-Carlo Bloch evolution under a time-dependent detuning.

    Each sample draws an A_z(t) path (static or OU) and integrates the
    damped Bloch equations with detuning lam * A_z(t) + delta by fixed-step
    RK4 (noise evaluated on the half-step grid).  Output times are snapped
    to the step grid; per-point standard errors are reported.
    """
    t = np.asarray(t_grid, dtype=float)
    t_max = float(t.max())
    if dt is None:
        spread = abs(qp.delta) + lam * (abs(noise.mean) + 4.0 * math.sqrt(noise.variance))
        omega_scale = math.hypot(qp.omega_rabi, spread)
        dt = 2.0 * math.pi / (64.0 * max(omega_scale, 1e-12))
    n_steps = max(1, int(math.ceil(t_max / dt)))
    dt = t_max / n_steps
    out_idx = np.unique(np.clip(np.rint(t / dt).astype(np.intp), 0, n_steps))
    t_out = out_idx * dt
    s0 = np.array([0.0, 0.0, 0.5])

    sum_s = np.zeros((out_idx.size, 3))
    sum_sq = np.zeros((out_idx.size, 3))
    streams = np.random.SeedSequence(seed).spawn(math.ceil(samples / chunk))
    done = 0
    for ss in streams:
        n = min(chunk, samples - done)
        rng = np.random.default_rng(ss)
        paths = _ou_half_grid(noise, dt, n_steps, n, rng)
        detun = lam * paths + qp.delta
        s = _kernels.bloch_rk4_batch(detun, dt, qp.omega_rabi, qp.gamma1,
                                     qp.gamma2, s0, out_idx)
        sum_s += s.sum(axis=0)
        sum_sq += (s**2).sum(axis=0)
        done += n
    mean = sum_s / samples
    var = np.maximum(sum_sq / samples - mean**2, 0.0)
    return BlochTrajectory(t=t_out, s=mean, s_err=np.sqrt(var / samples))


def _ou_half_grid(noise: NoiseModel, dt: float, n_steps: int, n: int,
                  rng: np.random.Generator) -> np.ndarray:
    from .bath import ou_paths

    return ou_paths(noise, 0.5 * dt, 2 * n_steps + 1, n, rng)
