"""Free (undriven) qubit evolution over the quasi-static bath.

Free induction decay, Ramsey fringes, spin echo, the Markov-damped FID,
correlations between sequential projective measurements, and the phase
estimation bound for tracking the frozen bath value.  All pulses here are
instantaneous and perfect; finite-strength driving lives in `driven`.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np
from scipy.integrate import quad

from .bath import BathSpec, NoiseModel, az_distribution, moments


@dataclass(frozen=True)
class QubitParams:
    """Detuning, Rabi frequency and Markovian decay rates (ns^-1).

    gamma2 is the transverse (coherence) decay rate; gamma1 the longitudinal
    one.  Pure radiative decay has gamma1 = 2 * gamma2, which is the default
    when gamma1 is not given.
    """

    delta: float = 0.0
    omega_rabi: float = 0.0
    gamma2: float = 0.0
    gamma1: float | None = None

    def __post_init__(self):
        if self.gamma1 is None:
            object.__setattr__(self, "gamma1", 2.0 * self.gamma2)
        if self.omega_rabi < 0 or self.gamma1 < 0 or self.gamma2 < 0:
            raise ValueError("omega_rabi, gamma1, gamma2 must be >= 0")


@dataclass(frozen=True)
class EchoSchedule:
    """Delays before and after the pi pulse."""

    t1: float
    t2: float

    def __post_init__(self):
        if self.t1 < 0 or self.t2 < 0:
            raise ValueError("echo delays must be >= 0")


@dataclass(frozen=True)
class EchoFidelity:
    exact: float
    gaussian: float


def fid_coherence(spec: BathSpec, delta: float, t):
    """Normalized coherence <S_+(t)>/<S_+(0)> under free evolution.

    Product over uncorrelated bath spins:
    e^{-i delta t} prod_k [cos(lam a_k t / 2) - i P_k sin(lam a_k t / 2)].
    """
    t = np.asarray(t, dtype=float)
    phase = 0.5 * spec.lam * np.multiply.outer(spec.alpha, t)
    factors = np.cos(phase) - 1j * spec.polarization.reshape((-1,) + (1,) * t.ndim) * np.sin(phase)
    out = np.exp(-1j * delta * t) * np.prod(factors, axis=0)
    return out if out.ndim else complex(out)


def fid_fidelity_short_time(spec: BathSpec, t):
    """Quadratic short-time expansion of F_FID = |coherence|^2.

    Valid for lam * t < 0.1; matches the product formula to O((lam t)^4).
    """
    t = np.asarray(t, dtype=float)
    c2 = float(np.sum(spec.alpha**2 * (1.0 - spec.polarization**2))) / 4.0
    out = 1.0 - (spec.lam * t) ** 2 * c2
    return out if out.ndim else float(out)


def gamma_fid(spec: BathSpec) -> float:
    """Gaussian dephasing rate lam * sqrt(sum a_k^2 (1 - P_k^2)).

    Equals 2 * lam * sqrt(variance(A_z)); the coherence magnitude decays as
    exp[-(gamma_fid * t)^2 / 8] in the large-N Gaussian regime.
    """
    return spec.lam * math.sqrt(float(np.sum(spec.alpha**2 * (1.0 - spec.polarization**2))))


def fid_with_markov(spec: BathSpec, qp: QubitParams, t):
    """FID coherence with Markovian transverse decay: exact factorization."""
    if qp.omega_rabi != 0:
        raise ValueError("fid_with_markov is a free-evolution result (Omega = 0)")
    t = np.asarray(t, dtype=float)
    out = fid_coherence(spec, qp.delta, t) * np.exp(-qp.gamma2 * t)
    return out if np.ndim(out) else complex(out)


def ramsey_probability(spec: BathSpec, delta: float, t):
    """Probability of recovering the initial state in a perfect Ramsey run."""
    out = np.abs(fid_coherence(spec, delta, t)) ** 2
    return out if np.ndim(out) else float(out)


def spin_echo_fidelity(spec: BathSpec, sched: EchoSchedule) -> EchoFidelity:
    """Echo fidelity <cos^2[lam A_z (t1 - t2) / 2]> for a quasi-static bath.

    `exact` averages over the exact eigenvalue distribution; `gaussian` is
    the large-N companion (1 + exp[-lam^2 var(A_z) dt^2 / 2]) / 2.
    """
    dt = sched.t1 - sched.t2
    dist = az_distribution(spec)
    exact = float(np.dot(np.cos(0.5 * spec.lam * dist.values * dt) ** 2, dist.probs))
    var = moments(spec).variance
    gauss = 0.5 * (1.0 + math.exp(-0.5 * spec.lam**2 * var * dt * dt))
    return EchoFidelity(exact=exact, gaussian=gauss)


def _echo_kernel_integral(noise: NoiseModel, t: float) -> float:
    """integral S(omega) sin^4(omega t / 2) / (omega / 2)^2 d omega."""
    if noise.kind == "static" or (noise.kind == "ou" and noise.gamma_c == 0):
        return 0.0  # delta-function spectrum: the echo refocuses it exactly
    if noise.kind == "spectral":
        om = noise.s_omega
        safe = np.where(om == 0, 1.0, 0.5 * om)
        kern = np.where(om == 0, 0.0, np.sin(0.5 * om * t) ** 4 / safe**2)
        return float(np.trapezoid(noise.s_values * kern, om))

    if t == 0:
        return 0.0

    def integrand(w):
        return noise.spectral_density(w) * math.sin(0.5 * w * t) ** 4 / (0.5 * w) ** 2

    # smooth even integrand; split at the Lorentzian cutoff and the
    # oscillation scale so quad converges on each piece
    g = noise.gamma_c
    pts = sorted({g, 10.0 * g, max(10.0 * g, 50.0 / max(t, 1e-12))})
    total, err = 0.0, 0.0
    lo = 0.0
    for hi in pts:
        v, e = quad(integrand, lo, hi, epsabs=1e-12, epsrel=1e-8, limit=400)
        total += v
        err += e
        lo = hi
    # oscillatory tail: sin^4(x) = 3/8 - cos(2x)/2 + cos(4x)/8, with the
    # cosine pieces handled by the dedicated Fourier-weight algorithm
    def envelope(w):
        return noise.spectral_density(w) * 4.0 / (w * w)

    v0, e0 = quad(envelope, lo, np.inf, epsabs=1e-12, epsrel=1e-8, limit=400)
    v1, e1 = quad(envelope, lo, np.inf, weight="cos", wvar=t, epsabs=1e-12, limit=400)
    v2, e2 = quad(envelope, lo, np.inf, weight="cos", wvar=2.0 * t, epsabs=1e-12,
                  limit=400)
    total += 0.375 * v0 - 0.5 * v1 + 0.125 * v2
    err += e0 + e1 + e2
    if err > 1e-6 * max(1.0, abs(total)):
        raise RuntimeError(f"echo kernel quadrature residual {err:.2e} too large")
    return 2.0 * total


def echo_with_decorrelation(noise: NoiseModel, qp: QubitParams, lam: float, t: float) -> float:
    """Equal-arm echo fidelity for a Gaussian bath with spectral function S."""
    integral = _echo_kernel_integral(noise, t)
    return 0.5 + 0.5 * math.exp(-2.0 * qp.gamma2 * t) * math.exp(-lam * lam * integral)


def echo_decay_small_cutoff(noise: NoiseModel, lam: float, t: float) -> float:
    """Leading small-cutoff (gamma_c * t << 1) echo decay exponent for OU noise.

    Expanding the Lorentzian kernel integral gives
    lam^2 * variance * gamma_c * t^3 / 3 to first order in gamma_c * t.
    """
    if noise.kind != "ou":
        raise ValueError("small-cutoff expansion defined for ou noise")
    return lam * lam * noise.variance * noise.gamma_c * t**3 / 3.0


def sequential_correlator(noise: NoiseModel, lam: float, tau: float, dt: float) -> float:
    """Covariance of two projective measurements separated by dt.

    Quasi-static per shot (gamma_c * tau << 1); measurement M = cos^2 of the
    accumulated phase over the interaction time tau.  Valid in the
    large-(lam tau)^2-variance limit, where the covariance reduces to
    (1/8) exp[-(lam tau)^2 (variance - C(dt))] with C the autocovariance.
    """
    if noise.kind == "ou" and noise.gamma_c * tau > 0.1:
        warnings.warn("gamma_c * tau > 0.1: quasi-static per-shot assumption is strained",
                      stacklevel=2)
    c = float(noise.autocovariance(dt))
    return 0.125 * math.exp(-((lam * tau) ** 2) * (noise.variance - c))


def sequential_correlator_mc(noise: NoiseModel, lam: float, tau: float, dt: float,
                             shots: int, seed) -> tuple[float, float]:
    """Monte-Carlo estimate (value, standard error) of the same covariance.

    Each shot draws a stationary pair (A_j, A_k) at lag dt from the noise
    process and simulates the two binary measurements.
    """
    rng = np.random.default_rng(seed)
    sd = math.sqrt(noise.variance)
    a_j = noise.mean + sd * rng.standard_normal(shots)
    if noise.kind == "ou" and noise.gamma_c > 0:
        rho = math.exp(-noise.gamma_c * dt)
    else:
        rho = 1.0
    a_k = noise.mean + rho * (a_j - noise.mean) \
        + sd * math.sqrt(1.0 - rho * rho) * rng.standard_normal(shots)
    p_j = np.cos(0.5 * lam * a_j * tau) ** 2
    p_k = np.cos(0.5 * lam * a_k * tau) ** 2
    m_j = (rng.random(shots) < p_j).astype(float)
    m_k = (rng.random(shots) < p_k).astype(float)
    prod = m_j * m_k
    mean_m = 0.5 * (m_j.mean() + m_k.mean())
    est = prod.mean() - mean_m**2
    se_prod = prod.std(ddof=1) / math.sqrt(shots)
    se_mean = 0.5 * (m_j.std(ddof=1) + m_k.std(ddof=1)) / math.sqrt(shots)
    se = math.hypot(se_prod, 2.0 * mean_m * se_mean)
    return float(est), float(se)


def phase_estimation_error(lam: float, omega_rabi: float, n: int) -> float:
    """Uncertainty of <A_z> after n projective probes: lam / (Omega sqrt(n))."""
    if omega_rabi <= 0:
        raise ValueError("phase estimation needs a nonzero Rabi frequency")
    if n < 1:
        raise ValueError("need at least one measurement")
    return lam / (omega_rabi * math.sqrt(n))
