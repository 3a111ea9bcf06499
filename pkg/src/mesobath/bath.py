"""Statistics of a mesoscopic bath of N spin-1/2 systems coupled to a qubit.

The bath couples through the collective operator A_z = sum_k alpha_k I_z^k,
with the couplings normalized so that sum alpha_k^2 = 1.  This module holds
the bath description itself: thermal sampling, the exact eigenvalue
distribution of A_z, its cumulants, the Gaussian continuum density of states
used in the large-N limit, slow (Ornstein-Uhlenbeck) decorrelation of A_z,
and the variance bookkeeping for cooled / dark-state bath preparations.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

# sum(alpha^2) must equal 1 to this absolute tolerance everywhere.
NORM_TOL = 1e-12

# 2^24 eigenvalue configurations is the largest exact enumeration we allow.
MAX_EXACT_N = 24


def _rng(seed) -> np.random.Generator:
    return np.random.default_rng(seed)


@dataclass(frozen=True)
class BathSpec:
    """Static description of the bath: couplings, polarization, strength.

    ``polarization[k]`` is the thermal expectation <2 I_z^k> of spin k, in
    [-1, 1].  ``lam`` is the overall bath coupling strength in ns^-1.
    """

    n: int
    alpha: np.ndarray
    polarization: np.ndarray
    lam: float

    def __post_init__(self):
        alpha = np.asarray(self.alpha, dtype=float)
        pol = np.asarray(self.polarization, dtype=float)
        if pol.ndim == 0:
            pol = np.full(self.n, float(pol))
        object.__setattr__(self, "alpha", alpha)
        object.__setattr__(self, "polarization", pol)
        if self.n < 1:
            raise ValueError("bath needs at least one spin")
        if alpha.shape != (self.n,):
            raise ValueError(f"alpha must have length n={self.n}")
        if pol.shape != (self.n,):
            raise ValueError(f"polarization must have length n={self.n}")
        norm = float(np.sum(alpha**2))
        if abs(norm - 1.0) > 1e-9:
            raise ValueError(f"sum(alpha^2) = {norm!r}, expected 1")
        if np.any(np.abs(pol) > 1.0 + 1e-12):
            raise ValueError("polarization entries must lie in [-1, 1]")
        if self.lam < 0:
            raise ValueError("bath strength lam must be >= 0")

    @property
    def homogeneous(self) -> bool:
        return bool(np.allclose(self.alpha, self.alpha[0], rtol=0, atol=1e-13))

    @classmethod
    def uniform(cls, n: int, polarization: float = 0.0, lam: float = 1.0) -> "BathSpec":
        """Homogeneous couplings alpha_k = 1/sqrt(N), uniform polarization."""
        return cls(n, np.full(n, 1.0 / math.sqrt(n)), np.full(n, polarization), lam)

    def to_dict(self) -> dict:
        return {
            "n": int(self.n),
            "alpha": [float(a) for a in self.alpha],
            "polarization": [float(p) for p in self.polarization],
            "lambda": float(self.lam),
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True)

    @classmethod
    def from_dict(cls, d: dict) -> "BathSpec":
        return cls(
            n=int(d["n"]),
            alpha=np.asarray(d["alpha"], dtype=float),
            polarization=np.asarray(d["polarization"], dtype=float),
            lam=float(d["lambda"]),
        )

    @classmethod
    def from_json(cls, s: str) -> "BathSpec":
        return cls.from_dict(json.loads(s))


@dataclass(frozen=True)
class BathSample:
    """One drawn bath configuration: spins in {-1/2, +1/2} and A_z."""

    spins: np.ndarray
    az: float


@dataclass(frozen=True)
class AzDistribution:
    """Exact probability mass function of the A_z eigenvalues."""

    values: np.ndarray
    probs: np.ndarray

    def __post_init__(self):
        if np.any(np.diff(self.values) <= 0):
            raise ValueError("values must be strictly increasing")
        if np.any(self.probs < -1e-15):
            raise ValueError("probabilities must be non-negative")
        if abs(float(np.sum(self.probs)) - 1.0) > 1e-12:
            raise ValueError("probabilities must sum to 1")

    def mean(self) -> float:
        return float(np.dot(self.values, self.probs))

    def variance(self) -> float:
        m = self.mean()
        return float(np.dot((self.values - m) ** 2, self.probs))


class DensityOfStates:
    """Continuum density rho(Lambda) of the eigenvalues of lam * A_z.

    Either a Gaussian (mean, sigma) or a Gaussian-kernel mixture over
    tabulated (values, weights) with a fixed bandwidth.  Evaluable together
    with its second derivative, which enters the stationary-phase kernel
    timescale.
    """

    def __init__(self, mean, sigma, kind="gaussian", nodes=None, weights=None, bandwidth=None):
        self.mean = float(mean)
        self.sigma = float(sigma)
        self.kind = kind
        self.nodes = None if nodes is None else np.asarray(nodes, dtype=float)
        self.weights = None if weights is None else np.asarray(weights, dtype=float)
        self.bandwidth = None if bandwidth is None else float(bandwidth)
        if self.sigma <= 0:
            raise ValueError("density of states needs sigma > 0")
        if kind not in ("gaussian", "tabulated"):
            raise ValueError(f"unknown DOS kind {kind!r}")
        if kind == "tabulated" and (self.nodes is None or self.weights is None or not self.bandwidth):
            raise ValueError("tabulated DOS needs nodes, weights and a positive bandwidth")

    @classmethod
    def gaussian(cls, mean: float, sigma: float) -> "DensityOfStates":
        return cls(mean, sigma)

    @classmethod
    def tabulated(cls, values, weights, bandwidth: float) -> "DensityOfStates":
        values = np.asarray(values, dtype=float)
        weights = np.asarray(weights, dtype=float)
        weights = weights / weights.sum()
        mean = float(np.dot(values, weights))
        var = float(np.dot((values - mean) ** 2, weights)) + bandwidth**2
        return cls(mean, math.sqrt(var), kind="tabulated",
                   nodes=values, weights=weights, bandwidth=bandwidth)

    def pdf(self, x):
        x = np.asarray(x, dtype=float)
        if self.kind == "gaussian":
            z = (x - self.mean) / self.sigma
            out = np.exp(-0.5 * z**2) / (math.sqrt(2 * math.pi) * self.sigma)
        else:
            z = (x[..., None] - self.nodes) / self.bandwidth
            k = np.exp(-0.5 * z**2) / (math.sqrt(2 * math.pi) * self.bandwidth)
            out = k @ self.weights
        return out if out.ndim else float(out)

    def d2(self, x):
        """Second derivative of the density with respect to Lambda."""
        x = np.asarray(x, dtype=float)
        if self.kind == "gaussian":
            z = (x - self.mean) / self.sigma
            out = self.pdf(x) * (z**2 - 1.0) / self.sigma**2
        else:
            z = (x[..., None] - self.nodes) / self.bandwidth
            k = np.exp(-0.5 * z**2) / (math.sqrt(2 * math.pi) * self.bandwidth)
            out = (k * (z**2 - 1.0) / self.bandwidth**2) @ self.weights
        return out if out.ndim else float(out)


@dataclass(frozen=True)
class NoiseModel:
    """Correlation structure of A_z(t).

    kind 'static' freezes A_z per shot; 'ou' decorrelates it exponentially
    with cutoff gamma_c, i.e. a Lorentzian spectral function with total
    weight equal to the stationary variance; 'spectral' carries a tabulated
    S(omega) >= 0 on a symmetric frequency grid.
    """

    kind: str
    variance: float
    mean: float = 0.0
    gamma_c: float = 0.0
    s_omega: np.ndarray | None = None
    s_values: np.ndarray | None = None

    def __post_init__(self):
        if self.kind not in ("static", "ou", "spectral"):
            raise ValueError(f"unknown noise kind {self.kind!r}")
        if self.variance < 0:
            raise ValueError("variance must be >= 0")
        if self.kind == "ou" and self.gamma_c < 0:
            raise ValueError("ou cutoff gamma_c must be >= 0")
        if self.kind == "spectral":
            if self.s_omega is None or self.s_values is None:
                raise ValueError("spectral noise needs a tabulated S(omega)")
            if np.any(np.asarray(self.s_values) < 0):
                raise ValueError("S(omega) must be non-negative")

    def spectral_density(self, omega):
        """S(omega), normalized so integral S d(omega) = variance."""
        omega = np.asarray(omega, dtype=float)
        if self.kind == "ou":
            if self.gamma_c == 0:
                raise ValueError("gamma_c = 0 noise has a delta-function spectrum")
            g = self.gamma_c
            return self.variance * (g / math.pi) / (omega**2 + g**2)
        if self.kind == "spectral":
            return np.interp(omega, self.s_omega, self.s_values, left=0.0, right=0.0)
        raise ValueError("static noise has a delta-function spectrum")

    def autocovariance(self, tau):
        """<dA(t) dA(t+tau)> for the stationary process."""
        tau = np.asarray(tau, dtype=float)
        if self.kind == "static" or (self.kind == "ou" and self.gamma_c == 0):
            return self.variance * np.ones_like(tau)
        if self.kind == "ou":
            return self.variance * np.exp(-self.gamma_c * np.abs(tau))
        # tabulated: cos transform on the stored grid
        om, sv = self.s_omega, self.s_values
        return np.trapz(sv * np.cos(np.multiply.outer(tau, om)), om, axis=-1)


@dataclass(frozen=True)
class BathMoments:
    mean: float
    variance: float
    fourth_cumulant: float


def make_couplings(n: int, sigma_alpha: float, seed) -> np.ndarray:
    """Draw couplings 1/sqrt(N) + sigma_alpha * g_k, rescaled to unit norm."""
    if n < 1:
        raise ValueError("need at least one bath spin")
    if sigma_alpha < 0:
        raise ValueError("sigma_alpha must be >= 0")
    alpha = 1.0 / math.sqrt(n) + sigma_alpha * _rng(seed).standard_normal(n)
    return alpha / math.sqrt(np.sum(alpha**2))


def sample_bath(spec: BathSpec, seed) -> BathSample:
    """Draw one thermal product-state configuration of the bath."""
    p_up = 0.5 * (1.0 + spec.polarization)
    spins = np.where(_rng(seed).random(spec.n) < p_up, 0.5, -0.5)
    return BathSample(spins=spins, az=float(np.dot(spec.alpha, spins)))


def sample_az(spec: BathSpec, n_samples: int, seed) -> np.ndarray:
    """Vectorized draw of n_samples values of A_z (same law as sample_bath)."""
    p_up = 0.5 * (1.0 + spec.polarization)
    spins = np.where(_rng(seed).random((n_samples, spec.n)) < p_up, 0.5, -0.5)
    return spins @ spec.alpha


def _merge_close(values: np.ndarray, probs: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    order = np.argsort(values, kind="stable")
    v, p = values[order], probs[order]
    scale = max(1.0, float(np.abs(v[-1] - v[0])))
    new_group = np.empty(v.size, dtype=bool)
    new_group[0] = True
    np.greater(np.diff(v), 1e-12 * scale, out=new_group[1:])
    idx = np.flatnonzero(new_group)
    return v[idx], np.add.reduceat(p, idx)


def az_distribution(spec: BathSpec) -> AzDistribution:
    """Exact pmf of A_z: binomial for homogeneous baths, else enumeration.

    Inhomogeneous baths beyond 2^24 configurations are rejected; callers
    fall back to Monte Carlo sampling or the continuum density of states.
    """
    pol = spec.polarization
    if spec.homogeneous and np.allclose(pol, pol[0], rtol=0, atol=1e-13):
        from scipy.stats import binom

        n, a = spec.n, float(spec.alpha[0])
        k = np.arange(n + 1)
        values = (k - n / 2.0) * a
        probs = binom.pmf(k, n, 0.5 * (1.0 + pol[0]))
        keep = probs > 0
        return AzDistribution(values=values[keep], probs=probs[keep])
    if spec.n > MAX_EXACT_N:
        raise ValueError(
            f"exact enumeration limited to N <= {MAX_EXACT_N} for inhomogeneous "
            "couplings; use sampling or the continuum density of states"
        )
    values = np.zeros(1)
    probs = np.ones(1)
    for a, p in zip(spec.alpha, pol):
        p_up = 0.5 * (1.0 + p)
        values = np.concatenate([values - 0.5 * a, values + 0.5 * a])
        probs = np.concatenate([probs * (1.0 - p_up), probs * p_up])
        values, probs = _merge_close(values, probs)
    keep = probs > 0
    return AzDistribution(values=values[keep], probs=probs[keep])


def moments(spec: BathSpec) -> BathMoments:
    """Mean, variance and fourth cumulant of A_z from per-spin cumulants."""
    a, p = spec.alpha, spec.polarization
    p_up = 0.5 * (1.0 + p)
    dev_up = 0.5 * (1.0 - p)
    dev_dn = -0.5 * (1.0 + p)
    m2 = p_up * dev_up**2 + (1.0 - p_up) * dev_dn**2
    m4 = p_up * dev_up**4 + (1.0 - p_up) * dev_dn**4
    return BathMoments(
        mean=float(np.sum(a * p) / 2.0),
        variance=float(np.sum(a**2 * m2)),
        fourth_cumulant=float(np.sum(a**4 * (m4 - 3.0 * m2**2))),
    )


def continuum_dos(spec: BathSpec, offset: float = 0.0) -> DensityOfStates:
    """Gaussian continuum density of states of lam * A_z (plus offset)."""
    mom = moments(spec)
    if mom.variance <= 0:
        raise ValueError("frozen bath has a degenerate density of states")
    return DensityOfStates.gaussian(offset + spec.lam * mom.mean,
                                    spec.lam * math.sqrt(mom.variance))


def noise_trajectory(model: NoiseModel, dt: float, steps: int, seed) -> np.ndarray:
    """Sampled path of A_z(t) on a grid of `steps` points spaced dt.

    The OU branch uses the exact discrete-time update, so the lag-k
    autocorrelation is exp(-gamma_c * k * dt) with no step-size bias.
    """
    if dt <= 0:
        raise ValueError("dt must be > 0")
    if model.kind == "spectral":
        raise ValueError("trajectory synthesis is only defined for static and ou noise")
    rng = _rng(seed)
    sd = math.sqrt(model.variance)
    if model.kind == "static" or model.gamma_c == 0:
        return np.full(steps, model.mean + sd * rng.standard_normal())
    rho = math.exp(-model.gamma_c * dt)
    innov_sd = sd * math.sqrt(1.0 - rho * rho)
    g = rng.standard_normal(steps)
    x = np.empty(steps)
    x[0] = sd * g[0]
    for i in range(1, steps):
        x[i] = rho * x[i - 1] + innov_sd * g[i]
    return model.mean + x


def ou_paths(model: NoiseModel, dt: float, steps: int, n_paths: int,
             rng: np.random.Generator) -> np.ndarray:
    """(n_paths, steps) stationary OU (or static) paths, exact update."""
    sd = math.sqrt(model.variance)
    if model.kind == "spectral":
        raise ValueError("trajectory synthesis is only defined for static and ou noise")
    if model.kind == "static" or model.gamma_c == 0:
        x0 = sd * rng.standard_normal(n_paths)
        return model.mean + np.repeat(x0[:, None], steps, axis=1)
    rho = math.exp(-model.gamma_c * dt)
    innov_sd = sd * math.sqrt(1.0 - rho * rho)
    g = rng.standard_normal((n_paths, steps))
    x = np.empty((n_paths, steps))
    x[:, 0] = sd * g[:, 0]
    for i in range(1, steps):
        x[:, i] = rho * x[:, i - 1] + innov_sd * g[:, i]
    return model.mean + x


def cooling_improvement(polarization: float) -> float:
    """Dephasing-rate improvement factor after cooling to polarization P."""
    if not 0.0 <= polarization < 1.0:
        raise ValueError("polarization must lie in [0, 1)")
    return math.sqrt(1.0 / (1.0 - polarization))


def dark_state_transverse_variance(n: int) -> float:
    """Transverse quadrature <A_perp^2> after idealized dark-state cooling.

    Homogeneous couplings alpha = 1/sqrt(N) assumed.  The infinite-
    temperature ensemble is decomposed into total-spin-J sectors with
    multiplicity d(N, J); cooling drives each sector to its lowest-weight
    state, which retains a transverse quadrature (J/2)/N.
    """
    if n < 2 or n % 2:
        raise ValueError("even N >= 2 required (half-integer J excluded)")
    half = n // 2
    num = 0
    for j in range(half + 1):
        d = math.comb(n, half - j) - (math.comb(n, half - j - 1) if j < half else 0)
        num += d * (2 * j + 1) * j
    return num / (2 * n * (1 << n))
