"""Measurement model and parameter fitting for driven-qubit Rabi data.

The model describes a qubit read out by an imperfect binary detector
(M_uu = P(read up | up), M_dd = P(read down | down)) after imperfect thermal
preparation whose efficiency depends on the drive power through the heating
scale gamma_heat.  The underlying coherent signal is the bath-averaged Rabi
oscillation at resonance over a Gaussian detuning density of width lam.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np
from scipy.optimize import least_squares

from .bath import BathSpec, DensityOfStates
from .free_evolution import QubitParams

_GH_X, _GH_W = np.polynomial.hermite.hermgauss(200)
_GH_W = _GH_W / math.sqrt(math.pi)

# 90% two-sided normal quantile for the confidence intervals.
Z90 = 1.6448536269514722

PARAM_NAMES = ("m_uu", "m_dd", "gamma_heat", "lam")

# reference fit for the superconducting-qubit dataset: values and 90%
# confidence half-widths
REFERENCE_PARAMS = {"m_uu": (0.75, 0.04), "m_dd": (1.00, 0.03),
                    "gamma_heat": (0.10, 0.04), "lam": (0.27, 0.01)}


@dataclass(frozen=True)
class FitParams:
    """Measurement-model parameters (rates in ns^-1)."""

    m_uu: float
    m_dd: float
    gamma_heat: float
    lam: float

    def __post_init__(self):
        if not (0.0 <= self.m_uu <= 1.0 and 0.0 <= self.m_dd <= 1.0):
            raise ValueError("measurement probabilities must lie in [0, 1]")
        if self.gamma_heat < 0 or self.lam < 0:
            raise ValueError("gamma_heat and lam must be >= 0")

    def as_array(self) -> np.ndarray:
        return np.array([self.m_uu, self.m_dd, self.gamma_heat, self.lam])


@dataclass(frozen=True)
class RabiDataset:
    """P1 versus Rabi frequency at one fixed evolution time."""

    fixed_time: float
    points: Sequence[tuple[float, float, float]]

    def __post_init__(self):
        for om, p1, sigma in self.points:
            if om <= 0:
                raise ValueError("omega_rabi must be > 0 per point")
            if not 0.0 <= p1 <= 1.0:
                raise ValueError("p1 must lie in [0, 1]")
            if sigma <= 0:
                raise ValueError("sigma must be > 0")

    def arrays(self):
        a = np.asarray(self.points, dtype=float)
        return a[:, 0], a[:, 1], a[:, 2]


@dataclass(frozen=True)
class FitResult:
    params: FitParams
    ci90: dict
    residual: float
    n_iter: int
    flags: tuple[str, ...]


def prep_efficiency(gamma_heat: float, omega_rabi: float) -> float:
    """Preparation efficiency I = tanh(sqrt(gamma_heat / Omega)).

    Stronger driving heats the device, degrading the thermal initialization;
    I -> 1 for weak drive, I -> 0 for strong drive.
    """
    if omega_rabi <= 0:
        raise ValueError("prep_efficiency needs omega_rabi > 0")
    if gamma_heat < 0:
        raise ValueError("gamma_heat must be >= 0")
    return math.tanh(math.sqrt(gamma_heat / omega_rabi))


def _sz2_down(omega_rabi, lam: float, t: float):
    """2 S_z for a qubit started down, resonant drive, Gaussian detuning."""
    omega_rabi = np.asarray(omega_rabi, dtype=float)
    if lam == 0:
        return np.cos(omega_rabi * t)
    d = math.sqrt(2.0) * lam * _GH_X
    w2 = d[:, None] ** 2 + omega_rabi**2
    sig = d[:, None] ** 2 / w2 + (omega_rabi**2 / w2) * np.cos(np.sqrt(w2) * t)
    return _GH_W @ sig


def _p1_curve(x: np.ndarray, omega: np.ndarray, t: float) -> np.ndarray:
    m_uu, m_dd, gamma_heat, lam = x
    eff = np.tanh(np.sqrt(gamma_heat / omega))
    sz2 = _sz2_down(omega, lam, t)
    two_sz = (m_uu - m_dd) + eff * sz2 * (m_uu + m_dd - 1.0)
    return 0.5 - 0.5 * two_sz


def model_signal(params: FitParams, qp: QubitParams, dos: DensityOfStates | None,
                 t: float) -> float:
    """Measured P1 at time t: preparation, coherent signal, readout matrix.

    The coherent part is the resonant Rabi oscillation averaged over the
    Gaussian detuning density of width params.lam (dos, when given, must
    agree with that width).
    """
    if dos is not None and abs(dos.sigma - params.lam) > 1e-9 * max(1.0, params.lam):
        raise ValueError("dos width must equal params.lam")
    out = _p1_curve(params.as_array(), np.atleast_1d(float(qp.omega_rabi)), t)
    return float(out[0])


def fit(data: RabiDataset, initial: FitParams,
        bounds=((0.0, 0.0, 0.0, 0.0), (1.0, 1.0, np.inf, np.inf))) -> FitResult:
    """Weighted least squares of the measurement model over a Rabi sweep.

    Confidence intervals (90%) come from the local quadratic approximation
    of the chi^2 surface at the optimum.  Flags report non-convergence and
    parameters pinned at a bound.
    """
    omega, p1, sigma = data.arrays()
    if omega.size < 8:
        raise ValueError("need at least 8 data points")
    if omega.max() < 4.0 * omega.min():
        raise ValueError("data must span at least a factor of 4 in omega_rabi")
    t = data.fixed_time

    def residuals(x):
        return (_p1_curve(x, omega, t) - p1) / sigma

    res = least_squares(residuals, initial.as_array(), bounds=bounds,
                        xtol=1e-12, ftol=1e-12, gtol=1e-12, max_nfev=2000)
    flags = []
    if not res.success:
        flags.append("no_convergence")
    lo = np.asarray(bounds[0], dtype=float)
    hi = np.asarray(bounds[1], dtype=float)
    span = np.where(np.isfinite(hi - lo), hi - lo, 1.0)
    for name, val, b_lo, b_hi, sp in zip(PARAM_NAMES, res.x, lo, hi, span):
        if val - b_lo < 1e-8 * sp or b_hi - val < 1e-8 * sp:
            flags.append(f"at_bound:{name}")

    jtj = res.jac.T @ res.jac
    try:
        cov = np.linalg.inv(jtj)
        half = Z90 * np.sqrt(np.maximum(np.diag(cov), 0.0))
    except np.linalg.LinAlgError:
        half = np.full(4, np.inf)
        flags.append("singular_curvature")
    ci90 = {name: (float(v - h), float(v + h))
            for name, v, h in zip(PARAM_NAMES, res.x, half)}
    params = FitParams(m_uu=min(max(res.x[0], 0.0), 1.0),
                       m_dd=min(max(res.x[1], 0.0), 1.0),
                       gamma_heat=max(res.x[2], 0.0), lam=max(res.x[3], 0.0))
    return FitResult(params=params, ci90=ci90,
                     residual=float(np.sum(res.fun**2)), n_iter=int(res.nfev),
                     flags=tuple(flags))


def presets(name: str, n: int | None = None) -> dict:
    """Named parameter sets for the three physical platforms.

    'gaas_qd' is an electron spin in a GaAs quantum dot over N nuclear
    spins: lam = 207 / sqrt(N) ns^-1, homogeneous couplings.  'dqd' is the
    two-electron double-dot singlet-triplet qubit in the m_s = 0 subspace:
    the exchange J plays the role of the drive Omega and the effective bath
    operator is the field-gradient difference between the dots.  'martinis'
    is the reference superconducting-qubit fit.
    """
    if name == "gaas_qd":
        if n is None or n < 1:
            raise ValueError("gaas_qd preset needs the bath size N >= 1")
        lam = 207.0 / math.sqrt(n)
        return {"name": name, "n": int(n), "lam": lam,
                "bath": BathSpec.uniform(n, polarization=0.0, lam=lam).to_dict(),
                "note": "electron spin qubit, homogeneous hyperfine couplings"}
    if name == "dqd":
        return {"name": name, "omega_rabi": "J (exchange splitting)",
                "note": ("two-electron double dot, m_s = 0 subspace: J drives "
                         "singlet-triplet rotations and the difference of the "
                         "two dots' overhauser fields acts as the bath operator")}
    if name == "martinis":
        vals = {k: v[0] for k, v in REFERENCE_PARAMS.items()}
        ci = {k: v[1] for k, v in REFERENCE_PARAMS.items()}
        return {"name": name, "params": vals, "ci90_halfwidth": ci,
                "fixed_time": 25.0,
                "note": "reference superconducting-qubit measurement-model fit"}
    raise ValueError(f"unknown preset {name!r}")
