"""Qubit dephasing and driven dynamics over a mesoscopic spin bath.

Simulation and analysis toolkit for a two-level system coupled to a finite
bath of spin-1/2 systems (quasi-static on each shot), optionally with slow
bath decorrelation and a weak Markovian environment: free induction decay,
spin echo, driven (Rabi) oscillations, continuum lineshape integrals, and
a measurement-model fitter for experimental Rabi sweeps.
"""

from ._kernels import HAVE_COMPILED
from .bath import (
    AzDistribution,
    BathMoments,
    BathSample,
    BathSpec,
    DensityOfStates,
    NoiseModel,
    az_distribution,
    continuum_dos,
    cooling_improvement,
    dark_state_transverse_variance,
    make_couplings,
    moments,
    noise_trajectory,
    sample_az,
    sample_bath,
)
from .driven import (
    BlochTrajectory,
    MagnusEnvelope,
    RabiEnvelope,
    RotationFrame,
    damped_lineshape,
    damped_rabi,
    magnus_envelope,
    propagator,
    rabi_average,
    rotation_frame,
    rough_lineshape,
    short_time_rate,
    trajectory_rabi_mc,
    zeta_f_at_eigenvalue,
)
from .fitting import (
    FitParams,
    FitResult,
    RabiDataset,
    fit,
    model_signal,
    prep_efficiency,
    presets,
)
from .free_evolution import (
    EchoFidelity,
    EchoSchedule,
    QubitParams,
    echo_decay_small_cutoff,
    echo_with_decorrelation,
    fid_coherence,
    fid_fidelity_short_time,
    fid_with_markov,
    gamma_fid,
    phase_estimation_error,
    ramsey_probability,
    sequential_correlator,
    sequential_correlator_mc,
    spin_echo_fidelity,
)
from .integrals import (
    StationaryPhaseResult,
    lineshape_bruteforce,
    lineshape_stationary,
    lineshape_transformed,
    rho_sym,
    u_timescale,
    zeta_bruteforce,
    zeta_stationary,
)

__version__ = "0.1.0"

__all__ = [name for name in dir() if not name.startswith("_")]
