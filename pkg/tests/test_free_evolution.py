import math

import numpy as np
import pytest
from scipy.integrate import quad

import mesobath as mb


def _random_spec(n, rng, lam=1.0):
    alpha = mb.make_couplings(n, 0.3 / math.sqrt(n), int(rng.integers(1 << 31)))
    pol = rng.uniform(-0.9, 0.9, n)
    return mb.BathSpec(n, alpha, pol, lam)


def test_fid_coherence_fully_polarized_keeps_magnitude():
    spec = mb.BathSpec.uniform(6, polarization=1.0, lam=1.0)
    t = np.linspace(0, 10, 50)
    assert np.allclose(np.abs(mb.fid_coherence(spec, 0.3, t)), 1.0, atol=1e-12)


def test_fid_coherence_initial_value_and_scalar():
    spec = mb.BathSpec.uniform(5, polarization=0.2, lam=1.5)
    assert mb.fid_coherence(spec, 0.0, 0.0) == 1.0 + 0.0j
    val = mb.fid_coherence(spec, 0.0, 0.7)
    assert isinstance(val, complex)


def test_fid_short_time_matches_product_formula():
    rng = np.random.default_rng(0)
    spec = _random_spec(12, rng)
    t = np.linspace(0, 0.08, 20)
    exact = np.abs(mb.fid_coherence(spec, 0.0, t)) ** 2
    approx = mb.fid_fidelity_short_time(spec, t)
    assert np.max(np.abs(exact - approx)) < 5e-6


def test_gamma_fid_gaussian_regime():
    spec = mb.BathSpec.uniform(400, polarization=0.0, lam=1.0)
    g = mb.gamma_fid(spec)
    t = np.linspace(0.05, 1.0, 60)
    model = np.exp(-((g * t) ** 2) / 8.0)
    assert np.max(np.abs(np.abs(mb.fid_coherence(spec, 0.0, t)) - model)) < 2e-3


def test_gamma_fid_polarization_dependence():
    high = mb.BathSpec.uniform(10, polarization=0.0, lam=1.0)
    low = mb.BathSpec.uniform(10, polarization=0.75, lam=1.0)
    ratio = mb.gamma_fid(high) / mb.gamma_fid(low)
    assert abs(ratio - 1.0 / math.sqrt(1.0 - 0.75**2)) < 1e-12


def test_fid_with_markov_rejects_drive():
    spec = mb.BathSpec.uniform(4, 0.0, 1.0)
    with pytest.raises(ValueError):
        mb.fid_with_markov(spec, mb.QubitParams(omega_rabi=1.0), 1.0)


def test_ramsey_probability_is_squared_coherence():
    spec = mb.BathSpec.uniform(8, polarization=0.1, lam=1.0)
    t = np.linspace(0, 4, 25)
    assert np.allclose(mb.ramsey_probability(spec, 0.2, t),
                       np.abs(mb.fid_coherence(spec, 0.2, t)) ** 2)


def test_spin_echo_equal_arms_is_unity():
    rng = np.random.default_rng(3)
    for _ in range(5):
        spec = _random_spec(int(rng.integers(2, 10)), rng)
        f = mb.spin_echo_fidelity(spec, mb.EchoSchedule(2.0, 2.0))
        assert abs(f.exact - 1.0) < 1e-12


def test_spin_echo_gaussian_companion_large_n():
    spec = mb.BathSpec.uniform(300, polarization=0.0, lam=1.0)
    f = mb.spin_echo_fidelity(spec, mb.EchoSchedule(2.0, 0.5))
    assert abs(f.exact - f.gaussian) < 1e-3


def test_echo_decorrelation_static_limit_refocuses():
    noise = mb.NoiseModel("ou", variance=1.0, gamma_c=0.0)
    qp = mb.QubitParams()
    assert mb.echo_with_decorrelation(noise, qp, 1.0, 3.0) == 1.0


def test_echo_decorrelation_small_cutoff_expansion():
    lam, v, gc, t = 1.0, 1.0, 1e-3, 2.0
    noise = mb.NoiseModel("ou", variance=v, gamma_c=gc)
    full = mb.echo_with_decorrelation(noise, mb.QubitParams(), lam, t)
    exponent = -math.log(2.0 * full - 1.0)
    lead = mb.echo_decay_small_cutoff(noise, lam, t)
    assert abs(exponent - lead) / lead < 0.05


def test_echo_decorrelation_markov_prefactor():
    noise = mb.NoiseModel("ou", variance=0.5, gamma_c=0.2)
    qp = mb.QubitParams(gamma2=0.3)
    a = mb.echo_with_decorrelation(noise, qp, 1.0, 1.5)
    b = mb.echo_with_decorrelation(noise, mb.QubitParams(), 1.0, 1.5)
    assert abs((a - 0.5) - (b - 0.5) * math.exp(-2 * 0.3 * 1.5)) < 1e-12


def test_echo_kernel_spectral_tabulated_matches_ou():
    gc, v = 0.3, 0.8
    om = np.linspace(-400, 400, 2000001)
    s = v * (gc / math.pi) / (om**2 + gc**2)
    tab = mb.NoiseModel("spectral", variance=v, s_omega=om, s_values=s)
    ou = mb.NoiseModel("ou", variance=v, gamma_c=gc)
    qp = mb.QubitParams()
    a = mb.echo_with_decorrelation(tab, qp, 1.0, 2.0)
    b = mb.echo_with_decorrelation(ou, qp, 1.0, 2.0)
    assert abs(a - b) < 1e-3


def test_sequential_correlator_against_monte_carlo():
    noise = mb.NoiseModel("ou", variance=1.0, gamma_c=0.02)
    lam, tau, dt = 1.0, 3.0, 5.0
    analytic = mb.sequential_correlator(noise, lam, tau, dt)
    est, se = mb.sequential_correlator_mc(noise, lam, tau, dt, 400000, 9)
    assert abs(est - analytic) < 5.0 * se


def test_sequential_correlator_decays_with_separation():
    noise = mb.NoiseModel("ou", variance=1.0, gamma_c=0.05)
    vals = [mb.sequential_correlator(noise, 1.0, 2.0, d) for d in (0.1, 1.0, 10.0)]
    assert vals[0] > vals[1] > vals[2]


def test_sequential_correlator_warns_when_not_quasistatic():
    noise = mb.NoiseModel("ou", variance=1.0, gamma_c=1.0)
    with pytest.warns(UserWarning):
        mb.sequential_correlator(noise, 1.0, 1.0, 0.5)


def test_phase_estimation_error():
    assert abs(mb.phase_estimation_error(2.0, 4.0, 25) - 0.1) < 1e-15
    with pytest.raises(ValueError):
        mb.phase_estimation_error(1.0, 0.0, 10)
    with pytest.raises(ValueError):
        mb.phase_estimation_error(1.0, 1.0, 0)
