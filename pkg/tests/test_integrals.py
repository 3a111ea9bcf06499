import math

import numpy as np
import pytest
from scipy.integrate import quad

import mesobath as mb


def test_rho_sym_branch_point_value():
    dos = mb.DensityOfStates.gaussian(0.2, 1.0)
    om = 2.0
    assert abs(mb.rho_sym(dos, -0.1, om, om) - 2.0 * dos.pdf(0.1)) < 1e-15
    with pytest.raises(ValueError):
        mb.rho_sym(dos, 0.0, om, 0.5 * om)


def test_rho_sym_symmetric_dos_even_in_offset():
    delta = 0.4
    dos = mb.DensityOfStates.gaussian(-delta, 1.3)
    om = 1.0
    w = np.array([1.5, 3.0])
    off = np.sqrt(w**2 - om**2)
    assert np.allclose(mb.rho_sym(dos, delta, om, w),
                       2.0 * dos.pdf(-delta + off))


def test_rho_sym_preserves_probability_mass():
    dos = mb.DensityOfStates.gaussian(0.3, 0.8)
    om, delta = 1.2, -0.1

    def integrand(x):
        # omega = om + x^2 substitution of the mass integral
        w = om + x * x
        return 2.0 * mb.rho_sym(dos, delta, om, w) * w / math.sqrt(2.0 * om + x * x)

    mass, _ = quad(integrand, 0.0, math.sqrt(abs(delta + dos.mean) + 12 * dos.sigma + om),
                   limit=400)
    assert abs(mass - 1.0) < 1e-6


def test_lineshape_bruteforce_limits():
    dos = mb.DensityOfStates.gaussian(0.0, 1.0)
    assert mb.lineshape_bruteforce(dos, 0.0, 0.0) == 1.0
    assert mb.lineshape_bruteforce(dos, 0.0, 200.0) < 1e-3


def test_lineshape_transformed_agrees_with_direct():
    for sigma, delta, om in [(1.0, 0.0, 0.5), (2.0, 0.7, 1.0), (0.5, -0.3, 2.0)]:
        dos = mb.DensityOfStates.gaussian(0.1, sigma)
        a = mb.lineshape_bruteforce(dos, delta, om)
        b = mb.lineshape_transformed(dos, delta, om)
        assert abs(a - b) < 1e-6


def test_lineshape_translation_invariance():
    om, c = 1.0, 0.8
    a = mb.lineshape_bruteforce(mb.DensityOfStates.gaussian(0.2, 1.1), 0.3, om)
    b = mb.lineshape_bruteforce(mb.DensityOfStates.gaussian(0.2 + c, 1.1), 0.3 - c, om)
    assert abs(a - b) < 1e-8
    za = mb.zeta_bruteforce(mb.DensityOfStates.gaussian(0.2, 1.1), 0.3, om, 4.0)
    zb = mb.zeta_bruteforce(mb.DensityOfStates.gaussian(0.2 + c, 1.1), 0.3 - c, om, 4.0)
    assert abs(za - zb) < 1e-8


def test_u_timescale_gaussian_center():
    om, sigma = 1.5, 2.0
    dos = mb.DensityOfStates.gaussian(-0.3, sigma)
    u = mb.u_timescale(dos, 0.3, om)
    assert abs(u - (5.0 / (4.0 * om) + om / sigma**2)) < 1e-12
    # flat-density limit
    wide = mb.DensityOfStates.gaussian(0.0, 1e6)
    assert abs(mb.u_timescale(wide, 0.0, om) - 5.0 / (4.0 * om)) < 1e-9


def test_u_timescale_rejects_vanishing_density():
    dos = mb.DensityOfStates.gaussian(0.0, 0.01)
    with pytest.raises(ValueError):
        mb.u_timescale(dos, 10.0, 1.0)


def test_lineshape_stationary_far_detuned():
    dos = mb.DensityOfStates.gaussian(0.0, 0.05)
    res = mb.lineshape_stationary(dos, 30.0, 1.0)
    assert res.valid and abs(res.value - 1.0) < 1e-12


def test_lineshape_stationary_invalid_when_u_negative():
    # in the tail of a narrow Gaussian rho'' > 0 dominates and u < 0
    dos = mb.DensityOfStates.gaussian(0.0, 0.2)
    res = mb.lineshape_stationary(dos, 1.0, 2.0)
    assert not res.valid and "u <= 0" in res.reason


def test_zeta_bruteforce_t0_identity():
    dos = mb.DensityOfStates.gaussian(0.1, 1.5)
    om, delta = 1.0, 0.2
    z0 = mb.zeta_bruteforce(dos, delta, om, 0.0)
    assert abs(z0.imag) < 1e-10
    assert abs(z0.real - (1.0 - mb.lineshape_bruteforce(dos, delta, om))) < 1e-8


def test_zeta_bruteforce_frozen_dos_limit():
    om, delta = 2.0, 0.4
    dos = mb.DensityOfStates.gaussian(-delta, 1e-5)
    t = 1.3
    assert abs(mb.zeta_bruteforce(dos, delta, om, t) - np.exp(-1j * om * t)) < 1e-6


def test_zeta_stationary_phase_and_timescales():
    dos = mb.DensityOfStates.gaussian(0.0, 3.0)
    om = 1.0
    res0 = mb.zeta_stationary(dos, 0.0, om, 0.0)
    assert res0.theta == 0.0 and abs(res0.tau - res0.u) < 1e-15
    res = mb.zeta_stationary(dos, 0.0, om, 1e9)
    assert abs(res.theta - math.pi / 4) < 1e-6


def test_zeta_stationary_half_magnitude_at_quadruple_time():
    dos = mb.DensityOfStates.gaussian(0.0, 4.0)
    om = 1.0
    t = 20.0 / om
    r = abs(mb.zeta_stationary(dos, 0.0, om, 4 * t).value) \
        / abs(mb.zeta_stationary(dos, 0.0, om, t).value)
    assert abs(r - 0.5) < 0.01
    # the same ratio holds for the brute-force integral
    rb = abs(mb.zeta_bruteforce(dos, 0.0, om, 4 * t)) \
        / abs(mb.zeta_bruteforce(dos, 0.0, om, t))
    assert abs(rb - 0.5) < 0.025


def test_zeta_stationary_invalid_cases():
    narrow = mb.DensityOfStates.gaussian(0.0, 0.2)
    res = mb.zeta_stationary(narrow, 1.0, 2.0, 5.0)
    assert not res.valid
    far = mb.DensityOfStates.gaussian(0.0, 0.05)
    res2 = mb.zeta_stationary(far, 30.0, 1.0, 5.0)
    assert not res2.valid and res2.value == 0.0
