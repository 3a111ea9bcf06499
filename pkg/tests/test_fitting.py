import math

import numpy as np
import pytest

import mesobath as mb
from mesobath.fitting import REFERENCE_PARAMS


def test_prep_efficiency_values():
    assert mb.prep_efficiency(0.0, 1.0) == 0.0
    assert abs(mb.prep_efficiency(1.0, 1.0) - math.tanh(1.0)) < 1e-15
    assert abs(mb.prep_efficiency(0.10, 0.40) - math.tanh(0.5)) < 1e-12
    with pytest.raises(ValueError):
        mb.prep_efficiency(0.1, 0.0)


def test_prep_efficiency_monotonicity():
    oms = np.linspace(0.1, 2.0, 20)
    vals = [mb.prep_efficiency(0.3, o) for o in oms]
    assert all(a > b for a, b in zip(vals, vals[1:]))
    gams = np.linspace(0.0, 2.0, 20)
    vals = [mb.prep_efficiency(g, 0.5) for g in gams]
    assert all(a < b for a, b in zip(vals, vals[1:]))


def test_model_signal_perfect_measurement_identity():
    # M_uu = M_dd = 1 with near-unit preparation: P1 = 1/2 - S_z(down)
    params = mb.FitParams(1.0, 1.0, 1e6, 0.0)
    qp = mb.QubitParams(omega_rabi=1.0)
    t = math.pi
    p1 = mb.model_signal(params, qp, None, t)
    assert abs(p1 - 1.0) < 1e-9
    assert abs(mb.model_signal(params, qp, None, 0.0)) < 1e-9


def test_model_signal_bounded():
    rng = np.random.default_rng(4)
    for _ in range(50):
        params = mb.FitParams(rng.random(), rng.random(), rng.random(), 0.5 * rng.random())
        qp = mb.QubitParams(omega_rabi=float(rng.uniform(0.05, 1.0)))
        p1 = mb.model_signal(params, qp, None, float(rng.uniform(0, 50)))
        assert -1e-12 <= p1 <= 1.0 + 1e-12


def test_model_signal_dos_width_checked():
    params = mb.FitParams(0.8, 0.9, 0.1, 0.3)
    dos = mb.DensityOfStates.gaussian(0.0, 0.5)
    with pytest.raises(ValueError):
        mb.model_signal(params, mb.QubitParams(omega_rabi=0.5), dos, 10.0)


def test_dataset_validation():
    with pytest.raises(ValueError):
        mb.RabiDataset(25.0, [(0.0, 0.5, 0.01)])
    with pytest.raises(ValueError):
        mb.RabiDataset(25.0, [(0.5, 1.5, 0.01)])
    with pytest.raises(ValueError):
        mb.RabiDataset(25.0, [(0.5, 0.5, 0.0)])


def test_fit_noise_free_recovery():
    truth = mb.FitParams(0.75, 0.95, 0.10, 0.27)
    omega = np.linspace(0.05, 1.0, 20)
    p1 = [mb.model_signal(truth, mb.QubitParams(omega_rabi=o), None, 25.0)
          for o in omega]
    data = mb.RabiDataset(25.0, list(zip(omega, p1, [0.01] * 20)))
    res = mb.fit(data, mb.FitParams(0.7, 0.9, 0.08, 0.22))
    assert res.residual < 1e-10
    for name in ("m_uu", "m_dd", "gamma_heat", "lam"):
        assert abs(getattr(res.params, name) - getattr(truth, name)) < 1e-6


def test_fit_requires_enough_span():
    omega = np.linspace(0.2, 0.5, 10)
    data = mb.RabiDataset(25.0, [(o, 0.5, 0.01) for o in omega])
    with pytest.raises(ValueError):
        mb.fit(data, mb.FitParams(0.8, 0.9, 0.1, 0.2))


def test_fit_flags_parameter_at_bound():
    truth = mb.FitParams(0.75, 1.00, 0.10, 0.27)
    omega = np.linspace(0.05, 1.0, 20)
    p1 = [mb.model_signal(truth, mb.QubitParams(omega_rabi=o), None, 25.0)
          for o in omega]
    data = mb.RabiDataset(25.0, list(zip(omega, p1, [0.01] * 20)))
    res = mb.fit(data, mb.FitParams(0.7, 0.97, 0.08, 0.22))
    assert "at_bound:m_dd" in res.flags


def test_fit_order_invariant():
    truth = mb.FitParams(0.75, 0.95, 0.10, 0.27)
    omega = np.linspace(0.05, 1.0, 20)
    rng = np.random.default_rng(1)
    p1 = np.clip([mb.model_signal(truth, mb.QubitParams(omega_rabi=o), None, 25.0)
                  for o in omega] + 0.01 * rng.standard_normal(20), 0, 1)
    pts = list(zip(omega, p1, [0.01] * 20))
    a = mb.fit(mb.RabiDataset(25.0, pts), mb.FitParams(0.7, 0.9, 0.08, 0.22))
    b = mb.fit(mb.RabiDataset(25.0, pts[::-1]), mb.FitParams(0.7, 0.9, 0.08, 0.22))
    for name in ("m_uu", "m_dd", "gamma_heat", "lam"):
        assert abs(getattr(a.params, name) - getattr(b.params, name)) < 1e-8


def test_presets():
    p = mb.presets("gaas_qd", n=100000)
    assert abs(p["lam"] - 0.6546) < 1e-4
    assert abs(mb.presets("gaas_qd", n=1)["lam"] - 207.0) < 1e-12
    mart = mb.presets("martinis")
    assert mart["params"] == {k: v[0] for k, v in REFERENCE_PARAMS.items()}
    assert "omega_rabi" in mb.presets("dqd")
    with pytest.raises(ValueError):
        mb.presets("unknown")
    with pytest.raises(ValueError):
        mb.presets("gaas_qd")
