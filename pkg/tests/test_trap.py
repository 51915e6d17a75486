import math

import numpy as np
import pytest
from scipy import constants

from phonon_quench import (DetectionParams, TrapParams, derive_couplings, hopping, lamb_dicke,
                           mean_count_rate, onsite_interaction, photon_series, radial_frequency,
                           solid_angle_fraction, validity_report)
from phonon_quench.errors import DomainError, InputError
from phonon_quench.observables import ObservableSeries
from phonon_quench.trap import BA138_MASS, DerivedCouplings, overall_status, report_table


def test_radial_frequency():
    assert radial_frequency(15e6, 0.42) == pytest.approx(2.25e6, rel=0.02)
    assert radial_frequency(15e6, 0.42) == pytest.approx(0.42 * 15e6 / math.sqrt(8), rel=1e-15)
    assert radial_frequency(30e6, 0.21) == pytest.approx(radial_frequency(15e6, 0.42), rel=1e-15)
    assert radial_frequency(15e6, 1e-9) < 10
    for q in (0.0, 0.9, 1.2, -0.1):
        with pytest.raises(DomainError):
            radial_frequency(15e6, q)


def test_lamb_dicke():
    eta = lamb_dicke(300e-9, BA138_MASS, 2.25e6)
    # hand evaluation: k x0 with x0 = sqrt(hbar / (2 m w))
    x0 = math.sqrt(1.054571817e-34 / (2 * 137.905247 * 1.66053906660e-27 * 2 * math.pi * 2.25e6))
    assert eta == pytest.approx(2 * math.pi / 300e-9 * x0, rel=1e-8)
    assert eta ** 4 == pytest.approx(5.26e-5, rel=0.05)
    assert lamb_dicke(600e-9, BA138_MASS, 2.25e6) == pytest.approx(eta / 2)
    assert lamb_dicke(300e-9, BA138_MASS, 9e6) == pytest.approx(eta / 2)
    with pytest.raises(DomainError):
        lamb_dicke(0, BA138_MASS, 1e6)


def test_hopping():
    J = hopping(20e-6, BA138_MASS, 2.25e6)
    assert 400 <= J <= 800
    assert hopping(40e-6, BA138_MASS, 2.25e6) == pytest.approx(J / 8)
    assert hopping(20e-6, BA138_MASS, 4.5e6) == pytest.approx(J / 2)
    # quoted J = 0.55 kHz gives the quoted beta_x ~ 5e-4
    assert 2 * 550 / 2.25e6 == pytest.approx(5e-4, rel=0.1)


def test_onsite_interaction():
    U = onsite_interaction(2.25e6, 5.26e-5 ** 0.25, 0)
    assert U == pytest.approx(236.7, rel=1e-3)
    assert U == pytest.approx(235, rel=0.02)
    assert onsite_interaction(2.25e6, 5.26e-5 ** 0.25, 1) == pytest.approx(-U)
    strong = onsite_interaction(25 * 2.25e6, 5.26e-5 ** 0.25, 0)
    assert 550 / strong == pytest.approx(0.093, abs=0.001)
    with pytest.raises(DomainError):
        onsite_interaction(-1, 0.1, 0)


def test_scaling_laws():
    base = TrapParams()
    d0 = derive_couplings(base)
    assert d0.beta_x == 2 * d0.J / d0.omega_x
    assert d0.U > 0 and derive_couplings(TrapParams(delta_parity=1)).U == pytest.approx(-d0.U)
    # J ~ d^-3, U ~ F, so scaling d by s and F by s^-3 keeps J/U
    s = 1.3
    scaled = derive_couplings(TrapParams(ion_spacing_d=20e-6 * s, standing_wave_F=d0.F * s ** -3))
    assert scaled.ju == pytest.approx(d0.ju, rel=1e-12)
    # U ~ F omega_x^-2 at fixed F
    faster = derive_couplings(TrapParams(rf_drive_freq=30e6, standing_wave_F=d0.F))
    assert faster.U == pytest.approx(d0.U / 4, rel=1e-12)
    assert faster.eta_x == pytest.approx(d0.eta_x / math.sqrt(2), rel=1e-12)
    assert derive_couplings(base, hopping_hz=550).J == 550


def test_trap_params_validation():
    with pytest.raises(DomainError):
        TrapParams(stability_q=0.95)
    with pytest.raises(DomainError):
        TrapParams(delta_parity=2)
    with pytest.raises(DomainError):
        TrapParams(ion_spacing_d=-1)


def quoted_couplings(F_ratio=1.0):
    eta = 5.26e-5 ** 0.25
    F = F_ratio * 2.25e6
    return DerivedCouplings(omega_x=2.25e6, eta_x=eta, J=550.0,
                            U=onsite_interaction(F, eta, 0), beta_x=2 * 550 / 2.25e6, F=F)


def test_validity_report_quoted_setup():
    derived = DerivedCouplings(omega_x=2.25e6, eta_x=5.26e-5 ** 0.25, J=550.0, U=235.0,
                               beta_x=2 * 550 / 2.25e6, F=2.25e6)
    rep = {c.name: c for c in validity_report(derived, 75e3)}
    assert rep["couplings_vs_trap"].ratio == pytest.approx(2.44e-4, rel=0.01)
    assert rep["modulation_vs_trap"].ratio == pytest.approx(0.0333, rel=0.01)
    assert rep["couplings_vs_modulation"].ratio == pytest.approx(7.33e-3, rel=0.01)
    assert all(c.status == "pass" for c in rep.values())
    assert "omega_0 << omega_x" in report_table(list(rep.values()))


def test_validity_report_strong_standing_wave():
    derived = quoted_couplings(25.0)
    rep = {c.name: c for c in validity_report(derived, 75e3)}
    assert rep["standing_wave_vs_trap"].ratio == pytest.approx(0.18, abs=0.005)
    assert rep["standing_wave_vs_trap"].status == "marginal"


def test_validity_report_fail_and_monotonicity():
    derived = quoted_couplings()
    rep = {c.name: c for c in validity_report(derived, derived.omega_x)}
    assert rep["modulation_vs_trap"].status == "fail"
    assert overall_status(list(rep.values())) == "fail"
    prev = None
    for w0 in np.geomspace(1e3, 2e6, 12):
        r = {c.name: c.ratio for c in validity_report(derived, w0)}
        if prev is not None:
            assert r["couplings_vs_modulation"] <= prev["couplings_vs_modulation"]
            assert r["modulation_vs_trap"] >= prev["modulation_vs_trap"]
        prev = r


def test_solid_angle():
    assert solid_angle_fraction(0.4) == pytest.approx(0.0417424, rel=1e-5)
    assert solid_angle_fraction(0.4) == pytest.approx(0.04, rel=0.05)
    assert solid_angle_fraction(1e-6) == pytest.approx(0, abs=1e-12)
    assert solid_angle_fraction(1 - 1e-12) == pytest.approx(0.5, abs=1e-5)
    with pytest.raises(DomainError):
        solid_angle_fraction(1.0)


def test_mean_count_rate_hand_values():
    # 0.73 * 0.0417424 * (1 / 7.8e-9) * 0.5 * 0.1 / 2 by hand: 97,667 /s
    assert mean_count_rate(DetectionParams()) == pytest.approx(97667, rel=1e-4)
    # with the rounded solid angle 0.04: 93,590 /s
    assert mean_count_rate(DetectionParams(solid_angle=0.04)) == pytest.approx(93590, rel=1e-4)
    two_pi = DetectionParams(gamma_convention="two_pi_over_lifetime")
    assert mean_count_rate(two_pi) == pytest.approx(2 * math.pi * mean_count_rate(DetectionParams()))
    assert mean_count_rate(DetectionParams(optics_loss_Qo=1e-12)) == pytest.approx(0, abs=1e-5)
    with pytest.raises(DomainError):
        DetectionParams(optics_loss_Qo=0)


def test_photon_series():
    det = DetectionParams()
    R = mean_count_rate(det)
    zero = photon_series(ObservableSeries(3, [0, 1], [0, 0]), det)
    np.testing.assert_array_equal(zero.values, 0)
    one = photon_series(ObservableSeries(3, [0, 1], [1, 1]), det)
    np.testing.assert_allclose(one.values, R)
    sec = photon_series(ObservableSeries(3, [0.0, 20.0], [0.2, 0.2]), det, U_hz=235.0)
    assert sec.times[1] == pytest.approx(20 / (2 * math.pi * 235))
    with pytest.raises(InputError):
        photon_series(ObservableSeries(3, [0], [1.5]), det)
