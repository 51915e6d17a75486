"""Ion-trap hardware -> Bose-Hubbard couplings, and fluorescence detection.

Frequencies are cycle frequencies in Hz unless a name says otherwise;
formulas that need angular frequencies convert internally.
"""
from __future__ import annotations

import math
from dataclasses import asdict, dataclass
from typing import List, Optional

import numpy as np
from scipy import constants

from .errors import DomainError, InputError
from .observables import ObservableSeries

BA138_MASS = 137.905247 * constants.atomic_mass
STABILITY_Q_MAX = 0.9

PASS_RATIO = 0.1
MARGINAL_RATIO = 0.25


@dataclass(frozen=True)
class TrapParams:
    rf_drive_freq: float = 15e6
    stability_q: float = 0.42
    axial_freq: float = 180e3          # recorded only; enters no formula
    ion_spacing_d: float = 20e-6
    ion_mass: float = BA138_MASS
    standing_wave_F: Optional[float] = None   # Hz; None means F = omega_x
    standing_wave_lambda: float = 300e-9
    delta_parity: int = 0
    quench_mod_freq: float = 75e3

    def __post_init__(self):
        for name in ("rf_drive_freq", "stability_q", "axial_freq", "ion_spacing_d", "ion_mass",
                     "standing_wave_lambda", "quench_mod_freq"):
            if not getattr(self, name) > 0:
                raise DomainError(f"{name} must be positive")
        if self.standing_wave_F is not None and not self.standing_wave_F > 0:
            raise DomainError("standing_wave_F must be positive")
        if self.stability_q >= STABILITY_Q_MAX:
            raise DomainError(f"stability_q={self.stability_q} outside the stable range q < {STABILITY_Q_MAX}")
        if self.delta_parity not in (0, 1):
            raise DomainError("delta_parity must be 0 or 1")


@dataclass(frozen=True)
class DerivedCouplings:
    omega_x: float
    eta_x: float
    J: float
    U: float
    beta_x: float
    F: float

    @property
    def ju(self) -> float:
        return self.J / self.U


@dataclass(frozen=True)
class DetectionParams:
    branching_f: float = 0.73
    numerical_aperture: float = 0.4
    p_lifetime_tau: float = 7.8e-9
    quantum_eff_Qe: float = 0.5
    optics_loss_Qo: float = 0.1
    # None: derive from the numerical aperture
    solid_angle: Optional[float] = None
    gamma_convention: str = "inverse_lifetime"

    def __post_init__(self):
        for name in ("branching_f", "quantum_eff_Qe", "optics_loss_Qo"):
            value = getattr(self, name)
            if not 0 < value <= 1:
                raise DomainError(f"{name}={value} must lie in (0, 1]")
        if not 0 < self.numerical_aperture < 1:
            raise DomainError("numerical aperture must lie in (0, 1)")
        if not self.p_lifetime_tau > 0:
            raise DomainError("p_lifetime_tau must be positive")
        if self.solid_angle is not None and not 0 < self.solid_angle <= 0.5:
            raise DomainError("solid_angle must lie in (0, 0.5]")
        if self.gamma_convention not in ("inverse_lifetime", "two_pi_over_lifetime"):
            raise DomainError(f"unknown gamma_convention {self.gamma_convention!r}")

    @property
    def gamma(self) -> float:
        if self.gamma_convention == "two_pi_over_lifetime":
            return 2 * math.pi / self.p_lifetime_tau
        return 1.0 / self.p_lifetime_tau

    @property
    def omega(self) -> float:
        if self.solid_angle is not None:
            return self.solid_angle
        return solid_angle_fraction(self.numerical_aperture)


def radial_frequency(rf_drive_freq: float, stability_q: float) -> float:
    """Lowest-order pseudopotential secular frequency ``q * Omega / (2 sqrt 2)``."""
    if not 0 < stability_q < STABILITY_Q_MAX:
        raise DomainError(f"stability parameter q={stability_q} outside (0, {STABILITY_Q_MAX})")
    if not rf_drive_freq > 0:
        raise DomainError("rf drive frequency must be positive")
    return stability_q * rf_drive_freq / (2.0 * math.sqrt(2.0))


def _positive(**kwargs):
    for name, value in kwargs.items():
        if not value > 0:
            raise DomainError(f"{name} must be positive, got {value}")


def lamb_dicke(wavelength: float, ion_mass: float, omega_x: float) -> float:
    _positive(wavelength=wavelength, ion_mass=ion_mass, omega_x=omega_x)
    k = 2 * math.pi / wavelength
    return k * math.sqrt(constants.hbar / (2 * ion_mass * 2 * math.pi * omega_x))


def hopping(ion_spacing_d: float, ion_mass: float, omega_x: float) -> float:
    """Coulomb-mediated transverse phonon hopping, in Hz."""
    _positive(ion_spacing_d=ion_spacing_d, ion_mass=ion_mass, omega_x=omega_x)
    coulomb = constants.e ** 2 / (4 * math.pi * constants.epsilon_0 * ion_spacing_d ** 3)
    j_angular = coulomb / (2 * ion_mass * 2 * math.pi * omega_x)
    return j_angular / (2 * math.pi)


def onsite_interaction(F: float, eta_x: float, delta_parity: int) -> float:
    """``U = 2 (-1)^delta F eta^4``, in the units of ``F``."""
    if not F > 0:
        raise DomainError("F must be positive")
    if delta_parity not in (0, 1):
        raise DomainError("delta_parity must be 0 or 1")
    return 2.0 * (-1) ** delta_parity * F * eta_x ** 4


def coulomb_trap_ratio(J: float, omega_x: float) -> float:
    return 2.0 * J / omega_x


def derive_couplings(trap: TrapParams, hopping_hz: Optional[float] = None) -> DerivedCouplings:
    """Derive all effective couplings from ``trap``.

    ``hopping_hz`` replaces the dipolar estimate of J with a measured value.
    """
    omega_x = radial_frequency(trap.rf_drive_freq, trap.stability_q)
    eta = lamb_dicke(trap.standing_wave_lambda, trap.ion_mass, omega_x)
    J = hopping(trap.ion_spacing_d, trap.ion_mass, omega_x) if hopping_hz is None else float(hopping_hz)
    F = omega_x if trap.standing_wave_F is None else trap.standing_wave_F
    U = onsite_interaction(F, eta, trap.delta_parity)
    return DerivedCouplings(omega_x=omega_x, eta_x=eta, J=J, U=U,
                            beta_x=coulomb_trap_ratio(J, omega_x), F=F)


@dataclass(frozen=True)
class ValidityCheck:
    name: str
    condition: str
    ratio: float
    status: str


def _status(ratio: float) -> str:
    if ratio <= PASS_RATIO:
        return "pass"
    if ratio <= MARGINAL_RATIO:
        return "marginal"
    return "fail"


def validity_report(derived: DerivedCouplings, omega_0: float, F: Optional[float] = None,
                    eta_x: Optional[float] = None) -> List[ValidityCheck]:
    """Ratios behind the number-conserving approximation.

    pass if ratio <= 0.1, marginal if <= 0.25, fail otherwise.
    """
    F = derived.F if F is None else F
    eta_x = derived.eta_x if eta_x is None else eta_x
    scale = max(abs(derived.J), abs(derived.U))
    checks = [
        ("couplings_vs_trap", "max(J,U) << omega_x", scale / derived.omega_x),
        ("modulation_vs_trap", "omega_0 << omega_x", omega_0 / derived.omega_x),
        ("couplings_vs_modulation", "max(J,U) << omega_0", scale / omega_0),
        ("standing_wave_vs_trap", "F eta_x^2 << omega_x", F * eta_x ** 2 / derived.omega_x),
    ]
    return [ValidityCheck(name, cond, float(r), _status(r)) for name, cond, r in checks]


def report_records(report: List[ValidityCheck]) -> List[dict]:
    return [asdict(c) for c in report]


def report_table(report: List[ValidityCheck]) -> str:
    width = max(len(c.condition) for c in report)
    lines = [f"{'condition':<{width}}  {'ratio':>12}  status"]
    for c in report:
        lines.append(f"{c.condition:<{width}}  {c.ratio:>12.4g}  {c.status}")
    return "\n".join(lines)


def overall_status(report: List[ValidityCheck]) -> str:
    statuses = {c.status for c in report}
    for s in ("fail", "marginal"):
        if s in statuses:
            return s
    return "pass"


def solid_angle_fraction(NA: float) -> float:
    """Fraction of the full solid angle collected by a lens of aperture ``NA``."""
    if not 0 < NA < 1:
        raise DomainError(f"numerical aperture {NA} outside (0, 1)")
    return 0.5 * (1.0 - math.sqrt(1.0 - NA ** 2))


def mean_count_rate(det: DetectionParams) -> float:
    """Detected photons per second from a fully shelving-free ion."""
    return det.branching_f * det.omega * det.gamma * det.quantum_eff_Qe * det.optics_loss_Qo / 2.0


def photon_series(n_series: ObservableSeries, det: DetectionParams,
                  U_hz: Optional[float] = None, slack: float = 1e-9) -> ObservableSeries:
    """Scale a zero-phonon series into count rates.

    ``n_series.times`` are taken as dimensionless ``t * U``; with ``U_hz``
    they are converted to seconds, ``t = (t U) / (2 pi |U|)``.
    """
    values = n_series.values
    if values.size and (values.min() < -slack or values.max() > 1 + slack):
        raise InputError("zero-phonon probabilities must lie in [0, 1]")
    times = n_series.times
    if U_hz is not None:
        if U_hz == 0:
            raise DomainError("U_hz must be nonzero")
        times = times / (2 * math.pi * abs(U_hz))
    return ObservableSeries(n_series.site, times, np.clip(values, 0.0, 1.0) * mean_count_rate(det))
