"""Local-quench dynamics of the Bose-Hubbard model emulated by ion-chain phonons."""

__version__ = "0.1.0"

from .basis import BasisSector, FockState, enumerate_sector, rank, sector_dimension, unrank
from .dynamics import (EvolvedState, GroundState, SpectralDecomposition, evolve_krylov,
                       evolve_spectral, full_diagonalize, ground_state)
from .errors import (ConfigError, ConvergenceError, DimensionError, DomainError, InputError,
                     MembershipError, NumericalError, PhononQuenchError, RangeError, SizingError,
                     SpecError)
from .hamiltonian import HamiltonianSpec, SparseOperator, apply, build_hamiltonian
from .observables import (ObservableSeries, correlation, local_density, occupation_projection,
                          oscillation_amplitude, zero_phonon_series, zero_phonon_series_literal)
from .quench import (QuenchResult, QuenchSpec, crossover_curve, run_quench,
                     sweep_max_variation)
from .trap import (DerivedCouplings, DetectionParams, TrapParams, derive_couplings, hopping,
                   lamb_dicke, mean_count_rate, onsite_interaction, photon_series,
                   radial_frequency, solid_angle_fraction, validity_report)
