"""Mean-field hard-core boson lattice dynamics: solitons, trains, breathers."""

from .errors import (CalibrationFailure, ConfigError, ConservationBreach,
                     FormatViolation, HardCoreViolation, HcbsolError,
                     InvalidState, IoFailure, NoCollisionDetected,
                     NonFinite, NonUniformInput, NoOscillationDetected,
                     ParamDomain, PeriodMismatch, SeparationTooSmall,
                     TrackerLost, WindingMismatch)
from .integrate import (ConservationTolerances, IntegratorConfig, Trajectory,
                        evolve, step)
from .model import (LatticeState, ModelParams, Observables, density_from_state,
                    energy, eom_rhs, observables, particle_number,
                    phase_dispersion, uniform_state)
from .solitons import (PhaseImprint, SolitonSpec, WidthResult, build_state,
                       density_profile, imprint_profile, phase_imprint,
                       phase_jump, phase_profile, signed_phase_jump,
                       sound_speed, soliton_width, train_profile, train_state)

__version__ = "0.1.0"
