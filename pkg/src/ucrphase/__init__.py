"""Phase shifts for clock-rate universality tests with clocks and atom interferometers."""

__version__ = "0.1.0"

from .model import (DEFAULT_CONSTANTS, BUTTERFLY_TRANSITIONS, ISOTOPES, NO_PERTURBATION, Geometry,
                    InitialState, PerturbationSpec, PhysicalConstants, Pulse, PulseKind,
                    PulseSequence, Species, Transition, make_butterfly, make_custom,
                    make_mach_zehnder, make_ramsey, make_species)
from .trajectories import (branch_trajectory, closure_check, evaluate_trajectory, lambda_of,
                           time_delays)
from .quadrature import QuadratureError
from .phases import (PhaseBreakdown, Signal, TableRow, butterfly_phase_closed_form, clock_phase,
                     phase_quadrature, proper_time_deficit, signal, table_row, wavepacket_phase)
from .ucr import (BudgetReport, SensitivityInput, SpeciesPair, constraint_budget,
                  differential_butterfly, differential_fountain, normalize_epsilon,
                  shot_noise_sensitivity)
from .config import ConfigError, RunConfig, load_config, parse_config
