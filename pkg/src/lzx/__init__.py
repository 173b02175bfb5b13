"""Dissipative Landau-Zener sweep simulator for tunable flux qubits.

Simulates a two-level flux qubit swept through its anticrossing in contact
with 1/f + ohmic flux noise, in three regimes: the analytic coherent limit,
a weak-coupling adiabatic master equation, and a strong-coupling
polaron-frame Redfield equation.
"""

from .ame import EigenFrame, SolverOptions, ame_rhs, eigenframe, evolve_ame, evolve_static, lindblad_set
from .coherent import evolve_schrodinger, p_lz, p_lz_schedule
from .config import ExperimentConfig, load_config
from .device import (
    OperatingPoint,
    SweepSchedule,
    default_operating_table,
    dimensionless_time,
    epsilon_at,
    hamiltonian_at,
    interpolate_operating_point,
    load_operating_table,
    sweep_velocity,
)
from .errors import ConfigError, NumericsError
from .gapfit import DecaySeries, GapFitResult, decay_to_gap, fit_exponential_adaptive, fit_gap
from .harness import RunRecord, emit_csv, read_csv, run_experiment
from .noise import (
    MrtParams,
    NoiseModel,
    amplitude_from_a_star,
    antisymmetrize,
    mrt_params_fdt,
    mrt_width,
    psd_ame,
    psd_ohmic,
    psd_one_over_f,
    reorganization_energy_integral,
    symmetrize,
)
from .plotting import emit_plot
from .ptre import PolaronSpectrum, evolve_ptre, g_high, g_low, polaron_psd
from .trajectory import EvolutionResult, write_trajectory_csv
from .units import CONSTANTS, UNITS, persistent_current_energy, thermal_energy

__version__ = "0.1.0"
