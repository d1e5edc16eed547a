"""Parametric amplification and squeezing in higher-order Hermite-Gauss modes."""

__version__ = "0.1.0"

from .basis import (ADAPTIVE_SIMPSON, GAUSS_HERMITE, BeamGeometry, HGMode, QuadratureSpec, hermite_poly,
                    integrate, mode_amplitude, mode_table)
from .detection import (DetectionChain, Estimate, SqueezingMeasurement, apply_loss, back_out_cavity_escape,
                        chain_efficiency, correct_electronic_noise, db_to_linear, efficiency_from_spectrum,
                        efficiency_from_variances, infer_source, linear_to_db, loss_budget)
from .errors import (ConfigError, CsvFormatError, DataError, DivergenceError, FitError,
                     InconsistentMeasurementError, NumericError, QuadratureError)
from .experiment import (ExperimentConfig, FitResult, GainCurve, Trace, dump_config, fit_threshold, load_config,
                         load_gain_csv, load_trace_csv, parse_config)
from .opa import (OpaParams, PhaseMatchSpec, classical_gain, escape_efficiency, phase_match_envelope, phase_scan,
                  relative_threshold, squeezing_variance)
from .overlap import (OverlapTable, PumpProfile, SeedMisalignment, alpha, gamma, misaligned_seed_decomposition,
                      optimal_pump, pump_coupling)
