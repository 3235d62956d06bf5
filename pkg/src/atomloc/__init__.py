"""
atomloc: conditional position probability of a driven three-level
ladder atom in two orthogonal classical standing waves.

The package computes the normalized filter-function landscape W(u, v)
over the standing-wave cell, validates the closed-form solution against
an independent time-domain oracle, and classifies the localization
patterns (spikes, craters, lattices).  See the README for the CLI and
the preset catalogue.
"""

from .analysis import (Peak, PeakReport, classify_pattern, find_peaks,
                       quadrant_mass)
from .closedform import (EmittedAmplitude, ModalSolution, eigenrates,
                         emitted_amplitude, emitted_amplitude_paper_form,
                         modal_solution)
from .exports import (grid_from_csv, grid_from_json, grid_to_csv, grid_to_json,
                      load_grid, plot_script, render_heatmap)
from .gridengine import (FilterGrid, GridSpec, compute_grid, omega_profile,
                         transform_compare)
from .model import (EmissionQuery, InitialState, StandingWaveField,
                    SystemParams, ValidationReport, Violation, rabi_at,
                    validate)
from .oracle import (AmplitudeTrace, IntegrationConfig, NonConvergenceError,
                     emitted_amplitude_numeric, emitted_amplitudes_batch,
                     emitted_amplitudes_multi, integrate_amplitudes)
from .scenario import PRESETS, Scenario, ScenarioError, load_scenario
from .verify import oracle_deviation, sample_points

__version__ = "0.1.0"

__all__ = [
    "SystemParams", "StandingWaveField", "InitialState", "EmissionQuery",
    "Violation", "ValidationReport", "rabi_at", "validate",
    "ModalSolution", "EmittedAmplitude", "eigenrates", "modal_solution",
    "emitted_amplitude", "emitted_amplitude_paper_form",
    "IntegrationConfig", "AmplitudeTrace", "NonConvergenceError",
    "integrate_amplitudes", "emitted_amplitude_numeric",
    "emitted_amplitudes_batch", "emitted_amplitudes_multi",
    "GridSpec", "FilterGrid", "compute_grid", "transform_compare",
    "omega_profile",
    "Peak", "PeakReport", "find_peaks", "classify_pattern", "quadrant_mass",
    "PRESETS", "Scenario", "ScenarioError", "load_scenario",
    "grid_to_csv", "grid_from_csv", "grid_to_json", "grid_from_json",
    "load_grid", "render_heatmap", "plot_script",
    "oracle_deviation", "sample_points",
    "__version__",
]
