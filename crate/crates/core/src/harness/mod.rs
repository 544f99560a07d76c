//! Convergence study, design runs, validation suite and output files.

mod design;
mod output;
mod pipeline;
mod rate;
mod validate;

pub use design::{run_design, DesignRun, DesignSummary, DESIGN_H};
pub use output::{a_tag, OutputDir, RunManifest};
pub use pipeline::{
    background_for, background_h, build_background, check_regime, default_h, equivalent_h, place, run_convergence,
    run_convergence_with, run_equivalent, run_simulate, shape_factor, sphere, sweep_list, wavenumber, ConvergenceReport,
    ConvergenceRow, EquivalentRun, Placement, RowArtifacts, RuntimeStats, SimulateRun,
};
pub use rate::{expected_rate, fit_rate, BindingTerm, RateExpectation};
pub use validate::{validation_suite, ValidationCheck};

use serde::{Deserialize, Serialize};

/// Far field compared against the Foldy-Lax result in a sweep.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FarFieldReference {
    /// `U₀^∞` of the equivalent medium.
    Equivalent,
    /// Bare background `V_n^∞`.
    Background,
}
