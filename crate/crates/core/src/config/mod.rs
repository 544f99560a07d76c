//! Shared domain types: media, regimes, direction and volume grids, and the
//! flat-key run configuration.

mod domain;
mod field;
pub mod file;
mod grid;
mod medium;
mod regime;
mod sphere;

pub use domain::Domain;
pub use field::{SampledField, ScalarField};
pub use file::RunConfig;
pub use grid::VolumeGrid;
pub use medium::{Impedance, MediumSpec};
pub use regime::{cell_side_bound_holds, cell_side_bound_threshold, validate_regime, AsymptoticRegime, Violation};
pub use sphere::{make_sphere_grid, SphereGrid};

use crate::{Error, Result};
use serde::{Deserialize, Serialize};

/// A wavenumber in `[0, kappa_max]`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Wavenumber(f64);

impl Wavenumber {
    pub fn new(kappa: f64, kappa_max: f64) -> Result<Self> {
        if !(kappa >= 0.0) || !kappa.is_finite() {
            return Err(Error::Domain(format!("wavenumber {kappa} must be finite and >= 0")));
        }
        if kappa > kappa_max {
            return Err(Error::Domain(format!("wavenumber {kappa} exceeds kappa_max = {kappa_max}")));
        }
        Ok(Self(kappa))
    }

    /// Wavenumber without an upper bound, for oracles and tests.
    pub fn unbounded(kappa: f64) -> Result<Self> {
        Self::new(kappa, f64::INFINITY)
    }

    #[inline]
    pub fn value(self) -> f64 {
        self.0
    }
}
