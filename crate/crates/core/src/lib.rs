//! Acoustic scattering by many small impedance holes embedded in a
//! heterogeneous medium.
//!
//! The crate is organised bottom-up:
//!
//! * [`config`] holds the medium description, asymptotic regime, grids and
//!   the flat-key run configuration.
//! * [`geometry`] partitions the domain and places the holes.
//! * [`background`] solves the hole-free medium with a Lippmann-Schwinger
//!   discretisation and tabulates its Green's function.
//! * [`foldy`] assembles and solves the Foldy-Lax charge system.
//! * [`equivalent`] builds the homogenised medium and its far field.
//! * [`harness`] runs convergence studies and writes reproducible outputs.

pub mod background;
pub mod config;
pub mod equivalent;
pub mod error;
pub mod far_field;
pub mod foldy;
pub mod geometry;
pub mod harness;
pub mod linalg;
pub mod point;

pub use error::{Error, Result};
pub use far_field::FarField;
pub use num_complex::Complex64 as C64;
pub use point::Point;
