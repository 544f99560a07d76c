//! Homogenised equivalent medium and the design calculators built on it.

mod index;
mod potential;
mod solve;

pub use index::{
    cloak_coefficient, cloak_schedule, effective_index, effective_index_point, write_schedule_csv, EffectiveIndex,
    IndexConvention,
};
pub use potential::{build_equivalent_potential, EquivalentPotential, ShapeFactor};
pub use solve::{solve_equivalent, EquivalentSolution};
