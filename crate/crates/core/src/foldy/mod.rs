//! Foldy-Lax point-interaction system for many small holes.

mod invertibility;
mod system;

pub use invertibility::{invertibility_check, l2_bound_check, BoundCheck, ImpedanceSide, InvertibilityReport};
pub use system::{
    assemble_system, assemble_with_table, far_field_foldy, simulate, solve_charges, Charges, FoldySystem, SimulateOutput,
    MAX_HOLES,
};
