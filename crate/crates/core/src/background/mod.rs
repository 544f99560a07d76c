//! Background-medium solver: free kernel, Lippmann-Schwinger volume
//! discretisation, variable-index Green's function and the Mie oracle.

pub mod bessel;
mod fft3;
mod kernel;
mod ls;
mod medium;
mod mie;

pub use kernel::{ball_integral, equal_volume_radius, free_green, plane_wave, self_weight};
pub use ls::{
    assemble_ls, far_field_background, solve_total_field, FieldOnGrid, LsOperator, SolverOptions, RESIDUAL_TOL,
    SIGN_CONVENTION,
};
pub use medium::{green_at, green_variable, h2_proxy_norm, Background, PlaneWaves};
pub use mie::{mie_ball_oracle, mie_coefficients, mie_coefficients_upto, mie_far_field, mie_far_field_truncated};
