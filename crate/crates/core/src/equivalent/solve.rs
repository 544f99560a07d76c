use super::EquivalentPotential;
use crate::background::{plane_wave, Background, LsOperator, SolverOptions};
use crate::config::{SphereGrid, Wavenumber};
use crate::{Error, FarField, Result, C64};
use faer::Mat;

pub struct EquivalentSolution {
    /// `U₀^t` on the flagged cells, one column per incidence.
    pub fields: Mat<C64>,
    /// Far field from the total potential.
    pub far_field: FarField,
    /// Far field from `V_n^∞ + ∫ V_n^t(y, −x̂)(K+1)P₀λ₀ U₀^t dy`, when requested.
    pub far_field_reciprocity: Option<FarField>,
    pub backend: &'static str,
}

/// Solve for `U₀^t` at every sphere-grid incidence and form `U₀^∞`.
///
/// With `reciprocity`, the background is solved on the same grid and the
/// far field is also formed through the background total fields.
pub fn solve_equivalent(
    pot: &EquivalentPotential,
    sphere: &SphereGrid,
    opts: &SolverOptions,
    reciprocity: bool,
) -> Result<EquivalentSolution> {
    let kappa = Wavenumber::unbounded(pot.kappa)?;
    let grid = &pot.grid;
    let dirs = &sphere.directions;
    let op = LsOperator::new(grid, pot.total(), kappa, opts)?;
    let c = grid.flagged_centers();
    let inc = Mat::from_fn(c.len(), dirs.len(), |i, t| plane_wave(pot.kappa, dirs[t], c[i]));
    let fields = op.solve(&inc)?;
    let far_field = op.far_field(&fields, dirs);
    let far_field_reciprocity = if reciprocity {
        let bg = Background::from_operator(LsOperator::new(grid, pot.background.clone(), kappa, opts)?);
        let pw = bg.plane_waves(dirs)?;
        let v_far = pw.far_field(dirs);
        let v = match pw.grid_fields() {
            Some(v) => v.clone(),
            None => inc.clone(),
        };
        let h3 = grid.cell_volume();
        // Σ_j V(y_j, −x̂_i) q_h,j U₀(y_j, θ) h³
        let anti = Mat::from_fn(c.len(), dirs.len(), |j, i| v[(j, sphere.antipode(i))] * pot.holes[j] * h3);
        let s = anti.transpose() * &fields;
        Some(FarField::from_fn(dirs.len(), dirs.len(), |x, t| v_far.get(x, t) + s[(x, t)]))
    } else {
        None
    };
    if far_field.values().iter().any(|v| !v.re.is_finite() || !v.im.is_finite()) {
        return Err(Error::NoConvergence("equivalent far field is not finite".into()));
    }
    Ok(EquivalentSolution { fields, far_field, far_field_reciprocity, backend: op.backend_name() })
}
