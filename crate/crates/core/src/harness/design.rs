use super::pipeline::{place, shape_factor};
use crate::config::{RunConfig, ScalarField, VolumeGrid};
use crate::equivalent::{cloak_coefficient, cloak_schedule, effective_index, EffectiveIndex, IndexConvention};
use crate::geometry::ScattererSet;
use crate::point::Point;
use crate::{Result, C64};
use serde::Serialize;

/// Sampling spacing of design maps when `solver.grid_h` is unset.
pub const DESIGN_H: f64 = 0.1;

#[derive(Clone, Debug, Serialize)]
pub struct DesignSummary {
    pub convention: IndexConvention,
    pub lambda_tilde0: C64,
    pub points: usize,
    pub undefined: usize,
    pub passive: bool,
    pub negative_re: usize,
    pub positive_re: usize,
    pub holes: usize,
    /// Number of holes with `Re λ_m < 0` in the cloak schedule.
    pub schedule_negative: usize,
}

pub struct DesignRun {
    pub summary: DesignSummary,
    pub index: EffectiveIndex,
    pub points: Vec<Point>,
    pub cloak: Vec<C64>,
    pub set: ScattererSet,
    pub schedule: Vec<C64>,
}

/// Effective index for the configured λ̃₀, the cloak coefficient on the
/// same sample points and the per-hole cloak schedule at `cfg.regime.a`.
pub fn run_design(cfg: &RunConfig) -> Result<DesignRun> {
    let h = cfg.solver.grid_h.unwrap_or(DESIGN_H);
    let grid = VolumeGrid::fitted(&cfg.medium.domain, h)?;
    let points = grid.sample_points().to_vec();
    let p0 = shape_factor(cfg);
    let index = effective_index(&cfg.medium, &p0, &ScalarField::constant_c(cfg.lambda_tilde0), &points, cfg.convention);
    let cloak = cloak_coefficient(&cfg.medium, &p0, &points)?;
    let set = place(cfg)?.set;
    let schedule = cloak_schedule(&set, &cfg.medium, &p0, cfg.kappa)?;
    let signs = index.re_signs();
    let summary = DesignSummary {
        convention: cfg.convention,
        lambda_tilde0: cfg.lambda_tilde0,
        points: points.len(),
        undefined: index.undefined.len(),
        passive: index.passive,
        negative_re: signs.iter().filter(|&&s| s < 0).count(),
        positive_re: signs.iter().filter(|&&s| s > 0).count(),
        holes: set.len(),
        schedule_negative: schedule.iter().filter(|l| l.re < 0.0).count(),
    };
    Ok(DesignRun { summary, index, points, cloak, set, schedule })
}
