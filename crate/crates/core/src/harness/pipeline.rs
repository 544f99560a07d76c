use super::{expected_rate, fit_rate, FarFieldReference, RateExpectation};
use crate::background::Background;
use crate::config::{make_sphere_grid, validate_regime, AsymptoticRegime, RunConfig, SphereGrid, VolumeGrid, Wavenumber};
use crate::equivalent::{build_equivalent_potential, solve_equivalent, ShapeFactor};
use crate::foldy::{invertibility_check, simulate, InvertibilityReport, SimulateOutput};
use crate::geometry::{partition_domain_with, place_holes, CellPartition, ScattererSet};
use crate::{Error, FarField, Result};
use serde::{Deserialize, Serialize};
use std::time::Instant;

/// Shape factor of the configured reference body, `P₀ = P` on Ω.
pub fn shape_factor(cfg: &RunConfig) -> ShapeFactor {
    ShapeFactor::Uniform { p: cfg.body.mean_shape_factor() }
}

/// Default volume-grid spacing for a sweep reaching `a_min`: half the cell side.
pub fn default_h(regime: &AsymptoticRegime, a_min: f64) -> f64 {
    0.5 * a_min.powf(regime.s / 3.0)
}

pub fn equivalent_h(cfg: &RunConfig, a_min: f64) -> f64 {
    cfg.solver.grid_h.unwrap_or_else(|| default_h(&cfg.regime, a_min))
}

pub fn background_h(cfg: &RunConfig, a_min: f64) -> f64 {
    cfg.solver.background_h.unwrap_or_else(|| equivalent_h(cfg, a_min))
}

pub fn wavenumber(cfg: &RunConfig) -> Result<Wavenumber> {
    Wavenumber::new(cfg.kappa, cfg.regime.kappa_max)
}

pub fn sphere(cfg: &RunConfig) -> Result<SphereGrid> {
    make_sphere_grid(cfg.sphere_order)
}

/// Background for the configured medium; `None` spacing uses the default rule at `cfg.regime.a`.
pub fn build_background(cfg: &RunConfig, h: Option<f64>) -> Result<Background> {
    let h = h.unwrap_or_else(|| background_h(cfg, cfg.regime.a));
    Background::new(&cfg.medium, wavenumber(cfg)?, h, &cfg.solver)
}

/// Background for a run reaching `a_min`, with its spacing; vacuum media need no grid.
pub fn background_for(cfg: &RunConfig, a_min: f64) -> Result<(Background, Option<f64>)> {
    if cfg.medium.is_vacuum() {
        return Ok((Background::vacuum(wavenumber(cfg)?), None));
    }
    let h = background_h(cfg, a_min);
    Ok((build_background(cfg, Some(h))?, Some(h)))
}

/// Regime check turning violations into a configuration error.
pub fn check_regime(regime: &AsymptoticRegime) -> Result<()> {
    let v = validate_regime(regime);
    if v.is_empty() {
        Ok(())
    } else {
        let msgs: Vec<String> = v.iter().map(ToString::to_string).collect();
        Err(Error::Config(format!("regime: {}", msgs.join("; "))))
    }
}

pub struct Placement {
    pub partition: CellPartition,
    pub set: ScattererSet,
}

pub fn place(cfg: &RunConfig) -> Result<Placement> {
    check_regime(&cfg.regime)?;
    let partition = partition_domain_with(&cfg.medium, &cfg.regime, cfg.partition, cfg.partition_samples)?;
    let set = place_holes(&partition, &cfg.regime, &cfg.medium, &cfg.body, cfg.kappa, cfg.seed)?;
    Ok(Placement { partition, set })
}

pub struct SimulateRun {
    pub set: ScattererSet,
    pub output: SimulateOutput,
    pub invertibility: InvertibilityReport,
}

/// Foldy-Lax far field at `cfg.regime.a`.
pub fn run_simulate(cfg: &RunConfig, background: &Background, sphere: &SphereGrid) -> Result<SimulateRun> {
    let Placement { set, .. } = place(cfg)?;
    let invertibility = invertibility_check(&set, &cfg.regime);
    let output = simulate(&set, background, sphere)?;
    Ok(SimulateRun { set, output, invertibility })
}

#[derive(Clone, Debug, Serialize)]
pub struct EquivalentRun {
    pub h: f64,
    pub cells: usize,
    pub backend: &'static str,
    #[serde(skip)]
    pub far_field: FarField,
    /// `sup |direct − reciprocity|` when both routes were evaluated.
    pub reciprocity_gap: Option<f64>,
}

/// `U₀^∞` of the equivalent medium on a fitted grid of spacing at most `h`.
pub fn run_equivalent(cfg: &RunConfig, h: f64, sphere: &SphereGrid, reciprocity: bool) -> Result<EquivalentRun> {
    let kappa = wavenumber(cfg)?;
    let grid = VolumeGrid::fitted(&cfg.medium.domain, h)?;
    let pot = build_equivalent_potential(&cfg.medium, &shape_factor(cfg), kappa, &grid)?;
    let cells = grid.n_flagged();
    let sol = solve_equivalent(&pot, sphere, &cfg.solver, reciprocity)?;
    let reciprocity_gap = match &sol.far_field_reciprocity {
        Some(r) => Some(sol.far_field.sup_diff(r)?),
        None => None,
    };
    Ok(EquivalentRun { h: grid.h, cells, backend: sol.backend, far_field: sol.far_field, reciprocity_gap })
}

/// One row of a sweep.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConvergenceRow {
    pub a: f64,
    /// Hole count.
    pub m: usize,
    /// Minimum pairwise centre distance.
    pub d: Option<f64>,
    /// `sup_{x̂,θ} |U∞ − reference|`.
    pub sup_err: Option<f64>,
    /// `sup_{x̂,θ} |U∞|`.
    pub sup_far: Option<f64>,
    pub invertible: Option<bool>,
    /// `"ok"` or the reason the row failed.
    pub status: String,
}

impl ConvergenceRow {
    pub fn is_ok(&self) -> bool {
        self.status == "ok"
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct RuntimeStats {
    pub total_secs: f64,
    pub reference_secs: f64,
    pub row_secs: Vec<f64>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ConvergenceReport {
    /// Sorted by decreasing `a`.
    pub rows: Vec<ConvergenceRow>,
    pub slope: Option<f64>,
    pub expected: RateExpectation,
    pub reference: FarFieldReference,
    /// `sup |reference|`.
    pub reference_sup: f64,
    pub equivalent_h: Option<f64>,
    pub background_h: Option<f64>,
    pub regime: AsymptoticRegime,
    pub runtime: RuntimeStats,
}

impl ConvergenceReport {
    /// Rows as canonical JSON, the part that must be reproducible.
    pub fn rows_json(&self) -> String {
        serde_json::to_string(&self.rows).expect("rows serialise")
    }
}

/// Sorted copy of `a_list`, rejecting short, non-positive or repeated lists.
pub fn sweep_list(a_list: &[f64]) -> Result<Vec<f64>> {
    if a_list.len() < 3 {
        return Err(Error::Config(format!("a sweep needs at least 3 values of a, got {}", a_list.len())));
    }
    let mut a = a_list.to_vec();
    if a.iter().any(|&x| !(x > 0.0) || !x.is_finite()) {
        return Err(Error::Config("a values must be positive".into()));
    }
    a.sort_by(|x, y| y.total_cmp(x));
    if a.windows(2).any(|w| w[0] == w[1]) {
        return Err(Error::Config("a values must be distinct".into()));
    }
    Ok(a)
}

/// Per-row outputs handed to a sink during a sweep.
pub struct RowArtifacts<'a> {
    pub a: f64,
    pub set: &'a ScattererSet,
    pub far_field: &'a FarField,
}

pub fn run_convergence(cfg: &RunConfig, a_list: &[f64]) -> Result<ConvergenceReport> {
    run_convergence_with(cfg, a_list, |_| Ok(()))
}

/// Sweep over `a`, comparing the Foldy-Lax far field with the reference.
///
/// Stage failures are recorded in the row; only configuration problems and
/// reference failures abort the sweep.
pub fn run_convergence_with(
    cfg: &RunConfig,
    a_list: &[f64],
    mut sink: impl FnMut(RowArtifacts<'_>) -> Result<()>,
) -> Result<ConvergenceReport> {
    let start = Instant::now();
    let a_sorted = sweep_list(a_list)?;
    let a_min = *a_sorted.last().expect("non-empty");
    let base = cfg.with_a(a_min);
    check_regime(&base.regime)?;
    let expected = expected_rate(&base.regime, cfg.medium.gamma);
    let sph = sphere(cfg)?;
    let (bg, bg_h) = background_for(cfg, a_min)?;

    let t_ref = Instant::now();
    let (reference, equivalent_h) = match cfg.reference {
        FarFieldReference::Equivalent => {
            let h = equivalent_h(cfg, a_min);
            let run = run_equivalent(cfg, h, &sph, false)?;
            log::info!("equivalent medium: {} cells, h = {:.4e}, {} backend", run.cells, run.h, run.backend);
            (run.far_field, Some(run.h))
        }
        FarFieldReference::Background => (bg.plane_waves(&sph.directions)?.far_field(&sph.directions), None),
    };
    let reference_secs = t_ref.elapsed().as_secs_f64();

    let mut rows = Vec::with_capacity(a_sorted.len());
    let mut row_secs = Vec::with_capacity(a_sorted.len());
    for &a in &a_sorted {
        let t = Instant::now();
        let c = cfg.with_a(a);
        let mut row = ConvergenceRow { a, m: 0, d: None, sup_err: None, sup_far: None, invertible: None, status: String::new() };
        match place(&c) {
            Err(e) => row.status = e.to_string(),
            Ok(p) => {
                row.m = p.set.len();
                row.d = p.set.min_distance;
                row.invertible = Some(invertibility_check(&p.set, &c.regime).pass);
                match simulate(&p.set, &bg, &sph) {
                    Err(e) => row.status = e.to_string(),
                    Ok(out) => {
                        row.sup_err = Some(out.far_field.sup_diff(&reference)?);
                        row.sup_far = Some(out.far_field.sup_norm());
                        row.status = "ok".into();
                        sink(RowArtifacts { a, set: &p.set, far_field: &out.far_field })?;
                    }
                }
            }
        }
        log::info!("a = {a}: M = {}, status {}", row.m, row.status);
        rows.push(row);
        row_secs.push(t.elapsed().as_secs_f64());
    }
    let pairs: Vec<(f64, f64)> = rows.iter().filter_map(|r| r.sup_err.map(|e| (r.a, e))).collect();
    let slope = match fit_rate(&pairs) {
        Ok(s) => Some(s),
        Err(e) => {
            log::warn!("no slope: {e}");
            None
        }
    };
    Ok(ConvergenceReport {
        rows,
        slope,
        expected,
        reference: cfg.reference,
        reference_sup: reference.sup_norm(),
        equivalent_h,
        background_h: bg_h,
        regime: base.regime,
        runtime: RuntimeStats { total_secs: start.elapsed().as_secs_f64(), reference_secs, row_secs },
    })
}
