//! Lippmann-Schwinger volume operator `(I − V q)` on the flagged cells of a grid.

use super::fft3::Fft3;
use super::kernel::{phi, self_weight};
use crate::config::{VolumeGrid, Wavenumber};
use crate::linalg::{gmres, vec_norm, DenseLu};
use crate::point::{dist, dot, Point};
use crate::{Error, FarField, Result, C64};
use faer::Mat;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

/// The sign convention used by every volume solve.
pub const SIGN_CONVENTION: &str =
    "u(x) - ∫ Φ_κ(x,y) q(y) u(y) dy = u_inc(x), q = κ²(n²−1) (+ hole potential); \
     U∞(x̂) = ∫ e^{−iκx̂·y} q(y) u(y) dy, U^s ~ e^{iκ|x|}/(4π|x|) U∞";

/// Relative residual every solve must reach.
pub const RESIDUAL_TOL: f64 = 1e-10;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SolverOptions {
    /// Equivalent-medium grid spacing; `None` ties it to the smallest `a`.
    pub grid_h: Option<f64>,
    /// Background-medium grid spacing; `None` uses `grid_h`.
    pub background_h: Option<f64>,
    /// Largest unknown count factored densely; larger grids use FFT + GMRES.
    pub dense_cap: usize,
    pub gmres_tol: f64,
    pub gmres_restart: usize,
    pub gmres_max_iter: usize,
}

impl Default for SolverOptions {
    fn default() -> Self {
        Self { grid_h: None, background_h: None, dense_cap: 4096, gmres_tol: 1e-12, gmres_restart: 60, gmres_max_iter: 3000 }
    }
}

impl SolverOptions {
    pub fn validate(&self) -> Result<()> {
        for (k, v) in [("solver.grid_h", self.grid_h), ("solver.background_h", self.background_h)] {
            if let Some(h) = v {
                if !(h > 0.0) {
                    return Err(Error::Config(format!("key `{k}`: must be positive")));
                }
            }
        }
        if !(self.gmres_tol > 0.0 && self.gmres_tol <= RESIDUAL_TOL) {
            return Err(Error::Config(format!("key `solver.gmres_tol`: must lie in (0, {RESIDUAL_TOL:e}]")));
        }
        if self.gmres_restart == 0 || self.gmres_max_iter == 0 {
            return Err(Error::Config("GMRES restart and iteration limits must be positive".into()));
        }
        Ok(())
    }
}

/// Complex samples on the flagged cells of a grid.
#[derive(Clone, Debug, PartialEq)]
pub struct FieldOnGrid {
    pub values: Vec<C64>,
}

enum Backend {
    Identity,
    Dense { matrix: Mat<C64>, lu: DenseLu },
    Toeplitz { fft: Fft3, pdims: [usize; 3], khat: Vec<C64> },
}

pub struct LsOperator {
    grid: VolumeGrid,
    kappa: f64,
    q: Vec<C64>,
    self_w: C64,
    centers: Vec<Point>,
    backend: Backend,
    opts: SolverOptions,
}

impl std::fmt::Debug for LsOperator {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("LsOperator")
            .field("dims", &self.grid.dims)
            .field("unknowns", &self.q.len())
            .field("kappa", &self.kappa)
            .field("backend", &self.backend_name())
            .finish()
    }
}

/// Assemble and factor `(I − V q)` for potential samples `q` on the flagged cells.
pub fn assemble_ls(grid: &VolumeGrid, q: Vec<C64>, kappa: Wavenumber, opts: &SolverOptions) -> Result<LsOperator> {
    LsOperator::new(grid, q, kappa, opts)
}

impl LsOperator {
    pub fn new(grid: &VolumeGrid, q: Vec<C64>, kappa: Wavenumber, opts: &SolverOptions) -> Result<Self> {
        let n = grid.n_flagged();
        if q.len() != n {
            return Err(Error::Mismatch(format!("{} potential samples for {n} flagged cells", q.len())));
        }
        if q.iter().any(|v| !v.re.is_finite() || !v.im.is_finite()) {
            return Err(Error::Domain("potential samples must be finite".into()));
        }
        let kappa = kappa.value();
        let h = grid.h;
        let mut op = Self {
            grid: grid.clone(),
            kappa,
            q,
            self_w: self_weight(h, kappa),
            centers: grid.flagged_centers(),
            backend: Backend::Identity,
            opts: opts.clone(),
        };
        if op.q.iter().all(|v| *v == C64::new(0.0, 0.0)) {
            return Ok(op);
        }
        let table = op.offset_table();
        let d = grid.dims;
        let (sx, sy) = ((2 * d[1] - 1) * (2 * d[2] - 1), 2 * d[2] - 1);
        let lookup = |a: [usize; 3], b: [usize; 3]| {
            let o = |t: usize| a[t] + d[t] - 1 - b[t];
            table[o(0) * sx + o(1) * sy + o(2)]
        };
        if n <= opts.dense_cap {
            let ijk: Vec<[usize; 3]> = grid.flagged().iter().map(|&c| grid.unravel(c)).collect();
            let matrix = Mat::from_fn(n, n, |i, j| {
                let v = -lookup(ijk[i], ijk[j]) * op.q[j];
                if i == j {
                    v + 1.0
                } else {
                    v
                }
            });
            let lu = DenseLu::factor(&matrix).map_err(|e| {
                Error::Singular(format!(
                    "{e}; the discrete volume operator may sit at a resonance, perturb the grid spacing or κ"
                ))
            })?;
            op.backend = Backend::Dense { matrix, lu };
        } else {
            let pdims = [2 * d[0], 2 * d[1], 2 * d[2]];
            let fft = Fft3::new(pdims);
            let mut khat = vec![C64::new(0.0, 0.0); fft.len()];
            for i in 0..2 * d[0] - 1 {
                for j in 0..2 * d[1] - 1 {
                    for k in 0..2 * d[2] - 1 {
                        let w = table[i * sx + j * sy + k];
                        let wrap = |o: usize, t: usize| {
                            let off = o as i64 - (d[t] as i64 - 1);
                            if off >= 0 {
                                off as usize
                            } else {
                                (pdims[t] as i64 + off) as usize
                            }
                        };
                        khat[(wrap(i, 0) * pdims[1] + wrap(j, 1)) * pdims[2] + wrap(k, 2)] = w;
                    }
                }
            }
            fft.forward(&mut khat);
            op.backend = Backend::Toeplitz { fft, pdims, khat };
        }
        Ok(op)
    }

    /// Kernel weights for every lattice offset in `(−d, d)` per axis.
    fn offset_table(&self) -> Vec<C64> {
        let d = self.grid.dims;
        let (ex, ey, ez) = (2 * d[0] - 1, 2 * d[1] - 1, 2 * d[2] - 1);
        let h = self.grid.h;
        let (kappa, sw) = (self.kappa, self.self_w);
        (0..ex * ey * ez)
            .into_par_iter()
            .map(|idx| {
                let k = idx % ez;
                let j = (idx / ez) % ey;
                let i = idx / (ey * ez);
                let o = [
                    i as f64 - (d[0] as f64 - 1.0),
                    j as f64 - (d[1] as f64 - 1.0),
                    k as f64 - (d[2] as f64 - 1.0),
                ];
                let r = (o[0] * o[0] + o[1] * o[1] + o[2] * o[2]).sqrt() * h;
                if r == 0.0 {
                    sw
                } else {
                    phi(r, kappa) * (h * h * h)
                }
            })
            .collect()
    }

    pub fn grid(&self) -> &VolumeGrid {
        &self.grid
    }

    pub fn kappa(&self) -> f64 {
        self.kappa
    }

    pub fn potential(&self) -> &[C64] {
        &self.q
    }

    pub fn centers(&self) -> &[Point] {
        &self.centers
    }

    pub fn len(&self) -> usize {
        self.q.len()
    }

    pub fn is_empty(&self) -> bool {
        self.q.is_empty()
    }

    pub fn self_weight(&self) -> C64 {
        self.self_w
    }

    pub fn is_identity(&self) -> bool {
        matches!(self.backend, Backend::Identity)
    }

    pub fn backend_name(&self) -> &'static str {
        match self.backend {
            Backend::Identity => "identity",
            Backend::Dense { .. } => "dense-lu",
            Backend::Toeplitz { .. } => "fft-gmres",
        }
    }

    /// Pivot ratio of the dense factorisation, if any.
    pub fn pivot_ratio(&self) -> Option<f64> {
        match &self.backend {
            Backend::Dense { lu, .. } => Some(lu.pivot_ratio()),
            _ => None,
        }
    }

    /// `y = (I − V q) x`.
    pub fn apply(&self, x: &[C64], y: &mut [C64]) {
        match &self.backend {
            Backend::Identity => y.copy_from_slice(x),
            Backend::Dense { matrix, .. } => {
                let n = x.len();
                for (i, yi) in y.iter_mut().enumerate() {
                    let mut s = C64::new(0.0, 0.0);
                    for j in 0..n {
                        s += matrix[(i, j)] * x[j];
                    }
                    *yi = s;
                }
            }
            Backend::Toeplitz { fft, pdims, khat } => {
                let mut buf = vec![C64::new(0.0, 0.0); fft.len()];
                let pidx: Vec<usize> = self
                    .grid
                    .flagged()
                    .iter()
                    .map(|&c| {
                        let [i, j, k] = self.grid.unravel(c);
                        (i * pdims[1] + j) * pdims[2] + k
                    })
                    .collect();
                for (f, &p) in pidx.iter().enumerate() {
                    buf[p] = self.q[f] * x[f];
                }
                fft.forward(&mut buf);
                for (b, k) in buf.iter_mut().zip(khat) {
                    *b *= k;
                }
                fft.inverse(&mut buf);
                let s = 1.0 / fft.len() as f64;
                for (f, &p) in pidx.iter().enumerate() {
                    y[f] = x[f] - buf[p] * s;
                }
            }
        }
    }

    fn residual(&self, x: &[C64], b: &[C64]) -> f64 {
        let mut ax = vec![C64::new(0.0, 0.0); x.len()];
        self.apply(x, &mut ax);
        let r: Vec<C64> = ax.iter().zip(b).map(|(a, b)| a - b).collect();
        let bn = vec_norm(b);
        if bn == 0.0 {
            vec_norm(&r)
        } else {
            vec_norm(&r) / bn
        }
    }

    /// Solve `(I − V q) X = B` column by column; every column must reach
    /// [`RESIDUAL_TOL`].
    pub fn solve(&self, rhs: &Mat<C64>) -> Result<Mat<C64>> {
        let n = self.len();
        if rhs.nrows() != n {
            return Err(Error::Mismatch(format!("right-hand side has {} rows, operator {n}", rhs.nrows())));
        }
        match &self.backend {
            Backend::Identity => Ok(rhs.clone()),
            Backend::Dense { matrix, lu } => {
                let mut x = lu.solve(rhs);
                let mut r = rhs - matrix * &x;
                let norms = |m: &Mat<C64>, j: usize| (0..n).map(|i| m[(i, j)].norm_sqr()).sum::<f64>().sqrt();
                let bad = |r: &Mat<C64>| {
                    (0..rhs.ncols()).any(|j| norms(r, j) > RESIDUAL_TOL * norms(rhs, j).max(f64::MIN_POSITIVE))
                };
                if bad(&r) {
                    x += lu.solve(&r);
                    r = rhs - matrix * &x;
                }
                for j in 0..rhs.ncols() {
                    let rel = norms(&r, j) / norms(rhs, j).max(f64::MIN_POSITIVE);
                    if rel > RESIDUAL_TOL && norms(rhs, j) > 0.0 {
                        return Err(Error::NoConvergence(format!(
                            "dense volume solve residual {rel:.3e} above {RESIDUAL_TOL:e}"
                        )));
                    }
                }
                Ok(x)
            }
            Backend::Toeplitz { .. } => {
                let mut out = Mat::<C64>::zeros(n, rhs.ncols());
                for j in 0..rhs.ncols() {
                    let b: Vec<C64> = (0..n).map(|i| rhs[(i, j)]).collect();
                    let (x, _) = gmres(
                        |x, y| self.apply(x, y),
                        &b,
                        self.opts.gmres_tol,
                        self.opts.gmres_restart,
                        self.opts.gmres_max_iter,
                    )?;
                    let rel = self.residual(&x, &b);
                    if rel > RESIDUAL_TOL {
                        return Err(Error::NoConvergence(format!(
                            "volume solve residual {rel:.3e} above {RESIDUAL_TOL:e}"
                        )));
                    }
                    for i in 0..n {
                        out[(i, j)] = x[i];
                    }
                }
                Ok(out)
            }
        }
    }

    /// Kernel weight between an arbitrary point and flagged cell `j`.
    #[inline]
    pub fn weight(&self, x: Point, cell_of_x: Option<usize>, j: usize) -> C64 {
        if cell_of_x == Some(self.grid.flagged()[j]) {
            self.self_w
        } else {
            let h = self.grid.h;
            phi(dist(x, self.centers[j]), self.kappa) * (h * h * h)
        }
    }

    /// `W[m, j] = weight(x_m, j)`: the discrete volume potential evaluated at `pts`.
    pub fn point_weights(&self, pts: &[Point]) -> Mat<C64> {
        let n = self.len();
        let rows: Vec<Vec<C64>> = pts
            .par_iter()
            .map(|&x| {
                let cell = self.grid.locate(x);
                (0..n).map(|j| self.weight(x, cell, j)).collect()
            })
            .collect();
        Mat::from_fn(pts.len(), n, |m, j| rows[m][j])
    }

    /// `u(x) = u_inc(x) + Σ_j w(x, y_j) q_j u_j` at each point, for each column of `u`.
    ///
    /// `incident[(m, c)]` is the incident field of column `c` at `pts[m]`.
    pub fn evaluate(&self, u: &Mat<C64>, pts: &[Point], incident: &Mat<C64>) -> Mat<C64> {
        if self.is_identity() {
            return incident.clone();
        }
        let w = self.point_weights(pts);
        let qu = Mat::from_fn(u.nrows(), u.ncols(), |i, c| self.q[i] * u[(i, c)]);
        incident + &w * &qu
    }

    /// Far field `Σ_j e^{−iκx̂·y_j} q_j u_j h³` of each column of `u`.
    pub fn far_field(&self, u: &Mat<C64>, xhats: &[Point]) -> FarField {
        let n = self.len();
        if self.is_identity() {
            return FarField::zeros(xhats.len(), u.ncols());
        }
        let h3 = self.grid.cell_volume();
        let e = Mat::from_fn(xhats.len(), n, |x, j| C64::from_polar(h3, -self.kappa * dot(xhats[x], self.centers[j])));
        let qu = Mat::from_fn(n, u.ncols(), |i, c| self.q[i] * u[(i, c)]);
        let f = &e * &qu;
        FarField::from_fn(xhats.len(), u.ncols(), |x, t| f[(x, t)])
    }
}

/// Solve for the total field given incident samples on the flagged cells.
pub fn solve_total_field(op: &LsOperator, incident: &[C64]) -> Result<FieldOnGrid> {
    let b = Mat::from_fn(incident.len(), 1, |i, _| incident[i]);
    let x = op.solve(&b)?;
    Ok(FieldOnGrid { values: (0..incident.len()).map(|i| x[(i, 0)]).collect() })
}

/// Far field of one solved field sampled on the grid.
pub fn far_field_background(op: &LsOperator, field: &FieldOnGrid, xhats: &[Point]) -> FarField {
    let u = Mat::from_fn(field.values.len(), 1, |i, _| field.values[i]);
    op.far_field(&u, xhats)
}

#[cfg(test)]
mod tests {
    use super::super::kernel::plane_wave;
    use super::*;
    use crate::config::Domain;

    fn ball_grid(n: usize) -> VolumeGrid {
        VolumeGrid::with_cells(&Domain::Ball { center: [0.0; 3], radius: 1.0 }, n).unwrap()
    }

    #[test]
    fn zero_potential_is_identity() {
        let g = ball_grid(6);
        let op = assemble_ls(&g, vec![C64::new(0.0, 0.0); g.n_flagged()], Wavenumber::unbounded(1.0).unwrap(), &SolverOptions::default())
            .unwrap();
        assert!(op.is_identity());
        let inc: Vec<C64> = g.flagged_centers().iter().map(|x| plane_wave(1.0, [0.0, 0.0, 1.0], *x)).collect();
        let u = solve_total_field(&op, &inc).unwrap();
        assert_eq!(u.values, inc);
        assert_eq!(far_field_background(&op, &u, &[[1.0, 0.0, 0.0]]).sup_norm(), 0.0);
    }

    #[test]
    fn dense_and_fft_agree() {
        let g = ball_grid(8);
        let n = g.n_flagged();
        let q = vec![C64::new(0.3, 0.02); n];
        let k = Wavenumber::unbounded(1.3).unwrap();
        let dense = assemble_ls(&g, q.clone(), k, &SolverOptions::default()).unwrap();
        let fft = assemble_ls(&g, q, k, &SolverOptions { dense_cap: 0, ..Default::default() }).unwrap();
        assert_eq!(dense.backend_name(), "dense-lu");
        assert_eq!(fft.backend_name(), "fft-gmres");
        let x: Vec<C64> = (0..n).map(|i| C64::new((i as f64).sin(), 0.5)).collect();
        let (mut y1, mut y2) = (vec![C64::new(0.0, 0.0); n], vec![C64::new(0.0, 0.0); n]);
        dense.apply(&x, &mut y1);
        fft.apply(&x, &mut y2);
        for i in 0..n {
            assert!((y1[i] - y2[i]).norm() < 1e-12);
        }
        let inc: Vec<C64> = g.flagged_centers().iter().map(|x| plane_wave(1.3, [0.0, 0.6, 0.8], *x)).collect();
        let u1 = solve_total_field(&dense, &inc).unwrap();
        let u2 = solve_total_field(&fft, &inc).unwrap();
        for i in 0..n {
            assert!((u1.values[i] - u2.values[i]).norm() < 1e-9);
        }
    }

    #[test]
    fn evaluation_reproduces_grid_samples() {
        let g = ball_grid(6);
        let n = g.n_flagged();
        let k = 1.0;
        let op = assemble_ls(&g, vec![C64::new(0.5, 0.0); n], Wavenumber::unbounded(k).unwrap(), &SolverOptions::default())
            .unwrap();
        let pts = g.flagged_centers();
        let d = [0.0, 0.0, 1.0];
        let inc: Vec<C64> = pts.iter().map(|x| plane_wave(k, d, *x)).collect();
        let u = solve_total_field(&op, &inc).unwrap();
        let um = Mat::from_fn(n, 1, |i, _| u.values[i]);
        let incm = Mat::from_fn(n, 1, |i, _| inc[i]);
        let v = op.evaluate(&um, &pts, &incm);
        for i in 0..n {
            assert!((v[(i, 0)] - u.values[i]).norm() < 1e-10);
        }
    }
}
