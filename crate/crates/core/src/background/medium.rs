//! The hole-free background medium: plane-wave total fields, far fields and
//! the variable-index Green's function.

use super::kernel::{phi, plane_wave};
use super::ls::{FieldOnGrid, LsOperator, SolverOptions};
use crate::config::{MediumSpec, VolumeGrid, Wavenumber};
use crate::point::{dist, Point};
use crate::{Error, FarField, Result, C64};
use faer::Mat;

/// Background medium, either n ≡ 1 (analytic) or a discretised contrast.
#[derive(Debug)]
pub struct Background {
    kappa: f64,
    op: Option<LsOperator>,
}

impl Background {
    pub fn vacuum(kappa: Wavenumber) -> Self {
        Self { kappa: kappa.value(), op: None }
    }

    /// Discretise `q = κ²(n² − 1)` on a fitted grid of spacing at most `h`,
    /// weighting boundary cells by their volume fraction.
    pub fn new(medium: &MediumSpec, kappa: Wavenumber, h: f64, opts: &SolverOptions) -> Result<Self> {
        if medium.is_vacuum() {
            return Ok(Self::vacuum(kappa));
        }
        let grid = VolumeGrid::fitted(&medium.domain, h)?;
        let q: Vec<C64> = grid
            .sample_points()
            .iter()
            .zip(grid.fractions())
            .map(|(&x, &f)| medium.background_potential(x, kappa.value()) * f)
            .collect();
        let op = LsOperator::new(&grid, q, kappa, opts)?;
        Ok(Self::from_operator(op))
    }

    pub fn from_operator(op: LsOperator) -> Self {
        if op.is_identity() {
            Self { kappa: op.kappa(), op: None }
        } else {
            Self { kappa: op.kappa(), op: Some(op) }
        }
    }

    pub fn kappa(&self) -> f64 {
        self.kappa
    }

    pub fn operator(&self) -> Option<&LsOperator> {
        self.op.as_ref()
    }

    pub fn is_vacuum(&self) -> bool {
        self.op.is_none()
    }

    /// Total fields `V_n^t(·, d)` for each direction `d`.
    pub fn plane_waves(&self, dirs: &[Point]) -> Result<PlaneWaves<'_>> {
        let u = match &self.op {
            None => None,
            Some(op) => {
                let c = op.centers();
                let inc = Mat::from_fn(c.len(), dirs.len(), |i, k| plane_wave(self.kappa, dirs[k], c[i]));
                Some(op.solve(&inc)?)
            }
        };
        Ok(PlaneWaves { bg: self, dirs: dirs.to_vec(), u })
    }

    /// `G_κ(z_m, z_j)` for all pairs; the diagonal is zero.
    pub fn green_table(&self, pts: &[Point]) -> Result<Mat<C64>> {
        let m = pts.len();
        for i in 0..m {
            for j in 0..i {
                if pts[i] == pts[j] {
                    return Err(Error::Geometry(format!("coincident points {i} and {j} in Green table")));
                }
            }
        }
        let free = Mat::from_fn(m, m, |i, j| if i == j { C64::new(0.0, 0.0) } else { phi(dist(pts[i], pts[j]), self.kappa) });
        let Some(op) = &self.op else { return Ok(free) };
        let w = op.point_weights(pts);
        let h3 = op.grid().cell_volume();
        let rhs = Mat::from_fn(op.len(), m, |i, j| w[(j, i)] / h3);
        let sol = op.solve(&rhs)?;
        let q = op.potential();
        let qs = Mat::from_fn(op.len(), m, |i, j| q[i] * sol[(i, j)]);
        let corr = &w * &qs;
        Ok(Mat::from_fn(m, m, |i, j| if i == j { C64::new(0.0, 0.0) } else { free[(i, j)] + corr[(i, j)] }))
    }
}

/// Plane-wave total fields of a background for a list of directions.
pub struct PlaneWaves<'a> {
    bg: &'a Background,
    dirs: Vec<Point>,
    u: Option<Mat<C64>>,
}

impl PlaneWaves<'_> {
    pub fn dirs(&self) -> &[Point] {
        &self.dirs
    }

    /// Grid samples (flagged cells × directions), `None` for n ≡ 1.
    pub fn grid_fields(&self) -> Option<&Mat<C64>> {
        self.u.as_ref()
    }

    /// `V_n^t(x_m, d_k)` as a points × directions matrix, via the volume
    /// representation off the grid.
    pub fn at_points(&self, pts: &[Point]) -> Mat<C64> {
        let k = self.bg.kappa;
        let inc = Mat::from_fn(pts.len(), self.dirs.len(), |m, c| plane_wave(k, self.dirs[c], pts[m]));
        match (&self.bg.op, &self.u) {
            (Some(op), Some(u)) => op.evaluate(u, pts, &inc),
            _ => inc,
        }
    }

    /// Background far field `V_n^∞(x̂, d)` for the stored directions as incidences.
    pub fn far_field(&self, xhats: &[Point]) -> FarField {
        match (&self.bg.op, &self.u) {
            (Some(op), Some(u)) => op.far_field(u, xhats),
            _ => FarField::zeros(xhats.len(), self.dirs.len()),
        }
    }
}

/// Grid samples of `G_κ(·, y)`: the solution of the volume equation driven
/// by the cell-averaged point source at `y`.
pub fn green_variable(op: &LsOperator, y: Point) -> Result<FieldOnGrid> {
    let w = op.point_weights(&[y]);
    let h3 = op.grid().cell_volume();
    let rhs = Mat::from_fn(op.len(), 1, |i, _| w[(0, i)] / h3);
    let sol = op.solve(&rhs)?;
    Ok(FieldOnGrid { values: (0..op.len()).map(|i| sol[(i, 0)]).collect() })
}

/// `G_κ(x, y) = Φ_κ(x, y) + Σ_i w(x, y_i) q_i g_y(y_i)` with `g_y` from [`green_variable`].
pub fn green_at(op: &LsOperator, g_y: &FieldOnGrid, y: Point, x: Point) -> Result<C64> {
    let r = dist(x, y);
    if r == 0.0 {
        return Err(Error::Domain("Green's function is singular at x = y".into()));
    }
    let cell = op.grid().locate(x);
    let q = op.potential();
    let corr: C64 = (0..op.len()).map(|j| op.weight(x, cell, j) * q[j] * g_y.values[j]).sum();
    Ok(phi(r, op.kappa()) + corr)
}

/// Discrete H² proxy: `(Σ h³ (|u|² + |∇u|² + |Δu|²))^{1/2}` with central
/// differences wherever the six neighbours are flagged.
pub fn h2_proxy_norm(grid: &VolumeGrid, values: &[C64]) -> f64 {
    let n = grid.n_cells();
    let mut full = vec![None; n];
    for (f, &c) in grid.flagged().iter().enumerate() {
        full[c] = Some(values[f]);
    }
    let h = grid.h;
    let d = grid.dims;
    let mut acc = 0.0;
    for &c in grid.flagged() {
        let u = full[c].unwrap();
        acc += u.norm_sqr();
        let [i, j, k] = grid.unravel(c);
        let idx = [i, j, k];
        let mut grad = 0.0;
        let mut lap = C64::new(0.0, 0.0);
        let mut ok = true;
        for ax in 0..3 {
            if idx[ax] == 0 || idx[ax] + 1 >= d[ax] {
                ok = false;
                break;
            }
            let mut lo = idx;
            lo[ax] -= 1;
            let mut hi = idx;
            hi[ax] += 1;
            match (full[grid.ravel(lo)], full[grid.ravel(hi)]) {
                (Some(a), Some(b)) => {
                    grad += ((b - a) / (2.0 * h)).norm_sqr();
                    lap += (a + b - u * 2.0) / (h * h);
                }
                _ => {
                    ok = false;
                    break;
                }
            }
        }
        if ok {
            acc += grad + lap.norm_sqr();
        }
    }
    (acc * grid.cell_volume()).sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::{Domain, ScalarField};

    fn medium() -> MediumSpec {
        let mut m = MediumSpec::homogeneous(C64::new(1.0, 0.0));
        m.domain = Domain::Ball { center: [0.0; 3], radius: 0.5 };
        m.n = ScalarField::Gaussian {
            center: [0.0; 3],
            base: C64::new(1.0, 0.0),
            amplitude: C64::new(0.4, 0.05),
            width: 0.3,
        };
        m
    }

    #[test]
    fn vacuum_green_is_free() {
        let bg = Background::vacuum(Wavenumber::unbounded(1.0).unwrap());
        let pts = [[0.0; 3], [1.0, 0.0, 0.0]];
        let g = bg.green_table(&pts).unwrap();
        assert!((g[(0, 1)] - phi(1.0, 1.0)).norm() < 1e-16);
    }

    #[test]
    fn green_symmetry_two_solves() {
        let m = medium();
        let k = Wavenumber::unbounded(2.0).unwrap();
        let bg = Background::new(&m, k, 0.1, &SolverOptions::default()).unwrap();
        let op = bg.operator().unwrap();
        let (z1, z2) = ([0.11, -0.07, 0.03], [-0.2, 0.15, 0.12]);
        let g1 = green_variable(op, z1).unwrap();
        let g2 = green_variable(op, z2).unwrap();
        let a = green_at(op, &g1, z1, z2).unwrap();
        let b = green_at(op, &g2, z2, z1).unwrap();
        assert!((a - b).norm() < 1e-6 * a.norm(), "{a} vs {b}");
        let t = bg.green_table(&[z1, z2]).unwrap();
        assert!((t[(0, 1)] - b).norm() < 1e-9 * a.norm());
        // the medium actually changes the kernel
        assert!((a - phi(dist(z1, z2), 2.0)).norm() > 1e-4 * a.norm());
    }

    #[test]
    fn h2_proxy_of_constant() {
        let g = VolumeGrid::covering(&Domain::unit_cube(), 0.1).unwrap();
        let v = vec![C64::new(2.0, 0.0); g.n_flagged()];
        assert!((h2_proxy_norm(&g, &v) - 2.0).abs() < 1e-12);
    }
}
