use super::Domain;
use crate::point::Point;
use crate::{Error, Result};
use serde::{Deserialize, Serialize};

/// Uniform voxelisation of a box with a per-cell membership flag for Ω.
///
/// Cells are indexed `(i * ny + j) * nz + k`. A cell is flagged when any part
/// of it lies in Ω; the flagged cells, in index order, are the unknowns of
/// every volume solve. Boundary cells carry their volume fraction in Ω so
/// that discretised potentials keep the mass of the continuous ones.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VolumeGrid {
    pub origin: Point,
    pub h: f64,
    pub dims: [usize; 3],
    flagged: Vec<usize>,
    /// Fraction of each flagged cell lying in Ω.
    fractions: Vec<f64>,
    /// Centroid of each flagged cell's part in Ω, where coefficients are sampled.
    samples: Vec<Point>,
}

/// Sub-samples per axis when measuring boundary cells of curved domains.
pub const FRACTION_SUB: usize = 8;

impl VolumeGrid {
    /// Grid of spacing at most `h` covering the bounding box of Ω, centred on it.
    pub fn covering(domain: &Domain, h: f64) -> Result<Self> {
        let (lo, hi) = domain.bounding_box();
        let mut dims = [0usize; 3];
        for d in 0..3 {
            dims[d] = ((hi[d] - lo[d]) / h - 1e-9).ceil().max(1.0) as usize;
        }
        Self::with_dims(domain, h, dims)
    }

    /// Grid of spacing at most `h` whose cells tile the longest side of the
    /// bounding box exactly.
    pub fn fitted(domain: &Domain, h: f64) -> Result<Self> {
        if !(h > 0.0) || !h.is_finite() {
            return Err(Error::Config(format!("grid spacing {h} must be positive")));
        }
        let (lo, hi) = domain.bounding_box();
        let ext = (0..3).map(|d| hi[d] - lo[d]).fold(0.0, f64::max);
        Self::with_cells(domain, (ext / h - 1e-9).ceil().max(1.0) as usize)
    }

    /// Grid with `n` cells per axis spanning the bounding box of Ω exactly
    /// (cubic boxes only give cubic cells).
    pub fn with_cells(domain: &Domain, n: usize) -> Result<Self> {
        let (lo, hi) = domain.bounding_box();
        let ext = (0..3).map(|d| hi[d] - lo[d]).fold(0.0, f64::max);
        let h = ext / n as f64;
        let mut dims = [0usize; 3];
        for d in 0..3 {
            dims[d] = ((hi[d] - lo[d]) / h - 1e-9).ceil().max(1.0) as usize;
        }
        Self::with_dims(domain, h, dims)
    }

    fn with_dims(domain: &Domain, h: f64, dims: [usize; 3]) -> Result<Self> {
        if !(h > 0.0) || !h.is_finite() {
            return Err(Error::Config(format!("grid spacing {h} must be positive")));
        }
        let c = domain.center();
        let origin = [
            c[0] - 0.5 * dims[0] as f64 * h,
            c[1] - 0.5 * dims[1] as f64 * h,
            c[2] - 0.5 * dims[2] as f64 * h,
        ];
        let mut g = Self { origin, h, dims, flagged: Vec::new(), fractions: Vec::new(), samples: Vec::new() };
        for i in 0..g.n_cells() {
            if let Some((f, x)) = cell_share(domain, g.center(i), h) {
                g.flagged.push(i);
                g.fractions.push(f);
                g.samples.push(x);
            }
        }
        if g.flagged.is_empty() {
            return Err(Error::Config(format!("grid spacing {h} leaves no cell inside Ω")));
        }
        Ok(g)
    }

    pub fn n_cells(&self) -> usize {
        self.dims.iter().product()
    }

    pub fn cell_volume(&self) -> f64 {
        self.h * self.h * self.h
    }

    pub fn unravel(&self, idx: usize) -> [usize; 3] {
        let k = idx % self.dims[2];
        let j = (idx / self.dims[2]) % self.dims[1];
        let i = idx / (self.dims[1] * self.dims[2]);
        [i, j, k]
    }

    pub fn ravel(&self, ijk: [usize; 3]) -> usize {
        (ijk[0] * self.dims[1] + ijk[1]) * self.dims[2] + ijk[2]
    }

    pub fn center(&self, idx: usize) -> Point {
        let [i, j, k] = self.unravel(idx);
        [
            self.origin[0] + (i as f64 + 0.5) * self.h,
            self.origin[1] + (j as f64 + 0.5) * self.h,
            self.origin[2] + (k as f64 + 0.5) * self.h,
        ]
    }

    /// Box cell indices of the flagged cells.
    pub fn flagged(&self) -> &[usize] {
        &self.flagged
    }

    pub fn n_flagged(&self) -> usize {
        self.flagged.len()
    }

    /// Centres of the flagged cells.
    pub fn flagged_centers(&self) -> Vec<Point> {
        self.flagged.iter().map(|&i| self.center(i)).collect()
    }

    /// Volume fractions in Ω of the flagged cells.
    pub fn fractions(&self) -> &[f64] {
        &self.fractions
    }

    /// Coefficient sample points of the flagged cells, all in Ω.
    pub fn sample_points(&self) -> &[Point] {
        &self.samples
    }

    /// Measured volume of Ω, `Σ fraction · h³`.
    pub fn flagged_volume(&self) -> f64 {
        self.fractions.iter().sum::<f64>() * self.cell_volume()
    }

    /// Integer cell coordinates of `x`, possibly outside the box.
    pub fn cell_coords(&self, x: Point) -> [i64; 3] {
        let mut c = [0i64; 3];
        for d in 0..3 {
            c[d] = ((x[d] - self.origin[d]) / self.h).floor() as i64;
        }
        c
    }

    /// Box cell containing `x`, if inside the box.
    pub fn locate(&self, x: Point) -> Option<usize> {
        let c = self.cell_coords(x);
        if (0..3).all(|d| c[d] >= 0 && (c[d] as usize) < self.dims[d]) {
            Some(self.ravel([c[0] as usize, c[1] as usize, c[2] as usize]))
        } else {
            None
        }
    }
}

/// Volume fraction and sample point of the cell centred at `c`, `None` if it misses Ω.
fn cell_share(domain: &Domain, c: Point, h: f64) -> Option<(f64, Point)> {
    let lo = [c[0] - 0.5 * h, c[1] - 0.5 * h, c[2] - 0.5 * h];
    let hi = [c[0] + 0.5 * h, c[1] + 0.5 * h, c[2] + 0.5 * h];
    if let Domain::Ball { center, radius } = domain {
        let r = crate::point::dist(c, *center);
        let half_diag = 0.5 * h * 3f64.sqrt();
        if r + half_diag <= *radius {
            return Some((1.0, c));
        }
        if r - half_diag >= *radius {
            return None;
        }
    }
    let f = domain.clipped_volume(lo, hi, FRACTION_SUB) / (h * h * h);
    if f <= 0.0 {
        return None;
    }
    if f >= 1.0 - 1e-12 {
        return Some((1.0, c));
    }
    domain.clipped_centroid(lo, hi, FRACTION_SUB).map(|x| (f, x))
}
