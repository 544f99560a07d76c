use super::CellPartition;
use crate::config::{AsymptoticRegime, MediumSpec};
use crate::point::{dist, Point};
use crate::{Error, Result, C64};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use std::collections::HashMap;
use std::io::Write;

/// Reference body geometry before scaling by `a`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BodySpec {
    /// `diam B`, shared by all bodies.
    pub diameter: f64,
    /// `|∂B|` for the uniform mode.
    pub perimeter: f64,
    /// Heterogeneous mode: `|∂B_m|` drawn per hole from this list when non-empty.
    pub perimeters: Vec<f64>,
}

impl BodySpec {
    pub fn ball(diameter: f64) -> Self {
        Self { diameter, perimeter: std::f64::consts::PI * diameter * diameter, perimeters: Vec::new() }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.diameter > 0.0) {
            return Err(Error::Config("body diameter must be positive".into()));
        }
        if !(self.perimeter > 0.0) || self.perimeters.iter().any(|&p| !(p > 0.0 && p.is_finite())) {
            return Err(Error::Config("body perimeters must be positive".into()));
        }
        Ok(())
    }

    /// Scale-invariant shape factor `|∂B| / diam(B)²` of the uniform body.
    pub fn shape_factor(&self) -> f64 {
        self.perimeter / (self.diameter * self.diameter)
    }

    /// Mean shape factor over the heterogeneous list, or the uniform one.
    pub fn mean_shape_factor(&self) -> f64 {
        if self.perimeters.is_empty() {
            self.shape_factor()
        } else {
            self.perimeters.iter().sum::<f64>() / self.perimeters.len() as f64 / (self.diameter * self.diameter)
        }
    }
}

/// One hole `D_m = z_m + ε B_m` with its impedance data.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Hole {
    pub center: Point,
    /// Index of the owning cell in the partition.
    pub cell: usize,
    /// `|∂B_m|`.
    pub perimeter: f64,
    /// `diam B_m`.
    pub body_diameter: f64,
    /// `λ_{m,0}`.
    pub lambda0: C64,
    /// `λ_m = λ_{m,0} a^{-β}`.
    pub lambda: C64,
    /// `C_m = −λ_m |∂D_m|`.
    pub c: C64,
    /// `C̄_m = λ_{m,0} |∂B_m| / (max diam B)²`, so that `C_m = −C̄_m a^{2−β}`.
    pub c_bar: C64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScattererSet {
    pub a: f64,
    pub beta: f64,
    pub t: f64,
    /// Nominal lattice cell side.
    pub cell_side: f64,
    pub max_body_diameter: f64,
    pub holes: Vec<Hole>,
    /// Per-hole lattice coordinates of the owning cell, when available.
    pub lattice: Vec<Option<[i64; 3]>>,
    /// Per-hole centre of the owning cell box.
    pub cell_anchor: Vec<Point>,
    pub min_distance: Option<f64>,
}

impl ScattererSet {
    pub fn len(&self) -> usize {
        self.holes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.holes.is_empty()
    }

    pub fn centers(&self) -> Vec<Point> {
        self.holes.iter().map(|h| h.center).collect()
    }

    /// `𝒞 = max_m |C̄_m|`.
    pub fn c_scale(&self) -> f64 {
        self.holes.iter().map(|h| h.c_bar.norm()).fold(0.0, f64::max)
    }

    /// Hole diameter `a · diam B_m / max diam B`.
    pub fn hole_diameter(&self, m: usize) -> f64 {
        self.a * self.holes[m].body_diameter / self.max_body_diameter
    }

    /// Builds a set from explicit centres with a uniform body and impedance.
    pub fn from_centers(centers: &[Point], a: f64, beta: f64, body: &BodySpec, lambda0: C64) -> Self {
        let holes = centers
            .iter()
            .enumerate()
            .map(|(i, &z)| make_hole(z, i, a, beta, body.perimeter, body.diameter, body.diameter, lambda0))
            .collect();
        let mut s = Self {
            a,
            beta,
            t: f64::NAN,
            cell_side: f64::NAN,
            max_body_diameter: body.diameter,
            holes,
            lattice: vec![None; centers.len()],
            cell_anchor: centers.to_vec(),
            min_distance: None,
        };
        s.min_distance = min_pair_distance(&s.centers());
        s
    }

    /// Replace every `λ_m` by a schedule value, recomputing `λ_{m,0}`, `C_m`, `C̄_m`.
    pub fn apply_schedule(&mut self, lambdas: &[C64]) -> Result<()> {
        if lambdas.len() != self.holes.len() {
            return Err(Error::Mismatch(format!(
                "schedule has {} entries for {} holes",
                lambdas.len(),
                self.holes.len()
            )));
        }
        let (a, beta, dmax) = (self.a, self.beta, self.max_body_diameter);
        for (h, &l) in self.holes.iter_mut().zip(lambdas) {
            *h = make_hole(h.center, h.cell, a, beta, h.perimeter, h.body_diameter, dmax, l * a.powf(beta));
        }
        Ok(())
    }

    /// CSV with columns `m,z_x,z_y,z_z,lambda_re,lambda_im,C_re,C_im` (λ is `λ_m`).
    pub fn write_csv<W: Write>(&self, mut w: W) -> Result<()> {
        writeln!(w, "m,z_x,z_y,z_z,lambda_re,lambda_im,C_re,C_im")?;
        for (m, h) in self.holes.iter().enumerate() {
            writeln!(
                w,
                "{m},{:e},{:e},{:e},{:e},{:e},{:e},{:e}",
                h.center[0], h.center[1], h.center[2], h.lambda.re, h.lambda.im, h.c.re, h.c.im
            )?;
        }
        Ok(())
    }
}

#[allow(clippy::too_many_arguments)]
fn make_hole(
    center: Point,
    cell: usize,
    a: f64,
    beta: f64,
    perimeter: f64,
    body_diameter: f64,
    max_diameter: f64,
    lambda0: C64,
) -> Hole {
    let lambda = lambda0 * a.powf(-beta);
    let surface = a * a * perimeter / (max_diameter * max_diameter);
    let c_bar = lambda0 * (perimeter / (max_diameter * max_diameter));
    Hole { center, cell, perimeter, body_diameter, lambda0, lambda, c: -lambda * surface, c_bar }
}

/// Smallest pairwise centre distance, `None` for fewer than two points.
pub fn min_pair_distance(pts: &[Point]) -> Option<f64> {
    if pts.len() < 2 {
        return None;
    }
    if pts.len() <= 64 {
        let mut best = f64::INFINITY;
        for i in 0..pts.len() {
            for j in 0..i {
                best = best.min(dist(pts[i], pts[j]));
            }
        }
        return Some(best);
    }
    // bucket size from the mean spacing; fall back to brute force if no pair is found
    let (mut lo, mut hi) = ([f64::INFINITY; 3], [f64::NEG_INFINITY; 3]);
    for p in pts {
        for d in 0..3 {
            lo[d] = lo[d].min(p[d]);
            hi[d] = hi[d].max(p[d]);
        }
    }
    let vol: f64 = (0..3).map(|d| (hi[d] - lo[d]).max(1e-12)).product();
    let b = (vol / pts.len() as f64).cbrt() * 1.5;
    let key = |p: &Point| {
        [
            ((p[0] - lo[0]) / b).floor() as i64,
            ((p[1] - lo[1]) / b).floor() as i64,
            ((p[2] - lo[2]) / b).floor() as i64,
        ]
    };
    let mut buckets: HashMap<[i64; 3], Vec<usize>> = HashMap::new();
    for (i, p) in pts.iter().enumerate() {
        buckets.entry(key(p)).or_default().push(i);
    }
    let mut best = f64::INFINITY;
    for (i, p) in pts.iter().enumerate() {
        let k = key(p);
        for dx in -1..=1 {
            for dy in -1..=1 {
                for dz in -1..=1 {
                    if let Some(v) = buckets.get(&[k[0] + dx, k[1] + dy, k[2] + dz]) {
                        for &j in v {
                            if j < i {
                                best = best.min(dist(*p, pts[j]));
                            }
                        }
                    }
                }
            }
        }
    }
    if best <= b {
        return Some(best);
    }
    let mut best = f64::INFINITY;
    for i in 0..pts.len() {
        for j in 0..i {
            best = best.min(dist(pts[i], pts[j]));
        }
    }
    Some(best)
}

/// Relative slack on the distance bounds, absorbing rounding in the lattice.
const DIST_SLACK: f64 = 1e-9;

/// Places `[K+1]` holes per cell: the first at the cell anchor, the others on a
/// seeded sub-lattice of spacing `a^t` within max-norm radius `side/4 − a/2`
/// of it, which keeps holes of different cells at layer distance `n·side/2`.
pub fn place_holes(
    partition: &CellPartition,
    regime: &AsymptoticRegime,
    medium: &MediumSpec,
    body: &BodySpec,
    kappa: f64,
    seed: u64,
) -> Result<ScattererSet> {
    body.validate()?;
    let a = regime.a;
    let spacing = a.powf(regime.t);
    let p0 = body.mean_shape_factor();
    let max_d = body.diameter;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut holes = Vec::new();
    let mut lattice = Vec::new();
    let mut anchors = Vec::new();
    for (ci, cell) in partition.cells.iter().enumerate() {
        let anchor = [
            0.5 * (cell.lo[0] + cell.hi[0]),
            0.5 * (cell.lo[1] + cell.hi[1]),
            0.5 * (cell.lo[2] + cell.hi[2]),
        ];
        let mut centers = vec![cell.center];
        let extra = cell.target_count.saturating_sub(1);
        if extra > 0 {
            let side = cell.min_side().min(partition.side);
            let radius = side / 4.0 - a / 2.0;
            let kmax = (radius / spacing + 1e-12).floor() as i64;
            let mut slots = Vec::new();
            for i in -kmax..=kmax {
                for j in -kmax..=kmax {
                    for k in -kmax..=kmax {
                        if (i, j, k) == (0, 0, 0) {
                            continue;
                        }
                        let z = [
                            cell.center[0] + i as f64 * spacing,
                            cell.center[1] + j as f64 * spacing,
                            cell.center[2] + k as f64 * spacing,
                        ];
                        if medium.domain.contains(z) {
                            slots.push(z);
                        }
                    }
                }
            }
            let mut cell_rng = ChaCha8Rng::seed_from_u64(rng.random::<u64>() ^ ci as u64);
            slots.shuffle(&mut cell_rng);
            let dmin = regime.d_min * spacing * (1.0 - DIST_SLACK);
            for z in slots {
                if centers.len() == cell.target_count {
                    break;
                }
                if centers.iter().all(|c| dist(*c, z) >= dmin && dist(*c, z) > a) {
                    centers.push(z);
                }
            }
            if centers.len() < cell.target_count {
                return Err(Error::Geometry(format!(
                    "cell {ci} at {:?} cannot hold {} holes with spacing a^t = {spacing:.4e} inside radius {radius:.4e}",
                    cell.center, cell.target_count
                )));
            }
        }
        for z in centers {
            let perimeter = if body.perimeters.is_empty() {
                body.perimeter
            } else {
                body.perimeters[rng.random_range(0..body.perimeters.len())]
            };
            let lambda0 = medium.lambda0_at(z, kappa, p0)?;
            holes.push(make_hole(z, ci, a, regime.beta, perimeter, body.diameter, max_d, lambda0));
            lattice.push(cell.lattice_index);
            anchors.push(anchor);
        }
    }
    let centers: Vec<Point> = holes.iter().map(|h| h.center).collect();
    let min_distance = min_pair_distance(&centers);
    if let Some(d) = min_distance {
        let lo = regime.d_min * spacing;
        let hi = regime.d_max * spacing;
        if d < lo * (1.0 - DIST_SLACK) || d > hi * (1.0 + DIST_SLACK) {
            return Err(Error::Geometry(format!(
                "minimum hole distance {d:.6e} outside [d_min a^t, d_max a^t] = [{lo:.6e}, {hi:.6e}]"
            )));
        }
        if d <= a {
            return Err(Error::Geometry(format!("holes of diameter {a} overlap: minimum distance {d:.3e}")));
        }
    }
    let set = ScattererSet {
        a,
        beta: regime.beta,
        t: regime.t,
        cell_side: partition.side,
        max_body_diameter: max_d,
        holes,
        lattice,
        cell_anchor: anchors,
        min_distance,
    };
    let kmax = partition.cells.iter().map(|c| c.target_count).max().unwrap_or(1);
    if set.len() > kmax * partition.cells.len() {
        return Err(Error::Geometry("hole count exceeds K_max times the cell count".into()));
    }
    Ok(set)
}
