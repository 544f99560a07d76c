use crate::config::{AsymptoticRegime, Domain, MediumSpec};
use crate::point::Point;
use crate::{Error, Result};
use serde::{Deserialize, Serialize};
use std::cmp::Ordering;

/// How Ω is cut into cells.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PartitionMode {
    /// Cubes of side `a^{s/3}` anchored at the low corner of Ω, trimmed to
    /// the target count by largest clipped volume.
    Lattice,
    /// Recursive bisection into cells of equal weighted volume
    /// `a^{s}[K+1]/(K+1)`.
    Balanced,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Cell {
    /// Anchor of the cell's first hole: the cube centre, or the centroid of
    /// the clipped cell.
    pub center: Point,
    pub lo: Point,
    pub hi: Point,
    pub clipped_volume: f64,
    /// `[K(center) + 1]`.
    pub target_count: usize,
    /// Integer lattice coordinates in [`PartitionMode::Lattice`].
    pub lattice_index: Option<[i64; 3]>,
}

impl Cell {
    pub fn min_side(&self) -> f64 {
        (0..3).map(|d| self.hi[d] - self.lo[d]).fold(f64::INFINITY, f64::min)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CellPartition {
    pub mode: PartitionMode,
    /// Nominal cell side `a^{s/3}`.
    pub side: f64,
    pub cells: Vec<Cell>,
}

impl CellPartition {
    pub fn total_target(&self) -> usize {
        self.cells.iter().map(|c| c.target_count).sum()
    }
}

/// Target number of cells `[|Ω|_μ a^{-s}]`.
fn cell_count(mass: f64, regime: &AsymptoticRegime) -> Result<usize> {
    let n = (mass * regime.a.powf(-regime.s) + 1e-9).floor();
    if !(n >= 1.0) {
        return Err(Error::Geometry(format!(
            "a = {} is too large for Ω: fewer than one cell",
            regime.a
        )));
    }
    Ok(n as usize)
}

fn lex(a: &Point, b: &Point) -> Ordering {
    a[0].total_cmp(&b[0]).then(a[1].total_cmp(&b[1])).then(a[2].total_cmp(&b[2]))
}

/// Lattice partition with the regime's cell side.
pub fn partition_domain(medium: &MediumSpec, regime: &AsymptoticRegime) -> Result<CellPartition> {
    partition_domain_with(medium, regime, PartitionMode::Lattice, 8)
}

/// Partition in the given mode; `samples` is the per-axis sub-sampling of one
/// nominal cell when volumes are not available in closed form.
pub fn partition_domain_with(
    medium: &MediumSpec,
    regime: &AsymptoticRegime,
    mode: PartitionMode,
    samples: usize,
) -> Result<CellPartition> {
    if !(regime.a > 0.0 && regime.a < 1.0) {
        return Err(Error::Geometry(format!("hole size a = {} must lie in (0, 1)", regime.a)));
    }
    let samples = samples.max(1);
    let side = regime.cell_side();
    let mut cells = match mode {
        PartitionMode::Lattice => lattice(medium, regime, side, samples)?,
        PartitionMode::Balanced => balanced(medium, regime, side, samples)?,
    };
    cells.sort_by(|a, b| lex(&a.center, &b.center));
    Ok(CellPartition { mode, side, cells })
}

fn target(medium: &MediumSpec, x: Point) -> usize {
    medium.holes_per_cell(x)
}

fn lattice(medium: &MediumSpec, regime: &AsymptoticRegime, side: f64, samples: usize) -> Result<Vec<Cell>> {
    let dom = &medium.domain;
    let n_target = cell_count(dom.volume(), regime)?;
    let (lo, hi) = dom.bounding_box();
    let mut dims = [0i64; 3];
    for d in 0..3 {
        dims[d] = ((hi[d] - lo[d]) / side - 1e-9).ceil().max(1.0) as i64;
    }
    let mut cells = Vec::new();
    for i in 0..dims[0] {
        for j in 0..dims[1] {
            for k in 0..dims[2] {
                let idx = [i, j, k];
                let clo = [
                    lo[0] + i as f64 * side,
                    lo[1] + j as f64 * side,
                    lo[2] + k as f64 * side,
                ];
                let chi = [clo[0] + side, clo[1] + side, clo[2] + side];
                let vol = dom.clipped_volume(clo, chi, samples);
                if vol <= 0.0 {
                    continue;
                }
                let cube_center = [clo[0] + 0.5 * side, clo[1] + 0.5 * side, clo[2] + 0.5 * side];
                // clipped cells take the centroid of Ω ∩ cube as their centre
                let full = vol >= side * side * side * (1.0 - 1e-12);
                let center = if full {
                    cube_center
                } else {
                    match dom.clipped_centroid(clo, chi, samples) {
                        Some(c) => c,
                        None => continue,
                    }
                };
                cells.push(Cell {
                    center,
                    lo: clo,
                    hi: chi,
                    clipped_volume: vol,
                    target_count: target(medium, center),
                    lattice_index: Some(idx),
                });
            }
        }
    }
    if cells.is_empty() {
        return Err(Error::Geometry("no lattice cell intersects Ω".into()));
    }
    if cells.len() > n_target {
        cells.sort_by(|a, b| {
            b.clipped_volume
                .total_cmp(&a.clipped_volume)
                .then_with(|| lex(&a.center, &b.center))
        });
        cells.truncate(n_target);
    } else if cells.len() < n_target {
        log::warn!("lattice yields {} cells, fewer than the target {n_target}", cells.len());
    }
    Ok(cells)
}

/// Weighted sample of Ω used by the balanced partition when closed-form
/// volumes are not available.
struct Samples {
    pts: Vec<Point>,
    w: Vec<f64>,
}

fn balanced(medium: &MediumSpec, regime: &AsymptoticRegime, side: f64, samples: usize) -> Result<Vec<Cell>> {
    let dom = &medium.domain;
    // density (K+1)/[K+1] so that each cell has volume a^s [K+1]/(K+1)
    let rho = |x: Point| {
        let kp1 = medium.k_at(x) + 1.0;
        kp1 / (kp1 + 1e-12).floor()
    };
    let analytic = match (dom, medium.k.as_constant()) {
        (Domain::Box { lo, hi }, Some(_)) => Some((*lo, *hi, rho(dom.center()))),
        _ => None,
    };
    let mut out = Vec::new();
    if let Some((lo, hi, r)) = analytic {
        let n = cell_count(dom.volume() * r, regime)?;
        split_box(medium, lo, hi, n, &mut out);
        return Ok(out);
    }
    let (lo, hi) = dom.bounding_box();
    let hs = side / samples as f64;
    let mut dims = [0usize; 3];
    for d in 0..3 {
        dims[d] = ((hi[d] - lo[d]) / hs).ceil().max(1.0) as usize;
    }
    let step = [
        (hi[0] - lo[0]) / dims[0] as f64,
        (hi[1] - lo[1]) / dims[1] as f64,
        (hi[2] - lo[2]) / dims[2] as f64,
    ];
    let dv = step[0] * step[1] * step[2];
    let mut s = Samples { pts: Vec::new(), w: Vec::new() };
    for i in 0..dims[0] {
        for j in 0..dims[1] {
            for k in 0..dims[2] {
                let x = [
                    lo[0] + (i as f64 + 0.5) * step[0],
                    lo[1] + (j as f64 + 0.5) * step[1],
                    lo[2] + (k as f64 + 0.5) * step[2],
                ];
                if dom.contains(x) {
                    s.pts.push(x);
                    s.w.push(dv);
                }
            }
        }
    }
    let mass: f64 = s.pts.iter().zip(&s.w).map(|(x, w)| w * rho(*x)).sum();
    let n = cell_count(mass, regime)?;
    let idx: Vec<usize> = (0..s.pts.len()).collect();
    let weights: Vec<f64> = s.pts.iter().zip(&s.w).map(|(x, w)| w * rho(*x)).collect();
    split_samples(medium, &s, &weights, idx, lo, hi, n, &mut out)?;
    Ok(out)
}

fn longest_axis(lo: Point, hi: Point) -> usize {
    let mut best = 0;
    for d in 1..3 {
        if hi[d] - lo[d] > hi[best] - lo[best] + 1e-15 {
            best = d;
        }
    }
    best
}

fn split_box(medium: &MediumSpec, lo: Point, hi: Point, n: usize, out: &mut Vec<Cell>) {
    if n == 1 {
        let center = [0.5 * (lo[0] + hi[0]), 0.5 * (lo[1] + hi[1]), 0.5 * (lo[2] + hi[2])];
        out.push(Cell {
            center,
            lo,
            hi,
            clipped_volume: (0..3).map(|d| hi[d] - lo[d]).product(),
            target_count: target(medium, center),
            lattice_index: None,
        });
        return;
    }
    let n1 = n / 2;
    let ax = longest_axis(lo, hi);
    let p = lo[ax] + (hi[ax] - lo[ax]) * n1 as f64 / n as f64;
    let mut hi1 = hi;
    hi1[ax] = p;
    let mut lo2 = lo;
    lo2[ax] = p;
    split_box(medium, lo, hi1, n1, out);
    split_box(medium, lo2, hi, n - n1, out);
}

#[allow(clippy::too_many_arguments)]
fn split_samples(
    medium: &MediumSpec,
    s: &Samples,
    weights: &[f64],
    mut idx: Vec<usize>,
    lo: Point,
    hi: Point,
    n: usize,
    out: &mut Vec<Cell>,
) -> Result<()> {
    if idx.is_empty() {
        return Err(Error::Geometry(format!(
            "balanced partition ran out of samples near {lo:?}; raise geometry.samples"
        )));
    }
    if n == 1 {
        let vol: f64 = idx.iter().map(|&i| s.w[i]).sum();
        let mut c = [0.0; 3];
        for &i in &idx {
            for d in 0..3 {
                c[d] += s.w[i] * s.pts[i][d];
            }
        }
        let center = [c[0] / vol, c[1] / vol, c[2] / vol];
        out.push(Cell {
            center,
            lo,
            hi,
            clipped_volume: vol,
            target_count: target(medium, center),
            lattice_index: None,
        });
        return Ok(());
    }
    let n1 = n / 2;
    let ax = longest_axis(lo, hi);
    idx.sort_by(|&a, &b| s.pts[a][ax].total_cmp(&s.pts[b][ax]).then(a.cmp(&b)));
    let total: f64 = idx.iter().map(|&i| weights[i]).sum();
    let goal = total * n1 as f64 / n as f64;
    // cut between coordinate levels, at the level boundary closest to the goal
    let mut best: Option<(f64, usize)> = None;
    let mut acc = 0.0;
    let mut pos = 0;
    while pos < idx.len() {
        let level = s.pts[idx[pos]][ax];
        while pos < idx.len() && s.pts[idx[pos]][ax] == level {
            acc += weights[idx[pos]];
            pos += 1;
        }
        if pos < idx.len() {
            let gap = (acc - goal).abs();
            if best.is_none_or(|(g, _)| gap < g) {
                best = Some((gap, pos));
            }
            if acc > goal {
                break;
            }
        }
    }
    let cut = match best {
        Some((_, c)) => c,
        None => {
            return Err(Error::Geometry(format!(
                "balanced partition cannot split {n} cells near {lo:?}; raise geometry.samples"
            )))
        }
    };
    let plane = 0.5 * (s.pts[idx[cut - 1]][ax] + s.pts[idx[cut]][ax]);
    let right = idx.split_off(cut);
    let mut hi1 = hi;
    hi1[ax] = plane;
    let mut lo2 = lo;
    lo2[ax] = plane;
    split_samples(medium, s, weights, idx, lo, hi1, n1, out)?;
    split_samples(medium, s, weights, right, lo2, hi, n - n1, out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::ScalarField;
    use crate::C64;

    fn cube() -> MediumSpec {
        MediumSpec::homogeneous(C64::new(1.0, 0.0))
    }

    #[test]
    fn perfect_cube_lattice() {
        let a = 125f64.powf(-0.5);
        let p = partition_domain(&cube(), &AsymptoticRegime::standard(a, 0.0, 2.0 / 3.0)).unwrap();
        assert_eq!(p.cells.len(), 125);
        assert!(p.cells.iter().all(|c| c.target_count == 1));
        let max_idx = p.cells.iter().map(|c| c.lattice_index.unwrap()[0]).max().unwrap();
        assert_eq!(max_idx, 4);
        // lexicographic ordering
        for w in p.cells.windows(2) {
            assert_eq!(lex(&w[0].center, &w[1].center), Ordering::Less);
        }
    }

    #[test]
    fn trimmed_lattice_count() {
        let r = AsymptoticRegime::standard(0.1, 0.0, 2.0 / 3.0);
        let p = partition_domain(&cube(), &r).unwrap();
        assert_eq!(p.cells.len(), 100);
    }

    #[test]
    fn k_targets() {
        let mut m = cube();
        m.k = ScalarField::constant(1.5);
        let p = partition_domain(&m, &AsymptoticRegime::standard(0.1, 0.0, 2.0 / 3.0)).unwrap();
        assert!(p.cells.iter().all(|c| c.target_count == 2));
    }

    #[test]
    fn too_large_a() {
        let mut m = cube();
        m.domain = Domain::cube_of_volume([0.0; 3], 1e-3).unwrap();
        assert!(partition_domain(&m, &AsymptoticRegime::standard(0.5, 0.0, 2.0 / 3.0)).is_err());
    }

    #[test]
    fn balanced_box_volumes() {
        let r = AsymptoticRegime::standard(0.05, 0.0, 2.0 / 3.0);
        let p = partition_domain_with(&cube(), &r, PartitionMode::Balanced, 8).unwrap();
        assert_eq!(p.cells.len(), 400);
        let tot: f64 = p.cells.iter().map(|c| c.clipped_volume).sum();
        assert!((tot - 1.0).abs() < 1e-12);
        for c in &p.cells {
            assert!((c.clipped_volume - 1.0 / 400.0).abs() < 1e-14);
        }
    }

    #[test]
    fn balanced_k_clipping_factor() {
        // K = 0.5: volume a²·[1.5]/1.5 = a²/1.5 per cell
        let mut m = cube();
        m.k = ScalarField::constant(0.5);
        let a = 0.1;
        let p = partition_domain_with(&m, &AsymptoticRegime::standard(a, 0.0, 2.0 / 3.0), PartitionMode::Balanced, 8)
            .unwrap();
        assert_eq!(p.cells.len(), 150);
        for c in &p.cells {
            assert!((c.clipped_volume - a * a / 1.5).abs() < 1e-12);
        }
    }

    #[test]
    fn balanced_ball_volumes() {
        let mut m = cube();
        m.domain = Domain::ball_of_volume([0.0; 3], 1.0).unwrap();
        let a = 0.07;
        let p = partition_domain_with(&m, &AsymptoticRegime::standard(a, 0.0, 2.0 / 3.0), PartitionMode::Balanced, 8)
            .unwrap();
        let n = p.cells.len();
        assert_eq!(n, (a.powi(-2) + 1e-9).floor() as usize);
        let mean = p.cells.iter().map(|c| c.clipped_volume).sum::<f64>() / n as f64;
        for c in &p.cells {
            assert!((c.clipped_volume - mean).abs() < 0.25 * mean, "{} vs {mean}", c.clipped_volume);
            assert!(m.domain.contains(c.center));
        }
    }
}
