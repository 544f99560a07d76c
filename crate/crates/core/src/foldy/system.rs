use crate::background::Background;
use crate::config::SphereGrid;
use crate::geometry::ScattererSet;
use crate::linalg::DenseLu;
use crate::{Error, FarField, Result, C64};
use faer::Mat;
use std::io::Write;

/// Largest number of holes accepted by the dense solve.
pub const MAX_HOLES: usize = 20_000;

/// `B Q = V` with `B_mm = −1/C_m` and `B_mj = −G_κ(z_m, z_j)`.
pub struct FoldySystem {
    pub matrix: Mat<C64>,
    pub c: Vec<C64>,
    lu: DenseLu,
}

impl std::fmt::Debug for FoldySystem {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("FoldySystem").field("m", &self.c.len()).finish()
    }
}

impl FoldySystem {
    pub fn len(&self) -> usize {
        self.c.len()
    }

    pub fn is_empty(&self) -> bool {
        self.c.is_empty()
    }

    pub fn pivot_ratio(&self) -> f64 {
        self.lu.pivot_ratio()
    }
}

/// Charges `Q_m(θ)` as holes × incidences.
#[derive(Clone, Debug)]
pub struct Charges {
    pub q: Mat<C64>,
}

impl Charges {
    /// CSV with columns `theta_idx,m,re,im`.
    pub fn write_csv<W: Write>(&self, mut w: W) -> Result<()> {
        writeln!(w, "theta_idx,m,re,im")?;
        for t in 0..self.q.ncols() {
            for m in 0..self.q.nrows() {
                let v = self.q[(m, t)];
                writeln!(w, "{t},{m},{:e},{:e}", v.re, v.im)?;
            }
        }
        Ok(())
    }

    pub fn max_abs(&self) -> f64 {
        let mut best = 0.0f64;
        for t in 0..self.q.ncols() {
            for m in 0..self.q.nrows() {
                best = best.max(self.q[(m, t)].norm());
            }
        }
        best
    }
}

/// Assemble with the Green table of `background` at the hole centres.
pub fn assemble_system(set: &ScattererSet, background: &Background) -> Result<FoldySystem> {
    check_set(set)?;
    let table = background.green_table(&set.centers())?;
    assemble_with_table(set, &table)
}

fn check_set(set: &ScattererSet) -> Result<()> {
    if set.len() > MAX_HOLES {
        return Err(Error::Config(format!("{} holes exceed the dense cap of {MAX_HOLES}", set.len())));
    }
    for (m, h) in set.holes.iter().enumerate() {
        if h.c == C64::new(0.0, 0.0) {
            return Err(Error::Domain(format!("degenerate: zero impedance gives C_{m} = 0")));
        }
        if !h.c.re.is_finite() || !h.c.im.is_finite() {
            return Err(Error::Domain(format!("C_{m} is not finite")));
        }
    }
    Ok(())
}

/// Assemble from a precomputed Green table `G[(m, j)] = G_κ(z_m, z_j)`.
pub fn assemble_with_table(set: &ScattererSet, table: &Mat<C64>) -> Result<FoldySystem> {
    check_set(set)?;
    let m = set.len();
    if table.nrows() != m || table.ncols() != m {
        return Err(Error::Mismatch(format!("Green table is {}x{}, expected {m}x{m}", table.nrows(), table.ncols())));
    }
    let c: Vec<C64> = set.holes.iter().map(|h| h.c).collect();
    let matrix = Mat::from_fn(m, m, |i, j| if i == j { -c[i].inv() } else { -table[(i, j)] });
    if matrix.col_iter().any(|col| col.iter().any(|v| !v.re.is_finite() || !v.im.is_finite())) {
        return Err(Error::Domain("Foldy matrix has non-finite entries (coincident centres?)".into()));
    }
    let lu = DenseLu::factor(&matrix)?;
    Ok(FoldySystem { matrix, c, lu })
}

/// Solve `B Q = V` for all incidences at once; relative residual ≤ 1e−10.
pub fn solve_charges(system: &FoldySystem, rhs: &Mat<C64>) -> Result<Charges> {
    let m = system.len();
    if rhs.nrows() != m {
        return Err(Error::Mismatch(format!("right-hand side has {} rows for {m} holes", rhs.nrows())));
    }
    let mut q = system.lu.solve(rhs);
    let mut r = rhs - &system.matrix * &q;
    let norm = |a: &Mat<C64>, j: usize| (0..m).map(|i| a[(i, j)].norm_sqr()).sum::<f64>().sqrt();
    let worst = |r: &Mat<C64>| {
        (0..rhs.ncols())
            .map(|j| {
                let b = norm(rhs, j);
                if b == 0.0 {
                    norm(r, j)
                } else {
                    norm(r, j) / b
                }
            })
            .fold(0.0, f64::max)
    };
    if worst(&r) > 1e-12 {
        q += system.lu.solve(&r);
        r = rhs - &system.matrix * &q;
    }
    let rel = worst(&r);
    if rel > 1e-10 {
        return Err(Error::Singular(format!(
            "Foldy solve residual {rel:.3e} above 1e-10 (pivot ratio {:.3e})",
            system.pivot_ratio()
        )));
    }
    Ok(Charges { q })
}

/// `F(x̂_i, θ_t) = V_n^∞(x̂_i, θ_t) + Σ_m V_n^t(z_m, −x̂_i) Q_m(θ_t)`.
///
/// `vt_minus_xhat[(m, i)]` holds `V_n^t(z_m, −x̂_i)`.
pub fn far_field_foldy(charges: &Charges, vt_minus_xhat: &Mat<C64>, background_far: &FarField) -> Result<FarField> {
    let (m, nt) = (charges.q.nrows(), charges.q.ncols());
    if vt_minus_xhat.nrows() != m {
        return Err(Error::Mismatch("observation fields and charges disagree on the hole count".into()));
    }
    let nx = vt_minus_xhat.ncols();
    if background_far.n_xhat() != nx || background_far.n_theta() != nt {
        return Err(Error::Mismatch(format!(
            "background far field is {}x{}, charges give {nx}x{nt}",
            background_far.n_xhat(),
            background_far.n_theta()
        )));
    }
    let s = vt_minus_xhat.transpose() * &charges.q;
    Ok(FarField::from_fn(nx, nt, |x, t| background_far.get(x, t) + s[(x, t)]))
}

/// Everything produced by one Foldy-Lax run on a sphere grid.
pub struct SimulateOutput {
    pub far_field: FarField,
    pub background_far: FarField,
    pub charges: Charges,
    /// `V_n^t(z_m, θ)` (holes × incidences).
    pub rhs: Mat<C64>,
}

/// Foldy-Lax far field for all pairs of sphere-grid directions.
pub fn simulate(set: &ScattererSet, background: &Background, sphere: &SphereGrid) -> Result<SimulateOutput> {
    let dirs = &sphere.directions;
    let pw = background.plane_waves(dirs)?;
    let background_far = pw.far_field(dirs);
    if set.is_empty() {
        return Ok(SimulateOutput {
            far_field: background_far.clone(),
            background_far,
            charges: Charges { q: Mat::zeros(0, dirs.len()) },
            rhs: Mat::zeros(0, dirs.len()),
        });
    }
    let rhs = pw.at_points(&set.centers());
    let system = assemble_system(set, background)?;
    let charges = solve_charges(&system, &rhs)?;
    // V_n^t(z_m, −x̂_i) is the column of the antipodal direction
    let anti = Mat::from_fn(rhs.nrows(), dirs.len(), |m, i| rhs[(m, sphere.antipode(i))]);
    let far_field = far_field_foldy(&charges, &anti, &background_far)?;
    Ok(SimulateOutput { far_field, background_far, charges, rhs })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::background::plane_wave;
    use crate::config::{make_sphere_grid, Wavenumber};
    use crate::geometry::BodySpec;

    fn vac(k: f64) -> Background {
        Background::vacuum(Wavenumber::unbounded(k).unwrap())
    }

    #[test]
    fn single_hole() {
        let set = ScattererSet::from_centers(&[[0.0; 3]], 0.1, 0.0, &BodySpec::ball(1.0), C64::new(1.0, 0.0));
        let g = make_sphere_grid(3).unwrap();
        let out = simulate(&set, &vac(1.0), &g).unwrap();
        let c1 = set.holes[0].c;
        for v in out.far_field.values() {
            assert!((v + c1).norm() < 1e-14);
        }
    }

    #[test]
    fn zero_impedance_rejected() {
        let set = ScattererSet::from_centers(&[[0.0; 3]], 0.1, 0.0, &BodySpec::ball(1.0), C64::new(0.0, 0.0));
        let e = assemble_system(&set, &vac(1.0)).unwrap_err();
        assert!(e.to_string().contains("zero impedance"));
    }

    #[test]
    fn no_holes_gives_background() {
        let set = ScattererSet::from_centers(&[], 0.1, 0.0, &BodySpec::ball(1.0), C64::new(1.0, 0.0));
        let g = make_sphere_grid(2).unwrap();
        let out = simulate(&set, &vac(1.0), &g).unwrap();
        assert_eq!(out.far_field.sup_norm(), 0.0);
    }

    #[test]
    fn coincident_centres_rejected() {
        let set = ScattererSet::from_centers(&[[0.0; 3], [0.0; 3]], 0.1, 0.0, &BodySpec::ball(1.0), C64::new(1.0, 0.0));
        assert!(assemble_system(&set, &vac(1.0)).is_err());
    }

    #[test]
    fn two_holes_symmetric_matrix() {
        let z = [[0.0; 3], [0.3, 0.1, 0.0]];
        let set = ScattererSet::from_centers(&z, 0.05, 0.0, &BodySpec::ball(1.0), C64::new(1.0, 0.0));
        let sys = assemble_system(&set, &vac(2.0)).unwrap();
        assert_eq!(sys.matrix[(0, 1)], sys.matrix[(1, 0)]);
        let th = [0.0, 0.0, 1.0];
        let rhs = Mat::from_fn(2, 1, |m, _| plane_wave(2.0, th, z[m]));
        let q = solve_charges(&sys, &rhs).unwrap();
        assert!(q.max_abs() > 0.0);
    }
}
