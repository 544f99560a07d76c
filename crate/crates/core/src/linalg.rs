//! Dense LU wrapper and a restarted GMRES for complex systems.

use crate::{Error, Result, C64};
use faer::linalg::solvers::PartialPivLu;
use faer::prelude::*;
use faer::Mat;

/// Pivot ratio below which a dense factorisation is reported as singular.
pub const SINGULAR_PIVOT_RATIO: f64 = 1e-13;

/// A factored dense complex matrix.
pub struct DenseLu {
    n: usize,
    lu: PartialPivLu<C64>,
    pivot_ratio: f64,
}

impl DenseLu {
    pub fn factor(m: &Mat<C64>) -> Result<Self> {
        let n = m.nrows();
        if m.ncols() != n {
            return Err(Error::Mismatch("LU of a non-square matrix".into()));
        }
        if m.col_iter().any(|c| c.iter().any(|v| !v.re.is_finite() || !v.im.is_finite())) {
            return Err(Error::Singular("matrix has non-finite entries".into()));
        }
        let lu = m.partial_piv_lu();
        let (mut lo, mut hi) = (f64::INFINITY, 0.0f64);
        {
            let u = lu.U();
            for i in 0..n {
                let p = u[(i, i)].norm();
                lo = lo.min(p);
                hi = hi.max(p);
            }
        }
        let pivot_ratio = if n == 0 { 1.0 } else if hi > 0.0 { lo / hi } else { 0.0 };
        if !(pivot_ratio > SINGULAR_PIVOT_RATIO) {
            return Err(Error::Singular(format!(
                "pivot ratio {pivot_ratio:.3e} below {SINGULAR_PIVOT_RATIO:e} (n = {n})"
            )));
        }
        Ok(Self { n, lu, pivot_ratio })
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    /// Smallest over largest pivot magnitude, a cheap conditioning hint.
    pub fn pivot_ratio(&self) -> f64 {
        self.pivot_ratio
    }

    pub fn solve(&self, rhs: &Mat<C64>) -> Mat<C64> {
        self.lu.solve(rhs)
    }

    pub fn solve_vec(&self, rhs: &[C64]) -> Vec<C64> {
        let b = Mat::from_fn(rhs.len(), 1, |i, _| rhs[i]);
        let x = self.lu.solve(&b);
        (0..rhs.len()).map(|i| x[(i, 0)]).collect()
    }
}

pub fn vec_norm(v: &[C64]) -> f64 {
    v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

/// Column `j` of a matrix as a vector.
pub fn col_vec(m: &Mat<C64>, j: usize) -> Vec<C64> {
    (0..m.nrows()).map(|i| m[(i, j)]).collect()
}

/// Matrix with the given columns.
pub fn mat_from_cols(cols: &[Vec<C64>], nrows: usize) -> Mat<C64> {
    Mat::from_fn(nrows, cols.len(), |i, j| cols[j][i])
}

/// Outcome of an iterative solve.
#[derive(Clone, Copy, Debug)]
pub struct GmresStats {
    pub iterations: usize,
    pub rel_residual: f64,
}

/// Restarted GMRES with modified Gram-Schmidt and Givens rotations.
///
/// `apply(x, y)` must write `A x` into `y`.
pub fn gmres<F>(apply: F, b: &[C64], tol: f64, restart: usize, max_iter: usize) -> Result<(Vec<C64>, GmresStats)>
where
    F: Fn(&[C64], &mut [C64]),
{
    let n = b.len();
    let zero = C64::new(0.0, 0.0);
    let bnorm = vec_norm(b);
    let mut x = vec![zero; n];
    if bnorm == 0.0 {
        return Ok((x, GmresStats { iterations: 0, rel_residual: 0.0 }));
    }
    let m = restart.max(1).min(n.max(1));
    let mut r = b.to_vec();
    let mut ax = vec![zero; n];
    let mut total = 0;
    loop {
        let beta = vec_norm(&r);
        let rel = beta / bnorm;
        if rel <= tol {
            return Ok((x, GmresStats { iterations: total, rel_residual: rel }));
        }
        if total >= max_iter {
            return Err(Error::NoConvergence(format!(
                "GMRES stalled at relative residual {rel:.3e} after {total} iterations"
            )));
        }
        let mut basis: Vec<Vec<C64>> = Vec::with_capacity(m + 1);
        basis.push(r.iter().map(|v| v / beta).collect());
        let mut h = vec![vec![zero; m]; m + 1];
        let mut cs = vec![zero; m];
        let mut sn = vec![zero; m];
        let mut g = vec![zero; m + 1];
        g[0] = C64::new(beta, 0.0);
        let mut k_used = 0;
        for k in 0..m {
            let mut w = vec![zero; n];
            apply(&basis[k], &mut w);
            for (i, v) in basis.iter().enumerate() {
                let hij: C64 = v.iter().zip(&w).map(|(a, b)| a.conj() * b).sum();
                h[i][k] = hij;
                for (wi, vi) in w.iter_mut().zip(v) {
                    *wi -= hij * vi;
                }
            }
            let wn = vec_norm(&w);
            h[k + 1][k] = C64::new(wn, 0.0);
            for i in 0..k {
                let t = cs[i].conj() * h[i][k] + sn[i].conj() * h[i + 1][k];
                h[i + 1][k] = -sn[i] * h[i][k] + cs[i] * h[i + 1][k];
                h[i][k] = t;
            }
            let (a, bb) = (h[k][k], h[k + 1][k]);
            let rho = (a.norm_sqr() + bb.norm_sqr()).sqrt();
            if rho == 0.0 {
                cs[k] = C64::new(1.0, 0.0);
                sn[k] = zero;
            } else {
                cs[k] = a / rho;
                sn[k] = bb / rho;
            }
            h[k][k] = C64::new(rho, 0.0);
            h[k + 1][k] = zero;
            g[k + 1] = -sn[k] * g[k];
            g[k] = cs[k].conj() * g[k];
            k_used = k + 1;
            total += 1;
            if g[k + 1].norm() / bnorm <= tol * 0.5 || wn == 0.0 || total >= max_iter {
                break;
            }
            basis.push(w.iter().map(|v| v / wn).collect());
        }
        let mut y = vec![zero; k_used];
        for i in (0..k_used).rev() {
            let mut s = g[i];
            for j in i + 1..k_used {
                s -= h[i][j] * y[j];
            }
            y[i] = s / h[i][i];
        }
        for (j, yj) in y.iter().enumerate() {
            for (xi, vi) in x.iter_mut().zip(&basis[j]) {
                *xi += yj * vi;
            }
        }
        apply(&x, &mut ax);
        for i in 0..n {
            r[i] = b[i] - ax[i];
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn test_matrix(n: usize) -> Mat<C64> {
        Mat::from_fn(n, n, |i, j| {
            if i == j {
                C64::new(3.0, 0.5)
            } else {
                C64::new(1.0 / (1.0 + (i as f64 - j as f64).abs()), 0.1 * ((i + 2 * j) % 3) as f64) / n as f64
            }
        })
    }

    #[test]
    fn lu_solves() {
        let a = test_matrix(20);
        let lu = DenseLu::factor(&a).unwrap();
        let b: Vec<C64> = (0..20).map(|i| C64::new(i as f64, 1.0)).collect();
        let x = lu.solve_vec(&b);
        let xm = Mat::from_fn(20, 1, |i, _| x[i]);
        let r = &a * &xm;
        for i in 0..20 {
            assert!((r[(i, 0)] - b[i]).norm() < 1e-12);
        }
    }

    #[test]
    fn lu_rejects_singular() {
        let a = Mat::from_fn(4, 4, |i, _| C64::new(i as f64, 0.0));
        assert!(matches!(DenseLu::factor(&a), Err(Error::Singular(_))));
    }

    #[test]
    fn gmres_matches_lu() {
        let n = 60;
        let a = test_matrix(n);
        let b: Vec<C64> = (0..n).map(|i| C64::new((i as f64).sin(), 0.3)).collect();
        let apply = |x: &[C64], y: &mut [C64]| {
            for i in 0..n {
                y[i] = (0..n).map(|j| a[(i, j)] * x[j]).sum();
            }
        };
        let (x, stats) = gmres(apply, &b, 1e-12, 7, 500).unwrap();
        assert!(stats.rel_residual <= 1e-12);
        let xref = DenseLu::factor(&a).unwrap().solve_vec(&b);
        for i in 0..n {
            assert!((x[i] - xref[i]).norm() < 1e-10);
        }
    }
}
