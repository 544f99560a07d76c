use crate::point::Point;
use crate::{Error, Result};
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

/// Product quadrature on S²: Gauss-Legendre in cos θ times a uniform azimuth.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SphereGrid {
    pub order: usize,
    pub directions: Vec<Point>,
    pub weights: Vec<f64>,
}

/// Legendre polynomial P_n and its derivative at z.
fn legendre(n: usize, z: f64) -> (f64, f64) {
    let (mut p0, mut p1) = (1.0, z);
    if n == 0 {
        return (1.0, 0.0);
    }
    for k in 2..=n {
        let p2 = ((2 * k - 1) as f64 * z * p1 - (k - 1) as f64 * p0) / k as f64;
        p0 = p1;
        p1 = p2;
    }
    // derivative from P_n and P_{n-1}; z = ±1 never occurs at a root
    let dp = n as f64 * (z * p1 - p0) / (z * z - 1.0);
    (p1, dp)
}

/// Gauss-Legendre nodes and weights on [-1, 1], ascending.
pub(crate) fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut x = vec![0.0; n];
    let mut w = vec![0.0; n];
    for i in 0..n.div_ceil(2) {
        let mut z = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        for _ in 0..100 {
            let (p, dp) = legendre(n, z);
            let dz = p / dp;
            z -= dz;
            if dz.abs() < 1e-16 {
                break;
            }
        }
        if n % 2 == 1 && i == n / 2 {
            z = 0.0;
        }
        let (_, dp) = legendre(n, z);
        let wi = 2.0 / ((1.0 - z * z) * dp * dp);
        x[i] = -z;
        x[n - 1 - i] = z;
        w[i] = wi;
        w[n - 1 - i] = wi;
    }
    (x, w)
}

/// Direction grid with `2·order²` points, exact for spherical harmonics of
/// degree below `2·order`.
pub fn make_sphere_grid(order: usize) -> Result<SphereGrid> {
    if order == 0 {
        return Err(Error::Config("sphere grid order must be >= 1".into()));
    }
    let (x, w) = gauss_legendre(order);
    let nphi = 2 * order;
    let mut directions = Vec::with_capacity(order * nphi);
    let mut weights = Vec::with_capacity(order * nphi);
    for i in 0..order {
        let ct = x[i];
        let st = (1.0 - ct * ct).max(0.0).sqrt();
        for k in 0..nphi {
            let phi = PI * k as f64 / order as f64;
            let d = [st * phi.cos(), st * phi.sin(), ct];
            let n = (d[0] * d[0] + d[1] * d[1] + d[2] * d[2]).sqrt();
            directions.push([d[0] / n, d[1] / n, d[2] / n]);
            weights.push(w[i] * PI / order as f64);
        }
    }
    Ok(SphereGrid { order, directions, weights })
}

impl SphereGrid {
    pub fn len(&self) -> usize {
        self.directions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.directions.is_empty()
    }

    /// Index of the direction `-directions[i]`; the grid is antipodally symmetric.
    pub fn antipode(&self, i: usize) -> usize {
        let nphi = 2 * self.order;
        let (it, k) = (i / nphi, i % nphi);
        (self.order - 1 - it) * nphi + (k + self.order) % nphi
    }

    pub fn integrate(&self, f: impl Fn(Point) -> f64) -> f64 {
        self.directions.iter().zip(&self.weights).map(|(d, w)| w * f(*d)).sum()
    }
}
