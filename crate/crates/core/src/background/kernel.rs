use crate::config::Wavenumber;
use crate::point::{dist, dot, Point};
use crate::{Error, Result, C64};
use std::f64::consts::PI;

/// Outgoing free-space kernel `e^{iκ|x−y|} / (4π|x−y|)`.
pub fn free_green(x: Point, y: Point, kappa: Wavenumber) -> Result<C64> {
    let r = dist(x, y);
    if r == 0.0 {
        return Err(Error::Domain("free_green is singular at x = y".into()));
    }
    Ok(phi(r, kappa.value()))
}

#[inline]
pub(crate) fn phi(r: f64, kappa: f64) -> C64 {
    C64::from_polar(1.0 / (4.0 * PI * r), kappa * r)
}

/// Radius of the ball with the volume of a cube of side `h`.
pub fn equal_volume_radius(h: f64) -> f64 {
    (3.0 * h * h * h / (4.0 * PI)).cbrt()
}

/// `∫_{|y|<r} Φ_κ(0, y) dy = (e^{iκr}(1 − iκr) − 1) / κ²`, with its Taylor
/// series for small `κr`.
pub fn ball_integral(r: f64, kappa: f64) -> C64 {
    let x = kappa * r;
    if x < 1e-2 {
        // Σ (iκ)^n r^{n+2} / (n! (n+2))
        let mut sum = C64::new(0.0, 0.0);
        let mut term = C64::new(r * r, 0.0);
        for n in 0..12 {
            sum += term / (n as f64 + 2.0);
            term *= C64::new(0.0, x) / (n as f64 + 1.0);
        }
        sum
    } else {
        let e = C64::from_polar(1.0, x);
        (e * C64::new(1.0, -x) - 1.0) / (kappa * kappa)
    }
}

/// Self-cell weight of a cube of side `h`: the ball integral over the
/// equal-volume ball.
pub fn self_weight(h: f64, kappa: f64) -> C64 {
    ball_integral(equal_volume_radius(h), kappa)
}

/// Plane wave `e^{iκ d·x}`.
#[inline]
pub fn plane_wave(kappa: f64, d: Point, x: Point) -> C64 {
    C64::from_polar(1.0, kappa * dot(d, x))
}
