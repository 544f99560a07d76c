//! Partial-wave far field of a homogeneous penetrable ball.

use super::bessel::{derivatives, sph_j, sph_y};
use crate::config::SphereGrid;
use crate::point::{dot, Point};
use crate::{Error, Result, FarField, C64};
use std::f64::consts::PI;

/// Coefficients `A_0 .. A_lmax` for radius `r`, index contrast `n² − 1` and
/// wavenumber `κ > 0`.
pub fn mie_coefficients_upto(radius: f64, contrast: C64, kappa: f64, lmax: usize) -> Result<Vec<C64>> {
    if !(radius > 0.0) || !(kappa > 0.0) {
        return Err(Error::Domain("Mie series needs radius > 0 and kappa > 0".into()));
    }
    let x = kappa * radius;
    let k1 = (C64::new(1.0, 0.0) + contrast).sqrt() * kappa;
    let z1 = k1 * radius;
    let jx = sph_j(lmax + 1, C64::new(x, 0.0));
    let yx = sph_y(lmax + 1, x);
    let jz = sph_j(lmax + 1, z1);
    let djx = derivatives(&jx, C64::new(x, 0.0));
    let djz = derivatives(&jz, z1);
    let hx: Vec<C64> = jx.iter().zip(&yx).map(|(j, y)| j + C64::new(0.0, *y)).collect();
    let dhx = derivatives(&hx, C64::new(x, 0.0));
    let mut out = Vec::with_capacity(lmax + 1);
    for l in 0..=lmax {
        let num = k1 * jx[l] * djz[l] - djx[l] * jz[l] * kappa;
        let den = dhx[l] * jz[l] * kappa - k1 * hx[l] * djz[l];
        let al = if contrast == C64::new(0.0, 0.0) { C64::new(0.0, 0.0) } else { num / den };
        if !al.re.is_finite() || !al.im.is_finite() {
            return Err(Error::NoConvergence(format!(
                "Mie coefficient {l} is not finite; request an order below {l}"
            )));
        }
        out.push(al);
    }
    Ok(out)
}

/// Coefficients truncated at the first order beyond `κR` whose term
/// `(2l+1)|A_l|` is below `1e−12` of the largest.
pub fn mie_coefficients(radius: f64, contrast: C64, kappa: f64) -> Result<Vec<C64>> {
    let x = kappa * radius;
    let lmax = (x + 4.0 * x.cbrt() + 25.0).ceil() as usize;
    let all = mie_coefficients_upto(radius, contrast, kappa, lmax)?;
    let peak = all.iter().enumerate().map(|(l, a)| a.norm() * (2 * l + 1) as f64).fold(0.0, f64::max);
    if peak == 0.0 {
        return Ok(all[..1].to_vec());
    }
    for (l, a) in all.iter().enumerate() {
        if l >= 2 && (l as f64) > x && a.norm() * ((2 * l + 1) as f64) < 1e-12 * peak {
            return Ok(all[..=l].to_vec());
        }
    }
    Err(Error::NoConvergence(format!(
        "Mie series not converged by order {lmax}; try an order above {}",
        2 * lmax
    )))
}

/// Sum the series with the first `order + 1` coefficients only.
pub fn mie_far_field_truncated(coeffs: &[C64], kappa: f64, xhats: &[Point], thetas: &[Point]) -> FarField {
    FarField::from_fn(xhats.len(), thetas.len(), |i, t| {
        let c = dot(xhats[i], thetas[t]).clamp(-1.0, 1.0);
        let (mut p0, mut p1) = (1.0, c);
        let mut s = C64::new(0.0, 0.0);
        for (l, al) in coeffs.iter().enumerate() {
            let pl = match l {
                0 => 1.0,
                1 => c,
                _ => {
                    let p2 = ((2 * l - 1) as f64 * c * p1 - (l - 1) as f64 * p0) / l as f64;
                    p0 = p1;
                    p1 = p2;
                    p2
                }
            };
            s += al * ((2 * l + 1) as f64 * pl);
        }
        s * C64::new(0.0, -4.0 * PI / kappa)
    })
}

/// Far field for observation directions `xhats` and incidences `thetas`.
pub fn mie_far_field(radius: f64, contrast: C64, kappa: f64, xhats: &[Point], thetas: &[Point]) -> Result<FarField> {
    let c = mie_coefficients(radius, contrast, kappa)?;
    Ok(mie_far_field_truncated(&c, kappa, xhats, thetas))
}

/// Far field on sphere-grid pairs for a ball centred at the origin.
pub fn mie_ball_oracle(radius: f64, contrast: C64, kappa: f64, sphere: &SphereGrid) -> Result<FarField> {
    mie_far_field(radius, contrast, kappa, &sphere.directions, &sphere.directions)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::make_sphere_grid;

    #[test]
    fn zero_contrast() {
        let g = make_sphere_grid(3).unwrap();
        let f = mie_ball_oracle(1.0, C64::new(0.0, 0.0), 1.0, &g).unwrap();
        assert_eq!(f.sup_norm(), 0.0);
    }

    #[test]
    fn born_limit() {
        // U∞ → κ²·contrast·(4/3)πR³ as κ → 0
        let (r, q, k) = (1.0, 0.01, 0.01);
        let g = make_sphere_grid(2).unwrap();
        let f = mie_ball_oracle(r, C64::new(q, 0.0), k, &g).unwrap();
        let born = k * k * q * 4.0 / 3.0 * PI * r * r * r;
        for v in f.values() {
            assert!((v.re - born).abs() < 1e-3 * born, "{v} vs {born}");
        }
    }

    #[test]
    fn truncation_stable() {
        let g = make_sphere_grid(4).unwrap();
        let c = mie_coefficients(1.0, C64::new(0.3, 0.05), 3.0).unwrap();
        let l = c.len() - 1;
        let longer = mie_coefficients_upto(1.0, C64::new(0.3, 0.05), 3.0, l + 5).unwrap();
        let f0 = mie_far_field_truncated(&c, 3.0, &g.directions, &g.directions);
        let f1 = mie_far_field_truncated(&longer, 3.0, &g.directions, &g.directions);
        assert!(f1.sup_diff(&f0).unwrap() < 1e-10);
    }

    #[test]
    fn optical_theorem() {
        // real contrast: Im U∞(θ,θ)/κ equals ∫|U∞|² / (4π)² over S²
        let g = make_sphere_grid(12).unwrap();
        let k = 2.0;
        let theta = [[0.0, 0.0, 1.0]];
        let f = mie_far_field(1.0, C64::new(0.5, 0.0), k, &g.directions, &theta).unwrap();
        let fwd = mie_far_field(1.0, C64::new(0.5, 0.0), k, &theta, &theta).unwrap().get(0, 0);
        let integral: f64 = (0..g.len()).map(|i| g.weights[i] * f.get(i, 0).norm_sqr()).sum();
        let lhs = fwd.im / k;
        let rhs = integral / (16.0 * PI * PI);
        assert!((lhs - rhs).abs() < 1e-8 * rhs, "{lhs} vs {rhs}");
    }
}
