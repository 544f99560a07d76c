use super::ShapeFactor;
use crate::config::{MediumSpec, ScalarField};
use crate::geometry::ScattererSet;
use crate::point::Point;
use crate::{Error, Result, C64};
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;
use std::io::Write;

/// Relation between λ̃₀ and the effective index.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum IndexConvention {
    /// `ñ² = n² + (K+1)P₀λ̃₀`, the form entering the equivalent potential.
    Standard,
    /// `ñ² = n² + 2π(K+1)P₀λ̃₀`, the alternative with π factors.
    TwoPi,
}

impl IndexConvention {
    fn factor(self) -> f64 {
        match self {
            IndexConvention::Standard => 1.0,
            IndexConvention::TwoPi => 2.0 * PI,
        }
    }
}

/// Passive root of `n² + c(K+1)P₀λ̃₀`, or `None` when that is zero.
///
/// The principal root is negated when its imaginary part is negative. For a
/// real root the sign follows `Im λ̃₀`: negative only if `Im λ̃₀ < 0`.
pub fn effective_index_point(n: C64, k: f64, p0: f64, lambda_tilde: C64, conv: IndexConvention) -> Option<C64> {
    let sq = n * n + lambda_tilde * ((k + 1.0) * p0 * conv.factor());
    if sq == C64::new(0.0, 0.0) {
        return None;
    }
    let mut r = sq.sqrt();
    if r.im < 0.0 {
        r = -r;
    } else if r.im == 0.0 {
        r = C64::new(r.re.abs(), 0.0);
        if lambda_tilde.im < 0.0 {
            r = -r;
        }
    }
    Some(r)
}

/// Effective index sampled at a list of points.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct EffectiveIndex {
    pub points: Vec<Point>,
    /// `ñ` per point, `None` where `ñ² = 0`.
    pub values: Vec<Option<C64>>,
    /// Indices of points where the branch is undefined.
    pub undefined: Vec<usize>,
    /// `Im ñ ≥ 0` at every defined point.
    pub passive: bool,
}

impl EffectiveIndex {
    /// `sign(Re ñ)` per point (0 when undefined or on the imaginary axis).
    pub fn re_signs(&self) -> Vec<i8> {
        self.values
            .iter()
            .map(|v| match v {
                Some(z) if z.re > 0.0 => 1,
                Some(z) if z.re < 0.0 => -1,
                _ => 0,
            })
            .collect()
    }

    /// CSV with columns `x,y,z,re,im,defined`.
    pub fn write_csv<W: Write>(&self, mut w: W) -> Result<()> {
        writeln!(w, "x,y,z,re,im,defined")?;
        for (p, v) in self.points.iter().zip(&self.values) {
            let z = v.unwrap_or(C64::new(f64::NAN, f64::NAN));
            writeln!(w, "{:e},{:e},{:e},{:e},{:e},{}", p[0], p[1], p[2], z.re, z.im, v.is_some() as u8)?;
        }
        Ok(())
    }
}

pub fn effective_index(
    medium: &MediumSpec,
    p0: &ShapeFactor,
    lambda_tilde: &ScalarField,
    points: &[Point],
    conv: IndexConvention,
) -> EffectiveIndex {
    let values: Vec<Option<C64>> = points
        .iter()
        .map(|&x| {
            let inside = medium.domain.contains(x);
            let lt = if inside { lambda_tilde.eval(x) } else { C64::new(0.0, 0.0) };
            effective_index_point(medium.n_at(x), medium.k_at(x), p0.at(medium, x), lt, conv)
        })
        .collect();
    let undefined = values.iter().enumerate().filter(|(_, v)| v.is_none()).map(|(i, _)| i).collect();
    let passive = values.iter().flatten().all(|z| z.im >= 0.0);
    EffectiveIndex { points: points.to_vec(), values, undefined, passive }
}

/// `λ̃₀ = (1 − n²)/((K+1)P₀)` at each point of Ω.
pub fn cloak_coefficient(medium: &MediumSpec, p0: &ShapeFactor, points: &[Point]) -> Result<Vec<C64>> {
    points
        .iter()
        .map(|&x| {
            let denom = (medium.k_at(x) + 1.0) * p0.at(medium, x);
            if denom == 0.0 {
                return Err(Error::Domain(format!("cloak coefficient: (K+1)P₀ = 0 at {x:?}")));
            }
            let n = medium.n_at(x);
            Ok((C64::new(1.0, 0.0) - n * n) / denom)
        })
        .collect()
}

/// Per-hole schedule `λ_m = λ̃₀(z_m) κ² a^{−β}` for the cloak.
pub fn cloak_schedule(set: &ScattererSet, medium: &MediumSpec, p0: &ShapeFactor, kappa: f64) -> Result<Vec<C64>> {
    let lt = cloak_coefficient(medium, p0, &set.centers())?;
    let s = kappa * kappa * set.a.powf(-set.beta);
    Ok(lt.into_iter().map(|l| l * s).collect())
}

/// CSV with columns `m,z_x,z_y,z_z,lambda_re,lambda_im`.
pub fn write_schedule_csv<W: Write>(set: &ScattererSet, lambdas: &[C64], mut w: W) -> Result<()> {
    if lambdas.len() != set.len() {
        return Err(Error::Mismatch(format!("schedule has {} entries for {} holes", lambdas.len(), set.len())));
    }
    writeln!(w, "m,z_x,z_y,z_z,lambda_re,lambda_im")?;
    for (m, (h, l)) in set.holes.iter().zip(lambdas).enumerate() {
        writeln!(w, "{m},{:e},{:e},{:e},{:e},{:e}", h.center[0], h.center[1], h.center[2], l.re, l.im)?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    const ONE: C64 = C64::new(1.0, 0.0);

    #[test]
    fn real_impedance_positive_branch() {
        let z = effective_index_point(ONE, 0.0, 1.0, C64::new(3.0, 0.0), IndexConvention::Standard).unwrap();
        assert!((z - C64::new(2.0, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn metamaterial_limit() {
        for d in [1e-2, 1e-3, 1e-4] {
            let z = effective_index_point(ONE, 0.0, 1.0, C64::new(d, -d), IndexConvention::Standard).unwrap();
            assert!(z.im > 0.0);
            assert!((z.re + 1.0).abs() <= 5.0 * d);
            assert!((z.im - d / 2.0).abs() < d * d);
        }
    }

    #[test]
    fn zero_square_is_undefined() {
        assert!(effective_index_point(ONE, 0.0, 1.0, C64::new(-1.0, 0.0), IndexConvention::Standard).is_none());
    }

    #[test]
    fn two_pi_convention_components() {
        let (n, k, p, l) = (1.5, 0.5, 2.0, C64::new(0.1, 0.03));
        let z = effective_index_point(C64::new(n, 0.0), k, p, l, IndexConvention::TwoPi).unwrap();
        assert!((z.re * z.re - z.im * z.im - (n * n + 2.0 * PI * (k + 1.0) * p * l.re)).abs() < 1e-12);
        assert!((z.re * z.im - PI * (k + 1.0) * p * l.im).abs() < 1e-12);
    }

    #[test]
    fn cloak_coefficients() {
        let mut m = MediumSpec::homogeneous(C64::new(0.0, 0.0));
        let pts = [[0.5; 3]];
        let p = ShapeFactor::Uniform { p: PI };
        assert_eq!(cloak_coefficient(&m, &p, &pts).unwrap()[0], C64::new(0.0, 0.0));
        m.n = ScalarField::constant(2.0);
        let l = cloak_coefficient(&m, &p, &pts).unwrap()[0];
        assert!((l.re + 0.954_929_658_551_372).abs() < 1e-12);
        let e = effective_index(&m, &p, &ScalarField::constant_c(l), &pts, IndexConvention::Standard);
        assert!((e.values[0].unwrap() - ONE).norm() < 1e-14);
        assert!(cloak_coefficient(&m, &ShapeFactor::Uniform { p: 0.0 }, &pts).is_err());
    }

    proptest! {
        #[test]
        fn square_identity_and_sign(n in 0.1f64..3.0, ni in 0.0f64..0.5, k in 0.0f64..3.0, p in 0.1f64..4.0,
                                    lr in -2.0f64..2.0, li in -2.0f64..2.0) {
            let nn = C64::new(n, ni);
            let l = C64::new(lr, li);
            if let Some(z) = effective_index_point(nn, k, p, l, IndexConvention::Standard) {
                let want = nn * nn + l * ((k + 1.0) * p);
                prop_assert!((z * z - want).norm() <= 1e-12 * want.norm().max(1.0));
                prop_assert!(z.im >= 0.0);
            }
        }

        #[test]
        fn passive_sign_theorem(n in 0.1f64..3.0, k in 0.0f64..3.0, p in 0.1f64..4.0,
                                lr in -2.0f64..2.0, li in 1e-6f64..2.0) {
            let nn = C64::new(n, 0.0);
            let up = effective_index_point(nn, k, p, C64::new(lr, li), IndexConvention::Standard).unwrap();
            prop_assert!(up.re > 0.0);
            let down = effective_index_point(nn, k, p, C64::new(lr, -li), IndexConvention::Standard).unwrap();
            prop_assert!(down.re < 0.0);
        }
    }
}
