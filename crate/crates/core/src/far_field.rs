//! Far-field patterns sampled on pairs of directions.

use crate::{Error, Result, C64};
use serde::{Deserialize, Serialize};
use std::io::Write;

/// Far-field samples `F(x̂_i, θ_j)` stored row-major in the incidence index.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FarField {
    n_xhat: usize,
    n_theta: usize,
    values: Vec<C64>,
}

impl FarField {
    pub fn zeros(n_xhat: usize, n_theta: usize) -> Self {
        Self {
            n_xhat,
            n_theta,
            values: vec![C64::new(0.0, 0.0); n_xhat * n_theta],
        }
    }

    /// Build from a closure `f(xhat_idx, theta_idx)`.
    pub fn from_fn(n_xhat: usize, n_theta: usize, mut f: impl FnMut(usize, usize) -> C64) -> Self {
        let mut out = Self::zeros(n_xhat, n_theta);
        for t in 0..n_theta {
            for x in 0..n_xhat {
                out.values[t * n_xhat + x] = f(x, t);
            }
        }
        out
    }

    pub fn n_xhat(&self) -> usize {
        self.n_xhat
    }

    pub fn n_theta(&self) -> usize {
        self.n_theta
    }

    #[inline]
    pub fn get(&self, xhat: usize, theta: usize) -> C64 {
        self.values[theta * self.n_xhat + xhat]
    }

    #[inline]
    pub fn set(&mut self, xhat: usize, theta: usize, v: C64) {
        self.values[theta * self.n_xhat + xhat] = v;
    }

    pub fn values(&self) -> &[C64] {
        &self.values
    }

    pub fn sup_norm(&self) -> f64 {
        self.values.iter().map(|v| v.norm()).fold(0.0, f64::max)
    }

    fn check_shape(&self, other: &FarField) -> Result<()> {
        if self.n_xhat != other.n_xhat || self.n_theta != other.n_theta {
            return Err(Error::Mismatch(format!(
                "far-field shapes differ: {}x{} vs {}x{}",
                self.n_xhat, self.n_theta, other.n_xhat, other.n_theta
            )));
        }
        Ok(())
    }

    /// `sup |self - other|` over all sampled pairs.
    pub fn sup_diff(&self, other: &FarField) -> Result<f64> {
        self.check_shape(other)?;
        Ok(self
            .values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max))
    }

    pub fn add(&self, other: &FarField) -> Result<FarField> {
        self.check_shape(other)?;
        let mut out = self.clone();
        for (a, b) in out.values.iter_mut().zip(&other.values) {
            *a += b;
        }
        Ok(out)
    }

    /// Relative L2 error against `reference` with quadrature weights on the
    /// observation directions and equal weight across incidences.
    pub fn rel_l2(&self, reference: &FarField, xhat_weights: &[f64]) -> Result<f64> {
        self.check_shape(reference)?;
        if xhat_weights.len() != self.n_xhat {
            return Err(Error::Mismatch("weight count does not match directions".into()));
        }
        let (mut num, mut den) = (0.0, 0.0);
        for t in 0..self.n_theta {
            for (x, w) in xhat_weights.iter().enumerate() {
                num += w * (self.get(x, t) - reference.get(x, t)).norm_sqr();
                den += w * reference.get(x, t).norm_sqr();
            }
        }
        if den == 0.0 {
            return Err(Error::Mismatch("reference far field vanishes".into()));
        }
        Ok((num / den).sqrt())
    }

    /// CSV with columns `theta_idx,xhat_idx,re,im`.
    pub fn write_csv<W: Write>(&self, mut w: W) -> Result<()> {
        writeln!(w, "theta_idx,xhat_idx,re,im")?;
        for t in 0..self.n_theta {
            for x in 0..self.n_xhat {
                let v = self.get(x, t);
                writeln!(w, "{t},{x},{:e},{:e}", v.re, v.im)?;
            }
        }
        Ok(())
    }
}
