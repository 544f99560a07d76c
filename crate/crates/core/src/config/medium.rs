use super::{Domain, ScalarField};
use crate::point::Point;
use crate::{Error, Result, C64};
use serde::{Deserialize, Serialize};

/// The impedance profile λ₀.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "mode", rename_all = "snake_case")]
pub enum Impedance {
    /// λ₀ given directly, or as λ̃₀ with λ₀ = λ̃₀ κ² when `kappa_scaled`.
    Field { field: ScalarField, kappa_scaled: bool },
    /// λ₀ = κ²(1 − n²)/((K+1)P₀), cancelling the background contrast.
    Cloak,
}

/// Background medium, hole density and impedance profile on Ω.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MediumSpec {
    pub domain: Domain,
    pub n: ScalarField,
    pub k: ScalarField,
    pub lambda0: Impedance,
    pub gamma: f64,
}

impl MediumSpec {
    /// n ≡ 1, K ≡ 0 on the unit cube with constant λ₀.
    pub fn homogeneous(lambda0: C64) -> Self {
        Self {
            domain: Domain::unit_cube(),
            n: ScalarField::constant(1.0),
            k: ScalarField::constant(0.0),
            lambda0: Impedance::Field { field: ScalarField::constant_c(lambda0), kappa_scaled: false },
            gamma: 1.0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.domain.validate()?;
        self.n.validate()?;
        self.k.validate()?;
        if let Impedance::Field { field, .. } = &self.lambda0 {
            field.validate()?;
        }
        if !(self.gamma > 0.0 && self.gamma <= 1.0) {
            return Err(Error::Config(format!("Hölder exponent gamma = {} must lie in (0, 1]", self.gamma)));
        }
        let (lo, hi) = self.domain.bounding_box();
        let probes = 9;
        for i in 0..probes {
            for j in 0..probes {
                for l in 0..probes {
                    let f = |d: usize, t: usize| lo[d] + (hi[d] - lo[d]) * t as f64 / (probes - 1) as f64;
                    let x = [f(0, i), f(1, j), f(2, l)];
                    if !self.domain.contains(x) {
                        continue;
                    }
                    let kv = self.k.eval(x);
                    if kv.re < 0.0 || kv.im != 0.0 {
                        return Err(Error::Domain(format!("K must be real and >= 0 on Ω, got {kv} at {x:?}")));
                    }
                }
            }
        }
        Ok(())
    }

    /// Refractive index, identically one outside Ω.
    pub fn n_at(&self, x: Point) -> C64 {
        if self.domain.contains(x) {
            self.n.eval(x)
        } else {
            C64::new(1.0, 0.0)
        }
    }

    /// Hole density K, zero outside Ω.
    pub fn k_at(&self, x: Point) -> f64 {
        if self.domain.contains(x) {
            self.k.eval(x).re
        } else {
            0.0
        }
    }

    /// Number of holes [K(x)+1] in the cell containing x.
    pub fn holes_per_cell(&self, x: Point) -> usize {
        (self.k_at(x) + 1.0 + 1e-12).floor() as usize
    }

    /// Background contrast κ²(n² − 1).
    pub fn background_potential(&self, x: Point, kappa: f64) -> C64 {
        let n = self.n_at(x);
        (n * n - 1.0) * (kappa * kappa)
    }

    /// λ₀(x) for shape factor `p`.
    pub fn lambda0_at(&self, x: Point, kappa: f64, p: f64) -> Result<C64> {
        match &self.lambda0 {
            Impedance::Field { field, kappa_scaled } => {
                let v = field.eval(x);
                Ok(if *kappa_scaled { v * (kappa * kappa) } else { v })
            }
            Impedance::Cloak => {
                let denom = (self.k_at(x) + 1.0) * p;
                if denom == 0.0 {
                    return Err(Error::Domain(format!("cloak impedance needs (K+1)P₀ > 0, zero at {x:?}")));
                }
                Ok(-self.background_potential(x, kappa) / denom)
            }
        }
    }

    /// Hole contribution (K+1)P₀λ₀ to the equivalent potential on Ω.
    ///
    /// In cloak mode this is the exact negative of [`Self::background_potential`].
    pub fn hole_potential(&self, x: Point, kappa: f64, p: f64) -> Result<C64> {
        if !self.domain.contains(x) {
            return Ok(C64::new(0.0, 0.0));
        }
        match &self.lambda0 {
            Impedance::Cloak => {
                if (self.k_at(x) + 1.0) * p == 0.0 {
                    return Err(Error::Domain(format!("cloak impedance needs (K+1)P₀ > 0, zero at {x:?}")));
                }
                Ok(-self.background_potential(x, kappa))
            }
            Impedance::Field { .. } => Ok(self.lambda0_at(x, kappa, p)? * ((self.k_at(x) + 1.0) * p)),
        }
    }

    /// True when n ≡ 1 is known analytically.
    pub fn is_vacuum(&self) -> bool {
        self.n.as_constant() == Some(C64::new(1.0, 0.0))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn index_is_one_outside() {
        let mut m = MediumSpec::homogeneous(C64::new(1.0, 0.0));
        m.n = ScalarField::constant(2.0);
        assert_eq!(m.n_at([0.5; 3]), C64::new(2.0, 0.0));
        assert_eq!(m.n_at([2.0, 0.5, 0.5]), C64::new(1.0, 0.0));
    }

    #[test]
    fn rejects_negative_k_and_bad_gamma() {
        let mut m = MediumSpec::homogeneous(C64::new(1.0, 0.0));
        m.k = ScalarField::constant(-0.5);
        assert!(m.validate().is_err());
        let mut m = MediumSpec::homogeneous(C64::new(1.0, 0.0));
        m.gamma = 1.5;
        assert!(m.validate().is_err());
    }

    #[test]
    fn holes_per_cell_floor() {
        let mut m = MediumSpec::homogeneous(C64::new(1.0, 0.0));
        m.k = ScalarField::constant(1.5);
        assert_eq!(m.holes_per_cell([0.5; 3]), 2);
    }

    #[test]
    fn cloak_cancels_exactly() {
        let mut m = MediumSpec::homogeneous(C64::new(0.0, 0.0));
        m.n = ScalarField::constant(2.0);
        m.lambda0 = Impedance::Cloak;
        let x = [0.3, 0.4, 0.5];
        let kappa = 0.7;
        let q = m.background_potential(x, kappa) + m.hole_potential(x, kappa, std::f64::consts::PI).unwrap();
        assert_eq!(q, C64::new(0.0, 0.0));
        assert!(m.lambda0_at(x, kappa, 0.0).is_err());
    }
}
