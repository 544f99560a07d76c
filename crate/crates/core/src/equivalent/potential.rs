use crate::config::{MediumSpec, ScalarField, VolumeGrid, Wavenumber};
use crate::point::Point;
use crate::{Error, Result, C64};
use serde::{Deserialize, Serialize};

/// The shape factor P₀ of the equivalent potential.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "mode", rename_all = "snake_case")]
pub enum ShapeFactor {
    /// `P₀ = P` on Ω and zero outside, for identical reference bodies.
    Uniform { p: f64 },
    /// A prescribed real field on Ω, for the heterogeneous demo.
    Field { field: ScalarField },
}

impl ShapeFactor {
    pub fn at(&self, medium: &MediumSpec, x: Point) -> f64 {
        if !medium.domain.contains(x) {
            return 0.0;
        }
        match self {
            ShapeFactor::Uniform { p } => *p,
            ShapeFactor::Field { field } => field.eval(x).re,
        }
    }
}

/// Samples of `q₀ = κ²(n² − 1) + (K+1)P₀λ₀` on the flagged cells, weighted
/// by each cell's volume fraction in Ω.
#[derive(Clone, Debug, PartialEq)]
pub struct EquivalentPotential {
    pub grid: VolumeGrid,
    pub kappa: f64,
    /// `κ²(n² − 1)`.
    pub background: Vec<C64>,
    /// `(K+1)P₀λ₀`.
    pub holes: Vec<C64>,
}

impl EquivalentPotential {
    /// `q₀` per flagged cell.
    pub fn total(&self) -> Vec<C64> {
        self.background.iter().zip(&self.holes).map(|(a, b)| a + b).collect()
    }

    pub fn is_zero(&self) -> bool {
        self.total().iter().all(|v| *v == C64::new(0.0, 0.0))
    }
}

pub fn build_equivalent_potential(
    medium: &MediumSpec,
    p0: &ShapeFactor,
    kappa: Wavenumber,
    grid: &VolumeGrid,
) -> Result<EquivalentPotential> {
    let k = kappa.value();
    let mut background = Vec::with_capacity(grid.n_flagged());
    let mut holes = Vec::with_capacity(grid.n_flagged());
    for (&x, &f) in grid.sample_points().iter().zip(grid.fractions()) {
        background.push(medium.background_potential(x, k) * f);
        let p = p0.at(medium, x);
        holes.push(medium.hole_potential(x, k, p)? * f);
    }
    if background.iter().chain(&holes).any(|v| !v.re.is_finite() || !v.im.is_finite()) {
        return Err(Error::Domain("equivalent potential is not finite".into()));
    }
    Ok(EquivalentPotential { grid: grid.clone(), kappa: k, background, holes })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::{Domain, Impedance};

    #[test]
    fn vacuum_without_holes_is_zero() {
        let m = MediumSpec::homogeneous(C64::new(0.0, 0.0));
        let g = VolumeGrid::covering(&m.domain, 0.25).unwrap();
        let pot = build_equivalent_potential(&m, &ShapeFactor::Uniform { p: std::f64::consts::PI }, Wavenumber::unbounded(1.0).unwrap(), &g)
            .unwrap();
        assert!(pot.is_zero());
    }

    #[test]
    fn cloak_is_identically_zero() {
        let mut m = MediumSpec::homogeneous(C64::new(0.0, 0.0));
        m.domain = Domain::Ball { center: [0.5; 3], radius: 0.5 };
        m.n = ScalarField::Gaussian { center: [0.5; 3], base: C64::new(2.0, 0.0), amplitude: C64::new(0.3, 0.1), width: 0.2 };
        m.k = ScalarField::constant(0.7);
        m.lambda0 = Impedance::Cloak;
        let g = VolumeGrid::covering(&m.domain, 0.1).unwrap();
        let pot = build_equivalent_potential(&m, &ShapeFactor::Uniform { p: std::f64::consts::PI }, Wavenumber::unbounded(1.3).unwrap(), &g)
            .unwrap();
        assert!(pot.is_zero());
        assert!(pot.background.iter().any(|v| v.norm() > 0.0));
        assert!(build_equivalent_potential(&m, &ShapeFactor::Uniform { p: 0.0 }, Wavenumber::unbounded(1.3).unwrap(), &g).is_err());
    }

    #[test]
    fn ball_shape_factor() {
        let b = crate::geometry::BodySpec::ball(1.0);
        assert!((b.shape_factor() - std::f64::consts::PI).abs() < 1e-15);
    }
}
