use crate::point::{dist, Point};
use crate::{Error, Result, C64};
use serde::{Deserialize, Serialize};

/// A complex scalar field on R^3 given by a named preset.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "preset", rename_all = "snake_case")]
pub enum ScalarField {
    Constant { value: C64 },
    /// Linear in `|x - center|` from `inner` at the centre to `outer` at `radius`,
    /// constant beyond.
    RadialRamp { center: Point, radius: f64, inner: C64, outer: C64 },
    /// `base + amplitude * exp(-|x - center|² / width²)`.
    Gaussian { center: Point, base: C64, amplitude: C64, width: f64 },
    Sampled(SampledField),
}

impl ScalarField {
    pub fn constant(v: f64) -> Self {
        ScalarField::Constant { value: C64::new(v, 0.0) }
    }

    pub fn constant_c(v: C64) -> Self {
        ScalarField::Constant { value: v }
    }

    pub fn eval(&self, x: Point) -> C64 {
        match self {
            ScalarField::Constant { value } => *value,
            ScalarField::RadialRamp { center, radius, inner, outer } => {
                let s = (dist(x, *center) / radius).min(1.0);
                inner + (outer - inner) * s
            }
            ScalarField::Gaussian { center, base, amplitude, width } => {
                let r = dist(x, *center);
                base + amplitude * (-(r * r) / (width * width)).exp()
            }
            ScalarField::Sampled(s) => s.eval(x),
        }
    }

    /// The value if the field is constant.
    pub fn as_constant(&self) -> Option<C64> {
        match self {
            ScalarField::Constant { value } => Some(*value),
            _ => None,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let finite = |z: &C64| z.re.is_finite() && z.im.is_finite();
        let ok = match self {
            ScalarField::Constant { value } => finite(value),
            ScalarField::RadialRamp { radius, inner, outer, .. } => *radius > 0.0 && finite(inner) && finite(outer),
            ScalarField::Gaussian { base, amplitude, width, .. } => *width > 0.0 && finite(base) && finite(amplitude),
            ScalarField::Sampled(s) => return s.validate(),
        };
        if ok {
            Ok(())
        } else {
            Err(Error::Config(format!("invalid scalar field parameters: {self:?}")))
        }
    }
}

/// Values on a regular lattice, trilinearly interpolated and clamped at the edges.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SampledField {
    pub origin: Point,
    pub spacing: f64,
    pub dims: [usize; 3],
    /// Row-major with the z index fastest.
    pub values: Vec<C64>,
}

impl SampledField {
    pub fn validate(&self) -> Result<()> {
        let n: usize = self.dims.iter().product();
        if self.dims.iter().any(|&d| d == 0) || self.values.len() != n || !(self.spacing > 0.0) {
            return Err(Error::Config(format!(
                "sampled field needs positive dims and spacing and {n} values, got {}",
                self.values.len()
            )));
        }
        if self.values.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::Config("sampled field has non-finite values".into()));
        }
        Ok(())
    }

    pub fn from_json_file(path: &std::path::Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("cannot read sampled field {}: {e}", path.display())))?;
        let f: SampledField = serde_json::from_str(&text)
            .map_err(|e| Error::Config(format!("bad sampled field {}: {e}", path.display())))?;
        f.validate()?;
        Ok(f)
    }

    fn at(&self, i: usize, j: usize, k: usize) -> C64 {
        self.values[(i * self.dims[1] + j) * self.dims[2] + k]
    }

    pub fn eval(&self, x: Point) -> C64 {
        let mut idx = [0usize; 3];
        let mut frac = [0.0; 3];
        for d in 0..3 {
            let u = ((x[d] - self.origin[d]) / self.spacing).clamp(0.0, (self.dims[d] - 1) as f64);
            let i = (u.floor() as usize).min(self.dims[d].saturating_sub(2));
            idx[d] = i;
            frac[d] = if self.dims[d] == 1 { 0.0 } else { u - i as f64 };
        }
        let mut acc = C64::new(0.0, 0.0);
        for c in 0..8usize {
            let mut w = 1.0;
            let mut p = [0usize; 3];
            for d in 0..3 {
                let hi = (c >> d) & 1 == 1;
                let step = usize::from(hi && self.dims[d] > 1);
                p[d] = idx[d] + step;
                w *= if hi { frac[d] } else { 1.0 - frac[d] };
            }
            if w != 0.0 {
                acc += self.at(p[0], p[1], p[2]) * w;
            }
        }
        acc
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn presets() {
        let c = ScalarField::constant(2.0);
        assert_eq!(c.eval([3.0, 1.0, 0.0]), C64::new(2.0, 0.0));
        let r = ScalarField::RadialRamp {
            center: [0.0; 3],
            radius: 2.0,
            inner: C64::new(1.0, 0.0),
            outer: C64::new(3.0, 0.0),
        };
        assert!((r.eval([1.0, 0.0, 0.0]) - C64::new(2.0, 0.0)).norm() < 1e-15);
        assert!((r.eval([5.0, 0.0, 0.0]) - C64::new(3.0, 0.0)).norm() < 1e-15);
        let g = ScalarField::Gaussian {
            center: [0.0; 3],
            base: C64::new(1.0, 0.0),
            amplitude: C64::new(1.0, 0.0),
            width: 1.0,
        };
        assert!((g.eval([1.0, 0.0, 0.0]).re - (1.0 + (-1f64).exp())).abs() < 1e-15);
    }

    #[test]
    fn sampled_is_trilinear() {
        // f = x + 2y + 3z sampled on a 3x3x3 lattice is reproduced exactly.
        let mut values = Vec::new();
        for i in 0..3 {
            for j in 0..3 {
                for k in 0..3 {
                    values.push(C64::new(i as f64 + 2.0 * j as f64 + 3.0 * k as f64, 0.0));
                }
            }
        }
        let s = SampledField { origin: [0.0; 3], spacing: 1.0, dims: [3, 3, 3], values };
        s.validate().unwrap();
        let v = s.eval([0.3, 1.7, 0.25]);
        assert!((v.re - (0.3 + 3.4 + 0.75)).abs() < 1e-13);
        // clamped outside
        assert!((s.eval([-1.0, 0.0, 0.0]).re).abs() < 1e-13);
    }
}
