use serde::{Deserialize, Serialize};
use std::fmt;

/// Scaling exponents and a-priori bounds of the small-hole regime.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AsymptoticRegime {
    /// Maximum hole diameter.
    pub a: f64,
    pub beta: f64,
    pub s: f64,
    pub t: f64,
    pub m_max: f64,
    pub d_min: f64,
    pub d_max: f64,
    pub kappa_max: f64,
    pub lambda_minus: f64,
    pub lambda_plus: f64,
}

impl AsymptoticRegime {
    /// Regime with `s = 2 − β` and unit bounds.
    pub fn standard(a: f64, beta: f64, t: f64) -> Self {
        Self {
            a,
            beta,
            s: 2.0 - beta,
            t,
            m_max: 1.0,
            d_min: 1.0,
            d_max: 1.0,
            kappa_max: 10.0,
            lambda_minus: 0.0,
            lambda_plus: f64::INFINITY,
        }
    }

    pub fn with_a(&self, a: f64) -> Self {
        Self { a, ..self.clone() }
    }

    /// Lattice cell side a^{s/3}.
    pub fn cell_side(&self) -> f64 {
        self.a.powf(self.s / 3.0)
    }

    /// True when the hole count exponent equals 2 − β.
    pub fn is_standard(&self) -> bool {
        (self.s - (2.0 - self.beta)).abs() <= 1e-12
    }
}

/// A failed regime inequality.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Violation {
    BetaNotBelowOne,
    SAboveTwoMinusBeta,
    /// `t` below its lower bound `s/3`, which is `(2−β)/3` in the standard regime.
    TBelowLower { standard: bool },
    TAboveTwoMinusBeta,
    DistanceBoundsReversed,
    LambdaBoundsReversed,
    NonPositiveSize,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Violation::BetaNotBelowOne => "β<1 violated",
            Violation::SAboveTwoMinusBeta => "s ≤ 2−β violated",
            Violation::TBelowLower { standard: true } => "t ≥ (2−β)/3 violated",
            Violation::TBelowLower { standard: false } => "t ≥ s/3 violated",
            Violation::TAboveTwoMinusBeta => "t ≤ 2−β violated",
            Violation::DistanceBoundsReversed => "d_min ≤ d_max violated",
            Violation::LambdaBoundsReversed => "λ₋ ≤ λ₊ violated",
            Violation::NonPositiveSize => "a > 0 violated",
        };
        f.write_str(s)
    }
}

/// All violated regime inequalities; empty when the regime is admissible.
pub fn validate_regime(r: &AsymptoticRegime) -> Vec<Violation> {
    let mut v = Vec::new();
    if !(r.a > 0.0) {
        v.push(Violation::NonPositiveSize);
    }
    if !(r.beta < 1.0) {
        v.push(Violation::BetaNotBelowOne);
    }
    if !(r.s <= 2.0 - r.beta) {
        v.push(Violation::SAboveTwoMinusBeta);
    }
    if !(r.t >= r.s / 3.0) {
        v.push(Violation::TBelowLower { standard: r.is_standard() });
    }
    if !(r.t <= 2.0 - r.beta) {
        v.push(Violation::TAboveTwoMinusBeta);
    }
    if !(r.d_min <= r.d_max) {
        v.push(Violation::DistanceBoundsReversed);
    }
    if !(r.lambda_minus <= r.lambda_plus) {
        v.push(Violation::LambdaBoundsReversed);
    }
    v
}

/// Largest `a` below which `(2−β)/2 · a^{(2−β)/3} ≤ a^{(2−β)/3} − a/2` holds.
///
/// The inequality reduces to `a^{(1+β)/3} ≤ β`, so there is no such `a` for `β ≤ 0`.
pub fn cell_side_bound_threshold(beta: f64) -> Option<f64> {
    (beta > 0.0 && beta < 1.0).then(|| beta.powf(3.0 / (1.0 + beta)))
}

/// Evaluates both sides of the cell-side sandwich for one `a`.
pub fn cell_side_bound_holds(a: f64, beta: f64) -> bool {
    let l = a.powf((2.0 - beta) / 3.0);
    let mid = l - a / 2.0;
    (2.0 - beta) / 2.0 * l <= mid && mid <= l
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn examples() {
        assert!(validate_regime(&AsymptoticRegime::standard(0.1, 0.0, 2.0 / 3.0)).is_empty());
        let r = AsymptoticRegime { s: 0.5, t: 0.5, ..AsymptoticRegime::standard(0.1, 1.2, 0.5) };
        let v = validate_regime(&r);
        assert_eq!(v, vec![Violation::BetaNotBelowOne]);
        assert_eq!(v[0].to_string(), "β<1 violated");
        let v = validate_regime(&AsymptoticRegime::standard(0.1, 0.0, 0.2));
        assert_eq!(v.len(), 1);
        assert_eq!(v[0].to_string(), "t ≥ (2−β)/3 violated");
    }

    #[test]
    fn dilute_lower_bound_uses_s() {
        let r = AsymptoticRegime { s: 1.5, t: 0.5, ..AsymptoticRegime::standard(0.1, 0.0, 0.5) };
        assert!(validate_regime(&r).is_empty());
        let r = AsymptoticRegime { t: 0.4, ..r };
        assert_eq!(validate_regime(&r)[0].to_string(), "t ≥ s/3 violated");
    }

    #[test]
    fn cell_side_bound() {
        assert_eq!(cell_side_bound_threshold(0.0), None);
        assert!(!cell_side_bound_holds(0.01, 0.0));
        for &beta in &[0.1, 0.3, 0.5, 0.9] {
            let a0 = cell_side_bound_threshold(beta).unwrap();
            for f in [0.999, 0.5, 0.1, 1e-3] {
                assert!(cell_side_bound_holds(a0 * f, beta), "beta {beta} a {}", a0 * f);
            }
            assert!(!cell_side_bound_holds(a0 * 1.01, beta));
        }
    }
}
