use crate::config::AsymptoticRegime;
use crate::{Error, Result};
use serde::{Deserialize, Serialize};

/// Which term attains the minimum in the rate exponent.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BindingTerm {
    Gamma,
    CellSide,
    Impedance,
    Distance,
}

/// Candidate exponents of the far-field discrepancy.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RateExpectation {
    /// `min{γ, (2−β)/3, 1−3β, 2−β−t}`.
    pub theorem: f64,
    /// The same minimum also capped by 1/3.
    pub proof: f64,
    pub binding: BindingTerm,
    /// False when the exponent is ≤ 0.
    pub convergent: bool,
}

pub fn expected_rate(regime: &AsymptoticRegime, gamma: f64) -> RateExpectation {
    let b = regime.beta;
    let terms = [
        (gamma, BindingTerm::Gamma),
        ((2.0 - b) / 3.0, BindingTerm::CellSide),
        (1.0 - 3.0 * b, BindingTerm::Impedance),
        (2.0 - b - regime.t, BindingTerm::Distance),
    ];
    let (theorem, binding) = terms.iter().copied().fold((f64::INFINITY, BindingTerm::Gamma), |acc, x| if x.0 < acc.0 { x } else { acc });
    if theorem <= 0.0 {
        log::warn!("expected exponent {theorem} <= 0: the remainder does not tend to zero");
    }
    RateExpectation { theorem, proof: theorem.min(1.0 / 3.0), binding, convergent: theorem > 0.0 }
}

/// Least-squares slope of `log err` against `log a`.
///
/// Pairs with `err = 0` are dropped with a warning.
pub fn fit_rate(pairs: &[(f64, f64)]) -> Result<f64> {
    let mut pts = Vec::with_capacity(pairs.len());
    for &(a, e) in pairs {
        if e == 0.0 {
            log::warn!("dropping a = {a}: zero error");
            continue;
        }
        if !(a > 0.0) || !(e > 0.0) || !a.is_finite() || !e.is_finite() {
            return Err(Error::Domain(format!("fit_rate needs positive finite pairs, got ({a}, {e})")));
        }
        pts.push((a.ln(), e.ln()));
    }
    if pts.len() < 2 {
        return Err(Error::Domain(format!("fit_rate needs at least 2 usable pairs, got {}", pts.len())));
    }
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    if sxx == 0.0 {
        return Err(Error::Domain("fit_rate needs at least two distinct a".into()));
    }
    Ok(sxy / sxx)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn rate_examples() {
        let r = expected_rate(&AsymptoticRegime::standard(0.1, 0.0, 2.0 / 3.0), 1.0);
        assert!((r.theorem - 2.0 / 3.0).abs() < 1e-15);
        assert!((r.proof - 1.0 / 3.0).abs() < 1e-15);
        let r = expected_rate(&AsymptoticRegime::standard(0.1, 0.2, 0.6), 1.0);
        assert!((r.theorem - 0.4).abs() < 1e-12);
        assert_eq!(r.binding, BindingTerm::Impedance);
        let r = expected_rate(&AsymptoticRegime::standard(0.1, 0.4, 0.6), 1.0);
        assert!(!r.convergent);
    }

    #[test]
    fn fit_examples() {
        let a = [0.1, 0.07, 0.05, 0.035, 0.025];
        let p: Vec<_> = a.iter().map(|&a: &f64| (a, a.powf(2.0 / 3.0))).collect();
        assert!((fit_rate(&p).unwrap() - 2.0 / 3.0).abs() < 1e-12);
        let p: Vec<_> = a.iter().map(|&a| (a, 17.0 * a)).collect();
        assert!((fit_rate(&p).unwrap() - 1.0).abs() < 1e-12);
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let p: Vec<_> = a.iter().map(|&a: &f64| (a, a.powf(2.0 / 3.0) * (1.0 + 0.1 * rng.random_range(-1.0..1.0)))).collect();
        let s = fit_rate(&p).unwrap();
        assert!((0.55..=0.78).contains(&s), "{s}");
    }

    #[test]
    fn fit_drops_zero_and_needs_two() {
        assert!(fit_rate(&[(0.1, 0.0), (0.05, 0.01)]).is_err());
        let s = fit_rate(&[(0.1, 0.0), (0.1, 0.1), (0.01, 0.01)]).unwrap();
        assert!((s - 1.0).abs() < 1e-12);
    }

    proptest! {
        #[test]
        fn piecewise_binding(beta in 0.0f64..0.333, u in 0.0f64..1.0) {
            let lo = (2.0 - beta) / 3.0;
            let t = lo + u * (2.0 - beta - lo);
            let r = expected_rate(&AsymptoticRegime::standard(0.1, beta, t), 1.0);
            let third = (2.0 - beta) / 3.0;
            let imp = 1.0 - 3.0 * beta;
            if beta < 1.0 / 8.0 {
                prop_assert!(imp > third || r.theorem < imp);
                prop_assert!(r.binding != BindingTerm::Impedance);
            }
            if beta > 1.0 / 8.0 {
                prop_assert!(r.binding != BindingTerm::CellSide);
            }
        }

        #[test]
        fn exact_power_law(p in 0.1f64..3.0, c in 0.01f64..100.0) {
            let pairs: Vec<_> = [0.2, 0.1, 0.05].iter().map(|&a: &f64| (a, c * a.powf(p))).collect();
            prop_assert!((fit_rate(&pairs).unwrap() - p).abs() < 1e-10);
        }
    }
}
