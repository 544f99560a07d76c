use super::Charges;
use crate::config::AsymptoticRegime;
use crate::geometry::ScattererSet;
use crate::C64;
use faer::Mat;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

/// Which branch of the invertibility lemma applies.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ImpedanceSide {
    PositiveReal,
    NegativeReal,
    /// Mixed signs: outside the lemma, solved without a guarantee.
    Mixed,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct InvertibilityReport {
    pub side: ImpedanceSide,
    pub m_max: f64,
    /// `min |Re C_m| / max |C_m|²`.
    pub condition_value: f64,
    /// `√(26 M_max) / (π a^{2−β})`.
    pub condition_threshold: f64,
    pub condition_margin: f64,
    /// `λ₋ / λ₊²` measured on the set.
    pub sufficient_value: f64,
    /// `√(26 M_max) / π`.
    pub sufficient_threshold: f64,
    pub sufficient_margin: f64,
    pub sufficient_pass: bool,
    /// `4 (condition_margin)^{−2}`, the ℓ² amplification bound.
    pub l2_factor: f64,
    /// `2 (min|Re C|/max|C| − max|C| √(26 M_max)/(π a^{2−β}))^{−1} M max|C|`
    /// when the bracket is positive.
    pub l1_factor: Option<f64>,
    /// True iff the side is not mixed and `condition_value > condition_threshold`.
    pub pass: bool,
}

pub fn invertibility_check(set: &ScattererSet, regime: &AsymptoticRegime) -> InvertibilityReport {
    let pos = set.holes.iter().all(|h| h.lambda0.re > 0.0);
    let neg = set.holes.iter().all(|h| h.lambda0.re < 0.0);
    let side = if set.is_empty() {
        ImpedanceSide::Mixed
    } else if pos {
        ImpedanceSide::PositiveReal
    } else if neg {
        ImpedanceSide::NegativeReal
    } else {
        ImpedanceSide::Mixed
    };
    if side == ImpedanceSide::Mixed {
        log::warn!("impedances on both sides of the imaginary axis: no invertibility guarantee");
    }
    let min_re_c = set.holes.iter().map(|h| h.c.re.abs()).fold(f64::INFINITY, f64::min);
    let max_c = set.holes.iter().map(|h| h.c.norm()).fold(0.0, f64::max);
    let min_re_l = set.holes.iter().map(|h| h.lambda0.re.abs()).fold(f64::INFINITY, f64::min);
    let max_l = set.holes.iter().map(|h| h.lambda0.norm()).fold(0.0, f64::max);
    let root = (26.0 * regime.m_max).sqrt();
    let scale = set.a.powf(2.0 - set.beta);
    let condition_value = min_re_c / (max_c * max_c);
    let condition_threshold = root / (PI * scale);
    let condition_margin = condition_value - condition_threshold;
    let sufficient_value = min_re_l / (max_l * max_l);
    let sufficient_threshold = root / PI;
    let sufficient_margin = sufficient_value - sufficient_threshold;
    let bracket = min_re_c / max_c - max_c * root / (PI * scale);
    let l1_factor = (bracket > 0.0).then(|| 2.0 / bracket * set.len() as f64 * max_c);
    InvertibilityReport {
        side,
        m_max: regime.m_max,
        condition_value,
        condition_threshold,
        condition_margin,
        sufficient_value,
        sufficient_threshold,
        sufficient_margin,
        sufficient_pass: sufficient_margin > 0.0,
        l2_factor: 4.0 / (condition_margin * condition_margin),
        l1_factor,
        pass: side != ImpedanceSide::Mixed && condition_margin > 0.0,
    }
}

/// Worst-case comparison of `Σ|Q_m|²` with `l2_factor · Σ|V_m|²` over incidences.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoundCheck {
    /// Largest `Σ|Q|² / Σ|V|²` over incidences.
    pub worst_ratio: f64,
    pub factor: f64,
    pub holds: bool,
}

pub fn l2_bound_check(report: &InvertibilityReport, charges: &Charges, rhs: &Mat<C64>) -> BoundCheck {
    let mut worst = 0.0f64;
    for t in 0..charges.q.ncols() {
        let sq: f64 = (0..charges.q.nrows()).map(|m| charges.q[(m, t)].norm_sqr()).sum();
        let sv: f64 = (0..rhs.nrows()).map(|m| rhs[(m, t)].norm_sqr()).sum();
        if sv > 0.0 {
            worst = worst.max(sq / sv);
        }
    }
    BoundCheck { worst_ratio: worst, factor: report.l2_factor, holds: worst <= report.l2_factor }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::BodySpec;

    fn report(lambda: f64) -> InvertibilityReport {
        let body = BodySpec::ball(1.0);
        let set = ScattererSet::from_centers(&[[0.0; 3], [0.5, 0.0, 0.0]], 0.1, 0.0, &body, C64::new(lambda, 0.0));
        invertibility_check(&set, &AsymptoticRegime::standard(0.1, 0.0, 2.0 / 3.0))
    }

    #[test]
    fn thresholds() {
        let r = report(0.5);
        assert!((r.sufficient_threshold - 26f64.sqrt() / PI).abs() < 1e-15);
        assert!((r.sufficient_threshold - 1.623_068).abs() < 1e-6);
        assert!((r.sufficient_value - 2.0).abs() < 1e-15);
        assert!(r.sufficient_pass);
        let r = report(1.0);
        assert!((r.sufficient_margin + 0.623_068).abs() < 1e-6);
        assert!(!r.sufficient_pass);
        assert_eq!(r.side, ImpedanceSide::PositiveReal);
        assert_eq!(report(-1.0).side, ImpedanceSide::NegativeReal);
    }
}
