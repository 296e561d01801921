//! Receiver statistics, decision thresholds, error probabilities and error
//! exponents for the OPA receiver, the phase-conjugate receiver and the
//! coherent-state homodyne baseline.

mod homodyne;
mod opa;
mod pc;

pub use homodyne::{homodyne_error_prob, homodyne_statistics, HomodyneStatistics};
pub use opa::{
    default_epsilon_sq, geometric_chernoff_overlap, opa_bhattacharyya_exponent, opa_chernoff_exponent,
    opa_count_pmf, opa_error_prob_by_summation, opa_error_prob_exact, opa_error_prob_gaussian, opa_statistics,
    simulate_counts, BhattacharyyaExponents, OpaConfig, OpaDetection, OpaStatistics, SimulationOutcome, Trial,
};
pub use pc::{
    pc_error_prob_gaussian, pc_exponent_eq9, pc_statistics, pc_statistics_with, PcHypothesisMoments,
    PcStatistics, VarianceConvention,
};

use crate::error::{domain, Result};
use crate::scenario::ScenarioParams;
use crate::special::ln_erfc;
use serde::{Deserialize, Serialize};
use std::fmt;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ReceiverKind {
    Opa,
    PhaseConjugate,
    Homodyne,
}

impl fmt::Display for ReceiverKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ReceiverKind::Opa => "opa",
            ReceiverKind::PhaseConjugate => "pc",
            ReceiverKind::Homodyne => "hom",
        })
    }
}

/// Error probability and exponent of one receiver at one `(params, M)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PerformanceReport {
    pub receiver: ReceiverKind,
    pub m: u64,
    /// Error probability from the exact count distribution, where available.
    pub pe_exact: Option<f64>,
    /// Central-limit (erfc) approximation.
    pub pe_gaussian: f64,
    /// `log10` of the exact value when present, else of the approximation;
    /// stays finite where the probability itself underflows.
    pub log10_pe: f64,
    /// Error exponent in nats per mode pair.
    pub exponent: f64,
    /// Decision threshold on the total count, when the receiver counts.
    pub threshold: Option<i64>,
    /// Set when the integer threshold collapses to "always decide H₁".
    pub degenerate: bool,
}

/// `½ erfc(√(R M))` together with its natural log.
pub(crate) fn half_erfc_sqrt(exponent: f64, m: u64) -> (f64, f64) {
    let x = (exponent * m as f64).sqrt();
    let ln = ln_erfc(x) - std::f64::consts::LN_2;
    (ln.exp(), ln)
}

/// The two closed-form QCB exponents valid for `N_S ≪ 1, κ ≪ 1, N_B ≫ 1`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AsymptoticExponents {
    /// Entangled transmitter, `κN_S/N_B`.
    pub r_q: f64,
    /// Coherent-state transmitter, `κN_S/(4N_B)`.
    pub r_c: f64,
}

pub fn asymptotic_exponents(params: &ScenarioParams) -> Result<AsymptoticExponents> {
    params.validate()?;
    if params.n_b <= 0.0 {
        return Err(domain("asymptotic exponents need N_B > 0"));
    }
    let r_q = params.returned_signal() / params.n_b;
    Ok(AsymptoticExponents { r_q, r_c: r_q / 4.0 })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn asymptotic_exponents_at_reference_point() {
        let e = asymptotic_exponents(&ScenarioParams::reference_figure(1)).unwrap();
        assert_relative_eq!(e.r_q, 5e-6, max_relative = 1e-12);
        assert_relative_eq!(e.r_c, 1.25e-6, max_relative = 1e-12);
        assert_eq!(e.r_q / e.r_c, 4.0);
        let blind = ScenarioParams { kappa: 0.0, ..ScenarioParams::reference_figure(1) };
        let e = asymptotic_exponents(&blind).unwrap();
        assert_eq!((e.r_q, e.r_c), (0.0, 0.0));
        let dark = ScenarioParams { n_b: 0.0, ..ScenarioParams::reference_figure(1) };
        assert!(asymptotic_exponents(&dark).is_err());
    }

    #[test]
    fn ratio_is_exactly_four_everywhere() {
        for &(ns, nb, k) in &[(1e-3, 1e4, 1e-2), (0.5, 0.3, 0.9), (3.0, 7.0, 0.123)] {
            let e = asymptotic_exponents(&ScenarioParams::new(ns, nb, k, 1).unwrap()).unwrap();
            assert_eq!(e.r_q / e.r_c, 4.0);
        }
    }

    #[test]
    fn half_erfc_limits() {
        let (p, _) = half_erfc_sqrt(0.0, 1000);
        assert_eq!(p, 0.5);
        let (p, ln) = half_erfc_sqrt(1.0, 2000);
        assert_eq!(p, 0.0);
        assert!(ln.is_finite() && ln < -1990.0);
    }
}
