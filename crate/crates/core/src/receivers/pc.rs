//! Phase-conjugate receiver.
//!
//! Each return mode is phase conjugated, `a_C = √2 a_V + a_R^†`, and then
//! interfered with its idler on a 50-50 beamsplitter feeding a balanced
//! difference detector, so the per-mode statistic is
//! `N̂ = N̂_X − N̂_Y = a_C^† a_I + a_I^† a_C`.
//!
//! The per-mode variance is `N̄_X(N̄_X+1) + N̄_Y(N̄_Y+1) − (N̄_C − N̄_I)²/2`
//! under both hypotheses. Without the last term the H₀ value would be
//! `(N̄_C+N̄_I)²/2 + N̄_C + N̄_I`, which disagrees with the operator moment
//! `Var(N̂) = 2N̄_C N̄_I + N̄_C + N̄_I` of independent thermal inputs and with
//! the closed-form exponent of [`pc_exponent_eq9`]; that uncorrected form is
//! kept only as [`VarianceConvention::AsPrinted`] for regression checks.

use super::{half_erfc_sqrt, PerformanceReport, ReceiverKind};
use crate::error::Result;
use crate::scenario::{Hypothesis, ScenarioParams};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum VarianceConvention {
    /// Common-mode cancellation term applied under both hypotheses.
    #[default]
    Corrected,
    /// H₀ variance without the cancellation term.
    AsPrinted,
}

/// Per-mode photon numbers and detector moments under one hypothesis.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PcHypothesisMoments {
    pub nbar_c: f64,
    pub nbar_i: f64,
    pub nbar_x: f64,
    pub nbar_y: f64,
    pub mean: f64,
    pub variance: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PcStatistics {
    /// `<a_C^† a_I> = √(κN_S(N_S+1))` under H₁.
    pub c_q: f64,
    pub h0: PcHypothesisMoments,
    pub h1: PcHypothesisMoments,
    /// Decide H₀ when the summed difference count is below this.
    pub threshold: i64,
}

impl PcStatistics {
    pub fn under(&self, h: Hypothesis) -> &PcHypothesisMoments {
        match h {
            Hypothesis::H0 => &self.h0,
            Hypothesis::H1 => &self.h1,
        }
    }

    /// `(μ₁ − μ₀)² / 2(σ₀ + σ₁)²`.
    pub fn exponent(&self) -> f64 {
        let spread = self.h0.variance.sqrt() + self.h1.variance.sqrt();
        if spread > 0.0 {
            (self.h1.mean - self.h0.mean).powi(2) / (2.0 * spread * spread)
        } else {
            0.0
        }
    }
}

pub fn pc_statistics(params: &ScenarioParams) -> Result<PcStatistics> {
    pc_statistics_with(params, VarianceConvention::Corrected)
}

pub fn pc_statistics_with(params: &ScenarioParams, convention: VarianceConvention) -> Result<PcStatistics> {
    params.validate()?;
    let ks = params.returned_signal();
    let c_q = (ks * (params.n_s + 1.0)).sqrt();
    let nbar_i = params.n_s;

    let moments = |nbar_c: f64, cross: f64, correct: bool| {
        let half_sum = 0.5 * (nbar_c + nbar_i);
        let nbar_x = half_sum + cross;
        let nbar_y = half_sum - cross;
        let mut variance = nbar_x * (nbar_x + 1.0) + nbar_y * (nbar_y + 1.0);
        if correct {
            variance -= 0.5 * (nbar_c - nbar_i).powi(2);
        }
        PcHypothesisMoments {
            nbar_c,
            nbar_i,
            nbar_x,
            nbar_y,
            mean: nbar_x - nbar_y,
            variance,
        }
    };
    let h0 = moments(1.0 + params.n_b, 0.0, convention == VarianceConvention::Corrected);
    let h1 = moments(1.0 + ks + params.n_b, c_q, true);

    let (s0, s1) = (h0.variance.sqrt(), h1.variance.sqrt());
    let per_mode = (s1 * h0.mean + s0 * h1.mean) / (s0 + s1);
    let threshold = (params.m as f64 * per_mode).ceil() as i64;
    Ok(PcStatistics { c_q, h0, h1, threshold })
}

/// `½ erfc(√(R M))` from the moment statistics.
pub fn pc_error_prob_gaussian(params: &ScenarioParams) -> Result<PerformanceReport> {
    let stats = pc_statistics(params)?;
    let exponent = stats.exponent();
    let (pe, ln_pe) = half_erfc_sqrt(exponent, params.m);
    Ok(PerformanceReport {
        receiver: ReceiverKind::PhaseConjugate,
        m: params.m,
        pe_exact: None,
        pe_gaussian: pe,
        log10_pe: ln_pe / std::f64::consts::LN_10,
        exponent,
        threshold: Some(stats.threshold),
        degenerate: false,
    })
}

/// Closed-form exponent
/// `κN_S(N_S+1) / (2N_B + 4N_SN_B + 6N_S + 4κN_S² + 3κN_S + 2)`.
///
/// The denominator is `σ₀² + σ₁²`, so this equals `C_q²/(σ₀² + σ₁²)`; it
/// coincides with [`PcStatistics::exponent`] up to `(σ₁ − σ₀)²` terms.
pub fn pc_exponent_eq9(params: &ScenarioParams) -> Result<f64> {
    params.validate()?;
    let (ns, nb, k) = (params.n_s, params.n_b, params.kappa);
    let den = 2.0 * nb + 4.0 * ns * nb + 6.0 * ns + 4.0 * k * ns * ns + 3.0 * k * ns + 2.0;
    Ok(k * ns * (ns + 1.0) / den)
}
