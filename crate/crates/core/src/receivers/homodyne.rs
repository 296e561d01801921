use super::{half_erfc_sqrt, PerformanceReport, ReceiverKind};
use crate::error::Result;
use crate::scenario::ScenarioParams;
use serde::{Deserialize, Serialize};

/// Per-mode homodyne outcome statistics for the coherent-state transmitter.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HomodyneStatistics {
    pub mean0: f64,
    pub mean1: f64,
    /// `(2N_B + 1)/4`, shared by both hypotheses.
    pub variance: f64,
    /// Decide H₀ when the summed outcome is below `M √(κN_S) / 2`.
    pub threshold: f64,
}

pub fn homodyne_statistics(params: &ScenarioParams) -> Result<HomodyneStatistics> {
    params.validate()?;
    let mean1 = params.returned_signal().sqrt();
    Ok(HomodyneStatistics {
        mean0: 0.0,
        mean1,
        variance: (2.0 * params.n_b + 1.0) / 4.0,
        threshold: params.m as f64 * mean1 / 2.0,
    })
}

/// `½ erfc(√(κN_S M/(4N_B+2)))` with exponent `κN_S/(4N_B+2)`.
pub fn homodyne_error_prob(params: &ScenarioParams) -> Result<PerformanceReport> {
    let stats = homodyne_statistics(params)?;
    let delta = stats.mean1 - stats.mean0;
    // (Δμ)² / (2 (2σ)²) = κN_S / (4N_B + 2)
    let exponent = delta * delta / (8.0 * stats.variance);
    let (pe, ln_pe) = half_erfc_sqrt(exponent, params.m);
    Ok(PerformanceReport {
        receiver: ReceiverKind::Homodyne,
        m: params.m,
        pe_exact: None,
        pe_gaussian: pe,
        log10_pe: ln_pe / std::f64::consts::LN_10,
        exponent,
        threshold: None,
        degenerate: false,
    })
}
