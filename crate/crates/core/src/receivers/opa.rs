//! Optical-parametric-amplifier receiver.
//!
//! The return and idler of each mode pair enter a low-gain OPA; the idler
//! output port is then in a thermal state whose mean photon number depends on
//! the hypothesis, so the total count over `M` ports is negative binomial.
//! The receiver decides H₀ when the count is below an integer threshold.

use super::{half_erfc_sqrt, PerformanceReport, ReceiverKind};
use crate::error::{domain, Error, Result};
use crate::scenario::{Hypothesis, ScenarioParams};
use crate::special::{ln_add_exp, ln_beta_inc_tails, ln_choose};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Binomial, Distribution, Gamma, Poisson};
use serde::{Deserialize, Serialize};

/// What sits behind the amplifier's idler output port.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OpaDetection {
    /// Full photon-number resolution; the total count is negative binomial.
    #[default]
    PhotonCounting,
    /// On/off detector per mode; the number of clicks is binomial with
    /// click probability `N_m/(1+N_m)`.
    SinglePhoton,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OpaConfig {
    gain: f64,
    pub detection: OpaDetection,
}

impl OpaConfig {
    pub fn with_gain(gain: f64) -> Result<Self> {
        if !(gain.is_finite() && gain >= 1.0) {
            return Err(domain(format!("OPA gain {gain} must be >= 1")));
        }
        Ok(OpaConfig {
            gain,
            detection: OpaDetection::PhotonCounting,
        })
    }

    /// Gain `G = 1 + ε²`.
    pub fn from_epsilon_sq(eps_sq: f64) -> Result<Self> {
        if !(eps_sq.is_finite() && eps_sq >= 0.0) {
            return Err(domain(format!("ε² = {eps_sq} must be >= 0")));
        }
        Self::with_gain(1.0 + eps_sq)
    }

    /// The low-gain operating point `ε² = N_S/√N_B`.
    pub fn default_for(params: &ScenarioParams) -> Result<Self> {
        Self::from_epsilon_sq(default_epsilon_sq(params)?)
    }

    pub fn single_photon(self) -> Self {
        OpaConfig {
            detection: OpaDetection::SinglePhoton,
            ..self
        }
    }

    pub fn gain(&self) -> f64 {
        self.gain
    }

    pub fn epsilon_sq(&self) -> f64 {
        self.gain - 1.0
    }

    /// `G = 1` is the identity: the receiver sees only the idler.
    pub fn is_degenerate(&self) -> bool {
        self.gain == 1.0
    }
}

/// `ε² = N_S/√N_B`.
pub fn default_epsilon_sq(params: &ScenarioParams) -> Result<f64> {
    params.validate()?;
    if params.n_b <= 0.0 {
        return Err(domain("the default OPA gain needs N_B > 0"));
    }
    Ok(params.n_s / params.n_b.sqrt())
}

/// Per-mode sufficient statistics of the OPA output port.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OpaStatistics {
    /// Mean photon number of the output port under H₀.
    pub n0: f64,
    /// Mean photon number of the output port under H₁.
    pub n1: f64,
    /// Per-mode standard deviation of the detected statistic under H₀.
    pub sigma0: f64,
    pub sigma1: f64,
    /// Per-mode mean of the detected statistic (photons, or click
    /// probability for on/off detection).
    pub mean0: f64,
    pub mean1: f64,
    /// Decide H₀ when the total is below this.
    pub threshold: u64,
}

pub fn opa_statistics(params: &ScenarioParams, cfg: &OpaConfig) -> Result<OpaStatistics> {
    params.validate()?;
    let g = cfg.gain;
    let ns = params.n_s;
    let nb = params.n_b;
    let ks = params.returned_signal();
    let n0 = g * ns + (g - 1.0) * (1.0 + nb);
    let n1 = g * ns + (g - 1.0) * (1.0 + nb + ks) + 2.0 * (g * (g - 1.0)).sqrt() * (ks * (ns + 1.0)).sqrt();
    let (mean0, mean1, sigma0, sigma1) = match cfg.detection {
        OpaDetection::PhotonCounting => (n0, n1, (n0 * (n0 + 1.0)).sqrt(), (n1 * (n1 + 1.0)).sqrt()),
        OpaDetection::SinglePhoton => {
            let q0 = n0 / (1.0 + n0);
            let q1 = n1 / (1.0 + n1);
            (q0, q1, (q0 * (1.0 - q0)).sqrt(), (q1 * (1.0 - q1)).sqrt())
        }
    };
    let threshold = ceil_threshold(params.m, mean0, mean1, sigma0, sigma1);
    Ok(OpaStatistics {
        n0,
        n1,
        sigma0,
        sigma1,
        mean0,
        mean1,
        threshold,
    })
}

/// `⌈M (σ₁μ₀ + σ₀μ₁)/(σ₀ + σ₁)⌉`, falling back to the midpoint when both
/// spreads vanish.
fn ceil_threshold(m: u64, mean0: f64, mean1: f64, sigma0: f64, sigma1: f64) -> u64 {
    let per_mode = if sigma0 + sigma1 > 0.0 {
        (sigma1 * mean0 + sigma0 * mean1) / (sigma0 + sigma1)
    } else {
        0.5 * (mean0 + mean1)
    };
    (m as f64 * per_mode).ceil().max(0.0) as u64
}

/// `P(N = n | mean N_m)` for the total count over `M` thermal modes:
/// `C(n+M-1, n) N_m^n / (1+N_m)^(n+M)`, evaluated in log space.
pub fn opa_count_pmf(n_m: f64, m: u64, n: i64) -> Result<f64> {
    if n < 0 {
        return Err(domain(format!("photon count {n} is negative")));
    }
    if !(n_m.is_finite() && n_m >= 0.0) || m == 0 {
        return Err(domain("count PMF needs N_m >= 0 and M >= 1"));
    }
    Ok(ln_count_pmf(n_m, m, n as u64).exp())
}

fn ln_count_pmf(n_m: f64, m: u64, n: u64) -> f64 {
    if n_m == 0.0 {
        return if n == 0 { 0.0 } else { f64::NEG_INFINITY };
    }
    let (n, m) = (n as f64, m as f64);
    ln_choose(n + m - 1.0, n) + n * n_m.ln() - (n + m) * n_m.ln_1p()
}

/// `(ln P(N < k), ln P(N >= k))` for the detected total.
fn ln_split_tails(detection: OpaDetection, mean_photons: f64, m: u64, k: u64) -> (f64, f64) {
    if k == 0 {
        return (f64::NEG_INFINITY, 0.0);
    }
    match detection {
        OpaDetection::PhotonCounting => {
            if mean_photons == 0.0 {
                return (0.0, f64::NEG_INFINITY);
            }
            // P(N <= k-1) = I_p(M, k) with p = 1/(1+N_m).
            let p = 1.0 / (1.0 + mean_photons);
            ln_beta_inc_tails(m as f64, k as f64, p)
        }
        OpaDetection::SinglePhoton => {
            if k > m {
                return (0.0, f64::NEG_INFINITY);
            }
            let q = mean_photons / (1.0 + mean_photons);
            if q == 0.0 {
                return (0.0, f64::NEG_INFINITY);
            }
            // P(K >= k) = I_q(k, M-k+1).
            let (upper, lower) = ln_beta_inc_tails(k as f64, (m - k + 1) as f64, q);
            (lower, upper)
        }
    }
}

/// Exact error probability of the threshold rule at the given `M`
/// (overriding `params.m`), from the negative-binomial (or binomial) tails.
pub fn opa_error_prob_exact(params: &ScenarioParams, cfg: &OpaConfig) -> Result<PerformanceReport> {
    let stats = opa_statistics(params, cfg)?;
    let gaussian = opa_error_prob_gaussian(params, cfg)?;
    let k = stats.threshold;
    let degenerate = k == 0;
    // equal count laws make every rule a coin flip
    let ln_pe = if degenerate || stats.n0 == stats.n1 {
        -std::f64::consts::LN_2
    } else {
        let (_, ln_false_alarm) = ln_split_tails(cfg.detection, stats.n0, params.m, k);
        let (ln_miss, _) = ln_split_tails(cfg.detection, stats.n1, params.m, k);
        ln_add_exp(ln_false_alarm, ln_miss) - std::f64::consts::LN_2
    };
    let pe = ln_pe.exp().min(0.5);
    Ok(PerformanceReport {
        pe_exact: Some(pe),
        log10_pe: ln_pe.min(-std::f64::consts::LN_2) / std::f64::consts::LN_10,
        threshold: Some(k as i64),
        degenerate,
        ..gaussian
    })
}

/// Same quantity as [`opa_error_prob_exact`] by direct log-space summation
/// of the count PMF. Intended for cross-checks at modest `M`.
pub fn opa_error_prob_by_summation(params: &ScenarioParams, cfg: &OpaConfig) -> Result<f64> {
    if cfg.detection != OpaDetection::PhotonCounting {
        return Err(Error::Unsupported("summation cross-check covers photon counting only".into()));
    }
    let stats = opa_statistics(params, cfg)?;
    let k = stats.threshold;
    if k == 0 {
        return Ok(0.5);
    }
    let m = params.m;
    // miss: n < k under H1
    let miss: f64 = (0..k).map(|n| ln_count_pmf(stats.n1, m, n).exp()).sum();
    // false alarm: n >= k under H0, summed until the terms stop mattering
    let mut false_alarm = 0.0;
    let mut n = k;
    loop {
        let term = ln_count_pmf(stats.n0, m, n).exp();
        false_alarm += term;
        let past_mode = n as f64 > stats.n0 * m as f64;
        if (past_mode && term <= 1e-20 * false_alarm) || term == 0.0 && past_mode {
            break;
        }
        n += 1;
    }
    Ok(0.5 * (false_alarm + miss))
}

/// Central-limit approximation `½ erfc(√(R M))` with
/// `R = (μ₁ - μ₀)² / 2(σ₀ + σ₁)²`.
pub fn opa_error_prob_gaussian(params: &ScenarioParams, cfg: &OpaConfig) -> Result<PerformanceReport> {
    let stats = opa_statistics(params, cfg)?;
    let spread = stats.sigma0 + stats.sigma1;
    let exponent = if spread > 0.0 {
        (stats.mean1 - stats.mean0).powi(2) / (2.0 * spread * spread)
    } else {
        0.0
    };
    let (pe, ln_pe) = half_erfc_sqrt(exponent, params.m);
    Ok(PerformanceReport {
        receiver: ReceiverKind::Opa,
        m: params.m,
        pe_exact: None,
        pe_gaussian: pe,
        log10_pe: ln_pe / std::f64::consts::LN_10,
        exponent,
        threshold: Some(stats.threshold as i64),
        degenerate: stats.threshold == 0,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BhattacharyyaExponents {
    /// `-ln Σ_n √(p₀(n) p₁(n))` for the per-mode thermal count laws.
    pub exact: f64,
    /// The small-gain rational approximation in `ε², κ, N_S, N_B`.
    pub eq6: f64,
}

pub fn opa_bhattacharyya_exponent(params: &ScenarioParams, cfg: &OpaConfig) -> Result<BhattacharyyaExponents> {
    let stats = opa_statistics(params, cfg)?;
    let (n0, n1) = (stats.n0, stats.n1);
    // Σ_n √(p₀p₁) = 1/(√((1+N₀)(1+N₁)) − √(N₀N₁)) for geometric laws.
    let exact = (((1.0 + n0) * (1.0 + n1)).sqrt() - (n0 * n1).sqrt()).ln().max(0.0);
    let e2 = cfg.epsilon_sq();
    let ns = params.n_s;
    let num = e2 * params.kappa * ns * (ns + 1.0);
    let den = 2.0 * ns * (ns + 1.0) + 2.0 * e2 * (1.0 + 2.0 * ns) * (1.0 + ns + params.n_b);
    let eq6 = if den > 0.0 { num / den } else { 0.0 };
    Ok(BhattacharyyaExponents { exact, eq6 })
}

/// Classical Chernoff overlap `Σ_n p₀(n)^s p₁(n)^(1-s)` of two thermal
/// count laws: `1/((1+N₀)^s (1+N₁)^(1-s) − N₀^s N₁^(1-s))`.
pub fn geometric_chernoff_overlap(n0: f64, n1: f64, s: f64) -> f64 {
    let t = 1.0 - s;
    1.0 / ((1.0 + n0).powf(s) * (1.0 + n1).powf(t) - n0.powf(s) * n1.powf(t))
}

/// Per-mode Chernoff exponent of the OPA count laws, by grid search over
/// `s` with 1e-4 resolution.
pub fn opa_chernoff_exponent(params: &ScenarioParams, cfg: &OpaConfig) -> Result<f64> {
    let stats = opa_statistics(params, cfg)?;
    let best = (0..=10_000)
        .map(|i| geometric_chernoff_overlap(stats.n0, stats.n1, i as f64 / 10_000.0))
        .fold(f64::INFINITY, f64::min);
    Ok(-best.ln())
}

/// One Monte Carlo trial of the OPA threshold test.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Trial {
    pub truth: Hypothesis,
    pub count: u64,
    pub decision: Hypothesis,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimulationOutcome {
    pub trials: Vec<Trial>,
    pub errors: usize,
    pub error_rate: f64,
    /// Binomial standard error of `error_rate` around the reference
    /// probability, `√(p(1-p)/trials)` evaluated at the empirical rate.
    pub std_error: f64,
}

/// Monte Carlo of the OPA receiver with equiprobable hypotheses.
///
/// The total count over `M` i.i.d. thermal ports is drawn exactly as a
/// gamma–Poisson mixture (negative binomial), and on/off detection as a
/// binomial, so the cost is independent of `M`. Only the OPA receiver is
/// supported.
pub fn simulate_counts(
    params: &ScenarioParams,
    receiver: ReceiverKind,
    cfg: &OpaConfig,
    trials: usize,
    seed: u64,
) -> Result<SimulationOutcome> {
    if receiver != ReceiverKind::Opa {
        return Err(Error::Unsupported(format!("count simulation is not available for receiver '{receiver}'")));
    }
    let stats = opa_statistics(params, cfg)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let m = params.m;
    let mut out = Vec::with_capacity(trials);
    for _ in 0..trials {
        let truth = if rng.random_bool(0.5) { Hypothesis::H1 } else { Hypothesis::H0 };
        let mean_photons = match truth {
            Hypothesis::H0 => stats.n0,
            Hypothesis::H1 => stats.n1,
        };
        let count = sample_total(&mut rng, cfg.detection, mean_photons, m)?;
        let decision = if count < stats.threshold { Hypothesis::H0 } else { Hypothesis::H1 };
        out.push(Trial { truth, count, decision });
    }
    let errors = out.iter().filter(|t| t.truth != t.decision).count();
    let rate = if trials > 0 { errors as f64 / trials as f64 } else { 0.0 };
    Ok(SimulationOutcome {
        trials: out,
        errors,
        error_rate: rate,
        std_error: (rate * (1.0 - rate) / trials.max(1) as f64).sqrt(),
    })
}

fn sample_total<R: Rng>(rng: &mut R, detection: OpaDetection, mean_photons: f64, m: u64) -> Result<u64> {
    let bad = |e: &dyn std::fmt::Display| Error::Numerical(format!("sampler construction failed: {e}"));
    if mean_photons == 0.0 {
        return Ok(0);
    }
    match detection {
        OpaDetection::PhotonCounting => {
            let rate = Gamma::new(m as f64, mean_photons).map_err(|e| bad(&e))?.sample(rng);
            if rate <= 0.0 {
                return Ok(0);
            }
            let n: f64 = Poisson::new(rate).map_err(|e| bad(&e))?.sample(rng);
            Ok(n as u64)
        }
        OpaDetection::SinglePhoton => {
            let q = mean_photons / (1.0 + mean_photons);
            Ok(Binomial::new(m, q).map_err(|e| bad(&e))?.sample(rng))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn reference(m: u64) -> (ScenarioParams, OpaConfig) {
        let p = ScenarioParams::reference_figure(m);
        let cfg = OpaConfig::default_for(&p).unwrap();
        (p, cfg)
    }

    #[test]
    fn default_epsilon() {
        let (p, cfg) = reference(1);
        assert_relative_eq!(cfg.epsilon_sq(), 2.2361e-3, max_relative = 1e-4);
        assert_relative_eq!(default_epsilon_sq(&p).unwrap(), 0.01 / 20f64.sqrt(), max_relative = 1e-15);
        let zero = ScenarioParams { n_s: 0.0, ..p };
        assert_eq!(default_epsilon_sq(&zero).unwrap(), 0.0);
        let unit = ScenarioParams { n_b: 1.0, ..p };
        assert_eq!(default_epsilon_sq(&unit).unwrap(), p.n_s);
        assert!(default_epsilon_sq(&ScenarioParams { n_b: 0.0, ..p }).is_err());
    }

    #[test]
    fn gain_validation() {
        assert!(OpaConfig::with_gain(0.99).is_err());
        assert!(OpaConfig::with_gain(f64::NAN).is_err());
        assert!(OpaConfig::with_gain(1.0).unwrap().is_degenerate());
    }

    #[test]
    fn reference_means() {
        let (p, cfg) = reference(1);
        let s = opa_statistics(&p, &cfg).unwrap();
        // Direct double-precision evaluation of the two mean formulas.
        let e2 = 0.01 / 20f64.sqrt();
        let g = 1.0 + e2;
        let n0 = g * 0.01 + e2 * 21.0;
        let n1 = g * 0.01 + e2 * (21.0 + 1e-4) + 2.0 * (g * e2).sqrt() * (1.01e-4f64).sqrt();
        assert_relative_eq!(s.n0, n0, max_relative = 1e-13);
        assert_relative_eq!(s.n1, n1, max_relative = 1e-13);
        assert_relative_eq!(s.n0, 0.056980, max_relative = 1e-5);
        assert_relative_eq!(s.n1, 0.057932, max_relative = 1e-5);
        assert_relative_eq!(s.sigma0 * s.sigma0, s.n0 * (s.n0 + 1.0), max_relative = 1e-14);
    }

    #[test]
    fn unit_gain_and_blind_target_are_indistinguishable() {
        let p = ScenarioParams::reference_figure(1000);
        let s = opa_statistics(&p, &OpaConfig::with_gain(1.0).unwrap()).unwrap();
        assert_eq!((s.n0, s.n1), (0.01, 0.01));
        let blind = ScenarioParams { kappa: 0.0, ..p };
        let s = opa_statistics(&blind, &OpaConfig::default_for(&blind).unwrap()).unwrap();
        assert_eq!(s.n0, s.n1);
    }

    #[test]
    fn pmf_basics() {
        for &m in &[1u64, 7, 1000] {
            assert_relative_eq!(opa_count_pmf(0.3, m, 0).unwrap(), 1.3f64.powf(-(m as f64)), max_relative = 1e-12);
        }
        for n in 0..20 {
            let geometric = 0.4f64.powi(n) / 1.4f64.powi(n + 1);
            assert_relative_eq!(opa_count_pmf(0.4, 1, n as i64).unwrap(), geometric, max_relative = 1e-12);
        }
        assert!(opa_count_pmf(0.4, 1, -1).is_err());
        assert_eq!(opa_count_pmf(0.0, 5, 0).unwrap(), 1.0);
        assert_eq!(opa_count_pmf(0.0, 5, 3).unwrap(), 0.0);
    }

    #[test]
    fn pmf_normalization_with_tail_bound() {
        let (n_m, m) = (0.057, 50u64);
        let mut total = 0.0;
        let mut n = 0i64;
        loop {
            let p = opa_count_pmf(n_m, m, n).unwrap();
            total += p;
            // past the mode, successive ratios are below r, so the tail is
            // at most p·r/(1-r)
            let r = n_m / (1.0 + n_m) * (n as f64 + m as f64) / (n as f64 + 1.0);
            if (n as f64) > n_m * m as f64 && r < 1.0 && p * r / (1.0 - r) < 1e-16 {
                break;
            }
            n += 1;
        }
        assert!((total - 1.0).abs() < 1e-12, "sum = {total}");
    }

    #[test]
    fn blind_target_gives_one_half_exactly() {
        let p = ScenarioParams { kappa: 0.0, ..ScenarioParams::reference_figure(12_345) };
        let r = opa_error_prob_exact(&p, &OpaConfig::default_for(&p).unwrap()).unwrap();
        assert_relative_eq!(r.pe_exact.unwrap(), 0.5, max_relative = 1e-12);
        assert_relative_eq!(r.pe_gaussian, 0.5, max_relative = 1e-15);
    }

    #[test]
    fn zero_threshold_is_flagged_degenerate() {
        let p = ScenarioParams::new(0.0, 1.0, 0.1, 10).unwrap();
        let r = opa_error_prob_exact(&p, &OpaConfig::with_gain(1.0).unwrap()).unwrap();
        assert!(r.degenerate);
        assert_eq!(r.threshold, Some(0));
        assert_eq!(r.pe_exact, Some(0.5));
    }

    #[test]
    fn exact_matches_summation_small_m() {
        for &m in &[1u64, 10, 100, 1000] {
            for &(ns, nb, k) in &[(0.01, 20.0, 0.01), (0.2, 1.0, 0.3), (1.0, 0.5, 0.8)] {
                let p = ScenarioParams::new(ns, nb, k, m).unwrap();
                let cfg = OpaConfig::from_epsilon_sq(0.1).unwrap();
                let exact = opa_error_prob_exact(&p, &cfg).unwrap().pe_exact.unwrap();
                let summed = opa_error_prob_by_summation(&p, &cfg).unwrap();
                assert_relative_eq!(exact, summed, max_relative = 1e-10);
            }
        }
    }

    #[test]
    fn reference_gaussian_exponent() {
        let (p, cfg) = reference(1);
        let r = opa_error_prob_gaussian(&p, &cfg).unwrap();
        assert_relative_eq!(r.exponent, 1.864e-6, max_relative = 1e-3);
    }

    #[test]
    fn exponent_depends_only_on_output_means() {
        // Two parameter sets with the same (N0, N1): swap where the mean
        // comes from by trading background against gain.
        let p = ScenarioParams::reference_figure(10);
        let cfg = OpaConfig::default_for(&p).unwrap();
        let s = opa_statistics(&p, &cfg).unwrap();
        let direct = (s.n1 - s.n0).powi(2) / (2.0 * (s.sigma0 + s.sigma1).powi(2));
        assert_relative_eq!(opa_error_prob_gaussian(&p, &cfg).unwrap().exponent, direct, max_relative = 1e-15);
    }

    #[test]
    fn bhattacharyya_closed_form_and_eq6() {
        let (p, cfg) = reference(1);
        let b = opa_bhattacharyya_exponent(&p, &cfg).unwrap();
        assert_relative_eq!(b.eq6, 1.946e-6, max_relative = 1e-3);
        assert!(b.exact > 0.0);
        let blind = ScenarioParams { kappa: 0.0, ..p };
        assert_eq!(opa_bhattacharyya_exponent(&blind, &cfg).unwrap().exact, 0.0);
    }

    #[test]
    fn bhattacharyya_closed_form_vs_series() {
        for &(n0, n1) in &[(0.1, 0.2), (0.3, 0.9), (0.05698, 0.05793), (1.0, 0.4)] {
            let closed = 1.0 / (((1.0f64 + n0) * (1.0 + n1)).sqrt() - (n0 * n1).sqrt());
            let series: f64 = (0..10_000)
                .map(|n| (0.5 * (ln_count_pmf(n0, 1, n) + ln_count_pmf(n1, 1, n))).exp())
                .sum();
            assert_relative_eq!(closed, series, max_relative = 1e-12);
            assert_relative_eq!(closed, geometric_chernoff_overlap(n0, n1, 0.5), max_relative = 1e-13);
        }
    }

    #[test]
    fn chernoff_exponent_dominates_bhattacharyya() {
        for &(ns, nb, k) in &[(0.01, 20.0, 0.01), (0.3, 2.0, 0.5), (1.0, 0.1, 0.9)] {
            let p = ScenarioParams::new(ns, nb, k, 1).unwrap();
            let cfg = OpaConfig::from_epsilon_sq(0.2).unwrap();
            let b = opa_bhattacharyya_exponent(&p, &cfg).unwrap().exact;
            let c = opa_chernoff_exponent(&p, &cfg).unwrap();
            assert!(c >= b * (1.0 - 1e-12), "chernoff {c} < bhattacharyya {b}");
        }
    }

    #[test]
    fn single_photon_variant_matches_photon_counting_in_weak_regime() {
        let (p, cfg) = reference(3_000_000);
        let pc = opa_error_prob_exact(&p, &cfg).unwrap();
        let spd = opa_error_prob_exact(&p, &cfg.single_photon()).unwrap();
        let ratio = spd.exponent / pc.exponent;
        assert!(ratio > 0.9 && ratio < 1.2, "exponent ratio {ratio}");
        assert!(spd.pe_exact.unwrap() < 0.5);
    }

    #[test]
    fn simulation_rejects_other_receivers_and_is_deterministic() {
        let (p, cfg) = reference(1000);
        assert!(matches!(
            simulate_counts(&p, ReceiverKind::PhaseConjugate, &cfg, 10, 1),
            Err(Error::Unsupported(_))
        ));
        let a = simulate_counts(&p, ReceiverKind::Opa, &cfg, 200, 7).unwrap();
        let b = simulate_counts(&p, ReceiverKind::Opa, &cfg, 200, 7).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn simulation_of_blind_target_is_a_coin_flip() {
        let p = ScenarioParams { kappa: 0.0, ..ScenarioParams::reference_figure(10_000) };
        let cfg = OpaConfig::default_for(&p).unwrap();
        let out = simulate_counts(&p, ReceiverKind::Opa, &cfg, 4000, 99).unwrap();
        let se = (0.25f64 / 4000.0).sqrt();
        assert!((out.error_rate - 0.5).abs() < 3.0 * se, "rate {}", out.error_rate);
    }
}
