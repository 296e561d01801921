//! Cross-module self-checks behind `qillum validate`.

use crate::error::Result;
use qillum::fock::{channel_output_fock, fock_moments, pc_moment_check, scenario_qcb, Transmitter, TruncationSpec};
use qillum::receivers::{
    asymptotic_exponents, opa_bhattacharyya_exponent, opa_chernoff_exponent, opa_error_prob_by_summation,
    opa_error_prob_exact, pc_exponent_eq9, pc_statistics_with, simulate_counts, OpaConfig, ReceiverKind,
    VarianceConvention,
};
use qillum::scenario::{coherent_return_state, return_idler_state};
use qillum::{Hypothesis, ScenarioParams};
use serde::Serialize;
use std::str::FromStr;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Level {
    Quick,
    Full,
}

impl FromStr for Level {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "quick" => Ok(Level::Quick),
            "full" => Ok(Level::Full),
            _ => Err(format!("unknown validation level '{s}' (expected quick or full)")),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Check {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Report {
    pub level: Level,
    pub passed: bool,
    pub checks: Vec<Check>,
}

impl Report {
    pub fn text(&self) -> String {
        let mut s = String::new();
        for c in &self.checks {
            let tag = if c.passed { "PASS" } else { "FAIL" };
            s.push_str(&format!("{tag} {}: {}\n", c.name, c.detail));
        }
        let failed = self.checks.iter().filter(|c| !c.passed).count();
        s.push_str(&format!("{} checks, {failed} failed\n", self.checks.len()));
        s
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ValidateOptions {
    pub level: Level,
    /// H₀ variance used by the phase-conjugate checks; `AsPrinted` injects
    /// the uncorrected form.
    pub convention: VarianceConvention,
    pub seed: u64,
    pub truncation: TruncationSpec,
    pub max_levels: usize,
}

impl Default for ValidateOptions {
    fn default() -> Self {
        ValidateOptions {
            level: Level::Quick,
            convention: VarianceConvention::Corrected,
            seed: 1,
            truncation: TruncationSpec::default(),
            max_levels: 6,
        }
    }
}

fn reference() -> ScenarioParams {
    ScenarioParams::reference_figure(1)
}

fn reduced() -> ScenarioParams {
    ScenarioParams::new(0.1, 1.0, 0.1, 1).expect("reduced params are valid")
}

fn rel(a: f64, b: f64) -> f64 {
    if a == b {
        0.0
    } else {
        (a - b).abs() / a.abs().max(b.abs())
    }
}

fn check(name: &'static str, passed: bool, detail: String) -> Check {
    Check { name, passed, detail }
}

fn gaussian_physicality() -> Result<Check> {
    let mut worst = f64::INFINITY;
    for p in [reference(), reduced()] {
        for h in Hypothesis::BOTH {
            for s in [return_idler_state(&p, h)?, coherent_return_state(&p, h)?] {
                s.check_physical()?;
                worst = s.symplectic_eigenvalues().into_iter().fold(worst, f64::min);
            }
        }
    }
    Ok(check("gaussian_physicality", worst >= 0.5 - 1e-9, format!("smallest symplectic eigenvalue {worst:.12}")))
}

fn scenario_matrix() -> Result<Check> {
    let p = reference();
    let s = return_idler_state(&p, Hypothesis::H1)?;
    let (n, m) = (s.n_block(), s.m_block());
    let expected_cross = (p.returned_signal() * (p.n_s + 1.0)).sqrt();
    let errs = [
        rel(n[(0, 0)].re, p.returned_signal() + p.n_b),
        rel(n[(1, 1)].re, p.n_s),
        rel(m[(0, 1)].re, expected_cross),
        n[(0, 1)].norm(),
    ];
    let worst = errs.iter().fold(0.0f64, |a, &b| a.max(b));
    Ok(check("scenario_matrix", worst < 1e-12, format!("largest deviation from closed-form H1 moments {worst:.2e}")))
}

fn eq9_consistency(convention: VarianceConvention) -> Result<Check> {
    let sweep = [
        reference(),
        reduced(),
        ScenarioParams::new(1e-3, 1e4, 1e-2, 1)?,
        ScenarioParams::new(0.5, 3.0, 0.7, 1)?,
    ];
    let mut worst = 0.0f64;
    for p in sweep {
        let s = pc_statistics_with(&p, convention)?;
        let direct = s.c_q * s.c_q / (s.h0.variance + s.h1.variance);
        worst = worst.max(rel(direct, pc_exponent_eq9(&p)?));
    }
    Ok(check("eq9_consistency", worst < 1e-9, format!("C_q^2/(var0+var1) vs closed form, worst relative gap {worst:.2e}")))
}

fn exponent_ratio() -> Result<Check> {
    let p = ScenarioParams::new(1e-3, 1e4, 1e-2, 1)?;
    let e = asymptotic_exponents(&p)?;
    let cfg = OpaConfig::default_for(&p)?;
    let b = opa_bhattacharyya_exponent(&p, &cfg)?.exact;
    let c = opa_chernoff_exponent(&p, &cfg)?;
    let passed = e.r_q / e.r_c == 4.0 && b <= c * (1.0 + 1e-12);
    Ok(check("exponent_ratio", passed, format!("R_Q/R_C = {}, OPA Bhattacharyya {b:.6e} <= Chernoff {c:.6e}", e.r_q / e.r_c)))
}

fn beta_vs_summation() -> Result<Check> {
    let mut worst = 0.0f64;
    for m in [1u64, 10, 100, 1000] {
        let p = reduced().with_m(m);
        let cfg = OpaConfig::default_for(&p)?;
        let exact = opa_error_prob_exact(&p, &cfg)?.pe_exact.expect("exact tail");
        worst = worst.max(rel(exact, opa_error_prob_by_summation(&p, &cfg)?));
    }
    Ok(check("beta_vs_summation", worst < 1e-10, format!("incomplete-beta tail vs direct sum, worst relative gap {worst:.2e}")))
}

fn monte_carlo(seed: u64) -> Result<Check> {
    let p = reference().with_m(100_000);
    let cfg = OpaConfig::default_for(&p)?;
    let exact = opa_error_prob_exact(&p, &cfg)?.pe_exact.expect("exact tail");
    let trials = 10_000;
    let sim = simulate_counts(&p, ReceiverKind::Opa, &cfg, trials, seed)?;
    let se = (exact * (1.0 - exact) / trials as f64).sqrt();
    let z = (sim.error_rate - exact) / se;
    Ok(check("monte_carlo", z.abs() <= 3.0, format!("rate {:.4} vs exact {exact:.4} ({z:+.2} standard errors)", sim.error_rate)))
}

fn fock_moments_reduced(spec: &TruncationSpec) -> Result<Check> {
    let p = reduced();
    let mut worst = 0.0f64;
    for h in Hypothesis::BOTH {
        let rho = channel_output_fock(&p, h, spec)?;
        let target = return_idler_state(&p, h)?;
        let diff = fock_moments(&rho).smatrix - target.smatrix();
        worst = diff.iter().fold(worst, |a, z| a.max(z.norm()));
    }
    Ok(check("fock_moments", worst < 1e-4, format!("largest |V_fock - V_gaussian| {worst:.2e}")))
}

fn pc_variance_oracle(convention: VarianceConvention, spec: &TruncationSpec) -> Result<Check> {
    let p = reduced();
    let oracle = pc_moment_check(&p, spec)?;
    let analytic = pc_statistics_with(&p, convention)?;
    let var_gap = rel(oracle.h0.variance, analytic.h0.variance);
    let mean_gap = (oracle.h1.mean - 2.0 * analytic.c_q).abs();
    Ok(check(
        "pc_variance_oracle",
        var_gap < 1e-3 && mean_gap < 1e-4,
        format!("H0 variance relative gap {var_gap:.2e}, H1 mean gap {mean_gap:.2e}"),
    ))
}

fn oracle_ratio(
    name: &'static str,
    p: &ScenarioParams,
    range: Option<(f64, f64)>,
    spec: &TruncationSpec,
    max_levels: usize,
) -> Result<Check> {
    let q = scenario_qcb(p, Transmitter::Tmsv, spec, max_levels)?;
    let c = scenario_qcb(p, Transmitter::Coherent, spec, max_levels)?;
    let ratio = q.exponent() / c.exponent();
    let in_range = range.is_none_or(|(lo, hi)| (lo..=hi).contains(&ratio));
    let detail = format!(
        "R_tmsv {:.6e} (change {:.1e}), R_coherent {:.6e} (change {:.1e}), ratio {ratio:.4}",
        q.exponent(),
        q.relative_change,
        c.exponent(),
        c.relative_change
    );
    Ok(check(name, q.converged && c.converged && in_range, detail))
}

pub fn run_validation(opts: &ValidateOptions) -> Result<Report> {
    let spec = &opts.truncation;
    let mut checks = vec![
        gaussian_physicality()?,
        scenario_matrix()?,
        eq9_consistency(opts.convention)?,
        exponent_ratio()?,
        beta_vs_summation()?,
        monte_carlo(opts.seed)?,
        fock_moments_reduced(spec)?,
        pc_variance_oracle(opts.convention, spec)?,
        oracle_ratio("oracle_convergence", &reduced(), None, spec, opts.max_levels)?,
    ];
    if opts.level == Level::Full {
        checks.push(oracle_ratio("qcb_ratio_reference", &reference(), Some((3.2, 4.2)), spec, opts.max_levels)?);
    }
    let passed = checks.iter().all(|c| c.passed);
    Ok(Report {
        level: opts.level,
        passed,
        checks,
    })
}
