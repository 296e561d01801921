use crate::cache::{cached_qcb, QcbCache};
use crate::config::RunConfig;
use crate::error::Result;
use qillum::fock::Transmitter;
use qillum::receivers::{
    homodyne_error_prob, opa_bhattacharyya_exponent, opa_error_prob_gaussian, pc_exponent_eq9,
};
use serde::Serialize;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EchoedParams {
    pub n_s: f64,
    pub n_b: f64,
    pub kappa: f64,
    pub opa_gain: f64,
}

/// Per-mode error exponents (nats per mode pair).
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExponentTable {
    pub params: EchoedParams,
    pub r_q: f64,
    pub r_c: f64,
    pub r_c_hom: f64,
    pub r_b_eq6: f64,
    pub r_b_exact: f64,
    pub r_opa: f64,
    pub r_pcr_eq9: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub r_qcb_numeric_tmsv: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub r_qcb_numeric_coherent: Option<f64>,
}

/// Closed-form exponents; with `numeric` also the oracle QCB exponents.
pub fn exponent_table(cfg: &RunConfig, numeric: bool, mut cache: Option<&mut QcbCache>) -> Result<ExponentTable> {
    cfg.validate()?;
    let p = cfg.params(1)?;
    let opa = cfg.opa_config()?;
    // κN_S/N_B and its quarter; zero background is a domain error
    let asym = qillum::receivers::asymptotic_exponents(&p)?;
    let bhattacharyya = opa_bhattacharyya_exponent(&p, &opa)?;
    let mut numeric_exponent = |t: Transmitter| -> Result<Option<f64>> {
        if !numeric {
            return Ok(None);
        }
        Ok(Some(cached_qcb(cache.as_deref_mut(), &p, t, &cfg.truncation, cfg.max_levels)?.exponent()))
    };
    Ok(ExponentTable {
        params: EchoedParams {
            n_s: p.n_s,
            n_b: p.n_b,
            kappa: p.kappa,
            opa_gain: opa.gain(),
        },
        r_q: asym.r_q,
        r_c: asym.r_c,
        r_c_hom: homodyne_error_prob(&p)?.exponent,
        r_b_eq6: bhattacharyya.eq6,
        r_b_exact: bhattacharyya.exact,
        r_opa: opa_error_prob_gaussian(&p, &opa)?.exponent,
        r_pcr_eq9: pc_exponent_eq9(&p)?,
        r_qcb_numeric_tmsv: numeric_exponent(Transmitter::Tmsv)?,
        r_qcb_numeric_coherent: numeric_exponent(Transmitter::Coherent)?,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reference_values_and_ordering() {
        let t = exponent_table(&RunConfig::default(), false, None).unwrap();
        assert!((t.r_q / 5e-6 - 1.0).abs() < 1e-12);
        assert!((t.r_c / 1.25e-6 - 1.0).abs() < 1e-12);
        assert!((t.r_pcr_eq9 / 2.3565e-6 - 1.0).abs() < 1e-4);
        assert!(t.r_q >= t.r_pcr_eq9 && t.r_pcr_eq9 >= t.r_opa && t.r_opa >= t.r_c);
        assert!(t.r_qcb_numeric_tmsv.is_none());
    }

    #[test]
    fn blind_target_is_all_zero() {
        let cfg = RunConfig {
            kappa: 0.0,
            ..RunConfig::default()
        };
        let t = exponent_table(&cfg, true, None).unwrap();
        for r in [t.r_q, t.r_c, t.r_c_hom, t.r_b_eq6, t.r_b_exact, t.r_opa, t.r_pcr_eq9] {
            assert_eq!(r, 0.0);
        }
        assert_eq!(t.r_qcb_numeric_tmsv, Some(0.0));
        assert_eq!(t.r_qcb_numeric_coherent, Some(0.0));
    }
}
