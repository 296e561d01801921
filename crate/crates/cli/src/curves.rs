use crate::cache::{cached_qcb, QcbCache};
use crate::config::{Curve, RunConfig};
use crate::error::Result;
use qillum::fock::Transmitter;
use qillum::receivers::{
    homodyne_error_prob, opa_error_prob_exact, opa_error_prob_gaussian, pc_error_prob_gaussian,
};
use rayon::prelude::*;
use serde::Serialize;

/// Error probability of every selected curve on the M grid.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CurveTable {
    pub columns: Vec<Curve>,
    pub m: Vec<u64>,
    /// `rows[i][j]` is curve `columns[j]` at `m[i]`.
    pub rows: Vec<Vec<f64>>,
    pub qcb_tmsv_exponent: Option<f64>,
    pub qcb_coherent_exponent: Option<f64>,
}

impl CurveTable {
    pub fn column(&self, curve: Curve) -> Option<Vec<f64>> {
        let j = self.columns.iter().position(|&c| c == curve)?;
        Some(self.rows.iter().map(|r| r[j]).collect())
    }
}

pub fn compute_curves(cfg: &RunConfig, mut cache: Option<&mut QcbCache>) -> Result<CurveTable> {
    cfg.validate()?;
    let columns = cfg.curves();
    let grid = cfg.m_grid()?;
    let base = cfg.params(1)?;
    let mut exponent = |t: Transmitter, curve: Curve| -> Result<Option<f64>> {
        if !columns.contains(&curve) {
            return Ok(None);
        }
        let q = cached_qcb(cache.as_deref_mut(), &base, t, &cfg.truncation, cfg.max_levels)?;
        Ok(Some(q.exponent()))
    };
    let r_tmsv = exponent(Transmitter::Tmsv, Curve::QcbTmsv)?;
    let r_coherent = exponent(Transmitter::Coherent, Curve::QcbCoherent)?;
    let opa = if columns.iter().any(|c| matches!(c, Curve::OpaExact | Curve::OpaGauss)) {
        Some(cfg.opa_config()?)
    } else {
        None
    };

    let rows = grid
        .par_iter()
        .map(|&m| {
            let p = base.with_m(m);
            let chernoff = |r: Option<f64>| 0.5 * (-(m as f64) * r.expect("exponent computed")).exp();
            columns
                .iter()
                .map(|c| {
                    Ok(match c {
                        Curve::QcbTmsv => chernoff(r_tmsv),
                        Curve::QcbCoherent => chernoff(r_coherent),
                        Curve::OpaExact => {
                            let cfg = opa.as_ref().expect("opa configured");
                            opa_error_prob_exact(&p, cfg)?.pe_exact.expect("exact tail")
                        }
                        Curve::OpaGauss => opa_error_prob_gaussian(&p, opa.as_ref().expect("opa configured"))?.pe_gaussian,
                        Curve::PcGauss => pc_error_prob_gaussian(&p)?.pe_gaussian,
                        Curve::Hom => homodyne_error_prob(&p)?.pe_gaussian,
                    })
                })
                .collect::<Result<Vec<f64>>>()
        })
        .collect::<Result<Vec<_>>>()?;

    Ok(CurveTable {
        columns,
        m: grid,
        rows,
        qcb_tmsv_exponent: r_tmsv,
        qcb_coherent_exponent: r_coherent,
    })
}
