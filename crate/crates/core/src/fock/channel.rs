//! Hypothesis states and receiver moments built directly in the Fock basis.

use super::operator::{hermitian_eigen, Block, FockOperator, Ladder};
use super::states::{thermal_fock, thermal_weights, tmsv_amplitudes};
use super::truncation::TruncationSpec;
use super::unitary::{beamsplitter_column, displacement_fock, squeezer_sector};
use crate::error::{Error, Result};
use crate::scenario::{Hypothesis, ScenarioParams};
use nalgebra::{DMatrix, DVector};
use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

/// Resolved dimensions of the three-mode channel construction.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ChannelDims {
    pub return_dim: usize,
    pub idler_dim: usize,
    pub bath_dim: usize,
}

impl ChannelDims {
    /// Dims from `spec` (entries: return, idler, bath), each mode holding a
    /// third of the tail budget.
    pub fn resolve(params: &ScenarioParams, spec: &TruncationSpec) -> Result<Self> {
        params.validate()?;
        let tol = spec.tail_tol / 3.0;
        let bath_mean = params.target_bath_photons().unwrap_or(0.0);
        Ok(ChannelDims {
            return_dim: spec.resolve(0, params.n_b + params.returned_signal(), tol)?,
            idler_dim: spec.resolve(1, params.n_s, tol)?,
            bath_dim: spec.resolve(2, bath_mean, tol)?,
        })
    }

    pub fn to_vec(self) -> Vec<usize> {
        vec![self.return_dim, self.idler_dim, self.bath_dim]
    }
}

/// Return ⊗ idler state on dims `[return, idler]`.
///
/// Under H₁ each bath Fock state `|m⟩` of the thermal mixture is combined
/// with the TMSV signal on the beamsplitter, and the bath output is traced
/// out photon number by photon number. The result conserves
/// `n_return − n_idler`, so it is stored as one block per difference.
pub fn channel_output_fock(params: &ScenarioParams, h: Hypothesis, spec: &TruncationSpec) -> Result<FockOperator> {
    let dims = ChannelDims::resolve(params, spec)?;
    channel_output_with_dims(params, h, dims)
}

pub fn channel_output_with_dims(params: &ScenarioParams, h: Hypothesis, dims: ChannelDims) -> Result<FockOperator> {
    params.validate()?;
    let (dr, di) = (dims.return_dim, dims.idler_dim);
    if h == Hypothesis::H0 {
        return Ok(thermal_fock(params.n_b, dr)?.tensor(&thermal_fock(params.n_s, di)?));
    }
    let bath = match params.target_bath_photons() {
        Some(n) => thermal_weights(n, dims.bath_dim),
        None => vec![1.0],
    };
    let amp = tmsv_amplitudes(params.n_s, di);

    // sector q - n = d for d in [-(di-1), dr-1]; slot d + di - 1
    let n_range = |d: i64| {
        let lo = (-d).max(0) as usize;
        let hi = di.min((dr as i64 - d) as usize);
        lo..hi
    };
    let mut sectors: Vec<DMatrix<f64>> = (-(di as i64 - 1)..dr as i64)
        .map(|d| {
            let len = n_range(d).len();
            DMatrix::zeros(len, len)
        })
        .collect();

    let mut phi = vec![0.0; di];
    for (m, &weight) in bath.iter().enumerate() {
        if weight == 0.0 {
            continue;
        }
        let columns: Vec<Vec<f64>> = (0..di).map(|n| beamsplitter_column(params.kappa, n, m)).collect();
        // bath output b = m - d
        for d in -(di as i64 - 1)..=(m as i64).min(dr as i64 - 1) {
            let range = n_range(d);
            if range.is_empty() {
                continue;
            }
            let lo = range.start;
            for n in range.clone() {
                let q = (n as i64 + d) as usize;
                phi[n - lo] = amp[n] * columns[n].get(q).copied().unwrap_or(0.0);
            }
            let len = range.len();
            let block = &mut sectors[(d + di as i64 - 1) as usize];
            for j in 0..len {
                let wj = weight * phi[j];
                if wj == 0.0 {
                    continue;
                }
                for i in 0..len {
                    block[(i, j)] += phi[i] * wj;
                }
            }
        }
    }

    let blocks = sectors
        .into_iter()
        .enumerate()
        .filter(|(_, m)| m.nrows() > 0)
        .map(|(slot, m)| {
            let d = slot as i64 - (di as i64 - 1);
            let indices = n_range(d).map(|n| (n as i64 + d) as usize * di + n).collect();
            Block {
                indices,
                matrix: m.map(|x| C64::new(x, 0.0)),
            }
        })
        .collect();
    FockOperator::from_blocks(vec![dr, di], blocks, true)
}

/// Return-mode dimension for the coherent transmitter, from `spec` entry 0.
pub fn coherent_return_dim(params: &ScenarioParams, spec: &TruncationSpec) -> Result<usize> {
    params.validate()?;
    spec.resolve(0, params.n_b + params.returned_signal(), spec.tail_tol / 2.0)
}

/// Single return mode for the coherent transmitter: thermal noise, displaced
/// by `√(κN_S)` under H₁.
pub fn coherent_output_fock(params: &ScenarioParams, h: Hypothesis, dim: usize) -> Result<FockOperator> {
    params.validate()?;
    let noise = thermal_fock(params.n_b, dim)?;
    match h {
        Hypothesis::H0 => Ok(noise),
        Hypothesis::H1 => {
            let d = displacement_fock(dim, C64::new(params.returned_signal().sqrt(), 0.0))?;
            noise.conjugate_by(&d)
        }
    }
}

/// First and second moments extracted from a Fock-basis state, in the
/// ordering used by [`crate::gaussian::GaussianState`].
#[derive(Debug, Clone, PartialEq)]
pub struct FockMoments {
    pub mean: DVector<C64>,
    pub smatrix: DMatrix<C64>,
}

/// Moments of `rho / Tr rho`.
pub fn fock_moments(rho: &FockOperator) -> FockMoments {
    let n = rho.dims().len();
    let norm = rho.trace().re;
    let v = |j: usize| if j < n { Ladder::Annihilate(j) } else { Ladder::Create(j - n) };
    let vbar = |k: usize| if k < n { Ladder::Create(k) } else { Ladder::Annihilate(k - n) };
    let mean = DVector::from_fn(n, |j, _| rho.expect(&[Ladder::Annihilate(j)]) / norm);
    let first = |j: usize| if j < n { mean[j] } else { mean[j - n].conj() };
    let smatrix = DMatrix::from_fn(2 * n, 2 * n, |j, k| {
        let raw = rho.expect(&[v(j), vbar(k)]) / norm;
        let bar_k = if k < n { mean[k].conj() } else { mean[k - n] };
        raw - first(j) * bar_k
    });
    FockMoments { mean, smatrix }
}

/// Mean and variance of the per-mode difference count
/// `N̂ = a_C† a_I + a_I† a_C`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PcMoments {
    pub mean: f64,
    pub variance: f64,
    pub nbar_c: f64,
    pub nbar_i: f64,
    /// Trace of the truncated conjugate ⊗ idler state.
    pub trace: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PcMomentCheck {
    pub h0: PcMoments,
    pub h1: PcMoments,
    pub channel: ChannelDims,
    pub conjugate_dim: usize,
}

/// Conjugate ⊗ idler state: the return is phase conjugated by a gain-2
/// squeezer against a vacuum ancilla, the ancilla port is kept as the
/// conjugate mode and the other output is traced out.
///
/// The input is decomposed block by block into its eigen-ensemble; each
/// pure component lives in one sector of `n_R − n_I`, which makes the
/// output conserve `n_C + n_I`.
pub fn conjugate_idler_fock(rho_ri: &FockOperator, conjugate_dim: usize) -> Result<FockOperator> {
    let [dr, di] = rho_ri.dims() else {
        return Err(Error::Contract("expected a return ⊗ idler state".into()));
    };
    let (dr, di, dc) = (*dr, *di, conjugate_dim);
    // S|0⟩_V|q⟩_R = Σ_k A_q(k) |k⟩_V |q+k⟩_R
    let columns: Vec<Vec<C64>> = (0..dr)
        .map(|q| squeezer_sector(2.0, 0, q, dc).column(0).iter().copied().collect())
        .collect();

    // blocks by total T = k + n
    let total_range = |t: usize| {
        let lo = t.saturating_sub(dc - 1);
        let hi = di.min(t + 1);
        lo..hi
    };
    let n_totals = dc + di - 1;
    let mut acc: Vec<DMatrix<C64>> = (0..n_totals)
        .map(|t| {
            let l = total_range(t).len();
            DMatrix::zeros(l, l)
        })
        .collect();

    for block in rho_ri.blocks() {
        let sector: Vec<i64> = block.indices.iter().map(|&i| (i / di) as i64 - (i % di) as i64).collect();
        let d = sector[0];
        if sector.iter().any(|&x| x != d) {
            return Err(Error::Contract("input block mixes photon-number-difference sectors".into()));
        }
        let (vals, vecs) = hermitian_eigen(&block.matrix);
        for (e, &lambda) in vals.iter().enumerate() {
            if lambda < -super::operator::NEGATIVE_EIGEN_TOL {
                return Err(Error::Numerical(format!("negative eigenvalue {lambda:.3e} in input state")));
            }
            if lambda <= 0.0 {
                continue;
            }
            let comp: Vec<(usize, usize, C64)> = block
                .indices
                .iter()
                .enumerate()
                .map(|(l, &i)| (i / di, i % di, vecs[(l, e)]))
                .collect();
            let q_max = comp.iter().map(|c| c.0).max().unwrap_or(0);
            // R output r = q + k; conjugate photons k, total k + n = r - d
            for r in 0..q_max + dc {
                let t = r as i64 - d;
                if t < 0 || t as usize >= n_totals {
                    continue;
                }
                let t = t as usize;
                let range = total_range(t);
                let mut psi = vec![C64::new(0.0, 0.0); range.len()];
                let mut any = false;
                for &(q, n, c) in &comp {
                    if q > r || r - q >= dc || !range.contains(&n) {
                        continue;
                    }
                    psi[n - range.start] += c * columns[q][r - q];
                    any = true;
                }
                if !any {
                    continue;
                }
                let psi = DVector::from_vec(psi);
                acc[t] += (&psi * psi.adjoint()) * C64::new(lambda, 0.0);
            }
        }
    }

    let blocks = acc
        .into_iter()
        .enumerate()
        .filter(|(_, m)| m.nrows() > 0)
        .map(|(t, matrix)| Block {
            // (k, n) with k = t - n; flat index k·di + n, increasing as n falls
            indices: total_range(t).rev().map(|n| (t - n) * di + n).collect(),
            matrix: reverse(&matrix),
        })
        .collect();
    FockOperator::from_blocks(vec![dc, di], blocks, true)
}

fn reverse(m: &DMatrix<C64>) -> DMatrix<C64> {
    let n = m.nrows();
    DMatrix::from_fn(n, n, |i, j| m[(n - 1 - i, n - 1 - j)])
}

/// Moments of `N̂ = a_C† a_I + a_I† a_C` on a conjugate ⊗ idler state.
pub fn pc_moments(rho_ci: &FockOperator) -> PcMoments {
    use Ladder::{Annihilate as A, Create as C};
    let norm = rho_ci.trace().re;
    let e = |ops: &[Ladder]| rho_ci.expect(ops).re / norm;
    let mean = e(&[C(0), A(1)]) + e(&[C(1), A(0)]);
    let second = e(&[C(0), A(1), C(0), A(1)])
        + e(&[C(0), A(1), C(1), A(0)])
        + e(&[C(1), A(0), C(0), A(1)])
        + e(&[C(1), A(0), C(1), A(0)]);
    let n = rho_ci.photon_numbers();
    PcMoments {
        mean,
        variance: second - mean * mean,
        nbar_c: n[0] / norm,
        nbar_i: n[1] / norm,
        trace: norm,
    }
}

/// Phase-conjugate receiver moments computed from first principles in the
/// Fock basis. `spec` entries: return, idler, bath, conjugate.
pub fn pc_moment_check(params: &ScenarioParams, spec: &TruncationSpec) -> Result<PcMomentCheck> {
    let channel = ChannelDims::resolve(params, spec)?;
    let conjugate_mean = 1.0 + params.n_b + params.returned_signal();
    let conjugate_dim = spec.resolve(3, conjugate_mean, spec.tail_tol / 3.0)?;
    let run = |h| -> Result<PcMoments> {
        let rho = channel_output_with_dims(params, h, channel)?;
        Ok(pc_moments(&conjugate_idler_fock(&rho, conjugate_dim)?))
    };
    Ok(PcMomentCheck {
        h0: run(Hypothesis::H0)?,
        h1: run(Hypothesis::H1)?,
        channel,
        conjugate_dim,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fock::states::tmsv_fock;
    use crate::gaussian::tmsv_state;
    use crate::scenario::return_idler_state;
    use approx::assert_relative_eq;

    fn reduced() -> ScenarioParams {
        ScenarioParams::new(0.1, 1.0, 0.1, 1).unwrap()
    }

    fn max_abs_diff(a: &DMatrix<C64>, b: &DMatrix<C64>) -> f64 {
        (a - b).iter().fold(0.0, |m, z| m.max(z.norm()))
    }

    #[test]
    fn tmsv_moments_match_gaussian() {
        let rho = tmsv_fock(0.1, [40, 40]).unwrap();
        let m = fock_moments(&rho);
        let g = tmsv_state(0.1).unwrap();
        assert!(max_abs_diff(&m.smatrix, g.smatrix()) < 1e-6);
        assert!(m.mean.iter().all(|z| z.norm() < 1e-15));
    }

    #[test]
    fn blind_channel_is_product_of_thermals() {
        let p = ScenarioParams { kappa: 0.0, ..reduced() };
        let dims = ChannelDims {
            return_dim: 30,
            idler_dim: 12,
            bath_dim: 30,
        };
        let h1 = channel_output_with_dims(&p, Hypothesis::H1, dims).unwrap();
        let h0 = channel_output_with_dims(&p, Hypothesis::H0, dims).unwrap();
        assert!(max_abs_diff(&h1.to_dense(), &h0.to_dense()) < 1e-12);
    }

    #[test]
    fn channel_moments_and_trace() {
        let p = reduced();
        let spec = TruncationSpec::fixed(vec![24, 14, 24]).with_tail_tol(1e-3);
        for h in Hypothesis::BOTH {
            let rho = channel_output_fock(&p, h, &spec).unwrap();
            assert_eq!(rho.dims(), &[24, 14]);
            let m = fock_moments(&rho);
            let g = return_idler_state(&p, h).unwrap();
            assert!(max_abs_diff(&m.smatrix, g.smatrix()) < 1e-4, "{h:?}");
            assert!(rho.hermiticity_defect() < 1e-15);
        }
        let rho = channel_output_fock(&p, Hypothesis::H1, &TruncationSpec::default()).unwrap();
        let deficit = 1.0 - rho.trace().re;
        assert!((-1e-14..=1e-9).contains(&deficit), "deficit {deficit:e}");
    }

    #[test]
    fn lossless_channel_is_tmsv() {
        let p = ScenarioParams { kappa: 1.0, ..reduced() };
        let dims = ChannelDims {
            return_dim: 12,
            idler_dim: 12,
            bath_dim: 2,
        };
        let rho = channel_output_with_dims(&p, Hypothesis::H1, dims).unwrap();
        let tmsv = tmsv_fock(0.1, [12, 12]).unwrap();
        assert!(max_abs_diff(&rho.to_dense(), &tmsv.to_dense()) < 1e-14);
    }

    #[test]
    fn coherent_output_mean_field() {
        let p = reduced();
        let rho = coherent_output_fock(&p, Hypothesis::H1, 40).unwrap();
        let m = fock_moments(&rho);
        assert_relative_eq!(m.mean[0].re, 0.1, max_relative = 1e-9);
        assert_relative_eq!(m.smatrix[(1, 1)].re, 1.0, max_relative = 1e-7);
    }

    #[test]
    fn blind_pc_means_vanish() {
        let p = ScenarioParams { kappa: 0.0, ..reduced() };
        let check = pc_moment_check(&p, &TruncationSpec::default()).unwrap();
        assert!(check.h0.mean.abs() < 1e-12);
        assert!(check.h1.mean.abs() < 1e-12);
    }
}
