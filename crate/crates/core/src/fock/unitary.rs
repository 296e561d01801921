//! Linear-optics unitaries on the truncated Fock basis.
//!
//! Every gate is built by exponentiating its quadratic generator inside the
//! invariant subspaces it leaves alone: total photon number for the
//! beamsplitter, photon-number difference for the two-mode squeezer. Sectors
//! that the truncation cuts are exponentiated in a padded basis and then
//! restricted.

use super::operator::{expm_antihermitian, Block, FockOperator};
use crate::error::{domain, Error, Result};
use crate::special::ln_choose;
use nalgebra::DMatrix;
use num_complex::Complex64 as C64;

fn check_dims(dims: &[usize]) -> Result<()> {
    if let Some(mode) = dims.iter().position(|&d| d < 2) {
        return Err(Error::Contract(format!("mode {mode}: truncation dims must be >= 2")));
    }
    Ok(())
}

fn check_transmissivity(kappa: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&kappa) {
        return Err(domain(format!("transmissivity {kappa} outside [0, 1]")));
    }
    Ok(())
}

fn check_gain(gain: f64) -> Result<()> {
    if !(gain.is_finite() && gain >= 1.0) {
        return Err(domain(format!("squeezer gain {gain} must be >= 1")));
    }
    Ok(())
}

/// Beamsplitter with `a → √κ a + √(1-κ) b` on dims `[a, b]`, as one
/// block per total photon number.
pub fn beamsplitter_fock(dims: [usize; 2], kappa: f64) -> Result<FockOperator> {
    check_dims(&dims)?;
    check_transmissivity(kappa)?;
    let theta = kappa.sqrt().acos();
    let [da, db] = dims;
    let mut blocks = Vec::new();
    for total in 0..=(da + db - 2) {
        let size = total + 1;
        let mut gen = DMatrix::<C64>::zeros(size, size);
        for k in 0..total {
            // a†b |k, N-k⟩ = √((k+1)(N-k)) |k+1, N-k-1⟩
            let x = theta * (((k + 1) * (total - k)) as f64).sqrt();
            gen[(k + 1, k)] = C64::new(x, 0.0);
            gen[(k, k + 1)] = C64::new(-x, 0.0);
        }
        let u = expm_antihermitian(&gen);
        let keep: Vec<usize> = (0..=total).filter(|&k| k < da && total - k < db).collect();
        blocks.push(Block {
            indices: keep.iter().map(|&k| k * db + total - k).collect(),
            matrix: DMatrix::from_fn(keep.len(), keep.len(), |i, j| u[(keep[i], keep[j])]),
        });
    }
    FockOperator::from_blocks(dims.to_vec(), blocks, false)
}

/// Column `U|n, m⟩` of the beamsplitter, by a recursion independent of
/// [`beamsplitter_fock`]: entry `q` is the amplitude of `|q, n+m-q⟩`.
///
/// In the Schrödinger picture `U a† U† = √κ a† - √(1-κ) b†` and
/// `U b† U† = √(1-κ) a† + √κ b†`; `U|0, m⟩` is binomial and each extra `a`
/// photon is one application of the first creation operator.
pub fn beamsplitter_column(kappa: f64, n: usize, m: usize) -> Vec<f64> {
    let t = kappa.sqrt();
    let r = (1.0 - kappa).sqrt();
    let mut amp = vec![0.0; m + 1];
    if r == 0.0 {
        amp[0] = 1.0;
    } else if t == 0.0 {
        amp[m] = 1.0;
    } else {
        let (lt, lr) = (t.ln(), r.ln());
        for (q, a) in amp.iter_mut().enumerate() {
            let ln = 0.5 * ln_choose(m as f64, q as f64) + q as f64 * lr + (m - q) as f64 * lt;
            *a = ln.exp();
        }
    }
    for step in 1..=n {
        let total = m + step - 1;
        let mut next = vec![0.0; total + 2];
        for q in 0..=total + 1 {
            let mut v = 0.0;
            if q > 0 {
                v += t * (q as f64).sqrt() * amp[q - 1];
            }
            if q <= total {
                v -= r * ((total + 1 - q) as f64).sqrt() * amp[q];
            }
            next[q] = v / (step as f64).sqrt();
        }
        amp = next;
    }
    amp
}

/// Padding that keeps a squeezer sector exponential accurate inside the
/// retained range.
fn squeezer_padding(gain: f64) -> usize {
    let tanh_sq = (gain - 1.0) / gain;
    if tanh_sq <= 0.0 {
        return 0;
    }
    20 + (40.0 / -tanh_sq.ln()).ceil() as usize
}

/// `exp(ρ(a†b† - ab))` with `cosh ρ = √G`, inside the sector spanned by
/// `|x₀ + k, y₀ + k⟩`, `k < len`.
pub(crate) fn squeezer_sector(gain: f64, x0: usize, y0: usize, len: usize) -> DMatrix<C64> {
    if gain == 1.0 {
        return DMatrix::identity(len, len);
    }
    let rho = gain.sqrt().acosh();
    let padded = len + squeezer_padding(gain);
    let mut gen = DMatrix::<C64>::zeros(padded, padded);
    for k in 0..padded - 1 {
        let x = rho * (((x0 + k + 1) * (y0 + k + 1)) as f64).sqrt();
        gen[(k + 1, k)] = C64::new(x, 0.0);
        gen[(k, k + 1)] = C64::new(-x, 0.0);
    }
    expm_antihermitian(&gen).view((0, 0), (len, len)).into_owned()
}

/// Two-mode squeezer with `a → √G a + √(G-1) b†` on dims `[a, b]`, as one
/// block per photon-number difference.
pub fn two_mode_squeezer_fock(dims: [usize; 2], gain: f64) -> Result<FockOperator> {
    check_dims(&dims)?;
    check_gain(gain)?;
    let [da, db] = dims;
    let mut blocks = Vec::new();
    for diff in -(db as i64 - 1)..=(da as i64 - 1) {
        let x0 = diff.max(0) as usize;
        let y0 = (-diff).max(0) as usize;
        let len = (da - x0).min(db - y0);
        blocks.push(Block {
            indices: (0..len).map(|k| (x0 + k) * db + y0 + k).collect(),
            matrix: squeezer_sector(gain, x0, y0, len),
        });
    }
    blocks.sort_by_key(|b| b.indices[0]);
    FockOperator::from_blocks(dims.to_vec(), blocks, false)
}

/// Displacement `exp(α a† - ᾱ a)` on one mode.
pub fn displacement_fock(dim: usize, alpha: C64) -> Result<FockOperator> {
    check_dims(&[dim])?;
    if !(alpha.re.is_finite() && alpha.im.is_finite()) {
        return Err(domain("displacement amplitude must be finite"));
    }
    let mut pad = 30usize;
    while alpha.norm() * ((dim + pad) as f64).sqrt() * std::f64::consts::E > pad as f64 {
        pad *= 2;
    }
    let padded = dim + pad + 20;
    let mut gen = DMatrix::<C64>::zeros(padded, padded);
    for n in 0..padded - 1 {
        let s = ((n + 1) as f64).sqrt();
        gen[(n + 1, n)] = alpha * s;
        gen[(n, n + 1)] = -alpha.conj() * s;
    }
    let u = expm_antihermitian(&gen).view((0, 0), (dim, dim)).into_owned();
    FockOperator::from_dense(vec![dim], u, false)
}
