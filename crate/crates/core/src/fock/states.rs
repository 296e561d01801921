use super::operator::{Block, FockOperator};
use crate::error::{domain, Error, Result};
use nalgebra::DMatrix;
use num_complex::Complex64 as C64;

fn check_mean(n: f64) -> Result<()> {
    if !(n.is_finite() && n >= 0.0) {
        return Err(domain(format!("mean photon number {n} must be finite and >= 0")));
    }
    Ok(())
}

fn check_dim(mode: usize, dim: usize) -> Result<()> {
    if dim < 2 {
        return Err(Error::Contract(format!("mode {mode}: truncation dims must be >= 2")));
    }
    Ok(())
}

/// Geometric weights `N^n/(1+N)^(n+1)`, `n < dim`.
pub fn thermal_weights(n: f64, dim: usize) -> Vec<f64> {
    let ratio = n / (1.0 + n);
    let mut w = Vec::with_capacity(dim);
    let mut p = 1.0 / (1.0 + n);
    for _ in 0..dim {
        w.push(p);
        p *= ratio;
    }
    w
}

/// Truncated thermal state; the trace deficit is `(N/(1+N))^dim`.
pub fn thermal_fock(n: f64, dim: usize) -> Result<FockOperator> {
    check_mean(n)?;
    check_dim(0, dim)?;
    FockOperator::diagonal(vec![dim], &thermal_weights(n, dim))
}

/// TMSV amplitudes `√(N^n/(N+1)^(n+1))` on `|n, n⟩`.
pub fn tmsv_amplitudes(n_s: f64, len: usize) -> Vec<f64> {
    thermal_weights(n_s, len).into_iter().map(f64::sqrt).collect()
}

/// Pure TMSV density operator on dims `[signal, idler]`.
pub fn tmsv_fock(n_s: f64, dims: [usize; 2]) -> Result<FockOperator> {
    check_mean(n_s)?;
    check_dim(0, dims[0])?;
    check_dim(1, dims[1])?;
    let len = dims[0].min(dims[1]);
    let amp = tmsv_amplitudes(n_s, len);
    let indices: Vec<usize> = (0..len).map(|n| n * dims[1] + n).collect();
    let matrix = DMatrix::from_fn(len, len, |i, j| C64::new(amp[i] * amp[j], 0.0));
    FockOperator::from_blocks(dims.to_vec(), vec![Block { indices, matrix }], true)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn vacuum_cases() {
        let t = thermal_fock(0.0, 5).unwrap();
        assert_eq!(t.get(0, 0).re, 1.0);
        assert_eq!(t.trace().re, 1.0);
        let p = tmsv_fock(0.0, [4, 4]).unwrap();
        assert_eq!(p.get(0, 0).re, 1.0);
        assert_eq!(p.trace().re, 1.0);
    }

    #[test]
    fn thermal_unit_mean() {
        let t = thermal_fock(1.0, 60).unwrap();
        for n in [0usize, 1, 7, 59] {
            assert_relative_eq!(t.get(n, n).re, 0.5f64.powi(n as i32 + 1), max_relative = 1e-14);
        }
        let deficit = 1.0 - t.trace().re;
        // (1/2)^60 = 8.67e-19 is below double resolution near 1
        assert!(deficit.abs() < 1e-15);
        let tail: f64 = (60..200).map(|n| 0.5f64.powi(n + 1)).sum();
        assert_relative_eq!(tail, 8.673_617_379_884_035e-19, max_relative = 1e-12);
        assert_relative_eq!(t.photon_numbers()[0], 1.0, max_relative = 1e-9);
    }

    #[test]
    fn tmsv_unit_mean_amplitudes() {
        let amp = tmsv_amplitudes(1.0, 6);
        for (n, a) in amp.iter().enumerate() {
            assert_relative_eq!(*a, 2f64.powf(-(n as f64 + 1.0) / 2.0), max_relative = 1e-14);
        }
        let rho = tmsv_fock(1.0, [6, 6]).unwrap();
        // ⟨1,1|ρ|0,0⟩ = 2^(-1/2) · 2^(-1)
        assert_relative_eq!(rho.get(7, 0).re, 0.5f64.powf(1.5), max_relative = 1e-14);
    }

    #[test]
    fn rejects_bad_input() {
        assert!(thermal_fock(-1.0, 5).is_err());
        assert!(thermal_fock(1.0, 1).is_err());
        assert!(tmsv_fock(f64::NAN, [3, 3]).is_err());
    }
}
