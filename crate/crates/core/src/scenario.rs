//! Hypothesis-conditioned return states for the entangled and the
//! coherent-state transmitters.

use crate::error::{domain, Result};
use crate::gaussian::{coherent_state, thermal_state, tmsv_state, GaussianState, ModeMap};
use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

/// The four physical knobs of one detection problem.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScenarioParams {
    /// Mean signal photons per mode.
    pub n_s: f64,
    /// Mean background photons per mode.
    pub n_b: f64,
    /// Round-trip transmissivity.
    pub kappa: f64,
    /// Number of signal-idler mode pairs.
    pub m: u64,
}

impl ScenarioParams {
    pub fn new(n_s: f64, n_b: f64, kappa: f64, m: u64) -> Result<Self> {
        let p = ScenarioParams { n_s, n_b, kappa, m };
        p.validate()?;
        Ok(p)
    }

    /// The operating point of the reference comparison figure.
    pub fn reference_figure(m: u64) -> Self {
        ScenarioParams {
            n_s: 0.01,
            n_b: 20.0,
            kappa: 0.01,
            m,
        }
    }

    pub fn validate(&self) -> Result<()> {
        for (name, x) in [("N_S", self.n_s), ("N_B", self.n_b)] {
            if !(x.is_finite() && x >= 0.0) {
                return Err(domain(format!("{name} = {x} must be finite and >= 0")));
            }
        }
        if !(0.0..=1.0).contains(&self.kappa) {
            return Err(domain(format!("kappa = {} outside [0, 1]", self.kappa)));
        }
        if self.m == 0 {
            return Err(domain("M must be at least 1"));
        }
        Ok(())
    }

    pub fn with_m(self, m: u64) -> Self {
        ScenarioParams { m, ..self }
    }

    /// `κ N_S`, the mean number of signal photons that make it back.
    pub fn returned_signal(&self) -> f64 {
        self.kappa * self.n_s
    }

    /// Mean photon number of the thermal bath under H₁, `N_B/(1-κ)`, chosen
    /// so that the return carries `N_B` noise photons under both hypotheses.
    /// `None` at `κ = 1`, where the bath does not couple in.
    pub fn target_bath_photons(&self) -> Option<f64> {
        (self.kappa < 1.0).then(|| self.n_b / (1.0 - self.kappa))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Hypothesis {
    /// Target absent.
    H0,
    /// Target present.
    H1,
}

impl Hypothesis {
    pub const BOTH: [Hypothesis; 2] = [Hypothesis::H0, Hypothesis::H1];
}

/// Joint return–idler state (mode 0 return, mode 1 idler) for the TMSV
/// transmitter.
///
/// Built constructively: under H₁ the signal of a TMSV pair is mixed with a
/// thermal bath at `N_B/(1-κ)` on a beamsplitter of transmissivity `κ` and
/// the bath output is discarded; under H₀ the return is pure background and
/// the idler is the reduced TMSV state.
pub fn return_idler_state(params: &ScenarioParams, h: Hypothesis) -> Result<GaussianState> {
    params.validate()?;
    let pair = tmsv_state(params.n_s)?;
    match h {
        Hypothesis::H0 => {
            let idler = pair.partial_state(&[1])?;
            Ok(thermal_state(params.n_b)?.tensor(&idler))
        }
        Hypothesis::H1 => match params.target_bath_photons() {
            Some(bath) => {
                // modes: 0 signal, 1 idler, 2 bath
                let joint = pair.tensor(&thermal_state(bath)?);
                let bs = ModeMap::beamsplitter(params.kappa)?;
                joint.apply_mode_map(&bs, &[0, 2])?.partial_state(&[0, 1])
            }
            None => Ok(pair),
        },
    }
}

/// Single return mode for the coherent-state transmitter: thermal `N_B`
/// noise with mean field `0` (H₀) or `√(κN_S)` (H₁).
pub fn coherent_return_state(params: &ScenarioParams, h: Hypothesis) -> Result<GaussianState> {
    params.validate()?;
    let amplitude = match h {
        Hypothesis::H0 => 0.0,
        Hypothesis::H1 => params.returned_signal().sqrt(),
    };
    let noise = thermal_state(params.n_b)?;
    noise.with_mean(coherent_state(C64::new(amplitude, 0.0)).mean().clone())
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn reference() -> ScenarioParams {
        ScenarioParams::reference_figure(1)
    }

    #[test]
    fn validation() {
        assert!(ScenarioParams::new(-0.1, 1.0, 0.1, 1).is_err());
        assert!(ScenarioParams::new(0.1, -1.0, 0.1, 1).is_err());
        assert!(ScenarioParams::new(0.1, 1.0, 1.1, 1).is_err());
        assert!(ScenarioParams::new(0.1, 1.0, 0.1, 0).is_err());
        assert!(ScenarioParams::new(0.1, 1.0, 1.0, 1).is_ok());
    }

    #[test]
    fn target_absent_is_product_of_thermals() {
        let p = reference();
        let s = return_idler_state(&p, Hypothesis::H0).unwrap();
        let diag = [21.0, 1.01, 20.0, 0.01];
        for (i, &d) in diag.iter().enumerate() {
            for j in 0..4 {
                let expected = if i == j { d } else { 0.0 };
                assert_relative_eq!(s.smatrix()[(i, j)].re, expected, max_relative = 1e-12);
            }
        }
        assert_eq!(s.moments().phase_sensitive[(0, 1)].norm(), 0.0);
    }

    #[test]
    fn target_present_matches_printed_matrix() {
        let p = reference();
        let s = return_idler_state(&p, Hypothesis::H1).unwrap();
        let v = s.smatrix();
        let c = (1.01e-4f64).sqrt();
        assert_relative_eq!(c, 0.010_049_875_6, max_relative = 1e-8);
        let diag = [1e-4 + 21.0, 1.01, 1e-4 + 20.0, 0.01];
        for i in 0..4 {
            assert_relative_eq!(v[(i, i)].re, diag[i], max_relative = 1e-12);
            assert_relative_eq!(v[(i, 3 - i)].re, c, max_relative = 1e-12);
        }
        // noise photons in the return: (1-κ)·N_B/(1-κ) = N_B
        assert_relative_eq!(v[(2, 2)].re - p.returned_signal(), p.n_b, max_relative = 1e-12);
    }

    #[test]
    fn zero_transmissivity_equals_target_absent() {
        let p = ScenarioParams { kappa: 0.0, ..reference() };
        let h0 = return_idler_state(&p, Hypothesis::H0).unwrap();
        let h1 = return_idler_state(&p, Hypothesis::H1).unwrap();
        assert!((h0.smatrix() - h1.smatrix()).iter().all(|z| z.norm() < 1e-12));
    }

    #[test]
    fn lossless_limit_is_bare_tmsv() {
        let p = ScenarioParams { kappa: 1.0, ..reference() };
        let s = return_idler_state(&p, Hypothesis::H1).unwrap();
        assert_eq!(s, tmsv_state(p.n_s).unwrap());
    }

    #[test]
    fn coherent_returns() {
        let p = reference();
        let h0 = coherent_return_state(&p, Hypothesis::H0).unwrap();
        let h1 = coherent_return_state(&p, Hypothesis::H1).unwrap();
        assert_eq!(h0.mean()[0].norm(), 0.0);
        assert_relative_eq!(h1.mean()[0].re, 0.01, max_relative = 1e-14);
        assert_eq!(h0.smatrix(), thermal_state(20.0).unwrap().smatrix());
        assert_eq!(h0.smatrix(), h1.smatrix());
        let blind = ScenarioParams { kappa: 0.0, ..p };
        assert_eq!(
            coherent_return_state(&blind, Hypothesis::H0).unwrap(),
            coherent_return_state(&blind, Hypothesis::H1).unwrap()
        );
    }
}
