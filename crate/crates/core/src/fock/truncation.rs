use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};

pub const DEFAULT_TAIL_TOL: f64 = 1e-9;

/// Per-mode truncation of the Fock basis.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TruncationSpec {
    /// Starting dimension per mode; `None` uses [`heuristic_dim`].
    pub dims: Option<Vec<usize>>,
    /// Largest admissible probability mass lost to truncation.
    pub tail_tol: f64,
    /// Grow a mode whose tail exceeds `tail_tol` instead of failing.
    pub auto_grow: bool,
}

impl Default for TruncationSpec {
    fn default() -> Self {
        TruncationSpec {
            dims: None,
            tail_tol: DEFAULT_TAIL_TOL,
            auto_grow: true,
        }
    }
}

impl TruncationSpec {
    pub fn fixed(dims: Vec<usize>) -> Self {
        TruncationSpec {
            dims: Some(dims),
            tail_tol: DEFAULT_TAIL_TOL,
            auto_grow: false,
        }
    }

    pub fn with_tail_tol(self, tail_tol: f64) -> Self {
        TruncationSpec { tail_tol, ..self }
    }

    /// Dimension for `mode` carrying a thermal-like number distribution of
    /// mean `mean`, given a share `tol` of the tail budget.
    pub fn resolve(&self, mode: usize, mean: f64, tol: f64) -> Result<usize> {
        let requested = match &self.dims {
            Some(d) => *d.get(mode).ok_or_else(|| Error::Contract(format!("no truncation given for mode {mode}")))?,
            None => heuristic_dim(mean),
        };
        if requested < 2 {
            return Err(Error::Contract(format!("mode {mode}: truncation dims must be >= 2")));
        }
        let tail = thermal_tail(mean, requested);
        if tail <= tol {
            return Ok(requested);
        }
        if self.auto_grow {
            return Ok(tail_dim(mean, tol).max(requested));
        }
        Err(Error::Truncation {
            mode,
            dim: requested,
            detail: format!("tail mass {tail:.3e} exceeds {tol:.1e}"),
        })
    }
}

/// `⌈mean + 10√(mean(mean+1)) + 10⌉`.
pub fn heuristic_dim(mean: f64) -> usize {
    (mean + 10.0 * (mean * (mean + 1.0)).sqrt() + 10.0).ceil() as usize
}

/// Probability that a thermal distribution of mean `mean` puts `dim` or
/// more photons in the mode, `(mean/(mean+1))^dim`.
pub fn thermal_tail(mean: f64, dim: usize) -> f64 {
    if mean == 0.0 {
        return 0.0;
    }
    (dim as f64 * (mean / (mean + 1.0)).ln()).exp()
}

/// Smallest dimension (at least 2) whose thermal tail is below `tol`.
pub fn tail_dim(mean: f64, tol: f64) -> usize {
    if mean == 0.0 {
        return 2;
    }
    let d = (tol.ln() / (mean / (mean + 1.0)).ln()).ceil() as usize;
    let mut d = d.max(2);
    while thermal_tail(mean, d) > tol {
        d += 1;
    }
    d
}

/// Grows a dimension by 25%, rounding up.
pub fn grow(dim: usize) -> usize {
    (dim as f64 * 1.25).ceil() as usize
}
