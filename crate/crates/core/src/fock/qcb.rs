//! `Q_s = Tr[ρ₀ˢ ρ₁¹⁻ˢ]` and its minimum over `s`.

use super::channel::{channel_output_with_dims, coherent_output_fock, coherent_return_dim, ChannelDims};
use super::operator::{hermitian_eigen, joint_partition, FockOperator, NEGATIVE_EIGEN_TOL};
use super::truncation::{grow, TruncationSpec};
use crate::error::{contract, domain, Error, Result};
use crate::scenario::{Hypothesis, ScenarioParams};
use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

/// Eigenvalues below this are set to zero before taking powers.
const EIGEN_FLOOR: f64 = 1e-300;
const GRID_POINTS: usize = 21;
const S_TOL: f64 = 1e-4;
const INV_PHI: f64 = 0.618_033_988_749_894_9;

struct PairBlock {
    ln0: Vec<f64>,
    ln1: Vec<f64>,
    /// `|⟨u_i|v_j⟩|²` between the eigenvectors of the two restrictions.
    overlap: DMatrix<f64>,
}

/// Both operators eigen-decomposed on their joint block structure, so `Q_s`
/// can be evaluated for many `s` at the cost of a matrix-vector product.
pub struct QsWorkspace {
    blocks: Vec<PairBlock>,
}

/// Logarithms of the eigenvalues, with everything below [`EIGEN_FLOOR`]
/// sent to `-inf`. Eigenvalues that came out of a diagonalization are also
/// cut at the block's numerical rank (`n ε λ_max`), since round-off values of
/// order `ε λ_max` would otherwise be amplified by the fractional powers.
fn clamped_logs(vals: &nalgebra::DVector<f64>, diagonalized: bool, which: &str) -> Result<Vec<f64>> {
    let top = vals.iter().fold(0.0f64, |m, &l| m.max(l));
    let rank_cut = if diagonalized { vals.len() as f64 * f64::EPSILON * top } else { 0.0 };
    let floor = EIGEN_FLOOR.max(rank_cut);
    vals.iter()
        .map(|&l| {
            if l < -NEGATIVE_EIGEN_TOL {
                Err(Error::Numerical(format!("{which} has eigenvalue {l:.3e}")))
            } else if l < floor {
                Ok(f64::NEG_INFINITY)
            } else {
                Ok(l.ln())
            }
        })
        .collect()
}

fn is_diagonal(m: &DMatrix<num_complex::Complex64>) -> bool {
    m.iter().enumerate().all(|(k, z)| k % (m.nrows() + 1) == 0 || *z == num_complex::Complex64::new(0.0, 0.0))
}

fn powers(logs: &[f64], s: f64) -> Vec<f64> {
    logs.iter()
        .map(|&l| if l == f64::NEG_INFINITY { 0.0 } else { (s * l).exp() })
        .collect()
}

impl QsWorkspace {
    pub fn new(rho0: &FockOperator, rho1: &FockOperator) -> Result<Self> {
        if !(rho0.is_hermitian() && rho1.is_hermitian()) {
            return Err(contract("Q_s needs Hermitian operators"));
        }
        let mut blocks = Vec::new();
        for indices in joint_partition(rho0, rho1)? {
            let (r0, r1) = (rho0.restrict(&indices), rho1.restrict(&indices));
            let (v0, u0) = hermitian_eigen(&r0);
            let (v1, u1) = hermitian_eigen(&r1);
            let overlap = (u0.adjoint() * u1).map(|z| z.norm_sqr());
            blocks.push(PairBlock {
                ln0: clamped_logs(&v0, !is_diagonal(&r0), "first state")?,
                ln1: clamped_logs(&v1, !is_diagonal(&r1), "second state")?,
                overlap,
            });
        }
        Ok(QsWorkspace { blocks })
    }

    pub fn qs(&self, s: f64) -> f64 {
        let mut total = 0.0;
        for b in &self.blocks {
            let a = powers(&b.ln0, s);
            let c = powers(&b.ln1, 1.0 - s);
            for (j, cj) in c.iter().enumerate() {
                if *cj == 0.0 {
                    continue;
                }
                let col = b.overlap.column(j);
                let dot: f64 = a.iter().zip(col.iter()).map(|(x, w)| x * w).sum();
                total += dot * cj;
            }
        }
        total
    }

    /// Coarse grid over `s`, then golden-section refinement around the best
    /// grid point.
    pub fn qcb(&self) -> Result<QcbResult> {
        let grid: Vec<(f64, f64)> = (0..GRID_POINTS)
            .map(|i| {
                let s = i as f64 / (GRID_POINTS - 1) as f64;
                (s, self.qs(s))
            })
            .collect();
        let bhattacharyya = grid[GRID_POINTS / 2].1;
        let (lo_q, hi_q) = grid
            .iter()
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &(_, q)| (lo.min(q), hi.max(q)));
        if !(lo_q.is_finite() && hi_q.is_finite()) {
            return Err(Error::Numerical("Q_s is not finite".into()));
        }
        if hi_q - lo_q <= 1e-14 * hi_q.abs() {
            return Ok(QcbResult::new(bhattacharyya, 0.5, bhattacharyya));
        }
        let best = (0..GRID_POINTS).min_by(|&a, &b| grid[a].1.total_cmp(&grid[b].1)).unwrap();
        let (mut s_star, mut q_star) = grid[best];
        let mut lo = grid[best.saturating_sub(1)].0;
        let mut hi = grid[(best + 1).min(GRID_POINTS - 1)].0;
        let mut x1 = hi - INV_PHI * (hi - lo);
        let mut x2 = lo + INV_PHI * (hi - lo);
        let (mut f1, mut f2) = (self.qs(x1), self.qs(x2));
        while hi - lo > S_TOL {
            if f1 <= f2 {
                hi = x2;
                x2 = x1;
                f2 = f1;
                x1 = hi - INV_PHI * (hi - lo);
                f1 = self.qs(x1);
            } else {
                lo = x1;
                x1 = x2;
                f1 = f2;
                x2 = lo + INV_PHI * (hi - lo);
                f2 = self.qs(x2);
            }
        }
        for (s, q) in [(x1, f1), (x2, f2)] {
            if q < q_star {
                s_star = s;
                q_star = q;
            }
        }
        if q_star > bhattacharyya {
            return Err(Error::Numerical("Chernoff minimum above the Bhattacharyya value".into()));
        }
        Ok(QcbResult::new(q_star, s_star, bhattacharyya))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QcbResult {
    /// `min_s Q_s`.
    pub q_qcb: f64,
    pub s_star: f64,
    /// `-ln Q_QCB`.
    pub exponent: f64,
    /// `Q_{1/2}`.
    pub bhattacharyya: f64,
    pub bhattacharyya_exponent: f64,
}

impl QcbResult {
    fn new(q: f64, s: f64, q_half: f64) -> Self {
        QcbResult {
            q_qcb: q,
            s_star: s,
            exponent: (-q.ln()).max(0.0),
            bhattacharyya: q_half,
            bhattacharyya_exponent: (-q_half.ln()).max(0.0),
        }
    }
}

pub fn qs_overlap(rho0: &FockOperator, rho1: &FockOperator, s: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&s) {
        return Err(domain(format!("s = {s} outside [0, 1]")));
    }
    Ok(QsWorkspace::new(rho0, rho1)?.qs(s))
}

pub fn qcb(rho0: &FockOperator, rho1: &FockOperator) -> Result<QcbResult> {
    QsWorkspace::new(rho0, rho1)?.qcb()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Transmitter {
    /// Entangled signal-idler pairs, joint return-idler measurement.
    Tmsv,
    /// Coherent state, return mode only.
    Coherent,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QcbLevel {
    pub dims: Vec<usize>,
    pub result: QcbResult,
}

/// QCB of one scenario with its truncation history.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScenarioQcb {
    pub transmitter: Transmitter,
    pub levels: Vec<QcbLevel>,
    /// Relative exponent change across the last growth step.
    pub relative_change: f64,
    pub converged: bool,
}

impl ScenarioQcb {
    pub fn result(&self) -> &QcbResult {
        &self.levels.last().expect("at least one level").result
    }

    /// Per-mode exponent at the finest truncation.
    pub fn exponent(&self) -> f64 {
        self.result().exponent
    }
}

/// Relative change below which successive truncation levels count as
/// converged.
pub const CONVERGENCE_TOL: f64 = 0.01;

/// Exponents below this are round-off and count as zero when judging
/// convergence.
const EXPONENT_FLOOR: f64 = 1e-12;

fn normalized(rho: FockOperator) -> FockOperator {
    let t = rho.trace().re;
    rho.scaled(1.0 / t)
}

fn qcb_at(params: &ScenarioParams, transmitter: Transmitter, dims: &[usize]) -> Result<QcbResult> {
    let (rho0, rho1) = match transmitter {
        Transmitter::Tmsv => {
            let d = ChannelDims {
                return_dim: dims[0],
                idler_dim: dims[1],
                bath_dim: dims[2],
            };
            (
                channel_output_with_dims(params, Hypothesis::H0, d)?,
                channel_output_with_dims(params, Hypothesis::H1, d)?,
            )
        }
        Transmitter::Coherent => (
            coherent_output_fock(params, Hypothesis::H0, dims[0])?,
            coherent_output_fock(params, Hypothesis::H1, dims[0])?,
        ),
    };
    qcb(&normalized(rho0), &normalized(rho1))
}

/// Per-mode QCB of the hypothesis pair for one transmitter.
///
/// Starts from `spec` (grown to its tail budget when allowed) and enlarges
/// every mode by 25% until the exponent moves by less than
/// [`CONVERGENCE_TOL`] relative, giving up after `max_levels` evaluations.
pub fn scenario_qcb(
    params: &ScenarioParams,
    transmitter: Transmitter,
    spec: &TruncationSpec,
    max_levels: usize,
) -> Result<ScenarioQcb> {
    params.validate()?;
    if max_levels < 2 {
        return Err(domain("convergence needs at least two truncation levels"));
    }
    let mut dims = match transmitter {
        Transmitter::Tmsv => ChannelDims::resolve(params, spec)?.to_vec(),
        Transmitter::Coherent => vec![coherent_return_dim(params, spec)?],
    };
    if params.returned_signal() == 0.0 {
        // nothing comes back: the two hypotheses are the same state
        let result = QcbResult {
            q_qcb: 1.0,
            s_star: 0.5,
            exponent: 0.0,
            bhattacharyya: 1.0,
            bhattacharyya_exponent: 0.0,
        };
        return Ok(ScenarioQcb {
            transmitter,
            levels: vec![QcbLevel { dims, result }],
            relative_change: 0.0,
            converged: true,
        });
    }
    let mut levels: Vec<QcbLevel> = Vec::new();
    let mut change = f64::INFINITY;
    for _ in 0..max_levels {
        let result = qcb_at(params, transmitter, &dims)?;
        if let Some(prev) = levels.last() {
            let (a, b) = (prev.result.exponent, result.exponent);
            change = if a.max(b) <= EXPONENT_FLOOR { 0.0 } else { (b - a).abs() / b.abs().max(a.abs()) };
        }
        levels.push(QcbLevel {
            dims: dims.clone(),
            result,
        });
        if change < CONVERGENCE_TOL {
            return Ok(ScenarioQcb {
                transmitter,
                levels,
                relative_change: change,
                converged: true,
            });
        }
        dims = dims.iter().map(|&d| grow(d)).collect();
    }
    let last = &levels.last().expect("max_levels >= 2").dims;
    Err(Error::Truncation {
        mode: 0,
        dim: last[0],
        detail: format!("QCB exponent still moving by {change:.2e} after {max_levels} levels"),
    })
}
