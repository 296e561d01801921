//! Multimode Gaussian states described by first moments and the
//! non-symmetrized second-moment matrix, plus Bogoliubov mode maps.
//!
//! For `n` modes the ladder vector is `v = [a_1..a_n, a_1^†..a_n^†]` and its
//! adjoint partner `v̄ = [a_1^†..a_n^†, a_1..a_n]`. The second-moment matrix
//! is `V_{jk} = <δv_j δv̄_k>` taken about the mean, so in block form
//!
//! ```text
//! V = [[ 1 + Nᵀ , M  ],
//!      [ M̄     , N  ]]      N_{jk} = <δa_j^† δa_k>,  M_{jk} = <δa_j δa_k>
//! ```
//!
//! and for a two-mode squeezed vacuum entry (1,1) is `N_S + 1` and entry
//! (1,4) is `sqrt(N_S(N_S+1))`. The n-mode ordering (all annihilators first)
//! generalizes the two-mode matrices.

use crate::error::{contract, domain, Result};
use nalgebra::{DMatrix, DVector};
use num_complex::Complex64 as C64;

/// Tolerance on symplectic-eigenvalue deficit below 1/2 and on
/// commutator preservation of mode maps.
pub const TOL_PHYS: f64 = 1e-9;

const ZERO: C64 = C64 { re: 0.0, im: 0.0 };
const ONE: C64 = C64 { re: 1.0, im: 0.0 };

#[derive(Debug, Clone, PartialEq)]
pub struct GaussianState {
    mean: DVector<C64>,
    smatrix: DMatrix<C64>,
}

/// Moments read off a Gaussian state, mean contributions included.
#[derive(Debug, Clone, PartialEq)]
pub struct Moments {
    /// `<a_j^† a_j>`.
    pub photon_numbers: Vec<f64>,
    /// `<a_j a_k>`.
    pub phase_sensitive: DMatrix<C64>,
    /// `<a_j^† a_k>`.
    pub phase_insensitive: DMatrix<C64>,
}

impl GaussianState {
    /// Builds a state from a mean vector and a second-moment matrix in the
    /// ordering described in the module docs. The matrix is symmetrized and
    /// checked for physicality.
    pub fn new(mean: DVector<C64>, smatrix: DMatrix<C64>) -> Result<Self> {
        let n = mean.len();
        if n == 0 {
            return Err(contract("a Gaussian state needs at least one mode"));
        }
        if smatrix.shape() != (2 * n, 2 * n) {
            return Err(contract(format!(
                "second-moment matrix is {:?}, expected {}x{}",
                smatrix.shape(),
                2 * n,
                2 * n
            )));
        }
        let state = GaussianState { mean, smatrix }.symmetrized();
        state.check_physical()?;
        Ok(state)
    }

    /// Zero-mean state from the blocks `N_{jk} = <a_j^† a_k>` and
    /// `M_{jk} = <a_j a_k>`.
    pub fn from_blocks(n_block: &DMatrix<C64>, m_block: &DMatrix<C64>) -> Result<Self> {
        let n = n_block.nrows();
        Self::new(DVector::zeros(n), assemble(n_block, m_block))
    }

    pub fn vacuum(n_modes: usize) -> Self {
        let mut smatrix = DMatrix::zeros(2 * n_modes, 2 * n_modes);
        for j in 0..n_modes {
            smatrix[(j, j)] = ONE;
        }
        GaussianState {
            mean: DVector::zeros(n_modes),
            smatrix,
        }
    }

    pub fn n_modes(&self) -> usize {
        self.mean.len()
    }

    pub fn mean(&self) -> &DVector<C64> {
        &self.mean
    }

    pub fn smatrix(&self) -> &DMatrix<C64> {
        &self.smatrix
    }

    /// Central `<δa_j^† δa_k>` block.
    pub fn n_block(&self) -> DMatrix<C64> {
        let n = self.n_modes();
        self.smatrix.view((n, n), (n, n)).into_owned()
    }

    /// Central `<δa_j δa_k>` block.
    pub fn m_block(&self) -> DMatrix<C64> {
        let n = self.n_modes();
        self.smatrix.view((0, n), (n, n)).into_owned()
    }

    pub fn is_zero_mean(&self) -> bool {
        self.mean.iter().all(|z| *z == ZERO)
    }

    /// Replaces the mean vector (a displacement).
    pub fn with_mean(mut self, mean: DVector<C64>) -> Result<Self> {
        if mean.len() != self.n_modes() {
            return Err(contract("mean vector length does not match mode count"));
        }
        self.mean = mean;
        Ok(self)
    }

    /// Tensor product `self ⊗ other`; modes of `other` are appended.
    pub fn tensor(&self, other: &GaussianState) -> GaussianState {
        let (n1, n2) = (self.n_modes(), other.n_modes());
        let n = n1 + n2;
        let mut nb = DMatrix::zeros(n, n);
        let mut mb = DMatrix::zeros(n, n);
        nb.view_mut((0, 0), (n1, n1)).copy_from(&self.n_block());
        nb.view_mut((n1, n1), (n2, n2)).copy_from(&other.n_block());
        mb.view_mut((0, 0), (n1, n1)).copy_from(&self.m_block());
        mb.view_mut((n1, n1), (n2, n2)).copy_from(&other.m_block());
        let mut mean = DVector::zeros(n);
        mean.rows_mut(0, n1).copy_from(&self.mean);
        mean.rows_mut(n1, n2).copy_from(&other.mean);
        GaussianState {
            mean,
            smatrix: assemble(&nb, &mb),
        }
    }

    /// Appends `k` vacuum modes (ancillas) after the existing ones.
    pub fn with_vacuum_modes(&self, k: usize) -> GaussianState {
        self.tensor(&GaussianState::vacuum(k))
    }

    /// Reduced state on the listed modes, in the listed order.
    pub fn partial_state(&self, keep: &[usize]) -> Result<GaussianState> {
        let n = self.n_modes();
        check_indices(keep, n)?;
        let nb = self.n_block();
        let mb = self.m_block();
        let k = keep.len();
        let sub_n = DMatrix::from_fn(k, k, |i, j| nb[(keep[i], keep[j])]);
        let sub_m = DMatrix::from_fn(k, k, |i, j| mb[(keep[i], keep[j])]);
        let mean = DVector::from_fn(k, |i, _| self.mean[keep[i]]);
        Ok(GaussianState {
            mean,
            smatrix: assemble(&sub_n, &sub_m),
        })
    }

    /// Applies `map` to the modes listed in `input_modes`; the other modes
    /// are left untouched.
    pub fn apply_mode_map(&self, map: &ModeMap, input_modes: &[usize]) -> Result<GaussianState> {
        let n = self.n_modes();
        check_indices(input_modes, n)?;
        if map.size() != input_modes.len() {
            return Err(contract(format!(
                "map acts on {} modes but {} indices were given",
                map.size(),
                input_modes.len()
            )));
        }
        map.check_symplectic()?;

        // Embed into the full mode set.
        let mut a = DMatrix::<C64>::identity(n, n);
        let mut b = DMatrix::<C64>::zeros(n, n);
        for (r, &i) in input_modes.iter().enumerate() {
            for (c, &j) in input_modes.iter().enumerate() {
                a[(i, j)] = map.a[(r, c)];
                b[(i, j)] = map.b[(r, c)];
            }
        }
        // v' = T v with T = [[A, B], [B̄, Ā]]; V' = T V T^†.
        let mut t = DMatrix::<C64>::zeros(2 * n, 2 * n);
        t.view_mut((0, 0), (n, n)).copy_from(&a);
        t.view_mut((0, n), (n, n)).copy_from(&b);
        t.view_mut((n, 0), (n, n)).copy_from(&b.map(|z| z.conj()));
        t.view_mut((n, n), (n, n)).copy_from(&a.map(|z| z.conj()));
        let smatrix = &t * &self.smatrix * t.adjoint();
        let mean = &a * &self.mean + &b * self.mean.map(|z| z.conj());
        let out = GaussianState { mean, smatrix }.symmetrized();
        out.check_physical()?;
        Ok(out)
    }

    /// Photon numbers and two-point moments including the mean field.
    pub fn moments(&self) -> Moments {
        let n = self.n_modes();
        let nb = self.n_block();
        let mb = self.m_block();
        let alpha = &self.mean;
        let phase_insensitive = DMatrix::from_fn(n, n, |j, k| nb[(j, k)] + alpha[j].conj() * alpha[k]);
        let phase_sensitive = DMatrix::from_fn(n, n, |j, k| mb[(j, k)] + alpha[j] * alpha[k]);
        let photon_numbers = (0..n).map(|j| phase_insensitive[(j, j)].re.max(0.0)).collect();
        Moments {
            photon_numbers,
            phase_sensitive,
            phase_insensitive,
        }
    }

    /// Symmetrized quadrature covariance, `x = [q_1..q_n, p_1..p_n]` with
    /// vacuum variance 1/2.
    pub fn quadrature_covariance(&self) -> DMatrix<f64> {
        let n = self.n_modes();
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let i = C64::new(0.0, 1.0);
        let mut omega = DMatrix::<C64>::zeros(2 * n, 2 * n);
        let mut swap = DMatrix::<C64>::zeros(2 * n, 2 * n);
        for j in 0..n {
            omega[(j, j)] = C64::new(s, 0.0);
            omega[(j, j + n)] = C64::new(s, 0.0);
            omega[(j + n, j)] = -i * s;
            omega[(j + n, j + n)] = i * s;
            swap[(j, j + n)] = ONE;
            swap[(j + n, j)] = ONE;
        }
        // <v vᵀ> = V P, so <x xᵀ> = Ω V P Ωᵀ.
        let xx = &omega * &self.smatrix * swap * omega.transpose();
        let re = xx.map(|z| z.re);
        (&re + re.transpose()) * 0.5
    }

    /// Symplectic eigenvalues in ascending order (vacuum units: 1/2).
    pub fn symplectic_eigenvalues(&self) -> Vec<f64> {
        let n = self.n_modes();
        let sigma = self.quadrature_covariance();
        let eig = sigma.symmetric_eigen();
        let sqrt_diag = DMatrix::from_diagonal(&eig.eigenvalues.map(|x| x.max(0.0).sqrt()));
        let root = &eig.eigenvectors * sqrt_diag * eig.eigenvectors.transpose();
        let mut j = DMatrix::<f64>::zeros(2 * n, 2 * n);
        for k in 0..n {
            j[(k, k + n)] = 1.0;
            j[(k + n, k)] = -1.0;
        }
        // i S J S is Hermitian with spectrum ±ν.
        let sjs = &root * j * &root;
        let h = sjs.map(|x| C64::new(0.0, x));
        let mut nus: Vec<f64> = h.symmetric_eigen().eigenvalues.iter().map(|x| x.abs()).collect();
        nus.sort_by(|a, b| a.partial_cmp(b).unwrap());
        // Each ν appears twice (as ±ν).
        nus.into_iter().step_by(2).collect()
    }

    /// Fails if any symplectic eigenvalue is below `1/2 - TOL_PHYS` or a
    /// photon number is negative.
    pub fn check_physical(&self) -> Result<()> {
        let n = self.n_modes();
        for j in 0..n {
            let nj = self.smatrix[(n + j, n + j)];
            if nj.re < -TOL_PHYS || nj.im.abs() > TOL_PHYS {
                return Err(domain(format!("mode {j} has photon number {nj}")));
            }
        }
        let min_nu = self.symplectic_eigenvalues().into_iter().fold(f64::INFINITY, f64::min);
        if min_nu < 0.5 - TOL_PHYS {
            return Err(domain(format!("symplectic eigenvalue {min_nu} below vacuum level 1/2")));
        }
        Ok(())
    }

    /// Restores the block symmetries of `V` by averaging with their images:
    /// `N` Hermitian, `M` symmetric, and the dependent blocks rebuilt.
    fn symmetrized(self) -> Self {
        let n = self.n_modes();
        let lr = self.smatrix.view((n, n), (n, n)).into_owned();
        let ul = self.smatrix.view((0, 0), (n, n)).into_owned();
        let ur = self.smatrix.view((0, n), (n, n)).into_owned();
        let ll = self.smatrix.view((n, 0), (n, n)).into_owned();
        let ident = DMatrix::<C64>::identity(n, n);
        // N from the lower-right block and from the upper-left one (1 + Nᵀ).
        let n_from_ul = (ul - &ident).transpose();
        let nb = (&lr + &n_from_ul) * C64::new(0.5, 0.0);
        let nb = (&nb + nb.adjoint()) * C64::new(0.5, 0.0);
        let m_from_ll = ll.map(|z| z.conj());
        let mb = (&ur + &m_from_ll) * C64::new(0.5, 0.0);
        let mb = (&mb + mb.transpose()) * C64::new(0.5, 0.0);
        GaussianState {
            mean: self.mean,
            smatrix: assemble(&nb, &mb),
        }
    }
}

fn assemble(nb: &DMatrix<C64>, mb: &DMatrix<C64>) -> DMatrix<C64> {
    let n = nb.nrows();
    let mut v = DMatrix::zeros(2 * n, 2 * n);
    v.view_mut((0, 0), (n, n))
        .copy_from(&(DMatrix::<C64>::identity(n, n) + nb.transpose()));
    v.view_mut((0, n), (n, n)).copy_from(mb);
    v.view_mut((n, 0), (n, n)).copy_from(&mb.map(|z| z.conj()));
    v.view_mut((n, n), (n, n)).copy_from(nb);
    v
}

fn check_indices(indices: &[usize], n: usize) -> Result<()> {
    for (pos, &i) in indices.iter().enumerate() {
        if i >= n {
            return Err(contract(format!("mode index {i} out of range for {n} modes")));
        }
        if indices[..pos].contains(&i) {
            return Err(contract(format!("mode index {i} repeated")));
        }
    }
    Ok(())
}

/// Bogoliubov transformation `a'_j = Σ_k A_{jk} a_k + B_{jk} a_k^†` on a
/// fixed set of modes.
#[derive(Debug, Clone, PartialEq)]
pub struct ModeMap {
    pub a: DMatrix<C64>,
    pub b: DMatrix<C64>,
}

impl ModeMap {
    pub fn new(a: DMatrix<C64>, b: DMatrix<C64>) -> Result<Self> {
        if !a.is_square() || a.shape() != b.shape() {
            return Err(contract("mode map blocks must be square and of equal shape"));
        }
        let map = ModeMap { a, b };
        map.check_symplectic()?;
        Ok(map)
    }

    pub fn identity(n: usize) -> Self {
        ModeMap {
            a: DMatrix::identity(n, n),
            b: DMatrix::zeros(n, n),
        }
    }

    pub fn size(&self) -> usize {
        self.a.nrows()
    }

    /// `a'_1 = √κ a_1 + √(1-κ) a_2`, `a'_2 = -√(1-κ) a_1 + √κ a_2`.
    pub fn beamsplitter(transmissivity: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&transmissivity) {
            return Err(domain(format!("transmissivity {transmissivity} outside [0, 1]")));
        }
        let t = transmissivity.sqrt();
        let r = (1.0 - transmissivity).sqrt();
        let a = DMatrix::from_row_slice(2, 2, &[t, r, -r, t].map(|x| C64::new(x, 0.0)));
        Ok(ModeMap {
            a,
            b: DMatrix::zeros(2, 2),
        })
    }

    /// Two-mode squeezer with gain `G >= 1`:
    /// `a'_1 = √G a_1 + √(G-1) a_2^†`, `a'_2 = √G a_2 + √(G-1) a_1^†`.
    pub fn two_mode_squeezer(gain: f64) -> Result<Self> {
        if gain.is_nan() || gain < 1.0 {
            return Err(domain(format!("amplifier gain {gain} below 1")));
        }
        let g = C64::new(gain.sqrt(), 0.0);
        let h = C64::new((gain - 1.0).sqrt(), 0.0);
        Ok(ModeMap {
            a: DMatrix::from_row_slice(2, 2, &[g, ZERO, ZERO, g]),
            b: DMatrix::from_row_slice(2, 2, &[ZERO, h, h, ZERO]),
        })
    }

    /// `first` then `second`: the map whose action equals applying `first`
    /// and afterwards `second` to the same modes.
    pub fn then(&self, second: &ModeMap) -> ModeMap {
        // a'' = A2 a' + B2 a'^†, a' = A1 a + B1 a^†.
        let a = &second.a * &self.a + &second.b * self.b.map(|z| z.conj());
        let b = &second.a * &self.b + &second.b * self.a.map(|z| z.conj());
        ModeMap { a, b }
    }

    /// Commutator preservation: `A A^† - B B^† = 1` and `A Bᵀ` symmetric.
    pub fn check_symplectic(&self) -> Result<()> {
        let n = self.size();
        let lhs = &self.a * self.a.adjoint() - &self.b * self.b.adjoint();
        let dev = (lhs - DMatrix::<C64>::identity(n, n)).iter().map(|z| z.norm()).fold(0.0, f64::max);
        let abt = &self.a * self.b.transpose();
        let asym = (&abt - abt.transpose()).iter().map(|z| z.norm()).fold(0.0, f64::max);
        if dev > TOL_PHYS || asym > TOL_PHYS {
            return Err(contract(format!(
                "mode map is not symplectic (|AA†-BB†-1| = {dev:.3e}, |ABᵀ-BAᵀ| = {asym:.3e})"
            )));
        }
        Ok(())
    }
}

/// Two-mode squeezed vacuum with mean photon number `n_s` per mode.
pub fn tmsv_state(n_s: f64) -> Result<GaussianState> {
    check_nonneg("N_S", n_s)?;
    let c = C64::new((n_s * (n_s + 1.0)).sqrt(), 0.0);
    let nb = DMatrix::from_diagonal_element(2, 2, C64::new(n_s, 0.0));
    let mb = DMatrix::from_row_slice(2, 2, &[ZERO, c, c, ZERO]);
    GaussianState::from_blocks(&nb, &mb)
}

/// Single-mode thermal state with mean photon number `n`.
pub fn thermal_state(n: f64) -> Result<GaussianState> {
    check_nonneg("N", n)?;
    let nb = DMatrix::from_element(1, 1, C64::new(n, 0.0));
    GaussianState::from_blocks(&nb, &DMatrix::zeros(1, 1))
}

/// Coherent state `|alpha>`.
pub fn coherent_state(alpha: C64) -> GaussianState {
    GaussianState {
        mean: DVector::from_element(1, alpha),
        smatrix: GaussianState::vacuum(1).smatrix,
    }
}

pub(crate) fn check_nonneg(name: &str, x: f64) -> Result<()> {
    if x.is_finite() && x >= 0.0 {
        Ok(())
    } else {
        Err(domain(format!("{name} = {x} must be a finite non-negative number")))
    }
}
