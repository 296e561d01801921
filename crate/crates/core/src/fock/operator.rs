use crate::error::{contract, Error, Result};
use nalgebra::{DMatrix, DVector};
use num_complex::Complex64 as C64;

/// Sentinel in the position table for basis states outside every block.
const ABSENT: usize = usize::MAX;

/// Eigenvalues below this are treated as negative round-off.
pub const NEGATIVE_EIGEN_TOL: f64 = 1e-10;

/// A square diagonal block of an operator, acting on the listed basis
/// indices (in increasing order).
#[derive(Debug, Clone, PartialEq)]
pub struct Block {
    pub indices: Vec<usize>,
    pub matrix: DMatrix<C64>,
}

/// Operator on a truncated multimode Fock space, stored as a direct sum of
/// dense blocks.
///
/// Basis states are flattened row-major over `dims`, mode 0 most
/// significant. Matrix elements between different blocks, and every element
/// touching an index outside all blocks, are zero. Operators with no known
/// structure are a single block covering the whole space.
#[derive(Debug, Clone)]
pub struct FockOperator {
    dims: Vec<usize>,
    blocks: Vec<Block>,
    position: Vec<(usize, usize)>,
    hermitian: bool,
}

/// A single ladder operator in a product.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Ladder {
    Create(usize),
    Annihilate(usize),
}

pub fn flat_index(dims: &[usize], occupation: &[usize]) -> Option<usize> {
    if occupation.len() != dims.len() {
        return None;
    }
    let mut idx = 0;
    for (&n, &d) in occupation.iter().zip(dims) {
        if n >= d {
            return None;
        }
        idx = idx * d + n;
    }
    Some(idx)
}

pub fn occupation(dims: &[usize], mut idx: usize) -> Vec<usize> {
    let mut occ = vec![0; dims.len()];
    for j in (0..dims.len()).rev() {
        occ[j] = idx % dims[j];
        idx /= dims[j];
    }
    occ
}

/// Applies `ops` right to left to the basis state `occ`, returning the
/// amplitude; the occupation is updated in place and is not truncated.
fn apply_ladders(ops: &[Ladder], occ: &mut [usize]) -> f64 {
    let mut amp = 1.0;
    for op in ops.iter().rev() {
        match *op {
            Ladder::Create(j) => {
                occ[j] += 1;
                amp *= (occ[j] as f64).sqrt();
            }
            Ladder::Annihilate(j) => {
                if occ[j] == 0 {
                    return 0.0;
                }
                amp *= (occ[j] as f64).sqrt();
                occ[j] -= 1;
            }
        }
    }
    amp
}

impl FockOperator {
    /// Assembles an operator from disjoint blocks.
    pub fn from_blocks(dims: Vec<usize>, blocks: Vec<Block>, hermitian: bool) -> Result<Self> {
        if dims.is_empty() || dims.contains(&0) {
            return Err(contract(format!("invalid Fock dims {dims:?}")));
        }
        let size: usize = dims.iter().product();
        let mut position = vec![(ABSENT, ABSENT); size];
        for (b, block) in blocks.iter().enumerate() {
            let k = block.indices.len();
            if block.matrix.nrows() != k || block.matrix.ncols() != k {
                return Err(contract("block matrix does not match its index list"));
            }
            for (local, &idx) in block.indices.iter().enumerate() {
                if idx >= size || position[idx].0 != ABSENT {
                    return Err(contract(format!("basis index {idx} out of range or in two blocks")));
                }
                if local > 0 && block.indices[local - 1] >= idx {
                    return Err(contract("block indices must be increasing"));
                }
                position[idx] = (b, local);
            }
        }
        Ok(FockOperator {
            dims,
            blocks,
            position,
            hermitian,
        })
    }

    pub fn from_dense(dims: Vec<usize>, matrix: DMatrix<C64>, hermitian: bool) -> Result<Self> {
        let size: usize = dims.iter().product();
        if matrix.nrows() != size || matrix.ncols() != size {
            return Err(contract(format!(
                "matrix is {}x{}, dims {dims:?} need {size}",
                matrix.nrows(),
                matrix.ncols()
            )));
        }
        let indices = (0..size).collect();
        Self::from_blocks(dims, vec![Block { indices, matrix }], hermitian)
    }

    /// Diagonal operator, one singleton block per nonzero entry.
    pub fn diagonal(dims: Vec<usize>, values: &[f64]) -> Result<Self> {
        let size: usize = dims.iter().product();
        if values.len() != size {
            return Err(contract("diagonal length does not match dims"));
        }
        let blocks = values
            .iter()
            .enumerate()
            .filter(|(_, v)| **v != 0.0)
            .map(|(i, &v)| Block {
                indices: vec![i],
                matrix: DMatrix::from_element(1, 1, C64::new(v, 0.0)),
            })
            .collect();
        Self::from_blocks(dims, blocks, true)
    }

    /// `|ψ⟩⟨ψ|` for a ket given on the full flattened basis.
    pub fn pure(dims: Vec<usize>, ket: &DVector<C64>) -> Result<Self> {
        Self::from_dense(dims, ket * ket.adjoint(), true)
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn size(&self) -> usize {
        self.position.len()
    }

    pub fn blocks(&self) -> &[Block] {
        &self.blocks
    }

    pub fn is_hermitian(&self) -> bool {
        self.hermitian
    }

    pub fn get(&self, row: usize, col: usize) -> C64 {
        let (br, lr) = self.position[row];
        let (bc, lc) = self.position[col];
        if br == ABSENT || br != bc {
            C64::new(0.0, 0.0)
        } else {
            self.blocks[br].matrix[(lr, lc)]
        }
    }

    pub fn to_dense(&self) -> DMatrix<C64> {
        let n = self.size();
        let mut m = DMatrix::zeros(n, n);
        for block in &self.blocks {
            for (i, &r) in block.indices.iter().enumerate() {
                for (j, &c) in block.indices.iter().enumerate() {
                    m[(r, c)] = block.matrix[(i, j)];
                }
            }
        }
        m
    }

    pub fn trace(&self) -> C64 {
        self.blocks.iter().map(|b| b.matrix.trace()).sum()
    }

    /// Largest `|X - X†|` entry.
    pub fn hermiticity_defect(&self) -> f64 {
        self.blocks
            .iter()
            .map(|b| (&b.matrix - b.matrix.adjoint()).iter().fold(0.0f64, |m, z| m.max(z.norm())))
            .fold(0.0, f64::max)
    }

    pub fn scaled(&self, factor: f64) -> FockOperator {
        let mut out = self.clone();
        for b in &mut out.blocks {
            b.matrix *= C64::new(factor, 0.0);
        }
        out
    }

    /// `Tr[ρ O]` for a product `O` of ladder operators (rightmost acts
    /// first). Intermediate states are not truncated, so the value is exact
    /// for the truncated `ρ`.
    pub fn expect(&self, ops: &[Ladder]) -> C64 {
        for op in ops {
            let (Ladder::Create(j) | Ladder::Annihilate(j)) = *op;
            assert!(j < self.dims.len(), "mode {j} out of range");
        }
        let mut total = C64::new(0.0, 0.0);
        for (b, block) in self.blocks.iter().enumerate() {
            for (local, &idx) in block.indices.iter().enumerate() {
                let mut occ = occupation(&self.dims, idx);
                let amp = apply_ladders(ops, &mut occ);
                if amp == 0.0 {
                    continue;
                }
                let Some(out) = flat_index(&self.dims, &occ) else {
                    continue;
                };
                let (ob, ol) = self.position[out];
                if ob == b {
                    total += block.matrix[(local, ol)] * amp;
                }
            }
        }
        total
    }

    /// Mean photon number of every mode.
    pub fn photon_numbers(&self) -> Vec<f64> {
        (0..self.dims.len())
            .map(|j| self.expect(&[Ladder::Create(j), Ladder::Annihilate(j)]).re)
            .collect()
    }

    /// Tensor product; blocks of the result are products of blocks.
    pub fn tensor(&self, other: &FockOperator) -> FockOperator {
        let inner = other.size();
        let mut dims = self.dims.clone();
        dims.extend_from_slice(&other.dims);
        let mut blocks = Vec::with_capacity(self.blocks.len() * other.blocks.len());
        for a in &self.blocks {
            for b in &other.blocks {
                let mut pairs: Vec<(usize, usize, usize)> = Vec::with_capacity(a.indices.len() * b.indices.len());
                for (i, &x) in a.indices.iter().enumerate() {
                    for (j, &y) in b.indices.iter().enumerate() {
                        pairs.push((x * inner + y, i, j));
                    }
                }
                // row-major flattening already yields increasing indices
                let k = pairs.len();
                let matrix = DMatrix::from_fn(k, k, |r, c| {
                    let (_, ar, br) = pairs[r];
                    let (_, ac, bc) = pairs[c];
                    a.matrix[(ar, ac)] * b.matrix[(br, bc)]
                });
                blocks.push(Block {
                    indices: pairs.iter().map(|p| p.0).collect(),
                    matrix,
                });
            }
        }
        FockOperator::from_blocks(dims, blocks, self.hermitian && other.hermitian)
            .expect("product of valid block structures is valid")
    }

    /// `U ρ U†` for a dense `U` on the full space; the result is one block.
    pub fn conjugate_by(&self, unitary: &FockOperator) -> Result<FockOperator> {
        if unitary.dims != self.dims {
            return Err(contract("unitary acts on a different truncated space"));
        }
        let u = unitary.to_dense();
        let rho = self.to_dense();
        FockOperator::from_dense(self.dims.clone(), &u * rho * u.adjoint(), self.hermitian)
    }

    /// Operator restricted to an increasing list of basis indices, as a
    /// dense matrix.
    pub fn restrict(&self, indices: &[usize]) -> DMatrix<C64> {
        let k = indices.len();
        DMatrix::from_fn(k, k, |r, c| self.get(indices[r], indices[c]))
    }

    /// Largest deficit `1 - ‖U|n⟩‖²` over input basis states inside the box
    /// `n_j < input_box[j]`.
    pub fn column_deficit(&self, input_box: &[usize]) -> f64 {
        let mut worst = 0.0f64;
        for idx in 0..self.size() {
            let occ = occupation(&self.dims, idx);
            if occ.iter().zip(input_box).any(|(n, b)| n >= b) {
                continue;
            }
            let (b, local) = self.position[idx];
            let norm = if b == ABSENT {
                0.0
            } else {
                self.blocks[b].matrix.column(local).norm_squared()
            };
            worst = worst.max(1.0 - norm);
        }
        worst
    }

    /// Truncation error when [`Self::column_deficit`] exceeds `tol`.
    pub fn check_unitary(&self, input_box: &[usize], tol: f64) -> Result<()> {
        let deficit = self.column_deficit(input_box);
        if deficit > tol {
            let mode = (0..self.dims.len()).max_by_key(|&j| input_box[j] * 1000 / self.dims[j]).unwrap_or(0);
            return Err(Error::Truncation {
                mode,
                dim: self.dims[mode],
                detail: format!("column-norm deficit {deficit:.3e} exceeds {tol:.1e}"),
            });
        }
        Ok(())
    }
}

/// Partition of the basis into the connected components of the union of
/// the two block structures. Indices outside both operators are dropped.
pub fn joint_partition(a: &FockOperator, b: &FockOperator) -> Result<Vec<Vec<usize>>> {
    if a.dims != b.dims {
        return Err(contract(format!("dims differ: {:?} vs {:?}", a.dims, b.dims)));
    }
    let n = a.size();
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(parent: &mut [usize], mut x: usize) -> usize {
        while parent[x] != x {
            parent[x] = parent[parent[x]];
            x = parent[x];
        }
        x
    }
    let mut present = vec![false; n];
    for op in [a, b] {
        for block in &op.blocks {
            let first = block.indices[0];
            for &idx in &block.indices {
                present[idx] = true;
                let (ra, rb) = (find(&mut parent, first), find(&mut parent, idx));
                if ra != rb {
                    parent[rb.max(ra)] = rb.min(ra);
                }
            }
        }
    }
    let mut groups: Vec<Vec<usize>> = Vec::new();
    let mut slot = vec![ABSENT; n];
    for idx in (0..n).filter(|&i| present[i]) {
        let root = find(&mut parent, idx);
        if slot[root] == ABSENT {
            slot[root] = groups.len();
            groups.push(Vec::new());
        }
        groups[slot[root]].push(idx);
    }
    Ok(groups)
}

/// Eigen-decomposition of a Hermitian matrix, using real arithmetic when
/// the matrix has no imaginary part.
pub fn hermitian_eigen(m: &DMatrix<C64>) -> (DVector<f64>, DMatrix<C64>) {
    let n = m.nrows();
    if n == 1 {
        return (DVector::from_element(1, m[(0, 0)].re), DMatrix::from_element(1, 1, C64::new(1.0, 0.0)));
    }
    if m.iter().all(|z| z.im == 0.0) {
        let real = DMatrix::from_fn(n, n, |i, j| 0.5 * (m[(i, j)].re + m[(j, i)].re));
        let eig = real.symmetric_eigen();
        let vectors = eig.eigenvectors.map(|x| C64::new(x, 0.0));
        (eig.eigenvalues, vectors)
    } else {
        let herm = (m + m.adjoint()) * C64::new(0.5, 0.0);
        let eig = herm.symmetric_eigen();
        (eig.eigenvalues, eig.eigenvectors)
    }
}

/// `exp(K)` for an anti-Hermitian `K`, via the eigen-decomposition of the
/// Hermitian `iK`.
pub fn expm_antihermitian(k: &DMatrix<C64>) -> DMatrix<C64> {
    let h = k * C64::new(0.0, 1.0);
    let (vals, vecs) = hermitian_eigen(&h);
    // exp(K) = exp(-iH)
    let phases = DMatrix::from_diagonal(&vals.map(|x| C64::new(0.0, -x).exp()));
    &vecs * phases * vecs.adjoint()
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn c(x: f64) -> C64 {
        C64::new(x, 0.0)
    }

    #[test]
    fn flattening_round_trip() {
        let dims = [3, 4, 2];
        for idx in 0..24 {
            assert_eq!(flat_index(&dims, &occupation(&dims, idx)), Some(idx));
        }
        assert_eq!(flat_index(&dims, &[1, 2, 1]), Some(8 + 4 + 1));
        assert_eq!(flat_index(&dims, &[3, 0, 0]), None);
    }

    #[test]
    fn overlapping_blocks_are_rejected() {
        let blk = |i: Vec<usize>| Block {
            matrix: DMatrix::identity(i.len(), i.len()),
            indices: i,
        };
        assert!(FockOperator::from_blocks(vec![4], vec![blk(vec![0, 1]), blk(vec![1, 2])], true).is_err());
        assert!(FockOperator::from_blocks(vec![4], vec![blk(vec![2, 1])], true).is_err());
        assert!(FockOperator::from_blocks(vec![4], vec![blk(vec![0, 3]), blk(vec![1])], true).is_ok());
    }

    #[test]
    fn expectation_of_number_and_ladder_products() {
        // (|0⟩ + |1⟩)/√2
        let s = 0.5f64.sqrt();
        let rho = FockOperator::pure(vec![3], &DVector::from_vec(vec![c(s), c(s), c(0.0)])).unwrap();
        assert_relative_eq!(rho.expect(&[Ladder::Annihilate(0)]).re, 0.5, max_relative = 1e-15);
        assert_relative_eq!(rho.photon_numbers()[0], 0.5, max_relative = 1e-15);
        // a a† = a† a + 1, evaluated without truncating the intermediate state
        let anti = rho.expect(&[Ladder::Annihilate(0), Ladder::Create(0)]).re;
        assert_relative_eq!(anti, 1.5, max_relative = 1e-15);
    }

    #[test]
    fn tensor_matches_kronecker() {
        let a = FockOperator::diagonal(vec![2], &[0.7, 0.3]).unwrap();
        let m = DMatrix::from_row_slice(3, 3, &[0.5, 0.1, 0.0, 0.1, 0.3, 0.05, 0.0, 0.05, 0.2].map(c));
        let b = FockOperator::from_dense(vec![3], m.clone(), true).unwrap();
        let t = a.tensor(&b);
        let expected = a.to_dense().kronecker(&m);
        assert_eq!(t.dims(), &[2, 3]);
        assert!((t.to_dense() - expected).iter().all(|z| z.norm() < 1e-16));
        assert_relative_eq!(t.trace().re, 1.0, max_relative = 1e-15);
    }

    #[test]
    fn joint_partition_merges_overlaps() {
        let a = FockOperator::diagonal(vec![5], &[0.2; 5]).unwrap();
        let b = FockOperator::from_blocks(
            vec![5],
            vec![
                Block {
                    indices: vec![0, 2],
                    matrix: DMatrix::identity(2, 2),
                },
                Block {
                    indices: vec![3],
                    matrix: DMatrix::identity(1, 1),
                },
            ],
            true,
        )
        .unwrap();
        let mut parts = joint_partition(&a, &b).unwrap();
        parts.sort();
        assert_eq!(parts, vec![vec![0, 2], vec![1], vec![3], vec![4]]);
    }

    #[test]
    fn matrix_exponential_of_rotation_generator() {
        let theta = 0.3;
        let k = DMatrix::from_row_slice(2, 2, &[0.0, -theta, theta, 0.0].map(c));
        let u = expm_antihermitian(&k);
        assert_relative_eq!(u[(0, 0)].re, theta.cos(), max_relative = 1e-14);
        assert_relative_eq!(u[(1, 0)].re, theta.sin(), max_relative = 1e-14);
        assert!(u[(0, 1)].im.abs() < 1e-15);
    }
}
